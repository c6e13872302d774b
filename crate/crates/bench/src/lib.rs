//! Shared fixtures for the criterion benchmarks.

use jcsim_core::states::{displaced_thermal, equal_overlap_q, mtcs, DtsMethod};
use jcsim_core::FieldState;
use num_complex::Complex64 as C64;

/// |alpha|^2 = 10 amplitude used across the production scenarios.
pub fn alpha10() -> C64 {
    C64::new(10f64.sqrt(), 0.0)
}

/// Displaced thermal benchmark state at the production cutoff.
pub fn dts_fixture(cutoff: usize) -> FieldState {
    displaced_thermal(alpha10(), 1.0, cutoff, DtsMethod::Unitary).expect("cutoff is sufficient")
}

/// Equal-overlap mixed state at the production cutoff.
pub fn mtcs_fixture(cutoff: usize) -> FieldState {
    let qbar = equal_overlap_q(alpha10(), 1.0);
    mtcs(alpha10(), 1.0, qbar, cutoff).expect("cutoff is sufficient")
}
