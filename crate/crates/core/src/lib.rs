//! Truncated Fock-space toolkit for resonant Jaynes-Cummings dynamics.
//!
//! The crate builds single-mode field states (coherent, thermal, displaced
//! thermal, mixed thermal-coherent, photon-added), couples them to a two-level
//! atom, evolves the joint state with either the closed-form resonant
//! propagator or a numeric matrix exponential, and extracts the population
//! inversion and entanglement negativity as time series. Every constructor
//! tracks the probability weight pushed above the truncation and refuses
//! parameters the basis cannot hold.

use blas_src as _;

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod observables;
pub mod special;
pub mod states;

pub use dynamics::{JCParams, JointState};
pub use error::{Error, Result};
pub use linalg::{CMat, Spectrum};
pub use observables::{PropagatorKind, SeriesRow, TimeSeries};
pub use states::{DtsMethod, FieldKind, FieldParams, FieldState};

/// Default Fock-space dimension used by the scenario runner.
pub const DEFAULT_CUTOFF: usize = 150;
/// Default upper end of the dimensionless time grid.
pub const DEFAULT_T_MAX: f64 = 25.0;
/// Default number of grid points.
pub const DEFAULT_STEPS: usize = 2001;
/// Default window bracketing the first revival of the |alpha|^2 = 10 scenarios.
pub const REVIVAL_WINDOW: (f64, f64) = (15.0, 25.0);
