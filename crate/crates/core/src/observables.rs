use crate::dynamics::{evolve_analytic, initial_joint_state, CachedPropagator, JCParams, JointState};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, partial_transpose_atom};
use crate::states::FieldState;
use rayon::prelude::*;

/// Negative partial-transpose eigenvalues above this (i.e. in (-CLAMP, 0)) are
/// treated as truncation noise and clamped to zero.
pub const NEGATIVITY_CLAMP: f64 = 1e-10;
/// Minimum number of grid rows a contrast window must cover.
pub const MIN_WINDOW_ROWS: usize = 10;

/// One record of the dynamical observables at dimensionless time lambda_t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub lambda_t: f64,
    pub inversion: f64,
    pub negativity: f64,
}

/// Ordered time series of both observables.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub rows: Vec<SeriesRow>,
}

/// Which evolution path drives a time series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorKind {
    Analytic,
    Numeric,
}

/// Population inversion: excited minus ground occupation probability.
pub fn population_inversion(state: &JointState) -> f64 {
    let n = state.field_dim;
    let mut w = 0.0;
    for i in 0..n {
        w += state.rho[[i, i]].re - state.rho[[n + i, n + i]].re;
    }
    w
}

/// Entanglement negativity: absolute sum of the negative eigenvalues of the
/// partially transposed density matrix, with sub-clamp noise suppressed.
pub fn negativity(state: &JointState) -> Result<f64> {
    negativity_with_clamp(state, NEGATIVITY_CLAMP)
}

/// Negativity with an explicit noise clamp, for sensitivity checks.
pub fn negativity_with_clamp(state: &JointState, clamp: f64) -> Result<f64> {
    let pt = partial_transpose_atom(&state.rho, state.field_dim)?;
    let eigenvalues = hermitian_eigenvalues(&pt, 1e-9)?;
    let mut total = 0.0;
    for lam in eigenvalues {
        if lam <= -clamp {
            total -= lam;
        }
    }
    Ok(total)
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    for (i, &t) in grid.iter().enumerate() {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::DomainError(format!("grid point {i} must be finite and nonnegative, got {t}")));
        }
        if i > 0 && t <= grid[i - 1] {
            return Err(Error::DomainError(format!(
                "grid must be strictly increasing, point {i} = {t} after {}",
                grid[i - 1]
            )));
        }
    }
    Ok(())
}

/// Evolves the field through the chosen propagator and records both observables
/// at every grid point. Points are independent and evaluated in parallel;
/// the output order always follows the grid.
pub fn time_series(field: &FieldState, grid: &[f64], propagator: PropagatorKind) -> Result<TimeSeries> {
    validate_grid(grid)?;
    let params = JCParams::default();
    let rows: Result<Vec<SeriesRow>> = match propagator {
        PropagatorKind::Analytic => grid
            .par_iter()
            .map(|&lambda_t| {
                let state = evolve_analytic(field, &params, lambda_t)?;
                Ok(SeriesRow {
                    lambda_t,
                    inversion: population_inversion(&state),
                    negativity: negativity(&state)?,
                })
            })
            .collect(),
        PropagatorKind::Numeric => {
            let cached = CachedPropagator::new(&params, field.params.cutoff)?;
            let initial = initial_joint_state(field);
            grid.par_iter()
                .map(|&lambda_t| {
                    let state = cached.evolve(&initial, lambda_t);
                    Ok(SeriesRow {
                        lambda_t,
                        inversion: population_inversion(&state),
                        negativity: negativity(&state)?,
                    })
                })
                .collect()
        }
    };
    Ok(TimeSeries { rows: rows? })
}

/// Uniform grid of `steps` points from 0 to t_max inclusive.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![0.0];
    }
    (0..steps).map(|i| t_max * i as f64 / (steps - 1) as f64).collect()
}

/// Revival contrast of the inversion over a window: the root-mean-square
/// oscillation amplitude inside the window minus the same measure over the
/// preceding window of equal width.
///
/// The sqrt(2) factor normalizes a bare sinusoid with no preceding baseline to
/// contrast 1. Subtracting the preceding-window amplitude cancels persistent
/// background oscillation, so the value measures amplitude that appears inside
/// the window - a revival - rather than oscillation that was there all along.
/// A series that rings at a steady level through both windows therefore scores
/// near zero even though its peak amplitude may be large.
pub fn revival_contrast(series: &TimeSeries, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::DomainError(format!("invalid window [{lo}, {hi}]")));
    }
    let rms = |values: &[f64]| -> f64 {
        if values.is_empty() {
            0.0
        } else {
            (values.iter().map(|w| w * w).sum::<f64>() / values.len() as f64).sqrt()
        }
    };
    let in_window: Vec<f64> = series
        .rows
        .iter()
        .filter(|r| r.lambda_t >= lo && r.lambda_t <= hi)
        .map(|r| r.inversion)
        .collect();
    if in_window.len() < MIN_WINDOW_ROWS {
        return Err(Error::EmptyWindow { lo, hi, found: in_window.len(), min_rows: MIN_WINDOW_ROWS });
    }
    let ref_lo = lo - (hi - lo);
    let reference: Vec<f64> = series
        .rows
        .iter()
        .filter(|r| r.lambda_t >= ref_lo && r.lambda_t < lo)
        .map(|r| r.inversion)
        .collect();
    Ok(std::f64::consts::SQRT_2 * (rms(&in_window) - rms(&reference)))
}
