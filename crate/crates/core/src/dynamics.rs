use crate::error::{Error, Result};
use crate::linalg::{matrix_exponential, CMat};
use crate::states::FieldState;
use num_complex::Complex64 as C64;

/// Coupling and detuning of the two-level interaction; time is always the
/// dimensionless product lambda*t, so the coupling only sets the unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JCParams {
    pub coupling: f64,
    pub detuning: f64,
}

impl Default for JCParams {
    fn default() -> Self {
        JCParams { coupling: 1.0, detuning: 0.0 }
    }
}

impl JCParams {
    fn validate(&self) -> Result<()> {
        if !(self.coupling.is_finite() && self.detuning.is_finite()) {
            return Err(Error::NonFinite { context: "interaction parameters" });
        }
        if self.coupling <= 0.0 {
            return Err(Error::DomainError(format!("coupling must be positive, got {}", self.coupling)));
        }
        Ok(())
    }
}

/// Atom (x) field density matrix of dimension 2N, atom-major ordering:
/// rows 0..N are |e, n>, rows N..2N are |g, n>.
#[derive(Debug, Clone)]
pub struct JointState {
    pub rho: CMat,
    pub field_dim: usize,
}

/// Product state |e><e| (x) rho_field: the atom starts excited.
pub fn initial_joint_state(field: &FieldState) -> JointState {
    let n = field.params.cutoff;
    let mut rho = CMat::zeros((2 * n, 2 * n));
    rho.slice_mut(ndarray::s![..n, ..n]).assign(&field.rho);
    JointState { rho, field_dim: n }
}

/// Interaction Hamiltonian (Delta/2) sigma_z + i lambda (a^dag sigma_minus - a sigma_plus)
/// on the truncated joint space; couples |e, n> to |g, n+1> with strength lambda sqrt(n+1).
pub fn build_hamiltonian(params: &JCParams, field_dim: usize) -> CMat {
    let n = field_dim;
    let lam = params.coupling;
    let half = params.detuning / 2.0;
    let mut h = CMat::zeros((2 * n, 2 * n));
    for i in 0..n {
        h[[i, i]] = C64::new(half, 0.0);
        h[[n + i, n + i]] = C64::new(-half, 0.0);
    }
    for i in 0..n - 1 {
        let g = lam * ((i + 1) as f64).sqrt();
        h[[n + i + 1, i]] = C64::new(0.0, g);
        h[[i, n + i + 1]] = C64::new(0.0, -g);
    }
    h
}

/// Closed-form resonant evolution of |e><e| (x) rho_field to dimensionless time
/// lambda_t, assembled blockwise from cos/sin of the Rabi angles lambda_t sqrt(n+1).
///
/// The highest Fock level is held stationary: in the truncated basis |e, N-1>
/// has no |g, N> partner, so freezing it reproduces the truncated Hamiltonian
/// exactly and keeps this path consistent with the numeric propagator.
pub fn evolve_analytic(field: &FieldState, params: &JCParams, lambda_t: f64) -> Result<JointState> {
    params.validate()?;
    if params.detuning != 0.0 {
        return Err(Error::ResonantOnly { delta: params.detuning });
    }
    if !lambda_t.is_finite() || lambda_t < 0.0 {
        return Err(Error::DomainError(format!("lambda_t must be finite and nonnegative, got {lambda_t}")));
    }
    let n = field.params.cutoff;
    let mut cos_t = vec![0.0f64; n];
    let mut sin_t = vec![0.0f64; n];
    for i in 0..n {
        let angle = lambda_t * ((i + 1) as f64).sqrt();
        cos_t[i] = angle.cos();
        sin_t[i] = angle.sin();
    }
    cos_t[n - 1] = 1.0;
    sin_t[n - 1] = 0.0;

    let rf = &field.rho;
    let mut rho = CMat::zeros((2 * n, 2 * n));
    for r in 0..n {
        for c in 0..n {
            rho[[r, c]] = rf[[r, c]] * (cos_t[r] * cos_t[c]);
        }
    }
    for r in 1..n {
        for c in 0..n {
            let ge = rf[[r - 1, c]] * (sin_t[r - 1] * cos_t[c]);
            rho[[n + r, c]] = ge;
            rho[[c, n + r]] = ge.conj();
        }
    }
    for r in 1..n {
        for c in 1..n {
            rho[[n + r, n + c]] = rf[[r - 1, c - 1]] * (sin_t[r - 1] * sin_t[c - 1]);
        }
    }
    Ok(JointState { rho, field_dim: n })
}

/// Numeric evolution U rho U^dag with U = exp(-i H t); valid at any detuning
/// and used as the oracle for the analytic path.
pub fn evolve_numeric(initial: &JointState, params: &JCParams, lambda_t: f64) -> Result<JointState> {
    params.validate()?;
    if !lambda_t.is_finite() || lambda_t < 0.0 {
        return Err(Error::DomainError(format!("lambda_t must be finite and nonnegative, got {lambda_t}")));
    }
    let h = build_hamiltonian(params, initial.field_dim);
    let t = lambda_t / params.coupling;
    let generator = h.mapv(|z| z * C64::new(0.0, -t));
    let u = matrix_exponential(&generator)?;
    let uh = u.t().map(|z| z.conj());
    let rho = u.dot(&initial.rho).dot(&uh);
    Ok(JointState { rho, field_dim: initial.field_dim })
}

/// Resonant propagator with the spectrum of H cached, for dense time grids.
pub(crate) struct CachedPropagator {
    eigenvalues: Vec<f64>,
    vectors: CMat,
    vectors_h: CMat,
    coupling: f64,
}

impl CachedPropagator {
    pub fn new(params: &JCParams, field_dim: usize) -> Result<Self> {
        params.validate()?;
        let h = build_hamiltonian(params, field_dim);
        let spectrum = crate::linalg::hermitian_eigendecomposition(&h, 1e-12)?;
        let vectors_h = spectrum.eigenvectors.t().map(|z| z.conj());
        Ok(CachedPropagator {
            eigenvalues: spectrum.eigenvalues,
            vectors: spectrum.eigenvectors,
            vectors_h,
            coupling: params.coupling,
        })
    }

    pub fn evolve(&self, initial: &JointState, lambda_t: f64) -> JointState {
        let t = lambda_t / self.coupling;
        let mut phased = self.vectors.clone();
        for (j, lam) in self.eigenvalues.iter().enumerate() {
            let phase = C64::from_polar(1.0, -lam * t);
            phased.column_mut(j).mapv_inplace(|z| z * phase);
        }
        let u = phased.dot(&self.vectors_h);
        let uh = u.t().map(|z| z.conj());
        JointState { rho: u.dot(&initial.rho).dot(&uh), field_dim: initial.field_dim }
    }
}
