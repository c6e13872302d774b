use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::special::laguerre;
use num_complex::Complex64 as C64;

/// Probability mass allowed above the truncation before a constructor refuses.
pub const TAIL_TOL: f64 = 1e-10;
/// Mixture expansions stop once the neglected cumulative weight drops below this.
const SERIES_TOL: f64 = 1e-12;
/// Hard cap on mixture expansion length.
const SERIES_CAP: usize = 400;

/// Parameters describing a field state on a truncated Fock basis.
///
/// `q` is the coherent-component weight and only meaningful for the mixed
/// thermal-coherent family; constructors of pure families store 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldParams {
    pub alpha: C64,
    pub nbar: f64,
    pub q: f64,
    pub cutoff: usize,
}

impl FieldParams {
    /// epsilon = 1/(1 + nbar).
    pub fn epsilon(&self) -> f64 {
        1.0 / (1.0 + self.nbar)
    }

    /// gamma = ln(1 + 1/nbar), defined only for nbar > 0.
    pub fn gamma(&self) -> Option<f64> {
        (self.nbar > 0.0).then(|| (1.0 + 1.0 / self.nbar).ln())
    }

    /// Scaled amplitude alpha/(1 + nbar) appearing in the photon-added expansion.
    pub fn alpha_tilde(&self) -> C64 {
        self.alpha / (1.0 + self.nbar)
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    fn validate(&self) -> Result<()> {
        if !self.alpha.re.is_finite() || !self.alpha.im.is_finite() || !self.nbar.is_finite() {
            return Err(Error::NonFinite { context: "field parameters" });
        }
        if self.nbar < 0.0 {
            return Err(Error::DomainError(format!("nbar must be nonnegative, got {}", self.nbar)));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::DomainError(format!("q must lie in [0, 1], got {}", self.q)));
        }
        if self.cutoff < 2 {
            return Err(Error::DomainError(format!("cutoff must be at least 2, got {}", self.cutoff)));
        }
        Ok(())
    }
}

/// Constructor family of a field state.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Number,
    Coherent,
    Thermal,
    Dts,
    Mtcs,
    Pacs { order: usize },
    PhotonAdded(Box<FieldKind>),
}

/// A field density matrix plus its construction metadata.
///
/// `tail_mass` is the analytically estimated probability weight above the
/// cutoff; constructors refuse states whose tail exceeds [`TAIL_TOL`].
#[derive(Debug, Clone)]
pub struct FieldState {
    pub rho: CMat,
    pub params: FieldParams,
    pub kind: FieldKind,
    pub tail_mass: f64,
}

/// Construction route for the displaced thermal state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtsMethod {
    /// Conjugate the thermal state by the displacement operator.
    Unitary,
    /// Geometric mixture of displaced number states.
    DisplacedNumber,
    /// Mixture of all orders of photon-added coherent states of the scaled amplitude.
    PacsMixture,
}

/// Raw coherent amplitudes exp(-|a|^2/2) a^n / sqrt(n!), not renormalized.
fn coherent_amplitudes(alpha: C64, cutoff: usize) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); cutoff];
    c[0] = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 1..cutoff {
        c[n] = c[n - 1] * alpha / (n as f64).sqrt();
    }
    c
}

/// Poisson tail mass above the cutoff for mean x.
fn poisson_tail(x: f64, cutoff: usize) -> f64 {
    let mut p = (-x).exp();
    let mut cum = 0.0;
    for n in 0..cutoff {
        cum += p;
        p *= x / (n + 1) as f64;
    }
    (1.0 - cum).max(0.0)
}

fn poisson_required(x: f64) -> usize {
    let mut p = (-x).exp();
    let mut cum = 0.0;
    for n in 0..1_000_000usize {
        cum += p;
        if 1.0 - cum <= TAIL_TOL {
            return (n + 1).max(2);
        }
        p *= x / (n + 1) as f64;
    }
    1_000_000
}

/// Displacement support rule: |alpha|^2 must stay under a third of the cutoff.
fn displacement_cutoff_check(alpha_sq: f64, cutoff: usize) -> Result<()> {
    if alpha_sq > cutoff as f64 / 3.0 {
        let required = (3.0 * alpha_sq).ceil() as usize;
        return Err(Error::CutoffTooSmall { cutoff, required: required.max(poisson_required(alpha_sq)) });
    }
    Ok(())
}

fn outer_product(v: &[C64]) -> CMat {
    let n = v.len();
    CMat::from_shape_fn((n, n), |(r, c)| v[r] * v[c].conj())
}

fn trace_real(m: &CMat) -> f64 {
    m.diag().iter().map(|z| z.re).sum()
}

fn renormalize(m: &mut CMat) {
    let tr = trace_real(m);
    m.mapv_inplace(|z| z / tr);
}

/// Number state |n><n|.
pub fn number_state(n: usize, cutoff: usize) -> Result<FieldState> {
    let params = FieldParams { alpha: C64::new(0.0, 0.0), nbar: 0.0, q: 1.0, cutoff };
    params.validate()?;
    if n >= cutoff {
        return Err(Error::CutoffTooSmall { cutoff, required: n + 2 });
    }
    let mut rho = CMat::zeros((cutoff, cutoff));
    rho[[n, n]] = C64::new(1.0, 0.0);
    Ok(FieldState { rho, params, kind: FieldKind::Number, tail_mass: 0.0 })
}

/// Coherent state |alpha><alpha|, renormalized over the truncated basis.
pub fn coherent_state(alpha: C64, cutoff: usize) -> Result<FieldState> {
    let params = FieldParams { alpha, nbar: 0.0, q: 1.0, cutoff };
    params.validate()?;
    let x = alpha.norm_sqr();
    displacement_cutoff_check(x, cutoff)?;
    let tail = poisson_tail(x, cutoff);
    if tail > TAIL_TOL {
        return Err(Error::CutoffTooSmall { cutoff, required: poisson_required(x) });
    }
    let mut c = coherent_amplitudes(alpha, cutoff);
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut c {
        *z /= norm;
    }
    Ok(FieldState { rho: outer_product(&c), params, kind: FieldKind::Coherent, tail_mass: tail })
}

/// Thermal state: geometric mixture of number states with mean photon number nbar.
pub fn thermal_state(nbar: f64, cutoff: usize) -> Result<FieldState> {
    let params = FieldParams { alpha: C64::new(0.0, 0.0), nbar, q: 0.0, cutoff };
    params.validate()?;
    let mut rho = CMat::zeros((cutoff, cutoff));
    if nbar == 0.0 {
        rho[[0, 0]] = C64::new(1.0, 0.0);
        return Ok(FieldState { rho, params, kind: FieldKind::Thermal, tail_mass: 0.0 });
    }
    let ratio = nbar / (1.0 + nbar);
    let tail = ratio.powi(cutoff as i32);
    if tail > TAIL_TOL {
        let required = (TAIL_TOL.ln() / ratio.ln()).ceil() as usize;
        return Err(Error::CutoffTooSmall { cutoff, required: required.max(cutoff + 1) });
    }
    let mut w = 1.0 / (1.0 + nbar);
    let mut sum = 0.0;
    for n in 0..cutoff {
        rho[[n, n]] = C64::new(w, 0.0);
        sum += w;
        w *= ratio;
    }
    rho.mapv_inplace(|z| z / sum);
    Ok(FieldState { rho, params, kind: FieldKind::Thermal, tail_mass: tail })
}

/// Displacement operator D(alpha) from its closed-form Fock matrix elements,
/// <m|D|n> = sqrt(n!/m!) alpha^(m-n) e^(-|a|^2/2) L_n^(m-n)(|a|^2) for m >= n.
///
/// Each diagonal is walked with the in-degree Laguerre recurrence and a fused
/// amplitude product, so no factorial is ever formed explicitly.
pub fn displacement_operator(alpha: C64, cutoff: usize) -> Result<CMat> {
    if cutoff < 2 {
        return Err(Error::DomainError(format!("cutoff must be at least 2, got {cutoff}")));
    }
    let x = alpha.norm_sqr();
    displacement_cutoff_check(x, cutoff)?;
    let mut d = CMat::zeros((cutoff, cutoff));
    let envelope = C64::new((-x / 2.0).exp(), 0.0);

    // Lower-left triangle including the main diagonal: rows m = n + off.
    let mut base = envelope;
    for off in 0..cutoff {
        if off > 0 {
            base *= alpha / (off as f64).sqrt();
        }
        let k = off as f64;
        let mut amp = base;
        let mut lag_prev = 0.0;
        let mut lag = 1.0;
        for n in 0..cutoff - off {
            if n > 0 {
                let nf = n as f64;
                amp *= (nf / (nf + k)).sqrt();
                let next = ((2.0 * (nf - 1.0) + 1.0 + k - x) * lag - (nf - 1.0 + k) * lag_prev) / nf;
                lag_prev = lag;
                lag = next;
            }
            d[[n + off, n]] = amp * lag;
        }
    }

    // Upper-right triangle: columns n = m + off, using D(alpha)^T = D(alpha) with
    // alpha -> -conj(alpha) in the role of the raising amplitude.
    let mut base = envelope;
    for off in 1..cutoff {
        base *= -alpha.conj() / (off as f64).sqrt();
        let k = off as f64;
        let mut amp = base;
        let mut lag_prev = 0.0;
        let mut lag = 1.0;
        for m in 0..cutoff - off {
            if m > 0 {
                let mf = m as f64;
                amp *= (mf / (mf + k)).sqrt();
                let next = ((2.0 * (mf - 1.0) + 1.0 + k - x) * lag - (mf - 1.0 + k) * lag_prev) / mf;
                lag_prev = lag;
                lag = next;
            }
            d[[m, m + off]] = amp * lag;
        }
    }
    Ok(d)
}

/// Tail mass of the displaced thermal photon distribution above the cutoff, from
/// the closed-form diagonal epsilon e^(-epsilon x) r^n L_n(-x/(nbar(1+nbar))).
fn dts_tail(alpha_sq: f64, nbar: f64, cutoff: usize) -> f64 {
    if nbar == 0.0 {
        return poisson_tail(alpha_sq, cutoff);
    }
    let eps = 1.0 / (1.0 + nbar);
    let r = nbar / (1.0 + nbar);
    let y = alpha_sq / (nbar * (1.0 + nbar));
    let pref = eps * (-eps * alpha_sq).exp();
    let mut cum = 0.0;
    let mut rn = 1.0;
    let mut lag_prev = 0.0;
    let mut lag = 1.0;
    for n in 0..cutoff {
        if n > 0 {
            let nf = (n - 1) as f64;
            let next = ((2.0 * nf + 1.0 + y) * lag - nf * lag_prev) / (nf + 1.0);
            lag_prev = lag;
            lag = next;
            rn *= r;
        }
        cum += pref * rn * lag;
    }
    (1.0 - cum).max(0.0)
}

fn dts_required(alpha_sq: f64, nbar: f64, cutoff: usize) -> usize {
    let mut n = cutoff;
    while n < 100_000 {
        n += (n / 4).max(8);
        if dts_tail(alpha_sq, nbar, n) <= TAIL_TOL {
            return n;
        }
    }
    n
}

/// Displaced thermal state by any of its three equivalent constructions.
pub fn displaced_thermal(alpha: C64, nbar: f64, cutoff: usize, method: DtsMethod) -> Result<FieldState> {
    let params = FieldParams { alpha, nbar, q: 1.0, cutoff };
    params.validate()?;
    if nbar == 0.0 {
        let coherent = coherent_state(alpha, cutoff)?;
        return Ok(FieldState { kind: FieldKind::Dts, ..coherent });
    }
    let x = alpha.norm_sqr();
    displacement_cutoff_check(x, cutoff)?;
    let tail = dts_tail(x, nbar, cutoff);
    if tail > TAIL_TOL {
        return Err(Error::CutoffTooSmall { cutoff, required: dts_required(x, nbar, cutoff) });
    }

    let mut rho = match method {
        DtsMethod::Unitary => {
            let d = displacement_operator(alpha, cutoff)?;
            let thermal = thermal_state(nbar, cutoff)?;
            let mut scaled = d.clone();
            for (c, mut col) in scaled.columns_mut().into_iter().enumerate() {
                let w = thermal.rho[[c, c]];
                col.mapv_inplace(|z| z * w);
            }
            let dh = d.t().map(|z| z.conj());
            scaled.dot(&dh)
        }
        DtsMethod::DisplacedNumber => {
            let d = displacement_operator(alpha, cutoff)?;
            let ratio = nbar / (1.0 + nbar);
            let mut rho = CMat::zeros((cutoff, cutoff));
            let mut w = 1.0 / (1.0 + nbar);
            let mut cum = 0.0;
            let mut k = 0;
            while cum < 1.0 - SERIES_TOL && k < cutoff {
                let col = d.column(k);
                for r in 0..cutoff {
                    let vr = col[r] * w;
                    for c in 0..cutoff {
                        rho[[r, c]] += vr * col[c].conj();
                    }
                }
                cum += w;
                w *= ratio;
                k += 1;
            }
            rho
        }
        DtsMethod::PacsMixture => {
            let at = alpha / (1.0 + nbar);
            let yt = at.norm_sqr();
            let eps = 1.0 / (1.0 + nbar);
            let ratio = nbar / (1.0 + nbar);
            let pref = eps * (-nbar * yt).exp();
            let mut rho = CMat::zeros((cutoff, cutoff));
            let mut cum = 0.0;
            let mut rn = 1.0;
            let mut lag_prev = 0.0;
            let mut lag = 1.0;
            let mut n = 0;
            while cum < 1.0 - SERIES_TOL {
                if n >= SERIES_CAP {
                    return Err(Error::MethodDiverged { cap: SERIES_CAP });
                }
                if n > 0 {
                    let nf = (n - 1) as f64;
                    let next = ((2.0 * nf + 1.0 + yt) * lag - nf * lag_prev) / (nf + 1.0);
                    lag_prev = lag;
                    lag = next;
                    rn *= ratio;
                }
                let w = pref * rn * lag;
                let v = pacs_amplitudes(at, n, cutoff);
                for r in 0..cutoff {
                    let vr = v[r] * w;
                    if vr.norm_sqr() == 0.0 {
                        continue;
                    }
                    for c in 0..cutoff {
                        rho[[r, c]] += vr * v[c].conj();
                    }
                }
                cum += w;
                n += 1;
            }
            rho
        }
    };
    renormalize(&mut rho);
    Ok(FieldState { rho, params, kind: FieldKind::Dts, tail_mass: tail })
}

/// Mixed thermal-coherent state q |alpha><alpha| + (1-q) rho_thermal.
pub fn mtcs(alpha: C64, nbar: f64, q: f64, cutoff: usize) -> Result<FieldState> {
    let params = FieldParams { alpha, nbar, q, cutoff };
    params.validate()?;
    let coherent = coherent_state(alpha, cutoff)?;
    let thermal = thermal_state(nbar, cutoff)?;
    let rho = coherent.rho.mapv(|z| z * q) + thermal.rho.mapv(|z| z * (1.0 - q));
    let tail = q * coherent.tail_mass + (1.0 - q) * thermal.tail_mass;
    Ok(FieldState { rho, params, kind: FieldKind::Mtcs, tail_mass: tail })
}

/// Normalized photon-added coherent-state amplitudes, scaled so no explicit
/// factorial appears: entry n+m carries c_n sqrt((n+m)!/n!) / sqrt(m!).
fn pacs_amplitudes(alpha: C64, m: usize, cutoff: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); cutoff];
    if m >= cutoff {
        return v;
    }
    let mut u = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    v[m] = u;
    for n in 1..cutoff - m {
        u *= alpha * ((n + m) as f64).sqrt() / n as f64;
        v[n + m] = u;
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Photon-added coherent state a^dag^m |alpha>, normalized via m! L_m(-|alpha|^2).
pub fn pacs(alpha: C64, m: usize, cutoff: usize) -> Result<FieldState> {
    let params = FieldParams { alpha, nbar: 0.0, q: 1.0, cutoff };
    params.validate()?;
    let x = alpha.norm_sqr();
    displacement_cutoff_check(x, cutoff)?;
    if m >= cutoff {
        return Err(Error::CutoffTooSmall { cutoff, required: m + 2 });
    }
    // Scaled weights u_n = |c_n|^2 (n+m)!/(n! m!) sum to L_m(-x); the remainder
    // beyond the basis is the exact tail mass.
    let total = laguerre(m, 0, -x)?;
    let mut u = (-x).exp();
    let mut partial = 0.0;
    for n in 0..cutoff - m {
        if n > 0 {
            u *= x * (n + m) as f64 / ((n * n) as f64);
        }
        partial += u;
    }
    let tail = (1.0 - partial / total).max(0.0);
    if tail > TAIL_TOL {
        let mut required = cutoff;
        let mut p = partial;
        let mut n = cutoff - m;
        while 1.0 - p / total > TAIL_TOL && required < 100_000 {
            u *= x * (n + m) as f64 / ((n * n) as f64);
            p += u;
            n += 1;
            required = n + m + 1;
        }
        return Err(Error::CutoffTooSmall { cutoff, required });
    }
    let v = pacs_amplitudes(alpha, m, cutoff);
    Ok(FieldState { rho: outer_product(&v), params, kind: FieldKind::Pacs { order: m }, tail_mass: tail })
}

/// Mean photon number Tr(n rho).
pub fn mean_photon(state: &FieldState) -> f64 {
    state.rho.diag().iter().enumerate().map(|(n, z)| n as f64 * z.re).sum()
}

/// Photon addition rho -> a^dag rho a / Tr, which annihilates the vacuum component.
pub fn photon_add(state: &FieldState) -> Result<FieldState> {
    let n = state.params.cutoff;
    let top = state.rho[[n - 1, n - 1]].re;
    let mean = mean_photon(state);
    let shifted_tail = (n as f64) * (top.max(0.0) + state.tail_mass) / (1.0 + mean);
    if shifted_tail > TAIL_TOL {
        return Err(Error::CutoffTooSmall { cutoff: n, required: n + (n / 4).max(16) });
    }
    let mut rho = CMat::zeros((n, n));
    for r in 1..n {
        for c in 1..n {
            rho[[r, c]] = state.rho[[r - 1, c - 1]] * ((r * c) as f64).sqrt();
        }
    }
    renormalize(&mut rho);
    Ok(FieldState {
        rho,
        params: state.params.clone(),
        kind: FieldKind::PhotonAdded(Box::new(state.kind.clone())),
        tail_mass: shifted_tail,
    })
}

/// Mixing weight making the mixed state's coherent overlap match the displaced
/// thermal state's: (1 - e^(-|a|^2/(1+nbar))) / (nbar + 1 - e^(-|a|^2/(1+nbar))).
pub fn equal_overlap_q(alpha: C64, nbar: f64) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let e = (-x / (1.0 + nbar)).exp();
    (1.0 - e) / (nbar + 1.0 - e)
}

/// Overlap <alpha| rho |alpha> against the ideal coherent amplitudes.
pub fn coherent_overlap(state: &FieldState, alpha: C64) -> f64 {
    let c = coherent_amplitudes(alpha, state.params.cutoff);
    let mut acc = C64::new(0.0, 0.0);
    for (r, cr) in c.iter().enumerate() {
        let mut row = C64::new(0.0, 0.0);
        for (col, cc) in c.iter().enumerate() {
            row += state.rho[[r, col]] * cc;
        }
        acc += cr.conj() * row;
    }
    acc.re
}

/// Mixedness 1 - Tr(rho^2), evaluated through the Frobenius norm.
pub fn purity_deficit(state: &FieldState) -> f64 {
    1.0 - state.rho.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// Diagonal photon-number distribution P(n).
pub fn photon_distribution(state: &FieldState) -> Vec<(usize, f64)> {
    state.rho.diag().iter().enumerate().map(|(n, z)| (n, z.re)).collect()
}

/// Indices of strict local maxima of a distribution, ignoring entries at or
/// below `floor` so rounding jitter deep in the tail cannot register as peaks.
pub fn local_maxima(p: &[f64], floor: f64) -> Vec<usize> {
    let mut out = Vec::new();
    for i in 0..p.len() {
        if p[i] <= floor {
            continue;
        }
        let left_ok = i == 0 || p[i] > p[i - 1];
        let right_ok = i + 1 == p.len() || p[i] > p[i + 1];
        if left_ok && right_ok {
            out.push(i);
        }
    }
    out
}

/// Family selector for the closed-form initial-state matrix elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedFormKind {
    Dts,
    Mtcs,
}

/// Closed-form matrix element <n| rho |m> of the displaced thermal or mixed
/// thermal-coherent state, phase-carried through e^(i(n-m) arg alpha).
pub fn closed_form_element(kind: ClosedFormKind, n: usize, m: usize, params: &FieldParams) -> Result<C64> {
    params.validate()?;
    let cutoff = params.cutoff;
    if n >= cutoff || m >= cutoff {
        return Err(Error::DimensionMismatch { expected: cutoff, found: n.max(m) + 1 });
    }
    match kind {
        ClosedFormKind::Mtcs => {
            let c = coherent_amplitudes(params.alpha, n.max(m) + 1);
            let mut val = c[n] * c[m].conj() * params.q;
            if n == m {
                let eps = params.epsilon();
                let r = params.nbar / (1.0 + params.nbar);
                val += C64::new((1.0 - params.q) * eps * r.powi(n as i32), 0.0);
            }
            Ok(val)
        }
        ClosedFormKind::Dts => {
            if params.nbar == 0.0 {
                return Err(Error::DomainError(
                    "displaced thermal closed form needs nbar > 0; use the Poisson limit".into(),
                ));
            }
            let (lo, hi) = (n.min(m), n.max(m));
            let x = params.alpha_sq();
            let eps = params.epsilon();
            let r = params.nbar / (1.0 + params.nbar);
            let y = x / (params.nbar * (1.0 + params.nbar));
            let mut amp = eps.powi((hi - lo + 1) as i32) * r.powi(lo as i32) * (-eps * x).exp();
            let a_abs = x.sqrt();
            for j in (lo + 1)..=hi {
                amp *= a_abs / (j as f64).sqrt();
            }
            let magnitude = amp * laguerre(lo, (hi - lo) as i64, -y)?;
            let phase = C64::from_polar(1.0, (n as f64 - m as f64) * params.alpha.arg());
            Ok(phase * magnitude)
        }
    }
}

/// Projects a state onto a smaller basis and renormalizes.
///
/// Unlike the constructors this performs no tail-mass gate; the dropped weight
/// is added to `tail_mass` instead. Intended for propagator cross-checks that
/// need a small working dimension.
pub fn truncate_field(state: &FieldState, cutoff: usize) -> Result<FieldState> {
    if cutoff < 2 || cutoff > state.params.cutoff {
        return Err(Error::DimensionMismatch { expected: state.params.cutoff, found: cutoff });
    }
    let mut rho = state.rho.slice(ndarray::s![..cutoff, ..cutoff]).to_owned();
    let kept = trace_real(&rho);
    rho.mapv_inplace(|z| z / kept);
    let mut params = state.params.clone();
    params.cutoff = cutoff;
    Ok(FieldState {
        rho,
        params,
        kind: state.kind.clone(),
        tail_mass: state.tail_mass + (1.0 - kept).max(0.0),
    })
}
