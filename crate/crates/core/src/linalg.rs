use crate::error::{Error, Result};
use ndarray::Array2;
use num_complex::Complex64 as C64;

/// Dense square complex matrix, the carrier for all operators and density matrices.
pub type CMat = Array2<C64>;

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues with matching
/// eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

/// Max entrywise deviation of a square matrix from its adjoint.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            let d = (m[[r, c]] - m[[c, r]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Max entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn ensure_square(m: &CMat) -> Result<usize> {
    let (r, c) = m.dim();
    if r != c || r == 0 {
        return Err(Error::DimensionMismatch { expected: r.max(1), found: c });
    }
    Ok(r)
}

fn ensure_finite(m: &CMat, context: &'static str) -> Result<()> {
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { context });
    }
    Ok(())
}

/// Dense Hermitian eigensolver (LAPACK zheevd), optionally computing eigenvectors.
///
/// The row-major buffer handed to LAPACK is read column-major, i.e. as the
/// conjugate of the input; passing uplo = 'U' therefore consumes our lower
/// triangle, and the eigenvectors come back as those of the conjugate matrix,
/// fixed up below with one conjugate transpose.
fn zheevd(m: &CMat, with_vectors: bool) -> Result<(Vec<f64>, Option<CMat>)> {
    let n = m.nrows();
    let ni = n as i32;
    let jobz = if with_vectors { b'V' } else { b'N' };
    let mut a: Vec<C64> = m.iter().copied().collect();
    let mut w = vec![0.0f64; n];
    let mut info = 0i32;

    let mut work_q = [C64::new(0.0, 0.0)];
    let mut rwork_q = [0.0f64];
    let mut iwork_q = [0i32];
    unsafe {
        lapack::zheevd(
            jobz, b'U', ni, &mut a, ni, &mut w, &mut work_q, -1, &mut rwork_q, -1, &mut iwork_q,
            -1, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::NoConvergence { info });
    }

    let lwork = work_q[0].re as i32;
    let lrwork = rwork_q[0] as i32;
    let liwork = iwork_q[0];
    let mut work = vec![C64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0f64; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack::zheevd(
            jobz, b'U', ni, &mut a, ni, &mut w, &mut work, lwork, &mut rwork, lrwork, &mut iwork,
            liwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::NoConvergence { info });
    }

    let vectors = if with_vectors {
        let vt = Array2::from_shape_vec((n, n), a).expect("zheevd output shape");
        Some(vt.t().map(|z| z.conj()))
    } else {
        None
    };
    Ok((w, vectors))
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigendecomposition(m: &CMat, hermiticity_tol: f64) -> Result<Spectrum> {
    ensure_square(m)?;
    ensure_finite(m, "eigendecomposition input")?;
    let defect = hermiticity_defect(m);
    if defect > hermiticity_tol {
        return Err(Error::NotHermitian { defect, tol: hermiticity_tol });
    }
    let (eigenvalues, vectors) = zheevd(m, true)?;
    Ok(Spectrum { eigenvalues, eigenvectors: vectors.expect("vectors requested") })
}

/// Eigenvalues only (ascending); noticeably faster than the full decomposition.
pub fn hermitian_eigenvalues(m: &CMat, hermiticity_tol: f64) -> Result<Vec<f64>> {
    ensure_square(m)?;
    ensure_finite(m, "eigenvalue input")?;
    let defect = hermiticity_defect(m);
    if defect > hermiticity_tol {
        return Err(Error::NotHermitian { defect, tol: hermiticity_tol });
    }
    let (eigenvalues, _) = zheevd(m, false)?;
    Ok(eigenvalues)
}

/// Matrix exponential exp(M).
///
/// When iM is Hermitian (the propagator case M = -iHt) the result is assembled
/// from the spectrum of iM, which keeps it unitary to machine precision;
/// otherwise a scaled Taylor expansion with repeated squaring is used.
pub fn matrix_exponential(m: &CMat) -> Result<CMat> {
    let n = ensure_square(m)?;
    ensure_finite(m, "matrix exponential input")?;
    let k = m.mapv(|z| C64::new(0.0, 1.0) * z);
    let scale = max_abs(&k).max(1.0);
    let result = if hermiticity_defect(&k) <= 1e-10 * scale {
        let spectrum = hermitian_eigendecomposition(&k, 1e-10 * scale)?;
        let v = spectrum.eigenvectors;
        let mut phased = v.clone();
        for (j, lam) in spectrum.eigenvalues.iter().enumerate() {
            let phase = C64::from_polar(1.0, -lam);
            phased.column_mut(j).mapv_inplace(|z| z * phase);
        }
        let vh = v.t().map(|z| z.conj());
        phased.dot(&vh)
    } else {
        expm_taylor(m, n)
    };
    ensure_finite(&result, "matrix exponential output")?;
    Ok(result)
}

/// Scaling-and-squaring Taylor expansion for general (non-anti-Hermitian) input.
fn expm_taylor(m: &CMat, n: usize) -> CMat {
    let norm1 = (0..n)
        .map(|c| (0..n).map(|r| m[[r, c]].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as u32 } else { 0 };
    let a = m.mapv(|z| z / 2.0f64.powi(squarings as i32));
    let mut sum = CMat::eye(n);
    let mut term = CMat::eye(n);
    for k in 1..=64u32 {
        term = term.dot(&a).mapv(|z| z / k as f64);
        sum = sum + &term;
        if max_abs(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

/// Transposes only the atom indices of an atom (x) field density matrix.
///
/// Basis ordering is atom-major: row index a*N + n for atom level a in {e=0, g=1}
/// and Fock index n. The operation is a pure entry permutation, so trace and
/// Hermiticity survive exactly.
pub fn partial_transpose_atom(j: &CMat, field_dim: usize) -> Result<CMat> {
    let dim = ensure_square(j)?;
    if dim != 2 * field_dim {
        return Err(Error::DimensionMismatch { expected: 2 * field_dim, found: dim });
    }
    let n = field_dim;
    let mut out = j.clone();
    for r in 0..n {
        for c in 0..n {
            out[[r, n + c]] = j[[n + r, c]];
            out[[n + r, c]] = j[[r, n + c]];
        }
    }
    Ok(out)
}
