use jcsim_core::linalg::{
    hermitian_eigendecomposition, hermitian_eigenvalues, matrix_exponential, max_abs,
    partial_transpose_atom, CMat,
};
use ndarray::Array2;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(dim: usize, seed: u64) -> CMat {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = CMat::zeros((dim, dim));
    for r in 0..dim {
        m[[r, r]] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
        for c in (r + 1)..dim {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[[r, c]] = z;
            m[[c, r]] = z.conj();
        }
    }
    m
}

fn reconstruct(eigenvalues: &[f64], vectors: &CMat) -> CMat {
    let mut scaled = vectors.clone();
    for (j, lam) in eigenvalues.iter().enumerate() {
        scaled.column_mut(j).mapv_inplace(|z| z * lam);
    }
    let vh = vectors.t().map(|z| z.conj());
    scaled.dot(&vh)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn eigendecomposition_reconstructs(dim in 2usize..=64, seed in any::<u64>()) {
        let m = random_hermitian(dim, seed);
        let scale = max_abs(&m).max(1.0);
        let s = hermitian_eigendecomposition(&m, 1e-10).unwrap();
        let residual = max_abs(&(&m - &reconstruct(&s.eigenvalues, &s.eigenvectors)));
        prop_assert!(residual <= 1e-10 * scale, "residual {residual}");
        let vh = s.eigenvectors.t().map(|z| z.conj());
        let gram = vh.dot(&s.eigenvectors);
        let ortho = max_abs(&(&gram - &Array2::<C64>::eye(dim)));
        prop_assert!(ortho <= 1e-10, "orthonormality defect {ortho}");
        for w in s.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn eigenvalues_only_path_matches(dim in 2usize..=32, seed in any::<u64>()) {
        let m = random_hermitian(dim, seed);
        let full = hermitian_eigendecomposition(&m, 1e-10).unwrap();
        let vals = hermitian_eigenvalues(&m, 1e-10).unwrap();
        for (a, b) in full.eigenvalues.iter().zip(vals.iter()) {
            prop_assert!((a - b).abs() <= 1e-11);
        }
    }

    #[test]
    fn propagator_inverse_pairs(dim in 2usize..=24, seed in any::<u64>(), t in 0.0f64..25.0) {
        let h = random_hermitian(dim, seed);
        let forward = matrix_exponential(&h.mapv(|z| z * C64::new(0.0, -t))).unwrap();
        let backward = matrix_exponential(&h.mapv(|z| z * C64::new(0.0, t))).unwrap();
        let defect = max_abs(&(&forward.dot(&backward) - &Array2::<C64>::eye(dim)));
        prop_assert!(defect <= 1e-9, "inverse-pair defect {defect}");
        let fh = forward.t().map(|z| z.conj());
        let unitarity = max_abs(&(&fh.dot(&forward) - &Array2::<C64>::eye(dim)));
        prop_assert!(unitarity <= 1e-9, "unitarity defect {unitarity}");
    }

    #[test]
    fn partial_transpose_preserves_trace_and_hermiticity(dim in 2usize..=16, seed in any::<u64>()) {
        let j = {
            let raw = random_hermitian(2 * dim, seed);
            // shift to a positive matrix and normalize so it is density-like
            let vals = hermitian_eigenvalues(&raw, 1e-10).unwrap();
            let shift = vals[0].min(0.0).abs() + 0.1;
            let mut m = raw + Array2::<C64>::eye(2 * dim).mapv(|z| z * shift);
            let tr: f64 = m.diag().iter().map(|z| z.re).sum();
            m.mapv_inplace(|z| z / tr);
            m
        };
        let pt = partial_transpose_atom(&j, dim).unwrap();
        let tr_in: f64 = j.diag().iter().map(|z| z.re).sum();
        let tr_out: f64 = pt.diag().iter().map(|z| z.re).sum();
        prop_assert!((tr_in - tr_out).abs() == 0.0);
        prop_assert!(jcsim_core::linalg::hermiticity_defect(&pt) == 0.0);
    }
}

#[test]
fn product_state_stays_positive_under_partial_transpose() {
    // rho_atom (x) rho_field with atom-major ordering
    let n = 4;
    let atom = [[0.7, 0.21], [0.21, 0.3]];
    let mut field = CMat::zeros((n, n));
    field[[0, 0]] = C64::new(0.4, 0.0);
    field[[1, 1]] = C64::new(0.3, 0.0);
    field[[2, 2]] = C64::new(0.2, 0.0);
    field[[3, 3]] = C64::new(0.1, 0.0);
    field[[0, 2]] = C64::new(0.05, 0.02);
    field[[2, 0]] = C64::new(0.05, -0.02);
    let mut j = CMat::zeros((2 * n, 2 * n));
    for a in 0..2 {
        for b in 0..2 {
            for r in 0..n {
                for c in 0..n {
                    j[[a * n + r, b * n + c]] = C64::new(atom[a][b], 0.0) * field[[r, c]];
                }
            }
        }
    }
    let pt = partial_transpose_atom(&j, n).unwrap();
    let vals = hermitian_eigenvalues(&pt, 1e-12).unwrap();
    assert!(vals[0] >= -1e-12, "min eigenvalue {}", vals[0]);
}

#[test]
fn bell_pair_partial_transpose_eigenvalue() {
    // (|e,0> - |g,1>)/sqrt(2) at field dimension 2
    let n = 2;
    let mut psi = vec![C64::new(0.0, 0.0); 2 * n];
    psi[0] = C64::new(1.0 / 2.0f64.sqrt(), 0.0);
    psi[n + 1] = C64::new(-1.0 / 2.0f64.sqrt(), 0.0);
    let mut j = CMat::zeros((2 * n, 2 * n));
    for r in 0..2 * n {
        for c in 0..2 * n {
            j[[r, c]] = psi[r] * psi[c].conj();
        }
    }
    let pt = partial_transpose_atom(&j, n).unwrap();
    let vals = hermitian_eigenvalues(&pt, 1e-12).unwrap();
    assert!((vals[0] + 0.5).abs() <= 1e-12, "min eigenvalue {}", vals[0]);
}
