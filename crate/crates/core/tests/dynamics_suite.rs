use jcsim_core::dynamics::{build_hamiltonian, evolve_analytic, evolve_numeric, initial_joint_state};
use jcsim_core::linalg::{hermitian_eigenvalues, hermiticity_defect, max_abs};
use jcsim_core::states::{coherent_state, displaced_thermal, number_state, thermal_state, DtsMethod};
use jcsim_core::{Error, JCParams};
use num_complex::Complex64 as C64;

fn resonant() -> JCParams {
    JCParams::default()
}

#[test]
fn hamiltonian_structure() {
    let n = 4;
    let h = build_hamiltonian(&resonant(), n);
    assert_eq!(h.dim(), (2 * n, 2 * n));
    assert_eq!(hermiticity_defect(&h), 0.0);
    // raising side carries +i lambda sqrt(n+1)
    assert_eq!(h[[n + 1, 0]], C64::new(0.0, 1.0));
    assert_eq!(h[[0, n + 1]], C64::new(0.0, -1.0));
    assert_eq!(h[[n + 2, 1]], C64::new(0.0, 2f64.sqrt()));
    // resonance: no diagonal
    for i in 0..2 * n {
        assert_eq!(h[[i, i]], C64::new(0.0, 0.0));
    }
}

#[test]
fn hamiltonian_spectrum_is_rabi_ladder() {
    let n = 4;
    let h = build_hamiltonian(&resonant(), n);
    let vals = hermitian_eigenvalues(&h, 1e-12).unwrap();
    let mut expected = vec![0.0, 0.0];
    for k in 1..n {
        expected.push((k as f64).sqrt());
        expected.push(-(k as f64).sqrt());
    }
    expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (v, e) in vals.iter().zip(expected.iter()) {
        assert!((v - e).abs() <= 1e-12, "{v} vs {e}");
    }
}

#[test]
fn zero_time_is_identity() {
    let field = coherent_state(C64::new(2f64.sqrt(), 0.0), 24).unwrap();
    let joint = initial_joint_state(&field);
    let evolved = evolve_analytic(&field, &resonant(), 0.0).unwrap();
    assert!(max_abs(&(&evolved.rho - &joint.rho)) == 0.0);
}

#[test]
fn initial_joint_state_puts_atom_excited() {
    let field = thermal_state(1.0, 40).unwrap();
    let joint = initial_joint_state(&field);
    assert_eq!(joint.field_dim, 40);
    // excited block equals the field state, ground block vanishes
    for r in 0..40 {
        for c in 0..40 {
            assert_eq!(joint.rho[[r, c]], field.rho[[r, c]]);
            assert_eq!(joint.rho[[40 + r, 40 + c]], C64::new(0.0, 0.0));
        }
    }
}

#[test]
fn vacuum_rabi_oscillation() {
    let field = number_state(0, 8).unwrap();
    for i in 0..=200 {
        let t = 25.0 * i as f64 / 200.0;
        let s = evolve_analytic(&field, &resonant(), t).unwrap();
        let w = jcsim_core::observables::population_inversion(&s);
        assert!((w - (2.0 * t).cos()).abs() <= 1e-12, "t={t}: {w}");
    }
}

#[test]
fn one_photon_rabi_oscillation() {
    let field = number_state(1, 8).unwrap();
    let root2 = 2f64.sqrt();
    for i in 0..=100 {
        let t = 10.0 * i as f64 / 100.0;
        let s = evolve_analytic(&field, &resonant(), t).unwrap();
        let w = jcsim_core::observables::population_inversion(&s);
        assert!((w - (2.0 * root2 * t).cos()).abs() <= 1e-12, "t={t}: {w}");
    }
}

#[test]
fn analytic_matches_numeric_small_field() {
    let field = coherent_state(C64::new(2f64.sqrt(), 0.0), 24).unwrap();
    let joint = initial_joint_state(&field);
    for t in [1.0, 5.0, 10.0, 20.0, 25.0] {
        let a = evolve_analytic(&field, &resonant(), t).unwrap();
        let n = evolve_numeric(&joint, &resonant(), t).unwrap();
        let diff = max_abs(&(&a.rho - &n.rho));
        assert!(diff <= 1e-8, "t={t}: max abs difference {diff}");
    }
}

#[test]
fn analytic_matches_numeric_displaced_thermal() {
    let big = displaced_thermal(C64::new(2.0, 0.0), 0.5, 80, DtsMethod::Unitary).unwrap();
    let field = jcsim_core::states::truncate_field(&big, 40).unwrap();
    let joint = initial_joint_state(&field);
    for t in [5.0, 15.0, 25.0] {
        let a = evolve_analytic(&field, &resonant(), t).unwrap();
        let n = evolve_numeric(&joint, &resonant(), t).unwrap();
        let diff = max_abs(&(&a.rho - &n.rho));
        assert!(diff <= 1e-8, "t={t}: max abs difference {diff}");
    }
}

#[test]
fn evolution_preserves_trace_spectrum_and_purity() {
    let field = displaced_thermal(C64::new(2.0, 0.0), 0.5, 56, DtsMethod::Unitary).unwrap();
    let joint = initial_joint_state(&field);
    let before = hermitian_eigenvalues(&joint.rho, 1e-9).unwrap();
    let purity_before: f64 = joint.rho.iter().map(|z| z.norm_sqr()).sum();
    for t in [3.7, 12.9] {
        let s = evolve_analytic(&field, &resonant(), t).unwrap();
        let trace: f64 = s.rho.diag().iter().map(|z| z.re).sum();
        assert!((trace - 1.0).abs() <= 1e-12);
        assert!(hermiticity_defect(&s.rho) <= 1e-12);
        let after = hermitian_eigenvalues(&s.rho, 1e-9).unwrap();
        for (a, b) in before.iter().zip(after.iter()) {
            assert!((a - b).abs() <= 1e-9, "eigenvalue drift {a} vs {b}");
        }
        let purity_after: f64 = s.rho.iter().map(|z| z.norm_sqr()).sum();
        assert!((purity_before - purity_after).abs() <= 1e-9);
    }
}

#[test]
fn excitation_number_is_conserved() {
    let field = displaced_thermal(C64::new(2.0, 0.0), 0.5, 56, DtsMethod::Unitary).unwrap();
    let excitation = |s: &jcsim_core::JointState| -> f64 {
        let n = s.field_dim;
        let mut total = 0.0;
        for k in 0..n {
            total += (k as f64 + 1.0) * s.rho[[k, k]].re;
            total += k as f64 * s.rho[[n + k, n + k]].re;
        }
        total
    };
    let at0 = excitation(&evolve_analytic(&field, &resonant(), 0.0).unwrap());
    for t in [2.3, 7.7, 19.1] {
        let at_t = excitation(&evolve_analytic(&field, &resonant(), t).unwrap());
        assert!((at0 - at_t).abs() <= 1e-9, "t={t}: {at0} vs {at_t}");
    }
}

#[test]
fn detuned_analytic_is_rejected() {
    let field = number_state(0, 8).unwrap();
    let detuned = JCParams { coupling: 1.0, detuning: 0.3 };
    assert!(matches!(
        evolve_analytic(&field, &detuned, 1.0),
        Err(Error::ResonantOnly { .. })
    ));
}

#[test]
fn coupling_rescales_time() {
    let field = number_state(0, 8).unwrap();
    let double = JCParams { coupling: 2.0, detuning: 0.0 };
    // lambda_t is dimensionless coupling * time, so doubling the coupling at
    // fixed lambda_t changes nothing
    let a = evolve_analytic(&field, &resonant(), 3.0).unwrap();
    let b = evolve_analytic(&field, &double, 3.0).unwrap();
    assert!(max_abs(&(&a.rho - &b.rho)) <= 1e-15);
}

#[test]
fn invalid_parameters_rejected() {
    let bad = JCParams { coupling: 0.0, detuning: 0.0 };
    let field = number_state(0, 8).unwrap();
    assert!(evolve_analytic(&field, &bad, 1.0).is_err());
    let nan = JCParams { coupling: f64::NAN, detuning: 0.0 };
    assert!(evolve_analytic(&field, &nan, 1.0).is_err());
}
