use jcsim_core::linalg::{hermiticity_defect, matrix_exponential, max_abs, CMat};
use jcsim_core::states::*;
use jcsim_core::Error;
use ndarray::s;
use num_complex::Complex64 as C64;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn alpha10() -> C64 {
    re(10f64.sqrt())
}

fn trace(m: &CMat) -> f64 {
    m.diag().iter().map(|z| z.re).sum()
}

fn assert_density(state: &FieldState) {
    assert!((trace(&state.rho) - 1.0).abs() <= 1e-12, "trace {}", trace(&state.rho));
    assert!(hermiticity_defect(&state.rho) <= 1e-14);
    assert!(state.tail_mass <= TAIL_TOL * 1.000001);
}

#[test]
fn vacuum_limits() {
    let c = coherent_state(re(0.0), 40).unwrap();
    let t = thermal_state(0.0, 40).unwrap();
    let n = number_state(0, 40).unwrap();
    assert_eq!(c.rho[[0, 0]], re(1.0));
    assert!(max_abs(&(&c.rho - &t.rho)) == 0.0);
    assert!(max_abs(&(&c.rho - &n.rho)) == 0.0);
}

#[test]
fn coherent_statistics() {
    let s = coherent_state(alpha10(), 150).unwrap();
    assert_density(&s);
    assert!((mean_photon(&s) - 10.0).abs() <= 1e-8);
    let p = photon_distribution(&s);
    assert!((p[10].1 - 0.1251100357211332).abs() <= 1e-10);
    assert!(purity_deficit(&s).abs() <= 1e-12);
}

#[test]
fn coherent_cutoff_gate() {
    match coherent_state(alpha10(), 20) {
        Err(Error::CutoffTooSmall { cutoff: 20, required }) => assert!(required > 20),
        other => panic!("expected CutoffTooSmall, got {other:?}"),
    }
}

#[test]
fn thermal_statistics() {
    let s = thermal_state(1.0, 60).unwrap();
    assert_density(&s);
    for n in 0..6 {
        assert!((s.rho[[n, n]].re - 0.5f64.powi(n as i32 + 1)).abs() <= 1e-12);
    }
    assert!((mean_photon(&s) - 1.0).abs() <= 1e-10);
    assert!((purity_deficit(&s) - 2.0 / 3.0).abs() <= 1e-12);
}

#[test]
fn thermal_cutoff_gate() {
    match thermal_state(1.0, 8) {
        Err(Error::CutoffTooSmall { cutoff: 8, required }) => {
            assert!((33..=35).contains(&required), "required {required}")
        }
        other => panic!("expected CutoffTooSmall, got {other:?}"),
    }
}

#[test]
fn number_state_bounds() {
    let s = number_state(5, 10).unwrap();
    assert_eq!(s.rho[[5, 5]], re(1.0));
    assert!(matches!(number_state(12, 10), Err(Error::CutoffTooSmall { .. })));
}

#[test]
fn displacement_identity_at_zero() {
    let d = displacement_operator(re(0.0), 30).unwrap();
    let eye = CMat::eye(30);
    assert!(max_abs(&(&d - &eye)) == 0.0);
}

#[test]
fn displacement_first_column_is_coherent() {
    let alpha = C64::from_polar(10f64.sqrt(), std::f64::consts::FRAC_PI_3);
    let d = displacement_operator(alpha, 150).unwrap();
    let c = coherent_state(alpha, 150).unwrap();
    // d column 0 applied to vacuum reproduces the coherent projector
    let col = d.column(0);
    for m in 0..150 {
        for n in 0..150 {
            let outer = col[m] * col[n].conj();
            assert!((outer - c.rho[[m, n]]).norm() <= 1e-12);
        }
    }
}

#[test]
fn displacement_unitary_on_supported_block() {
    let d = displacement_operator(alpha10(), 150).unwrap();
    let dh = d.t().map(|z| z.conj());
    let prod = d.dot(&dh);
    let block = prod.slice(s![..37, ..37]);
    let defect = block
        .indexed_iter()
        .map(|((r, c), z)| (z - if r == c { re(1.0) } else { re(0.0) }).norm())
        .fold(0.0f64, f64::max);
    assert!(defect <= 1e-8, "unitarity defect {defect}");
}

#[test]
fn displacement_matches_generator_exponential() {
    let alpha = alpha10();
    let cutoff = 150;
    let mut gen = CMat::zeros((cutoff, cutoff));
    for n in 0..cutoff - 1 {
        let root = ((n + 1) as f64).sqrt();
        gen[[n + 1, n]] = alpha * root;
        gen[[n, n + 1]] = -alpha.conj() * root;
    }
    let e = matrix_exponential(&gen).unwrap();
    let d = displacement_operator(alpha, cutoff).unwrap();
    let diff = &e.slice(s![..50, ..50]) - &d.slice(s![..50, ..50]);
    let defect = diff.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    assert!(defect <= 1e-8, "closed form vs exponential {defect}");
}

#[test]
fn dts_three_routes_agree() {
    let u = displaced_thermal(alpha10(), 1.0, 150, DtsMethod::Unitary).unwrap();
    let d = displaced_thermal(alpha10(), 1.0, 150, DtsMethod::DisplacedNumber).unwrap();
    let p = displaced_thermal(alpha10(), 1.0, 150, DtsMethod::PacsMixture).unwrap();
    assert_density(&u);
    assert_density(&d);
    assert_density(&p);
    assert!(max_abs(&(&u.rho - &d.rho)) <= 1e-8);
    assert!(max_abs(&(&u.rho - &p.rho)) <= 1e-8);
    assert!(max_abs(&(&d.rho - &p.rho)) <= 1e-8);
}

#[test]
fn dts_limits() {
    let cold = displaced_thermal(alpha10(), 0.0, 150, DtsMethod::Unitary).unwrap();
    let coh = coherent_state(alpha10(), 150).unwrap();
    assert!(max_abs(&(&cold.rho - &coh.rho)) == 0.0);
    assert_eq!(cold.kind, FieldKind::Dts);

    let still = displaced_thermal(re(0.0), 1.0, 60, DtsMethod::Unitary).unwrap();
    let th = thermal_state(1.0, 60).unwrap();
    assert!(max_abs(&(&still.rho - &th.rho)) <= 1e-12);
}

#[test]
fn dts_moments_and_mixedness() {
    let s = displaced_thermal(alpha10(), 1.0, 150, DtsMethod::Unitary).unwrap();
    assert!((mean_photon(&s) - 11.0).abs() <= 1e-8);
    assert!((purity_deficit(&s) - 2.0 / 3.0).abs() <= 1e-9);
    // mixedness depends only on nbar, not on the displacement
    for a in [re(0.0), re(1.0), alpha10()] {
        let t = displaced_thermal(a, 1.0, 150, DtsMethod::Unitary).unwrap();
        assert!((purity_deficit(&t) - 2.0 / 3.0).abs() <= 1e-9);
    }
    let warm = displaced_thermal(re(1.0), 0.1, 60, DtsMethod::Unitary).unwrap();
    assert!((purity_deficit(&warm) - 1.0 / 6.0).abs() <= 1e-9);
}

#[test]
fn dts_closed_form_agreement() {
    for theta in [0.0, std::f64::consts::FRAC_PI_3] {
        let alpha = C64::from_polar(10f64.sqrt(), theta);
        let s = displaced_thermal(alpha, 1.0, 150, DtsMethod::Unitary).unwrap();
        let params = FieldParams { alpha, nbar: 1.0, q: 1.0, cutoff: 150 };
        for n in (0..150).step_by(13) {
            for m in (0..150).step_by(11) {
                let cf = closed_form_element(ClosedFormKind::Dts, n, m, &params).unwrap();
                assert!(
                    (s.rho[[n, m]] - cf).norm() <= 1e-10,
                    "element ({n},{m}): {} vs {cf}",
                    s.rho[[n, m]]
                );
            }
        }
    }
}

#[test]
fn dts_closed_form_hermitian_pairs() {
    let params = FieldParams {
        alpha: C64::from_polar(2.0, 0.7),
        nbar: 0.5,
        q: 1.0,
        cutoff: 60,
    };
    for n in 0..20 {
        for m in 0..20 {
            let a = closed_form_element(ClosedFormKind::Dts, n, m, &params).unwrap();
            let b = closed_form_element(ClosedFormKind::Dts, m, n, &params).unwrap();
            assert!((a - b.conj()).norm() <= 1e-15);
        }
    }
}

#[test]
fn dts_closed_form_domain_errors() {
    let params = FieldParams { alpha: re(1.0), nbar: 0.0, q: 1.0, cutoff: 40 };
    assert!(matches!(
        closed_form_element(ClosedFormKind::Dts, 0, 0, &params),
        Err(Error::DomainError(_))
    ));
    let ok = FieldParams { alpha: re(1.0), nbar: 1.0, q: 1.0, cutoff: 40 };
    assert!(matches!(
        closed_form_element(ClosedFormKind::Dts, 40, 0, &ok),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn pacs_mixture_route_small_nbar() {
    let p = displaced_thermal(alpha10(), 0.1, 150, DtsMethod::PacsMixture).unwrap();
    let u = displaced_thermal(alpha10(), 0.1, 150, DtsMethod::Unitary).unwrap();
    assert!(max_abs(&(&p.rho - &u.rho)) <= 1e-8);
}

#[test]
fn pacs_mixture_route_divergence_cap() {
    // nbar = 15 needs more than the capped number of mixture terms
    match displaced_thermal(re(0.0), 15.0, 380, DtsMethod::PacsMixture) {
        Err(Error::MethodDiverged { cap }) => assert!(cap >= 100),
        other => panic!("expected MethodDiverged, got {:?}", other.map(|s| s.kind)),
    }
}

#[test]
fn mtcs_limits_and_statistics() {
    let coh = coherent_state(alpha10(), 150).unwrap();
    let th = thermal_state(1.0, 150).unwrap();
    let all_coh = mtcs(alpha10(), 1.0, 1.0, 150).unwrap();
    let all_th = mtcs(alpha10(), 1.0, 0.0, 150).unwrap();
    assert!(max_abs(&(&all_coh.rho - &coh.rho)) <= 1e-15);
    assert!(max_abs(&(&all_th.rho - &th.rho)) <= 1e-15);

    let qbar = equal_overlap_q(alpha10(), 1.0);
    let m = mtcs(alpha10(), 1.0, qbar, 150).unwrap();
    assert_density(&m);
    assert!((m.rho[[0, 0]].re - 0.2508677136930438).abs() <= 1e-10);
    assert!((purity_deficit(&m) - 0.6661051774995332).abs() <= 1e-9);
}

#[test]
fn equal_overlap_calibration() {
    let qbar = equal_overlap_q(alpha10(), 1.0);
    assert!((qbar - 0.4983098190754845).abs() <= 1e-12);
    assert_eq!(equal_overlap_q(re(0.0), 1.0), 0.0);
    assert_eq!(equal_overlap_q(re(2.0), 0.0), 1.0);

    let dts = displaced_thermal(alpha10(), 1.0, 150, DtsMethod::Unitary).unwrap();
    let mixed = mtcs(alpha10(), 1.0, qbar, 150).unwrap();
    let ov_dts = coherent_overlap(&dts, alpha10());
    let ov_mix = coherent_overlap(&mixed, alpha10());
    // displacing the thermal state back gives <0|rho_th|0> = 1/(1 + nbar)
    assert!((ov_dts - 0.5).abs() <= 1e-9, "{ov_dts}");
    assert!((ov_dts - ov_mix).abs() <= 1e-9, "{ov_dts} vs {ov_mix}");
    // bare thermal cross overlap, the other ingredient of the calibration
    let th = thermal_state(1.0, 150).unwrap();
    assert!((coherent_overlap(&th, alpha10()) - 0.0033689734995427335).abs() <= 1e-9);
}

#[test]
fn distribution_peak_structure() {
    let qbar = equal_overlap_q(alpha10(), 1.0);
    let mixed = mtcs(alpha10(), 1.0, qbar, 150).unwrap();
    let p: Vec<f64> = photon_distribution(&mixed).into_iter().map(|(_, v)| v).collect();
    let peaks = local_maxima(&p, 1e-12);
    assert_eq!(peaks, vec![0, 9], "mixed-state peaks {peaks:?}");

    let dts = displaced_thermal(alpha10(), 1.0, 150, DtsMethod::Unitary).unwrap();
    let pd: Vec<f64> = photon_distribution(&dts).into_iter().map(|(_, v)| v).collect();
    let dpeaks = local_maxima(&pd, 1e-12);
    assert_eq!(dpeaks, vec![9], "displaced thermal peaks {dpeaks:?}");
}

#[test]
fn pacs_limits_and_statistics() {
    let plain = pacs(alpha10(), 0, 150).unwrap();
    let coh = coherent_state(alpha10(), 150).unwrap();
    assert!(max_abs(&(&plain.rho - &coh.rho)) <= 1e-14);

    let fock = pacs(re(0.0), 3, 20).unwrap();
    assert_eq!(fock.rho[[3, 3]], re(1.0));

    let s = pacs(alpha10(), 1, 150).unwrap();
    assert_density(&s);
    assert_eq!(s.rho[[0, 0]], re(0.0));
    assert!((mean_photon(&s) - 131.0 / 11.0).abs() <= 1e-8);
}

#[test]
fn photon_addition_matches_pacs() {
    let coh = coherent_state(alpha10(), 150).unwrap();
    let added = photon_add(&coh).unwrap();
    let direct = pacs(alpha10(), 1, 150).unwrap();
    assert!(max_abs(&(&added.rho - &direct.rho)) <= 1e-10);
    assert!(matches!(added.kind, FieldKind::PhotonAdded(ref k) if **k == FieldKind::Coherent));
}

#[test]
fn photon_addition_empties_vacuum() {
    let vac = number_state(0, 10).unwrap();
    let one = photon_add(&vac).unwrap();
    assert_eq!(one.rho[[1, 1]], re(1.0));

    for state in [
        displaced_thermal(alpha10(), 1.0, 150, DtsMethod::Unitary).unwrap(),
        mtcs(alpha10(), 1.0, equal_overlap_q(alpha10(), 1.0), 150).unwrap(),
        thermal_state(1.0, 60).unwrap(),
    ] {
        let added = photon_add(&state).unwrap();
        assert!(added.rho[[0, 0]].norm() <= 1e-14);
        assert!((trace(&added.rho) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn photon_addition_normalizers() {
    let dts = displaced_thermal(alpha10(), 1.0, 150, DtsMethod::Unitary).unwrap();
    assert!((1.0 + mean_photon(&dts) - 12.0).abs() <= 1e-8);
    let qbar = equal_overlap_q(alpha10(), 1.0);
    let mixed = mtcs(alpha10(), 1.0, qbar, 150).unwrap();
    assert!((1.0 + mean_photon(&mixed) - 6.48478837167936).abs() <= 1e-8);
}

#[test]
fn photon_added_dts_overlap() {
    // <a| a^dag rho a |a> / (1 + <n>) = x <a|rho|a> / (1 + nbar + x) = 5/12
    let dts = displaced_thermal(alpha10(), 1.0, 150, DtsMethod::Unitary).unwrap();
    let added = photon_add(&dts).unwrap();
    let ov = coherent_overlap(&added, alpha10());
    assert!((ov - 5.0 / 12.0).abs() <= 1e-8, "overlap {ov}");
}

#[test]
fn mtcs_closed_form_agreement() {
    let alpha = C64::from_polar(10f64.sqrt(), std::f64::consts::FRAC_PI_3);
    let qbar = equal_overlap_q(alpha, 1.0);
    let s = mtcs(alpha, 1.0, qbar, 150).unwrap();
    let params = FieldParams { alpha, nbar: 1.0, q: qbar, cutoff: 150 };
    for n in (0..150).step_by(7) {
        for m in (0..150).step_by(9) {
            let cf = closed_form_element(ClosedFormKind::Mtcs, n, m, &params).unwrap();
            // the closed form uses raw amplitudes; truncation renormalization
            // shifts the constructed matrix by at most the tail mass
            assert!((s.rho[[n, m]] - cf).norm() <= 1e-9);
        }
    }
}

#[test]
fn truncation_bookkeeping() {
    let s = displaced_thermal(alpha10(), 1.0, 150, DtsMethod::Unitary).unwrap();
    let cut = truncate_field(&s, 60).unwrap();
    assert_eq!(cut.params.cutoff, 60);
    assert!((trace(&cut.rho) - 1.0).abs() <= 1e-12);
    assert!(cut.tail_mass >= s.tail_mass);
    assert!(matches!(truncate_field(&s, 200), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(truncate_field(&s, 1), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn parameter_validation() {
    assert!(matches!(thermal_state(-0.5, 40), Err(Error::DomainError(_))));
    assert!(matches!(mtcs(re(1.0), 1.0, 1.5, 40), Err(Error::DomainError(_))));
    assert!(matches!(coherent_state(C64::new(f64::NAN, 0.0), 40), Err(Error::NonFinite { .. })));
}
