//! Cross-method spectrum checks on shot profiles: the reduced scalar route
//! against the dense eigensolve, grid convergence, and the analytic
//! essential intervals of the model families.

mod common;

use common::{gierer_meinhardt_profiles, gray_scott_profiles};
use rdode_core::spectrum::{
    analyze_spectrum, assemble_linearization, essential_interval, find_lambda_sequence,
};

#[test]
fn gray_scott_lambda_sequence_accumulates_and_matches_dense() {
    let (model, _, profiles) = gray_scott_profiles(0.04, 15.0, 400);
    let p = &profiles[0];
    let (l0, l0_cap) = essential_interval(p);
    assert!((l0 - 0.08).abs() < 1e-12 && (l0_cap - 0.08).abs() < 1e-12);

    let seq = find_lambda_sequence(p, &model, 6).unwrap();
    assert!(seq.missing.is_empty(), "missing modes {:?}", seq.missing);
    let lambdas = seq.lambdas();
    assert!(lambdas.len() >= 5);
    for w in lambdas.windows(2) {
        assert!(w[0] < w[1], "sequence must increase: {lambdas:?}");
        assert!(l0 - w[1] < l0 - w[0], "gaps to lambda0 must shrink");
    }
    assert!(lambdas.iter().all(|l| *l < l0));

    // every reduced-route eigenvalue appears in the dense spectrum
    let eigs = assemble_linearization(p, &model, 400).unwrap().eigenvalues().unwrap();
    for l in &lambdas {
        let dist = eigs
            .iter()
            .map(|z| ((z.re - l).powi(2) + z.im.powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        assert!(dist < 1e-3, "lambda = {l} unmatched (distance {dist})");
    }
}

#[test]
fn lambda_sequence_is_cauchy_under_refinement() {
    let (model, _, p400) = gray_scott_profiles(0.04, 15.0, 400);
    let (_, _, p800) = gray_scott_profiles(0.04, 15.0, 800);
    let s400 = find_lambda_sequence(&p400[0], &model, 5).unwrap();
    let s800 = find_lambda_sequence(&p800[0], &model, 5).unwrap();
    assert_eq!(s400.values.len(), s800.values.len());
    for ((n4, l4), (n8, l8)) in s400.values.iter().zip(&s800.values) {
        assert_eq!(n4, n8);
        assert!((l4 - l8).abs() < 1e-3, "mode {n4} moved {}", (l4 - l8).abs());
    }
}

#[test]
fn dense_route_has_many_reals_below_lambda0() {
    // with autocatalysis + compensation the spectrum accumulates at λ0 from
    // below: the upper half of (0, λ0) carries at least `count` real
    // eigenvalues once the grid resolves them
    let (model, _, profiles) = gray_scott_profiles(0.04, 15.0, 400);
    let p = &profiles[0];
    let (l0, _) = essential_interval(p);
    let eigs = assemble_linearization(p, &model, 400).unwrap().eigenvalues().unwrap();
    let reals_upper = eigs
        .iter()
        .filter(|z| z.im.abs() < 1e-9 && z.re > 0.5 * l0 && z.re < l0)
        .count();
    assert!(reals_upper >= 6, "only {reals_upper} real eigenvalues in the upper half");
}

#[test]
fn gierer_meinhardt_essential_interval_is_p_minus_one() {
    let (model, _, profiles) = gierer_meinhardt_profiles(2.0, 1.0, 2.0, 0.0, 0.5, 5.0, 400);
    assert!(!profiles.is_empty(), "expected a GM profile at L = 5");
    let p = &profiles[0];
    let (l0, l0_cap) = essential_interval(p);
    assert!((l0 - 1.0).abs() < 1e-12, "lambda0 = {l0}");
    assert!((l0_cap - 1.0).abs() < 1e-12);
    let seq = find_lambda_sequence(p, &model, 4).unwrap();
    let lambdas = seq.lambdas();
    assert!(lambdas.len() >= 3);
    for w in lambdas.windows(2) {
        assert!(w[0] < w[1]);
    }
}

#[test]
fn full_report_certifies_instability_with_a_gap() {
    let (model, _, profiles) = gray_scott_profiles(0.04, 15.0, 300);
    let report = analyze_spectrum(&profiles[0], &model, 5).unwrap();
    assert!(report.unstable);
    let (mu, m_end) = report.gap.expect("gap below the lambda sequence");
    assert!(0.0 <= mu && mu < m_end && m_end < report.lambda0);
    // nothing computed lands inside the closed strip
    for z in &report.dense_eigenvalues {
        assert!(z.re < mu || z.re > m_end, "eigenvalue {z} inside the gap");
    }
    for (_, l) in &report.lambda_sequence {
        assert!(*l < mu || *l > m_end);
    }
}

#[test]
fn stable_constant_state_yields_no_gap() {
    // constant profile at the Gray-Scott trivial state (0, 1): f_u < 0,
    // no positive spectrum at all
    let model = rdode_core::kinetics::KineticModel::gray_scott(0.04, 0.06).unwrap();
    let grid = rdode_core::grid::Grid::new(64, 5.0).unwrap();
    let profile = rdode_core::profile1d::StationaryProfile::from_samples(
        &model,
        grid,
        vec![0.0; 64],
        vec![1.0; 64],
        vec![0; 64],
        vec!["zero".into()],
    )
    .unwrap();
    let report = analyze_spectrum(&profile, &model, 3).unwrap();
    assert!(!report.unstable);
    assert!(report.gap.is_none());
    assert!(report.dense_eigenvalues.iter().all(|z| z.re < 0.0));
}
