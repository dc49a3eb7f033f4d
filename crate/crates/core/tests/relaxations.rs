use std::f64::consts::SQRT_2;

use nnrank::bounds::{nuclear_norm, round_certificate, verify_certificate};
use nnrank::generators::{cohen_rothblum, derangement};
use nnrank::relaxations::{
    build, export_sdpa, solve_relaxation, RelaxationSpec, SdpaProblem, SymmetricReduction,
};
use nnrank::solver::{solve, SolveStatus, SolverSettings};
use nnrank::spectral::min_eigenvalue;
use nnrank::{DenseMatrix, NonnegMatrix};

fn settings() -> SolverSettings {
    SolverSettings::default()
}

fn level0(reduction: SymmetricReduction) -> RelaxationSpec {
    RelaxationSpec::level(0).with_reduction(reduction)
}

#[test]
fn square_slack_value_and_certificate() {
    let a = cohen_rothblum();
    let r = solve_relaxation(&a, &level0(SymmetricReduction::Off), &settings()).unwrap();
    assert_eq!(r.solution.status, SolveStatus::Optimal);
    assert!((r.value - 4.0 * SQRT_2).abs() < 1e-4, "{}", r.value);
    let cert = r.certificate.as_ref().unwrap();
    let check = verify_certificate(&a, cert).unwrap();
    assert!(check.passes(1e-5), "{check:?}");
    assert!(check.nonneg_min >= 0.0);
    let rounded = round_certificate(&a, cert).unwrap();
    assert!(rounded.certified_value <= r.value + 1e-7);
    assert!(((rounded.certified_value / a.frobenius_norm()).powi(2)) >= 3.999);
}

#[test]
fn reduced_matches_full() {
    for a in [cohen_rothblum(), derangement(5).unwrap()] {
        let full = solve_relaxation(&a, &level0(SymmetricReduction::Off), &settings()).unwrap();
        let red = solve_relaxation(&a, &level0(SymmetricReduction::On), &settings()).unwrap();
        assert!(red.reduced && !full.reduced);
        assert!(
            (full.value - red.value).abs() < 1e-5,
            "{} vs {}",
            full.value,
            red.value
        );
        let cert = red.certificate.unwrap();
        assert!(verify_certificate(&a, &cert).unwrap().passes(1e-5));
    }
}

#[test]
fn auto_reduction_only_for_symmetric_input() {
    let sym = cohen_rothblum();
    assert!(
        solve_relaxation(&sym, &RelaxationSpec::default(), &settings())
            .unwrap()
            .reduced
    );
    let asym = NonnegMatrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
    assert!(
        !solve_relaxation(&asym, &RelaxationSpec::default(), &settings())
            .unwrap()
            .reduced
    );
    assert!(build(&asym, &level0(SymmetricReduction::On)).is_err());
}

#[test]
fn diagonal_gives_trace() {
    let a = NonnegMatrix::new(DenseMatrix::from_diagonal(&[3.0, 0.5, 2.0])).unwrap();
    let r = solve_relaxation(&a, &level0(SymmetricReduction::Off), &settings()).unwrap();
    assert!((r.value - 5.5).abs() < 1e-5);
}

#[test]
fn rank_one_gives_norm_product() {
    let u = [1.0, 2.0, 0.5];
    let v = [3.0, 1.0];
    let a = NonnegMatrix::new(DenseMatrix::from_fn(3, 2, |i, j| u[i] * v[j])).unwrap();
    let r = solve_relaxation(&a, &RelaxationSpec::default(), &settings()).unwrap();
    let expect =
        (u.iter().map(|x| x * x).sum::<f64>() * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
    assert!((r.value - expect).abs() < 1e-5);
}

#[test]
fn witness_is_doubly_nonnegative_and_matches_value() {
    let a = NonnegMatrix::from_rows(&[[1.0, 0.0, 2.0], [0.5, 1.0, 0.0]]).unwrap();
    let r = solve_relaxation(&a, &level0(SymmetricReduction::Off), &settings()).unwrap();
    let wit = r.witness.as_ref().unwrap();
    let z = wit.assemble(&a);
    assert!(z.min_entry() > -1e-5);
    assert!(min_eigenvalue(&z).unwrap() > -1e-5);
    assert!((wit.objective(None) - r.value).abs() < 1e-4);
    assert!(r.value >= nuclear_norm(&a) - 1e-6);
}

#[test]
fn level_one_dominates_level_zero() {
    let a = NonnegMatrix::from_rows(&[[1.0, 1.0, 0.0], [0.0, 1.0, 1.0]]).unwrap();
    let r0 = solve_relaxation(&a, &level0(SymmetricReduction::Off), &settings()).unwrap();
    let r1 = solve_relaxation(&a, &RelaxationSpec::level(1), &settings()).unwrap();
    assert_eq!(r1.level, 1);
    assert!(r1.certificate.is_none());
    assert!(r1.value >= r0.value - 2e-6, "{} < {}", r1.value, r0.value);
}

/// Golden export of the level-0 program for `[[1, 2]]`.
#[test]
fn sdpa_golden_file() {
    let a = NonnegMatrix::from_rows(&[[1.0, 2.0]]).unwrap();
    let compiled = build(&a, &level0(SymmetricReduction::Off)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("row.dat-s");
    export_sdpa(
        &compiled.problem,
        &out,
        Some("level-0 relaxation of [[1, 2]]"),
    )
    .unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    let golden = include_str!("data/row_level0.dat-s");
    assert_eq!(text, golden);
}

#[test]
fn sdpa_round_trip_and_resolve() {
    let a = cohen_rothblum();
    let compiled = build(&a, &level0(SymmetricReduction::Off)).unwrap();
    let sdpa = SdpaProblem::from_problem(&compiled.problem, Some("square")).unwrap();
    let text = sdpa.to_sdpa_string();
    let parsed = SdpaProblem::parse(&text).unwrap();
    assert_eq!(parsed, sdpa);
    let resolved = solve(&parsed.to_conic().unwrap(), &settings()).unwrap();
    assert_eq!(resolved.status, SolveStatus::Optimal);
    assert!((-resolved.primal_objective - 4.0 * SQRT_2).abs() < 1e-4);
}

#[test]
fn sdpa_parse_errors_are_reported() {
    assert!(SdpaProblem::parse("1\n1\n2\n").is_err());
    assert!(SdpaProblem::parse("1\n1\n2\n1.0\n0 1 1 x 1.0\n").is_err());
    assert!(SdpaProblem::parse("1\n1\n2\n1.0\n0 3 1 1 1.0\n").is_err());
}
