use nnrank::bounds::{
    nuclear_norm, numerical_rank, optimal_w_fixed_point_check, verify_certificate, RANK_REL_TOL,
};
use nnrank::generators::*;
use nnrank::relaxations::{solve_relaxation, RelaxationSpec};
use nnrank::solver::SolverSettings;

#[test]
fn hypercube_certificates_verify() {
    for n in 1..=6 {
        let h = hypercube_slack(n).unwrap();
        let check = verify_certificate(h.slack.matrix(), &h.certificate()).unwrap();
        assert!(check.passes(1e-9), "n={n}: {check:?}");
        assert!((check.objective - h.objective()).abs() < 1e-9);
        let ratio = (check.objective / h.slack.frobenius_norm()).powi(2);
        assert!((ratio - 2.0 * n as f64).abs() < 1e-9);
    }
}

#[test]
fn hypercube_fixed_point() {
    for n in 1..=6 {
        let h = hypercube_slack(n).unwrap();
        let fact = h.facet_factorization();
        assert_eq!(fact.len(), 2 * n);
        assert!((fact.total_weight() - h.objective()).abs() < 1e-9);
        assert!(optimal_w_fixed_point_check(&h.w, &fact).unwrap() <= 1e-9);
    }
}

#[test]
fn hypercube_structure() {
    let h = hypercube_slack(4).unwrap();
    let nf = h.facet_negation();
    let nv = h.vertex_negation();
    assert_eq!(nf.matmul(&nf).unwrap(), nnrank::DenseMatrix::identity(8));
    assert_eq!(nv.transpose(), nv);
    assert_eq!(h.nonneg_part().min_entry(), 0.0);
    assert_eq!(numerical_rank(h.slack.matrix(), RANK_REL_TOL), 5);
    h.check_invariants().unwrap();
    assert_eq!(
        hypercube_slack(HYPERCUBE_MAX_N).unwrap().slack.shape(),
        (24, 4096)
    );
}

#[test]
fn derangement_properties() {
    for n in 2..=8 {
        let d = derangement(n).unwrap();
        assert_eq!(numerical_rank(&d, RANK_REL_TOL), n);
        let nf = n as f64;
        assert!((d.frobenius_norm().powi(2) - (nf * nf - nf)).abs() < 1e-12);
        // Coincides with the upper bound for even n only.
        if n % 2 == 0 {
            assert!((nuclear_norm(&d) - derangement_nu_upper(n)).abs() < 1e-9);
        }
    }
    for n in 4..=6 {
        let d = derangement(n).unwrap();
        let r =
            solve_relaxation(&d, &RelaxationSpec::default(), &SolverSettings::default()).unwrap();
        assert!(r.value <= derangement_nu_upper(n) + 1e-4);
    }
}

#[test]
fn scaled_diagonal_ratios() {
    let n = 6;
    let beta = 3.0;
    let a = scaled_diagonal(n, beta).unwrap();
    let nf = n as f64;
    let r = solve_relaxation(&a, &RelaxationSpec::default(), &SolverSettings::default()).unwrap();
    let ratio = (r.value / a.frobenius_norm()).powi(2);
    let expect = (beta + nf - 1.0).powi(2) / (beta * beta + nf - 1.0);
    assert!((ratio - expect).abs() < 1e-4, "{ratio} vs {expect}");
    let ident = scaled_diagonal(n, 1.0).unwrap();
    let r = solve_relaxation(
        &ident,
        &RelaxationSpec::default(),
        &SolverSettings::default(),
    )
    .unwrap();
    assert!(((r.value / ident.frobenius_norm()).powi(2) - nf).abs() < 1e-4);
}
