use nnrank::relaxations::build_nuclear_norm_sdp;
use nnrank::solver::{
    extract_dual_block, solve, solve_with_log, Cone, ConeProduct, ConicProblem, ConstraintMatrix,
    SolveStatus, SolverSettings,
};
use nnrank::spectral::singular_values;
use nnrank::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn settings() -> SolverSettings {
    SolverSettings::default().with_tol(1e-8)
}

#[test]
fn tiny_lp() {
    let mut cone = ConeProduct::new();
    cone.push(Cone::Nonneg(1));
    let mut a = ConstraintMatrix::new(1);
    a.push_row([(0, 1.0)]);
    let p = ConicProblem {
        c: vec![1.0],
        a,
        b: vec![1.0],
        cone,
        variables: vec![],
        constraints: vec![],
    };
    let sol = solve(&p, &settings()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_objective - 1.0).abs() < 1e-7);
    assert!((sol.dual_objective - 1.0).abs() < 1e-7);
}

#[test]
fn redundant_constraints_are_tolerated() {
    // min x + y  s.t.  x + y = 2 (twice), x - y = 0, x, y >= 0.
    let mut cone = ConeProduct::new();
    cone.push(Cone::Nonneg(2));
    let mut a = ConstraintMatrix::new(2);
    a.push_row([(0, 1.0), (1, 1.0)]);
    a.push_row([(0, 2.0), (1, 2.0)]);
    a.push_row([(0, 1.0), (1, -1.0)]);
    let p = ConicProblem {
        c: vec![1.0, 1.0],
        a,
        b: vec![2.0, 4.0, 0.0],
        cone,
        variables: vec![],
        constraints: vec![],
    };
    let sol = solve(&p, &settings()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.z[0] - 1.0).abs() < 1e-6 && (sol.z[1] - 1.0).abs() < 1e-6);
}

#[test]
fn nuclear_norm_pair_diag() {
    let a = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 2.0]]).unwrap();
    let p = build_nuclear_norm_sdp(&a);
    let sol = solve(&p, &settings()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!(
        (sol.primal_objective - 3.0).abs() < 1e-6,
        "{}",
        sol.primal_objective
    );
}

#[test]
fn nuclear_norm_pair_identity_dual_is_identity() {
    let a = DenseMatrix::identity(2);
    let p = build_nuclear_norm_sdp(&a);
    let sol = solve(&p, &settings()).unwrap();
    let blk = p.constraint("offdiag").unwrap();
    let w = extract_dual_block(&sol, blk.range(), blk.shape).unwrap();
    assert!(
        w.sub(&DenseMatrix::identity(2)).unwrap().max_abs() < 1e-6,
        "{w:?}"
    );
}

#[test]
fn nuclear_norm_pair_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let a = DenseMatrix::from_fn(4, 3, |_, _| rng.random_range(-1.0..1.0));
    let oracle: f64 = singular_values(&a).iter().sum();
    let sol = solve(&build_nuclear_norm_sdp(&a), &settings()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_objective - oracle).abs() < 1e-6);
}

#[test]
fn deterministic_and_logged() {
    let a = DenseMatrix::from_rows(&[[1.0, 2.0], [0.5, 0.0], [1.0, 1.0]]).unwrap();
    let p = build_nuclear_norm_sdp(&a);
    let s1 = solve(&p, &settings()).unwrap();
    let mut log = Vec::new();
    let s2 = solve_with_log(&p, &settings(), Some(&mut log)).unwrap();
    assert_eq!(s1.z, s2.z);
    assert_eq!(s1.y, s2.y);
    let text = String::from_utf8(log).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with("iteration,primal_residual"));
    assert_eq!(lines.count(), s2.iterations / 10);
}

#[test]
fn max_iter_returns_best_iterate() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = DenseMatrix::from_fn(5, 4, |_, _| rng.random_range(0.0..1.0));
    let p = build_nuclear_norm_sdp(&a);
    let sol = solve(
        &p,
        &SolverSettings::default().with_tol(1e-14).with_max_iter(25),
    )
    .unwrap();
    assert_eq!(sol.status, SolveStatus::MaxIter);
    assert!(sol.iterations <= 25);
    assert!(p.cone.dual_contains(&sol.s, 1e-9));
}

#[test]
fn rejects_inconsistent_problem() {
    let mut cone = ConeProduct::new();
    cone.push(Cone::Nonneg(2));
    let p = ConicProblem {
        c: vec![1.0],
        a: ConstraintMatrix::new(2),
        b: vec![],
        cone,
        variables: vec![],
        constraints: vec![],
    };
    assert!(solve(&p, &settings()).is_err());
}
