use std::f64::consts::PI;

use qma_lab::comparison::check_prop32;
use qma_lab::hypercomplex::{standard_frame, HyperhermitianForm};
use qma_lab::operators::{eigenvalues, qma_operator};
use qma_lab::solver::{
    complex_hessian_field, forward, io, l1_check, quaternionic_hessian_field, solve, solve_from, ScalarField,
    SolveOptions, TorusGrid,
};
use qma_lab::Error;

fn cos_rhs(points: usize, amp: f64) -> ScalarField {
    let g = TorusGrid::new(1, points).unwrap();
    ScalarField::from_fn(g, |x| amp * (2.0 * PI * x[0]).cos()).unwrap()
}

#[test]
fn cosine_rhs_round_trips_through_forward_operator() {
    let spec = qma_operator(1).unwrap();
    let f = cos_rhs(16, 0.1);
    let r = solve(&spec, &f, &SolveOptions::default()).unwrap();
    assert!(r.residual_inf <= 1e-8);
    assert_eq!(r.phi.sup(), 0.0);
    assert!(r.min_eig_margin > 0.0);
    let fw = forward(&spec, &r.phi).unwrap();
    let err = fw
        .log_f
        .iter()
        .zip(f.values())
        .map(|(l, x)| ((l - r.b).exp() - x.exp()).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-7, "sup error {err}");
    let l1 = l1_check(&spec, &r).unwrap();
    assert!(l1.holds() && l1.l1_norm > 0.0);
}

#[test]
fn solution_depends_only_on_forced_axis() {
    let spec = qma_operator(1).unwrap();
    let f = cos_rhs(12, 0.3);
    let r = solve(&spec, &f, &SolveOptions::default()).unwrap();
    let g = *f.grid();
    for p in 0..g.len() {
        let q = g.index_of(&[g.digit(p, 0), 0, 0, 0]);
        assert!((r.phi.values()[p] - r.phi.values()[q]).abs() < 1e-12);
    }
}

#[test]
fn continuation_path_is_continuous() {
    let spec = qma_operator(1).unwrap();
    let g = TorusGrid::new(1, 12).unwrap();
    let base = ScalarField::from_fn(g, |x| 0.4 * (2.0 * PI * x[0]).cos() + 0.2 * (2.0 * PI * (x[1] - x[3])).sin()).unwrap();
    let mut sols = Vec::new();
    let mut prev: Option<ScalarField> = None;
    for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let r = solve_from(&spec, &base.map(|v| t * v), &SolveOptions::default(), prev.as_ref()).unwrap();
        prev = Some(r.phi.clone());
        sols.push(r.phi);
    }
    // distance to the middle solution shrinks as t approaches 1/2
    let d = |i: usize| sols[i].max_abs_diff(&sols[2]);
    assert!(d(0) > d(1) && d(1) > 0.0);
    assert!(d(4) > d(3) && d(3) > 0.0);
    // a cold start reaches the same solution
    let cold = solve(&spec, &base, &SolveOptions::default()).unwrap();
    assert!(cold.phi.max_abs_diff(&sols[4]) < 1e-9);
}

#[test]
fn solutions_satisfy_determinant_identity_and_comparison() {
    let spec = qma_operator(1).unwrap();
    let frame = standard_frame(1).unwrap();
    let f = cos_rhs(8, 0.5);
    let r = solve(&spec, &f, &SolveOptions::default()).unwrap();
    let omega = HyperhermitianForm::standard(&frame);
    let pert = quaternionic_hessian_field(&r.phi, &frame).unwrap();
    let hess = complex_hessian_field(&r.phi);
    for (p, h) in pert.iter().enumerate() {
        let omega_phi = HyperhermitianForm::from_hermitian(&h.add(&qma_lab::hypercomplex::HermitianForm::identity(1)), &frame);
        let ratio = omega_phi.pfaffian() / omega.pfaffian();
        let expect = (f.values()[p] + r.b).exp();
        assert!((ratio - expect).abs() < 1e-6 * expect);
        let lam = eigenvalues(&omega_phi, &omega, &frame).unwrap();
        assert!((lam.values()[0] - expect).abs() < 1e-6 * expect);
        if hess[p].is_psd() {
            assert!(check_prop32(&hess[p], &frame).unwrap().margin >= -1e-8);
        }
    }
}

#[test]
fn nonconvergence_is_reported() {
    let spec = qma_operator(1).unwrap();
    let f = cos_rhs(8, 2.0);
    let opts = SolveOptions {
        max_iters: 1,
        ..SolveOptions::default()
    };
    assert!(matches!(solve(&spec, &f, &opts), Err(Error::NonConvergence { iterations: 1, .. })));
    let r = solve(&spec, &f, &SolveOptions::default()).unwrap();
    assert!(r.newton_iters > 1);
}

#[test]
fn forced_solve_bypasses_range_guard() {
    let spec = qma_operator(1).unwrap();
    let f = cos_rhs(8, 7.0);
    assert!(matches!(solve(&spec, &f, &SolveOptions::default()), Err(Error::DynamicRange { .. })));
    let opts = SolveOptions {
        force: true,
        ..SolveOptions::default()
    };
    // the spectral problem may or may not converge; it must not be refused
    assert!(!matches!(solve(&spec, &f, &opts), Err(Error::DynamicRange { .. })));
}

#[test]
fn result_files_round_trip() {
    let spec = qma_operator(1).unwrap();
    let r = solve(&spec, &cos_rhs(8, 0.2), &SolveOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("phi.grid");
    let meta = dir.path().join("phi.meta");
    io::write_grid(&grid, &r.phi).unwrap();
    io::write_metadata(&meta, &r).unwrap();
    assert_eq!(io::read_grid(&grid).unwrap(), r.phi);
    let text = std::fs::read_to_string(&meta).unwrap();
    assert!(text.contains("newton_iters = "));
    assert!(text.lines().any(|l| l.starts_with("b = ")));
}
