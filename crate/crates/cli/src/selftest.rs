//! Quick versions of the documented example checks.

use std::f64::consts::PI;

use qma_lab::comparison::{check_lemma31, check_prop32, lemma31_suite, prop32_suite};
use qma_lab::gp::{
    claim_row, model_mass, model_mass_limit, radial_cma_dirichlet, radial_mass, tau, BallModel, ClaimInstance,
};
use qma_lab::hypercomplex::{decompose, standard_frame, volume_constant, HermitianForm, HyperhermitianForm};
use qma_lab::operators::{
    check_structural, linearization_coeffs, negative_control, qma_operator, shipped_zoo, EigTuple,
};
use qma_lab::probe::{norm_entropy, run_probe, FamilyShape, Normalization, ProbeSettings, RhsFamily};
use qma_lab::quaternion::QuatMatrix;
use qma_lab::solver::{forward, quadratic_patch_perturbation, solve, ScalarField, SolveOptions, TorusGrid};

use crate::CliError;

type Check = (&'static str, fn() -> Result<(), String>);

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn lab<T>(r: qma_lab::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn frames() -> Result<(), String> {
    for n in 1..=3 {
        let d = lab(standard_frame(n))?.defects().max();
        ensure(d < 1e-12, || format!("n={n}: frame defect {d:e}"))?;
    }
    Ok(())
}

fn volume_constants() -> Result<(), String> {
    for (n, exact) in [(1, 0.5), (2, 1.0 / 6.0), (3, 1.0 / 20.0)] {
        let c = lab(volume_constant(n))?;
        ensure((c - exact).abs() < 1e-14, || format!("c({n}) = {c}"))?;
    }
    Ok(())
}

fn identity_decomposition() -> Result<(), String> {
    let frame = lab(standard_frame(2))?;
    let (h, om) = lab(decompose(&QuatMatrix::identity(2), &frame))?;
    ensure(h.max_abs_diff(&HermitianForm::identity(2)) < 1e-15, || "hbar is not the identity".into())?;
    let diff = (om.coefficients() - HyperhermitianForm::standard(&frame).coefficients()).norm();
    ensure(diff < 1e-15, || format!("Omega differs by {diff:e}"))
}

fn lemma_examples() -> Result<(), String> {
    let frame = lab(standard_frame(2))?;
    let rep = lab(check_lemma31(&lab(HermitianForm::from_real_diagonal(2, &[1.0, 0.0, 2.0, 0.0]))?, &frame))?;
    ensure(rep.holds(), || format!("{rep:?}"))?;
    for n in [1, 2] {
        let f = lab(standard_frame(n))?;
        let s = lemma31_suite(&f, 200, 11);
        ensure(s.all_passed(), || format!("n={n}: {}/{}", s.passed, s.total))?;
    }
    Ok(())
}

fn prop_examples() -> Result<(), String> {
    let frame = lab(standard_frame(1))?;
    let rep = lab(check_prop32(&HermitianForm::identity(1), &frame))?;
    ensure(rep.holds() && rep.routes_agree(), || format!("{rep:?}"))?;
    for n in [1, 2] {
        let f = lab(standard_frame(n))?;
        let s = prop32_suite(&f, 200, 12);
        ensure(s.all_passed(), || format!("n={n}: {}/{}", s.passed, s.total))?;
    }
    Ok(())
}

fn operator_examples() -> Result<(), String> {
    let spec = lab(qma_operator(2))?;
    let v = lab(spec.value(&[4.0, 1.0]))?;
    ensure((v - 2.0).abs() < 1e-15, || format!("f(4,1) = {v}"))?;
    let c = lab(linearization_coeffs(&spec, &EigTuple::new(vec![4.0, 1.0])))?;
    ensure((c[0] - 0.125).abs() < 1e-15 && (c[1] - 0.5).abs() < 1e-15, || format!("{c:?}"))?;
    for spec in shipped_zoo(3) {
        let rep = check_structural(&spec, 300, 5);
        ensure(rep.passes(), || format!("{spec}: {:?}", rep.witness))?;
    }
    ensure(check_structural(&negative_control(2), 300, 5).witness.is_some(), || {
        "negative control passed".into()
    })
}

fn solver_examples() -> Result<(), String> {
    let spec = lab(qma_operator(1))?;
    let g = lab(TorusGrid::new(1, 16))?;
    let zero = lab(solve(&spec, &ScalarField::zeros(g), &SolveOptions::default()))?;
    ensure(zero.b == 0.0 && zero.phi.inf() == 0.0, || "F = 0 did not give phi = 0".into())?;
    let f = lab(ScalarField::from_fn(g, |x| 0.1 * (2.0 * PI * x[0]).cos()))?;
    let r = lab(solve(&spec, &f, &SolveOptions::default()))?;
    let fw = lab(forward(&spec, &r.phi))?;
    let err = fw
        .log_f
        .iter()
        .zip(f.values())
        .map(|(l, x)| ((l - r.b).exp() - x.exp()).abs())
        .fold(0.0, f64::max);
    ensure(r.residual_inf <= 1e-8 && err < 1e-7 && r.phi.sup() == 0.0, || {
        format!("residual {:e}, forward error {err:e}", r.residual_inf)
    })?;
    let frame = lab(standard_frame(2))?;
    let h = lab(quadratic_patch_perturbation(&[2.0, 0.5], &frame))?;
    let ev = h.eigenvalues();
    ensure((ev[0] - 0.5).abs() < 1e-14 && (ev[3] - 2.0).abs() < 1e-14, || format!("{ev:?}"))
}

fn gp_examples() -> Result<(), String> {
    ensure((tau(10.0, 0.0) - 0.05).abs() < 1e-16, || "tau_k(0)".into())?;
    ensure(tau(1.0, -1.0) > tau(10.0, -1.0) && tau(10.0, -1.0) > tau(100.0, -1.0), || "tau monotone".into())?;
    let ball = lab(BallModel::new(1, 0.2, vec![0.0; 4], 2001))?;
    let a = model_mass(&ball, 0.02, None);
    let exact = model_mass_limit(2, 0.02);
    ensure((a - exact).abs() < 1e-8 * exact, || format!("A_s {a} vs {exact}"))?;
    let nodes: Vec<f64> = (0..=100).map(|i| 0.0016 * i as f64).collect();
    let p = lab(radial_cma_dirichlet(&nodes, &vec![2.0; nodes.len()], 2))?;
    let err = p
        .u
        .iter()
        .zip(&nodes)
        .map(|(u, s)| (u - 2f64.sqrt() * (s - 0.16)).abs())
        .fold(0.0, f64::max);
    ensure(err < 1e-10, || format!("constant rhs error {err:e}"))?;
    let g: Vec<f64> = nodes.iter().map(|s| 1.0 + s).collect();
    let total = radial_mass(2, &nodes, &g);
    let p = lab(radial_cma_dirichlet(&nodes, &g.iter().map(|v| v / total).collect::<Vec<_>>(), 2))?;
    ensure((p.mass() - 1.0).abs() < 1e-8, || format!("mass {}", p.mass()))?;
    let base = lab(claim_row(&ball, &ClaimInstance::Model, 0.02, 10.0, 1.0))?;
    let scaled = lab(claim_row(&ball, &ClaimInstance::Model, 0.02, 10.0, 2.0))?;
    let rel = (scaled.c_empirical * 2.0 / base.c_empirical - 1.0).abs();
    ensure(rel < 1e-9, || format!("scaling error {rel:e}"))
}

fn probe_examples() -> Result<(), String> {
    let g = lab(TorusGrid::new(1, 8))?;
    ensure(norm_entropy(&ScalarField::zeros(g), 3.0) == 0.0, || "entropy of F = 0".into())?;
    let fam = lab(RhsFamily::new(
        "constant",
        FamilyShape::Constant { value: 0.0 },
        Normalization::FixLq { q: 3.0, target: 1.5 },
        7,
    ))?;
    let settings = ProbeSettings {
        points_per_axis: 8,
        p: 3.0,
        q: 3.0,
        solve: SolveOptions::default(),
    };
    let rep = lab(run_probe(&fam, &[0.4, 0.2], &lab(qma_operator(1))?, &settings))?;
    ensure(rep.rows.iter().all(|r| r.converged && r.neg_inf_phi == 0.0), || format!("{:?}", rep.rows))
}

pub const CHECKS: &[Check] = &[
    ("frame identities", frames),
    ("volume constants", volume_constants),
    ("identity decomposition", identity_decomposition),
    ("determinant comparison", lemma_examples),
    ("quaternionic vs complex density", prop_examples),
    ("operators", operator_examples),
    ("solver", solver_examples),
    ("auxiliary equation", gp_examples),
    ("probe", probe_examples),
];

pub fn run() -> Result<(), CliError> {
    let mut failed = Vec::new();
    for (name, check) in CHECKS {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(e) => {
                println!("FAIL {name}: {e}");
                failed.push(*name);
            }
        }
    }
    println!("{}/{} checks passed", CHECKS.len() - failed.len(), CHECKS.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failed.join(", ")))
    }
}
