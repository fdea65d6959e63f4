//! Eigenvalues of perturbed hyperhermitian forms and admissible operators
//! `f(lambda)` on symmetric cones.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::hypercomplex::{HermitianForm, HypercomplexFrame, HyperhermitianForm};
use crate::sampling::{rng, LabRng};
use crate::{Error, Result};

/// Relative pairing tolerance for the `2n` hermitian eigenvalues.
pub const PAIRING_TOLERANCE: f64 = 1e-8;

/// `n` eigenvalues `lambda_1 >= ... >= lambda_n` of a hyperhermitian pencil.
#[derive(Clone, Debug, PartialEq)]
pub struct EigTuple(Vec<f64>);

impl EigTuple {
    /// Sorts descending.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn product(&self) -> f64 {
        self.0.iter().product()
    }
}

/// Sorts `2n` eigenvalues, pairs neighbours and averages each pair.
/// Returns the tuple and the largest gap relative to the spectral radius.
pub fn pair_spectrum(spectrum: &[f64]) -> Result<(EigTuple, f64)> {
    assert!(spectrum.len() % 2 == 0, "odd spectrum");
    let mut mu = spectrum.to_vec();
    mu.sort_by(f64::total_cmp);
    let radius = mu.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut gap = 0.0f64;
    let mut lam = Vec::with_capacity(mu.len() / 2);
    for p in mu.chunks_exact(2) {
        gap = gap.max(p[1] - p[0]);
        lam.push(0.5 * (p[0] + p[1]));
    }
    let rel = if radius > 0.0 { gap / radius } else { 0.0 };
    if rel > PAIRING_TOLERANCE {
        return Err(Error::PairingFailure {
            gap: rel,
            tolerance: PAIRING_TOLERANCE,
        });
    }
    Ok((EigTuple::new(lam), rel))
}

/// Eigenvalues of `g^{-1} g_phi`, via the hermitian pencil of the associated
/// matrices `hbar_phi` relative to `hbar`.
pub fn eigenvalues(omega_phi: &HyperhermitianForm, omega: &HyperhermitianForm, frame: &HypercomplexFrame) -> Result<EigTuple> {
    eigenvalues_with_gap(omega_phi, omega, frame).map(|(t, _)| t)
}

pub fn eigenvalues_with_gap(
    omega_phi: &HyperhermitianForm,
    omega: &HyperhermitianForm,
    frame: &HypercomplexFrame,
) -> Result<(EigTuple, f64)> {
    let base = omega.to_hermitian(frame);
    let pert = omega_phi.to_hermitian(frame);
    let min_eigenvalue = base.min_eigenvalue();
    if !(min_eigenvalue > 0.0) {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let chol = base
        .matrix()
        .clone()
        .cholesky()
        .ok_or(Error::NotPositive { min_eigenvalue })?;
    let l_inv = chol
        .l()
        .solve_lower_triangular(&DMatrix::<Complex64>::identity(frame.complex_dim(), frame.complex_dim()))
        .expect("triangular factor is invertible");
    let reduced = &l_inv * pert.matrix() * l_inv.adjoint();
    let h = HermitianForm::from_matrix_symmetrized(frame.n(), &reduced);
    pair_spectrum(&h.eigenvalues())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `sigma_0 .. sigma_n` of `lam`.
pub fn elementary_symmetric(lam: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; lam.len() + 1];
    e[0] = 1.0;
    for (m, &x) in lam.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

fn without(lam: &[f64], i: usize) -> Vec<f64> {
    lam.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &v)| v)
        .collect()
}

/// An admissible operator `f: Gamma -> (0, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorSpec {
    /// `(prod lambda_i)^{1/n}` on the positive orthant: the quaternionic Monge-Ampere operator.
    GeometricMean { n: usize },
    /// `sum lambda_i / n` on `{sum lambda_i > 0}`.
    ArithmeticMean { n: usize },
    /// `((sigma_k / C(n,k)) / (sigma_l / C(n,l)))^{1/(k-l)}` on the Garding cone `Gamma_k`.
    HessianQuotient { n: usize, k: usize, l: usize },
    /// `max_i lambda_i`: symmetric and homogeneous but not elliptic. Negative control only.
    MaxEntry { n: usize },
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

pub fn qma_operator(n: usize) -> Result<OperatorSpec> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(OperatorSpec::GeometricMean { n })
}

pub fn arithmetic_mean(n: usize) -> Result<OperatorSpec> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    Ok(OperatorSpec::ArithmeticMean { n })
}

pub fn hessian_quotient(n: usize, k: usize, l: usize) -> Result<OperatorSpec> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if !(l < k && k <= n) {
        return Err(Error::InvalidParameter(format!(
            "hessian quotient needs l < k <= n, got k={k}, l={l}, n={n}"
        )));
    }
    Ok(OperatorSpec::HessianQuotient { n, k, l })
}

pub fn negative_control(n: usize) -> OperatorSpec {
    OperatorSpec::MaxEntry { n }
}

/// Operators shipped for use with the solver: they satisfy the structural
/// conditions. `sigma_k^{1/k}` for `1 < k < n` fills the gap between the two means.
pub fn shipped_zoo(n: usize) -> Vec<OperatorSpec> {
    let mut zoo = vec![OperatorSpec::GeometricMean { n }, OperatorSpec::ArithmeticMean { n }];
    zoo.extend((2..n).map(|k| OperatorSpec::HessianQuotient { n, k, l: 0 }));
    zoo
}

impl OperatorSpec {
    pub fn name(&self) -> String {
        match *self {
            OperatorSpec::GeometricMean { n } => format!("qma(n={n})"),
            OperatorSpec::ArithmeticMean { n } => format!("laplacian(n={n})"),
            OperatorSpec::HessianQuotient { n, k, l } => format!("sigma{k}/sigma{l}(n={n})"),
            OperatorSpec::MaxEntry { n } => format!("max-entry(n={n})"),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            OperatorSpec::GeometricMean { n }
            | OperatorSpec::ArithmeticMean { n }
            | OperatorSpec::HessianQuotient { n, .. }
            | OperatorSpec::MaxEntry { n } => n,
        }
    }

    pub fn in_cone(&self, lam: &[f64]) -> bool {
        if lam.len() != self.dim() || lam.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match *self {
            OperatorSpec::GeometricMean { .. } | OperatorSpec::MaxEntry { .. } => lam.iter().all(|&v| v > 0.0),
            OperatorSpec::ArithmeticMean { .. } => lam.iter().sum::<f64>() > 0.0,
            OperatorSpec::HessianQuotient { k, .. } => elementary_symmetric(lam)[1..=k].iter().all(|&s| s > 0.0),
        }
    }

    fn ensure_in_cone(&self, lam: &[f64]) -> Result<()> {
        if self.in_cone(lam) {
            Ok(())
        } else {
            Err(Error::OutsideCone {
                operator: self.name(),
                lambda: lam.to_vec(),
            })
        }
    }

    /// `sup { t : lam - t (1,...,1) in Gamma }`; positive exactly inside the cone.
    pub fn cone_margin(&self, lam: &[f64]) -> f64 {
        let min = lam.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = lam.iter().sum::<f64>() / lam.len() as f64;
        match *self {
            OperatorSpec::GeometricMean { .. } | OperatorSpec::MaxEntry { .. } => min,
            OperatorSpec::ArithmeticMean { .. } => mean,
            OperatorSpec::HessianQuotient { .. } => {
                // Gamma_k lies between the orthant and the half-space
                let (mut lo, mut hi) = (min, mean);
                let shifted = |t: f64| lam.iter().map(|v| v - t).collect::<Vec<_>>();
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.in_cone(&shifted(mid)) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    }

    pub fn value(&self, lam: &[f64]) -> Result<f64> {
        self.ensure_in_cone(lam)?;
        Ok(self.value_unchecked(lam))
    }

    pub(crate) fn value_unchecked(&self, lam: &[f64]) -> f64 {
        let n = lam.len() as f64;
        match *self {
            OperatorSpec::GeometricMean { .. } => (lam.iter().map(|v| v.ln()).sum::<f64>() / n).exp(),
            OperatorSpec::ArithmeticMean { .. } => lam.iter().sum::<f64>() / n,
            OperatorSpec::HessianQuotient { n, k, l } => {
                let e = elementary_symmetric(lam);
                let q = (e[k] / binomial(n, k)) / (e[l] / binomial(n, l));
                q.powf(1.0 / (k - l) as f64)
            }
            OperatorSpec::MaxEntry { .. } => lam.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn gradient(&self, lam: &[f64]) -> Result<Vec<f64>> {
        self.ensure_in_cone(lam)?;
        Ok(self.gradient_unchecked(lam))
    }

    pub(crate) fn gradient_unchecked(&self, lam: &[f64]) -> Vec<f64> {
        let dim = lam.len();
        match *self {
            OperatorSpec::GeometricMean { n } => {
                let f = self.value_unchecked(lam);
                lam.iter().map(|&v| f / (n as f64 * v)).collect()
            }
            OperatorSpec::ArithmeticMean { n } => vec![1.0 / n as f64; dim],
            OperatorSpec::HessianQuotient { k, l, .. } => {
                let f = self.value_unchecked(lam);
                let e = elementary_symmetric(lam);
                (0..dim)
                    .map(|i| {
                        let rest = elementary_symmetric(&without(lam, i));
                        let dk = rest[k - 1] / e[k];
                        let dl = if l == 0 { 0.0 } else { rest[l - 1] / e[l] };
                        f / (k - l) as f64 * (dk - dl)
                    })
                    .collect()
            }
            OperatorSpec::MaxEntry { .. } => {
                let arg = (0..dim)
                    .max_by(|&a, &b| lam[a].total_cmp(&lam[b]).then(b.cmp(&a)))
                    .unwrap_or(0);
                (0..dim).map(|i| if i == arg { 1.0 } else { 0.0 }).collect()
            }
        }
    }

    /// `gamma`: the product of the partials at `(1, ..., 1)`.
    pub fn gamma(&self) -> f64 {
        self.gradient_unchecked(&vec![1.0; self.dim()]).iter().product()
    }
}

/// Coefficients `(d f / d lambda_i) / f` of the linearized operator `L_f(phi)`.
pub fn linearization_coeffs(spec: &OperatorSpec, lam: &EigTuple) -> Result<Vec<f64>> {
    let f = spec.value(lam.values())?;
    Ok(spec.gradient(lam.values())?.iter().map(|g| g / f).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Violation {
    Normalization,
    ConeBounds,
    Positivity,
    Euler,
    Homogeneity,
    Symmetry,
    LowerBound,
    Gradient,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub kind: Violation,
    pub lambda: Vec<f64>,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct StructuralReport {
    pub operator: String,
    pub samples: usize,
    pub gamma: f64,
    pub min_gradient_product: f64,
    pub max_euler_error: f64,
    pub max_symmetry_error: f64,
    pub max_gradient_error: f64,
    pub violations: Vec<(Violation, usize)>,
    pub witness: Option<Witness>,
}

impl StructuralReport {
    pub fn passes(&self) -> bool {
        self.witness.is_none()
    }

    pub fn count(&self, kind: Violation) -> usize {
        self.violations
            .iter()
            .find(|(k, _)| *k == kind)
            .map_or(0, |(_, c)| *c)
    }
}

/// Log-uniform radius times a Dirichlet(1) direction on the simplex; for
/// cones larger than the orthant, half the samples are pushed outside it.
pub fn sample_cone(spec: &OperatorSpec, r: &mut LabRng) -> Vec<f64> {
    let n = spec.dim();
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    let radius = (r.random_range(-100f64.ln()..100f64.ln())).exp();
    let lam: Vec<f64> = e.iter().map(|v| radius * n as f64 * v / total).collect();
    let wide = matches!(
        spec,
        OperatorSpec::ArithmeticMean { .. } | OperatorSpec::HessianQuotient { .. }
    );
    if wide && n > 1 && r.random_bool(0.5) {
        for _ in 0..20 {
            let j = r.random_range(0..n);
            let mut cand = lam.clone();
            cand[j] -= r.random::<f64>() * radius * n as f64;
            if spec.in_cone(&cand) {
                return cand;
            }
        }
    }
    lam
}

/// Randomized verification of normalization, cone bounds, ellipticity,
/// homogeneity, symmetry, the lower bound on `prod d f / d lambda_i` and the
/// analytic gradient.
pub fn check_structural(spec: &OperatorSpec, samples: usize, seed: u64) -> StructuralReport {
    let mut r = rng(seed);
    let n = spec.dim();
    let gamma = spec.gamma();
    let mut rep = StructuralReport {
        operator: spec.name(),
        samples,
        gamma,
        min_gradient_product: f64::INFINITY,
        max_euler_error: 0.0,
        max_symmetry_error: 0.0,
        max_gradient_error: 0.0,
        violations: Vec::new(),
        witness: None,
    };
    let flag = |rep: &mut StructuralReport, kind: Violation, lam: &[f64], detail: String| {
        match rep.violations.iter_mut().find(|(k, _)| *k == kind) {
            Some((_, c)) => *c += 1,
            None => rep.violations.push((kind, 1)),
        }
        if rep.witness.is_none() {
            rep.witness = Some(Witness {
                kind,
                lambda: lam.to_vec(),
                detail,
            });
        }
    };

    let ones = vec![1.0; n];
    match spec.value(&ones) {
        Ok(v) if (v - 1.0).abs() <= 1e-14 => {}
        other => flag(&mut rep, Violation::Normalization, &ones, format!("f(1,...,1) = {other:?}")),
    }

    for _ in 0..samples {
        let lam = sample_cone(spec, &mut r);
        if !spec.in_cone(&lam) || lam.iter().sum::<f64>() <= 0.0 {
            flag(&mut rep, Violation::ConeBounds, &lam, "sample outside {sum > 0} or the cone".into());
            continue;
        }
        // the positive orthant must lie inside the cone
        let orthant: Vec<f64> = lam.iter().map(|v| v.abs() + 1e-300).collect();
        if !spec.in_cone(&orthant) {
            flag(&mut rep, Violation::ConeBounds, &orthant, "orthant point outside cone".into());
        }

        let f = spec.value_unchecked(&lam);
        let grad = spec.gradient_unchecked(&lam);
        if let Some(i) = grad.iter().position(|&g| !(g > 0.0)) {
            flag(&mut rep, Violation::Positivity, &lam, format!("df/dlambda_{i} = {}", grad[i]));
        }

        let euler: f64 = lam.iter().zip(&grad).map(|(l, g)| l * g).sum();
        let euler_err = (euler - f).abs() / f.abs();
        rep.max_euler_error = rep.max_euler_error.max(euler_err);
        if euler_err > 1e-9 {
            flag(&mut rep, Violation::Euler, &lam, format!("relative error {euler_err:.3e}"));
        }

        let t = (r.random_range(-10f64.ln()..10f64.ln())).exp();
        let scaled: Vec<f64> = lam.iter().map(|v| v * t).collect();
        let hom_err = (spec.value_unchecked(&scaled) - t * f).abs() / (t * f).abs();
        if hom_err > 1e-10 {
            flag(&mut rep, Violation::Homogeneity, &lam, format!("relative error {hom_err:.3e}"));
        }

        let mut perm = lam.clone();
        perm.shuffle(&mut r);
        let sym_err = (spec.value_unchecked(&perm) - f).abs() / f.abs();
        rep.max_symmetry_error = rep.max_symmetry_error.max(sym_err);
        if sym_err > 1e-12 {
            flag(&mut rep, Violation::Symmetry, &lam, format!("relative error {sym_err:.3e}"));
        }

        let prod: f64 = grad.iter().product();
        rep.min_gradient_product = rep.min_gradient_product.min(prod);
        if prod < gamma * (1.0 - 1e-8) || !(gamma > 0.0) {
            flag(&mut rep, Violation::LowerBound, &lam, format!("product {prod:.3e} < gamma {gamma:.3e}"));
        }

        // central differences, step shrunk near the cone boundary
        let norm = lam.iter().map(|v| v * v).sum::<f64>().sqrt();
        let h = 1e-5 * norm.min(spec.cone_margin(&lam));
        let gmax = grad.iter().map(|g| g.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for i in 0..n {
            let mut up = lam.clone();
            let mut dn = lam.clone();
            up[i] += h;
            dn[i] -= h;
            let fd = (spec.value_unchecked(&up) - spec.value_unchecked(&dn)) / (2.0 * h);
            let err = (fd - grad[i]).abs() / gmax;
            rep.max_gradient_error = rep.max_gradient_error.max(err);
            if err > 1e-6 {
                flag(&mut rep, Violation::Gradient, &lam, format!("component {i}: fd {fd:.6e} vs {:.6e}", grad[i]));
            }
        }
    }
    rep
}

/// Minimum of `f / (prod lambda_i)^{1/n}` over positive-orthant samples.
/// Values `>= 1` mean `f` dominates the geometric mean.
pub fn check_domination(spec: &OperatorSpec, samples: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let gm = OperatorSpec::GeometricMean { n: spec.dim() };
    let probe = OperatorSpec::GeometricMean { n: spec.dim() };
    (0..samples)
        .map(|_| {
            let lam = sample_cone(&probe, &mut r);
            spec.value_unchecked(&lam) / gm.value_unchecked(&lam)
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercomplex::{decompose, standard_frame};
    use crate::sampling::{random_quat_positive, random_psd};

    #[test]
    fn identity_pencil_gives_ones() {
        let f = standard_frame(3).unwrap();
        let om = HyperhermitianForm::standard(&f);
        let lam = eigenvalues(&om, &om, &f).unwrap();
        assert!(lam.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn block_scaling_gives_its_entries() {
        let f = standard_frame(3).unwrap();
        let c = [0.5, 3.0, 1.5];
        let (_, om_phi) = decompose(&crate::quaternion::QuatMatrix::from_real_diagonal(&c), &f).unwrap();
        let lam = eigenvalues(&om_phi, &HyperhermitianForm::standard(&f), &f).unwrap();
        assert_eq!(lam.values(), &[3.0, 1.5, 0.5]);
    }

    #[test]
    fn pencil_matches_real_generalized_problem() {
        // independent route: real 8x8 Gram matrices, Cholesky and a real
        // symmetric eigensolver; eigenvalues come in quadruples.
        let mut r = rng(21);
        let f = standard_frame(2).unwrap();
        for _ in 0..50 {
            let hq = random_quat_positive(&mut r, 2);
            let hq_phi = random_quat_positive(&mut r, 2);
            let (_, om) = decompose(&hq, &f).unwrap();
            let (_, om_phi) = decompose(&hq_phi, &f).unwrap();
            let lam = eigenvalues(&om_phi, &om, &f).unwrap();

            let g = crate::hypercomplex::real_gram(&hq);
            let g_phi = crate::hypercomplex::real_gram(&hq_phi);
            let l = g.cholesky().unwrap().l();
            let li = l.clone().try_inverse().unwrap();
            let red = &li * g_phi * li.transpose();
            let red = (&red + red.transpose()) * 0.5;
            let mut ev: Vec<f64> = red.symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(|a, b| b.total_cmp(a));
            for (i, v) in lam.values().iter().enumerate() {
                for q in 0..4 {
                    assert!((ev[4 * i + q] - v).abs() < 1e-9 * v.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn pfaffian_ratio_is_eigenvalue_product() {
        let mut r = rng(22);
        for n in 1..=3 {
            let f = standard_frame(n).unwrap();
            let om = HyperhermitianForm::standard(&f);
            for _ in 0..100 {
                let h = random_psd(&mut r, n, 2 * n);
                let hp = crate::comparison::hyperhermitian_part(&h, &f).unwrap();
                let om_phi = HyperhermitianForm::from_hermitian(&hp, &f);
                let lam = eigenvalues(&om_phi, &om, &f).unwrap();
                let ratio = om_phi.pfaffian() / om.pfaffian();
                assert!((ratio - lam.product()).abs() < 1e-9 * ratio.abs());
            }
        }
    }

    #[test]
    fn unpaired_spectrum_is_rejected() {
        assert!(matches!(pair_spectrum(&[1.0, 2.0]), Err(Error::PairingFailure { .. })));
        let (t, gap) = pair_spectrum(&[2.0, 1.0, 1.0, 2.0]).unwrap();
        assert_eq!((t.values(), gap), (&[2.0, 1.0][..], 0.0));
    }

    #[test]
    fn non_positive_base_is_rejected() {
        let f = standard_frame(1).unwrap();
        let om = HyperhermitianForm::standard(&f);
        assert!(matches!(eigenvalues(&om, &om.scale(-1.0), &f), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn qma_values() {
        let f1 = qma_operator(3).unwrap();
        assert_eq!(f1.value(&[1.0, 1.0, 1.0]).unwrap(), 1.0);
        let f2 = qma_operator(2).unwrap();
        assert!((f2.value(&[4.0, 1.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(f2.value(&[4.0, -1.0]), Err(Error::OutsideCone { .. })));
        assert!((f2.gamma() - 0.25).abs() < 1e-15);
        assert!(qma_operator(0).is_err());
    }

    #[test]
    fn euler_relation_against_finite_differences() {
        let mut r = rng(9);
        let spec = qma_operator(3).unwrap();
        for _ in 0..100 {
            let lam = sample_cone(&spec, &mut r);
            let f = spec.value(&lam).unwrap();
            let euler: f64 = (0..3)
                .map(|i| {
                    let h = 1e-5 * lam[i];
                    let mut up = lam.clone();
                    let mut dn = lam.clone();
                    up[i] += h;
                    dn[i] -= h;
                    lam[i] * (spec.value(&up).unwrap() - spec.value(&dn).unwrap()) / (2.0 * h)
                })
                .sum();
            assert!((euler - f).abs() < 1e-8 * f);
            let analytic: f64 = lam.iter().zip(spec.gradient(&lam).unwrap()).map(|(l, g)| l * g).sum();
            assert!((analytic - f).abs() < 1e-10 * f);
        }
    }

    #[test]
    fn shipped_operators_pass_structural_checks() {
        for n in 1..=4 {
            for spec in shipped_zoo(n) {
                let rep = check_structural(&spec, 1000, 17);
                assert!(rep.passes(), "{}: {:?}", spec, rep.witness);
                assert!(rep.min_gradient_product >= (n as f64).powi(-(n as i32)) * (1.0 - 1e-8));
            }
        }
    }

    #[test]
    fn arithmetic_mean_partials() {
        let spec = arithmetic_mean(3).unwrap();
        assert_eq!(spec.gradient(&[5.0, -1.0, 0.5]).unwrap(), vec![1.0 / 3.0; 3]);
        assert!((spec.gamma() - 1.0 / 27.0).abs() < 1e-16);
    }

    #[test]
    fn negative_control_produces_witness() {
        let rep = check_structural(&negative_control(2), 1000, 3);
        let w = rep.witness.clone().expect("max-entry must fail");
        assert_eq!(w.kind, Violation::Positivity);
        assert!(rep.count(Violation::Positivity) > 0);
    }

    #[test]
    fn harmonic_type_quotient_violates_lower_bound() {
        // sigma_2 / sigma_1 at n = 2 is the harmonic mean: prod of partials -> 0
        let spec = hessian_quotient(2, 2, 1).unwrap();
        let rep = check_structural(&spec, 1000, 5);
        assert!(rep.count(Violation::LowerBound) > 0);
        assert!(check_domination(&spec, 200, 1) < 1.0);
    }

    #[test]
    fn sigma_roots_dominate_geometric_mean() {
        for n in 2..=4 {
            for k in 1..=n {
                let spec = hessian_quotient(n, k, 0).unwrap();
                assert!(check_domination(&spec, 500, 2) >= 1.0 - 1e-12);
                assert!((spec.gamma() - (n as f64).powi(-(n as i32))).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn linearization_examples() {
        let spec = qma_operator(3).unwrap();
        let c = linearization_coeffs(&spec, &EigTuple::new(vec![1.0; 3])).unwrap();
        assert!(c.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-15));
        let spec = qma_operator(2).unwrap();
        let c = linearization_coeffs(&spec, &EigTuple::new(vec![4.0, 1.0])).unwrap();
        assert!((c[0] - 0.125).abs() < 1e-15 && (c[1] - 0.5).abs() < 1e-15);
        assert!(linearization_coeffs(&spec, &EigTuple::new(vec![1.0, -1.0])).is_err());
    }

    #[test]
    fn linearization_matches_finite_differences() {
        let mut r = rng(31);
        for spec in shipped_zoo(3) {
            for _ in 0..100 {
                let lam = sample_cone(&spec, &mut r);
                let c = linearization_coeffs(&spec, &EigTuple::new(lam.clone())).unwrap();
                let sorted = EigTuple::new(lam).values().to_vec();
                let h = 1e-6 * spec.cone_margin(&sorted);
                let cmax = c.iter().map(|v| v.abs()).fold(0.0, f64::max);
                for i in 0..3 {
                    let mut up = sorted.clone();
                    let mut dn = sorted.clone();
                    up[i] += h;
                    dn[i] -= h;
                    let fd = (spec.value(&up).unwrap().ln() - spec.value(&dn).unwrap().ln()) / (2.0 * h);
                    assert!((fd - c[i]).abs() < 1e-6 * cmax, "{spec}: {fd} vs {}", c[i]);
                }
                let f = spec.value(&sorted).unwrap();
                let prod: f64 = c.iter().product();
                assert!(prod >= spec.gamma() / f.powi(3) * (1.0 - 1e-8));
            }
        }
    }
}
