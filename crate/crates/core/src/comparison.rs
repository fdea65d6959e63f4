//! Comparison between complex and quaternionic Hessians at a point.
//!
//! Everything is stated on coefficient matrices: the wedge powers of the
//! flat, constant-coefficient forms are determinants (or squared Pfaffians)
//! times `omega_I^{2n}`, with the constant carried by
//! [`volume_constant`](crate::hypercomplex::volume_constant).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::hypercomplex::{pfaffian_complex, volume_constant, HermitianForm, HypercomplexFrame, HyperhermitianForm};
use crate::sampling::{random_psd_any_rank, rng};
use crate::Result;

fn check(alpha: &HermitianForm, frame: &HypercomplexFrame) -> Result<()> {
    frame.check_shape(alpha.matrix().nrows(), alpha.matrix().ncols(), "hermitian form")
}

/// `alpha(J., J.)` as a hermitian matrix: `-S^T conj(A) S`.
pub fn j_pullback(alpha: &HermitianForm, frame: &HypercomplexFrame) -> Result<HermitianForm> {
    check(alpha, frame)?;
    let s = frame.j_conj();
    let pulled = -(s.transpose() * alpha.matrix().map(|z| z.conj()) * s);
    Ok(HermitianForm::from_matrix_symmetrized(alpha.n(), &pulled))
}

/// `alpha - alpha(J., J.)`, the hermitian matrix of `Omega + d d_J phi` when
/// `alpha` is the complex Hessian.
pub fn hyperhermitian_part(alpha: &HermitianForm, frame: &HypercomplexFrame) -> Result<HermitianForm> {
    let beta = j_pullback(alpha, frame)?.scale(-1.0);
    Ok(alpha.add(&beta))
}

/// Antisymmetric coefficients of `d d_J phi = phi_{a bbar} dz_a ^ J^{-1} dzbar_b`
/// built directly from the complex Hessian `A`: `J^{-1} dzbar_b = -sum_c S_bc dz_c`,
/// giving `S^T conj(A) - A S`.
pub fn quaternionic_hessian_coefficients(alpha: &HermitianForm, frame: &HypercomplexFrame) -> Result<DMatrix<Complex64>> {
    check(alpha, frame)?;
    let s = frame.j_conj();
    let a = alpha.matrix();
    Ok(s.transpose() * a.map(|z| z.conj()) - a * s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma31Report {
    pub lhs_det: f64,
    pub rhs_det: f64,
    pub margin: f64,
}

impl Lemma31Report {
    pub fn holds(&self) -> bool {
        self.margin >= -1e-10 * self.rhs_det.max(1.0)
    }
}

/// `det(alpha + beta) >= det(alpha)` with `beta = -alpha(J., J.)`.
pub fn check_lemma31(alpha: &HermitianForm, frame: &HypercomplexFrame) -> Result<Lemma31Report> {
    check(alpha, frame)?;
    alpha.ensure_psd()?;
    let lhs_det = hyperhermitian_part(alpha, frame)?.determinant();
    let rhs_det = alpha.determinant();
    Ok(Lemma31Report {
        lhs_det,
        rhs_det,
        margin: lhs_det - rhs_det,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prop32Report {
    /// `c(n) det(hyperhermitian part)`.
    pub quat_side: f64,
    /// `c(n) det(phi_{a bbar})`.
    pub complex_side: f64,
    pub margin: f64,
    /// `c(n) |Pf(d d_J phi)|^2`, the same density through the Pfaffian.
    pub pfaffian_side: f64,
}

impl Prop32Report {
    pub fn holds(&self) -> bool {
        self.margin >= -1e-10 * self.complex_side.abs().max(1.0)
    }

    pub fn route_relative_error(&self) -> f64 {
        (self.quat_side - self.pfaffian_side).abs() / self.quat_side.abs().max(f64::MIN_POSITIVE)
    }

    /// Routes agree to `1e-9` relative, or both vanish to `1e-12`.
    pub fn routes_agree(&self) -> bool {
        let scale = self.quat_side.abs().max(self.pfaffian_side.abs());
        (self.quat_side - self.pfaffian_side).abs() <= 1e-9 * scale || scale < 1e-12
    }
}

/// Quaternionic versus complex Monge-Ampere density for a plurisubharmonic
/// Hessian `phi_{a bbar}`.
pub fn check_prop32(phi_hessian: &HermitianForm, frame: &HypercomplexFrame) -> Result<Prop32Report> {
    check(phi_hessian, frame)?;
    phi_hessian.ensure_psd()?;
    let c = volume_constant(frame.n())?;
    let quat_side = c * hyperhermitian_part(phi_hessian, frame)?.determinant();
    let complex_side = c * phi_hessian.determinant();
    let pf = pfaffian_complex(&quaternionic_hessian_coefficients(phi_hessian, frame)?);
    Ok(Prop32Report {
        quat_side,
        complex_side,
        margin: quat_side - complex_side,
        pfaffian_side: c * pf.norm_sqr(),
    })
}

/// Outcome of a randomized suite.
#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: String,
    pub n: usize,
    pub total: usize,
    pub passed: usize,
    /// Smallest relative margin seen.
    pub worst_margin: f64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

/// `trials` random PSD forms (random rank) through [`check_lemma31`].
pub fn lemma31_suite(frame: &HypercomplexFrame, trials: usize, seed: u64) -> SuiteReport {
    let mut r = rng(seed);
    let mut rep = SuiteReport {
        name: "lemma31".into(),
        n: frame.n(),
        total: trials,
        worst_margin: f64::INFINITY,
        ..Default::default()
    };
    for t in 0..trials {
        let alpha = random_psd_any_rank(&mut r, frame.n());
        match check_lemma31(&alpha, frame) {
            Ok(report) => {
                rep.worst_margin = rep.worst_margin.min(report.margin / report.rhs_det.max(1.0));
                if report.holds() {
                    rep.passed += 1;
                } else {
                    rep.failures.push(format!("trial {t}: {report:?}"));
                }
            }
            Err(e) => rep.failures.push(format!("trial {t}: {e}")),
        }
    }
    rep
}

/// `trials` random PSD Hessians through [`check_prop32`]; a trial passes when
/// the inequality holds and the determinant and Pfaffian routes agree.
pub fn prop32_suite(frame: &HypercomplexFrame, trials: usize, seed: u64) -> SuiteReport {
    let mut r = rng(seed);
    let mut rep = SuiteReport {
        name: "prop32".into(),
        n: frame.n(),
        total: trials,
        worst_margin: f64::INFINITY,
        ..Default::default()
    };
    for t in 0..trials {
        let hess = random_psd_any_rank(&mut r, frame.n());
        match check_prop32(&hess, frame) {
            Ok(report) => {
                rep.worst_margin = rep.worst_margin.min(report.margin / report.complex_side.abs().max(1.0));
                if report.holds() && report.routes_agree() {
                    rep.passed += 1;
                } else {
                    rep.failures.push(format!("trial {t}: {report:?}"));
                }
            }
            Err(e) => rep.failures.push(format!("trial {t}: {e}")),
        }
    }
    rep
}

/// The `(2,0)`-form of the quaternionic Hessian as a validated hyperhermitian form.
pub fn quaternionic_hessian_form(alpha: &HermitianForm, frame: &HypercomplexFrame) -> Result<HyperhermitianForm> {
    let b = hyperhermitian_part(alpha, frame)?;
    Ok(HyperhermitianForm::from_hermitian(&b, frame))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercomplex::{standard_frame, wedge_volume_ratio};
    use crate::sampling::{random_hermitian, random_psd};

    #[test]
    fn pullback_of_identity() {
        let f = standard_frame(2).unwrap();
        let p = j_pullback(&HermitianForm::identity(2), &f).unwrap();
        assert!(p.max_abs_diff(&HermitianForm::identity(2).scale(-1.0)) < 1e-15);
    }

    #[test]
    fn pullback_of_rank_one_by_hand() {
        // S = [[0,-1],[1,0]]: S^T diag(1,0) S = diag(0,1)
        let f = standard_frame(1).unwrap();
        let alpha = HermitianForm::from_real_diagonal(1, &[1.0, 0.0]).unwrap();
        let beta = j_pullback(&alpha, &f).unwrap().scale(-1.0);
        let expected = HermitianForm::from_real_diagonal(1, &[0.0, 1.0]).unwrap();
        assert!(beta.max_abs_diff(&expected) < 1e-15);
        let hp = hyperhermitian_part(&alpha, &f).unwrap();
        assert!(hp.max_abs_diff(&HermitianForm::identity(1)) < 1e-15);
    }

    #[test]
    fn hyperhermitian_part_of_identity_doubles() {
        let f = standard_frame(3).unwrap();
        let hp = hyperhermitian_part(&HermitianForm::identity(3), &f).unwrap();
        assert!(hp.max_abs_diff(&HermitianForm::identity(3).scale(2.0)) < 1e-15);
    }

    #[test]
    fn pullback_is_signed_involution_and_keeps_hermiticity() {
        let mut r = rng(1);
        let f = standard_frame(2).unwrap();
        for _ in 0..100 {
            let a = random_hermitian(&mut r, 2);
            let once = j_pullback(&a, &f).unwrap().scale(-1.0);
            assert!(HermitianForm::new(2, once.matrix().clone()).is_ok());
            let twice = j_pullback(&once, &f).unwrap().scale(-1.0);
            assert!(twice.max_abs_diff(&a) < 1e-14);
        }
    }

    #[test]
    fn beta_is_psd_and_part_is_j_invariant() {
        let mut r = rng(2);
        let f = standard_frame(2).unwrap();
        for _ in 0..1000 {
            let a = random_psd_any_rank(&mut r, 2);
            let beta = j_pullback(&a, &f).unwrap().scale(-1.0);
            assert!(beta.min_eigenvalue() >= -1e-11 * a.trace().max(1.0));
            let hp = hyperhermitian_part(&a, &f).unwrap();
            let fixed = j_pullback(&hp, &f).unwrap().scale(-1.0);
            assert!(fixed.max_abs_diff(&hp) < 1e-12 * hp.trace().max(1.0));
            assert!(hp.min_eigenvalue() >= a.min_eigenvalue() - 1e-10);
        }
    }

    #[test]
    fn lemma31_examples() {
        let f = standard_frame(1).unwrap();
        let rep = check_lemma31(&HermitianForm::identity(1), &f).unwrap();
        assert!((rep.lhs_det - 4.0).abs() < 1e-14 && (rep.rhs_det - 1.0).abs() < 1e-14);
        assert!((rep.margin - 3.0).abs() < 1e-14);
        let rep = check_lemma31(&HermitianForm::zeros(1), &f).unwrap();
        assert_eq!((rep.lhs_det, rep.rhs_det, rep.margin), (0.0, 0.0, 0.0));
        let bad = HermitianForm::from_real_diagonal(1, &[1.0, -1.0]).unwrap();
        assert!(check_lemma31(&bad, &f).is_err());
    }

    /// Coefficients `e_j` of `det(alpha + t beta) = sum_j e_j t^j` by
    /// interpolation; each is a binomial times a mixed determinant.
    fn mixed_coefficients(alpha: &HermitianForm, beta: &HermitianForm) -> Vec<f64> {
        let m = alpha.matrix().nrows();
        let nodes: Vec<f64> = (0..=m).map(|j| j as f64).collect();
        let vals: Vec<f64> = nodes
            .iter()
            .map(|&t| alpha.add(&beta.scale(t)).determinant())
            .collect();
        let v = DMatrix::from_fn(m + 1, m + 1, |r, c| nodes[r].powi(c as i32));
        let rhs = nalgebra::DVector::from_vec(vals);
        v.lu().solve(&rhs).unwrap().iter().copied().collect()
    }

    #[test]
    fn lemma31_binomial_oracle() {
        let mut r = rng(4);
        for n in 1..=2 {
            let f = standard_frame(n).unwrap();
            for _ in 0..1000 {
                let a = random_psd_any_rank(&mut r, n);
                let beta = j_pullback(&a, &f).unwrap().scale(-1.0);
                let e = mixed_coefficients(&a, &beta);
                let scale = a.add(&beta).determinant().abs().max(1.0);
                assert!(e.iter().all(|&c| c >= -1e-8 * scale), "{e:?}");
                let total: f64 = e.iter().sum();
                assert!(total >= e[0] - 1e-8 * scale);
                let rep = check_lemma31(&a, &f).unwrap();
                assert!(rep.holds());
                assert!((rep.lhs_det - total).abs() <= 1e-7 * scale);
            }
        }
    }

    #[test]
    fn prop32_identity_ratio() {
        for n in 1..=2 {
            let f = standard_frame(n).unwrap();
            let rep = check_prop32(&HermitianForm::identity(n), &f).unwrap();
            let ratio = rep.quat_side / rep.complex_side;
            assert!((ratio - 4f64.powi(n as i32)).abs() < 1e-12);
            assert!(rep.routes_agree());
        }
        let f = standard_frame(1).unwrap();
        let rep = check_prop32(&HermitianForm::zeros(1), &f).unwrap();
        assert_eq!((rep.quat_side, rep.complex_side), (0.0, 0.0));
    }

    #[test]
    fn prop32_three_routes_agree() {
        // determinant, Pfaffian and direct wedge expansion of Omega^n ^ conj(Omega^n)
        let mut r = rng(8);
        for n in 1..=2 {
            let f = standard_frame(n).unwrap();
            for _ in 0..50 {
                let a = random_psd(&mut r, n, 2 * n);
                let rep = check_prop32(&a, &f).unwrap();
                let w = quaternionic_hessian_coefficients(&a, &f).unwrap();
                let wedge = wedge_volume_ratio(&w, &f);
                assert!(wedge.im.abs() < 1e-9 * wedge.re.abs());
                assert!((wedge.re - rep.quat_side).abs() < 1e-9 * rep.quat_side);
                assert!(rep.routes_agree());
            }
        }
    }

    #[test]
    fn suites_pass() {
        for n in 1..=2 {
            let f = standard_frame(n).unwrap();
            let l = lemma31_suite(&f, 300, 7);
            assert!(l.all_passed(), "{:?}", l.failures);
            let p = prop32_suite(&f, 300, 7);
            assert!(p.all_passed(), "{:?}", p.failures);
        }
    }
}
