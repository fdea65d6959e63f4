use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::frame::HypercomplexFrame;
use super::pfaffian::pfaffian_complex;
use crate::quaternion::{QuatMatrix, Quaternion};
use crate::{Error, Result};

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Coefficient matrix of a real `(1,1)`-form in the standard `I`-holomorphic frame.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    n: usize,
    a: DMatrix<Complex64>,
}

impl HermitianForm {
    /// Validates hermiticity to `1e-12` relative to the largest entry.
    pub fn new(n: usize, a: DMatrix<Complex64>) -> Result<Self> {
        let m = 2 * n;
        if a.nrows() != m || a.ncols() != m {
            return Err(Error::Shape {
                expected: format!("{m}x{m}"),
                got: format!("{}x{}", a.nrows(), a.ncols()),
            });
        }
        let tol = 1e-12 * max_abs(&a).max(1.0);
        for r in 0..m {
            for c in r..m {
                if (a[(r, c)] - a[(c, r)].conj()).norm() > tol {
                    return Err(Error::NotHermitian { row: r, col: c });
                }
            }
        }
        Ok(Self { n, a })
    }

    /// Symmetrizes `(A + A*)/2`; for matrices that are hermitian up to rounding.
    pub fn from_matrix_symmetrized(n: usize, a: &DMatrix<Complex64>) -> Self {
        let a = (a + a.adjoint()).scale(0.5);
        Self { n, a }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            a: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: DMatrix::zeros(2 * n, 2 * n),
        }
    }

    pub fn from_real_diagonal(n: usize, diag: &[f64]) -> Result<Self> {
        if diag.len() != 2 * n {
            return Err(Error::Shape {
                expected: format!("{} diagonal entries", 2 * n),
                got: diag.len().to_string(),
            });
        }
        let a = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Ok(Self { n, a })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.a
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.a
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            n: self.n,
            a: self.a.scale(t),
        }
    }

    pub fn add(&self, other: &HermitianForm) -> Self {
        Self {
            n: self.n,
            a: &self.a + &other.a,
        }
    }

    pub fn trace(&self) -> f64 {
        self.a.diagonal().iter().map(|z| z.re).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.a.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// PSD up to `-1e-12 * trace`.
    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue() >= -1e-12 * self.trace().max(0.0)
    }

    pub fn ensure_psd(&self) -> Result<()> {
        if self.is_psd() {
            Ok(())
        } else {
            Err(Error::NotPositive {
                min_eigenvalue: self.min_eigenvalue(),
            })
        }
    }

    /// Determinant by LU factorization (real for hermitian input).
    pub fn determinant(&self) -> f64 {
        self.a.clone().determinant().re
    }

    /// Value `z(x)^* A z(y)` of the sesquilinear form `hbar`.
    pub fn evaluate(&self, x: &DVector<f64>, y: &DVector<f64>, frame: &HypercomplexFrame) -> Complex64 {
        let zx = frame.to_complex(x);
        let zy = frame.to_complex(y);
        (zx.adjoint() * &self.a * zy)[(0, 0)]
    }

    pub fn max_abs_diff(&self, other: &HermitianForm) -> f64 {
        max_abs(&(&self.a - &other.a))
    }
}

/// Coefficient matrix of a `(2,0)`-form `Omega`: antisymmetric and `J`-real.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperhermitianForm {
    n: usize,
    w: DMatrix<Complex64>,
}

impl HyperhermitianForm {
    /// Validates antisymmetry and `J`-reality (`S^T conj(W) S = W`).
    pub fn new(w: DMatrix<Complex64>, frame: &HypercomplexFrame) -> Result<Self> {
        frame.check_shape(w.nrows(), w.ncols(), "(2,0) coefficient matrix")?;
        let tol = 1e-12 * max_abs(&w).max(1.0);
        let m = w.nrows();
        for r in 0..m {
            for c in r..m {
                if (w[(r, c)] + w[(c, r)]).norm() > tol {
                    return Err(Error::Shape {
                        expected: "antisymmetric matrix".into(),
                        got: format!("W[{r},{c}] + W[{c},{r}] != 0"),
                    });
                }
            }
        }
        let s = frame.j_conj();
        let deviation = max_abs(&(s.transpose() * w.map(|z| z.conj()) * s - &w));
        if deviation > tol {
            return Err(Error::NotJReal { deviation });
        }
        Ok(Self { n: frame.n(), w })
    }

    /// `Omega = hbar(J., .)`, i.e. `W = S^T A`.
    pub fn from_hermitian(h: &HermitianForm, frame: &HypercomplexFrame) -> Self {
        let w = frame.j_conj().transpose() * h.matrix();
        Self { n: h.n(), w }
    }

    /// The flat standard form (`hbar = Id`).
    pub fn standard(frame: &HypercomplexFrame) -> Self {
        Self::from_hermitian(&HermitianForm::identity(frame.n()), frame)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &DMatrix<Complex64> {
        &self.w
    }

    /// The associated hermitian matrix `A = S W`.
    pub fn to_hermitian(&self, frame: &HypercomplexFrame) -> HermitianForm {
        HermitianForm::from_matrix_symmetrized(self.n, &(frame.j_conj() * &self.w))
    }

    /// Pfaffian of the coefficient matrix; real for `J`-real forms.
    pub fn pfaffian(&self) -> f64 {
        pfaffian_complex(&self.w).re
    }

    pub fn pfaffian_complex(&self) -> Complex64 {
        pfaffian_complex(&self.w)
    }

    /// `Omega(x, y) = z(x)^T W z(y)`.
    pub fn evaluate(&self, x: &DVector<f64>, y: &DVector<f64>, frame: &HypercomplexFrame) -> Complex64 {
        let zx = frame.to_complex(x);
        let zy = frame.to_complex(y);
        (zx.transpose() * &self.w * zy)[(0, 0)]
    }

    /// `Omega(X, XJ) >= 0` for all `X`, decided through the associated hermitian matrix.
    pub fn is_positive(&self, frame: &HypercomplexFrame) -> bool {
        self.to_hermitian(frame).is_psd()
    }

    pub fn scale(&self, t: f64) -> Self {
        Self {
            n: self.n,
            w: self.w.scale(t),
        }
    }
}

/// Real Gram matrix of `g(x, y) = Re(x H y^*)` in the real coordinates of `H^n`.
pub fn real_gram(h: &QuatMatrix) -> DMatrix<f64> {
    let n = h.dim();
    DMatrix::from_fn(4 * n, 4 * n, |r, c| {
        let (a, s) = (r / 4, r % 4);
        let (b, t) = (c / 4, c % 4);
        (Quaternion::BASIS[s] * h[(a, b)] * Quaternion::BASIS[t].conj()).re
    })
}

fn hermitian_from_gram(g: &DMatrix<f64>) -> DMatrix<Complex64> {
    let m = g.nrows() / 2;
    DMatrix::from_fn(m, m, |a, b| Complex64::new(g[(2 * a, 2 * b)], g[(2 * a + 1, 2 * b)]))
}

fn gram_from_hermitian(a: &DMatrix<Complex64>) -> DMatrix<f64> {
    let m = a.nrows();
    DMatrix::from_fn(2 * m, 2 * m, |r, c| {
        let v = a[(r / 2, c / 2)];
        match (r % 2, c % 2) {
            (0, 0) | (1, 1) => v.re,
            (0, 1) => -v.im,
            _ => v.im,
        }
    })
}

/// Splits a quaternion-hermitian matrix into `hbar + j Omega`.
pub fn decompose(h: &QuatMatrix, frame: &HypercomplexFrame) -> Result<(HermitianForm, HyperhermitianForm)> {
    if h.dim() != frame.n() {
        return Err(Error::Shape {
            expected: format!("{n}x{n} quaternion matrix", n = frame.n()),
            got: format!("{n}x{n}", n = h.dim()),
        });
    }
    let scale = (0..h.dim())
        .flat_map(|a| (0..h.dim()).map(move |b| (a, b)))
        .map(|ab| h[ab].norm_sqr().sqrt())
        .fold(1.0, f64::max);
    if let Some((row, col)) = h.first_non_hermitian(1e-12 * scale) {
        return Err(Error::NotQuaternionHermitian { row, col });
    }
    let a = hermitian_from_gram(&real_gram(h));
    let hbar = HermitianForm::from_matrix_symmetrized(frame.n(), &a);
    let omega = HyperhermitianForm::from_hermitian(&hbar, frame);
    Ok((hbar, omega))
}

/// Inverse of [`decompose`].
pub fn recompose(hbar: &HermitianForm, omega: &HyperhermitianForm, frame: &HypercomplexFrame) -> Result<QuatMatrix> {
    frame.check_shape(hbar.matrix().nrows(), hbar.matrix().ncols(), "hermitian matrix")?;
    let expected = HyperhermitianForm::from_hermitian(hbar, frame);
    let dev = max_abs(&(expected.coefficients() - omega.coefficients()));
    if dev > 1e-12 * max_abs(hbar.matrix()).max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "Omega is not hbar(J., .) (deviation {dev:.3e})"
        )));
    }
    let g = gram_from_hermitian(hbar.matrix());
    let n = frame.n();
    let mut h = QuatMatrix::zeros(n);
    for a in 0..n {
        for b in 0..n {
            h[(a, b)] = Quaternion::from_coeffs([
                g[(4 * a, 4 * b)],
                g[(4 * a, 4 * b + 1)],
                g[(4 * a, 4 * b + 2)],
                g[(4 * a, 4 * b + 3)],
            ]);
        }
    }
    Ok(h)
}
