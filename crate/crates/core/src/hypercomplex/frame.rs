use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

/// Standard `I, J, K` on flat `R^{4n}` together with the identification
/// `R^{4n} = C^{2n}` diagonalizing `I`.
#[derive(Clone, Debug)]
pub struct HypercomplexFrame {
    n: usize,
    i_mat: DMatrix<f64>,
    j_mat: DMatrix<f64>,
    k_mat: DMatrix<f64>,
    /// `2n x 4n`, `z = P x`.
    complex_basis: DMatrix<Complex64>,
    /// `S` with `z(Jx) = S conj(z(x))`.
    j_conj: DMatrix<Complex64>,
}

/// Maximum absolute deviations from the defining identities.
#[derive(Clone, Copy, Debug)]
pub struct FrameDefects {
    pub i_squared: f64,
    pub j_squared: f64,
    pub k_squared: f64,
    pub ijk: f64,
    /// `I(Jv) + i Jv` over the `(1,0)`-eigenbasis of `I`.
    pub j_swaps_types: f64,
    /// `E^T E - Id` for `E` in `I, J, K`: the euclidean metric is `E`-invariant.
    pub metric: f64,
}

impl FrameDefects {
    pub fn max(&self) -> f64 {
        [
            self.i_squared,
            self.j_squared,
            self.k_squared,
            self.ijk,
            self.j_swaps_types,
            self.metric,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

// Left multiplication by i, j, k on the coefficients (1, i, j, k) of one quaternion.
const LEFT_I: [[f64; 4]; 4] = [
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
];
const LEFT_J: [[f64; 4]; 4] = [
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
];
const LEFT_K: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
];

fn block_diagonal(n: usize, block: &[[f64; 4]; 4]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(4 * n, 4 * n);
    for q in 0..n {
        for r in 0..4 {
            for c in 0..4 {
                m[(4 * q + r, 4 * q + c)] = block[r][c];
            }
        }
    }
    m
}

/// The standard flat hypercomplex structure of quaternionic dimension `n`.
pub fn standard_frame(n: usize) -> Result<HypercomplexFrame> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let m = 2 * n;
    let mut complex_basis = DMatrix::zeros(m, 2 * m);
    let mut j_conj = DMatrix::zeros(m, m);
    for c in 0..m {
        complex_basis[(c, 2 * c)] = Complex64::new(1.0, 0.0);
        complex_basis[(c, 2 * c + 1)] = Complex64::new(0.0, 1.0);
    }
    for q in 0..n {
        j_conj[(2 * q, 2 * q + 1)] = Complex64::new(-1.0, 0.0);
        j_conj[(2 * q + 1, 2 * q)] = Complex64::new(1.0, 0.0);
    }
    Ok(HypercomplexFrame {
        n,
        i_mat: block_diagonal(n, &LEFT_I),
        j_mat: block_diagonal(n, &LEFT_J),
        k_mat: block_diagonal(n, &LEFT_K),
        complex_basis,
        j_conj,
    })
}

impl HypercomplexFrame {
    /// Quaternionic dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Complex dimension `2n`.
    pub fn complex_dim(&self) -> usize {
        2 * self.n
    }

    pub fn real_dim(&self) -> usize {
        4 * self.n
    }

    pub fn i_mat(&self) -> &DMatrix<f64> {
        &self.i_mat
    }

    pub fn j_mat(&self) -> &DMatrix<f64> {
        &self.j_mat
    }

    pub fn k_mat(&self) -> &DMatrix<f64> {
        &self.k_mat
    }

    pub fn complex_basis(&self) -> &DMatrix<Complex64> {
        &self.complex_basis
    }

    /// The matrix `S` of `J` in complex coordinates (real, orthogonal, `S^2 = -Id`).
    pub fn j_conj(&self) -> &DMatrix<Complex64> {
        &self.j_conj
    }

    pub fn to_complex(&self, x: &DVector<f64>) -> DVector<Complex64> {
        DVector::from_fn(self.complex_dim(), |c, _| Complex64::new(x[2 * c], x[2 * c + 1]))
    }

    pub fn to_real(&self, z: &DVector<Complex64>) -> DVector<f64> {
        DVector::from_fn(self.real_dim(), |r, _| {
            let v = z[r / 2];
            if r % 2 == 0 {
                v.re
            } else {
                v.im
            }
        })
    }

    pub fn check_shape(&self, rows: usize, cols: usize, what: &str) -> Result<()> {
        let m = self.complex_dim();
        if rows != m || cols != m {
            return Err(Error::Shape {
                expected: format!("{what} {m}x{m}"),
                got: format!("{rows}x{cols}"),
            });
        }
        Ok(())
    }

    pub fn defects(&self) -> FrameDefects {
        let d = self.real_dim();
        let id = DMatrix::<f64>::identity(d, d);
        let dev = |m: DMatrix<f64>| m.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let (i, j, k) = (&self.i_mat, &self.j_mat, &self.k_mat);

        let ic = i.map(|v| Complex64::new(v, 0.0));
        let jc = j.map(|v| Complex64::new(v, 0.0));
        let mut swap = 0.0f64;
        for c in 0..self.complex_dim() {
            // (1,0) eigenvector of I: e_{2c} - i e_{2c+1}
            let mut v = DVector::<Complex64>::zeros(d);
            v[2 * c] = Complex64::new(1.0, 0.0);
            v[2 * c + 1] = Complex64::new(0.0, -1.0);
            let jv = &jc * &v;
            let r = &ic * &jv + jv.map(|x| x * Complex64::i());
            swap = swap.max(r.iter().map(|x| x.norm()).fold(0.0, f64::max));
        }

        FrameDefects {
            i_squared: dev(i * i + &id),
            j_squared: dev(j * j + &id),
            k_squared: dev(k * k + &id),
            ijk: dev(i * j * k + &id),
            j_swaps_types: swap,
            metric: dev(i.transpose() * i - &id)
                .max(dev(j.transpose() * j - &id))
                .max(dev(k.transpose() * k - &id)),
        }
    }
}
