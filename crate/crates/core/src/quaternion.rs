//! Real quaternions stored as their `1, i, j, k` coefficients.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion {
    pub re: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    /// The basis `1, i, j, k` in coefficient order.
    pub const BASIS: [Quaternion; 4] = [Self::ONE, Self::I, Self::J, Self::K];

    pub const fn new(re: f64, i: f64, j: f64, k: f64) -> Self {
        Self { re, i, j, k }
    }

    pub fn real(re: f64) -> Self {
        Self::new(re, 0.0, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.i, -self.j, -self.k)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn coeffs(self) -> [f64; 4] {
        [self.re, self.i, self.j, self.k]
    }

    pub fn from_coeffs(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn scale(self, t: f64) -> Self {
        Self::new(self.re * t, self.i * t, self.j * t, self.k * t)
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        let d = self - other;
        d.re.abs().max(d.i.abs()).max(d.j.abs()).max(d.k.abs())
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.i + o.i, self.j + o.j, self.k + o.k)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.i - o.i, self.j - o.j, self.k - o.k)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.i, -self.j, -self.k)
    }
}

/// Hamilton product (`ij = k`).
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re - self.i * o.i - self.j * o.j - self.k * o.k,
            self.re * o.i + self.i * o.re + self.j * o.k - self.k * o.j,
            self.re * o.j - self.i * o.k + self.j * o.re + self.k * o.i,
            self.re * o.k + self.i * o.j - self.j * o.i + self.k * o.re,
        )
    }
}

/// Dense `n x n` quaternion matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct QuatMatrix {
    n: usize,
    data: Vec<Quaternion>,
}

impl QuatMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Quaternion::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for a in 0..n {
            m[(a, a)] = Quaternion::ONE;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (a, &c) in diag.iter().enumerate() {
            m[(a, a)] = Quaternion::real(c);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// First `(row, col)` with `H[col][row] != conj(H[row][col])` beyond `tol`.
    pub fn first_non_hermitian(&self, tol: f64) -> Option<(usize, usize)> {
        for r in 0..self.n {
            for c in r..self.n {
                if self[(c, r)].max_abs_diff(self[(r, c)].conj()) > tol {
                    return Some((r, c));
                }
            }
        }
        None
    }

    pub fn max_abs_diff(&self, other: &QuatMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.max_abs_diff(*b))
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for QuatMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.data[r * self.n + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QuatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.data[r * self.n + c]
    }
}
