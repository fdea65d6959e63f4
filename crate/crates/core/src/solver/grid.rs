use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

/// Largest supported number of grid points.
pub const MAX_POINTS: usize = 1 << 22;

/// Uniform grid on the torus `H^n / Z^{4n}` with `N` points per real axis,
/// stored row-major with axis 0 varying slowest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    n: usize,
    points: usize,
    len: usize,
}

impl TorusGrid {
    pub fn new(n: usize, points_per_axis: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if points_per_axis < 8 || points_per_axis % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and at least 8, got {points_per_axis}"
            )));
        }
        let len = (0..4 * n)
            .try_fold(1usize, |acc, _| acc.checked_mul(points_per_axis))
            .filter(|&l| l <= MAX_POINTS)
            .ok_or_else(|| {
                Error::InvalidGrid(format!("{points_per_axis}^{} points exceeds {MAX_POINTS}", 4 * n))
            })?;
        Ok(Self {
            n,
            points: points_per_axis,
            len,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn axes(&self) -> usize {
        4 * self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.points as f64
    }

    fn stride(&self, axis: usize) -> usize {
        self.points.pow((self.axes() - 1 - axis) as u32)
    }

    /// Integer coordinate of point `index` along `axis`.
    pub fn digit(&self, index: usize, axis: usize) -> usize {
        (index / self.stride(axis)) % self.points
    }

    pub fn coordinate(&self, index: usize, axis: usize) -> f64 {
        self.digit(index, axis) as f64 * self.spacing()
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        (0..self.axes()).map(|a| self.coordinate(index, a)).collect()
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &d| acc * self.points + d % self.points)
    }

    /// Signed wavenumber of FFT bin `j`; the Nyquist bin maps to `-N/2`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        if j < self.points / 2 {
            j as f64
        } else {
            j as f64 - self.points as f64
        }
    }

    /// Multiplier of `d^2 / dx_r dx_s` at a mode with wavenumbers `k`.
    /// Mixed derivatives drop the Nyquist component so they stay real.
    pub fn second_derivative_multiplier(&self, k: &[f64], r: usize, s: usize) -> f64 {
        let nyquist = -(self.points as f64) / 2.0;
        if r == s {
            -4.0 * PI * PI * k[r] * k[r]
        } else if k[r] == nyquist || k[s] == nyquist {
            0.0
        } else {
            -4.0 * PI * PI * k[r] * k[s]
        }
    }

    /// Multiplier of `d^2 / dz_a dzbar_b`, where `z_c = x_{2c} + i x_{2c+1}`.
    pub fn complex_hessian_multiplier(&self, k: &[f64], a: usize, b: usize) -> Complex64 {
        let m = |r, s| self.second_derivative_multiplier(k, r, s);
        Complex64::new(
            0.25 * (m(2 * a, 2 * b) + m(2 * a + 1, 2 * b + 1)),
            0.25 * (m(2 * a, 2 * b + 1) - m(2 * a + 1, 2 * b)),
        )
    }

    /// Calls `visit(mode_index, wavenumbers)` for every mode in storage order.
    pub fn for_each_mode(&self, mut visit: impl FnMut(usize, &[f64])) {
        let d = self.axes();
        let mut digits = vec![0usize; d];
        let mut k = vec![0.0; d];
        for idx in 0..self.len {
            for (kk, &dg) in k.iter_mut().zip(&digits) {
                *kk = self.wavenumber(dg);
            }
            visit(idx, &k);
            for ax in (0..d).rev() {
                digits[ax] += 1;
                if digits[ax] < self.points {
                    break;
                }
                digits[ax] = 0;
            }
        }
    }
}

/// Real samples of a function on a [`TorusGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: TorusGrid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape {
                expected: format!("{} grid values", grid.len()),
                got: values.len().to_string(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value at grid point {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: TorusGrid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f` at every grid point; `f` receives the `4n` coordinates in `[0, 1)`.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut x = vec![0.0; grid.axes()];
        let values = (0..grid.len())
            .map(|i| {
                for (a, xa) in x.iter_mut().enumerate() {
                    *xa = grid.coordinate(i, a);
                }
                f(&x)
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn argmin(&self) -> usize {
        (0..self.values.len())
            .min_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))
            .unwrap_or(0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// One inverse transform of the streamed complex Hessian.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HessianPart {
    /// The field holds `D_aa + i D_bb`; both are real.
    Diagonal(usize, usize),
    /// The field holds `D_ab` for `a < b`.
    Off(usize, usize),
}

/// FFT plans and spectral differentiation on one grid.
pub struct Spectral {
    grid: TorusGrid,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(grid: TorusGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            fft: planner.plan_fft_forward(grid.points_per_axis()),
            ifft: planner.plan_fft_inverse(grid.points_per_axis()),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    fn transform(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.points_per_axis();
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        let mut line = vec![Complex64::default(); n];
        for axis in 0..self.grid.axes() {
            let stride = self.grid.stride(axis);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            for block in data.chunks_exact_mut(n * stride) {
                for inner in 0..stride {
                    for (j, l) in line.iter_mut().enumerate() {
                        *l = block[j * stride + inner];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, l) in line.iter().enumerate() {
                        block[j * stride + inner] = *l;
                    }
                }
            }
        }
    }

    /// Unnormalized forward transform.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fft);
    }

    /// Inverse transform including the `1/len` factor.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.ifft);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }

    pub fn to_spectrum(&self, values: &[f64]) -> Vec<Complex64> {
        let mut hat: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut hat);
        hat
    }

    /// `d^2 f / dx_r dx_s` of a real field.
    pub fn second_derivative(&self, values: &[f64], r: usize, s: usize) -> Vec<f64> {
        let mut hat = self.to_spectrum(values);
        self.grid
            .for_each_mode(|i, k| hat[i] *= self.grid.second_derivative_multiplier(k, r, s));
        self.inverse(&mut hat);
        hat.iter().map(|v| v.re).collect()
    }

    /// Streams the complex Hessian `phi_{a bbar}` of a real field given its
    /// spectrum, one inverse transform per [`HessianPart`].
    pub fn complex_hessian_parts(&self, hat: &[Complex64], mut visit: impl FnMut(HessianPart, &[Complex64])) {
        let m = 2 * self.grid.n();
        let mut buf = vec![Complex64::default(); hat.len()];
        for a in (0..m).step_by(2) {
            let b = a + 1;
            self.grid.for_each_mode(|i, k| {
                let da = self.grid.complex_hessian_multiplier(k, a, a).re;
                let db = self.grid.complex_hessian_multiplier(k, b, b).re;
                buf[i] = hat[i] * Complex64::new(da, db);
            });
            self.inverse(&mut buf);
            visit(HessianPart::Diagonal(a, b), &buf);
        }
        for a in 0..m {
            for b in a + 1..m {
                self.grid
                    .for_each_mode(|i, k| buf[i] = hat[i] * self.grid.complex_hessian_multiplier(k, a, b));
                self.inverse(&mut buf);
                visit(HessianPart::Off(a, b), &buf);
            }
        }
    }

    /// Full complex Hessian, point-major: entry `(a, b)` of point `p` sits at
    /// `p * m * m + a * m + b` with `m = 2n`.
    pub fn complex_hessian(&self, values: &[f64]) -> Vec<Complex64> {
        let m = 2 * self.grid.n();
        let mut out = vec![Complex64::default(); values.len() * m * m];
        let hat = self.to_spectrum(values);
        self.complex_hessian_parts(&hat, |part, f| match part {
            HessianPart::Diagonal(a, b) => {
                for (p, v) in f.iter().enumerate() {
                    out[p * m * m + a * m + a] = Complex64::new(v.re, 0.0);
                    out[p * m * m + b * m + b] = Complex64::new(v.im, 0.0);
                }
            }
            HessianPart::Off(a, b) => {
                for (p, v) in f.iter().enumerate() {
                    out[p * m * m + a * m + b] = *v;
                    out[p * m * m + b * m + a] = v.conj();
                }
            }
        });
        out
    }

    /// Solves `symbol(k) u_hat = r_hat` on nonzero modes; the mean of `u` is zero.
    pub fn solve_symbol(&self, rhs: &[f64], symbol: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let mut hat = self.to_spectrum(rhs);
        self.grid.for_each_mode(|i, k| {
            hat[i] = if i == 0 { Complex64::default() } else { hat[i] / symbol(k) };
        });
        self.inverse(&mut hat);
        hat.iter().map(|v| v.re).collect()
    }
}
