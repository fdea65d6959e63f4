//! Per-point eigenvalues and linearization coefficients of `g + g_phi`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::operators::OperatorSpec;

/// Partner index and sign of the `J`-conjugation matrix `S` on `C^{2n}`.
fn s_entry(i: usize) -> (usize, f64) {
    if i % 2 == 0 {
        (i + 1, 1.0)
    } else {
        (i - 1, -1.0)
    }
}

/// `Id + A + S^T conj(A) S`: the metric matrix perturbed by the hyperhermitian
/// part of the complex Hessian `A`.
pub(crate) fn perturbed_metric(a: &[Complex64], m: usize, out: &mut [Complex64]) {
    for i in 0..m {
        let (si, gi) = s_entry(i);
        for j in 0..m {
            let (sj, gj) = s_entry(j);
            let id = if i == j { 1.0 } else { 0.0 };
            out[i * m + j] = a[i * m + j] + a[si * m + sj].conj() * (gi * gj) + id;
        }
    }
}

/// Eigenvalues, pairing gap and the coefficient matrix `K` with
/// `d log f = 2 Re tr(K dA)` at one point. Returns `None` outside the cone.
pub(crate) fn evaluate_point(
    spec: &OperatorSpec,
    a: &[Complex64],
    lam: &mut [f64],
    coeff: &mut [Complex64],
) -> Option<(f64, f64)> {
    let n = lam.len();
    let m = 2 * n;
    let mut g = vec![Complex64::default(); m * m];
    perturbed_metric(a, m, &mut g);
    if n == 1 {
        let (p, q, w) = (g[0].re, g[3].re, g[1]);
        let mean = 0.5 * (p + q);
        let r = (0.25 * (p - q) * (p - q) + w.norm_sqr()).sqrt();
        lam[0] = mean;
        if !spec.in_cone(lam) {
            return None;
        }
        let f = spec.value_unchecked(lam);
        let c = spec.gradient_unchecked(lam)[0] / f;
        coeff.copy_from_slice(&[Complex64::new(0.5 * c, 0.0), Complex64::default(), Complex64::default(), Complex64::new(0.5 * c, 0.0)]);
        let radius = mean.abs() + r;
        let gap = if radius > 0.0 { 2.0 * r / radius } else { 0.0 };
        return Some((gap, f.ln()));
    }
    let eig = DMatrix::from_row_slice(m, m, &g).symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let radius = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut gap = 0.0f64;
    for (i, pair) in order.chunks_exact(2).enumerate() {
        let (lo, hi) = (eig.eigenvalues[pair[0]], eig.eigenvalues[pair[1]]);
        gap = gap.max(hi - lo);
        lam[i] = 0.5 * (lo + hi);
    }
    if !spec.in_cone(lam) {
        return None;
    }
    let f = spec.value_unchecked(lam);
    let grad = spec.gradient_unchecked(lam);
    coeff.iter_mut().for_each(|c| *c = Complex64::default());
    for (i, pair) in order.chunks_exact(2).enumerate() {
        let w = 0.5 * grad[i] / f;
        for &col in pair {
            let u = eig.eigenvectors.column(col);
            for r in 0..m {
                for s in 0..m {
                    coeff[r * m + s] += u[r] * u[s].conj() * w;
                }
            }
        }
    }
    Some((if radius > 0.0 { gap / radius } else { 0.0 }, f.ln()))
}

/// Pointwise data of the operator at one iterate.
pub(crate) struct Evaluation {
    /// `n` eigenvalues per point, in pair order.
    pub lam: Vec<f64>,
    pub log_f: Vec<f64>,
    /// `K` per point, `m * m` row-major.
    pub coeff: Vec<Complex64>,
    pub max_gap: f64,
    pub first_outside: Option<usize>,
}

pub(crate) fn evaluate_field(spec: &OperatorSpec, hessian: &[Complex64], n: usize) -> Evaluation {
    let m = 2 * n;
    let len = hessian.len() / (m * m);
    let mut lam = vec![f64::NAN; len * n];
    let mut log_f = vec![f64::NAN; len];
    let mut coeff = vec![Complex64::default(); len * m * m];
    let mut gaps = vec![0.0; len];
    lam.par_chunks_mut(n)
        .zip(coeff.par_chunks_mut(m * m))
        .zip(log_f.par_iter_mut())
        .zip(gaps.par_iter_mut())
        .zip(hessian.par_chunks(m * m))
        .for_each(|((((l, c), lf), gap), a)| match evaluate_point(spec, a, l, c) {
            Some((g, v)) => {
                *gap = g;
                *lf = v;
            }
            None => *gap = f64::NAN,
        });
    let first_outside = gaps.iter().position(|g| g.is_nan());
    let max_gap = gaps.iter().copied().filter(|g| !g.is_nan()).fold(0.0, f64::max);
    Evaluation {
        lam,
        log_f,
        coeff,
        max_gap,
        first_outside,
    }
}
