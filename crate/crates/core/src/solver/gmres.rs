//! Restarted GMRES with Givens rotations.

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `A x = b` from `x = 0` until `|b - A x| <= tol |b|`.
pub(crate) fn gmres(
    mut apply: impl FnMut(&[f64]) -> Vec<f64>,
    b: &[f64],
    tol: f64,
    restart: usize,
    max_iterations: usize,
) -> GmresOutcome {
    let len = b.len();
    let bnorm = norm(b);
    let mut x = vec![0.0; len];
    if bnorm == 0.0 {
        return GmresOutcome {
            x,
            iterations: 0,
            relative_residual: 0.0,
        };
    }
    let mut iterations = 0;
    let mut r = b.to_vec();
    let mut beta = bnorm;
    while iterations < max_iterations && beta > tol * bnorm {
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h: Vec<Vec<f64>> = Vec::new();
        let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
        let mut g = vec![beta];
        for j in 0..restart {
            iterations += 1;
            let mut w = apply(&basis[j]);
            let mut col = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                col[i] = dot(&w, v);
                w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= col[i] * vi);
            }
            col[j + 1] = norm(&w);
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            let rho = col[j].hypot(col[j + 1]);
            let (c, s) = if rho == 0.0 { (1.0, 0.0) } else { (col[j] / rho, col[j + 1] / rho) };
            cs.push(c);
            sn.push(s);
            let next_norm = col[j + 1];
            col[j] = rho;
            col[j + 1] = 0.0;
            g.push(-s * g[j]);
            g[j] *= c;
            h.push(col);
            let done = g[j + 1].abs() <= tol * bnorm || iterations >= max_iterations || next_norm == 0.0;
            if !done {
                basis.push(w.iter().map(|v| v / next_norm).collect());
            }
            if done || j + 1 == restart {
                break;
            }
        }
        let k = h.len();
        let mut y = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|l| h[l][i] * y[l]).sum();
            y[i] = (g[i] - s) / h[i][i];
        }
        for (yi, v) in y.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += yi * vi);
        }
        let ax = apply(&x);
        r = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        beta = norm(&r);
    }
    GmresOutcome {
        x,
        iterations,
        relative_residual: beta / bnorm,
    }
}
