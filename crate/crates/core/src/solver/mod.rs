//! Spectral Newton solver for `f(lambda(phi)) = e^{F + b}` on the flat torus
//! `H^n / Z^{4n}` with the standard hyperhermitian metric.
//!
//! `lambda(phi)` are the eigenvalues of `Id + H(phi)`, where `H(phi)` is the
//! hyperhermitian part of the complex Hessian `phi_{a bbar}`. With this
//! normalization `phi = 1/2 sum c_i |q_i|^2` has eigenvalues `1 + c_i`, and for
//! `n = 1` the equation reads `1 + Delta phi / 4 = e^{F + b}`.

mod gmres;
mod grid;
pub mod io;
mod pointwise;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::comparison::hyperhermitian_part;
use crate::hypercomplex::{HermitianForm, HypercomplexFrame};
use crate::operators::OperatorSpec;
use crate::{Error, Result};

pub use grid::{HessianPart, ScalarField, Spectral, TorusGrid, MAX_POINTS};

/// Largest accepted `max e^F / min e^F` unless forced.
pub const DYNAMIC_RANGE_LIMIT: f64 = 1e6;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub force: bool,
    pub linear_tol: f64,
    pub max_linear_iters: usize,
    pub restart: usize,
    /// Smallest line-search step before giving up.
    pub min_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 30,
            force: false,
            linear_tol: 1e-10,
            max_linear_iters: 200,
            restart: 20,
            min_step: 1.0 / 1024.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    /// Solution shifted so that `sup phi = 0`.
    pub phi: ScalarField,
    pub b: f64,
    pub residual_inf: f64,
    pub newton_iters: usize,
    /// Smallest distance of `lambda(phi)` to the cone boundary, along `(1,...,1)`.
    pub min_eig_margin: f64,
    /// Largest relative gap inside an eigenvalue pair, over all accepted iterates.
    pub max_pair_gap: f64,
    pub residual_history: Vec<f64>,
    pub linear_iters: usize,
    /// Largest relative residual left by a Krylov solve.
    pub worst_linear_residual: f64,
}

/// Pointwise forward evaluation of the operator at `phi`.
#[derive(Clone, Debug)]
pub struct ForwardEval {
    /// `n` eigenvalues per grid point.
    pub lambda: Vec<f64>,
    pub log_f: Vec<f64>,
    pub max_pair_gap: f64,
}

impl ForwardEval {
    pub fn lambda_at(&self, point: usize, n: usize) -> &[f64] {
        &self.lambda[point * n..(point + 1) * n]
    }
}

fn check_dims(spec: &OperatorSpec, grid: &TorusGrid) -> Result<()> {
    if spec.dim() != grid.n() {
        return Err(Error::InvalidParameter(format!(
            "operator {} on a grid with n = {}",
            spec.name(),
            grid.n()
        )));
    }
    Ok(())
}

struct Context<'a> {
    spec: &'a OperatorSpec,
    spectral: Spectral,
    n: usize,
}

impl Context<'_> {
    fn evaluate(&self, phi: &[f64]) -> Result<pointwise::Evaluation> {
        let hess = self.spectral.complex_hessian(phi);
        let ev = pointwise::evaluate_field(self.spec, &hess, self.n);
        if ev.max_gap > crate::operators::PAIRING_TOLERANCE {
            return Err(Error::PairingFailure {
                gap: ev.max_gap,
                tolerance: crate::operators::PAIRING_TOLERANCE,
            });
        }
        Ok(ev)
    }

    /// `L[v] = 2 Re sum K_ba D_ab[v]`.
    fn linearized(&self, coeff: &[Complex64], v: &[f64]) -> Vec<f64> {
        let m = 2 * self.n;
        let mut out = vec![0.0; v.len()];
        let hat = self.spectral.to_spectrum(v);
        self.spectral.complex_hessian_parts(&hat, |part, f| match part {
            HessianPart::Diagonal(a, b) => {
                for (p, d) in f.iter().enumerate() {
                    let k = &coeff[p * m * m..];
                    out[p] += 2.0 * (k[a * m + a].re * d.re + k[b * m + b].re * d.im);
                }
            }
            HessianPart::Off(a, b) => {
                for (p, d) in f.iter().enumerate() {
                    out[p] += 4.0 * (coeff[p * m * m + b * m + a] * d).re;
                }
            }
        });
        out
    }

    /// Symbol of the constant-coefficient operator with grid-averaged `K`.
    fn averaged_symbol(&self, coeff: &[Complex64]) -> impl Fn(&[f64]) -> f64 + '_ {
        let m = 2 * self.n;
        let points = coeff.len() / (m * m);
        let mut avg = vec![Complex64::default(); m * m];
        for chunk in coeff.chunks_exact(m * m) {
            avg.iter_mut().zip(chunk).for_each(|(a, c)| *a += c);
        }
        avg.iter_mut().for_each(|a| *a /= points as f64);
        let grid = *self.spectral.grid();
        move |k: &[f64]| {
            let mut s = 0.0;
            for a in 0..m {
                for b in 0..m {
                    s += 2.0 * (avg[b * m + a] * grid.complex_hessian_multiplier(k, a, b)).re;
                }
            }
            s
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn l2_norm(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

/// Checks the `e^F` dynamic range guard.
pub fn check_dynamic_range(f: &ScalarField) -> Result<f64> {
    let range = (f.sup() - f.inf()).exp();
    if range > DYNAMIC_RANGE_LIMIT {
        return Err(Error::DynamicRange {
            range,
            limit: DYNAMIC_RANGE_LIMIT,
        });
    }
    Ok(range)
}

/// Solves `f(lambda(phi)) = e^{F + b}` starting from `phi = 0`.
pub fn solve(spec: &OperatorSpec, f: &ScalarField, opts: &SolveOptions) -> Result<SolveResult> {
    solve_from(spec, f, opts, None)
}

/// Damped Newton on `G(phi, b) = log f(lambda(phi)) - F - b` with mean-zero
/// `phi`, optionally warm-started. The result is shifted to `sup phi = 0`.
pub fn solve_from(
    spec: &OperatorSpec,
    f: &ScalarField,
    opts: &SolveOptions,
    start: Option<&ScalarField>,
) -> Result<SolveResult> {
    let grid = *f.grid();
    check_dims(spec, &grid)?;
    if !opts.force {
        check_dynamic_range(f)?;
    }
    let ctx = Context {
        spec,
        spectral: Spectral::new(grid),
        n: grid.n(),
    };
    let fv = f.values();

    let mut phi = match start {
        Some(s) if s.grid() == &grid => {
            let mean = s.mean();
            s.values().iter().map(|v| v - mean).collect()
        }
        Some(s) => {
            return Err(Error::InvalidGrid(format!(
                "warm start on {:?} but right-hand side on {:?}",
                s.grid(),
                grid
            )))
        }
        None => vec![0.0; grid.len()],
    };
    let mut ev = ctx.evaluate(&phi)?;
    if let Some(p) = ev.first_outside {
        return Err(Error::OutsideCone {
            operator: spec.name(),
            lambda: ev.lam[p * ctx.n..(p + 1) * ctx.n].to_vec(),
        });
    }
    let mut b = match start {
        // exact for linear problems: integrating 1 + Delta phi / 4 = e^{F+b}
        None => -(fv.iter().map(|v| v.exp()).sum::<f64>() / fv.len() as f64).ln(),
        Some(_) => ev.log_f.iter().zip(fv).map(|(l, x)| l - x).sum::<f64>() / fv.len() as f64,
    };
    let residual = |ev: &pointwise::Evaluation, b: f64| -> Vec<f64> {
        ev.log_f.iter().zip(fv).map(|(l, x)| l - x - b).collect()
    };
    let mut g = residual(&ev, b);
    let mut history = vec![inf_norm(&g)];
    let mut max_gap = ev.max_gap;
    let mut iters = 0;
    let mut linear_iters = 0;
    let mut worst_linear = 0.0f64;

    while inf_norm(&g) > opts.tol {
        if iters == opts.max_iters {
            return Err(Error::NonConvergence {
                iterations: iters,
                residual: inf_norm(&g),
                reason: "Newton iteration limit reached".into(),
            });
        }
        iters += 1;
        let symbol = ctx.averaged_symbol(&ev.coeff);
        let precond = |r: &[f64]| -> (Vec<f64>, f64) {
            let mean = r.iter().sum::<f64>() / r.len() as f64;
            let centered: Vec<f64> = r.iter().map(|v| v - mean).collect();
            (ctx.spectral.solve_symbol(&centered, &symbol), -mean)
        };
        let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let out = gmres::gmres(
            |r| {
                let (dphi, db) = precond(r);
                ctx.linearized(&ev.coeff, &dphi).into_iter().map(|v| v - db).collect()
            },
            &rhs,
            opts.linear_tol,
            opts.restart,
            opts.max_linear_iters,
        );
        linear_iters += out.iterations;
        worst_linear = worst_linear.max(out.relative_residual);
        let (dphi, db) = precond(&out.x);

        let g_norm = l2_norm(&g);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = phi.iter().zip(&dphi).map(|(p, d)| p + t * d).collect();
            let trial_b = b + t * db;
            let trial_ev = ctx.evaluate(&trial)?;
            if trial_ev.first_outside.is_none() {
                let trial_g = residual(&trial_ev, trial_b);
                if l2_norm(&trial_g) <= (1.0 - 1e-4 * t) * g_norm || inf_norm(&trial_g) <= opts.tol {
                    phi = trial;
                    b = trial_b;
                    ev = trial_ev;
                    g = trial_g;
                    break;
                }
            }
            t *= 0.5;
            if t < opts.min_step {
                return Err(Error::NonConvergence {
                    iterations: iters,
                    residual: inf_norm(&g),
                    reason: "line search hit the damping floor".into(),
                });
            }
        }
        max_gap = max_gap.max(ev.max_gap);
        history.push(inf_norm(&g));
    }

    let sup = phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    phi.iter_mut().for_each(|v| *v -= sup);
    let min_eig_margin = ev
        .lam
        .chunks_exact(ctx.n)
        .map(|l| spec.cone_margin(l))
        .fold(f64::INFINITY, f64::min);
    Ok(SolveResult {
        phi: ScalarField::new(grid, phi)?,
        b,
        residual_inf: inf_norm(&g),
        newton_iters: iters,
        min_eig_margin,
        max_pair_gap: max_gap,
        residual_history: history,
        linear_iters,
        worst_linear_residual: worst_linear,
    })
}

/// Eigenvalues and `log f` at every grid point of `phi`.
pub fn forward(spec: &OperatorSpec, phi: &ScalarField) -> Result<ForwardEval> {
    let grid = *phi.grid();
    check_dims(spec, &grid)?;
    let ctx = Context {
        spec,
        spectral: Spectral::new(grid),
        n: grid.n(),
    };
    let ev = ctx.evaluate(phi.values())?;
    if let Some(p) = ev.first_outside {
        return Err(Error::OutsideCone {
            operator: spec.name(),
            lambda: ev.lam[p * ctx.n..(p + 1) * ctx.n].to_vec(),
        });
    }
    Ok(ForwardEval {
        lambda: ev.lam,
        log_f: ev.log_f,
        max_pair_gap: ev.max_gap,
    })
}

/// Complex Hessian `phi_{a bbar}` at every grid point.
pub fn complex_hessian_field(phi: &ScalarField) -> Vec<HermitianForm> {
    let n = phi.grid().n();
    let m = 2 * n;
    let flat = Spectral::new(*phi.grid()).complex_hessian(phi.values());
    flat.chunks_exact(m * m)
        .map(|c| HermitianForm::from_matrix_symmetrized(n, &DMatrix::from_row_slice(m, m, c)))
        .collect()
}

/// Perturbation matrix of `g_phi` at every grid point: the hyperhermitian
/// part of the complex Hessian.
pub fn quaternionic_hessian_field(phi: &ScalarField, frame: &HypercomplexFrame) -> Result<Vec<HermitianForm>> {
    if frame.n() != phi.grid().n() {
        return Err(Error::InvalidParameter("frame and grid dimensions differ".into()));
    }
    complex_hessian_field(phi)
        .iter()
        .map(|h| hyperhermitian_part(h, frame))
        .collect()
}

/// Complex Hessian of a function with constant real Hessian `hess` (`4n x 4n`),
/// computed directly from its entries.
pub fn complex_hessian_from_real(hess: &DMatrix<f64>, frame: &HypercomplexFrame) -> Result<HermitianForm> {
    let d = frame.real_dim();
    if hess.shape() != (d, d) {
        return Err(Error::Shape {
            expected: format!("real Hessian {d}x{d}"),
            got: format!("{}x{}", hess.nrows(), hess.ncols()),
        });
    }
    let m = frame.complex_dim();
    let a = DMatrix::from_fn(m, m, |a, b| {
        Complex64::new(
            0.25 * (hess[(2 * a, 2 * b)] + hess[(2 * a + 1, 2 * b + 1)]),
            0.25 * (hess[(2 * a, 2 * b + 1)] - hess[(2 * a + 1, 2 * b)]),
        )
    });
    Ok(HermitianForm::from_matrix_symmetrized(frame.n(), &a))
}

/// Perturbation matrix of the quadratic patch `phi = 1/2 sum c_i |q_i|^2`.
pub fn quadratic_patch_perturbation(c: &[f64], frame: &HypercomplexFrame) -> Result<HermitianForm> {
    if c.len() != frame.n() {
        return Err(Error::Shape {
            expected: format!("{} coefficients", frame.n()),
            got: c.len().to_string(),
        });
    }
    let hess = DMatrix::from_fn(frame.real_dim(), frame.real_dim(), |r, s| if r == s { c[r / 4] } else { 0.0 });
    hyperhermitian_part(&complex_hessian_from_real(&hess, frame)?, frame)
}

#[derive(Clone, Debug, PartialEq)]
pub struct L1Report {
    /// Grid quadrature of `|phi|` on the unit-volume torus.
    pub l1_norm: f64,
    /// `min sum_i lambda_i` over the grid; nonnegative when the trace
    /// inequality `sum (lambda_i - 1) >= -n` holds.
    pub laplacian_lower_bound_margin: f64,
}

impl L1Report {
    pub fn holds(&self) -> bool {
        self.laplacian_lower_bound_margin >= 0.0
    }
}

pub fn l1_check(spec: &OperatorSpec, result: &SolveResult) -> Result<L1Report> {
    let n = spec.dim();
    let fw = forward(spec, &result.phi)?;
    let margin = fw
        .lambda
        .chunks_exact(n)
        .map(|l| l.iter().sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    let vals = result.phi.values();
    Ok(L1Report {
        l1_norm: vals.iter().map(|v| v.abs()).sum::<f64>() / vals.len() as f64,
        laplacian_lower_bound_margin: margin,
    })
}
