//! Test functions `u_s`, the smoothing family `tau_k`, the masses `A_{s,k}`
//! and a radial Dirichlet solver for the auxiliary complex Monge-Ampere
//! equation, used to measure the constant in `-u_s <= eps (-psi)^{2n/(2n+1)}`.
//!
//! Volumes are Lebesgue measure on `C^{2n}` and the Monge-Ampere measure of
//! `psi` is `det(psi_{a bbar}) dvol`. In `s = |z|^2` the volume element is
//! `pi^m s^{m-1} / (m-1)! ds` with `m = 2n`.

use std::f64::consts::PI;

use crate::solver::{ScalarField, TorusGrid};
use crate::{Error, Result};

/// `tau_k(x) = (x + sqrt(x^2 + k^-2)) / 2`: smooth, positive, decreasing in
/// `k` and converging to `max(x, 0)`.
pub fn tau(k: f64, x: f64) -> f64 {
    let e = 1.0 / k;
    let root = x.hypot(e);
    if x >= 0.0 {
        0.5 * (x + root)
    } else {
        0.5 * e * e / (root - x)
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|v| v as f64).product()
}

/// `dV / ds` for radial functions of `s = |z|^2` on `C^m`.
pub fn volume_density(m: usize, s: f64) -> f64 {
    PI.powi(m as i32) * s.powi(m as i32 - 1) / factorial(m - 1)
}

/// `A_s = int_{|z|^2 < 2s} (s - |z|^2 / 2) dvol` on `C^m`.
pub fn model_mass_limit(m: usize, s: f64) -> f64 {
    PI.powi(m as i32) * 2f64.powi(m as i32) * s.powi(m as i32 + 1) / factorial(m + 1)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    for i in 0..order {
        let mut t = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for j in 2..=order {
                let p2 = ((2 * j - 1) as f64 * t * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            if order == 1 {
                p0 = 1.0;
            }
            dp = order as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// Composite Gauss-Legendre quadrature of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(10);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let mid = a + (p as f64 + 0.5) * h;
            x.iter().zip(&w).map(|(xi, wi)| wi * f(mid + 0.5 * h * xi)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Ball `B(z0, 2r)` in flat `H^n`, resolved radially on `s in [0, (2r)^2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallModel {
    n: usize,
    r: f64,
    center: Vec<f64>,
    nodes: usize,
}

impl BallModel {
    pub fn new(n: usize, r: f64, center: Vec<f64>, nodes: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        if !(r > 0.0 && r <= 0.5) {
            return Err(Error::InvalidParameter(format!("ball radius r must lie in (0, 1/2], got {r}")));
        }
        if center.len() != 4 * n {
            return Err(Error::Shape {
                expected: format!("{} center coordinates", 4 * n),
                got: center.len().to_string(),
            });
        }
        if nodes < 16 {
            return Err(Error::InvalidParameter(format!("need at least 16 radial nodes, got {nodes}")));
        }
        Ok(Self { n, r, center, nodes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn complex_dim(&self) -> usize {
        2 * self.n
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    /// `s` on the boundary sphere.
    pub fn outer_s(&self) -> f64 {
        4.0 * self.r * self.r
    }

    /// Admissible `s` lie in `(0, s_max)`.
    pub fn s_max(&self) -> f64 {
        2.0 * self.r * self.r
    }

    pub fn check_s(&self, s: f64) -> Result<()> {
        if s > 0.0 && s < self.s_max() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("s = {s} outside (0, {})", self.s_max())))
        }
    }

    /// Radial nodes on `[0, outer_s]` with `breakpoint` as an exact node.
    pub fn radial_nodes(&self, breakpoint: f64) -> Vec<f64> {
        let sb = self.outer_s();
        let bp = breakpoint.clamp(0.0, sb);
        let inner = ((self.nodes as f64 * bp / sb).round() as usize).clamp(1, self.nodes - 2);
        let outer = self.nodes - 1 - inner;
        let mut s: Vec<f64> = (0..inner).map(|i| bp * i as f64 / inner as f64).collect();
        s.extend((0..=outer).map(|i| bp + (sb - bp) * i as f64 / outer as f64));
        *s.last_mut().expect("nonempty") = sb;
        s
    }
}

/// Points of a ball with their data: squared distance to the center, `phi`
/// and `log` of the density `e^{2nF}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallSample {
    pub sq_dist: Vec<f64>,
    pub phi: Vec<f64>,
    pub log_density: Vec<f64>,
    /// Points of the outer shell, where `u_s > 0` is required.
    pub boundary: Vec<bool>,
}

impl BallSample {
    /// Constant `phi` and `F` sampled at radial nodes; the last node is the boundary.
    pub fn model(nodes: &[f64]) -> Self {
        let mut boundary = vec![false; nodes.len()];
        if let Some(b) = boundary.last_mut() {
            *b = true;
        }
        Self {
            sq_dist: nodes.to_vec(),
            phi: vec![0.0; nodes.len()],
            log_density: vec![0.0; nodes.len()],
            boundary,
        }
    }

    /// Grid points of a torus field within distance `2r` of the argmin of `phi`,
    /// using minimum-image coordinates. The shell is the outermost grid layer.
    pub fn torus_patch(ball: &BallModel, phi: &ScalarField, f: &ScalarField) -> Result<Self> {
        let grid: &TorusGrid = phi.grid();
        if f.grid() != grid || grid.n() != ball.n() {
            return Err(Error::InvalidGrid("phi, F and ball dimensions differ".into()));
        }
        let z0 = grid.point(phi.argmin());
        let radius = 2.0 * ball.r();
        let shell = radius - grid.spacing();
        let phi0 = phi.inf();
        let mut out = Self {
            sq_dist: Vec::new(),
            phi: Vec::new(),
            log_density: Vec::new(),
            boundary: Vec::new(),
        };
        for p in 0..grid.len() {
            let d2: f64 = grid
                .point(p)
                .iter()
                .zip(&z0)
                .map(|(x, c)| {
                    let d = x - c;
                    let d = d - d.round();
                    d * d
                })
                .sum();
            if d2 <= radius * radius {
                out.sq_dist.push(d2);
                out.phi.push(phi.values()[p] - phi0);
                out.log_density.push(2.0 * grid.n() as f64 * f.values()[p]);
                out.boundary.push(d2.sqrt() > shell);
            }
        }
        Ok(out)
    }
}

/// `u_s = phi - phi(z0) + |z - z0|^2 / 2 - s`, with `phi` already relative to
/// its value at the center. Fails unless `u_s > 0` on the boundary shell.
pub fn u_s(ball: &BallModel, sample: &BallSample, s: f64) -> Result<Vec<f64>> {
    ball.check_s(s)?;
    let u: Vec<f64> = sample
        .phi
        .iter()
        .zip(&sample.sq_dist)
        .map(|(p, d2)| p + 0.5 * d2 - s)
        .collect();
    let min_boundary = boundary_margin(sample, &u);
    if !(min_boundary > 0.0) {
        return Err(Error::BoundaryNotPositive { min_boundary });
    }
    Ok(u)
}

/// Smallest value of `u` on the boundary shell.
pub fn boundary_margin(sample: &BallSample, u: &[f64]) -> f64 {
    u.iter()
        .zip(&sample.boundary)
        .filter(|(_, &b)| b)
        .map(|(v, _)| *v)
        .fold(f64::INFINITY, f64::min)
}

/// `A_{s,k}` for the model (`phi`, `F` constant), by quadrature with a
/// breakpoint at `|z|^2 = 2s`. `k = None` gives the limit `A_s`.
pub fn model_mass(ball: &BallModel, s: f64, k: Option<f64>) -> f64 {
    let m = ball.complex_dim();
    let w = |x: f64| match k {
        Some(k) => tau(k, x),
        None => x.max(0.0),
    };
    let f = |sig: f64| w(s - 0.5 * sig) * volume_density(m, sig);
    integrate(f, 0.0, 2.0 * s, 400) + integrate(f, 2.0 * s, ball.outer_s(), 400)
}

/// `int m t^{m-1} g(t) dt` over `[a, b]` for `g` linear between `ga` and `gb`.
fn linear_moment(m: usize, a: f64, b: f64, ga: f64, gb: f64) -> f64 {
    let mi = m as i32;
    let beta = (gb - ga) / (b - a);
    let alpha = ga - beta * a;
    alpha * (b.powi(mi) - a.powi(mi)) + beta * m as f64 / (m as f64 + 1.0) * (b.powi(mi + 1) - a.powi(mi + 1))
}

/// `int g dvol` for a radial piecewise-linear `g` on the nodes.
pub fn radial_mass(m: usize, nodes: &[f64], g: &[f64]) -> f64 {
    let total: f64 = (1..nodes.len())
        .map(|i| linear_moment(m, nodes[i - 1], nodes[i], g[i - 1], g[i]))
        .sum();
    PI.powi(m as i32) / factorial(m) * total
}

/// Radial solution `psi(z) = u(|z|^2)` of `det(psi_{a bbar}) = g`, `psi = 0` on the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub m: usize,
    pub s: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub ddu: Vec<f64>,
}

impl RadialProfile {
    /// Monge-Ampere mass `(pi^m / m!) s_b^m u'(s_b)^m`.
    pub fn mass(&self) -> f64 {
        let sb = *self.s.last().expect("nonempty");
        let mi = self.m as i32;
        PI.powi(mi) / factorial(self.m) * sb.powi(mi) * self.du.last().expect("nonempty").powi(mi)
    }

    /// Smallest of `u'` and `u' + s u''` over the nodes; nonnegative for a
    /// plurisubharmonic profile.
    pub fn psh_margin(&self) -> f64 {
        self.du
            .iter()
            .zip(&self.ddu)
            .zip(&self.s)
            .map(|((d, dd), s)| d.min(d + s * dd))
            .fold(f64::INFINITY, f64::min)
    }

    /// Cubic Hermite interpolation of `u`.
    pub fn value_at(&self, s: f64) -> f64 {
        let last = self.s.len() - 1;
        let i = match self.s.partition_point(|&x| x <= s) {
            0 => 0,
            p if p > last => last - 1,
            p => p - 1,
        };
        let (a, b) = (self.s[i], self.s[i + 1]);
        let h = b - a;
        let t = ((s - a) / h).clamp(0.0, 1.0);
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.u[i]
            + (t3 - 2.0 * t2 + t) * h * self.du[i]
            + (-2.0 * t3 + 3.0 * t2) * self.u[i + 1]
            + (t3 - t2) * h * self.du[i + 1]
    }
}

/// Integrates `d/ds [s^m u'^m] = m s^{m-1} g` with `g` piecewise linear on
/// `nodes` (starting at 0), `u = 0` at the last node.
pub fn radial_cma_dirichlet(nodes: &[f64], g: &[f64], m: usize) -> Result<RadialProfile> {
    if m == 0 {
        return Err(Error::ZeroDimension);
    }
    if nodes.len() < 2 || nodes.len() != g.len() {
        return Err(Error::Shape {
            expected: format!("{} right-hand side values (at least 2)", nodes.len()),
            got: g.len().to_string(),
        });
    }
    if nodes[0] != 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) || !nodes.iter().all(|s| s.is_finite()) {
        return Err(Error::InvalidParameter("radial nodes must start at 0 and increase".into()));
    }
    if let Some(i) = g.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "right-hand side is not integrable: value {} at s = {}",
            g[i], nodes[i]
        )));
    }
    if let Some(i) = g.iter().position(|&v| v < 0.0) {
        return Err(Error::InvalidParameter(format!("negative right-hand side {} at s = {}", g[i], nodes[i])));
    }
    let mi = m as i32;
    let inv = 1.0 / m as f64;
    let len = nodes.len();
    let mut cumulative = 0.0;
    let mut du = vec![g[0].powf(inv); len];
    let mut ddu = vec![0.0; len];
    for i in 1..len {
        cumulative += linear_moment(m, nodes[i - 1], nodes[i], g[i - 1], g[i]);
        let s = nodes[i];
        du[i] = (cumulative / s.powi(mi)).max(0.0).powf(inv);
        if du[i] > 0.0 {
            ddu[i] = (g[i] - du[i].powi(mi)) / (s * du[i].powi(mi - 1));
        }
    }
    // limit at the origin for smooth g: u'' = g'(0) g(0)^{1/m - 1} / (m + 1)
    if g[0] > 0.0 {
        let slope = (g[1] - g[0]) / nodes[1];
        ddu[0] = slope * g[0].powf(inv - 1.0) / (m as f64 + 1.0);
    }
    let mut u = vec![0.0; len];
    for i in (0..len - 1).rev() {
        let h = nodes[i + 1] - nodes[i];
        let step = 0.5 * h * (du[i] + du[i + 1]) + h * h / 12.0 * (ddu[i] - ddu[i + 1]);
        u[i] = u[i + 1] - step;
    }
    Ok(RadialProfile {
        m,
        s: nodes.to_vec(),
        u,
        du,
        ddu,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClaimReport {
    /// Smallest `C` with `(-u_s)^{2n+1} <= C A_{s,k} (-psi)^{2n}` on `{u_s < 0}`.
    pub c_empirical: f64,
    pub sublevel_points: usize,
}

pub fn verify_claim(u_s: &[f64], psi: &[f64], a_sk: f64, n: usize) -> Result<ClaimReport> {
    if u_s.len() != psi.len() {
        return Err(Error::Shape {
            expected: format!("{} values of psi", u_s.len()),
            got: psi.len().to_string(),
        });
    }
    if !(a_sk > 0.0) {
        return Err(Error::InvalidParameter(format!("A_sk must be positive, got {a_sk}")));
    }
    let m = 2 * n as i32;
    let mut c = 0.0f64;
    let mut count = 0;
    for (&u, &p) in u_s.iter().zip(psi) {
        if u < 0.0 {
            if !(p < 0.0) {
                return Err(Error::AuxiliaryNonNegative { value: p });
            }
            count += 1;
            c = c.max((-u).powi(m + 1) / ((-p).powi(m) * a_sk));
        }
    }
    if !c.is_finite() {
        return Err(Error::InvalidParameter("claim constant is not finite".into()));
    }
    Ok(ClaimReport {
        c_empirical: c,
        sublevel_points: count,
    })
}

/// Where the comparison is run.
#[derive(Clone, Debug)]
pub enum ClaimInstance {
    /// `phi` and `F` constant, every quantity radial.
    Model,
    /// Grid points around the minimum of a solved torus instance.
    Patch { phi: ScalarField, f: ScalarField },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClaimRow {
    pub s: f64,
    pub k: f64,
    pub a_sk: f64,
    pub c_empirical: f64,
    /// Smallest `u_s` on the boundary shell.
    pub min_margin: f64,
    pub mass: f64,
    pub psh_margin: f64,
}

/// Runs the comparison at one `(s, k)`. `rhs_scale` multiplies `e^{2nF}`.
pub fn claim_row(ball: &BallModel, instance: &ClaimInstance, s: f64, k: f64, rhs_scale: f64) -> Result<ClaimRow> {
    if !(k >= 1.0) || !(rhs_scale > 0.0) {
        return Err(Error::InvalidParameter(format!("need k >= 1 and a positive scale, got k = {k}, scale = {rhs_scale}")));
    }
    let m = ball.complex_dim();
    let nodes = ball.radial_nodes(2.0 * s);
    let (sample, g_raw, a_sk) = match instance {
        ClaimInstance::Model => {
            let sample = BallSample::model(&nodes);
            let g: Vec<f64> = nodes.iter().map(|sig| rhs_scale * tau(k, s - 0.5 * sig)).collect();
            (sample, g, rhs_scale * model_mass(ball, s, Some(k)))
        }
        ClaimInstance::Patch { phi, f } => {
            let sample = BallSample::torus_patch(ball, phi, f)?;
            let u = u_s(ball, &sample, s)?;
            let g = symmetrize(&nodes, &sample, &u, k, rhs_scale);
            let a = radial_mass(m, &nodes, &g);
            (sample, g, a)
        }
    };
    let u = u_s(ball, &sample, s)?;
    let discrete = radial_mass(m, &nodes, &g_raw);
    let g: Vec<f64> = g_raw.iter().map(|v| v / discrete).collect();
    let psi = radial_cma_dirichlet(&nodes, &g, m)?;
    let psi_at: Vec<f64> = sample.sq_dist.iter().map(|&d| psi.value_at(d)).collect();
    let claim = verify_claim(&u, &psi_at, a_sk, ball.n())?;
    Ok(ClaimRow {
        s,
        k,
        a_sk,
        c_empirical: claim.c_empirical,
        min_margin: boundary_margin(&sample, &u),
        mass: psi.mass(),
        psh_margin: psi.psh_margin(),
    })
}

/// Spherical average of `tau_k(-u_s) e^{2nF}` on the radial nodes, by
/// binning sample points to their nearest node and interpolating empty nodes.
fn symmetrize(nodes: &[f64], sample: &BallSample, u: &[f64], k: f64, scale: f64) -> Vec<f64> {
    let mut sum = vec![0.0; nodes.len()];
    let mut count = vec![0usize; nodes.len()];
    for ((&d, &uu), &ld) in sample.sq_dist.iter().zip(u).zip(&sample.log_density) {
        let p = nodes.partition_point(|&x| x < d).min(nodes.len() - 1);
        let j = if p > 0 && d - nodes[p - 1] < nodes[p] - d { p - 1 } else { p };
        sum[j] += scale * tau(k, -uu) * ld.exp();
        count[j] += 1;
    }
    let filled: Vec<usize> = (0..nodes.len()).filter(|&j| count[j] > 0).collect();
    (0..nodes.len())
        .map(|j| {
            let q = filled.partition_point(|&f| f < j);
            match (q.checked_sub(1).map(|i| filled[i]), filled.get(q).copied()) {
                (_, Some(hi)) if hi == j => sum[j] / count[j] as f64,
                (Some(lo), Some(hi)) => {
                    let t = (nodes[j] - nodes[lo]) / (nodes[hi] - nodes[lo]);
                    (1.0 - t) * sum[lo] / count[lo] as f64 + t * sum[hi] / count[hi] as f64
                }
                (Some(lo), None) => sum[lo] / count[lo] as f64,
                (None, Some(hi)) => sum[hi] / count[hi] as f64,
                (None, None) => 0.0,
            }
        })
        .collect()
}

/// All `(s, k)` combinations; rows are independent.
pub fn claim_sweep(ball: &BallModel, instance: &ClaimInstance, s_values: &[f64], k_values: &[f64]) -> Result<Vec<ClaimRow>> {
    use rayon::prelude::*;
    let jobs: Vec<(f64, f64)> = s_values.iter().flat_map(|&s| k_values.iter().map(move |&k| (s, k))).collect();
    jobs.par_iter().map(|&(s, k)| claim_row(ball, instance, s, k, 1.0)).collect()
}

pub const CLAIM_CSV_HEADER: &str = "s,k,A_sk,C_empirical,min_margin";

pub fn claim_csv(rows: &[ClaimRow]) -> String {
    let mut out = String::from(CLAIM_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{:.17e},{},{:.17e},{:.17e},{:.17e}\n", r.s, r.k, r.a_sk, r.c_empirical, r.min_margin));
    }
    out
}
