//! Right-hand-side families, the entropy and `L^q` norms of `e^F`, and the
//! sweep that records `-inf phi` as the families concentrate.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::operators::OperatorSpec;
use crate::sampling::rng;
use crate::solver::{forward, io::write_atomic, solve, ScalarField, SolveOptions, TorusGrid};
use crate::{Error, Result};

/// `int |2F|^p e^{2F}` on the unit-volume torus.
pub fn norm_entropy(f: &ScalarField, p: f64) -> f64 {
    let v = f.values();
    v.iter().map(|&x| entropy_density(x, p)).sum::<f64>() / v.len() as f64
}

fn entropy_density(f: f64, p: f64) -> f64 {
    (2.0 * f).abs().powf(p) * (2.0 * f).exp()
}

/// `(int e^{qF})^{1/q}`.
pub fn lq_norm(f: &ScalarField, q: f64) -> f64 {
    let v = f.values();
    (v.iter().map(|&x| (q * x).exp()).sum::<f64>() / v.len() as f64).powf(1.0 / q)
}

/// Entropy norm of a closed-form `F` by the equispaced rule with
/// `points_per_axis` points on each of the `4n` axes, without storing a grid.
pub fn entropy_quadrature(f: impl Fn(&[f64]) -> f64, n: usize, points_per_axis: usize, p: f64) -> f64 {
    let d = 4 * n;
    let total = points_per_axis.pow(d as u32);
    let mut x = vec![0.0; d];
    let mut digits = vec![0usize; d];
    let mut sum = 0.0;
    for _ in 0..total {
        for (xa, &dg) in x.iter_mut().zip(&digits) {
            *xa = dg as f64 / points_per_axis as f64;
        }
        sum += entropy_density(f(&x), p);
        for a in (0..d).rev() {
            digits[a] += 1;
            if digits[a] < points_per_axis {
                break;
            }
            digits[a] = 0;
        }
    }
    sum / total as f64
}

/// Smooth periodic stand-in for `|x - c|^2`.
pub fn periodic_sq_dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter()
        .zip(c)
        .map(|(a, b)| (1.0 - (2.0 * PI * (a - b)).cos()) / (2.0 * PI * PI))
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyShape {
    /// `F = value`.
    Constant { value: f64 },
    /// `e^F = baseline + amplitude exp(-|x - c|^2 / sigma^2)`.
    Bump { amplitude: f64, baseline: f64 },
    /// Two bumps of equal weight.
    TwoBump { amplitude: f64, baseline: f64 },
    /// `F = amplitude (G - mean G)`, with `G` a single bump profile.
    SignBalanced { amplitude: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Normalization {
    /// Use the shape parameters as given.
    Raw,
    /// Rescale so that `int |2F|^p e^{2F} = target`.
    FixEntropy { p: f64, target: f64 },
    /// Rescale so that `(int e^{qF})^{1/q} = target`.
    FixLq { q: f64, target: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhsFamily {
    pub name: String,
    pub shape: FamilyShape,
    pub mode: Normalization,
    /// Selects the bump centers among grid points.
    pub seed: u64,
}

fn bump(grid: &TorusGrid, center: &[f64], sigma: f64) -> Result<ScalarField> {
    ScalarField::from_fn(*grid, |x| (-periodic_sq_dist(x, center) / (sigma * sigma)).exp())
}

/// Bisection for an increasing `h` on `[lo, hi]` with `h(lo) <= target <= h(hi)`.
fn bisect(h: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, target: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

impl RhsFamily {
    pub fn new(name: &str, shape: FamilyShape, mode: Normalization, seed: u64) -> Result<Self> {
        let family = Self {
            name: name.to_string(),
            shape,
            mode,
            seed,
        };
        family.validate()?;
        Ok(family)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self.shape {
            FamilyShape::Bump { amplitude, baseline } | FamilyShape::TwoBump { amplitude, baseline } => {
                if !(amplitude >= 0.0 && baseline > 0.0) {
                    return bad(format!("bump needs amplitude >= 0 and baseline > 0, got {amplitude}, {baseline}"));
                }
            }
            FamilyShape::Constant { value } if !value.is_finite() => return bad("constant must be finite".into()),
            FamilyShape::SignBalanced { amplitude } if !amplitude.is_finite() => {
                return bad("amplitude must be finite".into())
            }
            _ => {}
        }
        match self.mode {
            Normalization::FixEntropy { p, target } if !(p > 0.0 && target > 0.0) => {
                bad(format!("entropy normalization needs p > 0 and target > 0, got {p}, {target}"))
            }
            Normalization::FixLq { q, target } if !(q > 0.0 && target > 0.0) => {
                bad(format!("L^q normalization needs q > 0 and target > 0, got {q}, {target}"))
            }
            _ => Ok(()),
        }
    }

    /// Bump centers: grid points drawn from the family seed.
    pub fn centers(&self, grid: &TorusGrid) -> Vec<Vec<f64>> {
        let mut r = rng(self.seed);
        let count = match self.shape {
            FamilyShape::TwoBump { .. } => 2,
            _ => 1,
        };
        let mut out: Vec<Vec<f64>> = Vec::new();
        while out.len() < count {
            let c = grid.point(r.random_range(0..grid.len()));
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// Unit-mean concentration profile `G / mean G` of the bump shapes.
    fn profile(&self, grid: &TorusGrid, sigma: f64) -> Result<ScalarField> {
        let centers = self.centers(grid);
        let mut acc = vec![0.0; grid.len()];
        for c in &centers {
            for (a, v) in acc.iter_mut().zip(bump(grid, c, sigma)?.values()) {
                *a += v / centers.len() as f64;
            }
        }
        ScalarField::new(*grid, acc)
    }

    /// `F_sigma` after normalization.
    pub fn generate(&self, grid: &TorusGrid, sigma: f64) -> Result<ScalarField> {
        if !(sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        let norm = |f: &ScalarField| match self.mode {
            Normalization::FixEntropy { p, .. } => norm_entropy(f, p),
            Normalization::FixLq { q, .. } => lq_norm(f, q),
            Normalization::Raw => 0.0,
        };
        let target = match self.mode {
            Normalization::FixEntropy { target, .. } | Normalization::FixLq { target, .. } => target,
            Normalization::Raw => 0.0,
        };
        match self.shape {
            FamilyShape::Constant { value } => {
                let c = match self.mode {
                    Normalization::Raw => value,
                    Normalization::FixLq { target, .. } => target.ln(),
                    // |2c|^p e^{2c} increases on c >= 0
                    Normalization::FixEntropy { p, target } => {
                        let mut hi = 1.0;
                        while entropy_density(hi, p) < target {
                            hi *= 2.0;
                        }
                        bisect(|c| Ok(entropy_density(c, p)), 0.0, hi, target)?
                    }
                };
                Ok(ScalarField::constant(*grid, c))
            }
            FamilyShape::Bump { amplitude, baseline } | FamilyShape::TwoBump { amplitude, baseline } => {
                let g = self.profile(grid, sigma)?;
                if self.mode == Normalization::Raw {
                    return Ok(g.map(|v| (baseline + amplitude * v).ln()));
                }
                // e^F = (1 - w) + w G / mean G keeps the mean of e^F at one
                let mean = g.mean();
                let field = |w: f64| g.map(|v| ((1.0 - w) + w * v / mean).ln());
                let hi = 1.0 - 1e-12;
                if norm(&field(hi)) < target {
                    return Err(Error::InvalidParameter(format!(
                        "target {target} not reachable for sigma = {sigma} (max {})",
                        norm(&field(hi))
                    )));
                }
                let w = bisect(|w| Ok(norm(&field(w))), 0.0, hi, target)?;
                Ok(field(w))
            }
            FamilyShape::SignBalanced { amplitude } => {
                let g = self.profile(grid, sigma)?;
                let mean = g.mean();
                let h = g.map(|v| v / mean - 1.0);
                if self.mode == Normalization::Raw {
                    return Ok(h.map(|v| amplitude * v));
                }
                let field = |a: f64| h.map(|v| a * v);
                let mut hi = 1.0;
                while norm(&field(hi)) < target {
                    hi *= 2.0;
                    if hi > 1e6 {
                        return Err(Error::InvalidParameter(format!("target {target} not reachable")));
                    }
                }
                let a = bisect(|a| Ok(norm(&field(a))), 0.0, hi, target)?;
                Ok(field(a))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub family: String,
    pub sigma: f64,
    pub points_per_axis: usize,
    pub entropy_norm_p: f64,
    pub lq_norm: f64,
    pub b: f64,
    pub neg_inf_phi: f64,
    pub residual: f64,
    pub converged: bool,
    /// Wall-clock time of the solve; kept out of the CSV.
    pub runtime: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    /// Largest `-inf phi` over converged rows, reported under a fixed entropy
    /// norm with `p > 2n`.
    pub empirical_c: Option<f64>,
}

impl ProbeReport {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    /// Max over min of `-inf phi` among converged rows.
    pub fn spread(&self) -> f64 {
        let v: Vec<f64> = self.rows.iter().filter(|r| r.converged).map(|r| r.neg_inf_phi).collect();
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        max / min
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSettings {
    pub points_per_axis: usize,
    pub p: f64,
    pub q: f64,
    pub solve: SolveOptions,
}

/// Solves one instance per `sigma` and records `-inf phi` with both norms.
/// Rows whose solve fails, or whose forward re-evaluation misses the
/// tolerance, are kept and flagged.
pub fn run_probe(family: &RhsFamily, sigmas: &[f64], spec: &OperatorSpec, settings: &ProbeSettings) -> Result<ProbeReport> {
    let n = spec.dim();
    if !(settings.p > 2.0 * n as f64) {
        return Err(Error::InvalidParameter(format!("p must exceed 2n = {}, got {}", 2 * n, settings.p)));
    }
    if !(settings.q > 0.0) {
        return Err(Error::InvalidParameter(format!("q must be positive, got {}", settings.q)));
    }
    let grid = TorusGrid::new(n, settings.points_per_axis)?;
    let fields: Vec<ScalarField> = sigmas.iter().map(|&s| family.generate(&grid, s)).collect::<Result<_>>()?;
    let rows: Vec<ProbeRow> = sigmas
        .par_iter()
        .zip(fields.par_iter())
        .map(|(&sigma, f)| {
            let start = Instant::now();
            let outcome = solve(spec, f, &settings.solve).and_then(|r| {
                // forward-backward consistency, recomputed from the stored solution
                let fw = forward(spec, &r.phi)?;
                let check = fw
                    .log_f
                    .iter()
                    .zip(f.values())
                    .map(|(l, x)| (l - x - r.b).abs())
                    .fold(0.0, f64::max);
                Ok((r, check))
            });
            let (b, neg_inf_phi, residual, converged) = match outcome {
                Ok((r, check)) => (r.b, 0.0 - r.phi.inf(), check, check <= settings.solve.tol),
                Err(Error::NonConvergence { residual, .. }) => (f64::NAN, f64::NAN, residual, false),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN, false),
            };
            ProbeRow {
                family: family.name.clone(),
                sigma,
                points_per_axis: settings.points_per_axis,
                entropy_norm_p: norm_entropy(f, settings.p),
                lq_norm: lq_norm(f, settings.q),
                b,
                neg_inf_phi,
                residual,
                converged,
                runtime: start.elapsed(),
            }
        })
        .collect();
    let empirical_c = match family.mode {
        Normalization::FixEntropy { p, .. } if p > 2.0 * n as f64 => rows
            .iter()
            .filter(|r| r.converged)
            .map(|r| r.neg_inf_phi)
            .reduce(f64::max),
        _ => None,
    };
    Ok(ProbeReport { rows, empirical_c })
}

pub const PROBE_CSV_HEADER: &str = "family,sigma,N,entropy_norm_p,Lq_norm,b,neg_inf_phi,residual,converged";

pub fn probe_csv(report: &ProbeReport) -> String {
    let mut out = String::from(PROBE_CSV_HEADER);
    out.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e},{}",
            r.family, r.sigma, r.points_per_axis, r.entropy_norm_p, r.lq_norm, r.b, r.neg_inf_phi, r.residual, r.converged
        );
    }
    out
}

fn panel(out: &mut String, x0: f64, title: &str, xlabel: &str, pts: &[(f64, f64)]) {
    let (w, h, pad) = (320.0, 240.0, 40.0);
    let finite: Vec<(f64, f64)> = pts.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let range = |v: Vec<f64>| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-12 * (1.0 + hi.abs()) {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (xl, xh) = range(finite.iter().map(|p| p.0).collect());
    let (yl, yh) = range(finite.iter().map(|p| p.1).chain([0.0]).collect());
    let sx = |x: f64| x0 + pad + (x - xl) / (xh - xl) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - yl) / (yh - yl) * (h - 2.0 * pad);
    let _ = writeln!(
        out,
        r##"<rect x="{x0}" y="0" width="{w}" height="{h}" fill="white" stroke="#999"/>"##
    );
    let _ = writeln!(out, r#"<text x="{}" y="16" font-size="12" text-anchor="middle">{title}</text>"#, x0 + w / 2.0);
    let _ = writeln!(
        out,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        x0 + pad,
        h - pad,
        x0 + w - pad,
        h - pad,
        x0 + pad,
        h - pad,
        x0 + pad,
        pad
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="10" text-anchor="middle">{xlabel} [{xl:.3}, {xh:.3}]</text>"#,
        x0 + w / 2.0,
        h - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-size="10">-inf phi [{yl:.3e}, {yh:.3e}]</text>"#,
        x0 + 4.0,
        pad - 8.0
    );
    for (x, y) in finite {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(x), sy(y));
    }
}

/// Two scatter panels: `-inf phi` against `sigma` and against the entropy norm.
pub fn probe_svg(report: &ProbeReport) -> String {
    let mut out = String::from(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="640" height="240" viewBox="0 0 640 240">"#,
    );
    out.push('\n');
    let by_sigma: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.sigma, r.neg_inf_phi)).collect();
    let by_norm: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.entropy_norm_p, r.neg_inf_phi)).collect();
    panel(&mut out, 0.0, "-inf phi vs sigma", "sigma", &by_sigma);
    panel(&mut out, 320.0, "-inf phi vs entropy norm", "entropy norm", &by_norm);
    out.push_str("</svg>\n");
    out
}

pub fn write_probe_outputs(report: &ProbeReport, csv: &Path, svg: &Path) -> Result<()> {
    write_atomic(csv, probe_csv(report).as_bytes())?;
    write_atomic(svg, probe_svg(report).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(1, 8).unwrap()
    }

    #[test]
    fn entropy_of_constants() {
        let g = grid();
        assert_eq!(norm_entropy(&ScalarField::zeros(g), 3.0), 0.0);
        let c = 0.3f64;
        let e = norm_entropy(&ScalarField::constant(g, c), 2.5);
        let exact = (2.0 * c).powf(2.5) * (2.0 * c).exp();
        assert!((e - exact).abs() < 1e-12 * exact);
        assert!((lq_norm(&ScalarField::constant(g, c), 4.0) - c.exp()).abs() < 1e-12);
    }

    #[test]
    fn normalization_hits_targets() {
        let g = grid();
        let cases = [
            (FamilyShape::Bump { amplitude: 1.0, baseline: 1.0 }, Normalization::FixEntropy { p: 3.0, target: 0.05 }),
            (FamilyShape::TwoBump { amplitude: 1.0, baseline: 1.0 }, Normalization::FixEntropy { p: 3.0, target: 0.05 }),
            (FamilyShape::Bump { amplitude: 1.0, baseline: 1.0 }, Normalization::FixLq { q: 3.0, target: 1.2 }),
            (FamilyShape::SignBalanced { amplitude: 1.0 }, Normalization::FixEntropy { p: 3.0, target: 0.1 }),
            (FamilyShape::SignBalanced { amplitude: 1.0 }, Normalization::FixLq { q: 4.0, target: 1.1 }),
            (FamilyShape::Constant { value: 0.0 }, Normalization::FixEntropy { p: 3.0, target: 2.0 }),
            (FamilyShape::Constant { value: 0.0 }, Normalization::FixLq { q: 3.0, target: 2.0 }),
        ];
        for (shape, mode) in cases {
            let fam = RhsFamily::new("t", shape.clone(), mode, 7).unwrap();
            for sigma in [0.4, 0.2] {
                let f = fam.generate(&g, sigma).unwrap();
                let (got, target) = match mode {
                    Normalization::FixEntropy { p, target } => (norm_entropy(&f, p), target),
                    Normalization::FixLq { q, target } => (lq_norm(&f, q), target),
                    Normalization::Raw => unreachable!(),
                };
                assert!((got / target - 1.0).abs() < 1e-6, "{shape:?} {mode:?}: {got} vs {target}");
            }
        }
    }

    #[test]
    fn sign_balanced_has_zero_mean() {
        let fam = RhsFamily::new("sb", FamilyShape::SignBalanced { amplitude: 0.3 }, Normalization::Raw, 1).unwrap();
        let f = fam.generate(&grid(), 0.3).unwrap();
        assert!(f.mean().abs() < 1e-15);
        assert!(f.sup() > 0.0 && f.inf() < 0.0);
    }

    #[test]
    fn raw_bump_is_positive_and_peaked_at_center() {
        let g = grid();
        let fam = RhsFamily::new("b", FamilyShape::Bump { amplitude: 2.0, baseline: 0.5 }, Normalization::Raw, 3).unwrap();
        let f = fam.generate(&g, 0.2).unwrap();
        let c = &fam.centers(&g)[0];
        let at_center = f.values()[(0..g.len()).find(|&i| &g.point(i) == c).unwrap()];
        assert!((at_center - 2.5f64.ln()).abs() < 1e-14);
        assert_eq!(at_center, f.sup());
    }

    #[test]
    fn invalid_families_are_rejected() {
        assert!(RhsFamily::new("x", FamilyShape::Bump { amplitude: 1.0, baseline: 0.0 }, Normalization::Raw, 0).is_err());
        assert!(RhsFamily::new("x", FamilyShape::Constant { value: 0.0 }, Normalization::FixLq { q: 0.0, target: 1.0 }, 0).is_err());
        let fam = RhsFamily::new("x", FamilyShape::Constant { value: 0.0 }, Normalization::Raw, 0).unwrap();
        assert!(fam.generate(&grid(), 0.0).is_err());
    }

    #[test]
    fn svg_is_well_formed() {
        let report = ProbeReport {
            rows: vec![],
            empirical_c: None,
        };
        let svg = probe_svg(&report);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(probe_csv(&report), format!("{PROBE_CSV_HEADER}\n"));
    }
}
