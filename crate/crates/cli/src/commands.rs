use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;

use qma_lab::comparison::{lemma31_suite, prop32_suite};
use qma_lab::gp::{claim_csv, claim_row, claim_sweep, BallModel, ClaimInstance};
use qma_lab::hypercomplex::standard_frame;
use qma_lab::operators::{
    arithmetic_mean, check_structural, hessian_quotient, negative_control, qma_operator, shipped_zoo, OperatorSpec,
};
use qma_lab::probe::{run_probe, write_probe_outputs, FamilyShape, Normalization, ProbeSettings, RhsFamily};
use qma_lab::solver::{io, solve as solve_instance, ScalarField, SolveOptions, TorusGrid};

use crate::config::Config;
use crate::CliError;

fn print_header(command: &str, cfg: &Config, seed: u64) {
    let state: u64 = qma_lab::sampling::rng(seed).random();
    println!("{command}: resolved config");
    print!("{cfg}");
    println!("rng: chacha8 seed={seed} first_u64={state:#018x}");
}

pub fn parse_operator(cfg: &Config, n: usize) -> Result<OperatorSpec, CliError> {
    let name = cfg.string("operator");
    let spec = match name.as_str() {
        "qma" => qma_operator(n),
        "laplacian" => arithmetic_mean(n),
        other => {
            let parts: Vec<&str> = other.split('/').collect();
            let idx = |s: &str| s.strip_prefix("sigma").and_then(|k| k.parse::<usize>().ok());
            match parts.as_slice() {
                [k] => idx(k).map(|k| hessian_quotient(n, k, 0)),
                [k, l] => idx(k).zip(idx(l)).map(|(k, l)| hessian_quotient(n, k, l)),
                _ => None,
            }
            .ok_or_else(|| cfg.invalid("operator", "expected qma, laplacian, sigma<k> or sigma<k>/sigma<l>"))?
        }
    };
    spec.map_err(|e| cfg.invalid("operator", e.to_string()))
}

fn solve_options(cfg: &Config) -> Result<SolveOptions, CliError> {
    Ok(SolveOptions {
        tol: cfg.f64("tol")?,
        max_iters: cfg.usize("max_iters")?,
        force: cfg.bool("force")?,
        ..SolveOptions::default()
    })
}

fn family(cfg: &Config) -> Result<RhsFamily, CliError> {
    let amplitude = cfg.f64("amplitude")?;
    let baseline = cfg.f64("baseline")?;
    let name = cfg.string("family");
    let shape = match name.as_str() {
        "bump" => FamilyShape::Bump { amplitude, baseline },
        "two-bump" => FamilyShape::TwoBump { amplitude, baseline },
        "sign-balanced" => FamilyShape::SignBalanced { amplitude },
        "constant" => FamilyShape::Constant { value: amplitude },
        _ => return Err(cfg.invalid("family", "expected bump, two-bump, sign-balanced or constant")),
    };
    let mode = match cfg.string("mode").as_str() {
        "raw" => Normalization::Raw,
        "fix_entropy" => Normalization::FixEntropy {
            p: cfg.f64("p")?,
            target: cfg.f64("target")?,
        },
        "fix_lq" => Normalization::FixLq {
            q: cfg.f64("q")?,
            target: cfg.f64("target")?,
        },
        _ => return Err(cfg.invalid("mode", "expected raw, fix_entropy or fix_lq")),
    };
    RhsFamily::new(&name, shape, mode, cfg.u64("seed")?).map_err(|e| cfg.invalid("family", e.to_string()))
}

pub fn verify_inequalities(n: usize, trials: usize, seed: u64) -> Result<(), CliError> {
    if n == 0 || trials == 0 {
        return Err(CliError::Usage("--n and --trials must be positive".into()));
    }
    let state: u64 = qma_lab::sampling::rng(seed).random();
    println!("verify-inequalities: n={n} trials={trials} seed={seed}");
    println!("rng: chacha8 seed={seed} first_u64={state:#018x}");
    let frame = standard_frame(n)?;
    let lemma = lemma31_suite(&frame, trials, seed);
    let prop = prop32_suite(&frame, trials, seed.wrapping_add(1));
    println!("{}/{} lemma31, {}/{} prop32", lemma.passed, lemma.total, prop.passed, prop.total);
    println!(
        "worst relative margins: lemma31 {:.3e}, prop32 {:.3e}",
        lemma.worst_margin, prop.worst_margin
    );
    let mut failed: Vec<String> = lemma.failures.iter().chain(&prop.failures).cloned().collect();
    for spec in shipped_zoo(n) {
        let rep = check_structural(&spec, trials, seed);
        match &rep.witness {
            None => println!(
                "structural {}: {}/{} (min gradient product {:.3e}, gamma {:.3e})",
                spec, trials, trials, rep.min_gradient_product, rep.gamma
            ),
            Some(w) => {
                println!("structural {spec}: FAILED {:?} at {:?}", w.kind, w.lambda);
                failed.push(format!("{spec}: {:?}", w.kind));
            }
        }
    }
    let control = negative_control(n);
    match check_structural(&control, trials, seed).witness {
        Some(w) => println!("negative control {control}: rejected ({:?} at {:?})", w.kind, w.lambda),
        None => failed.push(format!("negative control {control} was not rejected")),
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failed.join("; ")))
    }
}

const SOLVE_KEYS: &[(&str, &str)] = &[
    ("n", "1"),
    ("N", "16"),
    ("operator", "qma"),
    ("family", "cos"),
    ("amplitude", "0.1"),
    ("axis", "0"),
    ("sigma", "0.2"),
    ("baseline", "1.0"),
    ("mode", "raw"),
    ("p", "3"),
    ("q", "3"),
    ("target", "0.1"),
    ("rhs_file", ""),
    ("seed", "7"),
    ("tol", "1e-8"),
    ("max_iters", "30"),
    ("force", "false"),
    ("output", "phi.grid"),
    ("metadata", "phi.meta"),
];

pub fn solve(path: Option<&Path>) -> Result<(), CliError> {
    let cfg = Config::load(path, SOLVE_KEYS)?;
    let seed = cfg.u64("seed")?;
    print_header("solve", &cfg, seed);
    let rhs_file = cfg.string("rhs_file");
    let f = if !rhs_file.is_empty() {
        io::read_grid(Path::new(&rhs_file))?
    } else {
        let grid = TorusGrid::new(cfg.usize("n")?, cfg.usize("N")?).map_err(|e| cfg.invalid("N", e.to_string()))?;
        if cfg.string("family") == "cos" {
            let axis = cfg.usize("axis")?;
            if axis >= grid.axes() {
                return Err(cfg.invalid("axis", format!("must be below {}", grid.axes())));
            }
            let amp = cfg.f64("amplitude")?;
            ScalarField::from_fn(grid, |x| amp * (2.0 * PI * x[axis]).cos())?
        } else {
            family(&cfg)?.generate(&grid, cfg.f64("sigma")?)?
        }
    };
    let spec = parse_operator(&cfg, f.grid().n())?;
    let start = Instant::now();
    let result = solve_instance(&spec, &f, &solve_options(&cfg)?)?;
    let output = PathBuf::from(cfg.string("output"));
    let metadata = PathBuf::from(cfg.string("metadata"));
    io::write_grid(&output, &result.phi)?;
    io::write_metadata(&metadata, &result)?;
    println!(
        "converged: newton_iters={} residual_inf={:.3e} b={:.12e} -inf phi={:.12e} min_eig_margin={:.6e} max_pair_gap={:.3e}",
        result.newton_iters,
        result.residual_inf,
        result.b,
        -result.phi.inf(),
        result.min_eig_margin,
        result.max_pair_gap
    );
    println!("wrote {} and {} in {:.2?}", output.display(), metadata.display(), start.elapsed());
    Ok(())
}

const PROBE_KEYS: &[(&str, &str)] = &[
    ("n", "1"),
    ("N", "16"),
    ("operator", "qma"),
    ("family", "bump"),
    ("amplitude", "1.0"),
    ("baseline", "1.0"),
    ("mode", "fix_entropy"),
    ("p", "3"),
    ("q", "3"),
    ("target", "0.1"),
    ("sigmas", "0.4,0.2,0.1"),
    ("seed", "7"),
    ("tol", "1e-8"),
    ("max_iters", "30"),
    ("force", "false"),
    ("csv", "probe.csv"),
    ("svg", "probe.svg"),
];

pub fn probe(path: Option<&Path>) -> Result<(), CliError> {
    let cfg = Config::load(path, PROBE_KEYS)?;
    let seed = cfg.u64("seed")?;
    print_header("probe", &cfg, seed);
    let n = cfg.usize("n")?;
    let spec = parse_operator(&cfg, n)?;
    let fam = family(&cfg)?;
    let settings = ProbeSettings {
        points_per_axis: cfg.usize("N")?,
        p: cfg.f64("p")?,
        q: cfg.f64("q")?,
        solve: solve_options(&cfg)?,
    };
    let report = run_probe(&fam, &cfg.f64_list("sigmas")?, &spec, &settings)?;
    let csv = PathBuf::from(cfg.string("csv"));
    let svg = PathBuf::from(cfg.string("svg"));
    write_probe_outputs(&report, &csv, &svg)?;
    for r in &report.rows {
        println!(
            "sigma={} entropy={:.6e} Lq={:.6e} -inf phi={:.6e} converged={} runtime={:.2?}",
            r.sigma, r.entropy_norm_p, r.lq_norm, r.neg_inf_phi, r.converged, r.runtime
        );
    }
    if let Some(c) = report.empirical_c {
        println!("empirical C (max -inf phi) = {c:.6e}, max/min = {:.4}", report.spread());
    }
    println!("wrote {} and {}", csv.display(), svg.display());
    if report.all_converged() {
        Ok(())
    } else {
        Err(CliError::NonConvergence(format!(
            "{} of {} rows did not converge",
            report.rows.iter().filter(|r| !r.converged).count(),
            report.rows.len()
        )))
    }
}

const GP_KEYS: &[(&str, &str)] = &[
    ("n", "1"),
    ("r", "0.2"),
    ("nodes", "2001"),
    ("s_fractions", "0.25,0.5,1.0"),
    ("k_values", "10,100"),
    ("instance", "model"),
    ("N", "16"),
    ("amplitude", "0.1"),
    ("seed", "7"),
    ("csv", "gp_claim.csv"),
];

pub fn gp_claim(path: Option<&Path>) -> Result<(), CliError> {
    let cfg = Config::load(path, GP_KEYS)?;
    let seed = cfg.u64("seed")?;
    print_header("gp-claim", &cfg, seed);
    let n = cfg.usize("n")?;
    let r = cfg.f64("r")?;
    let ball = BallModel::new(n, r, vec![0.0; 4 * n], cfg.usize("nodes")?).map_err(|e| cfg.invalid("r", e.to_string()))?;
    let s_values: Vec<f64> = cfg.f64_list("s_fractions")?.iter().map(|f| f * r * r).collect();
    let k_values = cfg.f64_list("k_values")?;
    let instance = match cfg.string("instance").as_str() {
        "model" => ClaimInstance::Model,
        "patch" => {
            let grid = TorusGrid::new(n, cfg.usize("N")?).map_err(|e| cfg.invalid("N", e.to_string()))?;
            let amp = cfg.f64("amplitude")?;
            let f = ScalarField::from_fn(grid, |x| amp * (2.0 * PI * x[0]).cos())?;
            let sol = solve_instance(&qma_operator(n)?, &f, &SolveOptions::default())?;
            println!("solved patch instance: -inf phi = {:.6e}", -sol.phi.inf());
            ClaimInstance::Patch { phi: sol.phi, f }
        }
        _ => return Err(cfg.invalid("instance", "expected model or patch")),
    };
    let rows = claim_sweep(&ball, &instance, &s_values, &k_values)?;
    let mut failures = Vec::new();
    for row in &rows {
        let scaled = claim_row(&ball, &instance, row.s, row.k, 2.0)?;
        let scaling_err = (scaled.c_empirical * 2.0 / row.c_empirical - 1.0).abs();
        println!(
            "s={:.4e} k={} A_sk={:.6e} C={:.6e} min_margin={:.4e} mass={:.12} scaling_err={:.1e}",
            row.s, row.k, row.a_sk, row.c_empirical, row.min_margin, row.mass, scaling_err
        );
        if !row.c_empirical.is_finite() || !(scaling_err < 1e-9) {
            failures.push(format!("s={} k={}", row.s, row.k));
        }
    }
    let csv = PathBuf::from(cfg.string("csv"));
    io::write_atomic(&csv, claim_csv(&rows).as_bytes())?;
    println!("wrote {}", csv.display());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Assertion(failures.join("; ")))
    }
}
