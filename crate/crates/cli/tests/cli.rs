use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qma-lab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_inequalities_reports_full_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify-inequalities", "--n", "2", "--trials", "1000", "--seed", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("1000/1000 lemma31, 1000/1000 prop32"), "{text}");
    assert!(text.contains("negative control"));
    assert!(text.contains("rng: chacha8 seed=3"));
}

#[test]
fn missing_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--config", "missing.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.cfg"));
}

#[test]
fn unknown_key_names_its_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "# comment\nn = 1\nwidth = 3\n").unwrap();
    let o = run(&["probe", "--config", "bad.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("width"), "{err}");
}

#[test]
fn bad_value_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.cfg"), "operator = cubic\n").unwrap();
    let o = run(&["solve", "--config", "bad.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_writes_grid_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.cfg"), "N = 8\namplitude = 0.05\n").unwrap();
    let o = run(&["solve", "--config", "s.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("N = 8    # line 1"), "{text}");
    assert!(text.contains("rng: chacha8 seed=7"));
    let phi = qma_lab::solver::io::read_grid(&dir.path().join("phi.grid")).unwrap();
    assert_eq!(phi.grid().points_per_axis(), 8);
    assert_eq!(phi.sup(), 0.0);
    let meta = std::fs::read_to_string(dir.path().join("phi.meta")).unwrap();
    assert!(meta.contains("newton_iters"));
}

#[test]
fn solve_nonconvergence_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.cfg"), "N = 8\namplitude = 0.5\nmax_iters = 1\n").unwrap();
    let o = run(&["solve", "--config", "s.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn constant_family_probe_has_zero_column_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "N = 8\nfamily = constant\nmode = fix_lq\ntarget = 2.0\nsigmas = 0.4,0.2\n";
    std::fs::write(dir.path().join("p.cfg"), cfg).unwrap();
    let o = run(&["probe", "--config", "p.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read(dir.path().join("probe.csv")).unwrap();
    let text = String::from_utf8(first.clone()).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "neg_inf_phi").unwrap();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row.split(',').nth(col).unwrap().parse::<f64>().unwrap(), 0.0, "{row}");
    }
    let svg = std::fs::read(dir.path().join("probe.svg")).unwrap();
    let o = run(&["probe", "--config", "p.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(dir.path().join("probe.csv")).unwrap(), first);
    assert_eq!(std::fs::read(dir.path().join("probe.svg")).unwrap(), svg);
}

#[test]
fn gp_claim_model_sweep_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("g.cfg"), "k_values = 10,100,1000\n").unwrap();
    let o = run(&["gp-claim", "--config", "g.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("gp_claim.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("s,k,A_sk,C_empirical,min_margin"));
    assert_eq!(csv.lines().count(), 10);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["selftest"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
