use std::path::Path;
use std::process::{Command, Output};

fn sqcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqcc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SHORT_FIBER: &str = "[sweep]\nstart = 0.0\nstop = 60.0\nstep = 5.0\n[finite_size]\nblock_sizes = [1e10]\n";

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SHORT_FIBER);
    let mut outputs = Vec::new();
    for threads in ["1", "3", "1"] {
        let out = dir.path().join(format!("o{}.csv", outputs.len()));
        let o = sqcc(&[
            "sweep", "--preset", "fig2", "--config", &cfg, "--threads", threads, "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 13);
    assert_eq!(
        lines[0],
        "distance_km,T,xi,key_rate_fixed,key_rate_ps,g_opt,P_A,I_AB,I_E,key_rate_optV,\
         key_rate_fixed_n1e10,key_rate_ps_n1e10,g_opt_n1e10"
    );
    let axis: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(axis.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sweep_writes_to_stdout_without_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[sweep]\nstart = 10.0\nstop = 10.0\nstep = 1.0\n");
    let o = sqcc(&["sweep", "--config", &cfg]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn optimize_reports_one_point() {
    let o = sqcc(&["optimize", "--preset", "fig2", "--at", "41"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let cells: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(cells[0], 41.0);
    assert!(cells[3] < 0.0 && cells[4] > 0.0);
    assert!((cells[5] - 0.25).abs() < 0.02);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("empty.toml", "[sweep]\nstart = 10.0\nstop = 0.0\n"),
        ("unknown.toml", "[protocol]\nvmod = 3.0\n"),
        ("invalid.toml", "[protocol]\nreconciliation_efficiency = 1.5\n"),
        ("syntax.toml", "[protocol\n"),
    ];
    for (name, text) in cases {
        let cfg = write(dir.path(), name, text);
        let o = sqcc(&["sweep", "--config", &cfg]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).contains("config error"), "{name}");
    }
    assert_eq!(sqcc(&["sweep", "--preset", "fig6"]).status.code(), Some(2));
    assert_eq!(sqcc(&["sweep", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
    assert_eq!(sqcc(&["duty-cycle", "--preset", "fig2"]).status.code(), Some(2));
}

#[test]
fn mc_validate_needs_seed_and_enough_pulses() {
    let dir = tempfile::tempdir().unwrap();
    let small = write(dir.path(), "small.toml", "[mc]\npulses = 1000\n");
    let o = sqcc(&["mc-validate", "--config", &small, "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("insufficient samples"));
    let ok = write(dir.path(), "ok.toml", "[mc]\npulses = 100000\n");
    assert_eq!(sqcc(&["mc-validate", "--config", &ok]).status.code(), Some(2));
}

#[test]
fn mc_validate_passes_and_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.toml", "[mc]\npulses = 1000000\n");
    let o = sqcc(&["mc-validate", "--config", &good, "--seed", "2024"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 5 * 7);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));

    let bad = write(dir.path(), "bad.toml", "[mc]\npulses = 1000000\ngain_multiplier = 1.1\n");
    let o = sqcc(&["mc-validate", "--config", &bad, "--seed", "2024"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("N_d"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("validation failed"));
}

#[test]
fn duty_cycle_on_a_coarse_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sat.toml",
        "[sweep]\nstart = 2.5\nstop = 177.5\nstep = 5.0\n[duty_cycle]\ntime_map = \"orbital\"\n",
    );
    let o = sqcc(&["duty-cycle", "--preset", "fig4-good", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let names: Vec<&str> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(names, ["fixed", "ps", "optV", "fixed_n1e12", "ps_n1e12", "fixed_n1e11", "ps_n1e11"]);
    for r in &rows {
        let f: f64 = r[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&f));
    }
}
