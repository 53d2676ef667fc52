use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hermheat_cli::{emit, ExperimentConfig};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hermheat")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run_config(path: &Path) -> Output {
    Command::new(bin()).arg("run").arg(path).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn decay_of_ground_state_has_unit_rate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "decay.toml",
        "command = \"decay\"\noutput_dir = \"out\"\n[decay]\nsignal = { kind = \"hermite\", index = [0] }\nt_start = 1.0\nt_end = 6.0\n",
    );
    let o = run_config(&cfg);
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv_rows(&dir.path().join("out/fit.csv"));
    let col = header.iter().position(|h| h == "fitted_rate").unwrap();
    let rate: f64 = rows[0][col].parse().unwrap();
    assert!((rate - 1.0).abs() < 1e-8);
    let (header, _) = csv_rows(&dir.path().join("out/decay.csv"));
    assert_eq!(header, ["t", "ratio", "theory", "ratio/theory"]);
}

#[test]
fn blowup_verdict_reports_ode_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b.toml", "command = \"blowup\"\noutput_dir = \"out\"\n[blowup]\na = 1.0\nk = 1\n");
    let o = run_config(&cfg);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/verdict.json")).unwrap()).unwrap();
    assert_eq!(v["free"]["t_star_ode"], 0.5);
    assert_eq!(v["free"]["blew_up"], true);
}

#[test]
fn inadmissible_exponents_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        "command = \"solve\"\noutput_dir = \"out\"\n[solve]\nk = 1\nnorm = { p = 2, q = 2 }\n",
    );
    let o = run_config(&cfg);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("q <= (2k+1)/(2k)"), "{}", stderr(&o));
    assert!(!dir.path().join("out").exists(), "validation must precede any output");

    let ok = write_config(
        dir.path(),
        "s2.toml",
        "command = \"solve\"\noutput_dir = \"out2\"\n[solve]\nk = 1\nhorizon = 1.0\nallow_out_of_theory = true\nnorm = { p = 2, q = 2 }\n",
    );
    let o = run_config(&ok);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn empty_config_lists_required_keys() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(&write_config(dir.path(), "e.toml", ""));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("command, output_dir"));
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.toml",
        "command = \"solve\"\noutput_dir = \"out\"\n[solve]\ndegree = 8\nhorizon = 2.0\nblowup_threshold = 1000.0\n\
         picard_max_iters = 30\nsignal = { kind = \"hermite\", index = [0], amplitude = 30.0 }\n",
    );
    let o = run_config(&cfg);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn io_failure_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = write_config(
        dir.path(),
        "t.toml",
        &format!("command = \"transform\"\noutput_dir = \"{}\"\n", blocker.join("sub").display()),
    );
    assert_eq!(run_config(&cfg).status.code(), Some(4));
    assert_eq!(run_config(&dir.path().join("missing.toml")).status.code(), Some(4));
}

#[test]
fn every_precondition_has_a_config_guard() {
    let cases = [
        ("transform", "d = 4"),
        ("transform", "rule_order = 3\ndegree = 8"),
        ("transform", "signal = { kind = \"hermite\", index = [0, 0] }"),
        ("transform", "signal = { kind = \"corpus\", name = \"nope\" }"),
        ("transform", "degree = 4\nsignal = { kind = \"coefficients\", re = [1, 2, 3, 4, 5, 6] }"),
        ("transform", "degree = 4\nsignal = { kind = \"random\", degree = 6 }"),
        ("semigroup", "beta = -1.0"),
        ("semigroup", "times = []"),
        ("semigroup", "times = [-1.0]"),
        ("semigroup", "mehler = true\nbeta = 2.0"),
        ("semigroup", "mehler = true\nd = 3"),
        ("semigroup", "mehler = true\ntimes = [0.0]"),
        ("norm", "window = \"box\""),
        ("norm", "norms = []"),
        ("norm", "norms = [{ p = 0, q = 1 }]"),
        ("norm", "grid = { x_extent = 10, xi_extent = 10, n_x = 11, n_xi = 11 }"),
        ("norm", "d = 3"),
        ("decay", "t_start = 2.0\nt_end = 1.0"),
        ("decay", "samples = 1"),
        ("decay", "exponents = { p1 = 0, q1 = 1, p2 = 1, q2 = 1 }"),
        ("smoothing", "t_min = 2.0"),
        ("smoothing", "betas = []"),
        ("smoothing", "signals = [{ kind = \"hermite\", index = [0, 1] }]"),
        ("solve", "k = 0"),
        ("solve", "dt = 0.0"),
        ("solve", "picard_tol = 0.0"),
        ("solve", "norm = { p = 2, q = 2 }"),
        ("solve", "beta = 0.1\nd = 2\nnorm = { p = 2, q = 1.4 }"),
        ("solve", "norm = { p = 0.5, q = 1 }\nallow_out_of_theory = true"),
        ("blowup", "a = -1.0"),
        ("blowup", "lambda = 0.0"),
        ("blowup", "k = 0"),
    ];
    let dir = tempfile::tempdir().unwrap();
    for (i, (cmd, body)) in cases.iter().enumerate() {
        let text = format!("command = \"{cmd}\"\noutput_dir = \"out{i}\"\n[{cmd}]\n{body}\n");
        let o = run_config(&write_config(dir.path(), &format!("c{i}.toml"), &text));
        assert_eq!(o.status.code(), Some(2), "{cmd}: {body}\n{}", stderr(&o));
        assert!(!dir.path().join(format!("out{i}")).exists(), "{cmd}: {body}");
    }
}

fn data_files(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().unwrap() != "manifest.json" {
                out.push((p.strip_prefix(root).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let extras = [
        ("transform", ""),
        ("semigroup", "mehler = true\n"),
        ("norm", "export_stft = true\nsignal = { kind = \"random\" }\n"),
        ("decay", "signal = { kind = \"random\" }\n"),
        ("smoothing", "degree = 12\n"),
        ("solve", "snapshot_stride = 20\n"),
        ("blowup", "a = 0.05\n"),
    ];
    for (cmd, body) in extras {
        let mut runs = Vec::new();
        for rep in 0..2 {
            let text = format!("command = \"{cmd}\"\noutput_dir = \"{cmd}{rep}\"\nseed = 17\n[{cmd}]\n{body}");
            let o = run_config(&write_config(dir.path(), &format!("{cmd}{rep}.toml"), &text));
            assert!(o.status.success(), "{cmd}: {}", stderr(&o));
            runs.push(data_files(&dir.path().join(format!("{cmd}{rep}"))));
        }
        assert!(!runs[0].is_empty());
        assert_eq!(runs[0], runs[1], "{cmd}");
    }
}

#[test]
fn manifest_records_config_and_checksums() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_config(&write_config(dir.path(), "n.toml", "command = \"norm\"\noutput_dir = \"o\"\n"));
    assert!(o.status.success());
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "norm");
    assert!(m["config"].as_str().unwrap().contains("[norm]"));
    assert_eq!(m["grid_hashes"].as_array().unwrap().len(), 1);
    assert!(m["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(m["versions"]["hermheat"].is_string());
    let arts = m["artifacts"].as_array().unwrap();
    assert!(arts.iter().any(|a| a["file"] == "norms.csv"));
}

#[test]
fn check_and_defaults_print_canonical_form() {
    let o = Command::new(bin()).args(["defaults", "solve", "--output-dir", "x"]).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, emit(&ExperimentConfig::with_defaults(hermheat_cli::Command::Solve, "x")));

    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "c.toml", "output_dir = \"x\"\ncommand = \"solve\"\n");
    let o = Command::new(bin()).arg("check").arg(&p).output().unwrap();
    assert!(o.status.success());
    assert_eq!(String::from_utf8(o.stdout).unwrap(), text);

    let p = write_config(dir.path(), "bad.toml", "command = \"solve\"\noutput_dir = \"x\"\n[solve]\nnorm = { p = 2, q = 3 }\n");
    let o = Command::new(bin()).arg("check").arg(&p).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
