use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sit_squeeze::config::RunConfig;
use sit_squeeze::output::sha256_hex;

const BIN: &str = env!("CARGO_BIN_EXE_sit-squeeze");

const SMALL: &str = "\
[gas]
temperature = 273
isotopes = 202-only

[grid]
n_z = 4
n_t = 1536
window_tp = 30
n_freq_bins = 1
n_samples = 2

[ensemble]
n_traj = 20
batch_count = 4

[scan]
phase_points = 8
detunings_tp = 0, 4
temperatures = 273, 293
";

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

fn sit(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("SIT_SQUEEZE_THREADS")
        .output()
        .unwrap()
}

fn run_into(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    sit(&args)
}

fn names(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    v.sort();
    v
}

#[test]
fn phase_run_writes_tables_plots_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = run_into(&cfg, &out, &["--seed", "11"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        names(&out),
        ["heatmap.svg", "length.svg", "manifest.txt", "phase.svg", "squeezing_surface.csv"]
    );

    let csv = fs::read_to_string(out.join("squeezing_surface.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("z,theta,S,S_dB,stderr"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 5);
    for cell in first {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.len(), 10, "{cell}");
    }
    assert_eq!(csv.lines().count(), 1 + 2 * 8);

    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("# seed: 11"));
    assert!(manifest.contains("# discarded: 0"));
    assert!(manifest.contains("# wall_time_s: "));
    assert!(manifest.contains(&format!("# version: {}", env!("CARGO_PKG_VERSION"))));
    for name in ["squeezing_surface.csv", "phase.svg", "length.svg", "heatmap.svg"] {
        let sum = sha256_hex(&fs::read(out.join(name)).unwrap());
        assert!(manifest.contains(&format!("# sha256 {sum}  {name}")), "{name}");
    }

    // The manifest is itself a config reproducing the run.
    let echoed = RunConfig::parse(&manifest).unwrap();
    let mut original = RunConfig::parse(SMALL).unwrap();
    original.ensemble.master_seed = 11;
    original.output.directory = out.clone();
    assert_eq!(echoed, original);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(run_into(&cfg, &a, &["--threads", "1"]).status.code(), Some(0));
    assert_eq!(run_into(&cfg, &b, &["--threads", "4"]).status.code(), Some(0));
    let o = Command::new(BIN)
        .args(["run", "--config", cfg.to_str().unwrap(), "--out", c.to_str().unwrap()])
        .env("SIT_SQUEEZE_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let csv = |d: &Path| fs::read(d.join("squeezing_surface.csv")).unwrap();
    assert_eq!(csv(&a), csv(&b));
    assert_eq!(csv(&a), csv(&c));
    assert_eq!(fs::read(a.join("phase.svg")).unwrap(), fs::read(b.join("phase.svg")).unwrap());
}

#[test]
fn different_seeds_differ() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run_into(&cfg, &a, &["--seed", "1"]).status.code(), Some(0));
    assert_eq!(run_into(&cfg, &b, &["--seed", "2"]).status.code(), Some(0));
    let csv = |d: &Path| fs::read(d.join("squeezing_surface.csv")).unwrap();
    assert_ne!(csv(&a), csv(&b));
}

#[test]
fn detuning_scan_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = run_into(&cfg, &out, &["--scan", "detuning"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("detuning_scan.csv")).unwrap();
    assert!(csv.starts_with("delta,S_opt,S_opt_dB,L_opt,stderr"));
    assert_eq!(csv.lines().count(), 3);
    assert!(out.join("detuning.svg").exists());
}

#[test]
fn pressure_scan_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = run_into(&cfg, &out, &["--scan", "pressure"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("pressure_scan.csv")).unwrap();
    assert!(csv.starts_with("temperature,pressure,S_opt"));
    assert_eq!(csv.lines().count(), 3);
    assert!(out.join("pressure.svg").exists());
}

#[test]
fn unknown_key_is_a_config_error_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SMALL}\n[output]\ncolour = blue\n"));
    let o = run_into(&cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 22"), "{err}");
    assert!(err.contains("colour"), "{err}");
}

#[test]
fn bad_arguments_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    assert_eq!(run_into(&cfg, &out, &["--scan", "sideways"]).status.code(), Some(1));
    assert_eq!(run_into(&cfg, &out, &["--threads", "0"]).status.code(), Some(1));
    assert_eq!(sit(&["run"]).status.code(), Some(1));
    assert_eq!(sit(&["run", "--config", "/nonexistent/x.cfg"]).status.code(), Some(1));
    assert_eq!(sit(&["--help"]).status.code(), Some(0));
    let o = Command::new(BIN)
        .args(["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .env("SIT_SQUEEZE_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run_into(&cfg, &blocker.join("out"), &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn plot_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    assert_eq!(run_into(&cfg, &out, &[]).status.code(), Some(0));
    let csv = out.join("squeezing_surface.csv");
    let svg = dir.path().join("re.svg");
    let o = sit(&["plot", "--csv", csv.to_str().unwrap(), "--kind", "heatmap", "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&svg).unwrap(), fs::read(out.join("heatmap.svg")).unwrap());

    // Surface table lacks the detuning columns.
    let o = sit(&["plot", "--csv", csv.to_str().unwrap(), "--kind", "detuning", "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing column"));

    let junk = dir.path().join("junk.csv");
    fs::write(&junk, "z,theta\n1,abc\n").unwrap();
    let o = sit(&["plot", "--csv", junk.to_str().unwrap(), "--kind", "phase", "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));

    let o = sit(&["plot", "--csv", "/nonexistent.csv", "--kind", "phase", "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(names(dir.path()).iter().all(|n| !n.ends_with(".partial")));
}
