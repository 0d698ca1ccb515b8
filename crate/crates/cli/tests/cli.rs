use std::path::Path;
use std::process::{Command, Output};

fn heslot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heslot"))
        .args(args)
        .env_remove("HESLOT_OUT_CSV")
        .env_remove("HESLOT_OUT_SVG")
        .env_remove("HESLOT_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const COARSE: &str = "[mesh]\nbackground = 80e-9\ncore = 20e-9\nslot_cells = 4\n\n[acoustics]\nq = [1e5]\n";

#[test]
fn help_lists_subcommands() {
    let o = heslot(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for sub in [
        "optical-mode",
        "acoustic-mode",
        "couple",
        "metrics",
        "capillary",
        "sweep",
    ] {
        assert!(text.contains(sub), "{sub}");
    }
}

#[test]
fn metrics_reference_point() {
    let o = heslot(&[
        "metrics",
        "--g0-hz",
        "250e3",
        "--kappa-hz",
        "1e9",
        "--omega-hz",
        "400e6",
        "--q",
        "1e8",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("C0 = 6.250000000e1"), "{text}");
    assert!(text.contains("sideband_resolved = false"));
}

#[test]
fn capillary_reports_transition() {
    let o = heslot(&["capillary", "--width-nm", "50", "--height-nm", "220"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let line = text.lines().find(|l| l.starts_with("d_crit_m")).unwrap();
    let d: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!((0.5e-9..10e-9).contains(&d));
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "[sweep]\nwidhts = [1e-8]\n");
    let o = heslot(&["--config", &cfg, "sweep"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("did you mean `widths`"), "{err}");

    let o = heslot(&["--workers", "0", "metrics"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_config_exits_3() {
    let o = heslot(&["--config", "/nonexistent/heslot.toml", "sweep"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_writes_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "ok.toml",
        &format!("{COARSE}\n[sweep]\nwidths = [40e-9, 80e-9]\nboundaries = [\"sealed\", \"open\"]\n"),
    );
    let csv = dir.path().join("out.csv");
    let svg = dir.path().join("out.svg");
    let o = heslot(&[
        "--config",
        &cfg,
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-svg",
        svg.to_str().unwrap(),
        "--workers",
        "2",
        "sweep",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",ok")));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
}

#[test]
fn all_failed_sweep_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "tiny.toml",
        "[sweep]\nwidths = [40e-9]\nboundaries = [\"sealed\"]\n\n[mesh]\nmax_cells = 100\n",
    );
    let csv = dir.path().join("out.csv");
    let o = heslot(&["--config", &cfg, "--out-csv", csv.to_str().unwrap(), "sweep"]);
    assert_eq!(o.status.code(), Some(1));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.lines().nth(1).unwrap().contains("failed: "));
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "one.toml",
        &format!("{COARSE}\n[geometry]\nslot_width = 50e-9\n"),
    );
    let csv = dir.path().join("no").join("such").join("out.csv");
    let o = heslot(&["--config", &cfg, "--out-csv", csv.to_str().unwrap(), "sweep"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn optical_mode_dumps_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", COARSE);
    let dump = dir.path().join("mode.txt");
    let o = heslot(&[
        "--config",
        &cfg,
        "optical-mode",
        "--width-nm",
        "60",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("polarization = TE-like"));
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.starts_with("# heslot field v1\nkind optical\n"));
}

#[test]
fn acoustic_mode_with_explicit_order() {
    let o = heslot(&["acoustic-mode", "--width-nm", "50", "--bc", "open", "--order", "128"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("m = 128"));
    assert!(text.contains("propagating = true"));
    assert!(text.contains("p_zp_Pa"));
}
