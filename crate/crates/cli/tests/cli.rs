use shellgap::foldy::foldy_gap_root;
use shellgap::rayleigh::extract_gap;
use shellgap::sweep::{run_sweep, SweepRow, SweepSpec, SweepVariable};
use shellgap::{ArrayConfig, DispersionCurve, MethodId};
use shellgap_cli::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_shellgap"));
    c.env_remove("SHELLGAP_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write_cfg(dir: &TempDir, name: &str, c: &ArrayConfig) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, render_config(c)).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(p).unwrap();
    let h = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (h, rows)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Rebuilds curves from band-structure CSV rows.
fn curves_from_csv(rows: &[Vec<String>], method: MethodId) -> Vec<DispersionCurve> {
    let mut by: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        by.entry(r[3].parse().unwrap()).or_default().push((r[0].parse().unwrap(), r[1].parse().unwrap()));
    }
    by.into_iter().map(|(i, points)| DispersionCurve { method, points, branch_index: i }).collect()
}

#[test]
fn config_text_round_trips() {
    let c = ArrayConfig::latex_in_air(0.0312, 0.0913).unwrap();
    assert_eq!(parse_config(&render_config(&c)).unwrap(), c);
}

#[test]
fn config_accepts_comments_and_defaults() {
    let c = parse_config("# comment only\n\n  lattice.L = 0.1 # trailing\nshell.E=2e6\n").unwrap();
    let d = ArrayConfig::default();
    assert_eq!(c.lattice.l, 0.1);
    assert_eq!(c.shell.e, 2e6);
    assert_eq!((c.shell.a, c.shell.h, c.fluid), (d.shell.a, d.shell.h, d.fluid));
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    assert_eq!(load_config(&root.join("default.cfg")).unwrap(), ArrayConfig::default());
    let dense = load_config(&root.join("dense.cfg")).unwrap();
    assert!((dense.filling_fraction() - 0.690).abs() < 1e-3);
}

#[test]
fn malformed_configs_are_rejected() {
    for (text, line) in [
        ("shell.a 0.02\n", Some(1)),
        ("shell.a = x\n", Some(1)),
        ("\nshell.mass = 1\n", Some(2)),
        ("shell.a = 0.02\nshell.a = 0.03\n", Some(2)),
        ("shell.a = 0.05\n", None),
        ("fluid.c = -1\n", None),
    ] {
        let e = parse_config(text).unwrap_err();
        match line {
            Some(l) => assert!(matches!(e, ConfigError::Syntax { line, .. } if line == l), "{text:?}: {e}"),
            None => assert!(matches!(e, ConfigError::Invalid(_)), "{text:?}: {e}"),
        }
    }
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "shell.a = 0.0275\nlattice.L\n").unwrap();
    let out = dir.path().join("gaps.csv");
    let o = run(&["gaps", "--config", s(&cfg), "--methods", "foldy", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains("line 2"));
}

#[test]
fn missing_config_exits_2() {
    let dir = TempDir::new().unwrap();
    let o = run(&["gaps", "--config", s(&dir.path().join("nope.cfg")), "--out", "-"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn foldy_band_structure_carries_the_foldy_gaps() {
    let dir = TempDir::new().unwrap();
    let c = ArrayConfig::default();
    let cfg = write_cfg(&dir, "c.cfg", &c);
    let out = dir.path().join("bands.csv");
    let o = run(&["band-structure", "--config", s(&cfg), "--method", "foldy", "--grid", "4000", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&out);
    assert_eq!(h, BAND_HEADER);
    assert!(rows.iter().all(|r| r[4] == "foldy"));
    for r in &rows {
        let (kl, f): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(rel(f, c.k_to_hz(kl / c.lattice.l)) < 1e-15);
    }
    let curves = curves_from_csv(&rows, MethodId::Foldy);
    for n in 0..2u8 {
        let g = extract_gap(&curves, n, &c).unwrap();
        let r = foldy_gap_root(n, &c).unwrap();
        assert!(rel(g.f_lower, r.f_lower) < 1e-6 && rel(g.f_upper, r.f_upper) < 1e-9, "n={n}");
    }
}

#[test]
fn rayleigh_band_structure_shows_two_resonance_gaps() {
    let dir = TempDir::new().unwrap();
    let c = ArrayConfig::default();
    let cfg = write_cfg(&dir, "c.cfg", &c);
    let out = dir.path().join("bands.csv");
    let json = dir.path().join("bands.json");
    let o = run(&[
        "band-structure", "--config", s(&cfg), "--method", "rayleigh", "--grid", "800", "--per-segment", "24",
        "--out", s(&out), "--json", s(&json),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = read_csv(&out);
    let curves = curves_from_csv(&rows, MethodId::Rayleigh);
    let (g0, g1) = (extract_gap(&curves, 0, &c).unwrap(), extract_gap(&curves, 1, &c).unwrap());
    assert!(g1.f_upper < g0.f_lower && g0.f_upper < c.bragg_frequency());
    assert!(g0.width() > 0.0 && g1.width() > 0.0);
    let back: Vec<DispersionCurve> = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back, curves);
}

#[test]
fn band_structure_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let c = ArrayConfig::default();
    let cfg = write_cfg(&dir, "c.cfg", &c);
    let (out, json) = (dir.path().join("b.csv"), dir.path().join("b.json"));
    let o = run(&["band-structure", "--config", s(&cfg), "--method", "cpa", "--grid", "500", "--out", s(&out), "--json", s(&json)]);
    assert!(o.status.success());
    let back: Vec<DispersionCurve> = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let args = BandStructureArgs { method: MethodId::Cpa, grid: 500, ..BandStructureArgs::default() };
    assert_eq!(back, band_structure(&c, &args).unwrap());
}

#[test]
fn foldy_and_cpa_coincide_at_low_filling() {
    let dir = TempDir::new().unwrap();
    let c = ArrayConfig::default().with_lattice_constant(0.0275 * (PI / 1e-3).sqrt()).unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &c);
    let out = dir.path().join("g.csv");
    let o = run(&["gaps", "--config", s(&cfg), "--methods", "foldy,cpa", "--out", s(&out)]);
    assert!(o.status.success());
    let (h, rows) = read_csv(&out);
    assert_eq!(h, GAPS_HEADER);
    assert_eq!(rows.len(), 4);
    let get = |m: &str, n: &str, col: usize| -> f64 {
        rows.iter().find(|r| r[0] == m && r[1] == n).unwrap()[col].parse().unwrap()
    };
    for n in ["0", "1"] {
        for col in [2, 3] {
            assert!(rel(get("foldy", n, col), get("cpa", n, col)) <= 1e-3, "n={n} col={col}");
        }
    }
    assert!(rows.iter().all(|r| r[5] == "ok"));
}

#[test]
fn mae_reports_only_the_breathing_gap() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &ArrayConfig::default());
    let out = dir.path().join("g.csv");
    assert!(run(&["gaps", "--config", s(&cfg), "--methods", "mae", "--out", s(&out)]).status.success());
    let (_, rows) = read_csv(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0][0].as_str(), rows[0][1].as_str()), ("mae", "0"));
    let w: f64 = rows[0][4].parse().unwrap();
    let (lo, up): (f64, f64) = (rows[0][2].parse().unwrap(), rows[0][3].parse().unwrap());
    assert_eq!(w, up - lo);
}

#[test]
fn empty_method_set_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &ArrayConfig::default());
    for m in ["", ",", "foldy,magic"] {
        let o = run(&["gaps", "--config", s(&cfg), "--methods", m, "--out", "-"]);
        assert_eq!(o.status.code(), Some(2), "{m:?}");
    }
}

#[test]
fn failed_methods_are_recorded_and_all_failed_exits_3() {
    let dir = TempDir::new().unwrap();
    // The breathing resonance of these thick shells lies beyond the first Bragg value.
    let c = ArrayConfig::latex_in_air(0.005, 0.08).unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &c);
    let out = dir.path().join("g.csv");
    let o = run(&["gaps", "--config", s(&cfg), "--methods", "mae", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
    let o = run(&["gaps", "--config", s(&cfg), "--methods", "mae,foldy", "--out", s(&out)]);
    assert!(o.status.success());
    let (_, rows) = read_csv(&out);
    let mae = rows.iter().find(|r| r[0] == "mae").unwrap();
    assert!(mae[2].is_empty() && mae[5].contains("no root"));
}

#[test]
fn gaps_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let c = ArrayConfig::default();
    let cfg = write_cfg(&dir, "c.cfg", &c);
    let (out, json) = (dir.path().join("g.csv"), dir.path().join("g.json"));
    assert!(run(&["gaps", "--config", s(&cfg), "--methods", "cpa,mae,foldy", "--out", s(&out), "--json", s(&json)]).status.success());
    let back: Vec<GapRecord> = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(back, gaps(&c, &[MethodId::Cpa, MethodId::Mae, MethodId::Foldy]));
    // The CSV carries the same numbers bit for bit.
    let (_, rows) = read_csv(&out);
    for (r, g) in rows.iter().zip(&back) {
        let gap = g.gap.unwrap();
        assert_eq!(r[2].parse::<f64>().unwrap().to_bits(), gap.f_lower.to_bits());
        assert_eq!(r[3].parse::<f64>().unwrap().to_bits(), gap.f_upper.to_bits());
    }
}

#[test]
fn radius_sweep_spans_the_filling_range() {
    let dir = TempDir::new().unwrap();
    let c = ArrayConfig::default();
    let cfg = write_cfg(&dir, "c.cfg", &c);
    let (out, json) = (dir.path().join("s.csv"), dir.path().join("s.json"));
    let o = run(&[
        "sweep", "--config", s(&cfg), "--var", "radius", "--lo", "0.01", "--hi", "0.0395", "--samples", "60",
        "--out", s(&out), "--json", s(&json),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = read_csv(&out);
    assert_eq!(
        h,
        [
            "x", "filling_fraction", "bragg_f_hz", "foldy_0_lower_hz", "foldy_0_upper_hz", "foldy_1_lower_hz",
            "foldy_1_upper_hz", "mae_0_lower_hz", "mae_0_upper_hz", "cpa_0_lower_hz", "cpa_0_upper_hz",
            "cpa_1_lower_hz", "cpa_1_upper_hz", "flags",
        ]
    );
    assert_eq!(rows.len(), 60);
    let f = |r: &Vec<String>| r[1].parse::<f64>().unwrap();
    assert!(rel(f(&rows[0]), PI * 0.01f64.powi(2) / 0.0064) < 1e-15);
    assert!(rel(f(&rows[59]), PI * 0.0395f64.powi(2) / 0.0064) < 1e-15);
    assert!((f(&rows[0]) - 0.049).abs() < 1e-3 && (f(&rows[59]) - 0.766).abs() < 1e-3);

    let back: Vec<SweepRow> = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let spec = SweepSpec {
        variable: SweepVariable::Radius,
        range: (0.01, 0.0395),
        samples: 60,
        base: c,
        methods: vec![MethodId::Foldy, MethodId::Mae, MethodId::Cpa],
    };
    assert_eq!(back, run_sweep(&spec).unwrap());
}

#[test]
fn youngs_modulus_sweep_covers_the_requested_axis() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &ArrayConfig::default());
    let out = dir.path().join("s.csv");
    let o = run(&[
        "sweep", "--config", s(&cfg), "--var", "youngs", "--lo", "1e5", "--hi", "2e7", "--samples", "5",
        "--methods", "foldy", "--out", s(&out),
    ]);
    assert!(o.status.success());
    let (h, rows) = read_csv(&out);
    assert_eq!(h.len(), 3 + 4 + 1);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 1e5);
    assert_eq!(rows[4][0].parse::<f64>().unwrap(), 2e7);
}

#[test]
fn single_sample_sweep_exits_2() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &ArrayConfig::default());
    let out = dir.path().join("s.csv");
    let o = run(&["sweep", "--config", s(&cfg), "--var", "radius", "--lo", "0.01", "--hi", "0.02", "--samples", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    // Shells that would overlap are a configuration error too.
    let o = run(&["sweep", "--config", s(&cfg), "--var", "radius", "--lo", "0.01", "--hi", "0.05", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn thread_cap_is_honoured_and_checked() {
    let dir = TempDir::new().unwrap();
    let cfg = write_cfg(&dir, "c.cfg", &ArrayConfig::default());
    let ok = bin().env("SHELLGAP_THREADS", "1").args(["gaps", "--config", s(&cfg), "--out", "-"]).output().unwrap();
    assert!(ok.status.success());
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.starts_with("method,n_mode,f_lower_hz,f_upper_hz,width_hz,status\n"));
    let bad = bin().env("SHELLGAP_THREADS", "many").args(["gaps", "--config", s(&cfg), "--out", "-"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn numbers_carry_seventeen_significant_digits() {
    assert_eq!(num(0.1), "1.0000000000000001e-1");
    for x in [PI, 1.0 / 3.0, 1234.5678e-9, f64::MIN_POSITIVE] {
        assert_eq!(num(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(run(&["plot"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
