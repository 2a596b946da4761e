//! Command implementations behind the `shellgap` binary: band structures,
//! gap tables and parameter sweeps written as CSV, with optional JSON.
//!
//! Frequencies leave the solvers as wavenumbers and are converted to Hz only
//! here, when rows are written.

pub mod config;

use serde::{Deserialize, Serialize};
use shellgap::cpa::{cpa_curves, cpa_gap_n0, cpa_gap_n1};
use shellgap::foldy::{foldy_curves, foldy_gap_n0, foldy_gap_n1};
use shellgap::mae::{mae_curves, mae_gap_n0, MaeOptions};
use shellgap::rayleigh::{brillouin_path, default_window, gamma_x_path, rayleigh_gaps, trace_points, RayleighOptions};
use shellgap::sweep::{run_sweep, SweepRow, SweepSpec, SweepVariable};
use shellgap::{ArrayConfig, BandGap, DispersionCurve, MethodId};
use std::fs;
use std::io::Write;
use std::path::Path;

pub use config::{load_config, parse_config, render_config, ConfigError};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Failure of a command, mapped to its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("output: {0}")]
    Output(String),
    #[error("solver: {0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Output(_) => EXIT_USAGE,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl From<shellgap::Error> for CliError {
    fn from(e: shellgap::Error) -> Self {
        match e {
            shellgap::Error::InvalidConfig(m) => CliError::Usage(m),
            other => CliError::Solver(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Caps the worker pool from `SHELLGAP_THREADS` (`0` or unset: automatic).
pub fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("SHELLGAP_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("SHELLGAP_THREADS must be a non-negative integer, got `{v}`")))?;
    if n > 0 {
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Full-precision float for CSV: 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Comma-separated method list; duplicates removed, order kept.
pub fn parse_methods(s: &str) -> CliResult<Vec<MethodId>> {
    let mut out: Vec<MethodId> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let m: MethodId = part.parse().map_err(|e: shellgap::Error| CliError::Usage(e.to_string()))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    Ok(out)
}

/// Writes `bytes` to `path`, or to standard output for `-`.
pub fn write_output(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if path == Path::new("-") {
        return std::io::stdout().write_all(bytes).map_err(|e| CliError::Output(e.to_string()));
    }
    fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    write_output(path, text.as_bytes())
}

fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathKind {
    /// `(0,0)-(pi,0)`, the segment used for gap extraction.
    GammaX,
    /// `(0,0)-(pi,0)-(pi,pi)-(0,0)`.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandStructureArgs {
    pub method: MethodId,
    pub n_trunc: usize,
    pub grid: usize,
    pub per_segment: usize,
    pub path: PathKind,
    /// Frequency window in Hz; defaults to just below the first Bragg frequency.
    pub f_range: Option<(f64, f64)>,
}

impl Default for BandStructureArgs {
    fn default() -> Self {
        let r = RayleighOptions::default();
        BandStructureArgs {
            method: MethodId::Rayleigh,
            n_trunc: r.n_trunc,
            grid: r.grid,
            per_segment: r.per_segment,
            path: PathKind::GammaX,
            f_range: None,
        }
    }
}

/// Dispersion curves of one method. Foldy and CPA curves are isotropic
/// `beta(k_o)` relations; the path only matters for Rayleigh and MAE.
pub fn band_structure(cfg: &ArrayConfig, args: &BandStructureArgs) -> CliResult<Vec<DispersionCurve>> {
    let window = args.f_range.unwrap_or_else(|| default_window(cfg));
    if !(window.0 > 0.0 && window.1 > window.0) {
        return Err(CliError::Usage(format!("frequency window must satisfy 0 < lo < hi, got {window:?}")));
    }
    if args.grid < 3 {
        return Err(CliError::Usage(format!("grid needs at least 3 points, got {}", args.grid)));
    }
    let path = |per| match args.path {
        PathKind::GammaX => gamma_x_path(cfg, per),
        PathKind::Full => brillouin_path(cfg, per),
    };
    let curves = match args.method {
        MethodId::Rayleigh => {
            let o = RayleighOptions { n_trunc: args.n_trunc, grid: args.grid, per_segment: args.per_segment, ..RayleighOptions::default() };
            trace_points(&path(o.per_segment), window, cfg, &o, MethodId::Rayleigh)?
        }
        MethodId::Mae => {
            let o = RayleighOptions { n_trunc: 0, grid: args.grid, ..RayleighOptions::default() };
            let m = MaeOptions::default();
            match args.path {
                PathKind::GammaX => mae_curves(cfg, Some(window), args.grid, &m)?,
                PathKind::Full => {
                    let o = RayleighOptions { lattice_m: m.lattice_m, z_form: m.z_form, ..o };
                    trace_points(&path(args.per_segment), window, cfg, &o, MethodId::Mae)?
                }
            }
        }
        MethodId::Foldy => foldy_curves(cfg, window, args.grid)?,
        MethodId::Cpa => cpa_curves(cfg, window, args.grid)?,
    };
    Ok(curves)
}

pub const BAND_HEADER: [&str; 5] = ["betaL", "k_oL", "frequency_hz", "branch", "method"];

pub fn band_structure_csv(cfg: &ArrayConfig, curves: &[DispersionCurve]) -> CliResult<Vec<u8>> {
    let l = cfg.lattice.l;
    let rows: Vec<Vec<String>> = curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(move |&(bl, kl)| {
                vec![num(bl), num(kl), num(cfg.k_to_hz(kl / l)), c.branch_index.to_string(), c.method.to_string()]
            })
        })
        .collect();
    csv_bytes(&BAND_HEADER.map(String::from), &rows)
}

pub fn cmd_band_structure(config: &Path, args: &BandStructureArgs, out: &Path, json: Option<&Path>) -> CliResult<()> {
    let cfg = load_config(config)?;
    let curves = band_structure(&cfg, args)?;
    write_output(out, &band_structure_csv(&cfg, &curves)?)?;
    if let Some(j) = json {
        write_json(j, &curves)?;
    }
    Ok(())
}

/// One line of the gap table: a gap, or the reason it is missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRecord {
    pub method: MethodId,
    pub n_mode: u8,
    pub gap: Option<BandGap>,
    /// `ok`, or the solver's message.
    pub status: String,
}

fn record(method: MethodId, n_mode: u8, r: shellgap::Result<BandGap>) -> GapRecord {
    match r {
        Ok(g) => GapRecord { method, n_mode, gap: Some(g), status: "ok".into() },
        Err(e) => GapRecord { method, n_mode, gap: None, status: e.to_string() },
    }
}

/// Gaps of every requested method. Foldy uses the leading-order closed
/// forms, CPA its closed forms, MAE only the breathing gap, Rayleigh the
/// Gamma-X extraction.
pub fn gaps(cfg: &ArrayConfig, methods: &[MethodId]) -> Vec<GapRecord> {
    let mut out = Vec::new();
    for &m in methods {
        match m {
            MethodId::Foldy => {
                out.push(record(m, 0, Ok(foldy_gap_n0(cfg))));
                out.push(record(m, 1, Ok(foldy_gap_n1(cfg))));
            }
            MethodId::Cpa => {
                out.push(record(m, 0, Ok(cpa_gap_n0(cfg))));
                out.push(record(m, 1, cpa_gap_n1(cfg)));
            }
            MethodId::Mae => out.push(record(m, 0, mae_gap_n0(cfg, &MaeOptions::default()))),
            MethodId::Rayleigh => match rayleigh_gaps(cfg, &RayleighOptions::default()) {
                Ok([g0, g1]) => {
                    out.push(record(m, 0, Ok(g0)));
                    out.push(record(m, 1, Ok(g1)));
                }
                Err(e) => {
                    out.push(record(m, 0, Err(e.clone())));
                    out.push(record(m, 1, Err(e)));
                }
            },
        }
    }
    out
}

pub const GAPS_HEADER: [&str; 6] = ["method", "n_mode", "f_lower_hz", "f_upper_hz", "width_hz", "status"];

pub fn gaps_csv(records: &[GapRecord]) -> CliResult<Vec<u8>> {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.method.to_string(),
                r.n_mode.to_string(),
                opt_num(r.gap.map(|g| g.f_lower)),
                opt_num(r.gap.map(|g| g.f_upper)),
                opt_num(r.gap.map(|g| g.width())),
                r.status.clone(),
            ]
        })
        .collect();
    csv_bytes(&GAPS_HEADER.map(String::from), &rows)
}

pub fn cmd_gaps(config: &Path, methods: &[MethodId], out: &Path, json: Option<&Path>) -> CliResult<()> {
    if methods.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    let cfg = load_config(config)?;
    let records = gaps(&cfg, methods);
    if records.iter().all(|r| r.gap.is_none()) {
        let why: Vec<String> = records.iter().map(|r| format!("{} n={}: {}", r.method, r.n_mode, r.status)).collect();
        return Err(CliError::Solver(format!("every method failed ({})", why.join("; "))));
    }
    write_output(out, &gaps_csv(&records)?)?;
    if let Some(j) = json {
        write_json(j, &records)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepArgs {
    pub variable: SweepVariable,
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
    pub methods: Vec<MethodId>,
}

/// Modes each method reports in a sweep.
fn modes(m: MethodId) -> &'static [u8] {
    match m {
        MethodId::Mae => &[0],
        _ => &[0, 1],
    }
}

pub fn sweep_header(methods: &[MethodId]) -> Vec<String> {
    let mut h = vec!["x".to_string(), "filling_fraction".into(), "bragg_f_hz".into()];
    for &m in methods {
        for n in modes(m) {
            h.push(format!("{m}_{n}_lower_hz"));
            h.push(format!("{m}_{n}_upper_hz"));
        }
    }
    h.push("flags".into());
    h
}

pub fn sweep_csv(rows: &[SweepRow], methods: &[MethodId]) -> CliResult<Vec<u8>> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![num(r.x), num(r.filling_fraction), num(r.bragg_f)];
            for &m in methods {
                for &n in modes(m) {
                    let g = r.gap(m, n);
                    v.push(opt_num(g.map(|g| g.f_lower)));
                    v.push(opt_num(g.map(|g| g.f_upper)));
                }
            }
            v.push(r.flags.join(";"));
            v
        })
        .collect();
    csv_bytes(&sweep_header(methods), &body)
}

pub fn cmd_sweep(config: &Path, args: &SweepArgs, out: &Path, json: Option<&Path>) -> CliResult<()> {
    if args.samples < 2 {
        return Err(CliError::Usage(format!("--samples must be at least 2, got {}", args.samples)));
    }
    if args.methods.is_empty() {
        return Err(CliError::Usage("no methods given".into()));
    }
    let cfg = load_config(config)?;
    let spec = SweepSpec {
        variable: args.variable,
        range: (args.lo, args.hi),
        samples: args.samples,
        base: cfg,
        methods: args.methods.clone(),
    };
    let rows = run_sweep(&spec)?;
    write_output(out, &sweep_csv(&rows, &spec.method_list())?)?;
    if let Some(j) = json {
        write_json(j, &rows)?;
    }
    Ok(())
}
