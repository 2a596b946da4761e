//! One-parameter sweeps of the gap edges over radius, lattice constant, wall
//! thickness or Young's modulus, with the first Bragg frequency alongside.
//!
//! Rows are independent and computed in parallel; the output keeps the
//! input order, so an identical spec gives bitwise-identical rows.

use crate::cpa::{cpa_gap_n0, cpa_gap_n1};
use crate::error::{Error, Result};
use crate::foldy::{foldy_gap_n0, foldy_gap_n1};
use crate::mae::{mae_gap_n0, MaeOptions};
use crate::model::{ArrayConfig, BandGap, MethodId};
use crate::rayleigh::{rayleigh_gaps, RayleighOptions};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Frequency grid of the Rayleigh scan inside sweeps.
pub const SWEEP_RAYLEIGH_GRID: usize = 500;

/// Flag set when the breathing resonance `K0_hat` lies above the first Bragg frequency.
pub const FLAG_N0_ABOVE_BRAGG: &str = "n0_above_bragg";
/// Flag set when the dipole resonance `K1` lies above the first Bragg frequency.
pub const FLAG_N1_ABOVE_BRAGG: &str = "n1_above_bragg";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Shell mid-surface radius `a` [m].
    Radius,
    /// Lattice constant `L` [m].
    LatticeConstant,
    /// Full wall thickness `2h` [m].
    Thickness,
    /// Young's modulus `E` [Pa].
    YoungsModulus,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::Radius => "radius",
            SweepVariable::LatticeConstant => "lattice_constant",
            SweepVariable::Thickness => "thickness",
            SweepVariable::YoungsModulus => "youngs_modulus",
        }
    }

    /// `base` with the swept parameter set to `x`.
    pub fn apply(&self, base: &ArrayConfig, x: f64) -> Result<ArrayConfig> {
        match self {
            SweepVariable::Radius => base.with_radius(x),
            SweepVariable::LatticeConstant => base.with_lattice_constant(x),
            SweepVariable::Thickness => base.with_thickness(x),
            SweepVariable::YoungsModulus => base.with_youngs_modulus(x),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "radius" | "a" => Ok(SweepVariable::Radius),
            "lattice_constant" | "lattice" | "l" => Ok(SweepVariable::LatticeConstant),
            "thickness" | "2h" => Ok(SweepVariable::Thickness),
            "youngs_modulus" | "youngs" | "e" => Ok(SweepVariable::YoungsModulus),
            other => Err(Error::InvalidConfig(format!("unknown sweep variable `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    /// `[lo, hi]` in SI units.
    pub range: (f64, f64),
    pub samples: usize,
    pub base: ArrayConfig,
    pub methods: Vec<MethodId>,
}

impl SweepSpec {
    /// Checks the range, the sample count and every generated configuration.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.range;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidConfig(format!("sweep range must satisfy lo < hi, got [{lo}, {hi}]")));
        }
        if self.samples < 2 {
            return Err(Error::InvalidConfig(format!("sweep needs at least 2 samples, got {}", self.samples)));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("no methods requested".into()));
        }
        for x in self.values() {
            self.variable.apply(&self.base, x)?;
        }
        Ok(())
    }

    /// Evenly spaced swept values, ascending, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        let (lo, hi) = self.range;
        let n = self.samples.max(2);
        (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect()
    }

    /// Requested methods without duplicates, in a fixed order.
    pub fn method_list(&self) -> Vec<MethodId> {
        let mut m = self.methods.clone();
        m.sort();
        m.dedup();
        m
    }
}

/// Gaps of one method at one sweep value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodGaps {
    pub method: MethodId,
    pub n0: Option<BandGap>,
    pub n1: Option<BandGap>,
    /// Messages of the failed evaluations.
    pub errors: Vec<String>,
}

impl MethodGaps {
    pub fn gap(&self, n_mode: u8) -> Option<&BandGap> {
        match n_mode {
            0 => self.n0.as_ref(),
            1 => self.n1.as_ref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub x: f64,
    /// `pi a^2 / L^2` with the mid-surface radius, as used by the models.
    pub filling_fraction: f64,
    /// `pi (a + h)^2 / L^2`: the area actually covered by the shells.
    pub outer_filling_fraction: f64,
    /// First Bragg frequency `c_o / (2L)` [Hz].
    pub bragg_f: f64,
    pub gaps: Vec<MethodGaps>,
    pub flags: Vec<String>,
}

impl SweepRow {
    pub fn method(&self, m: MethodId) -> Option<&MethodGaps> {
        self.gaps.iter().find(|g| g.method == m)
    }

    pub fn gap(&self, m: MethodId, n_mode: u8) -> Option<&BandGap> {
        self.method(m)?.gap(n_mode)
    }

    /// No resonance of interest above the Bragg frequency.
    pub fn in_valid_regime(&self) -> bool {
        self.flags.is_empty()
    }
}

fn split<T>(r: Result<T>, errors: &mut Vec<String>, label: &str) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(format!("{label}: {e}"));
            None
        }
    }
}

/// Both gaps of one method; failures are recorded, never propagated.
pub fn method_gaps(method: MethodId, cfg: &ArrayConfig, rayleigh: &RayleighOptions) -> MethodGaps {
    let mut errors = Vec::new();
    let (n0, n1) = match method {
        MethodId::Foldy => (Some(foldy_gap_n0(cfg)), Some(foldy_gap_n1(cfg))),
        MethodId::Cpa => (Some(cpa_gap_n0(cfg)), split(cpa_gap_n1(cfg), &mut errors, "n1")),
        MethodId::Mae => (split(mae_gap_n0(cfg, &MaeOptions::default()), &mut errors, "n0"), None),
        MethodId::Rayleigh => match rayleigh_gaps(cfg, rayleigh) {
            Ok([g0, g1]) => (Some(g0), Some(g1)),
            Err(e) => {
                errors.push(e.to_string());
                (None, None)
            }
        },
    };
    MethodGaps { method, n0, n1, errors }
}

/// Evaluates one configuration; `x` is the swept value it came from.
pub fn sweep_row(x: f64, cfg: &ArrayConfig, methods: &[MethodId], rayleigh: &RayleighOptions) -> SweepRow {
    let p = cfg.params();
    let bragg_f = cfg.bragg_frequency();
    let mut flags = Vec::new();
    if cfg.k_to_hz(p.k0_hat) > bragg_f {
        flags.push(FLAG_N0_ABOVE_BRAGG.to_string());
    }
    if cfg.k_to_hz(p.k1) > bragg_f {
        flags.push(FLAG_N1_ABOVE_BRAGG.to_string());
    }
    let outer = cfg.shell.a + cfg.shell.h;
    SweepRow {
        x,
        filling_fraction: cfg.filling_fraction(),
        outer_filling_fraction: PI * outer * outer / cfg.area(),
        bragg_f,
        gaps: methods.iter().map(|&m| method_gaps(m, cfg, rayleigh)).collect(),
        flags,
    }
}

/// Rows in ascending `x`. The Rayleigh method, when requested, runs with a
/// [`SWEEP_RAYLEIGH_GRID`]-point frequency grid.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let methods = spec.method_list();
    let rayleigh = RayleighOptions { grid: SWEEP_RAYLEIGH_GRID, ..RayleighOptions::default() };
    let cfgs = spec
        .values()
        .into_iter()
        .map(|x| Ok((x, spec.variable.apply(&spec.base, x)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(cfgs.par_iter().map(|(x, c)| sweep_row(*x, c, &methods, &rayleigh)).collect())
}

/// Widths of one method and mode along a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthSeries {
    pub method: MethodId,
    pub n_mode: u8,
    /// `f_upper - f_lower` [Hz] per row; `None` where the gap is missing.
    pub widths: Vec<Option<f64>>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthReport {
    pub x: Vec<f64>,
    pub series: Vec<WidthSeries>,
}

impl WidthReport {
    pub fn series(&self, method: MethodId, n_mode: u8) -> Option<&WidthSeries> {
        self.series.iter().find(|s| s.method == method && s.n_mode == n_mode)
    }
}

/// Per-row widths and their extremes, for every method and mode present.
pub fn gap_width_report(rows: &[SweepRow]) -> WidthReport {
    let mut methods: Vec<MethodId> = rows.iter().flat_map(|r| r.gaps.iter().map(|g| g.method)).collect();
    methods.sort();
    methods.dedup();
    let mut series = Vec::new();
    for m in methods {
        for n in 0..2u8 {
            let widths: Vec<Option<f64>> = rows.iter().map(|r| r.gap(m, n).map(BandGap::width)).collect();
            if widths.iter().all(Option::is_none) {
                continue;
            }
            let present = widths.iter().flatten().copied();
            let min = present.clone().reduce(f64::min);
            let max = present.reduce(f64::max);
            series.push(WidthSeries { method: m, n_mode: n, widths, min, max });
        }
    }
    WidthReport { x: rows.iter().map(|r| r.x).collect(), series }
}
