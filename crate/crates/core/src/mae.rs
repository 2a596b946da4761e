//! Matched-asymptotic refinement of the breathing gap's upper edge.
//!
//! Matching the inner shell solution to the periodic outer field at
//! `beta = 0` gives the scalar condition `Z_0 sigma_0 = 1`. Evaluated with the
//! reciprocal representation at `xi = L/2` and multiplied through by
//! `(k_o L)^2 J_0(k_o L/2)`, the residual reads
//!
//! `Z_0 {4 - (k_o L)^2 [Y_0(k_o L/2) - 4 S(k_o L)]} - (k_o L)^2 J_0(k_o L/2)`.
//!
//! The matching constant `K = ln 2 - gamma` cancels out of this final form.

use crate::error::{Error, Result};
use crate::lattice::{s_sum, DEFAULT_TRUNCATION};
use crate::model::{ArrayConfig, BandGap, DispersionCurve, MethodId};
use crate::rayleigh::{default_window, gamma_x_path, trace_points, RayleighOptions, ZForm};
use crate::roots::bisect;
use crate::shell::{loaded_resonance, z0_soft_approx, z_shell_exact};
use crate::special::{bessel_j, bessel_y};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Settings of the MAE edge search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaeOptions {
    /// Reciprocal window of the S-sum.
    pub lattice_m: usize,
    /// Form of `Z_0`: the inner solution carries the exact shell factor; the
    /// soft form reproduces the leading-order bookkeeping.
    pub z_form: ZForm,
    /// Bracketing step in `k_o L`.
    pub step: f64,
    /// Relative bisection tolerance.
    pub rel_tol: f64,
}

impl Default for MaeOptions {
    fn default() -> Self {
        MaeOptions { lattice_m: DEFAULT_TRUNCATION, z_form: ZForm::Exact, step: 1e-3, rel_tol: 1e-10 }
    }
}

fn z0(k_o: f64, cfg: &ArrayConfig, form: ZForm) -> Result<f64> {
    match form {
        ZForm::Exact => z_shell_exact(0, k_o, &cfg.shell, &cfg.fluid),
        ZForm::Soft => z0_soft_approx(k_o, &cfg.params(), cfg.shell.a),
    }
}

/// Matching residual at `k_o L` with the exact `Z_0`.
pub fn mae_matching_residual(k_l: f64, cfg: &ArrayConfig, m: usize) -> Result<f64> {
    mae_matching_residual_with(k_l, cfg, &MaeOptions { lattice_m: m, ..MaeOptions::default() })
}

pub fn mae_matching_residual_with(k_l: f64, cfg: &ArrayConfig, opts: &MaeOptions) -> Result<f64> {
    if !(k_l > 0.0) {
        return Err(Error::Domain(format!("k_o L must be positive, got {k_l}")));
    }
    let z = z0(k_l / cfg.lattice.l, cfg, opts.z_form)?;
    let s = s_sum(k_l, opts.lattice_m)?;
    let half = 0.5 * k_l;
    let kl2 = k_l * k_l;
    Ok(z * (4.0 - kl2 * (bessel_y(0, half)? - 4.0 * s)) - kl2 * bessel_j(0, half)?)
}

/// Pole of `Z_0` in the requested form [1/m]: `K0_hat` for the soft form,
/// the zero of the exact denominator otherwise.
pub fn breathing_resonance(cfg: &ArrayConfig, form: ZForm) -> Result<f64> {
    match form {
        ZForm::Soft => Ok(cfg.params().k0_hat),
        ZForm::Exact => loaded_resonance(0, &cfg.shell, &cfg.fluid),
    }
}

/// Upper edge of the breathing gap [Hz], exact `Z_0`.
pub fn mae_upper_edge_n0(cfg: &ArrayConfig, m: usize) -> Result<f64> {
    mae_upper_edge_with(cfg, &MaeOptions { lattice_m: m, ..MaeOptions::default() })
}

/// First root of the residual above [`breathing_resonance`], bracketed on a
/// uniform `k_o L` grid up to the first Bragg value `pi`.
///
/// Sign changes across the pole of `Z_0` are rejected: there the residual
/// grows instead of vanishing at the bisection limit.
pub fn mae_upper_edge_with(cfg: &ArrayConfig, opts: &MaeOptions) -> Result<f64> {
    let l = cfg.lattice.l;
    let f = |x: f64| mae_matching_residual_with(x, cfg, opts);
    let pole = breathing_resonance(cfg, opts.z_form)?;
    let start = pole * l * (1.0 + 1e-9);
    if start >= PI {
        return Err(Error::NoRootFound(format!("resonance k_o L = {start} lies above the first Bragg value")));
    }
    let mut lo = start;
    let mut flo = f(lo).ok();
    while lo < PI {
        let hi = (lo + opts.step).min(PI);
        let fhi = f(hi).ok();
        if let (Some(a), Some(b)) = (flo, fhi) {
            if a.signum() != b.signum() {
                if let Ok(x) = bisect(&f, lo, hi, opts.rel_tol) {
                    let fx = f(x).map(f64::abs).unwrap_or(f64::INFINITY);
                    if fx <= a.abs() + b.abs() {
                        return Ok(cfg.k_to_hz(x / l));
                    }
                }
            }
        }
        if hi >= PI {
            break;
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::NoRootFound(format!("no MAE root in ({start}, pi)")))
}

/// Breathing gap from the resonance to the MAE edge; MAE refines only the
/// upper edge. The lower edge is the pole of the same `Z_0` form, so with the
/// exact form it sits slightly below `K0_hat` and the interval stays ordered
/// at low filling fractions, where the exact edge can fall below `K0_hat`.
pub fn mae_gap_n0(cfg: &ArrayConfig, opts: &MaeOptions) -> Result<BandGap> {
    let upper = mae_upper_edge_with(cfg, opts)?;
    let lower = cfg.k_to_hz(breathing_resonance(cfg, opts.z_form)?);
    Ok(BandGap::new(0, lower, upper, MethodId::Mae))
}

/// Band structure of the monopole truncation: the `N = 0` Rayleigh system
/// with the MAE `Z_0` form, along Gamma-X.
pub fn mae_curves(cfg: &ArrayConfig, f_range: Option<(f64, f64)>, grid: usize, opts: &MaeOptions) -> Result<Vec<DispersionCurve>> {
    let ropts = RayleighOptions { n_trunc: 0, lattice_m: opts.lattice_m, grid, z_form: opts.z_form, ..RayleighOptions::default() };
    let pts = gamma_x_path(cfg, ropts.per_segment);
    trace_points(&pts, f_range.unwrap_or_else(|| default_window(cfg)), cfg, &ropts, MethodId::Mae)
}
