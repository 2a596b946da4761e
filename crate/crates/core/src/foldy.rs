//! Foldy-type effective dispersion `beta^2 = k_o^2 - (4/A) F` and its
//! closed-form resonance gaps.
//!
//! The lattice sum is replaced by its single empty-lattice pole, which turns
//! the Rayleigh Identity into an isotropic relation. The far-field pattern is
//! truncated to `F = Z_0 + 2 Z_1` with the soft-shell factors, so the model
//! only sees the breathing (`n = 0`) and dipole (`n = 1`) resonances.

use crate::error::{Error, Result};
use crate::isotropic::isotropic_curves;
use crate::model::{ArrayConfig, BandGap, DispersionCurve, MethodId};
use crate::roots::bisect;
use crate::shell::{z0_soft_approx, z1_soft_approx};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// One evaluation of the Foldy relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldyPoint {
    /// `beta^2` [1/m^2]; negative inside a gap.
    pub beta_sq: f64,
    /// Truncated far-field pattern `Z_0 + 2 Z_1`.
    pub far_field: f64,
    /// `(4/A) |F| L^2 < 1`, the consistency condition of the single-pole
    /// approximation. Near a resonance it fails.
    pub valid: bool,
}

pub fn foldy_point(k_o: f64, cfg: &ArrayConfig) -> Result<FoldyPoint> {
    let p = cfg.params();
    let far_field = z0_soft_approx(k_o, &p, cfg.shell.a)? + 2.0 * z1_soft_approx(k_o, &p, &cfg.shell, &cfg.fluid)?;
    let a = cfg.area();
    let l = cfg.lattice.l;
    Ok(FoldyPoint {
        beta_sq: k_o * k_o - 4.0 / a * far_field,
        far_field,
        valid: 4.0 / a * far_field.abs() * l * l < 1.0,
    })
}

/// `beta^2 = k_o^2 - (4/A)(Z_0 + 2 Z_1)`.
pub fn foldy_beta_squared(k_o: f64, cfg: &ArrayConfig) -> Result<f64> {
    Ok(foldy_point(k_o, cfg)?.beta_sq)
}

fn gap(cfg: &ArrayConfig, n_mode: u8, k_lower: f64, k_upper: f64) -> BandGap {
    BandGap::new(n_mode, cfg.k_to_hz(k_lower), cfg.k_to_hz(k_upper), MethodId::Foldy)
}

fn checked_sqrt(x: f64, what: &str) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::DegenerateRadicand(format!("{what}: {x}")));
    }
    Ok(x.sqrt())
}

/// Leading-order breathing gap `[c3/(2 pi a) sqrt(1 + Kr/Kc), c3/(2 pi a) sqrt(1 + (Kr/Kc)(1 + F))]`.
pub fn foldy_gap_n0(cfg: &ArrayConfig) -> BandGap {
    let p = cfg.params();
    let f = cfg.filling_fraction();
    let base = p.c3 / (2.0 * PI * cfg.shell.a);
    let r = p.k_rho / p.k_c;
    BandGap::new(0, base * (1.0 + r).sqrt(), base * (1.0 + r * (1.0 + f)).sqrt(), MethodId::Foldy)
}

/// Breathing gap with the unexpanded upper-edge radical; the lower edge is `K0_hat`.
pub fn foldy_gap_n0_full(cfg: &ArrayConfig) -> Result<BandGap> {
    let p = cfg.params();
    let (kr, kc) = (p.k_rho, p.k_c);
    let f = cfg.filling_fraction();
    let den = kr - kc - f * (kc + 2.0 * kr * kr);
    if den.abs() <= 1e-12 * (kr + kc) {
        return Err(Error::DegenerateDenominator(format!("n=0 upper edge denominator {den}")));
    }
    let upper = checked_sqrt(kr + kc + f * kr * (kr - kc) / den, "n=0 upper edge")? / cfg.shell.a;
    Ok(gap(cfg, 0, p.k0_hat, upper))
}

/// Leading-order dipole gap `[sqrt2 c3/(2 pi a), sqrt2 c3/(2 pi a) sqrt(1 + F Kr)]`.
pub fn foldy_gap_n1(cfg: &ArrayConfig) -> BandGap {
    let p = cfg.params();
    let f = cfg.filling_fraction();
    let lower = SQRT_2 * p.c3 / (2.0 * PI * cfg.shell.a);
    BandGap::new(1, lower, lower * (1.0 + f * p.k_rho).sqrt(), MethodId::Foldy)
}

/// Dipole gap with the unexpanded upper-edge radical; the lower edge is `K1`.
pub fn foldy_gap_n1_full(cfg: &ArrayConfig) -> Result<BandGap> {
    let p = cfg.params();
    let (kr, kc) = (p.k_rho, p.k_c);
    let f = cfg.filling_fraction();
    let den = kc - kr + f * (2.0 * (kc - kr) * (1.0 - kr) - kc * (1.0 + 2.0 * kr));
    if den.abs() <= 1e-12 * (kr + kc) {
        return Err(Error::DegenerateDenominator(format!("n=1 upper edge denominator {den}")));
    }
    let upper = checked_sqrt(2.0 * kc + 2.0 * f * kr * kc * (kc - kr) / den, "n=1 upper edge")? / cfg.shell.a;
    Ok(gap(cfg, 1, p.k1, upper))
}

/// Gap of mode `n_mode` with the upper edge taken as the numerical zero of
/// [`foldy_beta_squared`] above the resonance pole (`K0_hat` or `K1`).
///
/// The closed-form radicals come from an expanded quadratic and differ from
/// this root by a few percent at moderate filling fractions.
pub fn foldy_gap_root(n_mode: u8, cfg: &ArrayConfig) -> Result<BandGap> {
    let p = cfg.params();
    let (pole, other) = match n_mode {
        0 => (p.k0_hat, p.k1),
        1 => (p.k1, p.k0_hat),
        _ => return Err(Error::Domain(format!("n_mode must be 0 or 1, got {n_mode}"))),
    };
    let next = if other > pole { other } else { f64::INFINITY };
    let cap = next.min(2.0 * PI / cfg.lattice.l);
    let f = |k: f64| foldy_beta_squared(k, cfg);
    let start = pole * (1.0 + 1e-9);
    let step = 1e-3 * pole;
    let mut lo = start;
    let mut flo = f(lo)?;
    while lo < cap {
        let hi = (lo + step).min(cap * (1.0 - 1e-12));
        if hi <= lo {
            break;
        }
        let fhi = f(hi)?;
        if flo < 0.0 && fhi >= 0.0 {
            return Ok(gap(cfg, n_mode, pole, bisect(&f, lo, hi, 1e-14)?));
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::NoRootFound(format!("beta^2 stays negative above the n={n_mode} resonance")))
}

/// Foldy pass bands as `(beta L, k_o L)` curves over `f_range` [Hz].
///
/// `beta` grows without bound towards each resonance, so branches are not
/// folded into the first Brillouin zone.
pub fn foldy_curves(cfg: &ArrayConfig, f_range: (f64, f64), grid: usize) -> Result<Vec<DispersionCurve>> {
    let p = cfg.params();
    isotropic_curves(
        |k| foldy_beta_squared(k, cfg),
        &[p.k0_hat, p.k1],
        (cfg.hz_to_k(f_range.0), cfg.hz_to_k(f_range.1)),
        grid,
        cfg.lattice.l,
        MethodId::Foldy,
    )
}
