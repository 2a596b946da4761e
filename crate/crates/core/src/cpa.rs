//! Self-consistent (coherent-potential) effective medium.
//!
//! Each shell together with its share of host fluid forms a composite
//! inclusion of radius `R_o = a / sqrt(F)`. Requiring it to scatter nothing
//! when embedded in the effective medium gives, per harmonic, the Bessel-ratio
//! condition checked by [`cpa_residual`]. Its leading orders as
//! `k_o R_o -> 0` fix the effective bulk modulus (from `n = 0`) and density
//! (from `n = 1`):
//!
//! `B_eff / B_o = 1 / (1 - Z_00)`, `rho_eff / rho_o = (1 - Z_10) / (1 + Z_10)`.
//!
//! A band gap is wherever exactly one of the two is negative.

use crate::error::{Error, Result};
use crate::isotropic::isotropic_curves;
use crate::model::{ArrayConfig, BandGap, DispersionCurve, MethodId};
use crate::shell::{z0_soft_approx, z1_soft_leading};
use crate::special::bessel_jy_seq;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Half-width of the window around a denominator zero, in `(k_o a)^2`, that
/// frequency grids skip.
pub const POLE_WINDOW: f64 = 1e-9;

/// Effective medium at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveMedium {
    /// `B_eff / B_o`.
    pub b_eff_ratio: f64,
    /// `rho_eff / rho_o`.
    pub rho_eff_ratio: f64,
    /// `k_eff^2 = (rho_eff/rho_o)(B_o/B_eff) k_o^2` [1/m^2], negative in a gap.
    pub k_eff_sq: f64,
}

impl EffectiveMedium {
    fn from_ratios(b: f64, rho: f64, k_o: f64) -> Result<Self> {
        if b == 0.0 {
            return Err(Error::PoleProximity(format!("B_eff vanishes at k_o = {k_o}")));
        }
        Ok(EffectiveMedium { b_eff_ratio: b, rho_eff_ratio: rho, k_eff_sq: rho / b * k_o * k_o })
    }

    pub fn in_gap(&self) -> bool {
        self.k_eff_sq < 0.0
    }
}

/// `R_o = a / sqrt(F)`, so that `pi R_o^2 = A`.
pub fn composite_radius(cfg: &ArrayConfig) -> f64 {
    cfg.shell.a / cfg.filling_fraction().sqrt()
}

/// Scale of `Z_n` in the homogenization limit: `(eta/2)^2 pi` for `n = 0`,
/// `(eta/2)^{2n} pi / ((n-1)! n!)` for `n > 0`.
pub fn z_scale(n: u32, eta: f64) -> f64 {
    if n == 0 {
        return (0.5 * eta).powi(2) * PI;
    }
    let fact = |m: u32| (1..=m).map(f64::from).product::<f64>();
    (0.5 * eta).powi(2 * n as i32) * PI / (fact(n - 1) * fact(n))
}

/// `Z_n0 = Z_n / z_scale(n, k_o R_o)` for a given `Z_n`.
pub fn z_scaled_from(n: u32, z: f64, k_o: f64, r_o: f64) -> f64 {
    z / z_scale(n, k_o * r_o)
}

/// Leading-order coefficient `Z_00` or `Z_10` of the soft shell.
///
/// Uses the leading orders of the soft-shell factors; the `O(eps^2 ln eps)`
/// term of `Z_1` is beyond the accuracy of the matching.
pub fn z_scaled(n: u32, k_o: f64, cfg: &ArrayConfig) -> Result<f64> {
    let r_o = composite_radius(cfg);
    let eta = k_o * r_o;
    if eta >= 0.5 {
        log::debug!("homogenization used outside its range: k_o R_o = {eta}");
    }
    let p = cfg.params();
    let z = match n {
        0 => z0_soft_approx(k_o, &p, cfg.shell.a)?,
        1 => z1_soft_leading(k_o, &p, cfg.shell.a)?,
        _ => return Err(Error::Domain(format!("only harmonics 0 and 1 enter the medium, got {n}"))),
    };
    Ok(z_scaled_from(n, z, k_o, r_o))
}

/// Effective parameters from the leading-order coefficients.
pub fn effective_params_generic(z00: f64, z10: f64, k_o: f64) -> Result<EffectiveMedium> {
    if (1.0 - z00).abs() < 1e-12 {
        return Err(Error::PoleProximity(format!("Z_00 = {z00}: B_eff diverges")));
    }
    if (1.0 + z10).abs() < 1e-12 {
        return Err(Error::PoleProximity(format!("Z_10 = {z10}: rho_eff diverges")));
    }
    if (1.0 - z10).abs() < 1e-12 {
        return Err(Error::PoleProximity(format!("Z_10 = {z10}: rho_o/rho_eff diverges")));
    }
    EffectiveMedium::from_ratios(1.0 / (1.0 - z00), (1.0 - z10) / (1.0 + z10), k_o)
}

/// Closed-form effective parameters of the shell array.
pub fn effective_params_shell(k_o: f64, cfg: &ArrayConfig) -> Result<EffectiveMedium> {
    let p = cfg.params();
    let (kr, kc) = (p.k_rho, p.k_c);
    let f = cfg.filling_fraction();
    let x = (k_o * cfg.shell.a).powi(2);
    let b_den = kc * (1.0 - f) + kr - x * (1.0 - f);
    let rho_den = kc * (2.0 - f * (2.0 - kr)) - x * (1.0 - f * (1.0 - kr));
    let scale = 1e-15 * (kc + kr + x);
    if b_den.abs() <= scale || rho_den.abs() <= scale {
        return Err(Error::PoleProximity(format!("effective parameter pole at k_o a = {}", x.sqrt())));
    }
    let b = (kc + kr - x) / b_den;
    let rho = (kc * (2.0 + f * (2.0 - kr)) - x * (1.0 + f * (1.0 - kr))) / rho_den;
    EffectiveMedium::from_ratios(b, rho, k_o)
}

/// Breathing gap, where `B_eff < 0`.
pub fn cpa_gap_n0(cfg: &ArrayConfig) -> BandGap {
    let p = cfg.params();
    let f = cfg.filling_fraction();
    let base = p.c3 / (2.0 * PI * cfg.shell.a);
    let r = p.k_rho / p.k_c;
    BandGap::new(0, base * (1.0 + r).sqrt(), base * (1.0 + r * (1.0 + f / (1.0 - f))).sqrt(), MethodId::Cpa)
}

/// Dipole gap, where `rho_eff < 0`.
pub fn cpa_gap_n1(cfg: &ArrayConfig) -> Result<BandGap> {
    let p = cfg.params();
    let f = cfg.filling_fraction();
    let kr = p.k_rho;
    let minus = 1.0 - f * (1.0 - kr);
    let plus = 1.0 + f * (1.0 - kr);
    if minus <= 0.0 || plus <= 0.0 {
        return Err(Error::DegenerateRadicand(format!("1 -+ F(1 - K_rho) = {minus}, {plus}")));
    }
    let lo_rad = 1.0 - f * kr / (2.0 * minus);
    let hi_rad = 1.0 + f * kr / (2.0 * plus);
    if lo_rad <= 0.0 || hi_rad <= 0.0 {
        return Err(Error::DegenerateRadicand(format!("n=1 edge radicands {lo_rad}, {hi_rad}")));
    }
    let base = SQRT_2 * p.c3 / (2.0 * PI * cfg.shell.a);
    Ok(BandGap::new(1, base * lo_rad.sqrt(), base * hi_rad.sqrt(), MethodId::Cpa))
}

/// Relative mismatch of the full Bessel-ratio existence condition of harmonic
/// `n` at the leading-order medium:
///
/// `(J_n' + Z_n Y_n')/(J_n + Z_n Y_n)` at `eta = k_o R_o` against
/// `xi_rho xi_c J_n'(eta xi_c)/J_n(eta xi_c)`, with `xi_rho = rho_o/rho_eff`
/// and `xi_c = k_eff/k_o`. Only defined in pass bands.
pub fn cpa_residual(n: u32, k_o: f64, cfg: &ArrayConfig) -> Result<f64> {
    if n > 1 {
        return Err(Error::Domain(format!("only harmonics 0 and 1 enter the medium, got {n}")));
    }
    let med = effective_params_shell(k_o, cfg)?;
    if med.k_eff_sq <= 0.0 {
        return Err(Error::Domain(format!("k_o = {k_o} lies in a gap; the residual needs real k_eff")));
    }
    let r_o = composite_radius(cfg);
    let eta = k_o * r_o;
    let xi_c = med.k_eff_sq.sqrt() / k_o;
    let xi_rho = 1.0 / med.rho_eff_ratio;
    let p = cfg.params();
    let z = if n == 0 { z0_soft_approx(k_o, &p, cfg.shell.a)? } else { z1_soft_leading(k_o, &p, cfg.shell.a)? };
    let nu = n as usize;
    let (j, y) = bessel_jy_seq(nu + 1, eta)?;
    let deriv = |f: &[f64]| if nu == 0 { -f[1] } else { 0.5 * (f[0] - f[2]) };
    let lhs = (deriv(&j) + z * deriv(&y)) / (j[nu] + z * y[nu]);
    let (je, _) = bessel_jy_seq(nu + 1, eta * xi_c)?;
    let rhs = xi_rho * xi_c * deriv(&je) / je[nu];
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()))
}

/// Effective-medium pass bands as `(k_eff L, k_o L)` curves over `f_range` [Hz].
pub fn cpa_curves(cfg: &ArrayConfig, f_range: (f64, f64), grid: usize) -> Result<Vec<DispersionCurve>> {
    let p = cfg.params();
    let f = cfg.filling_fraction();
    let kr = p.k_rho;
    let a = cfg.shell.a;
    // k_eff^2 diverges where B_eff or the rho_eff denominator vanishes.
    let rho_pole = (p.k_c * (2.0 - f * (2.0 - kr)) / (1.0 - f * (1.0 - kr))).max(0.0).sqrt() / a;
    // Pole-free in the zeros of k_eff^2, which are poles of B_eff or zeros of rho_eff.
    let k_eff_sq = |k: f64| {
        let x = (k * a).powi(2);
        let b_num = p.k_c + kr - x;
        let b_den = p.k_c * (1.0 - f) + kr - x * (1.0 - f);
        let rho_num = p.k_c * (2.0 + f * (2.0 - kr)) - x * (1.0 + f * (1.0 - kr));
        let rho_den = p.k_c * (2.0 - f * (2.0 - kr)) - x * (1.0 - f * (1.0 - kr));
        if b_num.abs() <= POLE_WINDOW || rho_den.abs() <= POLE_WINDOW {
            return Err(Error::PoleProximity(format!("k_eff^2 pole at k_o a = {}", x.sqrt())));
        }
        Ok(rho_num / rho_den * b_den / b_num * k * k)
    };
    isotropic_curves(
        k_eff_sq,
        &[p.k0_hat, rho_pole],
        (cfg.hz_to_k(f_range.0), cfg.hz_to_k(f_range.1)),
        grid,
        cfg.lattice.l,
        MethodId::Cpa,
    )
}
