//! Thin elastic shell in a fluid: resonances and the scattering factor `Z_n`.
//!
//! `Z_n` relates the regular and singular parts of the field scattered by
//! one shell, `psi = sum B_n (J_n + Z_n Y_n) e^{in theta}`. Besides the full
//! membrane-shell expression this module carries the rigid limit and the two
//! low-frequency expansions valid for a soft shell.

use crate::error::{Error, Result};
use crate::special::{bessel_jy_prime_seq, EULER_GAMMA};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Geometry and material of one shell. `h` is the half-thickness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSpec {
    pub a: f64,
    pub h: f64,
    pub rho: f64,
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
}

impl ShellSpec {
    /// Validated constructor. Warns when the shell is not thin (`h >= a/10`).
    pub fn new(a: f64, h: f64, rho: f64, e: f64, nu: f64) -> Result<Self> {
        let s = ShellSpec { a, h, rho, e, nu };
        s.validate()?;
        Ok(s)
    }

    /// Builds a shell from the full wall thickness `2h`.
    pub fn from_thickness(a: f64, thickness: f64, rho: f64, e: f64, nu: f64) -> Result<Self> {
        Self::new(a, 0.5 * thickness, rho, e, nu)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if !pos(self.a) || !pos(self.h) || !pos(self.rho) || !pos(self.e) {
            return Err(Error::InvalidConfig(format!(
                "shell radius, thickness, density and modulus must be positive: {self:?}"
            )));
        }
        if !(self.nu > -1.0 && self.nu < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "Poisson ratio must lie in (-1, 0.5), got {}",
                self.nu
            )));
        }
        if self.h >= self.a {
            return Err(Error::InvalidConfig(format!(
                "half-thickness {} is not smaller than the radius {}",
                self.h, self.a
            )));
        }
        if self.h >= 0.1 * self.a {
            log::warn!("shell is not thin: h = {} >= a/10 = {}", self.h, 0.1 * self.a);
        }
        Ok(())
    }

    /// Full wall thickness `2h`.
    pub fn thickness(&self) -> f64 {
        2.0 * self.h
    }
}

/// Host fluid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidSpec {
    pub rho_o: f64,
    pub c_o: f64,
}

impl FluidSpec {
    pub fn new(rho_o: f64, c_o: f64) -> Result<Self> {
        let f = FluidSpec { rho_o, c_o };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho_o > 0.0 && self.c_o > 0.0) || !self.rho_o.is_finite() || !self.c_o.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "fluid density and sound speed must be positive: {self:?}"
            )));
        }
        Ok(())
    }

    /// Bulk modulus `rho_o c_o^2`.
    pub fn bulk_modulus(&self) -> f64 {
        self.rho_o * self.c_o * self.c_o
    }
}

/// Dimensionless loading parameters and resonance wavenumbers of a shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceParams {
    /// Dilatational plate speed [m/s].
    pub c3: f64,
    /// Fluid-to-shell mass ratio `(rho_o/rho)(a/h)`.
    pub k_rho: f64,
    /// Stiffness ratio `(c3/c_o)^2`.
    pub k_c: f64,
    /// In-vacuo breathing resonance [1/m].
    pub k0: f64,
    /// Fluid-loaded breathing resonance [1/m].
    pub k0_hat: f64,
    /// Leading-order dipole resonance [1/m].
    pub k1: f64,
}

/// `c3 = sqrt(E / (rho (1 - nu^2)))`.
pub fn dilatational_speed(shell: &ShellSpec) -> f64 {
    (shell.e / (shell.rho * (1.0 - shell.nu * shell.nu))).sqrt()
}

pub fn resonance_params(shell: &ShellSpec, fluid: &FluidSpec) -> ResonanceParams {
    let c3 = dilatational_speed(shell);
    let k_rho = (fluid.rho_o / shell.rho) * (shell.a / shell.h);
    let k_c = (c3 / fluid.c_o).powi(2);
    let k0 = k_c.sqrt() / shell.a;
    ResonanceParams {
        c3,
        k_rho,
        k_c,
        k0,
        k0_hat: (k_rho + k_c).sqrt() / shell.a,
        k1: std::f64::consts::SQRT_2 * k0,
    }
}

/// Numerator and denominator of the exact `Z_n`, for `n = 0..=nmax`.
fn z_exact_parts(nmax: usize, k_o: f64, shell: &ShellSpec, fluid: &FluidSpec) -> Result<Vec<(f64, f64, f64)>> {
    if !(k_o > 0.0) {
        return Err(Error::Domain(format!("wavenumber must be positive, got {k_o}")));
    }
    let c3 = dilatational_speed(shell);
    let q = (k_o * fluid.c_o / c3 * shell.a).powi(2);
    let mass = fluid.rho_o / (shell.rho * PI * shell.a * shell.h * k_o * k_o);
    let (jp, yp) = bessel_jy_prime_seq(nmax, k_o * shell.a)?;
    Ok((0..=nmax)
        .map(|n| {
            let nn = (n * n) as f64;
            let stiff = 1.0 + nn - q;
            let num = -stiff * jp[n] * jp[n];
            let t1 = stiff * jp[n] * yp[n];
            let t2 = (nn - q) * mass;
            (num, t1 + t2, t1.abs() + t2.abs())
        })
        .collect())
}

/// Membrane-shell scattering factor `Z_n`, fluid inside and outside.
///
/// `Z_n = -(1 + n^2 - q) J_n'^2 / ((1 + n^2 - q) J_n' Y_n' + (n^2 - q) rho_o / (rho pi a h k_o^2))`
/// with `q = (k3 a)^2`, `k3 = k_o c_o / c3`, Bessel functions at `k_o a`.
pub fn z_shell_exact(n: i32, k_o: f64, shell: &ShellSpec, fluid: &FluidSpec) -> Result<f64> {
    let m = n.unsigned_abs() as usize;
    let (num, den, scale) = z_exact_parts(m, k_o, shell, fluid)?[m];
    if den.abs() < 1e-14 * scale {
        return Err(Error::PoleProximity(format!(
            "Z_{n} denominator vanishes at k_o = {k_o}"
        )));
    }
    Ok(num / den)
}

/// `Z_0, ..., Z_nmax` of [`z_shell_exact`] in one pass.
pub fn z_shell_exact_seq(nmax: usize, k_o: f64, shell: &ShellSpec, fluid: &FluidSpec) -> Result<Vec<f64>> {
    z_exact_parts(nmax, k_o, shell, fluid)?
        .into_iter()
        .enumerate()
        .map(|(n, (num, den, scale))| {
            if den.abs() < 1e-14 * scale {
                Err(Error::PoleProximity(format!("Z_{n} denominator vanishes at k_o = {k_o}")))
            } else {
                Ok(num / den)
            }
        })
        .collect()
}

/// Denominator of the exact `Z_n`; its zeros are the fluid-loaded shell resonances.
pub fn z_shell_denominator(n: usize, k_o: f64, shell: &ShellSpec, fluid: &FluidSpec) -> Result<f64> {
    Ok(z_exact_parts(n, k_o, shell, fluid)?[n].1)
}

/// Rigid cylinder: `Z_n = -J_n'(k_o a) / Y_n'(k_o a)`.
pub fn z_rigid(n: i32, k_o: f64, a: f64) -> Result<f64> {
    let m = n.unsigned_abs() as usize;
    let (jp, yp) = bessel_jy_prime_seq(m, k_o * a)?;
    if yp[m].abs() < 1e-300 {
        return Err(Error::PoleProximity(format!("Y_{n}'({}) vanishes", k_o * a)));
    }
    Ok(-jp[m] / yp[m])
}

fn soft_guard(eps: f64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::Domain(format!("k_o a must be positive, got {eps}")));
    }
    if eps >= 0.5 {
        log::debug!("soft-shell expansion used outside its range: k_o a = {eps}");
    }
    Ok(())
}

/// Soft-shell expansion of `Z_0`: `(eps^2 pi/4) (K0^2 - k_o^2)/(K0_hat^2 - k_o^2)`, `eps = k_o a`.
pub fn z0_soft_approx(k_o: f64, params: &ResonanceParams, a: f64) -> Result<f64> {
    let eps = k_o * a;
    soft_guard(eps)?;
    let den = params.k0_hat * params.k0_hat - k_o * k_o;
    if den.abs() <= 1e-14 * params.k0_hat * params.k0_hat {
        return Err(Error::PoleProximity(format!("Z_0 pole at k_o = K0_hat = {}", params.k0_hat)));
    }
    Ok(eps * eps * PI / 4.0 * (params.k0 * params.k0 - k_o * k_o) / den)
}

/// Soft-shell expansion of `Z_1`, singular at `k_o^2 = 2 K0^2`.
pub fn z1_soft_approx(k_o: f64, params: &ResonanceParams, shell: &ShellSpec, fluid: &FluidSpec) -> Result<f64> {
    let eps = k_o * shell.a;
    soft_guard(eps)?;
    let k0sq = params.k0 * params.k0;
    let den = 2.0 * k0sq - k_o * k_o;
    if den.abs() <= 1e-14 * k0sq {
        return Err(Error::PoleProximity(format!("Z_1 pole at k_o = K1 = {}", params.k1)));
    }
    let k_rho = (fluid.rho_o * shell.a) / (shell.rho * shell.h);
    let fluid_term = k_rho * (k0sq - k_o * k_o) / den;
    let log_term = eps * eps * (0.5 * (0.5 * eps).ln() + (5.0 + 4.0 * EULER_GAMMA) / 8.0);
    Ok(eps * eps * PI / 4.0 * (-1.0 + fluid_term + log_term))
}

/// Leading order of [`z1_soft_approx`]: `(eps^2 pi/4)(-1 + K_rho (K0^2 - k_o^2)/(2 K0^2 - k_o^2))`,
/// without the `O(eps^2 ln eps)` correction.
pub fn z1_soft_leading(k_o: f64, params: &ResonanceParams, a: f64) -> Result<f64> {
    let eps = k_o * a;
    soft_guard(eps)?;
    let k0sq = params.k0 * params.k0;
    let den = 2.0 * k0sq - k_o * k_o;
    if den.abs() <= 1e-14 * k0sq {
        return Err(Error::PoleProximity(format!("Z_1 pole at k_o = K1 = {}", params.k1)));
    }
    Ok(eps * eps * PI / 4.0 * (-1.0 + params.k_rho * (k0sq - k_o * k_o) / den))
}

/// Wavenumber of the `n`-th fluid-loaded shell resonance: the zero of the
/// exact `Z_n` denominator nearest the soft estimate (`K0_hat` for `n = 0`,
/// `K1` otherwise scaled by the in-vacuo ratio `sqrt(1 + n^2)`).
pub fn loaded_resonance(n: usize, shell: &ShellSpec, fluid: &FluidSpec) -> Result<f64> {
    let p = resonance_params(shell, fluid);
    let guess = match n {
        0 => p.k0_hat,
        _ => p.k0 * ((1 + n * n) as f64).sqrt(),
    };
    let f = |k: f64| z_shell_denominator(n, k, shell, fluid);
    let steps = 400;
    let (lo, hi) = (0.5 * guess, 1.5 * guess);
    let mut best: Option<f64> = None;
    let mut prev_k = lo;
    let mut prev = f(lo)?;
    for i in 1..=steps {
        let k = lo + (hi - lo) * i as f64 / steps as f64;
        let v = f(k)?;
        if prev.signum() != v.signum() {
            let root = crate::roots::bisect(&f, prev_k, k, 1e-14)?;
            if best.map_or(true, |b| (root - guess).abs() < (b - guess).abs()) {
                best = Some(root);
            }
        }
        prev_k = k;
        prev = v;
    }
    best.ok_or_else(|| Error::NoRootFound(format!("no loaded resonance of order {n} near k_o = {guess}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn latex(a: f64) -> (ShellSpec, FluidSpec) {
        (
            ShellSpec::new(a, 0.000125, 1100.0, 1.75e6, 0.4997).unwrap(),
            FluidSpec::new(1.2, 344.0).unwrap(),
        )
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ShellSpec::new(0.01, 0.02, 1.0, 1.0, 0.3).is_err());
        assert!(ShellSpec::new(0.01, 0.001, 1.0, 1.0, 0.5).is_err());
        assert!(FluidSpec::new(0.0, 1.0).is_err());
    }

    #[test]
    fn resonance_is_a_denominator_zero() {
        let (s, f) = latex(0.0275);
        let k = loaded_resonance(0, &s, &f).unwrap();
        assert!((k * 0.08 - 1.4039).abs() < 1e-3);
        assert!(z_shell_exact(0, k, &s, &f).is_err());
    }
}
