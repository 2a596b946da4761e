//! Array configuration and the result types shared by all four methods.

use crate::error::{Error, Result};
use crate::lattice::SquareLattice;
use crate::shell::{resonance_params, FluidSpec, ResonanceParams, ShellSpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Shell, host fluid and square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayConfig {
    pub shell: ShellSpec,
    pub fluid: FluidSpec,
    pub lattice: SquareLattice,
}

impl ArrayConfig {
    /// Validated constructor: shells must not overlap (`a < L/2`).
    pub fn new(shell: ShellSpec, fluid: FluidSpec, lattice: SquareLattice) -> Result<Self> {
        let c = ArrayConfig { shell, fluid, lattice };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.shell.validate()?;
        self.fluid.validate()?;
        self.lattice.validate()?;
        if self.shell.a >= 0.5 * self.lattice.l {
            return Err(Error::InvalidConfig(format!(
                "shells overlap: a = {} >= L/2 = {}",
                self.shell.a,
                0.5 * self.lattice.l
            )));
        }
        Ok(())
    }

    /// Latex-like shells in air with the given radius and lattice constant
    /// (`2h = 0.25` mm, `rho = 1100`, `E = 1.75` MPa, `nu = 0.4997`; air `1.2`, `344`).
    ///
    /// These material values are a stand-in: absolute frequencies scale with them.
    pub fn latex_in_air(a: f64, l: f64) -> Result<Self> {
        Self::new(
            ShellSpec::from_thickness(a, 0.00025, 1100.0, 1.75e6, 0.4997)?,
            FluidSpec::new(1.2, 344.0)?,
            SquareLattice::new(l)?,
        )
    }

    /// Cell area `A = L^2`.
    pub fn area(&self) -> f64 {
        self.lattice.area()
    }

    /// Filling fraction `pi a^2 / A`.
    pub fn filling_fraction(&self) -> f64 {
        PI * self.shell.a * self.shell.a / self.area()
    }

    pub fn params(&self) -> ResonanceParams {
        resonance_params(&self.shell, &self.fluid)
    }

    /// First Bragg frequency `c_o / (2L)` [Hz].
    pub fn bragg_frequency(&self) -> f64 {
        self.fluid.c_o / (2.0 * self.lattice.l)
    }

    /// `f = k_o c_o / (2 pi)`.
    pub fn k_to_hz(&self, k_o: f64) -> f64 {
        k_o * self.fluid.c_o / (2.0 * PI)
    }

    pub fn hz_to_k(&self, f: f64) -> f64 {
        2.0 * PI * f / self.fluid.c_o
    }

    /// Copy with a different radius.
    pub fn with_radius(&self, a: f64) -> Result<Self> {
        let mut c = *self;
        c.shell.a = a;
        c.validate()?;
        Ok(c)
    }

    pub fn with_lattice_constant(&self, l: f64) -> Result<Self> {
        let mut c = *self;
        c.lattice.l = l;
        c.validate()?;
        Ok(c)
    }

    /// Copy with a different full wall thickness `2h`.
    pub fn with_thickness(&self, thickness: f64) -> Result<Self> {
        let mut c = *self;
        c.shell.h = 0.5 * thickness;
        c.validate()?;
        Ok(c)
    }

    pub fn with_youngs_modulus(&self, e: f64) -> Result<Self> {
        let mut c = *self;
        c.shell.e = e;
        c.validate()?;
        Ok(c)
    }
}

impl Default for ArrayConfig {
    /// Latex-like shells, `a = 27.5` mm, `L = 80` mm (filling fraction about 0.37).
    fn default() -> Self {
        Self::latex_in_air(0.0275, 0.08).expect("default configuration is valid")
    }
}

/// Solver selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodId {
    Rayleigh,
    Foldy,
    Mae,
    Cpa,
}

impl MethodId {
    pub const ALL: [MethodId; 4] = [MethodId::Rayleigh, MethodId::Foldy, MethodId::Mae, MethodId::Cpa];

    pub fn as_str(&self) -> &'static str {
        match self {
            MethodId::Rayleigh => "rayleigh",
            MethodId::Foldy => "foldy",
            MethodId::Mae => "mae",
            MethodId::Cpa => "cpa",
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rayleigh" => Ok(MethodId::Rayleigh),
            "foldy" => Ok(MethodId::Foldy),
            "mae" => Ok(MethodId::Mae),
            "cpa" => Ok(MethodId::Cpa),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Frequency interval without propagating Bloch waves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandGap {
    /// 0 for the breathing resonance, 1 for the dipole resonance.
    pub n_mode: u8,
    pub f_lower: f64,
    pub f_upper: f64,
    pub method: MethodId,
}

impl BandGap {
    pub fn new(n_mode: u8, f_lower: f64, f_upper: f64, method: MethodId) -> Self {
        BandGap { n_mode, f_lower, f_upper, method }
    }

    pub fn width(&self) -> f64 {
        self.f_upper - self.f_lower
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.f_upper + self.f_lower)
    }

    pub fn contains(&self, f: f64) -> bool {
        f > self.f_lower && f < self.f_upper
    }
}

/// Sampled `(beta L, k_o L)` pairs of one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionCurve {
    pub method: MethodId,
    pub points: Vec<(f64, f64)>,
    pub branch_index: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_filling_fraction() {
        let c = ArrayConfig::default();
        assert!((c.filling_fraction() - 0.37122).abs() < 1e-5);
        assert!((c.bragg_frequency() - 2150.0).abs() < 1e-9);
    }

    #[test]
    fn overlapping_shells_rejected() {
        assert!(ArrayConfig::latex_in_air(0.041, 0.08).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in MethodId::ALL {
            assert_eq!(m.as_str().parse::<MethodId>().unwrap(), m);
        }
        assert!("plane-wave".parse::<MethodId>().is_err());
    }
}
