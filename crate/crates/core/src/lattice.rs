//! Square lattice and its quasi-periodic lattice sums.
//!
//! The sums `sigma_n^Y` are evaluated in the reciprocal (spectral)
//! representation
//!
//! `sigma_n = (4 i^n / A) sum_m J_n(beta_m xi) e^{i n tau_m} / (J_n(k xi) (k^2 - beta_m^2)) - delta_n0 Y_0(k xi)/J_0(k xi)`
//!
//! over the window `|m1|, |m2| <= M`, with `beta_m = beta + 2 pi m / L`. The
//! value does not depend on `xi` in exact arithmetic; `xi = L/2` is used and
//! `xi = 0.45 L` when `J_n(k xi)` vanishes.

use crate::error::{Error, Result};
use crate::special::{bessel_j, bessel_j_seq, bessel_y};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Reciprocal window used when none is given.
pub const DEFAULT_TRUNCATION: usize = 8;

/// Half-width of the excluded window around `(k_o L)^2 = (beta_m L)^2`.
pub const POLE_WINDOW: f64 = 1e-12;

const BESSEL_ZERO_REL: f64 = 1e-8;

/// Fallback radius for the reciprocal representation, in units of `L`.
pub const XI_FALLBACK: f64 = 0.45;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareLattice {
    /// Lattice constant [m].
    #[serde(rename = "L")]
    pub l: f64,
}

impl SquareLattice {
    pub fn new(l: f64) -> Result<Self> {
        let s = SquareLattice { l };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0) || !self.l.is_finite() {
            return Err(Error::InvalidConfig(format!("lattice constant must be positive, got {}", self.l)));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.l * self.l
    }
}

/// Bloch vector in polar form: `(q1, q2) = beta (cos tau, sin tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub beta: f64,
    pub tau: f64,
}

impl BlochVector {
    pub fn new(beta: f64, tau: f64) -> Self {
        BlochVector { beta, tau }
    }

    pub fn from_components(q1: f64, q2: f64) -> Self {
        BlochVector { beta: q1.hypot(q2), tau: if q1 == 0.0 && q2 == 0.0 { 0.0 } else { q2.atan2(q1) } }
    }

    pub fn components(&self) -> (f64, f64) {
        (self.beta * self.tau.cos(), self.beta * self.tau.sin())
    }

    /// The opposite Bloch vector `-beta`.
    pub fn reversed(&self) -> Self {
        let (q1, q2) = self.components();
        Self::from_components(-q1, -q2)
    }
}

/// One evaluated lattice sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSumValue {
    pub value: Complex64,
    pub n: i32,
    pub truncation: usize,
}

/// `i^n` for any integer `n`.
pub fn i_pow(n: i32) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn sign(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Reciprocal vector `beta_m` as (magnitude, angle).
fn reciprocal(beta: &BlochVector, lat: &SquareLattice, m1: i64, m2: i64) -> (f64, f64) {
    let (q1, q2) = beta.components();
    let g1 = q1 + 2.0 * PI * m1 as f64 / lat.l;
    let g2 = q2 + 2.0 * PI * m2 as f64 / lat.l;
    let g = g1.hypot(g2);
    (g, if g == 0.0 { 0.0 } else { g2.atan2(g1) })
}

fn check_pole(k_o: f64, g: f64, lat: &SquareLattice) -> Result<()> {
    let d = (k_o * lat.l).powi(2) - (g * lat.l).powi(2);
    if d.abs() <= POLE_WINDOW {
        return Err(Error::PoleProximity(format!(
            "k_o L = {} sits on the empty-lattice line beta_m L = {}",
            k_o * lat.l,
            g * lat.l
        )));
    }
    Ok(())
}

/// Returns `J_n(x)` for `n >= 0` unless it is numerically zero relative to its neighbours.
fn normalizer(n: usize, x: f64) -> Result<f64> {
    let j = bessel_j_seq(n + 1, x)?;
    let below = if n == 0 { j[1] } else { j[n - 1] };
    if j[n].abs() < BESSEL_ZERO_REL * (below.abs() + j[n + 1].abs()) {
        return Err(Error::BesselZero { n: n as i32, x });
    }
    Ok(j[n])
}

/// Lattice sum `sigma_n^Y(k_o, beta)` with explicit `xi` and window `M`.
pub fn sigma_y(n: i32, k_o: f64, beta: BlochVector, lat: &SquareLattice, xi: f64, m: usize) -> Result<LatticeSumValue> {
    if !(k_o > 0.0) {
        return Err(Error::Domain(format!("k_o must be positive, got {k_o}")));
    }
    if !(xi > 0.0 && xi <= 0.5 * lat.l * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("xi must lie in (0, L/2], got {xi}")));
    }
    let na = n.unsigned_abs() as usize;
    let jk = normalizer(na, k_o * xi)? * if n < 0 { sign(n) } else { 1.0 };
    let mi = m as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for m1 in -mi..=mi {
        for m2 in -mi..=mi {
            let (g, tau) = reciprocal(&beta, lat, m1, m2);
            check_pole(k_o, g, lat)?;
            let jg = bessel_j(n, g * xi)?;
            if jg == 0.0 {
                continue;
            }
            acc += Complex64::from_polar(jg, n as f64 * tau) / (k_o * k_o - g * g);
        }
    }
    let mut value = i_pow(n) * acc * (4.0 / (lat.area() * jk));
    if n == 0 {
        value -= bessel_y(0, k_o * xi)? / jk;
    }
    Ok(LatticeSumValue { value, n, truncation: m })
}

/// [`sigma_y`] at `xi = L/2`, retried at `xi = 0.45 L` when `J_n(k_o xi)` vanishes.
pub fn sigma_y_auto(n: i32, k_o: f64, beta: BlochVector, lat: &SquareLattice, m: usize) -> Result<LatticeSumValue> {
    match sigma_y(n, k_o, beta, lat, 0.5 * lat.l, m) {
        Err(Error::BesselZero { .. }) => sigma_y(n, k_o, beta, lat, XI_FALLBACK * lat.l, m),
        other => other,
    }
}

/// Single empty-lattice pole `(i^n / A) 4 / (k_o^2 - beta^2)`, valid for `k_o L, beta L << 1`.
pub fn sigma_y_single_pole(n: i32, k_o: f64, beta: BlochVector, lat: &SquareLattice) -> Result<Complex64> {
    if k_o * lat.l > 0.8 || beta.beta * lat.l > 0.8 {
        log::warn!("single-pole lattice sum used at k_o L = {}, beta L = {}", k_o * lat.l, beta.beta * lat.l);
    }
    check_pole(k_o, beta.beta, lat)?;
    Ok(i_pow(n) * (4.0 / (lat.area() * (k_o * k_o - beta.beta * beta.beta))))
}

/// `S = sum_{m != 0} J_0(pi |m|) / ((k_o L)^2 - 4 pi^2 |m|^2)` over `|m1|, |m2| <= M`.
pub fn s_sum(k_l: f64, m: usize) -> Result<f64> {
    if m < 8 {
        return Err(Error::Domain(format!("S-sum window must be at least 8, got {m}")));
    }
    if !(k_l > 0.0) {
        return Err(Error::Domain(format!("k_o L must be positive, got {k_l}")));
    }
    let mi = m as i64;
    let mut acc = 0.0;
    for m1 in -mi..=mi {
        for m2 in -mi..=mi {
            if m1 == 0 && m2 == 0 {
                continue;
            }
            let q = (m1 * m1 + m2 * m2) as f64;
            let d = k_l * k_l - 4.0 * PI * PI * q;
            if d.abs() <= 1e-9 {
                return Err(Error::PoleProximity(format!("k_o L = {k_l} on the empty-lattice pole 2 pi sqrt({q})")));
            }
            acc += bessel_j(0, PI * q.sqrt())? / d;
        }
    }
    Ok(acc)
}

/// `sigma_0^Y` at `beta = 0` with `xi = L/2`: `[4/(k_o L)^2 - Y_0(k_o L/2) + 4 S] / J_0(k_o L/2)`.
pub fn sigma0_at_gamma(k_l: f64, m: usize) -> Result<f64> {
    let s = s_sum(k_l, m)?;
    let j0 = normalizer(0, 0.5 * k_l)?;
    Ok((4.0 / (k_l * k_l) - bessel_y(0, 0.5 * k_l)? + 4.0 * s) / j0)
}

/// Frequency-independent part of the reciprocal sums at one Bloch vector,
/// for fast evaluation of `sigma_{-nmax..=nmax}` over many `k_o`.
#[derive(Debug, Clone)]
pub struct LatticeSumTable {
    lattice: SquareLattice,
    nmax: usize,
    truncation: usize,
    /// `(beta_m L)^2` per reciprocal vector.
    g2: Vec<f64>,
    /// Per `xi` choice: `xi`, and the real and imaginary parts of
    /// `J_n(beta_m xi) e^{i n tau_m}` indexed `[n][m]` for `n = 0..=nmax`.
    /// Negative orders follow from `c_{-n} = (-1)^n conj(c_n)`.
    coef: Vec<(f64, Vec<(Vec<f64>, Vec<f64>)>)>,
}

impl LatticeSumTable {
    pub fn new(beta: BlochVector, lat: &SquareLattice, nmax: usize, m: usize) -> Result<Self> {
        let mi = m as i64;
        let mut vecs = Vec::with_capacity((2 * m + 1).pow(2));
        for m1 in -mi..=mi {
            for m2 in -mi..=mi {
                vecs.push(reciprocal(&beta, lat, m1, m2));
            }
        }
        let g2 = vecs.iter().map(|(g, _)| (g * lat.l).powi(2)).collect();
        let mut coef = Vec::new();
        for xi in [0.5 * lat.l, XI_FALLBACK * lat.l] {
            let mut c = vec![(vec![0.0; vecs.len()], vec![0.0; vecs.len()]); nmax + 1];
            for (idx, (g, tau)) in vecs.iter().enumerate() {
                let j = bessel_j_seq(nmax, g * xi)?;
                for (n, (re, im)) in c.iter_mut().enumerate() {
                    let z = Complex64::from_polar(j[n], n as f64 * tau);
                    re[idx] = z.re;
                    im[idx] = z.im;
                }
            }
            coef.push((xi, c));
        }
        Ok(LatticeSumTable { lattice: *lat, nmax, truncation: m, g2, coef })
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// `sigma_n^Y(k_o)` for `n = -nmax..=nmax`, index `n + nmax`.
    pub fn sums(&self, k_o: f64) -> Result<Vec<Complex64>> {
        if !(k_o > 0.0) {
            return Err(Error::Domain(format!("k_o must be positive, got {k_o}")));
        }
        let l = self.lattice.l;
        let kl2 = (k_o * l).powi(2);
        let mut inv = Vec::with_capacity(self.g2.len());
        for &g2 in &self.g2 {
            let d = kl2 - g2;
            if d.abs() <= POLE_WINDOW {
                return Err(Error::PoleProximity(format!(
                    "k_o L = {} sits on the empty-lattice line beta_m L = {}",
                    k_o * l,
                    g2.sqrt()
                )));
            }
            inv.push(1.0 / d);
        }
        let mut last_err = None;
        for (xi, coef) in &self.coef {
            let x = k_o * xi;
            let j = bessel_j_seq(self.nmax + 1, x)?;
            let zero = (0..=self.nmax).find(|&n| {
                let below = if n == 0 { j[1] } else { j[n - 1] };
                j[n].abs() < BESSEL_ZERO_REL * (below.abs() + j[n + 1].abs())
            });
            if let Some(n) = zero {
                last_err = Some(Error::BesselZero { n: n as i32, x });
                continue;
            }
            // `inv` holds 1/((kL)^2 - (gL)^2), so 4/A picks up a factor L^2.
            let pre = 4.0 * l * l / self.lattice.area();
            let pos: Vec<Complex64> = coef
                .iter()
                .map(|(re, im)| {
                    let (mut ar, mut ai) = (0.0, 0.0);
                    for ((r, i), w) in re.iter().zip(im).zip(&inv) {
                        ar += r * w;
                        ai += i * w;
                    }
                    Complex64::new(ar, ai)
                })
                .collect();
            let mut out = (-(self.nmax as i32)..=(self.nmax as i32))
                .map(|n| {
                    let na = n.unsigned_abs() as usize;
                    let acc = if n < 0 { sign(n) * pos[na].conj() } else { pos[na] };
                    let jk = if n < 0 { sign(n) * j[na] } else { j[na] };
                    i_pow(n) * acc * (pre / jk)
                })
                .collect::<Vec<_>>();
            let y0 = bessel_y(0, x)?;
            out[self.nmax] -= y0 / j[0];
            return Ok(out);
        }
        Err(last_err.expect("at least one xi was tried"))
    }
}
