//! Reference band structure from the truncated Rayleigh Identity.
//!
//! For a Bloch vector `beta` and wavenumber `k_o` the multipole coefficients
//! `B_n`, `|n| <= N`, satisfy `sum_p M_np B_p = 0` with
//! `M_np = delta_np - (-1)^{p-n} sigma^Y_{p-n}(k_o, beta) Z_p`. Bloch
//! eigenfrequencies are the `k_o` where `M` is singular; the smallest
//! singular value serves as a sign-free indicator.

use crate::error::{Error, Result};
use crate::lattice::{BlochVector, LatticeSumTable};
use crate::model::{ArrayConfig, BandGap, DispersionCurve, MethodId};
use crate::roots::golden_min;
use crate::shell::{loaded_resonance, z0_soft_approx, z1_soft_approx, z_shell_exact_seq};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Reciprocal window of the Rayleigh lattice sums. Orders up to `2N` are
/// needed and converge much more slowly than `sigma_0`; with `M = 8` the
/// order-4 and order-8 sums are too inaccurate at large filling fractions.
pub const RAYLEIGH_LATTICE_M: usize = 32;

/// Highest shell order whose localized bands are set aside by [`extract_gap`].
const LOCALIZED_ORDER_MAX: usize = 8;

/// Relative half-width of the window that marks a band as localized at a resonance.
const LOCALIZED_WINDOW: f64 = 0.01;

/// Which shell factor enters the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZForm {
    /// Full membrane-shell `Z_n` for every order.
    Exact,
    /// Soft-shell `Z_0`, `Z_1`; higher orders dropped.
    Soft,
}

/// Numerical settings of the Rayleigh solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayleighOptions {
    /// Multipole orders `-N..=N`.
    pub n_trunc: usize,
    /// Reciprocal window `|m1|, |m2| <= M` of the lattice sums.
    pub lattice_m: usize,
    /// Frequency grid points across the scan window.
    pub grid: usize,
    /// Bloch vectors per Brillouin-zone segment.
    pub per_segment: usize,
    pub z_form: ZForm,
    /// Relative tolerance of the golden-section refinement in `k_o`.
    pub rel_tol: f64,
    /// Indicator value below which a refined minimum counts as a root.
    pub threshold: f64,
}

impl Default for RayleighOptions {
    fn default() -> Self {
        RayleighOptions {
            n_trunc: 5,
            lattice_m: RAYLEIGH_LATTICE_M,
            grid: 2000,
            per_segment: 64,
            z_form: ZForm::Exact,
            rel_tol: 1e-13,
            threshold: 1e-8,
        }
    }
}

/// Assembled Rayleigh matrix at one `(k_o, beta)`.
#[derive(Debug, Clone)]
pub struct RayleighSystem {
    pub n_trunc: usize,
    pub matrix: DMatrix<Complex64>,
    pub k_o: f64,
    pub beta: BlochVector,
}

impl RayleighSystem {
    /// Diagonally balanced copy `D M D^{-1}`: same determinant and null space
    /// dimension, comparable row and column norms.
    pub fn balanced(&self) -> DMatrix<Complex64> {
        balance(&self.matrix)
    }

    /// Singular values of the balanced matrix in ascending order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.balanced().singular_values().iter().copied().collect();
        s.sort_by(|a, b| a.total_cmp(b));
        s
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.singular_values()[0]
    }
}

/// `Z_0..=Z_N` in the requested form.
pub fn z_factors(k_o: f64, cfg: &ArrayConfig, n: usize, form: ZForm) -> Result<Vec<f64>> {
    match form {
        ZForm::Exact => z_shell_exact_seq(n, k_o, &cfg.shell, &cfg.fluid),
        ZForm::Soft => {
            let p = cfg.params();
            let mut z = vec![0.0; n + 1];
            z[0] = z0_soft_approx(k_o, &p, cfg.shell.a)?;
            if n >= 1 {
                z[1] = z1_soft_approx(k_o, &p, &cfg.shell, &cfg.fluid)?;
            }
            Ok(z)
        }
    }
}

/// Osborne balancing iterated to convergence, so the scaling (unlike a
/// power-of-two variant) varies continuously with the entries.
fn balance(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let mut b = m.clone();
    for _ in 0..200 {
        let mut converged = true;
        for i in 0..n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 0..n {
                if j != i {
                    r += b[(i, j)].norm_sqr();
                    c += b[(j, i)].norm_sqr();
                }
            }
            if r == 0.0 || c == 0.0 {
                continue;
            }
            let f = (c / r).sqrt().sqrt();
            if (f - 1.0).abs() > 1e-10 {
                converged = false;
            }
            for j in 0..n {
                b[(i, j)] *= f;
                b[(j, i)] /= f;
            }
        }
        if converged {
            break;
        }
    }
    b
}

/// `M_np = delta_np - (-1)^{p-n} sigma_{p-n} Z_|p|`; `sig` indexed by `d + 2N`.
fn assemble(sig: &[Complex64], z: &[f64], n: usize) -> DMatrix<Complex64> {
    let dim = 2 * n + 1;
    let ni = n as i32;
    DMatrix::from_fn(dim, dim, |r, c| {
        let nn = r as i32 - ni;
        let p = c as i32 - ni;
        let d = p - nn;
        let s = if d % 2 == 0 { 1.0 } else { -1.0 };
        let id = if r == c { 1.0 } else { 0.0 };
        Complex64::new(id, 0.0) - sig[(d + 2 * ni) as usize] * (s * z[p.unsigned_abs() as usize])
    })
}

/// Rayleigh matrix with the exact shell factor and the default lattice window.
pub fn build_system(k_o: f64, beta: BlochVector, cfg: &ArrayConfig, n: usize) -> Result<RayleighSystem> {
    let opts = RayleighOptions { n_trunc: n, ..RayleighOptions::default() };
    build_system_with(k_o, beta, cfg, &opts)
}

pub fn build_system_with(k_o: f64, beta: BlochVector, cfg: &ArrayConfig, opts: &RayleighOptions) -> Result<RayleighSystem> {
    Evaluator::new(beta, cfg, opts)?.system(k_o)
}

/// Smallest singular value of the Rayleigh matrix (exact shell factor).
pub fn dispersion_indicator(k_o: f64, beta: BlochVector, cfg: &ArrayConfig, n: usize) -> Result<f64> {
    Ok(build_system(k_o, beta, cfg, n)?.smallest_singular_value())
}

/// Per-`beta` evaluator reusing the frequency-independent lattice data.
struct Evaluator<'a> {
    cfg: &'a ArrayConfig,
    opts: RayleighOptions,
    beta: BlochVector,
    table: LatticeSumTable,
}

impl<'a> Evaluator<'a> {
    fn new(beta: BlochVector, cfg: &'a ArrayConfig, opts: &RayleighOptions) -> Result<Self> {
        let table = LatticeSumTable::new(beta, &cfg.lattice, 2 * opts.n_trunc, opts.lattice_m)?;
        Ok(Evaluator { cfg, opts: *opts, beta, table })
    }

    fn system(&self, k_o: f64) -> Result<RayleighSystem> {
        let n = self.opts.n_trunc;
        let sig = self.table.sums(k_o)?;
        let z = z_factors(k_o, self.cfg, n, self.opts.z_form)?;
        Ok(RayleighSystem { n_trunc: n, matrix: assemble(&sig, &z, n), k_o, beta: self.beta })
    }

    fn indicator(&self, k_o: f64) -> f64 {
        match self.system(k_o) {
            Ok(s) => s.smallest_singular_value(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Roots in `k_o` on `[k_lo, k_hi]`, repeated by multiplicity, ascending.
    fn roots(&self, k_lo: f64, k_hi: f64) -> Vec<f64> {
        let g = self.opts.grid.max(3);
        let ks: Vec<f64> = (0..g).map(|i| k_lo + (k_hi - k_lo) * i as f64 / (g - 1) as f64).collect();
        let v: Vec<f64> = ks.iter().map(|&k| self.indicator(k)).collect();
        let mut out = Vec::new();
        for i in 1..g - 1 {
            if !(v[i].is_finite() && v[i] <= v[i - 1] && v[i] < v[i + 1]) {
                continue;
            }
            let f = |k: f64| Ok(self.indicator(k));
            let Ok((k, val)) = golden_min(&f, ks[i - 1], ks[i + 1], self.opts.rel_tol) else {
                continue;
            };
            let edge = v[i - 1].min(v[i + 1]);
            if !(val < self.opts.threshold || val < 1e-6 * edge) {
                continue;
            }
            let mult = match self.system(k) {
                Ok(s) => {
                    let sv = s.singular_values();
                    let cut = (1e3 * val).max(self.opts.threshold);
                    sv.iter().take_while(|&&x| x <= cut).count().max(1)
                }
                Err(_) => 1,
            };
            out.extend(std::iter::repeat(k).take(mult));
        }
        out
    }
}

/// Bloch eigenwavenumbers `k_o` at one Bloch vector, within `[k_lo, k_hi]` [1/m].
pub fn roots_at(beta: BlochVector, cfg: &ArrayConfig, k_range: (f64, f64), opts: &RayleighOptions) -> Result<Vec<f64>> {
    Ok(Evaluator::new(beta, cfg, opts)?.roots(k_range.0, k_range.1))
}

/// Point on a Brillouin-zone path: cumulative length `s` (in units of `1/L`) and Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub s: f64,
    pub beta: BlochVector,
}

fn path_from_corners(corners: &[(f64, f64)], l: f64, per_segment: usize) -> Vec<PathPoint> {
    let per = per_segment.max(1);
    let mut out = Vec::new();
    let mut s = 0.0;
    for (seg, w) in corners.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let len = (b.0 - a.0).hypot(b.1 - a.1);
        for i in 0..=per {
            if seg > 0 && i == 0 {
                continue;
            }
            let t = i as f64 / per as f64;
            let q = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
            out.push(PathPoint { s: s + t * len, beta: BlochVector::from_components(q.0 / l, q.1 / l) });
        }
        s += len;
    }
    out
}

/// Gamma-X segment, `beta L` from 0 to pi along the first axis.
pub fn gamma_x_path(cfg: &ArrayConfig, per_segment: usize) -> Vec<PathPoint> {
    path_from_corners(&[(0.0, 0.0), (PI, 0.0)], cfg.lattice.l, per_segment)
}

/// Gamma-X-M-Gamma contour of the irreducible zone.
pub fn brillouin_path(cfg: &ArrayConfig, per_segment: usize) -> Vec<PathPoint> {
    path_from_corners(&[(0.0, 0.0), (PI, 0.0), (PI, PI), (0.0, 0.0)], cfg.lattice.l, per_segment)
}

/// Default scan window in Hz: up to just below the first Bragg frequency.
pub fn default_window(cfg: &ArrayConfig) -> (f64, f64) {
    let fb = cfg.bragg_frequency();
    (0.005 * fb, 0.98 * fb)
}

/// Cumulative path coordinate of an arbitrary list of Bloch vectors.
fn path_coordinates(path: &[BlochVector], l: f64) -> Vec<PathPoint> {
    let mut out = Vec::with_capacity(path.len());
    let mut s = 0.0;
    for (i, b) in path.iter().enumerate() {
        if i == 0 {
            s = b.beta * l;
        } else {
            let (p1, p2) = path[i - 1].components();
            let (q1, q2) = b.components();
            s += (q1 - p1).hypot(q2 - p2) * l;
        }
        out.push(PathPoint { s, beta: *b });
    }
    out
}

/// Band structure along `path` with the exact shell factor and default lattice window.
pub fn trace_bands(path: &[BlochVector], f_range: (f64, f64), cfg: &ArrayConfig, n: usize, grid: usize) -> Result<Vec<DispersionCurve>> {
    let opts = RayleighOptions { n_trunc: n, grid, ..RayleighOptions::default() };
    trace_bands_with(path, f_range, cfg, &opts)
}

pub fn trace_bands_with(path: &[BlochVector], f_range: (f64, f64), cfg: &ArrayConfig, opts: &RayleighOptions) -> Result<Vec<DispersionCurve>> {
    let pts = path_coordinates(path, cfg.lattice.l);
    trace_points(&pts, f_range, cfg, opts, MethodId::Rayleigh)
}

/// Band structure on precomputed path points; `s` becomes the `betaL` coordinate.
pub fn trace_points(pts: &[PathPoint], f_range: (f64, f64), cfg: &ArrayConfig, opts: &RayleighOptions, method: MethodId) -> Result<Vec<DispersionCurve>> {
    let (k_lo, k_hi) = (cfg.hz_to_k(f_range.0), cfg.hz_to_k(f_range.1));
    if !(k_lo > 0.0 && k_hi > k_lo) {
        return Err(Error::Domain(format!("invalid frequency range {f_range:?}")));
    }
    let l = cfg.lattice.l;
    let samples: Vec<(f64, Vec<f64>)> = pts
        .par_iter()
        .map(|p| Ok((p.s, roots_at(p.beta, cfg, (k_lo, k_hi), opts)?.into_iter().map(|k| k * l).collect())))
        .collect::<Result<Vec<_>>>()?;
    let step = pts.windows(2).map(|w| (w[1].s - w[0].s).abs()).fold(0.0, f64::max);
    link_branches(&samples, method, step)
}

/// Groups per-`beta` roots `(s, [k_o L])` into continuous branches.
///
/// Each open branch predicts its next value by linear extrapolation from its
/// last two points; roots are assigned greedily by distance to the prediction
/// within a jump tolerance of three median step changes (at least `1.5 * step`,
/// the largest move of a band with group velocity `c_o`).
pub fn link_branches(samples: &[(f64, Vec<f64>)], method: MethodId, step: f64) -> Result<Vec<DispersionCurve>> {
    let mut moves = Vec::new();
    for w in samples.windows(2) {
        for &r in &w[1].1 {
            if let Some(d) = w[0].1.iter().map(|&q| (q - r).abs()).min_by(|a, b| a.total_cmp(b)) {
                moves.push(d);
            }
        }
    }
    moves.sort_by(|a, b| a.total_cmp(b));
    let median = if moves.is_empty() { 0.0 } else { moves[moves.len() / 2] };
    let tol = (3.0 * median).max(1.5 * step);

    struct Branch {
        points: Vec<(f64, f64)>,
        open: bool,
    }
    let mut branches: Vec<Branch> = Vec::new();
    for (j, (s, roots)) in samples.iter().enumerate() {
        let mut taken = vec![false; roots.len()];
        if j > 0 {
            let mut cand = Vec::new();
            for (bi, b) in branches.iter().enumerate() {
                if !b.open {
                    continue;
                }
                let &(ls, lk) = b.points.last().expect("branches are never empty");
                let pred = match b.points.len() {
                    n if n >= 2 => {
                        let (ps, pk) = b.points[n - 2];
                        if ls != ps {
                            lk + (lk - pk) / (ls - ps) * (s - ls)
                        } else {
                            lk
                        }
                    }
                    _ => lk,
                };
                for (ri, &r) in roots.iter().enumerate() {
                    let d = (r - pred).abs();
                    if d <= tol {
                        cand.push((d, bi, ri));
                    }
                }
            }
            cand.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut used = vec![false; branches.len()];
            for (i, &(d, bi, ri)) in cand.iter().enumerate() {
                if used[bi] || taken[ri] {
                    continue;
                }
                // A different, non-degenerate root at the same distance makes the choice arbitrary.
                if let Some(&(d2, _, r2)) = cand[i + 1..].iter().find(|c| c.1 == bi && !taken[c.2]) {
                    let (a, b) = (roots[ri], roots[r2]);
                    if (d2 - d).abs() <= 1e-12 * a.abs() && (a - b).abs() > 1e-9 * a.abs() {
                        return Err(Error::BranchAmbiguity(a));
                    }
                }
                used[bi] = true;
                taken[ri] = true;
                branches[bi].points.push((*s, roots[ri]));
            }
            for (bi, b) in branches.iter_mut().enumerate() {
                if !used[bi] {
                    b.open = false;
                }
            }
        }
        for (ri, &r) in roots.iter().enumerate() {
            if !taken[ri] {
                branches.push(Branch { points: vec![(*s, r)], open: true });
            }
        }
    }
    let mut curves: Vec<DispersionCurve> = branches
        .into_iter()
        .map(|b| DispersionCurve { method, points: b.points, branch_index: 0 })
        .collect();
    curves.sort_by(|a, b| a.points[0].1.total_cmp(&b.points[0].1).then(a.points[0].0.total_cmp(&b.points[0].0)));
    for (i, c) in curves.iter_mut().enumerate() {
        c.branch_index = i;
    }
    Ok(curves)
}

/// Frequency intervals (in `k_o L`) not covered by any branch, between the
/// lowest and highest covered values.
pub fn uncovered_intervals(curves: &[DispersionCurve]) -> Vec<(f64, f64)> {
    let mut spans: Vec<(f64, f64)> = curves
        .iter()
        .filter(|c| !c.points.is_empty())
        .map(|c| {
            c.points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, k)| (lo.min(k), hi.max(k)))
        })
        .collect();
    spans.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut gaps = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    for (lo, hi) in spans {
        if reach.is_finite() && lo > reach {
            gaps.push((reach, lo));
        }
        reach = reach.max(hi);
    }
    gaps
}

/// Band gap of mode `n_mode` (0 or 1): the uncovered interval nearest the
/// fluid-loaded shell resonance of that order.
///
/// Branches that stay within 1% of a resonance of order 2 or higher are
/// narrow pass bands of those modes; they are set aside so that they do not
/// split the breathing and dipole gaps.
pub fn extract_gap(curves: &[DispersionCurve], n_mode: u8, cfg: &ArrayConfig) -> Result<BandGap> {
    if n_mode > 1 {
        return Err(Error::Domain(format!("n_mode must be 0 or 1, got {n_mode}")));
    }
    let l = cfg.lattice.l;
    let method = curves.first().map(|c| c.method).unwrap_or(MethodId::Rayleigh);
    let anchor = loaded_resonance(n_mode as usize, &cfg.shell, &cfg.fluid)? * l;
    let higher: Vec<f64> = (2..=LOCALIZED_ORDER_MAX)
        .filter_map(|n| loaded_resonance(n, &cfg.shell, &cfg.fluid).ok())
        .map(|k| k * l)
        .collect();
    let localized = |c: &DispersionCurve| {
        higher.iter().any(|&r| c.points.iter().all(|&(_, k)| (k - r).abs() <= LOCALIZED_WINDOW * r))
    };
    let kept: Vec<DispersionCurve> = curves.iter().filter(|c| !localized(c)).cloned().collect();
    let dist = |g: &(f64, f64)| if anchor < g.0 { g.0 - anchor } else if anchor > g.1 { anchor - g.1 } else { 0.0 };
    let best = uncovered_intervals(&kept)
        .into_iter()
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .ok_or_else(|| Error::NoGap(format!("no uncovered interval near mode {n_mode}")))?;
    Ok(BandGap::new(n_mode, cfg.k_to_hz(best.0 / l), cfg.k_to_hz(best.1 / l), method))
}

/// Both resonance gaps from the Gamma-X segment.
pub fn rayleigh_gaps(cfg: &ArrayConfig, opts: &RayleighOptions) -> Result<[BandGap; 2]> {
    let pts = gamma_x_path(cfg, opts.per_segment);
    let curves = trace_points(&pts, default_window(cfg), cfg, opts, MethodId::Rayleigh)?;
    Ok([extract_gap(&curves, 0, cfg)?, extract_gap(&curves, 1, cfg)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_scatterers_give_identity() {
        let sig = vec![Complex64::new(0.3, 0.1); 9];
        let m = assemble(&sig, &[0.0; 3], 2);
        assert_eq!(m, DMatrix::identity(5, 5));
    }

    #[test]
    fn path_lengths() {
        let cfg = ArrayConfig::default();
        let p = brillouin_path(&cfg, 8);
        assert_eq!(p.len(), 25);
        assert!((p.last().unwrap().s - (2.0 + 2f64.sqrt()) * PI).abs() < 1e-12);
        assert!(p.last().unwrap().beta.beta.abs() < 1e-12);
    }

    #[test]
    fn linking_follows_crossing_bands() {
        let samples: Vec<(f64, Vec<f64>)> = (0..=10)
            .map(|i| {
                let s = i as f64 * 0.1;
                let mut r = vec![0.5 + 0.3 * s, 0.8 - 0.3 * s];
                r.sort_by(|a, b| a.total_cmp(b));
                (s, r)
            })
            .collect();
        let curves = link_branches(&samples, MethodId::Rayleigh, 0.1).unwrap();
        assert_eq!(curves.len(), 2);
        assert!(uncovered_intervals(&curves).is_empty());
    }
}
