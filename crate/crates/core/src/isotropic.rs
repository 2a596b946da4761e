//! Band curves of an isotropic effective dispersion relation `beta^2(k_o)`.
//!
//! Foldy and the effective medium both give `beta` as an explicit function of
//! frequency, so curves come from direct sampling instead of root tracing.

use crate::error::Result;
use crate::model::{DispersionCurve, MethodId};
use crate::roots::bisect;

/// Samples `beta_sq` on `[k_lo, k_hi]`, splitting at `poles`, and returns one
/// curve per pass band (`beta^2 >= 0`). Zeros of `beta^2` are refined by
/// bisection; each pole is approached geometrically so the branch reaches it.
pub(crate) fn isotropic_curves<F>(
    beta_sq: F,
    poles: &[f64],
    k_range: (f64, f64),
    grid: usize,
    l: f64,
    method: MethodId,
) -> Result<Vec<DispersionCurve>>
where
    F: Fn(f64) -> Result<f64>,
{
    let (k_lo, k_hi) = k_range;
    let mut cuts: Vec<f64> = poles.iter().copied().filter(|p| *p > k_lo && *p < k_hi).collect();
    cuts.sort_by(|a, b| a.total_cmp(b));
    let mut edges = vec![k_lo];
    edges.extend(&cuts);
    edges.push(k_hi);

    let mut curves = Vec::new();
    for (seg, w) in edges.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let left_pole = seg > 0;
        let right_pole = seg + 1 < edges.len() - 1;
        let n = ((grid as f64 * (b - a) / (k_hi - k_lo)).ceil() as usize).max(16);
        let mut ks: Vec<f64> = (0..=n)
            .map(|i| a + (b - a) * i as f64 / n as f64)
            .filter(|&k| (!left_pole || k > a) && (!right_pole || k < b))
            .collect();
        for j in 2..=9 {
            let d = 10f64.powi(-j);
            if left_pole {
                ks.push(a * (1.0 + d));
            }
            if right_pole {
                ks.push(b * (1.0 - d));
            }
        }
        ks.sort_by(|x, y| x.total_cmp(y));
        ks.dedup();

        let vals: Vec<(f64, f64)> = ks.iter().filter_map(|&k| beta_sq(k).ok().map(|v| (k, v))).collect();
        let mut run: Vec<(f64, f64)> = Vec::new();
        let flush = |run: &mut Vec<(f64, f64)>, curves: &mut Vec<DispersionCurve>| {
            if run.len() >= 2 {
                let mut pts: Vec<(f64, f64)> = run.iter().map(|&(k, b2)| (b2.max(0.0).sqrt() * l, k * l)).collect();
                pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
                curves.push(DispersionCurve { method, points: pts, branch_index: curves.len() });
            }
            run.clear();
        };
        for (i, &(k, v)) in vals.iter().enumerate() {
            if i > 0 {
                let (kp, vp) = vals[i - 1];
                if (vp >= 0.0) != (v >= 0.0) {
                    if let Ok(root) = bisect(&beta_sq, kp, k, 1e-15) {
                        run.push((root, 0.0));
                    }
                    if v < 0.0 {
                        flush(&mut run, &mut curves);
                    }
                }
            }
            if v >= 0.0 {
                run.push((k, v));
            }
        }
        flush(&mut run, &mut curves);
    }
    Ok(curves)
}
