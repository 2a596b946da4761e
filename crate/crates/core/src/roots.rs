//! Scalar root bracketing and minimization.

use crate::error::{Error, Result};

/// Bisection on a sign-changing bracket until the bracket is below `rel_tol` relative.
pub fn bisect<F>(f: &F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRootFound(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs() || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for a minimum on `[lo, hi]`; returns `(x, f(x))`.
pub fn golden_min<F>(f: &F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..300 {
        if hi - lo <= rel_tol * (0.5 * (lo + hi)).abs() {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(&|x: f64| Ok(x * x - 2.0), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_without_bracket() {
        assert!(matches!(bisect(&|x: f64| Ok(x * x + 1.0), 0.0, 2.0, 1e-12), Err(Error::NoRootFound(_))));
    }

    #[test]
    fn golden_finds_v_shaped_minimum() {
        let (x, v) = golden_min(&|x: f64| Ok((x - 0.3).abs()), 0.0, 1.0, 1e-13).unwrap();
        assert!((x - 0.3).abs() < 1e-12 && v < 1e-12);
    }
}
