//! Cylindrical Bessel functions of integer order.
//!
//! `J_n` is summed from its ascending series for small arguments and from a
//! normalized backward (Miller) recurrence otherwise. `Y_0` and `Y_1` come
//! from Neumann series over the same `J` sequence, higher orders from the
//! forward recurrence, which is stable for `Y`.

use crate::error::{Error, Result};
use std::f64::consts::{FRAC_2_PI, PI};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 1.0;

fn check_j_arg(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel J needs x >= 0, got {x}")));
    }
    Ok(())
}

fn check_y_arg(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("Bessel Y needs x > 0, got {x}")));
    }
    Ok(())
}

fn reflect(n: i32) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn j_series(n: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= half / k as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= -q / (k as f64 * (n + k) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 200 {
            break;
        }
    }
    sum
}

fn miller_start(top: usize, x: f64) -> usize {
    let s = top + 40 + (4.0 * x.sqrt()) as usize;
    s + (s % 2)
}

/// Normalized `J_0..=J_len-1` by backward recurrence. Requires `x >= SERIES_LIMIT`.
fn j_miller(len: usize, x: f64) -> Vec<f64> {
    let start = miller_start(len.max(x.ceil() as usize), x);
    let mut out = vec![0.0; len];
    let mut jp1 = 0.0;
    let mut j = 1e-30;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k < len {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += 2.0 * j;
        }
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    out[0] = j;
    norm += j;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

fn j_sequence(len: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; len];
        if len > 0 {
            out[0] = 1.0;
        }
        out
    } else if x < SERIES_LIMIT {
        (0..len).map(|n| j_series(n, x)).collect()
    } else {
        j_miller(len, x)
    }
}

/// `J_0(x), ..., J_nmax(x)`.
pub fn bessel_j_seq(nmax: usize, x: f64) -> Result<Vec<f64>> {
    check_j_arg(x)?;
    Ok(j_sequence(nmax + 1, x))
}

/// `J_0, ..., J_nmax` and `Y_0, ..., Y_nmax` at one argument.
pub fn bessel_jy_seq(nmax: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_y_arg(x)?;
    let len = (nmax + 2).max(x.ceil() as usize + 40);
    let mut j = j_sequence(len, x);
    let lg = (0.5 * x).ln() + EULER_GAMMA;

    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 < len {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        s1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = FRAC_2_PI * lg * j[0] - 2.0 * FRAC_2_PI * s0;
    let y1 = FRAC_2_PI * lg * j[1] - FRAC_2_PI * j[0] / x + FRAC_2_PI * s1;

    let mut y = Vec::with_capacity(nmax + 1);
    y.push(y0);
    if nmax >= 1 {
        y.push(y1);
    }
    for n in 1..nmax {
        let next = 2.0 * n as f64 / x * y[n] - y[n - 1];
        y.push(next);
    }
    j.truncate(nmax + 1);
    Ok((j, y))
}

/// Bessel function of the first kind `J_n(x)`.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    check_j_arg(x)?;
    let m = n.unsigned_abs() as usize;
    let v = if x < SERIES_LIMIT {
        if x == 0.0 {
            if m == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            j_series(m, x)
        }
    } else {
        j_miller(m + 1, x)[m]
    };
    Ok(if n < 0 { reflect(n) * v } else { v })
}

/// Bessel function of the second kind `Y_n(x)`.
pub fn bessel_y(n: i32, x: f64) -> Result<f64> {
    let m = n.unsigned_abs() as usize;
    let (_, y) = bessel_jy_seq(m, x)?;
    Ok(if n < 0 { reflect(n) * y[m] } else { y[m] })
}

/// `J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2`.
pub fn bessel_j_prime(n: i32, x: f64) -> Result<f64> {
    Ok(0.5 * (bessel_j(n - 1, x)? - bessel_j(n + 1, x)?))
}

/// `Y_n'(x) = (Y_{n-1}(x) - Y_{n+1}(x)) / 2`.
pub fn bessel_y_prime(n: i32, x: f64) -> Result<f64> {
    Ok(0.5 * (bessel_y(n - 1, x)? - bessel_y(n + 1, x)?))
}

/// Derivatives `J_n'` and `Y_n'` for `n = 0..=nmax`.
pub fn bessel_jy_prime_seq(nmax: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (j, y) = bessel_jy_seq(nmax + 1, x)?;
    let d = |f: &[f64], n: usize| {
        if n == 0 {
            -f[1]
        } else {
            0.5 * (f[n - 1] - f[n + 1])
        }
    };
    Ok((
        (0..=nmax).map(|n| d(&j, n)).collect(),
        (0..=nmax).map(|n| d(&y, n)).collect(),
    ))
}

/// Small-argument asymptote of `Y_0`: `(2/pi)(ln(x/2) + gamma)`.
pub fn y0_small_argument(x: f64) -> f64 {
    (2.0 / PI) * ((0.5 * x).ln() + EULER_GAMMA)
}
