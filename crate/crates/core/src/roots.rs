//! Scalar root bracketing and bisection.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// The endpoints must have opposite signs (or one of them must be a root).
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::InvalidBracket { lo, hi });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= tol || mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// `n` log-spaced points covering `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else if i == 0 {
                lo
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// All roots of `f` found between consecutive probe points where the sign
/// flips, each refined by bisection. Exact zeros at probes are kept.
pub fn sign_change_roots<F: Fn(f64) -> f64>(f: F, probes: &[f64], tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    let values: Vec<f64> = probes.iter().map(|&x| f(x)).collect();
    for i in 0..probes.len().saturating_sub(1) {
        let (fa, fb) = (values[i], values[i + 1]);
        if !fa.is_finite() || !fb.is_finite() {
            continue;
        }
        if fa == 0.0 {
            roots.push(probes[i]);
        } else if fb != 0.0 && fa.signum() != fb.signum() {
            if let Ok(r) = bisect(&f, probes[i], probes[i + 1], tol) {
                roots.push(r);
            }
        }
    }
    if let Some(&last) = values.last() {
        if last == 0.0 {
            roots.push(*probes.last().unwrap());
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisects_square_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_brackets() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoSignChange { .. })
        ));
        assert!(bisect(|x| x, 1.0, -1.0, 1e-12).is_err());
        assert!(bisect(|x| 1.0 / x, 0.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn finds_every_sign_change() {
        let probes = log_grid(0.01, 100.0, 400);
        assert_eq!(probes.len(), 400);
        assert_eq!(probes[0], 0.01);
        assert_eq!(probes[399], 100.0);
        let roots = sign_change_roots(|x: f64| (x - 0.5) * (x - 3.0) * (x - 40.0), &probes, 1e-12);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.5, 3.0, 40.0]) {
            assert!((r - e).abs() < 1e-11);
        }
    }
}
