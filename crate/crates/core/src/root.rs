//! Bracketing root finder used by the solvers.

use crate::error::{Error, Result};

pub const MAX_ITER: usize = 200;

/// Bisection on `[lo, hi]`. `f(lo)` and `f(hi)` must not share a strict sign.
/// Stops when the bracket is narrower than `tol`, when the midpoint stops
/// moving, or after [`MAX_ITER`] halvings.
pub fn bisect<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoBracket { lo, hi });
    }
    let lo_positive = f_lo > 0.0;
    bisect_by_sign(|x| f(x) > 0.0, lo, hi, lo_positive, tol)
}

/// Bisection driven only by which side of the root a point lies on.
/// `on_lo_side(x)` must equal `lo_positive` left of the root. Useful when
/// `f(lo) = 0` is a known spurious root at the bracket edge.
pub fn bisect_by_sign<P>(on_lo_side: P, mut lo: f64, mut hi: f64, lo_positive: bool, tol: f64) -> Result<f64>
where
    P: Fn(f64) -> bool,
{
    for _ in 0..MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if on_lo_side(mid) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn decreasing_function() {
        let r = bisect(|x| 1.0 - x, 0.0, 3.0, 1e-14).unwrap();
        assert!((r - 1.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_roots() {
        assert_eq!(bisect(|x| x, 0.0, 1.0, 1e-12).unwrap(), 0.0);
        assert_eq!(bisect(|x| x - 1.0, 0.0, 1.0, 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn sign_driven_skips_edge_root() {
        // x (1 - x) vanishes at 0 and 1; we want the interior one.
        let r = bisect_by_sign(|x| x * (1.0 - x) > 0.0, 0.0, 2.0, true, 0.0).unwrap();
        assert!((r - 1.0).abs() < 1e-15);
    }
}
