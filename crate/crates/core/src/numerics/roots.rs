use crate::error::{Error, Result};
use crate::real::Real;

/// Bisection on a bracketing interval `[a, b]` until its width is below `xtol`.
///
/// Exact zeros at either end are returned immediately. Fails when the
/// function does not change sign over the bracket.
pub fn bisect<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, xtol: T) -> Result<T> {
    let (mut lo, mut hi) = (a, b);
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::Domain(format!(
            "no sign change on [{}, {}]: f = ({}, {})",
            a, b, f_lo, f_hi
        )));
    }
    let xtol = xtol.max(T::epsilon() * (a.abs() + b.abs()));
    let two = T::lit(2.0);
    for _ in 0..400 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        let mid = lo + (hi - lo) / two;
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / two)
}

/// All sign changes of `f` over `n` uniform subintervals of `[a, b]`,
/// polished by bisection. Exact zeros at grid nodes are reported once.
pub fn scan_roots<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, n: usize, xtol: T) -> Vec<T> {
    let n = n.max(1);
    let h = (b - a) / T::from_usize(n).unwrap();
    let mut roots = Vec::new();
    let mut x_prev = a;
    let mut f_prev = f(a);
    if f_prev == T::zero() {
        roots.push(a);
    }
    for i in 1..=n {
        let x = if i == n { b } else { a + h * T::from_usize(i).unwrap() };
        let fx = f(x);
        if fx == T::zero() {
            roots.push(x);
        } else if f_prev != T::zero() && f_prev.signum() != fx.signum() {
            if let Ok(r) = bisect(&f, x_prev, x, xtol) {
                roots.push(r);
            }
        }
        x_prev = x;
        f_prev = fx;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_missing_bracket() {
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn scan_finds_every_simple_root() {
        let roots = scan_roots(|x: f64| (x - 0.2) * (x - 0.55) * (x - 0.9), 0.0, 1.0, 64, 1e-13);
        assert_eq!(roots.len(), 3);
        for (r, e) in roots.iter().zip([0.2, 0.55, 0.9]) {
            assert!((r - e).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_reports_node_zero_once() {
        let roots = scan_roots(|x: f64| x - 0.5, 0.0, 1.0, 4, 1e-13);
        assert_eq!(roots, vec![0.5]);
    }
}
