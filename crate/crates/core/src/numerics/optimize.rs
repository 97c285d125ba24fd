use crate::real::Real;

/// Golden-section search for the maximiser of a unimodal function on `[a, b]`.
pub fn golden_section_max<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, xtol: T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let xtol = xtol.max(T::epsilon() * (a.abs() + b.abs()));
    for _ in 0..300 {
        if (hi - lo).abs() <= xtol {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    // endpoints are candidates too: the search only sees interior points
    let mut best = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    for x in [a, b] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Golden-section search for the minimiser of a unimodal function on `[a, b]`.
pub fn golden_section_min<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, xtol: T) -> (T, T) {
    let (x, fx) = golden_section_max(|x| -f(x), a, b, xtol);
    (x, -fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let (x, fx) = golden_section_max(|x: f64| -(x - 0.3) * (x - 0.3) + 2.0, 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_function_hits_endpoint() {
        let (x, _) = golden_section_min(|x: f64| x, 0.2, 0.8, 1e-12);
        assert_eq!(x, 0.2);
    }
}
