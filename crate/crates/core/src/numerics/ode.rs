//! Dormand–Prince 5(4) with step-size control and terminal events.
//!
//! States are fixed-size arrays so the scalar `c`-parameterised manifold
//! (`N = 1`) and the planar travelling-wave flow (`N = 2`) share one kernel.
//! Integration may run backwards (`t_end < t0`).

use crate::error::{Error, Result};
use crate::real::Real;

/// Terminal event function `g(t, y)`; integration stops where it changes sign.
pub type Event<'a, T, const N: usize> = dyn Fn(T, &[T; N]) -> T + 'a;

/// How an integration run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `t_end` was reached.
    Reached,
    /// The event with this index changed sign; the state is at the crossing.
    Event(usize),
    /// The step budget ran out.
    MaxSteps,
}

#[derive(Debug, Clone)]
pub struct OdeSolution<T, const N: usize> {
    pub t: T,
    pub y: [T; N],
    pub termination: Termination,
    pub steps: usize,
    pub rejected: usize,
}

/// Adaptive embedded Runge–Kutta pair of orders 5 and 4.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on `|h|`; zero means unbounded.
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Real> Default for Dopri5<T> {
    fn default() -> Self {
        Self {
            rtol: T::tol_floor(1e-10),
            atol: T::tol_floor(1e-12),
            h_max: T::zero(),
            max_steps: 2_000_000,
        }
    }
}

struct Tableau<T> {
    c: [T; 7],
    a: [[T; 6]; 7],
    b: [T; 7],
    e: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let l = T::lit;
        let z = T::zero();
        Self {
            c: [z, l(0.2), l(0.3), l(0.8), l(8.0 / 9.0), l(1.0), l(1.0)],
            a: [
                [z; 6],
                [l(0.2), z, z, z, z, z],
                [l(3.0 / 40.0), l(9.0 / 40.0), z, z, z, z],
                [l(44.0 / 45.0), l(-56.0 / 15.0), l(32.0 / 9.0), z, z, z],
                [
                    l(19372.0 / 6561.0),
                    l(-25360.0 / 2187.0),
                    l(64448.0 / 6561.0),
                    l(-212.0 / 729.0),
                    z,
                    z,
                ],
                [
                    l(9017.0 / 3168.0),
                    l(-355.0 / 33.0),
                    l(46732.0 / 5247.0),
                    l(49.0 / 176.0),
                    l(-5103.0 / 18656.0),
                    z,
                ],
                [
                    l(35.0 / 384.0),
                    z,
                    l(500.0 / 1113.0),
                    l(125.0 / 192.0),
                    l(-2187.0 / 6784.0),
                    l(11.0 / 84.0),
                ],
            ],
            b: [
                l(35.0 / 384.0),
                z,
                l(500.0 / 1113.0),
                l(125.0 / 192.0),
                l(-2187.0 / 6784.0),
                l(11.0 / 84.0),
                z,
            ],
            e: [
                l(71.0 / 57600.0),
                z,
                l(-71.0 / 16695.0),
                l(71.0 / 1920.0),
                l(-17253.0 / 339200.0),
                l(22.0 / 525.0),
                l(-1.0 / 40.0),
            ],
        }
    }
}

fn combine<T: Real, const N: usize>(y: &[T; N], h: T, ks: &[[T; N]], ws: &[T]) -> [T; N] {
    let mut out = *y;
    for (k, &w) in ks.iter().zip(ws) {
        if w == T::zero() {
            continue;
        }
        for i in 0..N {
            out[i] = out[i] + h * w * k[i];
        }
    }
    out
}

/// Cubic Hermite interpolation on one accepted step.
fn hermite<T: Real, const N: usize>(
    h: T,
    y0: &[T; N],
    f0: &[T; N],
    y1: &[T; N],
    f1: &[T; N],
    theta: T,
) -> [T; N] {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = two * t3 - three * t2 + one;
    let h10 = t3 - two * t2 + theta;
    let h01 = -two * t3 + three * t2;
    let h11 = t3 - t2;
    let mut out = [T::zero(); N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

impl<T: Real> Dopri5<T> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_h_max(mut self, h_max: T) -> Self {
        self.h_max = h_max;
        self
    }

    fn error_norm<const N: usize>(&self, y0: &[T; N], y1: &[T; N], err: &[T; N]) -> T {
        let mut acc = T::zero();
        for i in 0..N {
            let sc = self.atol + self.rtol * y0[i].abs().max(y1[i].abs());
            let r = err[i] / sc;
            acc = acc + r * r;
        }
        (acc / T::from_usize(N).unwrap()).sqrt()
    }

    /// Integrates `y' = rhs(t, y)` from `t0` to `t_end`.
    ///
    /// `events` are scalar functions of the state; the first sign change of
    /// any of them stops the run at the crossing (located on the step's
    /// Hermite interpolant). `observe` sees the initial point and every
    /// accepted step as `(t, y, y')`.
    pub fn integrate<F, O, const N: usize>(
        &self,
        mut rhs: F,
        t0: T,
        y0: [T; N],
        t_end: T,
        events: &[&Event<'_, T, N>],
        mut observe: O,
    ) -> Result<OdeSolution<T, N>>
    where
        F: FnMut(T, &[T; N]) -> [T; N],
        O: FnMut(T, &[T; N], &[T; N]),
    {
        let tab = Tableau::<T>::new();
        let span = t_end - t0;
        let dir = if span < T::zero() { -T::one() } else { T::one() };
        let mut t = t0;
        let mut y = y0;
        let mut k1 = rhs(t, &y);
        observe(t, &y, &k1);
        if span == T::zero() {
            return Ok(OdeSolution { t, y, termination: Termination::Reached, steps: 0, rejected: 0 });
        }
        let mut h = self.initial_step(&mut rhs, t, &y, &k1, span.abs()) * dir;
        let mut g_prev: Vec<T> = events.iter().map(|g| g(t, &y)).collect();
        let mut steps = 0usize;
        let mut rejected = 0usize;
        let h_floor = T::epsilon() * T::lit(16.0);
        let safety = T::lit(0.9);
        let fac_min = T::lit(0.2);
        let fac_max = T::lit(5.0);
        let expo = T::lit(-0.2);

        loop {
            let remaining = t_end - t;
            if remaining * dir <= h_floor * (t.abs() + T::one()) {
                return Ok(OdeSolution { t, y, termination: Termination::Reached, steps, rejected });
            }
            if steps >= self.max_steps {
                return Ok(OdeSolution { t, y, termination: Termination::MaxSteps, steps, rejected });
            }
            if self.h_max > T::zero() && h.abs() > self.h_max {
                h = self.h_max * dir;
            }
            let last = h.abs() >= remaining.abs();
            if last {
                h = remaining;
            }

            let mut k = [[T::zero(); N]; 7];
            k[0] = k1;
            for s in 1..7 {
                let ys = combine(&y, h, &k[..s], &tab.a[s][..s]);
                k[s] = rhs(t + tab.c[s] * h, &ys);
            }
            let y_new = combine(&y, h, &k, &tab.b);
            let mut err = [T::zero(); N];
            for i in 0..N {
                let e = tab.e.iter().zip(&k).fold(T::zero(), |acc, (ej, kj)| acc + *ej * kj[i]);
                err[i] = h * e;
            }
            let mut norm = self.error_norm(&y, &y_new, &err);
            if !norm.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                norm = T::infinity();
            }

            if norm <= T::one() {
                steps += 1;
                let t_new = if last { t_end } else { t + h };
                let f_new = k[6];
                // terminal events
                let mut hit: Option<(usize, T)> = None;
                for (idx, g) in events.iter().enumerate() {
                    let g1 = g(t_new, &y_new);
                    let g0 = g_prev[idx];
                    let crossed = (g0 < T::zero() && g1 >= T::zero()) || (g0 > T::zero() && g1 <= T::zero());
                    if crossed {
                        let (mut lo, mut hi) = (T::zero(), T::one());
                        for _ in 0..60 {
                            let mid = (lo + hi) / T::lit(2.0);
                            let ym = hermite(h, &y, &k1, &y_new, &f_new, mid);
                            let gm = g(t + mid * h, &ym);
                            if (gm < T::zero()) == (g0 < T::zero()) && gm != T::zero() {
                                lo = mid;
                            } else {
                                hi = mid;
                            }
                        }
                        if hit.is_none_or(|(_, th)| hi < th) {
                            hit = Some((idx, hi));
                        }
                    }
                }
                if let Some((idx, theta)) = hit {
                    let te = t + theta * h;
                    let ye = hermite(h, &y, &k1, &y_new, &f_new, theta);
                    let fe = rhs(te, &ye);
                    observe(te, &ye, &fe);
                    return Ok(OdeSolution { t: te, y: ye, termination: Termination::Event(idx), steps, rejected });
                }
                for (idx, g) in events.iter().enumerate() {
                    g_prev[idx] = g(t_new, &y_new);
                }
                t = t_new;
                y = y_new;
                k1 = f_new;
                observe(t, &y, &k1);
                let fac = if norm == T::zero() { fac_max } else { (safety * norm.powf(expo)).min(fac_max).max(fac_min) };
                h = h * fac;
            } else {
                rejected += 1;
                let fac = if norm.is_finite() { (safety * norm.powf(expo)).max(fac_min) } else { T::lit(0.1) };
                h = h * fac;
                if h.abs() <= h_floor * (t.abs() + T::one()) {
                    return Err(Error::Integration(format!("step size underflow at t = {}", t)));
                }
            }
        }
    }

    fn initial_step<F, const N: usize>(&self, rhs: &mut F, t: T, y: &[T; N], f0: &[T; N], span: T) -> T
    where
        F: FnMut(T, &[T; N]) -> [T; N],
    {
        let mut d0 = T::zero();
        let mut d1 = T::zero();
        for i in 0..N {
            let sc = self.atol + self.rtol * y[i].abs();
            d0 = d0 + (y[i] / sc).powi(2);
            d1 = d1 + (f0[i] / sc).powi(2);
        }
        let n = T::from_usize(N).unwrap();
        d0 = (d0 / n).sqrt();
        d1 = (d1 / n).sqrt();
        let small = T::lit(1e-5);
        let mut h0 = if d0 < small || d1 < small { T::lit(1e-6) } else { T::lit(0.01) * d0 / d1 };
        h0 = h0.min(span);
        let mut y1 = *y;
        for i in 0..N {
            y1[i] = y[i] + h0 * f0[i];
        }
        let f1 = rhs(t + h0, &y1);
        let mut d2 = T::zero();
        for i in 0..N {
            let sc = self.atol + self.rtol * y[i].abs();
            d2 = d2 + ((f1[i] - f0[i]) / sc).powi(2);
        }
        d2 = (d2 / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= T::lit(1e-15) {
            (h0 * T::lit(1e-3)).max(T::lit(1e-6))
        } else {
            (T::lit(0.01) / d1.max(d2)).powf(T::lit(0.2))
        };
        let mut h = (T::lit(100.0) * h0).min(h1).min(span);
        if self.h_max > T::zero() {
            h = h.min(self.h_max);
        }
        if !(h > T::zero()) || !h.is_finite() {
            h = span * T::lit(1e-6);
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_is_accurate() {
        let solver = Dopri5::<f64>::new(1e-10, 1e-12);
        let sol = solver
            .integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 5.0, &[], |_, _, _| {})
            .unwrap();
        assert_eq!(sol.termination, Termination::Reached);
        assert!((sol.y[0] - (-5.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let solver = Dopri5::<f64>::new(1e-11, 1e-13);
        let sol = solver
            .integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [0.0, 1.0], -2.0, &[], |_, _, _| {})
            .unwrap();
        assert!((sol.y[0] - (-2.0f64).sin()).abs() < 1e-9);
        assert!((sol.y[1] - (-2.0f64).cos()).abs() < 1e-9);
    }

    #[test]
    fn event_stops_at_crossing() {
        let solver = Dopri5::<f64>::new(1e-10, 1e-12);
        let ev = |_: f64, y: &[f64; 1]| y[0] - 0.5;
        let sol = solver
            .integrate(|_, _: &[f64; 1]| [1.0], 0.0, [0.0], 10.0, &[&ev], |_, _, _| {})
            .unwrap();
        assert_eq!(sol.termination, Termination::Event(0));
        assert!((sol.t - 0.5).abs() < 1e-9);
    }

    #[test]
    fn observer_sees_monotone_times() {
        let solver = Dopri5::<f64>::default();
        let mut ts = Vec::new();
        solver
            .integrate(|t, _: &[f64; 1]| [t.cos()], 0.0, [0.0], 3.0, &[], |t, _, _| ts.push(t))
            .unwrap();
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(*ts.last().unwrap(), 3.0);
    }

    #[test]
    fn step_budget_is_reported() {
        let solver = Dopri5::<f64>::new(1e-12, 1e-14).with_max_steps(3);
        let sol = solver
            .integrate(|_, y: &[f64; 1]| [y[0]], 0.0, [1.0], 50.0, &[], |_, _, _| {})
            .unwrap();
        assert_eq!(sol.termination, Termination::MaxSteps);
    }
}
