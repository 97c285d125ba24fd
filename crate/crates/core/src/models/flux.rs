//! Fractional flow functions `f(s, c)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::real::Real;

/// Partial derivative selector for [`FluxModel::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partial {
    F,
    Fs,
    Fc,
    Fss,
}

pub type ScalarFn2<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// Corey-type flux `s^nw / (s^nw + mu(c) (1 - s)^no)` with a polynomial
/// viscosity ratio `mu(c) = sum_k mu[k] c^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoreyFlux<T> {
    pub water_exponent: T,
    pub oil_exponent: T,
    pub viscosity: Vec<T>,
}

impl<T: Real> CoreyFlux<T> {
    fn mu(&self, c: T) -> (T, T) {
        // Horner for the value and the first derivative together
        let mut v = T::zero();
        let mut d = T::zero();
        for &coef in self.viscosity.iter().rev() {
            d = d * c + v;
            v = v * c + coef;
        }
        (v, d)
    }

    fn parts(&self, s: T) -> [T; 6] {
        let n = self.water_exponent;
        let m = self.oil_exponent;
        let one = T::one();
        let r = one - s;
        let p = s.pow_real(n);
        let dp = n * s.pow_real(n - one);
        let ddp = n * (n - one) * s.pow_real(n - T::lit(2.0));
        let q = r.pow_real(m);
        let dq = -m * r.pow_real(m - one);
        let ddq = m * (m - one) * r.pow_real(m - T::lit(2.0));
        [p, dp, ddp, q, dq, ddq]
    }

    fn value(&self, s: T, c: T) -> T {
        let [p, _, _, q, _, _] = self.parts(s);
        let (mu, _) = self.mu(c);
        p / (p + mu * q)
    }

    fn ds(&self, s: T, c: T) -> T {
        let [p, dp, _, q, dq, _] = self.parts(s);
        let (mu, _) = self.mu(c);
        let d = p + mu * q;
        mu * (dp * q - p * dq) / (d * d)
    }

    fn dc(&self, s: T, c: T) -> T {
        let [p, _, _, q, _, _] = self.parts(s);
        let (mu, dmu) = self.mu(c);
        let d = p + mu * q;
        -dmu * p * q / (d * d)
    }

    fn dss(&self, s: T, c: T) -> T {
        let [p, dp, ddp, q, dq, ddq] = self.parts(s);
        let (mu, _) = self.mu(c);
        let d = p + mu * q;
        let dd = dp + mu * dq;
        let num = mu * (dp * q - p * dq);
        let dnum = mu * (ddp * q - p * ddq);
        (dnum * d - T::lit(2.0) * num * dd) / (d * d * d)
    }
}

/// Tabulated flux: monotone cubic (PCHIP) in `s` for every tabulated `c`,
/// blended linearly in `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct TableFlux<T> {
    s_nodes: Vec<T>,
    c_nodes: Vec<T>,
    values: Vec<Vec<T>>,
    slopes: Vec<Vec<T>>,
}

fn pchip_slopes<T: Real>(x: &[T], y: &[T]) -> Vec<T> {
    let n = x.len();
    let h: Vec<T> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<T> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![T::zero(); n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    let two = T::lit(2.0);
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > T::zero() {
            let w1 = two * h[i] + h[i - 1];
            let w2 = h[i] + two * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    let edge = |h0: T, h1: T, m0: T, m1: T| {
        let d = ((two * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if d.signum() != m0.signum() || m0 == T::zero() {
            T::zero()
        } else if m0.signum() != m1.signum() && d.abs() > T::lit(3.0) * m0.abs() {
            T::lit(3.0) * m0
        } else {
            d
        }
    };
    d[0] = edge(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = edge(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn locate<T: Real>(nodes: &[T], x: T) -> usize {
    let n = nodes.len();
    match nodes.iter().position(|&v| v > x) {
        Some(0) => 0,
        Some(i) => (i - 1).min(n - 2),
        None => n - 2,
    }
}

impl<T: Real> TableFlux<T> {
    /// `values[j][i]` is `f(s_nodes[i], c_nodes[j])`.
    pub fn new(s_nodes: Vec<T>, c_nodes: Vec<T>, values: Vec<Vec<T>>) -> Result<Self> {
        let strictly_increasing = |v: &[T]| v.windows(2).all(|w| w[1] > w[0]);
        if s_nodes.len() < 3 || !strictly_increasing(&s_nodes) {
            return Err(Error::Config("table flux needs >= 3 strictly increasing s nodes".into()));
        }
        if s_nodes[0] != T::zero() || *s_nodes.last().unwrap() != T::one() {
            return Err(Error::Config("table flux s nodes must span [0, 1]".into()));
        }
        if c_nodes.is_empty() || !strictly_increasing(&c_nodes) {
            return Err(Error::Config("table flux needs strictly increasing c nodes".into()));
        }
        if c_nodes.len() > 1 && (c_nodes[0] != T::zero() || *c_nodes.last().unwrap() != T::one()) {
            return Err(Error::Config("table flux c nodes must span [0, 1]".into()));
        }
        if values.len() != c_nodes.len() || values.iter().any(|row| row.len() != s_nodes.len()) {
            return Err(Error::Config("table flux values must be |c| rows of |s| entries".into()));
        }
        let slopes = values.iter().map(|row| pchip_slopes(&s_nodes, row)).collect();
        Ok(Self { s_nodes, c_nodes, values, slopes })
    }

    fn row(&self, j: usize, s: T) -> T {
        let i = locate(&self.s_nodes, s);
        let (x0, x1) = (self.s_nodes[i], self.s_nodes[i + 1]);
        let h = x1 - x0;
        let t = (s - x0) / h;
        let (y0, y1) = (self.values[j][i], self.values[j][i + 1]);
        let (d0, d1) = (self.slopes[j][i], self.slopes[j][i + 1]);
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let t2 = t * t;
        let t3 = t2 * t;
        (two * t3 - three * t2 + one) * y0
            + (t3 - two * t2 + t) * h * d0
            + (three * t2 - two * t3) * y1
            + (t3 - t2) * h * d1
    }

    fn value(&self, s: T, c: T) -> T {
        if self.c_nodes.len() == 1 {
            return self.row(0, s);
        }
        let j = locate(&self.c_nodes, c);
        let w = (c - self.c_nodes[j]) / (self.c_nodes[j + 1] - self.c_nodes[j]);
        (T::one() - w) * self.row(j, s) + w * self.row(j + 1, s)
    }
}

/// User-supplied flux; missing partials fall back to finite differences.
#[derive(Clone)]
pub struct CustomFlux<T> {
    pub f: ScalarFn2<T>,
    pub f_s: Option<ScalarFn2<T>>,
    pub f_c: Option<ScalarFn2<T>>,
    pub f_ss: Option<ScalarFn2<T>>,
}

impl<T> fmt::Debug for CustomFlux<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFlux")
            .field("f_s", &self.f_s.is_some())
            .field("f_c", &self.f_c.is_some())
            .field("f_ss", &self.f_ss.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum FluxKind<T> {
    Corey(CoreyFlux<T>),
    Table(TableFlux<T>),
    Custom(CustomFlux<T>),
}

/// Fractional flow function with its partial derivatives.
#[derive(Debug, Clone)]
pub struct FluxModel<T> {
    pub kind: FluxKind<T>,
    /// Finite-difference step for first derivatives.
    pub h_fd: T,
}

/// One-sided second-order stencils within `h` of `[lo, hi]`, central otherwise.
pub(crate) fn fd_first<T: Real, G: Fn(T) -> T>(g: G, x: T, h: T, lo: T, hi: T) -> T {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    if x - h < lo {
        (-three * g(x) + four * g(x + h) - g(x + two * h)) / (two * h)
    } else if x + h > hi {
        (three * g(x) - four * g(x - h) + g(x - two * h)) / (two * h)
    } else {
        (g(x + h) - g(x - h)) / (two * h)
    }
}

pub(crate) fn fd_second<T: Real, G: Fn(T) -> T>(g: G, x: T, h: T, lo: T, hi: T) -> T {
    let two = T::lit(2.0);
    let h2 = h * h;
    if x - h < lo {
        (two * g(x) - T::lit(5.0) * g(x + h) + T::lit(4.0) * g(x + two * h) - g(x + T::lit(3.0) * h)) / h2
    } else if x + h > hi {
        (two * g(x) - T::lit(5.0) * g(x - h) + T::lit(4.0) * g(x - two * h) - g(x - T::lit(3.0) * h)) / h2
    } else {
        (g(x + h) - two * g(x) + g(x - h)) / h2
    }
}

#[inline]
fn unit<T: Real>(x: T) -> T {
    x.max(T::zero()).min(T::one())
}

impl<T: Real> FluxModel<T> {
    pub fn new(kind: FluxKind<T>) -> Self {
        Self { kind, h_fd: T::lit(1e-6) }
    }

    /// `s^2 / (s^2 + mu(c) (1 - s)^2)` with `mu(c) = 1 + amplitude c (1 - c)`.
    pub fn boomerang(amplitude: T) -> Self {
        Self::corey(T::lit(2.0), T::lit(2.0), vec![T::one(), amplitude, -amplitude])
    }

    pub fn corey(water_exponent: T, oil_exponent: T, viscosity: Vec<T>) -> Self {
        Self::new(FluxKind::Corey(CoreyFlux { water_exponent, oil_exponent, viscosity }))
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(T, T) -> T + Send + Sync + 'static,
    {
        Self::new(FluxKind::Custom(CustomFlux { f: Arc::new(f), f_s: None, f_c: None, f_ss: None }))
    }

    pub fn has_analytic_partials(&self) -> bool {
        match &self.kind {
            FluxKind::Corey(_) => true,
            FluxKind::Table(_) => false,
            FluxKind::Custom(cf) => cf.f_s.is_some() && cf.f_c.is_some() && cf.f_ss.is_some(),
        }
    }

    /// Step used for second derivatives by finite differences; a first
    /// derivative step would lose everything to cancellation.
    fn h_second(&self) -> T {
        T::epsilon().powf(T::lit(0.25)).max(self.h_fd)
    }

    /// Flux value; inputs are clamped to the unit square.
    #[inline]
    pub fn f(&self, s: T, c: T) -> T {
        let (s, c) = (unit(s), unit(c));
        match &self.kind {
            FluxKind::Corey(m) => m.value(s, c),
            FluxKind::Table(m) => m.value(s, c),
            FluxKind::Custom(m) => (m.f)(s, c),
        }
    }

    #[inline]
    pub fn f_s(&self, s: T, c: T) -> T {
        let (s, c) = (unit(s), unit(c));
        match &self.kind {
            FluxKind::Corey(m) => m.ds(s, c),
            FluxKind::Custom(CustomFlux { f_s: Some(g), .. }) => g(s, c),
            _ => fd_first(|x| self.f(x, c), s, self.h_fd, T::zero(), T::one()),
        }
    }

    #[inline]
    pub fn f_c(&self, s: T, c: T) -> T {
        let (s, c) = (unit(s), unit(c));
        match &self.kind {
            FluxKind::Corey(m) => m.dc(s, c),
            FluxKind::Custom(CustomFlux { f_c: Some(g), .. }) => g(s, c),
            _ => fd_first(|x| self.f(s, x), c, self.h_fd, T::zero(), T::one()),
        }
    }

    #[inline]
    pub fn f_ss(&self, s: T, c: T) -> T {
        let (s, c) = (unit(s), unit(c));
        match &self.kind {
            FluxKind::Corey(m) => m.dss(s, c),
            FluxKind::Custom(CustomFlux { f_ss: Some(g), .. }) => g(s, c),
            _ => fd_second(|x| self.f(x, c), s, self.h_second(), T::zero(), T::one()),
        }
    }

    /// Checked evaluation of `f` or one of its partials.
    pub fn eval(&self, s: T, c: T, which: Partial) -> Result<T> {
        let inside = |x: T| x >= T::zero() && x <= T::one();
        if !inside(s) || !inside(c) {
            return Err(Error::Domain(format!("(s, c) = ({s}, {c}) outside [0,1]^2")));
        }
        Ok(match which {
            Partial::F => self.f(s, c),
            Partial::Fs => self.f_s(s, c),
            Partial::Fc => self.f_c(s, c),
            Partial::Fss => self.f_ss(s, c),
        })
    }

    /// Finite-difference partials regardless of analytic availability.
    pub fn fd_partial(&self, s: T, c: T, which: Partial) -> T {
        match which {
            Partial::F => self.f(s, c),
            Partial::Fs => fd_first(|x| self.f(x, c), s, self.h_fd, T::zero(), T::one()),
            Partial::Fc => fd_first(|x| self.f(s, x), c, self.h_fd, T::zero(), T::one()),
            Partial::Fss => fd_second(|x| self.f(x, c), s, self.h_second(), T::zero(), T::one()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boomerang_reference_values() {
        let m = FluxModel::<f64>::boomerang(4.0);
        assert!((m.eval(0.5, 0.0, Partial::F).unwrap() - 0.5).abs() < 1e-15);
        assert!((m.eval(0.5, 0.5, Partial::F).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for c in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(m.f(0.0, c), 0.0);
            assert_eq!(m.f(1.0, c), 1.0);
            assert!(m.f_s(0.0, c).abs() < 1e-15);
            assert!(m.f_s(1.0, c).abs() < 1e-15);
        }
    }

    #[test]
    fn boomerang_is_symmetric_in_c() {
        let m = FluxModel::<f64>::boomerang(4.0);
        for s in [0.1, 0.4, 0.77] {
            assert_eq!(m.f(s, 0.0), m.f(s, 1.0));
            assert!((m.f(s, 0.2) - m.f(s, 0.8)).abs() < 1e-15);
            assert!(m.f_c(s, 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_is_a_domain_error() {
        let m = FluxModel::<f64>::boomerang(4.0);
        assert!(matches!(m.eval(1.2, 0.5, Partial::F), Err(Error::Domain(_))));
        assert!(matches!(m.eval(0.5, -0.1, Partial::Fs), Err(Error::Domain(_))));
    }

    #[test]
    fn custom_flux_uses_finite_differences() {
        let m = FluxModel::<f64>::custom(|s, c| s * s * (1.0 + c));
        assert!((m.f_s(0.5, 0.5) - 1.5).abs() < 1e-8);
        assert!((m.f_c(0.5, 0.5) - 0.25).abs() < 1e-8);
        assert!((m.f_ss(0.5, 0.5) - 3.0).abs() < 1e-6);
        // one-sided near the boundary
        assert!((m.f_s(0.0, 0.0)).abs() < 1e-8);
        assert!((m.f_s(1.0, 0.0) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn table_reproduces_nodes_and_is_monotone() {
        let s: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let exact = FluxModel::<f64>::boomerang(4.0);
        let c = vec![0.0, 0.5, 1.0];
        let vals = c.iter().map(|&cc| s.iter().map(|&ss| exact.f(ss, cc)).collect()).collect();
        let t = FluxModel::new(FluxKind::Table(TableFlux::new(s.clone(), c, vals).unwrap()));
        for &ss in &s {
            assert!((t.f(ss, 0.5) - exact.f(ss, 0.5)).abs() < 1e-14);
        }
        let mut prev = -1.0;
        for i in 0..=200 {
            let v = t.f(i as f64 / 200.0, 0.25);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn table_rejects_bad_shapes() {
        assert!(TableFlux::<f64>::new(vec![0.0, 1.0], vec![0.0], vec![vec![0.0, 1.0]]).is_err());
        assert!(TableFlux::<f64>::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.0], vec![vec![0.0, 0.5, 1.0]]).is_err());
    }
}
