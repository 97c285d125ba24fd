//! Fixed-concentration scalar Riemann problems (s-waves).
//!
//! For `s_L > s_R` the fan follows the upper concave envelope of `f(., c)`
//! on `[s_R, s_L]`; for `s_L < s_R` the lower convex envelope on
//! `[s_L, s_R]`. Chords of the envelope are shocks, pieces where it
//! coincides with `f` are rarefactions.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::FluxModel;
use crate::numerics::bisect;
use crate::real::Real;

pub const DEFAULT_ENVELOPE_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// The envelope coincides with `f`.
    Flux,
    Chord,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeSegment<T> {
    pub kind: SegmentKind,
    pub s0: T,
    pub s1: T,
    pub f0: T,
    pub f1: T,
}

impl<T: Real> EnvelopeSegment<T> {
    pub fn chord_slope(&self) -> T {
        (self.f1 - self.f0) / (self.s1 - self.s0)
    }
}

type Fn1<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Concave majorant (or convex minorant) of a function on an interval.
#[derive(Clone)]
pub struct EnvelopeResult<T> {
    pub s_lo: T,
    pub s_hi: T,
    /// `true` for the upper concave envelope.
    pub upper: bool,
    /// Ordered by increasing `s`, covering `[s_lo, s_hi]`.
    pub segments: Vec<EnvelopeSegment<T>>,
    f: Fn1<T>,
    df: Fn1<T>,
}

impl<T: Real> fmt::Debug for EnvelopeResult<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnvelopeResult")
            .field("s_lo", &self.s_lo)
            .field("s_hi", &self.s_hi)
            .field("upper", &self.upper)
            .field("segments", &self.segments)
            .finish()
    }
}

struct Tangency<T> {
    sigma: T,
    tol: T,
}

impl<T: Real> Tangency<T> {
    /// Tangency point of a line through `(p, f(p))` near the grid guess `t`.
    #[allow(clippy::too_many_arguments)]
    fn polish(&self, f: &Fn1<T>, df: &Fn1<T>, p: T, t: T, h: T, lo: T, hi: T) -> T {
        let fp = f(p);
        let phi = |x: T| self.sigma * (df(x) * (x - p) - (f(x) - fp));
        let (lo, hi) = if p < t { (lo.max(p + (t - p) * T::lit(1e-6)), hi) } else { (lo, hi.min(p - (p - t) * T::lit(1e-6))) };
        let mut w = h;
        for _ in 0..6 {
            let a = (t - w).max(lo);
            let b = (t + w).min(hi);
            if a < b && phi(a).signum() != phi(b).signum() {
                if let Ok(x) = bisect(phi, a, b, self.tol) {
                    return x;
                }
            }
            w = w * T::lit(2.0);
        }
        t
    }
}

impl<T: Real> EnvelopeResult<T> {
    /// Envelope of an arbitrary function with derivative `df`.
    pub fn from_fn(f: Fn1<T>, df: Fn1<T>, s_lo: T, s_hi: T, grid_n: usize, upper: bool) -> Result<Self> {
        if !(s_lo < s_hi) {
            return Err(Error::Domain(format!("envelope interval [{s_lo}, {s_hi}] is empty")));
        }
        let n = grid_n.max(2);
        let sigma = if upper { T::one() } else { -T::one() };
        let h = (s_hi - s_lo) / T::from_usize(n).unwrap();
        let xs: Vec<T> = (0..=n)
            .map(|i| if i == n { s_hi } else { s_lo + h * T::from_usize(i).unwrap() })
            .collect();
        let ys: Vec<T> = xs.iter().map(|&x| sigma * f(x)).collect();

        // monotone chain, upper hull of (x, sigma f)
        let mut idx: Vec<usize> = Vec::with_capacity(n + 1);
        for i in 0..=n {
            while idx.len() >= 2 {
                let o = idx[idx.len() - 2];
                let a = idx[idx.len() - 1];
                let cross = (xs[a] - xs[o]) * (ys[i] - ys[o]) - (ys[a] - ys[o]) * (xs[i] - xs[o]);
                if cross >= T::zero() {
                    idx.pop();
                } else {
                    break;
                }
            }
            idx.push(i);
        }

        // (kind, start index, end index) with adjacent flux pieces merged
        let mut raw: Vec<(SegmentKind, usize, usize)> = Vec::new();
        for w in idx.windows(2) {
            let kind = if w[1] == w[0] + 1 { SegmentKind::Flux } else { SegmentKind::Chord };
            match raw.last_mut() {
                Some(last) if kind == SegmentKind::Flux && last.0 == SegmentKind::Flux => last.2 = w[1],
                _ => raw.push((kind, w[0], w[1])),
            }
        }

        let mut bounds: Vec<T> = raw.iter().map(|r| xs[r.1]).collect();
        bounds.push(s_hi);
        let tang = Tangency { sigma, tol: T::tol_floor(1e-13) };
        let is_flux = |k: usize| raw.get(k).map(|r| r.0 == SegmentKind::Flux).unwrap_or(false);
        for _ in 0..60 {
            let mut moved = T::zero();
            for k in 0..raw.len() {
                if raw[k].0 != SegmentKind::Chord {
                    continue;
                }
                // left end touches a flux piece on its left
                if k > 0 && is_flux(k - 1) {
                    let lo = bounds[k - 1];
                    let t = tang.polish(&f, &df, bounds[k + 1], bounds[k], h, lo, bounds[k + 1]);
                    moved = moved.max((t - bounds[k]).abs());
                    bounds[k] = t;
                }
                if is_flux(k + 1) {
                    let hi = bounds[k + 2];
                    let t = tang.polish(&f, &df, bounds[k], bounds[k + 1], h, bounds[k], hi);
                    moved = moved.max((t - bounds[k + 1]).abs());
                    bounds[k + 1] = t;
                }
            }
            if moved <= T::epsilon() * T::lit(4.0) {
                break;
            }
        }

        let segments = raw
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let (s0, s1) = (bounds[k], bounds[k + 1].max(bounds[k]));
                EnvelopeSegment { kind: r.0, s0, s1, f0: f(s0), f1: f(s1) }
            })
            .collect();
        Ok(Self { s_lo, s_hi, upper, segments, f, df })
    }

    fn segment_at(&self, s: T) -> &EnvelopeSegment<T> {
        self.segments
            .iter()
            .find(|g| s <= g.s1)
            .unwrap_or_else(|| self.segments.last().expect("envelope has segments"))
    }

    /// Envelope value; `f` itself on coincidence pieces.
    pub fn value(&self, s: T) -> T {
        let g = self.segment_at(s);
        match g.kind {
            SegmentKind::Flux => (self.f)(s),
            SegmentKind::Chord => g.f0 + g.chord_slope() * (s - g.s0),
        }
    }

    /// Envelope slope `g(s)`.
    pub fn slope(&self, s: T) -> T {
        let g = self.segment_at(s);
        match g.kind {
            SegmentKind::Flux => (self.df)(s),
            SegmentKind::Chord => g.chord_slope(),
        }
    }

    pub fn breakpoints(&self) -> Vec<T> {
        let mut b: Vec<T> = self.segments.iter().map(|g| g.s0).collect();
        b.push(self.s_hi);
        b
    }

    pub fn chords(&self) -> impl Iterator<Item = &EnvelopeSegment<T>> {
        self.segments.iter().filter(|g| g.kind == SegmentKind::Chord)
    }

    /// Envelope of this envelope, for idempotence checks.
    pub fn re_envelope(&self, grid_n: usize) -> Result<Self> {
        let a = Arc::new(self.clone());
        let b = a.clone();
        Self::from_fn(
            Arc::new(move |s| a.value(s)),
            Arc::new(move |s| b.slope(s)),
            self.s_lo,
            self.s_hi,
            grid_n,
            self.upper,
        )
    }
}

fn flux_closures<T: Real>(flux: &FluxModel<T>, c: T) -> (Fn1<T>, Fn1<T>) {
    let a = flux.clone();
    let b = flux.clone();
    (Arc::new(move |s| a.f(s, c)), Arc::new(move |s| b.f_s(s, c)))
}

/// Smallest concave majorant of `f(., c)` on `[s_lo, s_hi]`.
pub fn upper_concave_envelope<T: Real>(flux: &FluxModel<T>, c: T, s_lo: T, s_hi: T, grid_n: usize) -> Result<EnvelopeResult<T>> {
    let (f, df) = flux_closures(flux, c);
    EnvelopeResult::from_fn(f, df, s_lo, s_hi, grid_n, true)
}

/// Largest convex minorant of `f(., c)` on `[s_lo, s_hi]`.
pub fn lower_convex_envelope<T: Real>(flux: &FluxModel<T>, c: T, s_lo: T, s_hi: T, grid_n: usize) -> Result<EnvelopeResult<T>> {
    let (f, df) = flux_closures(flux, c);
    EnvelopeResult::from_fn(f, df, s_lo, s_hi, grid_n, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FanElement<T> {
    /// States run from `s_start` (left) to `s_end` (right).
    Rarefaction { s_start: T, s_end: T, speed_start: T, speed_end: T },
    Shock { s_left: T, s_right: T, speed: T },
}

impl<T: Real> FanElement<T> {
    pub fn speeds(&self) -> (T, T) {
        match *self {
            Self::Rarefaction { speed_start, speed_end, .. } => (speed_start, speed_end),
            Self::Shock { speed, .. } => (speed, speed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    Initial,
    Final,
}

/// Self-similar solution of the scalar problem at fixed `c`.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarFan<T> {
    pub c: T,
    pub s_left: T,
    pub s_right: T,
    pub elements: Vec<FanElement<T>>,
    /// `None` for the empty fan.
    pub v_initial: Option<T>,
    pub v_final: Option<T>,
    #[serde(skip)]
    flux: FluxModel<T>,
}

impl<T: Real> ScalarFan<T> {
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn edge_speed(&self, side: Edge) -> Result<T> {
        match side {
            Edge::Initial => self.v_initial,
            Edge::Final => self.v_final,
        }
        .ok_or(Error::EmptyFan)
    }

    /// Saturation at `xi = x / t`.
    pub fn sample(&self, xi: T) -> T {
        let mut current = self.s_left;
        for el in &self.elements {
            match *el {
                FanElement::Rarefaction { s_start, s_end, speed_start, speed_end } => {
                    if xi < speed_start {
                        return current;
                    }
                    if xi <= speed_end {
                        let c = self.c;
                        let g = |s: T| self.flux.f_s(s, c) - xi;
                        let (a, b) = if s_start < s_end { (s_start, s_end) } else { (s_end, s_start) };
                        return bisect(g, a, b, T::tol_floor(1e-14)).unwrap_or(if xi - speed_start < speed_end - xi {
                            s_start
                        } else {
                            s_end
                        });
                    }
                    current = s_end;
                }
                FanElement::Shock { s_left, s_right, speed } => {
                    if xi < speed {
                        return s_left;
                    }
                    current = s_right;
                }
            }
        }
        current
    }

    /// `n` uniformly spaced `(xi, s)` rows on `[xi_lo, xi_hi]`.
    pub fn sample_rows(&self, xi_lo: T, xi_hi: T, n: usize) -> Vec<(T, T)> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let xi = xi_lo + (xi_hi - xi_lo) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap();
                (xi, self.sample(xi))
            })
            .collect()
    }
}

pub fn solve_scalar_riemann<T: Real>(flux: &FluxModel<T>, c: T, s_left: T, s_right: T) -> Result<ScalarFan<T>> {
    solve_scalar_riemann_with(flux, c, s_left, s_right, DEFAULT_ENVELOPE_GRID)
}

pub fn solve_scalar_riemann_with<T: Real>(
    flux: &FluxModel<T>,
    c: T,
    s_left: T,
    s_right: T,
    grid_n: usize,
) -> Result<ScalarFan<T>> {
    let unit = |x: T| x >= T::zero() && x <= T::one();
    if !unit(s_left) || !unit(s_right) || !unit(c) {
        return Err(Error::Domain(format!("scalar data (sL, sR, c) = ({s_left}, {s_right}, {c}) outside [0,1]")));
    }
    let mut fan = ScalarFan {
        c,
        s_left,
        s_right,
        elements: Vec::new(),
        v_initial: None,
        v_final: None,
        flux: flux.clone(),
    };
    if s_left == s_right {
        return Ok(fan);
    }
    let decreasing = s_left > s_right;
    let env = if decreasing {
        upper_concave_envelope(flux, c, s_right, s_left, grid_n)?
    } else {
        lower_convex_envelope(flux, c, s_left, s_right, grid_n)?
    };
    let mut ordered: Vec<EnvelopeSegment<T>> = env.segments.clone();
    if decreasing {
        ordered.reverse();
    }
    for g in ordered {
        if g.s1 <= g.s0 {
            continue;
        }
        let (from, to) = if decreasing { (g.s1, g.s0) } else { (g.s0, g.s1) };
        fan.elements.push(match g.kind {
            SegmentKind::Flux => FanElement::Rarefaction {
                s_start: from,
                s_end: to,
                speed_start: flux.f_s(from, c),
                speed_end: flux.f_s(to, c),
            },
            SegmentKind::Chord => FanElement::Shock { s_left: from, s_right: to, speed: g.chord_slope() },
        });
    }
    fan.v_initial = fan.elements.first().map(|e| e.speeds().0);
    fan.v_final = fan.elements.last().map(|e| e.speeds().1);
    Ok(fan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boom() -> FluxModel<f64> {
        FluxModel::boomerang(4.0)
    }

    /// Welge point of `s^2 / (s^2 + (1-s)^2)` from the tangency equation.
    fn welge_mu1() -> f64 {
        let m = boom();
        bisect(|s| m.f_s(s, 0.0) * s - m.f(s, 0.0), 0.6, 0.99, 1e-15).unwrap()
    }

    #[test]
    fn concave_piece_is_its_own_envelope() {
        let env = upper_concave_envelope(&boom(), 0.0, 0.8, 1.0, 512).unwrap();
        assert_eq!(env.segments.len(), 1);
        assert_eq!(env.segments[0].kind, SegmentKind::Flux);
    }

    #[test]
    fn convex_piece_gives_one_secant() {
        let env = upper_concave_envelope(&boom(), 0.0, 0.0, 0.2, 512).unwrap();
        assert_eq!(env.segments.len(), 1);
        assert_eq!(env.segments[0].kind, SegmentKind::Chord);
        assert_eq!((env.segments[0].s0, env.segments[0].s1), (0.0, 0.2));
    }

    #[test]
    fn full_interval_has_welge_tangency() {
        let env = upper_concave_envelope(&boom(), 0.0, 0.0, 1.0, DEFAULT_ENVELOPE_GRID).unwrap();
        assert_eq!(env.segments.len(), 2);
        let star = env.segments[0].s1;
        assert!((star - welge_mu1()).abs() < 1e-10, "{star}");
        // dense hull cross-check
        let dense = upper_concave_envelope(&boom(), 0.0, 0.0, 1.0, 10_000).unwrap();
        assert!((dense.segments[0].s1 - star).abs() < 1e-10);
    }

    #[test]
    fn riemann_fans_around_the_welge_point() {
        let m = boom();
        let star = welge_mu1();
        let raref = solve_scalar_riemann(&m, 0.0, 1.0, star).unwrap();
        assert_eq!(raref.elements.len(), 1);
        assert!(matches!(raref.elements[0], FanElement::Rarefaction { .. }));
        assert!(raref.edge_speed(Edge::Initial).unwrap().abs() < 1e-12);
        assert!((raref.edge_speed(Edge::Final).unwrap() - m.f_s(star, 0.0)).abs() < 1e-12);

        let shock = solve_scalar_riemann(&m, 0.0, star, 0.0).unwrap();
        assert_eq!(shock.elements.len(), 1);
        let sigma = m.f(star, 0.0) / star;
        assert!((shock.edge_speed(Edge::Initial).unwrap() - sigma).abs() < 1e-12);
        assert!((shock.edge_speed(Edge::Final).unwrap() - sigma).abs() < 1e-12);

        let full = solve_scalar_riemann(&m, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(full.elements.len(), 2);
        let fin = full.edge_speed(Edge::Final).unwrap();
        assert!((fin - m.f_s(star, 0.0)).abs() < 1e-8);
        assert!((fin - sigma).abs() < 1e-8);
    }

    #[test]
    fn sampling_walks_through_the_fan() {
        let m = boom();
        let fan = solve_scalar_riemann(&m, 0.0, 1.0, 0.0).unwrap();
        let sigma = fan.v_final.unwrap();
        assert_eq!(fan.sample(-1.0), 1.0);
        assert_eq!(fan.sample(sigma + 1e-9), 0.0);
        let mid = fan.sample(0.5 * sigma);
        assert!((m.f_s(mid, 0.0) - 0.5 * sigma).abs() < 1e-10);
        let rows = fan.sample_rows(0.0, 3.0, 301);
        for w in rows.windows(2) {
            assert!(w[1].1 <= w[0].1);
        }
    }

    #[test]
    fn increasing_data_use_the_convex_minorant() {
        let m = boom();
        let fan = solve_scalar_riemann(&m, 0.3, 0.0, 1.0).unwrap();
        let (mut last, _) = fan.elements[0].speeds();
        for e in &fan.elements {
            let (a, b) = e.speeds();
            assert!(a >= last - 1e-12 && b >= a - 1e-12);
            last = b;
        }
    }

    #[test]
    fn empty_fan_has_no_edges() {
        let fan = solve_scalar_riemann(&boom(), 0.5, 0.4, 0.4).unwrap();
        assert!(fan.is_empty());
        assert_eq!(fan.edge_speed(Edge::Initial), Err(Error::EmptyFan));
    }

    #[test]
    fn envelope_is_idempotent() {
        let env = upper_concave_envelope(&boom(), 0.4, 0.05, 0.97, 2048).unwrap();
        let again = env.re_envelope(2048).unwrap();
        for i in 0..=1000 {
            let s = 0.05 + 0.92 * i as f64 / 1000.0;
            assert!((env.value(s) - again.value(s)).abs() < 1e-12);
        }
    }
}
