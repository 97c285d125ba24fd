//! Travelling-wave systems, their critical points, phase portrait types and
//! the velocity window in which a saddle-to-saddle connection can exist.
//!
//! With `g(s, c) = f(s, c) - v (s + d1)` and `L(c) = d1 c - d2`:
//!
//! ```text
//! A(s, c) s_xi = g(s, c)
//! kappa c_xi  = h (L(c) - a(c)),   h = 1 / (v d1)  (non-equilibrium adsorption)
//!                                  h = v           (diffusion)
//! ```

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ChordCoefficients, ModelSet};
use crate::numerics::{bisect, golden_section_max, golden_section_min, scan_roots};
use crate::real::Real;
use crate::tol::Tolerances;

/// Which small parameter accompanies capillarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// `kappa = eps_r / eps_c`.
    #[default]
    NonEqAdsorption,
    /// `kappa = eps_d / eps_c`.
    CapillaryDiffusion,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NonEqAdsorption => "noneq",
            Self::CapillaryDiffusion => "diff",
        })
    }
}

const S_SCAN: usize = 2048;
const C_GRID: usize = 513;

#[derive(Debug, Clone, Copy)]
pub struct TravellingWaveSystem<'m, T> {
    pub model: &'m ModelSet<T>,
    pub chord: ChordCoefficients<T>,
    pub v: T,
    pub kappa: T,
    pub kind: SystemKind,
    pub tol: Tolerances,
}

impl<'m, T: Real> TravellingWaveSystem<'m, T> {
    pub fn new(model: &'m ModelSet<T>, v: T, kappa: T, kind: SystemKind) -> Result<Self> {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::Domain(format!("shock speed must be positive, got {v}")));
        }
        if !(kappa > T::zero()) || !kappa.is_finite() {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        let chord = model.chord()?;
        Ok(Self { model, chord, v, kappa, kind, tol: Tolerances::default() })
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_v(mut self, v: T) -> Self {
        self.v = v;
        self
    }

    pub fn with_kappa(mut self, kappa: T) -> Self {
        self.kappa = kappa;
        self
    }

    /// `f(s, c) - v (s + d1)`; its zero set is the black nullcline.
    #[inline]
    pub fn g(&self, s: T, c: T) -> T {
        self.model.flux.f(s, c) - self.v * (s + self.chord.d1)
    }

    /// `h` in `kappa c_xi = h (L - a)`.
    #[inline]
    pub fn h(&self) -> T {
        match self.kind {
            SystemKind::NonEqAdsorption => T::one() / (self.v * self.chord.d1),
            SystemKind::CapillaryDiffusion => self.v,
        }
    }

    /// `L(c) - a(c)`, negative strictly between the red lines.
    #[inline]
    pub fn chord_gap(&self, c: T) -> T {
        self.chord.line(c) - self.model.adsorption.a(c)
    }

    /// `(s_xi, c_xi)`.
    #[inline]
    pub fn rhs(&self, s: T, c: T) -> (T, T) {
        let sx = self.g(s, c) / self.model.capillarity.value(s, c);
        let cx = self.h() * self.chord_gap(c) / self.kappa;
        (sx, cx)
    }

    /// `ds/dc = s_xi / c_xi` along trajectories.
    #[inline]
    pub fn slope(&self, s: T, c: T) -> T {
        let (sx, cx) = self.rhs(s, c);
        sx / cx
    }

    fn line_c(&self, line: Line) -> T {
        match line {
            Line::Minus => self.model.c_minus,
            Line::Plus => self.model.c_plus,
        }
    }

    /// `(s_m, max_s g(s, c))`.
    pub fn g_max(&self, c: T) -> (T, T) {
        const N: usize = 128;
        let n = T::from_usize(N).unwrap();
        let node = |i: usize| T::from_usize(i).unwrap() / n;
        let mut best = 0;
        let mut best_val = self.g(T::zero(), c);
        for i in 1..=N {
            let val = self.g(node(i), c);
            if val > best_val {
                best = i;
                best_val = val;
            }
        }
        let lo = node(best.saturating_sub(1));
        let hi = node((best + 1).min(N));
        golden_section_max(|s| self.g(s, c), lo, hi, T::tol_floor(1e-13))
    }

    /// Critical points on one red line, sorted by saturation.
    pub fn points_on_line(&self, line: Line) -> Result<Vec<CriticalPoint<T>>> {
        let c = self.line_c(line);
        let root_tol = T::tol_floor(self.tol.root);
        let mut roots = scan_roots(|s| self.g(s, c), T::zero(), T::one(), S_SCAN, root_tol);
        if roots.len() > 2 {
            return Err(Error::ModelViolation(format!(
                "{} roots of f - v(s + d1) on c = {c}; at most two are allowed",
                roots.len()
            )));
        }
        let sn = T::lit(self.tol.saddle_node);
        let flux = &self.model.flux;
        let near_double = |s: T| (flux.f_s(s, c) - self.v).abs() < sn;
        let mut merged = None;
        if roots.is_empty() {
            // two close roots, or a double one, are invisible to the sign scan
            let si = inflection_point(self.model, c);
            if flux.f_s(si, c) <= self.v {
                return Ok(Vec::new());
            }
            let sm = bisect(|s| flux.f_s(s, c) - self.v, si, T::one(), root_tol)?;
            let gm = self.g(sm, c);
            let curvature = flux.f_ss(sm, c).abs().max(T::epsilon());
            let allowance = T::lit(0.5) * sn * sn * curvature + T::epsilon() * T::lit(8.0);
            if gm > allowance {
                let step = T::lit(2.0) / T::from_usize(S_SCAN).unwrap();
                let below = |x: T| if self.g(x, c) < T::zero() { x } else { T::zero() };
                let lo = below((sm - step).max(T::zero()));
                let hi = (sm + step).min(T::one());
                let hi = if self.g(hi, c) < T::zero() { hi } else { T::one() };
                roots = vec![
                    bisect(|s| self.g(s, c), lo, sm, root_tol)?,
                    bisect(|s| self.g(s, c), sm, hi, root_tol)?,
                ];
            } else if gm > -allowance {
                merged = Some(sm);
            } else {
                return Ok(Vec::new());
            }
        }
        if roots.len() == 2 && near_double(roots[0]) && near_double(roots[1]) {
            merged = Some((roots[0] + roots[1]) / T::lit(2.0));
        }
        if let Some(s) = merged {
            return Ok(vec![self.classify_point(s, line, PointIndex::Merged)]);
        }
        let index = |i: usize| {
            if roots.len() == 2 && i == 1 {
                PointIndex::Second
            } else if roots.len() == 1 && flux.f_s(roots[0], c) < self.v {
                // single root on the falling branch
                PointIndex::Second
            } else {
                PointIndex::First
            }
        };
        Ok(roots.iter().enumerate().map(|(i, &s)| self.classify_point(s, line, index(i))).collect())
    }

    /// Eigen-data and kind of a critical point at saturation `s` on `line`.
    pub fn critical_point_at(&self, s: T, line: Line, index: PointIndex) -> CriticalPoint<T> {
        self.classify_point(s, line, index)
    }

    fn classify_point(&self, s: T, line: Line, index: PointIndex) -> CriticalPoint<T> {
        let c = self.line_c(line);
        let a_cap = self.model.capillarity.value(s, c);
        let l1 = (self.model.flux.f_s(s, c) - self.v) / a_cap;
        let l2 = self.h() * (self.chord.d1 - self.model.adsorption.da(c)) / self.kappa;
        let fc = self.model.flux.f_c(s, c) / a_cap;
        let e2 = {
            let (x, y) = (fc, l2 - l1);
            let n = (x * x + y * y).sqrt();
            if n > T::zero() {
                [x / n, y / n]
            } else {
                [T::zero(), T::one()]
            }
        };
        let kind = if index == PointIndex::Merged {
            PointKind::SaddleNode
        } else {
            match (l1 > T::zero(), l2 > T::zero()) {
                (true, true) => PointKind::Source,
                (false, false) => PointKind::Sink,
                _ => PointKind::Saddle,
            }
        };
        CriticalPoint {
            s,
            c,
            label: PointLabel { line, index },
            kind,
            eigenvalues: [l1, l2],
            eigenvectors: [[T::one(), T::zero()], e2],
        }
    }

    pub fn critical_points(&self) -> Result<Vec<CriticalPoint<T>>> {
        let mut pts = self.points_on_line(Line::Minus)?;
        pts.extend(self.points_on_line(Line::Plus)?);
        Ok(pts)
    }

    /// `u_2^-`, or the merged point when the minus line carries a saddle-node.
    pub fn u2_minus(&self) -> Result<CriticalPoint<T>> {
        self.points_on_line(Line::Minus)?
            .into_iter()
            .find(|p| matches!(p.label.index, PointIndex::Second | PointIndex::Merged))
            .ok_or_else(|| Error::MissingCriticalPoint(format!("u2_minus at v = {}", self.v)))
    }

    /// `u_1^+`, or the merged point when the plus line carries a saddle-node.
    pub fn u1_plus(&self) -> Result<CriticalPoint<T>> {
        self.points_on_line(Line::Plus)?
            .into_iter()
            .find(|p| matches!(p.label.index, PointIndex::First | PointIndex::Merged))
            .ok_or_else(|| Error::MissingCriticalPoint(format!("u1_plus at v = {}", self.v)))
    }

    pub fn classify_portrait(&self) -> Result<PortraitReport<T>> {
        classify(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Line {
    /// `c = c^-`.
    Minus,
    /// `c = c^+`.
    Plus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointIndex {
    First,
    Second,
    /// `u_1 = u_2`.
    Merged,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointLabel {
    pub line: Line,
    pub index: PointIndex,
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self.index {
            PointIndex::First => "1",
            PointIndex::Second => "2",
            PointIndex::Merged => "12",
        };
        let l = match self.line {
            Line::Minus => "minus",
            Line::Plus => "plus",
        };
        write!(f, "u{i}_{l}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Source,
    Saddle,
    Sink,
    SaddleNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint<T> {
    pub s: T,
    pub c: T,
    pub label: PointLabel,
    pub kind: PointKind,
    /// `[(f_s - v) / A, h (d1 - a') / kappa]`.
    pub eigenvalues: [T; 2],
    /// Unit eigenvectors `(ds, dc)` for the two eigenvalues.
    pub eigenvectors: [[T; 2]; 2],
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PortraitType {
    Type0,
    Type0_I,
    TypeI,
    TypeI_II,
    TypeII,
    TypeII_III,
    TypeIII,
    TypeII_IV,
    TypeIII_IV,
    TypeIV,
}

impl PortraitType {
    /// Interval of main types the portrait sits between, for ordering checks.
    pub fn rank(self) -> (u8, u8) {
        use PortraitType::*;
        match self {
            Type0 => (0, 0),
            Type0_I => (0, 1),
            TypeI => (1, 1),
            TypeI_II => (1, 2),
            TypeII => (2, 2),
            TypeII_III => (2, 3),
            TypeIII => (3, 3),
            TypeII_IV => (2, 4),
            TypeIII_IV => (3, 4),
            TypeIV => (4, 4),
        }
    }

    /// Whether `self -> next` is a legal step of the evolution with growing `v`.
    pub fn may_precede(self, next: PortraitType) -> bool {
        let (a, b) = (self.rank(), next.rank());
        if self == next {
            return true;
        }
        if b.0 < a.0 || b.1 < a.1 {
            return false;
        }
        // Type III may be skipped between II and IV
        b.0 <= a.1 + 1 || (a.1 == 2 && b.0 == 4) || (a == (2, 3) && b.0 == 4)
    }
}

impl fmt::Display for PortraitType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = format!("{self:?}");
        f.write_str(name.trim_start_matches("Type").replace('_', "-").as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortraitReport<T> {
    pub v: T,
    pub points: Vec<CriticalPoint<T>>,
    pub portrait: PortraitType,
    /// Root-free concentration interval `(c1, c2)`.
    pub gap: Option<(T, T)>,
}

fn classify<T: Real>(sys: &TravellingWaveSystem<'_, T>) -> Result<PortraitReport<T>> {
    let minus = sys.points_on_line(Line::Minus)?;
    let plus = sys.points_on_line(Line::Plus)?;
    let mut points = minus.clone();
    points.extend(plus.iter().copied());
    let report = |portrait, gap| Ok(PortraitReport { v: sys.v, points: points.clone(), portrait, gap });
    let d1 = sys.chord.d1;
    let v = sys.v;

    // g(1, c) = 1 - v (1 + d1) does not depend on c
    let top = T::one() - v * (T::one() + d1);
    if top.abs() <= T::lit(sys.tol.portrait_v) {
        return report(PortraitType::Type0_I, None);
    }
    if top > T::zero() {
        return report(PortraitType::Type0, None);
    }
    if minus.is_empty() || plus.is_empty() {
        return report(PortraitType::TypeIV, None);
    }

    let s_of = |pts: &[CriticalPoint<T>], want: PointIndex| {
        pts.iter()
            .find(|p| p.label.index == want || p.label.index == PointIndex::Merged)
            .map(|p| p.s)
    };
    let ps = T::lit(sys.tol.portrait_s);
    let merged_minus = minus.iter().any(|p| p.kind == PointKind::SaddleNode);
    let merged_plus = plus.iter().any(|p| p.kind == PointKind::SaddleNode);
    let s1p = s_of(&plus, PointIndex::First);
    let s2m = s_of(&minus, PointIndex::Second);
    let (Some(s1p), Some(s2m)) = (s1p, s2m) else {
        return Err(Error::UnsupportedPortrait(format!(
            "unexpected critical point layout at v = {v}: {} on c^-, {} on c^+",
            minus.len(),
            plus.len()
        )));
    };
    if merged_minus || merged_plus {
        if merged_minus && merged_plus && (s1p - s2m).abs() <= ps && flux_curves_coincide(sys.model, sys.tol.coincide) {
            return report(PortraitType::TypeII_III, None);
        }
        let t = if s1p <= s2m + ps { PortraitType::TypeII_IV } else { PortraitType::TypeIII_IV };
        return report(t, None);
    }
    if minus.len() != 2 || plus.len() != 2 {
        return Err(Error::UnsupportedPortrait(format!(
            "{} critical points on c^-, {} on c^+ at v = {v}",
            minus.len(),
            plus.len()
        )));
    }

    // root counts across the strip, through the sign of max_s g(s, c)
    let (cp, cm) = (sys.model.c_plus, sys.model.c_minus);
    let nodes: Vec<T> = (0..C_GRID)
        .map(|i| cp + (cm - cp) * T::from_usize(i).unwrap() / T::from_usize(C_GRID - 1).unwrap())
        .collect();
    let peaks: Vec<T> = nodes.iter().map(|&c| sys.g_max(c).1).collect();
    let mut gaps: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < C_GRID {
        if peaks[i] < T::zero() {
            let start = i;
            while i + 1 < C_GRID && peaks[i + 1] < T::zero() {
                i += 1;
            }
            gaps.push((start, i));
        }
        i += 1;
    }
    let ctol = T::tol_floor(sys.tol.root);
    let peak = |c: T| sys.g_max(c).1;
    if gaps.is_empty() {
        // a touching black curve is the I-II boundary
        let lowest = (1..C_GRID - 1)
            .min_by(|&a, &b| peaks[a].partial_cmp(&peaks[b]).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        let lo = nodes[lowest.saturating_sub(1)];
        let hi = nodes[(lowest + 1).min(C_GRID - 1)];
        let (_, m) = golden_section_min(peak, lo, hi, ctol);
        let t = if m < T::zero() {
            // the grid missed a narrow gap
            return report(PortraitType::TypeII, None).map(|mut r: PortraitReport<T>| {
                r.gap = Some(refine_gap(&peak, lo, hi, ctol));
                r
            });
        } else if m <= T::lit(sys.tol.portrait_v) {
            PortraitType::TypeI_II
        } else {
            PortraitType::TypeI
        };
        return report(t, None);
    }
    if gaps.len() > 1 {
        return Err(Error::UnsupportedPortrait(format!(
            "black curves have {} separate gaps at v = {v}",
            gaps.len()
        )));
    }
    let (a, b) = gaps[0];
    if a == 0 || b == C_GRID - 1 {
        return Err(Error::UnsupportedPortrait(format!("root-free band touches a red line at v = {v}")));
    }
    let c1 = bisect(peak, nodes[a - 1], nodes[a], ctol)?;
    let c2 = bisect(peak, nodes[b], nodes[b + 1], ctol)?;
    let t = if (s1p - s2m).abs() <= ps {
        PortraitType::TypeII_III
    } else if s1p < s2m {
        PortraitType::TypeII
    } else {
        PortraitType::TypeIII
    };
    report(t, Some((c1, c2)))
}

fn refine_gap<T: Real, F: Fn(T) -> T>(peak: &F, lo: T, hi: T, tol: T) -> (T, T) {
    let (cm, _) = golden_section_min(peak, lo, hi, tol);
    let c1 = bisect(peak, lo, cm, tol).unwrap_or(cm);
    let c2 = bisect(peak, cm, hi, tol).unwrap_or(cm);
    (c1, c2)
}

/// `sup_s |f(s, c^-) - f(s, c^+)| <= tol`.
pub fn flux_curves_coincide<T: Real>(model: &ModelSet<T>, tol: f64) -> bool {
    let n = 4096;
    (0..=n).all(|i| {
        let s = T::lit(i as f64 / n as f64);
        (model.flux.f(s, model.c_minus) - model.flux.f(s, model.c_plus)).abs() <= T::lit(tol)
    })
}

/// Inflection point of `f(., c)`, the maximiser of `f_s`.
pub fn inflection_point<T: Real>(model: &ModelSet<T>, c: T) -> T {
    let n = 256;
    let node = |i: usize| T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
    let best = (0..=n)
        .max_by(|&a, &b| {
            let fa = model.flux.f_s(node(a), c);
            let fb = model.flux.f_s(node(b), c);
            fa.partial_cmp(&fb).unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let lo = node(best.saturating_sub(1));
    let hi = node((best + 1).min(n));
    golden_section_max(|s| model.flux.f_s(s, c), lo, hi, T::tol_floor(1e-13)).0
}

/// Slope of the tangent from `Q = (-d1, 0)` to `f(., c)` and the tangency
/// saturation, from `f_s (s + d1) - f = 0` on the concave branch.
pub fn tangent_slope_from_q<T: Real>(model: &ModelSet<T>, d1: T, c: T) -> Result<(T, T)> {
    let fl = &model.flux;
    let si = inflection_point(model, c);
    let phi = |s: T| fl.f_s(s, c) * (s + d1) - fl.f(s, c);
    if !(phi(si) > T::zero()) {
        return Err(Error::Geometry(format!("no tangent from Q on the concave branch of f(., {c})")));
    }
    let s = bisect(phi, si, T::one(), T::tol_floor(1e-14))?;
    Ok((fl.f(s, c) / (s + d1), s))
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VmaxKind {
    II_III,
    II_IV,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityWindow<T> {
    pub v_min: T,
    /// Concentration whose tangent from `Q` realises `v_min`.
    pub c_at_v_min: T,
    pub v_max: T,
    pub v_max_kind: VmaxKind,
    pub v_0i: T,
}

impl<T: Real> VelocityWindow<T> {
    pub fn width(&self) -> T {
        self.v_max - self.v_min
    }

    /// `v_min + frac (v_max - v_min)`.
    pub fn at(&self, frac: T) -> T {
        self.v_min + frac * self.width()
    }
}

pub fn velocity_window<T: Real>(model: &ModelSet<T>, tol: &Tolerances) -> Result<VelocityWindow<T>> {
    let d1 = model.chord()?.d1;
    let (cp, cm) = (model.c_plus, model.c_minus);
    let slope = |c: T| tangent_slope_from_q(model, d1, c).map(|r| r.0);

    const N: usize = 128;
    let node = |i: usize| cp + (cm - cp) * T::from_usize(i).unwrap() / T::from_usize(N).unwrap();
    let mut best = (0, T::infinity());
    for i in 0..=N {
        let v = slope(node(i))?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let lo = node(best.0.saturating_sub(1));
    let hi = node((best.0 + 1).min(N));
    let (c_min, v_min) = golden_section_min(|c| slope(c).unwrap_or(T::infinity()), lo, hi, T::tol_floor(1e-12));

    let (v_max, kind) = v_max_geometry(model, d1, tol)?;
    let v_0i = T::one() / (T::one() + d1);
    if !(v_min < v_max) {
        return Err(Error::NoTypeII { v_min: v_min.as_f64(), v_max: v_max.as_f64() });
    }
    Ok(VelocityWindow { v_min, c_at_v_min: c_min, v_max, v_max_kind: kind, v_0i })
}

fn v_max_geometry<T: Real>(model: &ModelSet<T>, d1: T, tol: &Tolerances) -> Result<(T, VmaxKind)> {
    let (cp, cm) = (model.c_plus, model.c_minus);
    let fl = &model.flux;
    let t_minus = tangent_slope_from_q(model, d1, cm)?.0;
    let t_plus = tangent_slope_from_q(model, d1, cp)?.0;
    if flux_curves_coincide(model, tol.coincide) {
        return Ok((t_minus.min(t_plus), VmaxKind::II_III));
    }
    let root_tol = T::tol_floor(tol.root);
    let diff = |s: T| fl.f(s, cm) - fl.f(s, cp);
    let n = 4096;
    let h = T::one() / T::from_usize(n).unwrap();
    // intersections strictly inside (0, 1); the curves always meet at the ends
    let crossings = scan_roots(diff, h, T::one() - h, n - 2, root_tol);
    let best = crossings
        .iter()
        .map(|&s| (fl.f(s, cm) / (s + d1), s))
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    if let Some((v2, s2)) = best {
        let hits = |c: T| scan_roots(|s| fl.f(s, c) - v2 * (s + d1), T::zero(), T::one(), S_SCAN, root_tol);
        let far = T::lit(1e-7);
        let left = hits(cm).into_iter().any(|s| s < s2 - far);
        let right = hits(cp).into_iter().any(|s| s > s2 + far);
        if left && right {
            return Ok((v2, VmaxKind::II_III));
        }
    }
    Ok((t_minus.min(t_plus), VmaxKind::II_IV))
}

/// Black-curve samples `(c, s, branch)` on `n_c` concentrations, branch 1
/// for the smaller root.
pub fn nullcline_rows<T: Real>(sys: &TravellingWaveSystem<'_, T>, n_c: usize) -> Vec<(T, T, u8)> {
    let (cp, cm) = (sys.model.c_plus, sys.model.c_minus);
    let n_c = n_c.max(2);
    let mut rows = Vec::new();
    for i in 0..n_c {
        let c = cp + (cm - cp) * T::from_usize(i).unwrap() / T::from_usize(n_c - 1).unwrap();
        let roots = scan_roots(|s| sys.g(s, c), T::zero(), T::one(), S_SCAN, T::tol_floor(sys.tol.root));
        for (k, s) in roots.into_iter().enumerate() {
            rows.push((c, s, (k + 1) as u8));
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boom() -> ModelSet<f64> {
        ModelSet::boomerang()
    }

    #[test]
    fn rhs_vanishes_on_red_lines() {
        let m = boom();
        let sys = TravellingWaveSystem::new(&m, 0.7, 1.0, SystemKind::NonEqAdsorption).unwrap();
        assert_eq!(sys.rhs(0.3, 1.0).1, 0.0);
        assert_eq!(sys.rhs(0.3, 0.0).1, 0.0);
        let (_, cx) = sys.rhs(0.5, 0.5);
        let expected = (0.25 - 1.0 / 3.0) / (0.7 * 0.5);
        assert!((cx - expected).abs() < 1e-14);
        let diff = sys.with_kappa(2.0);
        let diff = TravellingWaveSystem { kind: SystemKind::CapillaryDiffusion, ..diff };
        assert!((diff.rhs(0.5, 0.5).1 - 0.7 * (0.25 - 1.0 / 3.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn critical_points_below_v0i() {
        let m = boom();
        let sys = TravellingWaveSystem::new(&m, 0.5, 1.0, SystemKind::NonEqAdsorption).unwrap();
        let pts = sys.critical_points().unwrap();
        assert_eq!(pts.len(), 2);
        for p in &pts {
            let (sx, cx) = sys.rhs(p.s, p.c);
            assert!(sx.abs() < 1e-11 && cx == 0.0);
            assert_eq!(p.label.index, PointIndex::First);
        }
        assert_eq!(pts[0].kind, PointKind::Source);
        assert_eq!(pts[1].kind, PointKind::Saddle);
        assert_eq!(sys.classify_portrait().unwrap().portrait, PortraitType::Type0);
    }

    #[test]
    fn four_points_in_the_window() {
        let m = boom();
        let sys = TravellingWaveSystem::new(&m, 0.71, 1.0, SystemKind::NonEqAdsorption).unwrap();
        let pts = sys.critical_points().unwrap();
        assert_eq!(pts.len(), 4);
        let kinds: Vec<PointKind> = pts.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, [PointKind::Source, PointKind::Saddle, PointKind::Saddle, PointKind::Sink]);
        assert_eq!(pts[1].label.to_string(), "u2_minus");
        let rep = sys.classify_portrait().unwrap();
        assert_eq!(rep.portrait, PortraitType::TypeII);
        let (c1, c2) = rep.gap.unwrap();
        assert!(c1 < 0.5 && 0.5 < c2);
        assert!((c1 + c2 - 1.0).abs() < 1e-9, "symmetric gap for a symmetric flux");
    }

    #[test]
    fn type_one_between_v0i_and_vmin() {
        let m = boom();
        let sys = TravellingWaveSystem::new(&m, 0.68, 1.0, SystemKind::NonEqAdsorption).unwrap();
        assert_eq!(sys.classify_portrait().unwrap().portrait, PortraitType::TypeI);
        let at = sys.with_v(2.0 / 3.0);
        assert_eq!(at.classify_portrait().unwrap().portrait, PortraitType::Type0_I);
    }

    #[test]
    fn above_the_window_is_type_four() {
        let m = boom();
        let sys = TravellingWaveSystem::new(&m, 0.73, 1.0, SystemKind::NonEqAdsorption).unwrap();
        assert_eq!(sys.classify_portrait().unwrap().portrait, PortraitType::TypeIV);
    }

    #[test]
    fn tangent_slopes() {
        let m = boom();
        let (v0, s0) = tangent_slope_from_q(&m, 0.5, 0.0).unwrap();
        assert!((v0 - 0.724).abs() < 5e-4 && (s0 - 0.795).abs() < 5e-3, "{v0} {s0}");
        let (vh, sh) = tangent_slope_from_q(&m, 0.5, 0.5).unwrap();
        assert!((vh - 0.699).abs() < 5e-4 && (sh - 0.875).abs() < 5e-3, "{vh} {sh}");
        // the tangent is the maximal chord slope from Q
        let best = (0..=100_000)
            .map(|i| i as f64 / 100_000.0)
            .map(|s| m.flux.f(s, 0.5) / (s + 0.5))
            .fold(0.0, f64::max);
        assert!((best - vh).abs() < 1e-9);
    }

    #[test]
    fn boomerang_window() {
        let m = boom();
        let w = velocity_window(&m, &Tolerances::default()).unwrap();
        assert_eq!(w.v_max_kind, VmaxKind::II_III);
        assert!((w.v_0i - 2.0 / 3.0).abs() < 1e-15);
        assert!((w.c_at_v_min - 0.5).abs() < 1e-5);
        assert!(w.v_0i < w.v_min && w.v_min < w.v_max);
    }

    #[test]
    fn skewed_model_ends_with_a_saddle_node() {
        use crate::models::FluxModel;
        let m = boom().with_flux(FluxModel::corey(2.0, 2.0, vec![1.0, 4.5, -4.0]));
        let tol = Tolerances::default();
        let w = velocity_window(&m, &tol).unwrap();
        assert_eq!(w.v_max_kind, VmaxKind::II_IV);
        let d1 = 0.5;
        assert_eq!(w.v_max, tangent_slope_from_q(&m, d1, 1.0).unwrap().0);
        let sys = TravellingWaveSystem::new(&m, w.v_max, 1.0, SystemKind::NonEqAdsorption).unwrap();
        let rep = sys.classify_portrait().unwrap();
        assert_eq!(rep.portrait, PortraitType::TypeII_IV, "{rep:?}");
        let above = sys.with_v(w.v_max + 1e-4).classify_portrait().unwrap();
        assert_eq!(above.portrait, PortraitType::TypeIV);
    }

    #[test]
    fn portrait_ordering_rules() {
        use PortraitType::*;
        assert!(Type0.may_precede(Type0_I));
        assert!(Type0_I.may_precede(TypeI));
        assert!(TypeII.may_precede(TypeII_IV));
        assert!(TypeII.may_precede(TypeIV));
        assert!(TypeII_III.may_precede(TypeIV));
        assert!(!TypeI.may_precede(TypeIV));
        assert!(!TypeI.may_precede(TypeIII));
        assert!(!TypeII.may_precede(TypeI));
        assert!(!Type0.may_precede(TypeII));
        assert_eq!(TypeII_IV.to_string(), "II-IV");
    }
}
