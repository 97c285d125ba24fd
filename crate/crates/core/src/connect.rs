//! Saddle-to-saddle connections `u_2^- -> u_1^+` and the `v`-`kappa` curve.
//!
//! Both invariant manifolds are followed as graphs `s(c)`: the unstable one
//! of `u_2^-` down from `c^-`, the stable one of `u_1^+` up from `c^+`. Their
//! signed distance at an interior `c0` is monotone in `kappa` and in `v`,
//! so every solve is a bisection.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSet;
use crate::numerics::{Dopri5, Termination};
use crate::real::Real;
use crate::tol::Tolerances;
use crate::twave::{velocity_window, CriticalPoint, PointKind, SystemKind, TravellingWaveSystem, VelocityWindow, VmaxKind};

const KAPPA_LO: f64 = 1e-12;
const KAPPA_HI: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Leaves the saddle as `xi` grows; `c` decreases.
    UnstableForward,
    /// Reaches the saddle as `xi` grows; followed backwards, `c` increases.
    StableBackward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ManifoldEnd {
    ReachedTarget,
    HitS0,
    HitS1,
    MaxSteps,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifoldTrajectory<T> {
    pub origin: CriticalPoint<T>,
    pub direction: Direction,
    /// `(c, s)` from the launch point on, monotone in `c`.
    pub samples: Vec<(T, T)>,
    /// `ds/dc` at each sample.
    pub slopes: Vec<T>,
    pub termination: ManifoldEnd,
}

impl<T: Real> ManifoldTrajectory<T> {
    pub fn end(&self) -> (T, T) {
        *self.samples.last().expect("trajectory has samples")
    }
}

/// Follows the manifold of `saddle` that enters the strip between the red
/// lines until `c = c_target`, or until it leaves `0 <= s <= 1`.
///
/// Inside the boundary layer next to the saddle's red line the flow is
/// integrated in `xi`, where `c_xi` vanishes; beyond it `c` is the
/// independent variable. Targets inside the far layer are clamped to its edge.
pub fn launch_manifold<T: Real>(
    sys: &TravellingWaveSystem<'_, T>,
    saddle: &CriticalPoint<T>,
    direction: Direction,
    c_target: T,
) -> Result<ManifoldTrajectory<T>> {
    launch_with_offset(sys, saddle, direction, c_target, T::offset_floor(sys.tol.launch_offset))
}

fn launch_with_offset<T: Real>(
    sys: &TravellingWaveSystem<'_, T>,
    saddle: &CriticalPoint<T>,
    direction: Direction,
    c_target: T,
    delta: T,
) -> Result<ManifoldTrajectory<T>> {
    let tol = &sys.tol;
    let (cp, cm) = (sys.model.c_plus, sys.model.c_minus);
    // the layer must contain the launch offset
    let layer_rel = T::lit(tol.boundary_layer).max(T::offset_floor(tol.launch_offset) * T::lit(10.0));
    let layer = layer_rel * (cm - cp);
    let c_target = c_target.max(cp + layer).min(cm - layer);
    let inward = match direction {
        Direction::UnstableForward => -T::one(),
        Direction::StableBackward => T::one(),
    };
    let e = saddle.eigenvectors[1];
    if e[1].abs() < T::lit(1e-12) {
        return Err(Error::ManifoldLaunch(format!(
            "eigenvector at {} is tangent to the red line",
            saddle.label
        )));
    }
    let k = inward * e[1].signum() * delta;
    let mut s = saddle.s + k * e[0];
    let mut c = saddle.c + k * e[1];
    let mut samples = vec![(c, s)];
    let mut slopes = vec![sys.slope(s, c)];
    let solver = Dopri5::new(T::tol_floor(tol.ode_rtol), T::tol_floor(tol.ode_atol)).with_max_steps(tol.max_steps);

    let edge = saddle.c + inward * layer;
    if (c - saddle.c).abs() < layer {
        let lambda = saddle.eigenvalues[1].abs().max(T::min_positive_value());
        let span = T::lit(200.0) / lambda;
        let t_end = match direction {
            Direction::UnstableForward => span,
            Direction::StableBackward => -span,
        };
        let hit0 = |_: T, y: &[T; 2]| y[0];
        let hit1 = |_: T, y: &[T; 2]| T::one() - y[0];
        let out = |_: T, y: &[T; 2]| y[1] - edge;
        let sol = solver.integrate(
            |_, y: &[T; 2]| {
                let (a, b) = sys.rhs(y[0], y[1]);
                [a, b]
            },
            T::zero(),
            [s, c],
            t_end,
            &[&hit0, &hit1, &out],
            |_, y, dy| {
                if dy[1] != T::zero() {
                    samples.push((y[1], y[0]));
                    slopes.push(dy[0] / dy[1]);
                }
            },
        )?;
        let end = match sol.termination {
            Termination::Event(0) => Some(ManifoldEnd::HitS0),
            Termination::Event(1) => Some(ManifoldEnd::HitS1),
            Termination::Event(_) => None,
            Termination::MaxSteps => Some(ManifoldEnd::MaxSteps),
            Termination::Reached => {
                return Err(Error::ManifoldLaunch(format!(
                    "trajectory from {} did not leave the boundary layer",
                    saddle.label
                )))
            }
        };
        if let Some(termination) = end {
            return Ok(ManifoldTrajectory { origin: *saddle, direction, samples, slopes, termination });
        }
        s = sol.y[0];
        c = sol.y[1];
    }

    let hit0 = |_: T, y: &[T; 1]| y[0];
    let hit1 = |_: T, y: &[T; 1]| T::one() - y[0];
    let mut first = true;
    let sol = solver.integrate(
        |c, y: &[T; 1]| [sys.slope(y[0], c)],
        c,
        [s],
        c_target,
        &[&hit0, &hit1],
        |c, y, dy| {
            if first {
                first = false;
                return;
            }
            samples.push((c, y[0]));
            slopes.push(dy[0]);
        },
    )?;
    let termination = match sol.termination {
        Termination::Reached => ManifoldEnd::ReachedTarget,
        Termination::Event(0) => ManifoldEnd::HitS0,
        Termination::Event(_) => ManifoldEnd::HitS1,
        Termination::MaxSteps => ManifoldEnd::MaxSteps,
    };
    Ok(ManifoldTrajectory { origin: *saddle, direction, samples, slopes, termination })
}

/// `u_2^-` and `u_1^+` at one velocity; eigen-data are refreshed per kappa.
#[derive(Debug, Clone, Copy)]
struct Saddles<T> {
    minus: CriticalPoint<T>,
    plus: CriticalPoint<T>,
}

impl<T: Real> Saddles<T> {
    fn find(sys: &TravellingWaveSystem<'_, T>) -> Result<Self> {
        let minus = sys.u2_minus()?;
        let plus = sys.u1_plus()?;
        for p in [&minus, &plus] {
            if p.kind == PointKind::SaddleNode {
                return Err(Error::ManifoldLaunch(format!(
                    "{} is a saddle-node at v = {}; the velocity is on the window edge",
                    p.label, sys.v
                )));
            }
        }
        Ok(Self { minus, plus })
    }

    fn at(&self, sys: &TravellingWaveSystem<'_, T>) -> Self {
        let refresh = |p: &CriticalPoint<T>| sys.critical_point_at(p.s, p.label.line, p.label.index);
        Self { minus: refresh(&self.minus), plus: refresh(&self.plus) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConnectionResult<T> {
    pub v: T,
    pub kappa: T,
    pub kind: SystemKind,
    /// `s_2^-(v)`.
    pub s_minus: T,
    /// `s_1^+(v)`.
    pub s_plus: T,
    pub c0: T,
    pub mismatch: T,
    /// Endpoint change at `c0` when the launch offset is halved.
    pub launch_check: T,
    /// Set when the connection sits at `v_max` of a II-IV window.
    pub at_window_boundary: bool,
    pub minus_branch: ManifoldTrajectory<T>,
    pub plus_branch: ManifoldTrajectory<T>,
}

impl<T: Real> ConnectionResult<T> {
    /// Merged `(c, s)` samples, increasing in `c`, with both saddles as ends.
    pub fn samples(&self) -> Vec<(T, T)> {
        self.samples_with_slopes().into_iter().map(|(c, s, _)| (c, s)).collect()
    }

    /// `(c, s, ds/dc)` along the connection; the ends carry eigenvector slopes.
    pub fn samples_with_slopes(&self) -> Vec<(T, T, T)> {
        let eig_slope = |p: &CriticalPoint<T>| p.eigenvectors[1][0] / p.eigenvectors[1][1];
        let p = &self.plus_branch;
        let m = &self.minus_branch;
        let mut out = vec![(p.origin.c, p.origin.s, eig_slope(&p.origin))];
        out.extend(p.samples.iter().zip(&p.slopes).map(|(&(c, s), &d)| (c, s, d)));
        let mut upper: Vec<(T, T, T)> = m.samples.iter().zip(&m.slopes).map(|(&(c, s), &d)| (c, s, d)).collect();
        upper.reverse();
        out.extend(upper);
        out.push((m.origin.c, m.origin.s, eig_slope(&m.origin)));
        // the branches meet at c0 and event points may repeat; keep one
        // sample per c, averaging the two sides of the junction
        let mut merged: Vec<(T, T, T)> = Vec::with_capacity(out.len());
        for q in out {
            match merged.last_mut() {
                Some(last) if q.0 <= last.0 => {
                    let half = T::lit(0.5);
                    *last = (last.0, (last.1 + q.1) * half, (last.2 + q.2) * half);
                }
                _ => merged.push(q),
            }
        }
        merged
    }

    /// Rankine-Hugoniot residuals of the shock `(s^-, c^-) -> (s^+, c^+)`.
    pub fn rh_residuals(&self, model: &ModelSet<T>) -> (T, T) {
        rh_residuals(model, self.v, (self.s_minus, model.c_minus), (self.s_plus, model.c_plus))
    }
}

/// `v [s] - [f]` and `v [c s + a] - [c f]` across a jump.
pub fn rh_residuals<T: Real>(model: &ModelSet<T>, v: T, minus: (T, T), plus: (T, T)) -> (T, T) {
    let (sm, cm) = minus;
    let (sp, cp) = plus;
    let fm = model.flux.f(sm, cm);
    let fp = model.flux.f(sp, cp);
    let am = model.adsorption.a(cm);
    let ap = model.adsorption.a(cp);
    let r1 = v * (sm - sp) - (fm - fp);
    let r2 = v * ((cm * sm + am) - (cp * sp + ap)) - (cm * fm - cp * fp);
    (r1, r2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    UniformV,
    LogKappa,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSample<T> {
    pub v: T,
    pub kappa: T,
    pub s_minus: T,
    pub s_plus: T,
    /// Larger of the two Rankine-Hugoniot residuals.
    pub rh_residual: T,
    /// `(s^- - s^+) - kappa * integral` along the connection.
    pub integral_residual: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct VKappaCurve<T> {
    /// Sorted by increasing `v`.
    pub samples: Vec<SweepSample<T>>,
    /// `lim kappa(v)` at `v_max`; zero for a II-III window.
    pub kappa_crit: T,
    pub window: VelocityWindow<T>,
}

/// Shooting solver for one model and one regularisation.
#[derive(Debug, Clone)]
pub struct ConnectionSolver<'m, T> {
    pub model: &'m ModelSet<T>,
    pub kind: SystemKind,
    pub tol: Tolerances,
    /// Matching concentration; the midpoint when `None`.
    pub c0: Option<T>,
    window: Option<VelocityWindow<T>>,
}

impl<'m, T: Real> ConnectionSolver<'m, T> {
    pub fn new(model: &'m ModelSet<T>, kind: SystemKind) -> Self {
        Self { model, kind, tol: Tolerances::default(), c0: None, window: None }
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self.window = None;
        self
    }

    pub fn with_c0(mut self, c0: T) -> Self {
        self.c0 = Some(c0);
        self
    }

    /// Velocity window, computed once.
    pub fn window(&mut self) -> Result<VelocityWindow<T>> {
        if let Some(w) = self.window {
            return Ok(w);
        }
        let w = velocity_window(self.model, &self.tol)?;
        self.window = Some(w);
        Ok(w)
    }

    fn c0(&self) -> T {
        self.c0.unwrap_or((self.model.c_minus + self.model.c_plus) / T::lit(2.0))
    }

    fn system(&self, v: T, kappa: T) -> Result<TravellingWaveSystem<'m, T>> {
        Ok(TravellingWaveSystem::new(self.model, v, kappa, self.kind)?.with_tolerances(self.tol))
    }

    fn branches(&self, sys: &TravellingWaveSystem<'_, T>, sd: &Saddles<T>, delta: T) -> Result<(ManifoldTrajectory<T>, ManifoldTrajectory<T>)> {
        let sd = sd.at(sys);
        let c0 = self.c0();
        let minus = launch_with_offset(sys, &sd.minus, Direction::UnstableForward, c0, delta)?;
        let plus = launch_with_offset(sys, &sd.plus, Direction::StableBackward, c0, delta)?;
        Ok((minus, plus))
    }

    fn mismatch_with(&self, v: T, kappa: T, sd: &Saddles<T>) -> Result<T> {
        let sys = self.system(v, kappa)?;
        let sd = sd.at(&sys);
        let c0 = self.c0();
        let delta = T::offset_floor(self.tol.launch_offset);
        let minus = launch_with_offset(&sys, &sd.minus, Direction::UnstableForward, c0, delta)?;
        match minus.termination {
            ManifoldEnd::HitS0 => return Ok(-T::one()),
            ManifoldEnd::HitS1 => return Ok(T::one()),
            ManifoldEnd::MaxSteps => return Err(Error::Integration(format!("step budget exhausted at v = {v}, kappa = {kappa}"))),
            ManifoldEnd::ReachedTarget => {}
        }
        let plus = launch_with_offset(&sys, &sd.plus, Direction::StableBackward, c0, delta)?;
        match plus.termination {
            ManifoldEnd::HitS0 => Ok(T::one()),
            ManifoldEnd::HitS1 => Ok(-T::one()),
            ManifoldEnd::MaxSteps => Err(Error::Integration(format!("step budget exhausted at v = {v}, kappa = {kappa}"))),
            ManifoldEnd::ReachedTarget => Ok(minus.end().1 - plus.end().1),
        }
    }

    /// `s_from_minus(c0) - s_into_plus(c0)`, saturated at `+-1` when a
    /// manifold leaves `0 <= s <= 1` first.
    pub fn mismatch(&self, v: T, kappa: T) -> Result<T> {
        let sys = self.system(v, kappa)?;
        let sd = Saddles::find(&sys)?;
        self.mismatch_with(v, kappa, &sd)
    }

    /// The unique `kappa(v)` joining `u_2^-(v)` to `u_1^+(v)`.
    pub fn find_kappa_for_v(&self, v: T) -> Result<ConnectionResult<T>> {
        let sys = self.system(v, T::one())?;
        let sd = Saddles::find(&sys)?;
        let m = |k: T| self.mismatch_with(v, k, &sd);
        let four = T::lit(4.0);
        let (lo_bound, hi_bound) = (T::lit(KAPPA_LO), T::lit(KAPPA_HI));
        let not_found = || Error::ConnectionNotFound { v: v.as_f64(), lo: KAPPA_LO, hi: KAPPA_HI };

        // mismatch is positive for small kappa, negative for large
        let mut k = T::one();
        let m1 = m(k)?;
        let (mut lo, mut hi);
        if m1 == T::zero() {
            return self.connection_at(v, k, &sd, false);
        } else if m1 > T::zero() {
            lo = k;
            loop {
                k = k * four;
                if k > hi_bound {
                    return Err(not_found());
                }
                let mk = m(k)?;
                if mk <= T::zero() {
                    hi = k;
                    break;
                }
                lo = k;
            }
        } else {
            hi = k;
            loop {
                k = k / four;
                if k < lo_bound {
                    return Err(not_found());
                }
                if m(k)? > T::zero() {
                    lo = k;
                    break;
                }
                hi = k;
            }
        }
        let rel = T::tol_floor(self.tol.kappa_rel);
        for _ in 0..200 {
            if hi / lo - T::one() <= rel {
                break;
            }
            let mid = (lo * hi).sqrt();
            if mid <= lo || mid >= hi {
                break;
            }
            if m(mid)? > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.connection_at(v, (lo * hi).sqrt(), &sd, false)
    }

    fn connection_at(&self, v: T, kappa: T, sd: &Saddles<T>, at_window_boundary: bool) -> Result<ConnectionResult<T>> {
        let sys = self.system(v, kappa)?;
        let delta = T::offset_floor(self.tol.launch_offset);
        let (minus, plus) = self.branches(&sys, sd, delta)?;
        let (half_m, half_p) = self.branches(&sys, sd, delta / T::lit(2.0))?;
        let launch_check = (minus.end().1 - half_m.end().1).abs().max((plus.end().1 - half_p.end().1).abs());
        let mismatch = minus.end().1 - plus.end().1;
        Ok(ConnectionResult {
            v,
            kappa,
            kind: self.kind,
            s_minus: sd.minus.s,
            s_plus: sd.plus.s,
            c0: self.c0(),
            mismatch,
            launch_check,
            at_window_boundary,
            minus_branch: minus,
            plus_branch: plus,
        })
    }

    /// `lim kappa(v)` as `v -> v_max` for a II-IV window, by Richardson
    /// extrapolation under a `sqrt(v_max - v)` error law. Zero for II-III.
    pub fn kappa_crit(&mut self) -> Result<T> {
        let w = self.window()?;
        if w.v_max_kind == VmaxKind::II_III {
            return Ok(T::zero());
        }
        let h0 = T::lit(1e-4) * w.width();
        let four = T::lit(4.0);
        let k = |h: T| self.find_kappa_for_v(w.v_max - h).map(|r| r.kappa);
        let (k0, k1, k2) = (k(h0)?, k(h0 / four)?, k(h0 / (four * four))?);
        // each level of halving sqrt(h) removes one error term
        let two = T::lit(2.0);
        let r0 = two * k1 - k0;
        let r1 = two * k2 - k1;
        let crit = (four * r1 - r0) / T::lit(3.0);
        Ok(crit.max(T::zero()))
    }

    /// The admissible speed `v(kappa)`.
    pub fn find_v_for_kappa(&mut self, kappa: T) -> Result<ConnectionResult<T>> {
        if !(kappa > T::zero()) || !kappa.is_finite() {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        let w = self.window()?;
        let width = w.width();
        if w.v_max_kind == VmaxKind::II_IV {
            let crit = self.kappa_crit()?;
            if kappa <= crit {
                return self.boundary_connection(&w, kappa);
            }
        }
        // closer to v_max the two points on a line are a numerical saddle-node
        let edge = T::lit(1e-10).max(T::epsilon() * T::lit(1e4) * w.v_max / width);
        let mut lo = w.at(edge);
        let mut hi = w.at(T::one() - edge);
        let m = |v: T| -> Result<T> {
            let sys = self.system(v, kappa)?;
            let sd = Saddles::find(&sys)?;
            self.mismatch_with(v, kappa, &sd)
        };
        // mismatch decreases in v at fixed kappa
        if m(lo)? <= T::zero() {
            return Err(Error::VelocityNotFound(kappa.as_f64()));
        }
        if m(hi)? > T::zero() {
            if w.v_max_kind == VmaxKind::II_III {
                return Err(Error::VelocityNotFound(kappa.as_f64()));
            }
            return self.boundary_connection(&w, kappa);
        }
        let rel = T::tol_floor(self.tol.v_rel);
        for _ in 0..200 {
            if (hi - lo) <= rel * hi {
                break;
            }
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if m(mid)? > T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = (lo + hi) / T::lit(2.0);
        let sys = self.system(v, kappa)?;
        let sd = Saddles::find(&sys)?;
        self.connection_at(v, kappa, &sd, false)
    }

    /// Connection reported at `v_max` of a II-IV window: the saddles come
    /// from `v_max` itself, the trajectory from the nearest regular velocity.
    fn boundary_connection(&self, w: &VelocityWindow<T>, kappa: T) -> Result<ConnectionResult<T>> {
        let near = w.v_max - T::lit(1e-8) * w.width();
        let sys = self.system(near, kappa)?;
        let sd = Saddles::find(&sys)?;
        let mut res = self.connection_at(near, kappa, &sd, true)?;
        let edge = self.system(w.v_max, kappa)?;
        res.v = w.v_max;
        res.s_minus = edge.u2_minus()?.s;
        res.s_plus = edge.u1_plus()?.s;
        Ok(res)
    }

    /// `(s^- - s^+) - kappa * int (ds/dc / kappa) dc` along the connection,
    /// by three-point Gauss-Legendre on each sample interval of the cubic
    /// Hermite interpolant.
    pub fn integral_residual(&self, res: &ConnectionResult<T>) -> Result<T> {
        let sys = self.system(res.v, res.kappa)?;
        let pts = res.samples_with_slopes();
        let nodes = [-(T::lit(0.6)).sqrt(), T::zero(), T::lit(0.6).sqrt()];
        let weights = [T::lit(5.0 / 9.0), T::lit(8.0 / 9.0), T::lit(5.0 / 9.0)];
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let mut total = T::zero();
        for w in pts.windows(2) {
            let (c0, s0, d0) = w[0];
            let (c1, s1, d1) = w[1];
            let h = c1 - c0;
            if h <= T::zero() {
                continue;
            }
            let mut acc = T::zero();
            for (x, wt) in nodes.iter().zip(&weights) {
                let t = (*x + one) / two;
                let t2 = t * t;
                let t3 = t2 * t;
                let s = (two * t3 - three * t2 + one) * s0 + (t3 - two * t2 + t) * h * d0 + (three * t2 - two * t3) * s1 + (t3 - t2) * h * d1;
                let c = c0 + t * h;
                let (sx, cx) = sys.rhs(s, c);
                // kappa * (ds/dc) / kappa, written out to mirror the identity
                let integrand = sx / (cx * res.kappa);
                acc = acc + *wt * integrand;
            }
            total = total + acc * h / two;
        }
        Ok((res.s_minus - res.s_plus) - res.kappa * total)
    }

    /// `kappa(v)` on `n` interior velocities, or `v(kappa)` on `n` log-spaced
    /// ratios between the ratios at 2% and 98% of the window.
    pub fn sweep(&mut self, n: usize, spacing: Spacing, jobs: usize) -> Result<VKappaCurve<T>> {
        if n < 2 {
            return Err(Error::Domain(format!("sweep needs n >= 2, got {n}")));
        }
        let w = self.window()?;
        let kappa_crit = self.kappa_crit()?;
        let this = &*self;
        let results: Vec<Result<ConnectionResult<T>>> = match spacing {
            Spacing::UniformV => {
                let vs: Vec<T> = (0..n)
                    .map(|i| w.at(T::from_usize(i + 1).unwrap() / T::from_usize(n + 1).unwrap()))
                    .collect();
                run_pool(jobs, || vs.par_iter().map(|&v| this.find_kappa_for_v(v)).collect())?
            }
            Spacing::LogKappa => {
                let k_hi = this.find_kappa_for_v(w.at(T::lit(0.02)))?.kappa.ln();
                let k_lo = this.find_kappa_for_v(w.at(T::lit(0.98)))?.kappa.ln();
                let ks: Vec<T> = (0..n)
                    .map(|i| (k_lo + (k_hi - k_lo) * T::from_usize(i).unwrap() / T::from_usize(n - 1).unwrap()).exp())
                    .collect();
                run_pool(jobs, || {
                    ks.par_iter()
                        .map(|&k| {
                            let mut local = this.clone();
                            local.find_v_for_kappa(k)
                        })
                        .collect()
                })?
            }
        };
        let mut samples = Vec::with_capacity(n);
        for r in results {
            let r = r?;
            let (r1, r2) = r.rh_residuals(self.model);
            samples.push(SweepSample {
                v: r.v,
                kappa: r.kappa,
                s_minus: r.s_minus,
                s_plus: r.s_plus,
                rh_residual: r1.abs().max(r2.abs()),
                integral_residual: self.integral_residual(&r)?,
            });
        }
        samples.sort_by(|a, b| a.v.partial_cmp(&b.v).unwrap_or(std::cmp::Ordering::Equal));
        let rel = T::lit(1e-10);
        for p in samples.windows(2) {
            if p[1].v > p[0].v && p[1].kappa >= p[0].kappa * (T::one() + rel) {
                return Err(Error::Consistency(format!(
                    "kappa increases from {} at v = {} to {} at v = {}",
                    p[0].kappa, p[0].v, p[1].kappa, p[1].v
                )));
            }
        }
        Ok(VKappaCurve { samples, kappa_crit, window: w })
    }
}

fn run_pool<R: Send, F: FnOnce() -> R + Send>(jobs: usize, work: F) -> Result<R> {
    if jobs == 0 {
        return Ok(work());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(work))
}

pub fn connection_mismatch<T: Real>(model: &ModelSet<T>, v: T, kappa: T, c0: T) -> Result<T> {
    let (cp, cm) = (model.c_plus, model.c_minus);
    if !(c0 > cp && c0 < cm) {
        return Err(Error::Domain(format!("c0 = {c0} must lie strictly between {cp} and {cm}")));
    }
    ConnectionSolver::new(model, SystemKind::NonEqAdsorption).with_c0(c0).mismatch(v, kappa)
}

pub fn find_kappa_for_v<T: Real>(model: &ModelSet<T>, v: T) -> Result<ConnectionResult<T>> {
    ConnectionSolver::new(model, SystemKind::NonEqAdsorption).find_kappa_for_v(v)
}

pub fn find_v_for_kappa<T: Real>(model: &ModelSet<T>, kappa: T) -> Result<ConnectionResult<T>> {
    ConnectionSolver::new(model, SystemKind::NonEqAdsorption).find_v_for_kappa(kappa)
}

pub fn sweep_curve<T: Real>(model: &ModelSet<T>, n: usize, spacing: Spacing) -> Result<VKappaCurve<T>> {
    ConnectionSolver::new(model, SystemKind::NonEqAdsorption).sweep(n, spacing, 0)
}
