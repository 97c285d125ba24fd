//! Explicit finite-volume simulator for the dissipative systems
//!
//! ```text
//! s_t + f_x            = eps_c (A s_x)_x
//! (c s + alpha)_t + (c f)_x = eps_c (c A s_x)_x + eps_d c_xx
//! eps_r alpha_t        = a(c) - alpha
//! ```
//!
//! With `eps_r = 0` the adsorption is in equilibrium, `alpha = a(c)`.
//! Upwind convective fluxes (`f_s >= 0`), centred dissipative fluxes and an
//! exact exponential update of the relaxation term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::ModelSet;
use crate::real::Real;
use crate::twave::SystemKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig<T> {
    pub eps_c: T,
    pub eps_d: T,
    pub eps_r: T,
    /// Domain length.
    pub length: T,
    pub cells: usize,
    /// Fraction of the explicit stability limit used per step, in `(0, 0.5]`.
    pub cfl: T,
    pub t_end: T,
    /// Width of the smoothed initial step, in cells.
    pub smoothing_cells: usize,
    /// Initial step position as a fraction of `length`.
    pub step_at: T,
    /// Allows `eps_c`, `eps_d` and `eps_r` to be active at once.
    pub three_param: bool,
    /// Left boundary state `(s, c)`; `None` means `(1, c^-)`.
    pub inflow: Option<(T, T)>,
    /// Front position sampling interval in time.
    pub record_dt: T,
}

impl<T: Real> SimConfig<T> {
    /// Setup matching the travelling-wave ratio `kappa` of the given system:
    /// `eps_r = kappa eps_c` or `eps_d = kappa eps_c`.
    pub fn for_kappa(kind: SystemKind, kappa: T, eps_c: T) -> Self {
        let (eps_d, eps_r) = match kind {
            SystemKind::NonEqAdsorption => (T::zero(), kappa * eps_c),
            SystemKind::CapillaryDiffusion => (kappa * eps_c, T::zero()),
        };
        Self {
            eps_c,
            eps_d,
            eps_r,
            length: T::one(),
            cells: 4000,
            cfl: T::lit(0.4),
            t_end: T::one(),
            smoothing_cells: 5,
            step_at: T::lit(0.1),
            three_param: false,
            inflow: None,
            record_dt: T::lit(0.01),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        if self.eps_c < z || self.eps_d < z || self.eps_r < z {
            return Err(Error::Config("dissipation parameters must be non-negative".into()));
        }
        if !self.three_param && self.eps_c > z && self.eps_d > z && self.eps_r > z {
            return Err(Error::Config("eps_c, eps_d and eps_r all active needs three-parameter mode".into()));
        }
        if !(self.cfl > z && self.cfl <= T::lit(0.5)) {
            return Err(Error::Config(format!("cfl must lie in (0, 0.5], got {}", self.cfl)));
        }
        if self.cells < 8 || !(self.length > z) || !(self.t_end > z) || !(self.record_dt > z) {
            return Err(Error::Config("need at least 8 cells and positive length, end time and record interval".into()));
        }
        if !(self.step_at > z && self.step_at < T::one()) {
            return Err(Error::Config("step position must be inside the domain".into()));
        }
        Ok(())
    }

    pub fn dx(&self) -> T {
        self.length / T::from_usize(self.cells).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridState<T> {
    pub s: Vec<T>,
    pub c: Vec<T>,
    pub alpha: Vec<T>,
    pub t: T,
}

impl<T: Real> GridState<T> {
    pub fn uniform(n: usize, s: T, c: T, alpha: T) -> Self {
        Self { s: vec![s; n], c: vec![c; n], alpha: vec![alpha; n], t: T::zero() }
    }

    /// Step from `(1, c^-)` to `(0, c^+)` smoothed by a tanh of the configured width.
    pub fn riemann_step(model: &ModelSet<T>, cfg: &SimConfig<T>) -> Self {
        let dx = cfg.dx();
        let x0 = cfg.step_at * cfg.length;
        let w = dx * T::from_usize(cfg.smoothing_cells.max(1)).unwrap();
        let half = T::lit(0.5);
        let mut st = Self::uniform(cfg.cells, T::zero(), model.c_plus, model.adsorption.a(model.c_plus));
        for i in 0..cfg.cells {
            let x = (T::from_usize(i).unwrap() + half) * dx;
            let weight = half * (T::one() - ((x - x0) / w).tanh());
            st.s[i] = weight;
            st.c[i] = model.c_plus + (model.c_minus - model.c_plus) * weight;
            st.alpha[i] = model.adsorption.a(st.c[i]);
        }
        st
    }

    /// `sum s dx`.
    pub fn water(&self, dx: T) -> T {
        self.s.iter().fold(T::zero(), |a, s| a + *s) * dx
    }

    /// `sum (c s + alpha) dx`.
    pub fn chemical(&self, dx: T) -> T {
        self.s.iter().zip(&self.c).zip(&self.alpha).fold(T::zero(), |a, ((s, c), al)| a + *c * *s + *al) * dx
    }

    /// First crossing of `c = level` from the left, linearly interpolated.
    pub fn front_position(&self, dx: T, level: T) -> Option<T> {
        let half = T::lit(0.5);
        let i = self.c.iter().position(|c| *c <= level)?;
        if i == 0 {
            return Some(half * dx);
        }
        let (c0, c1) = (self.c[i - 1], self.c[i]);
        let frac = if c0 == c1 { T::zero() } else { (c0 - level) / (c0 - c1) };
        Some((T::from_usize(i - 1).unwrap() + half + frac) * dx)
    }
}

/// Net fluxes through the two boundaries during one step, per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryFlux<T> {
    pub water_in: T,
    pub water_out: T,
    pub chemical_in: T,
    pub chemical_out: T,
}

pub struct Simulator<'m, T> {
    model: &'m ModelSet<T>,
    cfg: SimConfig<T>,
    dx: T,
    dt: T,
    inflow: (T, T),
    // scratch face fluxes
    fs: Vec<T>,
    fu: Vec<T>,
}

impl<'m, T: Real> Simulator<'m, T> {
    pub fn new(model: &'m ModelSet<T>, cfg: SimConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let dx = cfg.dx();
        // f_s bound from a grid, padded
        let n = 64;
        let mut speed = T::zero();
        for i in 0..=n {
            for j in 0..=8 {
                let s = T::from_usize(i).unwrap() / T::from_usize(n).unwrap();
                let c = T::from_usize(j).unwrap() / T::lit(8.0);
                speed = speed.max(model.flux.f_s(s, c).abs());
            }
        }
        speed = speed * T::lit(1.1) + T::lit(1e-12);
        let a_hi = model.capillarity.bounds().1;
        let diff = cfg.eps_c * a_hi + cfg.eps_d;
        let mut dt = cfg.cfl * dx / speed;
        if diff > T::zero() {
            dt = dt.min(cfg.cfl * dx * dx / diff);
        }
        let inflow = cfg.inflow.unwrap_or((T::one(), model.c_minus));
        Ok(Self { model, cfg, dx, dt, inflow, fs: vec![T::zero(); cfg.cells + 1], fu: vec![T::zero(); cfg.cells + 1] })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn config(&self) -> &SimConfig<T> {
        &self.cfg
    }

    fn equilibrium_c(&self, s: T, u: T, guess: T) -> T {
        // c s + a(c) = u is increasing in c
        let ads = &self.model.adsorption;
        let g = |c: T| c * s + ads.a(c) - u;
        let (mut lo, mut hi) = (T::zero(), T::one());
        if g(lo) >= T::zero() {
            return lo;
        }
        if g(hi) <= T::zero() {
            return hi;
        }
        let mut c = guess.max(lo).min(hi);
        for _ in 0..60 {
            let r = g(c);
            if r.abs() <= T::epsilon() * T::lit(4.0) {
                break;
            }
            if r > T::zero() {
                hi = c;
            } else {
                lo = c;
            }
            let d = s + ads.da(c);
            let next = c - r / d;
            c = if next > lo && next < hi { next } else { (lo + hi) * T::lit(0.5) };
        }
        c
    }

    /// Advances `state` by one step.
    pub fn step(&mut self, state: &mut GridState<T>) -> Result<BoundaryFlux<T>> {
        let n = self.cfg.cells;
        let (dx, dt) = (self.dx, self.dt);
        let (eps_c, eps_d, eps_r) = (self.cfg.eps_c, self.cfg.eps_d, self.cfg.eps_r);
        let half = T::lit(0.5);
        let flux = &self.model.flux;
        let cap = &self.model.capillarity;
        let (s_in, c_in) = self.inflow;
        for k in 0..=n {
            // face k sits between cells k-1 and k; ghosts are the inflow
            // state on the left and a copy of the last cell on the right
            let (sl, cl) = if k == 0 { (s_in, c_in) } else { (state.s[k - 1], state.c[k - 1]) };
            let (sr, cr) = if k == n { (sl, cl) } else { (state.s[k], state.c[k]) };
            let f = flux.f(sl, cl);
            let a_face = half * (cap.value(sl, cl) + cap.value(sr, cr));
            let cap_flux = eps_c * a_face * (sr - sl) / dx;
            self.fs[k] = f - cap_flux;
            self.fu[k] = cl * f - half * (cl + cr) * cap_flux - eps_d * (cr - cl) / dx;
        }
        let decay = if eps_r > T::zero() { (-dt / eps_r).exp() } else { T::zero() };
        let ads = &self.model.adsorption;
        for i in 0..n {
            let s_old = state.s[i];
            let u_old = state.c[i] * s_old + state.alpha[i];
            let s = s_old - dt / dx * (self.fs[i + 1] - self.fs[i]);
            let u = u_old - dt / dx * (self.fu[i + 1] - self.fu[i]);
            if !s.is_finite() || !u.is_finite() {
                return Err(Error::Instability(format!(
                    "non-finite state in cell {i} at t = {}; dt = {} exceeds the explicit bound cfl*min(dx/max f_s, dx^2/(eps_c A_hi + eps_d))",
                    state.t, dt
                )));
            }
            let (c, alpha) = if eps_r > T::zero() {
                let dry = s <= T::lit(1e-10);
                let recover = |al: T, prev: T| if dry { prev } else { ((u - al) / s).max(T::zero()).min(T::one()) };
                let c_mid = recover(state.alpha[i], state.c[i]);
                let target = ads.a(c_mid);
                let relaxed = target + (state.alpha[i] - target) * decay;
                let c = recover(relaxed, c_mid);
                // clamping and dry cells put the discrepancy into alpha so
                // that c s + alpha stays conserved
                (c, u - c * s)
            } else {
                let c = self.equilibrium_c(s, u, state.c[i]);
                (c, ads.a(c))
            };
            state.s[i] = s;
            state.c[i] = c;
            state.alpha[i] = alpha;
        }
        state.t = state.t + dt;
        Ok(BoundaryFlux { water_in: self.fs[0], water_out: self.fs[n], chemical_in: self.fu[0], chemical_out: self.fu[n] })
    }

    /// Runs to `t_end`, recording the `c` front every `record_dt`.
    pub fn run(&mut self, state: &mut GridState<T>) -> Result<FrontHistory<T>> {
        let level = T::lit(0.5) * (self.model.c_minus + self.model.c_plus);
        let mut hist = FrontHistory { samples: Vec::new(), touched_boundary: false, steps: 0 };
        let mut next_record = state.t;
        let far = self.model.c_plus;
        let gap = (self.model.c_minus - self.model.c_plus).abs();
        while state.t < self.cfg.t_end {
            if state.t >= next_record {
                if let Some(x) = state.front_position(self.dx, level) {
                    hist.samples.push((state.t, x));
                }
                next_record = next_record + self.cfg.record_dt;
            }
            self.step(state)?;
            hist.steps += 1;
            let last = state.c[self.cfg.cells - 1];
            if (last - far).abs() > T::lit(1e-3) * gap {
                hist.touched_boundary = true;
            }
        }
        if let Some(x) = state.front_position(self.dx, level) {
            hist.samples.push((state.t, x));
        }
        Ok(hist)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontHistory<T> {
    /// `(t, x)` of the `c = (c^- + c^+)/2` level set.
    pub samples: Vec<(T, T)>,
    pub touched_boundary: bool,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontFit<T> {
    pub speed: T,
    pub intercept: T,
    /// Standard error of the slope.
    pub speed_stderr: T,
    pub points: usize,
}

/// Least-squares slope of the front position over the final third of the run.
pub fn measure_front_speed<T: Real>(hist: &FrontHistory<T>, length: T) -> Result<FrontFit<T>> {
    if hist.touched_boundary {
        return Err(Error::InconclusiveRun("concentration front reached the outflow boundary".into()));
    }
    let t_last = hist.samples.last().map(|p| p.0).ok_or_else(|| Error::InconclusiveRun("no front recorded".into()))?;
    let t_from = t_last * T::lit(2.0) / T::lit(3.0);
    let pts: Vec<(T, T)> = hist.samples.iter().copied().filter(|p| p.0 >= t_from).collect();
    if pts.len() < 3 {
        return Err(Error::InconclusiveRun(format!("only {} front samples in the final third", pts.len())));
    }
    if pts.iter().any(|p| p.1 <= T::zero() || p.1 >= length) {
        return Err(Error::InconclusiveRun("front outside the domain".into()));
    }
    let n = T::from_usize(pts.len()).unwrap();
    let mt = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let stt = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mt) * (p.0 - mt));
    let stx = pts.iter().fold(T::zero(), |a, p| a + (p.0 - mt) * (p.1 - mx));
    let speed = stx / stt;
    let intercept = mx - speed * mt;
    let sse = pts.iter().fold(T::zero(), |a, p| {
        let r = p.1 - intercept - speed * p.0;
        a + r * r
    });
    let speed_stderr = (sse / (n - T::lit(2.0)) / stt).sqrt();
    Ok(FrontFit { speed, intercept, speed_stderr, points: pts.len() })
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationResult<T> {
    pub config: SimConfig<T>,
    pub history: FrontHistory<T>,
    pub fit: Option<FrontFit<T>>,
    pub final_state: GridState<T>,
}

/// Riemann-step run plus front-speed fit; a failed fit is reported as `None`.
pub fn simulate<T: Real>(model: &ModelSet<T>, cfg: SimConfig<T>) -> Result<SimulationResult<T>> {
    let mut sim = Simulator::new(model, cfg)?;
    let mut state = GridState::riemann_step(model, &cfg);
    let history = sim.run(&mut state)?;
    let fit = measure_front_speed(&history, cfg.length).ok();
    Ok(SimulationResult { config: cfg, history, fit, final_state: state })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: SystemKind) -> SimConfig<f64> {
        SimConfig { cells: 200, t_end: 0.05, ..SimConfig::for_kappa(kind, 1.0, 0.01) }
    }

    #[test]
    fn uniform_state_is_fixed() {
        let m = ModelSet::<f64>::boomerang();
        for kind in [SystemKind::NonEqAdsorption, SystemKind::CapillaryDiffusion] {
            let (s0, c0) = (0.4, 0.3);
            let cfg = SimConfig { inflow: Some((s0, c0)), ..small(kind) };
            let mut sim = Simulator::new(&m, cfg).unwrap();
            let mut st = GridState::uniform(cfg.cells, s0, c0, m.adsorption.a(c0));
            for _ in 0..20 {
                sim.step(&mut st).unwrap();
            }
            assert!(st.s.iter().all(|s| (s - s0).abs() < 1e-14));
            assert!(st.c.iter().all(|c| (c - c0).abs() < 1e-13));
        }
    }

    #[test]
    fn conserves_up_to_boundary_fluxes() {
        let m = ModelSet::<f64>::boomerang();
        let cfg = small(SystemKind::NonEqAdsorption);
        let mut sim = Simulator::new(&m, cfg).unwrap();
        let mut st = GridState::riemann_step(&m, &cfg);
        let dx = cfg.dx();
        for _ in 0..200 {
            let (w0, u0) = (st.water(dx), st.chemical(dx));
            let b = sim.step(&mut st).unwrap();
            let dt = sim.dt();
            assert!((st.water(dx) - w0 - dt * (b.water_in - b.water_out)).abs() < 1e-12);
            assert!((st.chemical(dx) - u0 - dt * (b.chemical_in - b.chemical_out)).abs() < 1e-12);
        }
    }

    #[test]
    fn reduces_to_upwind_transport() {
        let m = ModelSet::<f64>::boomerang();
        let cfg = SimConfig { eps_c: 0.0, eps_r: 0.0, eps_d: 0.0, inflow: Some((1.0, 0.5)), ..small(SystemKind::NonEqAdsorption) };
        let mut sim = Simulator::new(&m, cfg).unwrap();
        let mut st = GridState::uniform(cfg.cells, 0.0, 0.5, m.adsorption.a(0.5));
        for i in 0..20 {
            st.s[i] = 1.0;
        }
        let before = st.s.clone();
        sim.step(&mut st).unwrap();
        let r = sim.dt() / cfg.dx();
        for i in 1..cfg.cells {
            let expect = before[i] - r * (m.flux.f(before[i], 0.5) - m.flux.f(before[i - 1], 0.5));
            assert!((st.s[i] - expect).abs() < 1e-14);
        }
        assert!(st.c.iter().all(|c| (c - 0.5).abs() < 1e-12));
    }

    #[test]
    fn rejects_three_active_parameters() {
        let cfg = SimConfig { eps_d: 1e-3, ..small(SystemKind::NonEqAdsorption) };
        assert!(cfg.validate().is_err());
        assert!(SimConfig { three_param: true, ..cfg }.validate().is_ok());
        assert!(SimConfig { cfl: 0.6, ..small(SystemKind::NonEqAdsorption) }.validate().is_err());
    }

    #[test]
    fn front_fit_recovers_a_line() {
        let hist = FrontHistory { samples: (0..30).map(|i| (i as f64 * 0.1, 0.2 + 0.7 * i as f64 * 0.1)).collect(), touched_boundary: false, steps: 0 };
        let fit = measure_front_speed(&hist, 10.0).unwrap();
        assert!((fit.speed - 0.7).abs() < 1e-12);
        let touched = FrontHistory { touched_boundary: true, ..hist };
        assert!(matches!(measure_front_speed(&touched, 10.0), Err(Error::InconclusiveRun(_))));
    }
}
