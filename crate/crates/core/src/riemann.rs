//! Full Riemann solution `(1, c^-) -> (0, c^+)`:
//!
//! ```text
//! u^L --s-wave--> u^- --c-shock--> u^+ --s-wave--> u^R
//! ```
//!
//! with the c-shock speed fixed by the travelling-wave connection at the
//! given `kappa`, plus the Lax-type baseline obtained at `v_max`.

use serde::Serialize;

use crate::connect::{rh_residuals, ConnectionResult, ConnectionSolver};
use crate::error::{Error, Result};
use crate::models::ModelSet;
use crate::real::Real;
use crate::scalar::{solve_scalar_riemann, Edge, FanElement, ScalarFan};
use crate::tol::Tolerances;
use crate::twave::{velocity_window, Line, SystemKind, TravellingWaveSystem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CShockWave<T> {
    /// `(s^-, c^-)`.
    pub u_minus: (T, T),
    /// `(s^+, c^+)`.
    pub u_plus: (T, T),
    pub v: T,
    /// `None` for the baseline, which is not tied to a ratio.
    pub kappa: Option<T>,
    pub rh_residuals: (T, T),
}

impl<T: Real> CShockWave<T> {
    pub fn new(model: &ModelSet<T>, s_minus: T, s_plus: T, v: T, kappa: Option<T>) -> Self {
        let u_minus = (s_minus, model.c_minus);
        let u_plus = (s_plus, model.c_plus);
        Self { u_minus, u_plus, v, kappa, rh_residuals: rh_residuals(model, v, u_minus, u_plus) }
    }

    /// `(f_s(u^-), f_s(u^+))`; an undercompressive shock has `f_s(u^-) < v < f_s(u^+)`.
    pub fn characteristic_speeds(&self, model: &ModelSet<T>) -> (T, T) {
        (
            model.flux.f_s(self.u_minus.0, self.u_minus.1),
            model.flux.f_s(self.u_plus.0, self.u_plus.1),
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WaveSequence<T> {
    /// `1 -> s^-` at `c = c^-`.
    pub left_fan: ScalarFan<T>,
    pub shock: CShockWave<T>,
    /// `s^+ -> 0` at `c = c^+`.
    pub right_fan: ScalarFan<T>,
}

impl<T: Real> WaveSequence<T> {
    /// Left edge, shock and right edge speeds; empty fans borrow the shock speed.
    pub fn speed_chain(&self) -> (T, T, T) {
        let v = self.shock.v;
        (
            self.left_fan.edge_speed(Edge::Final).unwrap_or(v),
            v,
            self.right_fan.edge_speed(Edge::Initial).unwrap_or(v),
        )
    }

    /// Every discontinuity location in `xi`.
    pub fn jump_speeds(&self) -> Vec<T> {
        let mut out = Vec::new();
        for fan in [&self.left_fan, &self.right_fan] {
            for e in &fan.elements {
                if let FanElement::Shock { speed, .. } = e {
                    out.push(*speed);
                }
            }
        }
        out.push(self.shock.v);
        out
    }

    /// Speed compatibility with slack `tol`; the left fan's initial speed
    /// must also be non-negative.
    pub fn check_compatibility(&self, tol: T) -> Result<()> {
        let (l, v, r) = self.speed_chain();
        let first = self.left_fan.edge_speed(Edge::Initial).unwrap_or(v);
        if l > v + tol || v > r + tol || first < -tol {
            return Err(Error::Assembly { left: l.as_f64(), shock: v.as_f64(), right: r.as_f64() });
        }
        Ok(())
    }
}

fn assemble<T: Real>(model: &ModelSet<T>, shock: CShockWave<T>, tol: &Tolerances) -> Result<WaveSequence<T>> {
    let left_fan = solve_scalar_riemann(&model.flux, model.c_minus, T::one(), shock.u_minus.0)?;
    let right_fan = solve_scalar_riemann(&model.flux, model.c_plus, shock.u_plus.0, T::zero())?;
    let seq = WaveSequence { left_fan, shock, right_fan };
    seq.check_compatibility(T::lit(tol.compat))?;
    Ok(seq)
}

/// Riemann solution admitted by the dissipative system with ratio `kappa`.
pub fn solve_riemann<T: Real>(model: &ModelSet<T>, kappa: T, kind: SystemKind, tol: &Tolerances) -> Result<(WaveSequence<T>, ConnectionResult<T>)> {
    let mut solver = ConnectionSolver::new(model, kind).with_tolerances(*tol);
    let conn = solver.find_v_for_kappa(kappa)?;
    let shock = CShockWave::new(model, conn.s_minus, conn.s_plus, conn.v, Some(kappa));
    Ok((assemble(model, shock, tol)?, conn))
}

/// The `kappa -> 0` limit: shock at `v_max` from the largest root on
/// `c = c^-` to the smallest on `c = c^+`.
pub fn solve_lax_baseline<T: Real>(model: &ModelSet<T>, tol: &Tolerances) -> Result<WaveSequence<T>> {
    let w = velocity_window(model, tol)?;
    let sys = TravellingWaveSystem::new(model, w.v_max, T::one(), SystemKind::NonEqAdsorption)?.with_tolerances(*tol);
    let minus = sys.points_on_line(Line::Minus)?;
    let plus = sys.points_on_line(Line::Plus)?;
    let s_minus = minus
        .last()
        .ok_or_else(|| Error::MissingCriticalPoint(format!("no critical point on c^- at v_max = {}", w.v_max)))?
        .s;
    let s_plus = plus
        .first()
        .ok_or_else(|| Error::MissingCriticalPoint(format!("no critical point on c^+ at v_max = {}", w.v_max)))?
        .s;
    assemble(model, CShockWave::new(model, s_minus, s_plus, w.v_max, None), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSegment {
    Constant,
    Rarefaction,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionProfile<T> {
    pub xi: Vec<T>,
    pub s: Vec<T>,
    pub c: Vec<T>,
    pub segment: Vec<ProfileSegment>,
}

fn in_rarefaction<T: Real>(fan: &ScalarFan<T>, xi: T) -> bool {
    fan.elements.iter().any(|e| match *e {
        FanElement::Rarefaction { speed_start, speed_end, .. } => xi > speed_start && xi < speed_end,
        FanElement::Shock { .. } => false,
    })
}

/// Evaluates the sequence on a sorted `xi = x/t` grid.
pub fn sample_profile<T: Real>(seq: &WaveSequence<T>, xi_grid: &[T]) -> Result<SolutionProfile<T>> {
    if xi_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("xi grid must be sorted".into()));
    }
    let v = seq.shock.v;
    let mut p = SolutionProfile {
        xi: xi_grid.to_vec(),
        s: Vec::with_capacity(xi_grid.len()),
        c: Vec::with_capacity(xi_grid.len()),
        segment: Vec::with_capacity(xi_grid.len()),
    };
    for &xi in xi_grid {
        let (fan, c) = if xi < v { (&seq.left_fan, seq.shock.u_minus.1) } else { (&seq.right_fan, seq.shock.u_plus.1) };
        let s = if fan.is_empty() { fan.s_left } else { fan.sample(xi) };
        p.s.push(s);
        p.c.push(c);
        p.segment.push(if in_rarefaction(fan, xi) { ProfileSegment::Rarefaction } else { ProfileSegment::Constant });
    }
    Ok(p)
}

/// `sup |s_a - s_b|` over samples farther than `collar` from every jump.
pub fn profile_distance<T: Real>(a: &SolutionProfile<T>, b: &SolutionProfile<T>, jumps: &[T], collar: T) -> T {
    a.xi.iter()
        .zip(a.s.iter().zip(&b.s))
        .filter(|(xi, _)| jumps.iter().all(|j| (**xi - *j).abs() > collar))
        .map(|(_, (sa, sb))| (*sa - *sb).abs())
        .fold(T::zero(), T::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct TravellingProfileReport<T> {
    pub xi_span: T,
    /// `|s(-xi_span) - s^-|`.
    pub limit_minus: T,
    /// `|s(xi_span) - s^+|`.
    pub limit_plus: T,
    /// Largest residual of the two integrated conservation relations.
    pub relation_residual: T,
    /// Largest residual of the adsorption relation (relaxation or equilibrium).
    pub adsorption_residual: T,
    /// `|alpha(c^-) - a(c^-)|`.
    pub alpha_endpoint: T,
    /// `s` strictly decreasing in `xi` along the samples.
    pub monotone: bool,
    /// `(xi, s, c, alpha)` samples, increasing in `xi`.
    pub samples: Vec<(T, T, T, T)>,
}

/// Reconstructs the travelling profile `s(xi), c(xi)` of a connection and
/// checks it against the once-integrated travelling-wave relations.
///
/// `c(xi)` solves a scalar equation independent of `s`, so `xi(c)` follows
/// by quadrature of `kappa / (h (L(c) - a(c)))` from `c0`; `s(xi)` is then
/// the connection graph `s(c)` composed with it.
pub fn verify_travelling_profile<T: Real>(model: &ModelSet<T>, res: &ConnectionResult<T>, xi_span: T) -> Result<TravellingProfileReport<T>> {
    let sys = TravellingWaveSystem::new(model, res.v, res.kappa, res.kind)?;
    let ch = sys.chord;
    let pts = res.samples_with_slopes();
    // the saddles themselves sit at xi = -inf, +inf
    let inner = &pts[1..pts.len() - 1];
    if inner.len() < 2 {
        return Err(Error::Consistency("connection has too few samples".into()));
    }
    let dxi_dc = |c: T| res.kappa / (sys.h() * sys.chord_gap(c));
    let gl_x = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664].map(T::lit);
    let gl_w = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189].map(T::lit);
    let segment_integral = |a: T, b: T| {
        let sub = 4;
        let h = (b - a) / T::from_usize(sub).unwrap();
        let mut acc = T::zero();
        for k in 0..sub {
            let lo = a + h * T::from_usize(k).unwrap();
            for (x, w) in gl_x.iter().zip(&gl_w) {
                acc = acc + *w * dxi_dc(lo + (*x + T::one()) * h / T::lit(2.0));
            }
        }
        acc * h / T::lit(2.0)
    };
    // xi = 0 at the sample nearest to c0
    let origin = inner
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 .0 - res.c0).abs().partial_cmp(&(b.1 .0 - res.c0).abs()).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut xi = vec![T::zero(); inner.len()];
    for i in origin + 1..inner.len() {
        xi[i] = xi[i - 1] + segment_integral(inner[i - 1].0, inner[i].0);
    }
    for i in (0..origin).rev() {
        xi[i] = xi[i + 1] - segment_integral(inner[i].0, inner[i + 1].0);
    }

    let v = res.v;
    let mut relation = T::zero();
    let mut adsorption = T::zero();
    let mut samples = Vec::with_capacity(inner.len());
    for (k, &(c, s, slope)) in inner.iter().enumerate() {
        let a_cap = model.capillarity.value(s, c);
        let f = model.flux.f(s, c);
        let (_, c_xi) = sys.rhs(s, c);
        let s_xi = slope * c_xi;
        let r1 = -v * s + f - a_cap * s_xi - v * ch.d1;
        let (alpha, r2, r3) = match res.kind {
            SystemKind::NonEqAdsorption => {
                let alpha = ch.line(c);
                let r2 = -v * c * s - v * alpha + c * f - c * a_cap * s_xi - v * ch.d2;
                let alpha_xi = ch.d1 * c_xi;
                let r3 = -v * res.kappa * alpha_xi - (model.adsorption.a(c) - alpha);
                (alpha, r2, r3)
            }
            SystemKind::CapillaryDiffusion => {
                let a = model.adsorption.a(c);
                let r2 = -v * (c * s + a) + c * f - c * a_cap * s_xi - res.kappa * c_xi - v * ch.d2;
                let r3 = res.kappa * c_xi - v * sys.chord_gap(c);
                (a, r2, r3)
            }
        };
        relation = relation.max(r1.abs()).max(r2.abs());
        adsorption = adsorption.max(r3.abs());
        samples.push((xi[k], s, c, alpha));
    }
    // increasing xi is decreasing c
    samples.reverse();
    let monotone = samples.windows(2).all(|w| w[1].1 < w[0].1 && w[1].0 > w[0].0);

    let s_at = |target: T| -> T {
        if target <= samples[0].0 {
            return samples[0].1;
        }
        let last = samples.len() - 1;
        if target >= samples[last].0 {
            return samples[last].1;
        }
        let j = samples.iter().position(|p| p.0 >= target).unwrap_or(last);
        let (x0, s0) = (samples[j - 1].0, samples[j - 1].1);
        let (x1, s1) = (samples[j].0, samples[j].1);
        s0 + (s1 - s0) * (target - x0) / (x1 - x0)
    };
    let limit_minus = (s_at(-xi_span) - res.s_minus).abs();
    let limit_plus = (s_at(xi_span) - res.s_plus).abs();
    let alpha_endpoint = (ch.line(model.c_minus) - model.adsorption.a(model.c_minus)).abs();
    Ok(TravellingProfileReport {
        xi_span,
        limit_minus,
        limit_plus,
        relation_residual: relation,
        adsorption_residual: adsorption,
        alpha_endpoint,
        monotone,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_for_the_boomerang_is_buckley_leverett() {
        let m = ModelSet::<f64>::boomerang();
        let tol = Tolerances::default();
        let base = solve_lax_baseline(&m, &tol).unwrap();
        let w = velocity_window(&m, &tol).unwrap();
        assert_eq!(base.shock.v, w.v_max);
        let bl = solve_scalar_riemann(&m.flux, 0.0, 1.0, 0.0).unwrap();
        let grid: Vec<f64> = (0..1000).map(|i| -0.2 + 2.4 * i as f64 / 999.0).collect();
        let p = sample_profile(&base, &grid).unwrap();
        let mut jumps = base.jump_speeds();
        jumps.extend(bl.elements.iter().filter_map(|e| match e {
            FanElement::Shock { speed, .. } => Some(*speed),
            _ => None,
        }));
        for (xi, s) in grid.iter().zip(&p.s) {
            if jumps.iter().all(|j| (xi - j).abs() > 1e-3) {
                assert!((s - bl.sample(*xi)).abs() < 1e-6, "xi = {xi}");
            }
        }
    }

    #[test]
    fn profile_has_one_concentration_jump() {
        let m = ModelSet::<f64>::boomerang();
        let (seq, _) = solve_riemann(&m, 2.0, SystemKind::NonEqAdsorption, &Tolerances::default()).unwrap();
        let v = seq.shock.v;
        let p = sample_profile(&seq, &[-1.0, v - 1e-9, v + 1e-9, 5.0]).unwrap();
        assert_eq!(p.c, vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(p.s[0], 1.0);
        assert_eq!(p.s[3], 0.0);
        assert!((p.s[1] - seq.shock.u_minus.0).abs() < 1e-9);
        assert!((p.s[2] - seq.shock.u_plus.0).abs() < 1e-9);
        let (r1, r2) = seq.shock.rh_residuals;
        assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12);
    }

    #[test]
    fn travelling_profile_satisfies_the_relations() {
        let m = ModelSet::<f64>::boomerang();
        let conn = crate::connect::find_kappa_for_v(&m, 0.71).unwrap();
        let rep = verify_travelling_profile(&m, &conn, 200.0).unwrap();
        assert!(rep.monotone);
        assert!(rep.relation_residual < 1e-8, "{}", rep.relation_residual);
        assert!(rep.adsorption_residual < 1e-8);
        assert!(rep.alpha_endpoint < 1e-15);
        assert!(rep.limit_minus < 1e-6 && rep.limit_plus < 1e-6, "{} {}", rep.limit_minus, rep.limit_plus);
    }
}
