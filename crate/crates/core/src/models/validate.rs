//! Grid-based checks of the structural assumptions on `f`, `a` and `A`.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::ModelSet;
use crate::error::{Error, Result};
use crate::numerics::bisect;
use crate::real::Real;

pub const DEFAULT_GRID_N: usize = 256;

/// Strict inequalities must hold with at least this margin.
const MARGIN: f64 = 1e-12;
/// Allowed error in `f(0,c) = 0`, `f(1,c) = 1` and `a(0) = 0`.
const EVAL_TOL: f64 = 1e-12;
/// Allowed `|f_s|` at `s = 0` and `s = 1`.
const EDGE_SLOPE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Assumption {
    /// Boundary values `f(0,c) = 0`, `f(1,c) = 1`.
    F1,
    /// `f_s > 0` inside, `f_s = 0` at `s = 0, 1`.
    F2,
    /// One inflection point in `s` per `c`, convex then concave.
    F3,
    /// One sign change of `f_c` in `c` per `s`, negative then positive.
    F4,
    /// `a(0) = 0`.
    A1,
    /// `a' > 0`.
    A2,
    /// `a'' < 0`.
    A3,
    /// `A_lo <= A <= A_hi` with `A_lo > 0`.
    Capillarity,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub assumption: Assumption,
    pub passed: bool,
    /// First offending lattice point as `(s, c)`; `s` is 0 for isotherm checks.
    pub first_violation: Option<(f64, f64)>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub grid_n: usize,
    pub checks: Vec<AssumptionCheck>,
    /// `(c, s^I(c))` per lattice concentration; `None` where no single inflection was found.
    pub inflection: Vec<(f64, Option<f64>)>,
    /// `(s, c*(s))` per interior lattice saturation.
    pub c_star: Vec<(f64, Option<f64>)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, which: Assumption) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.assumption == which)
    }

    pub fn failed(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn summary(&self) -> String {
        let bad: Vec<String> = self.failed().map(|c| format!("{} ({})", c.assumption, c.detail)).collect();
        if bad.is_empty() {
            "all assumptions hold".into()
        } else {
            format!("failed: {}", bad.join("; "))
        }
    }
}

struct Tracker {
    assumption: Assumption,
    first: Option<(f64, f64)>,
    detail: String,
}

impl Tracker {
    fn new(assumption: Assumption) -> Self {
        Self { assumption, first: None, detail: String::new() }
    }

    fn fail(&mut self, s: f64, c: f64, detail: impl FnOnce() -> String) {
        if self.first.is_none() {
            self.first = Some((s, c));
            self.detail = detail();
        }
    }

    fn finish(self) -> AssumptionCheck {
        AssumptionCheck {
            assumption: self.assumption,
            passed: self.first.is_none(),
            first_violation: self.first,
            detail: if self.first.is_none() { "ok".into() } else { self.detail },
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sign {
    Pos,
    Neg,
    Zero,
}

fn sign_of(x: f64) -> Sign {
    if x > MARGIN {
        Sign::Pos
    } else if x < -MARGIN {
        Sign::Neg
    } else {
        Sign::Zero
    }
}

/// Checks that `vals` goes `first` ... `first`, at most one near-zero
/// entry, then `second` ... `second`, with both parts non-empty. Returns the
/// index pair bracketing the change, or the first offending index.
fn single_sign_change(vals: &[f64], first: Sign, second: Sign) -> Result<(usize, usize), usize> {
    let signs: Vec<Sign> = vals.iter().map(|&v| sign_of(v)).collect();
    let Some(switch) = signs.iter().position(|&s| s != first) else {
        return Err(vals.len() - 1);
    };
    if switch == 0 {
        return Err(0);
    }
    let mut j = switch;
    if signs[j] == Sign::Zero {
        j += 1;
    }
    if j >= signs.len() {
        return Err(switch);
    }
    for (k, &sg) in signs.iter().enumerate().skip(j) {
        if sg != second {
            return Err(k);
        }
    }
    Ok((switch - 1, j))
}

impl<T: Real> ModelSet<T> {
    /// Checks the assumptions on a `grid_n x grid_n` lattice of the unit
    /// square. Violations are report entries; only `grid_n < 64` is an error.
    pub fn validate(&self, grid_n: usize) -> Result<ValidationReport> {
        if grid_n < 64 {
            return Err(Error::Config(format!("validation grid_n must be >= 64, got {grid_n}")));
        }
        let n = grid_n;
        let node = |i: usize| T::lit(i as f64 / (n - 1) as f64);
        let fl = &self.flux;
        let root_tol = T::tol_floor(1e-12);

        let mut f1 = Tracker::new(Assumption::F1);
        let mut f2 = Tracker::new(Assumption::F2);
        let mut f3 = Tracker::new(Assumption::F3);
        let mut f4 = Tracker::new(Assumption::F4);
        let mut inflection = Vec::with_capacity(n);
        let mut c_star = Vec::with_capacity(n - 2);

        for j in 0..n {
            let c = node(j);
            let cf = c.as_f64();
            let f0 = fl.f(T::zero(), c).as_f64();
            let f1v = fl.f(T::one(), c).as_f64();
            if f0.abs() > EVAL_TOL || (f1v - 1.0).abs() > EVAL_TOL {
                f1.fail(0.0, cf, || format!("f(0,c) = {f0}, f(1,c) = {f1v}"));
            }
            for i in [0, n - 1] {
                let d = fl.f_s(node(i), c).as_f64();
                if d.abs() > EDGE_SLOPE_TOL {
                    f2.fail(node(i).as_f64(), cf, || format!("boundary slope f_s = {d}"));
                }
            }
            let mut fss = Vec::with_capacity(n - 2);
            for i in 1..n - 1 {
                let s = node(i);
                let v = fl.f(s, c).as_f64();
                if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                    f1.fail(s.as_f64(), cf, || format!("f = {v} outside [0,1]"));
                }
                let d = fl.f_s(s, c).as_f64();
                if !(d > MARGIN) {
                    f2.fail(s.as_f64(), cf, || format!("f_s = {d} not positive"));
                }
                fss.push(fl.f_ss(s, c).as_f64());
            }
            match single_sign_change(&fss, Sign::Pos, Sign::Neg) {
                Ok((a, b)) => {
                    let (lo, hi) = (node(a + 1), node(b + 1));
                    let si = if lo == hi { lo } else { bisect(|s| fl.f_ss(s, c), lo, hi, root_tol).unwrap_or(lo) };
                    inflection.push((cf, Some(si.as_f64())));
                }
                Err(k) => {
                    let s = node(k + 1).as_f64();
                    f3.fail(s, cf, || format!("f_ss sign pattern breaks at s = {s}"));
                    inflection.push((cf, None));
                }
            }
        }

        for i in 1..n - 1 {
            let s = node(i);
            let sf = s.as_f64();
            let fc: Vec<f64> = (1..n - 1).map(|j| fl.f_c(s, node(j)).as_f64()).collect();
            match single_sign_change(&fc, Sign::Neg, Sign::Pos) {
                Ok((a, b)) => {
                    let (lo, hi) = (node(a + 1), node(b + 1));
                    let cs = if lo == hi { lo } else { bisect(|c| fl.f_c(s, c), lo, hi, root_tol).unwrap_or(lo) };
                    c_star.push((sf, Some(cs.as_f64())));
                }
                Err(k) => {
                    let c = node(k + 1).as_f64();
                    f4.fail(sf, c, || format!("f_c has no single -/+ sign change in c at s = {sf}"));
                    c_star.push((sf, None));
                }
            }
        }

        let ad = &self.adsorption;
        let mut a1 = Tracker::new(Assumption::A1);
        let mut a2 = Tracker::new(Assumption::A2);
        let mut a3 = Tracker::new(Assumption::A3);
        let a0 = ad.a(T::zero()).as_f64();
        if a0.abs() > EVAL_TOL {
            a1.fail(0.0, 0.0, || format!("a(0) = {a0}"));
        }
        for j in 1..n - 1 {
            let c = node(j);
            let cf = c.as_f64();
            let av = ad.a(c).as_f64();
            if !av.is_finite() || av < 0.0 {
                a1.fail(0.0, cf, || format!("a = {av}"));
            }
            let d = ad.da(c).as_f64();
            if !(d > MARGIN) {
                a2.fail(0.0, cf, || format!("a' = {d} not positive"));
            }
            let dd = ad.dda(c).as_f64();
            if !(dd < -MARGIN) {
                a3.fail(0.0, cf, || format!("a'' = {dd} not negative"));
            }
        }

        let mut cap = Tracker::new(Assumption::Capillarity);
        let (lo, hi) = self.capillarity.bounds();
        let (lo, hi) = (lo.as_f64(), hi.as_f64());
        if !(lo > 0.0) || !hi.is_finite() {
            cap.fail(0.0, 0.0, || format!("declared bounds ({lo}, {hi}) invalid"));
        }
        for j in 0..n {
            for i in 0..n {
                let v = self.capillarity.value(node(i), node(j)).as_f64();
                if !(v >= lo - MARGIN && v <= hi + MARGIN) {
                    cap.fail(node(i).as_f64(), node(j).as_f64(), || format!("A = {v} outside [{lo}, {hi}]"));
                }
            }
        }

        Ok(ValidationReport {
            grid_n,
            checks: vec![f1, f2, f3, f4, a1, a2, a3, cap].into_iter().map(Tracker::finish).collect(),
            inflection,
            c_star,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{AdsorptionModel, FluxModel};

    #[test]
    fn boomerang_passes_everything() {
        let r = ModelSet::<f64>::boomerang().validate(DEFAULT_GRID_N).unwrap();
        assert!(r.passed(), "{}", r.summary());
        for (_, cs) in &r.c_star {
            assert!((cs.unwrap() - 0.5).abs() < 1e-9);
        }
        assert_eq!(r.inflection.len(), DEFAULT_GRID_N);
        assert!(r.inflection.iter().all(|(_, s)| s.is_some()));
    }

    #[test]
    fn monotone_flux_fails_f4_only() {
        let m = ModelSet::<f64>::boomerang().with_flux(FluxModel::corey(2.0, 2.0, vec![1.0, 1.0]));
        let r = m.validate(128).unwrap();
        assert!(!r.check(Assumption::F4).unwrap().passed);
        assert_eq!(r.failed().count(), 1);
    }

    #[test]
    fn linear_isotherm_fails_concavity_everywhere() {
        let m = ModelSet::<f64>::boomerang().with_adsorption(AdsorptionModel::Linear { slope: 1.0 });
        let r = m.validate(64).unwrap();
        let a3 = r.check(Assumption::A3).unwrap();
        assert!(!a3.passed);
        assert_eq!(a3.first_violation, Some((0.0, 1.0 / 63.0)));
        assert!(r.check(Assumption::A2).unwrap().passed);
    }

    #[test]
    fn coarse_grid_is_rejected() {
        assert!(ModelSet::<f64>::boomerang().validate(32).is_err());
    }

    #[test]
    fn c_star_is_continuous() {
        let m = ModelSet::<f64>::boomerang().with_flux(FluxModel::corey(2.0, 2.0, vec![1.0, 4.5, -4.0]));
        let r = m.validate(DEFAULT_GRID_N).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let h = 1.0 / (DEFAULT_GRID_N - 1) as f64;
        for w in r.c_star.windows(2) {
            assert!((w[1].1.unwrap() - w[0].1.unwrap()).abs() <= 10.0 * h);
        }
    }

    #[test]
    fn sign_change_helper() {
        use Sign::*;
        let _ = (Pos, Neg, Zero);
        assert_eq!(single_sign_change(&[1.0, 1.0, -1.0], Pos, Neg), Ok((1, 2)));
        assert_eq!(single_sign_change(&[1.0, 0.0, -1.0], Pos, Neg), Ok((0, 2)));
        assert_eq!(single_sign_change(&[1.0, -1.0, 1.0], Pos, Neg), Err(2));
        assert_eq!(single_sign_change(&[1.0, 1.0, 1.0], Pos, Neg), Err(2));
        assert_eq!(single_sign_change(&[-1.0, 1.0], Pos, Neg), Err(0));
    }
}
