use chemflood::connect::*;
use chemflood::twave::*;
use chemflood::*;

fn skewed() -> ModelSet64 {
    ModelSet64::boomerang().with_flux(FluxModel64::corey(2.0, 2.0, vec![1.0, 4.5, -4.0]))
}

#[test]
fn mismatch_changes_sign_once_in_kappa() {
    let m = ModelSet64::boomerang();
    let mut sol = ConnectionSolver::new(&m, SystemKind::NonEqAdsorption);
    let v = sol.window().unwrap().at(0.5);
    let signs: Vec<bool> = (0..60)
        .map(|i| {
            let k = 10f64.powf(-3.0 + 6.0 * i as f64 / 59.0);
            sol.mismatch(v, k).unwrap() > 0.0
        })
        .collect();
    assert!(signs[0] && !signs[59]);
    assert_eq!(signs.windows(2).filter(|w| w[0] != w[1]).count(), 1);
}

#[test]
fn connection_is_increasing_and_conservative() {
    let m = ModelSet64::boomerang();
    let mut sol = ConnectionSolver::new(&m, SystemKind::NonEqAdsorption);
    let w = sol.window().unwrap();
    let r = sol.find_kappa_for_v(w.at(0.5)).unwrap();
    assert!((r.kappa - 1.3655).abs() < 1e-3, "{}", r.kappa);
    assert!(r.mismatch.abs() < 1e-9);
    assert!(r.launch_check < 1e-8);
    assert!(r.samples_with_slopes().iter().all(|p| p.2 > 0.0));
    let (r1, r2) = r.rh_residuals(&m);
    assert!(r1.abs() < 1e-12 && r2.abs() < 1e-12);
    assert!(sol.integral_residual(&r).unwrap() < 1e-6);
}

#[test]
fn kappa_does_not_depend_on_matching_section() {
    let m = ModelSet64::boomerang();
    let mut a = ConnectionSolver::new(&m, SystemKind::NonEqAdsorption);
    let v = a.window().unwrap().at(0.4);
    let ka = a.find_kappa_for_v(v).unwrap().kappa;
    let kb = ConnectionSolver::new(&m, SystemKind::NonEqAdsorption).with_c0(0.25).find_kappa_for_v(v).unwrap().kappa;
    assert!(((ka - kb) / ka).abs() < 1e-8, "{ka} {kb}");
}

#[test]
fn v_and_kappa_invert_each_other() {
    let m = ModelSet64::boomerang();
    let mut sol = ConnectionSolver::new(&m, SystemKind::NonEqAdsorption);
    let w = sol.window().unwrap();
    let v = w.at(0.3);
    let k = sol.find_kappa_for_v(v).unwrap().kappa;
    let back = sol.find_v_for_kappa(k).unwrap();
    assert!((back.v - v).abs() < 1e-8 * w.width());
}

#[test]
fn skewed_model_saturates_below_critical_ratio() {
    let m = skewed();
    let mut sol = ConnectionSolver::new(&m, SystemKind::NonEqAdsorption);
    let w = sol.window().unwrap();
    assert_eq!(w.v_max_kind, VmaxKind::II_IV);
    let kc = sol.kappa_crit().unwrap();
    assert!((kc - 0.598).abs() < 1e-3, "{kc}");
    let low = sol.find_v_for_kappa(0.1).unwrap();
    assert!(low.at_window_boundary);
    assert_eq!(low.v, w.v_max);
    let high = sol.find_v_for_kappa(10.0).unwrap();
    assert!(!high.at_window_boundary && high.v < w.v_max);
}

#[test]
fn diffusion_system_has_its_own_curve() {
    let m = skewed();
    let mut sol = ConnectionSolver::new(&m, SystemKind::CapillaryDiffusion);
    let w = sol.window().unwrap();
    let k1 = sol.find_kappa_for_v(w.at(0.1)).unwrap().kappa;
    let k2 = sol.find_kappa_for_v(w.at(0.9)).unwrap().kappa;
    assert!(k1 > k2);
    let kc = sol.kappa_crit().unwrap();
    assert!(kc > 0.0 && kc < k2);
}

#[test]
fn sweep_is_monotone() {
    let m = ModelSet64::boomerang();
    let curve = sweep_curve(&m, 12, Spacing::UniformV).unwrap();
    assert_eq!(curve.samples.len(), 12);
    for w in curve.samples.windows(2) {
        assert!(w[1].v > w[0].v && w[1].kappa < w[0].kappa);
    }
    assert_eq!(curve.kappa_crit, 0.0);
}
