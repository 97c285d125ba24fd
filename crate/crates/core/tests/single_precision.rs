use chemflood::scalar::solve_scalar_riemann;
use chemflood::twave::{velocity_window, SystemKind};
use chemflood::connect::ConnectionSolver;
use chemflood::{ModelSet32, Tolerances};

#[test]
fn f32_pipeline_runs() {
    let m = ModelSet32::boomerang();
    assert!(m.validate(128).unwrap().passed());
    let w = velocity_window(&m, &Tolerances::default()).unwrap();
    assert!((w.v_min - 0.698_757_3).abs() < 1e-4, "{}", w.v_min);
    assert!((w.v_max - 0.724_059_7).abs() < 1e-4, "{}", w.v_max);
    let fan = solve_scalar_riemann(&m.flux, 0.0, 1.0, 0.0).unwrap();
    assert_eq!(fan.elements.len(), 2);
    let r = ConnectionSolver::new(&m, SystemKind::NonEqAdsorption).find_kappa_for_v(w.at(0.5)).unwrap();
    assert!((r.kappa - 1.3655).abs() < 1e-2, "{}", r.kappa);
}
