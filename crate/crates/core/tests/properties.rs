use chemflood::models::{AdsorptionModel, Partial};
use chemflood::scalar::{lower_convex_envelope, solve_scalar_riemann, upper_concave_envelope};
use chemflood::{chord_coefficients, FluxModel64, ModelSet64};
use proptest::prelude::*;

fn corey() -> impl Strategy<Value = FluxModel64> {
    (1.0f64..4.0, 1.0f64..4.0, 0.5f64..3.0, -1.0f64..1.0).prop_map(|(nw, no, mu0, mu1)| FluxModel64::corey(nw, no, vec![mu0, mu1.abs() * 0.4]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn analytic_partials_match_finite_differences(flux in corey(), s in 0.05f64..0.95, c in 0.05f64..0.95) {
        for (which, tol) in [(Partial::Fs, 1e-6), (Partial::Fc, 1e-6), (Partial::Fss, 1e-4)] {
            let exact = flux.eval(s, c, which).unwrap();
            let fd = flux.fd_partial(s, c, which);
            prop_assert!((exact - fd).abs() <= tol * (1.0 + exact.abs()), "{which:?}: {exact} vs {fd}");
        }
    }

    #[test]
    fn langmuir_chord_lies_below_isotherm(amax in 0.1f64..5.0, k in 0.1f64..10.0, c in 0.001f64..0.999) {
        let m = ModelSet64::boomerang().with_adsorption(AdsorptionModel::Langmuir { amax, k });
        let ch = chord_coefficients(&m).unwrap();
        prop_assert!(ch.line(c) - m.adsorption.a(c) < 0.0);
    }

    #[test]
    fn upper_envelope_is_a_concave_majorant(amp in 0.0f64..4.0, c in 0.0f64..1.0, lo in 0.0f64..0.5, span in 0.05f64..0.5) {
        let flux = FluxModel64::boomerang(amp);
        let hi = lo + span;
        let env = upper_concave_envelope(&flux, c, lo, hi, 1024).unwrap();
        prop_assert!((env.value(lo) - flux.f(lo, c)).abs() < 1e-12);
        prop_assert!((env.value(hi) - flux.f(hi, c)).abs() < 1e-12);
        let mut last = f64::INFINITY;
        for i in 0..=200 {
            let s = lo + span * i as f64 / 200.0;
            prop_assert!(env.value(s) >= flux.f(s, c) - 1e-10);
            let d = env.slope(s);
            prop_assert!(d <= last + 1e-8);
            last = d;
        }
    }

    #[test]
    fn lower_envelope_is_a_convex_minorant(c in 0.0f64..1.0, lo in 0.3f64..0.6, span in 0.05f64..0.4) {
        let flux = FluxModel64::boomerang(4.0);
        let hi = lo + span;
        let env = lower_convex_envelope(&flux, c, lo, hi, 1024).unwrap();
        let mut last = f64::NEG_INFINITY;
        for i in 0..=200 {
            let s = lo + span * i as f64 / 200.0;
            prop_assert!(env.value(s) <= flux.f(s, c) + 1e-10);
            let d = env.slope(s);
            prop_assert!(d >= last - 1e-8);
            last = d;
        }
    }

    #[test]
    fn fan_profile_is_monotone(sl in 0.0f64..1.0, sr in 0.0f64..1.0, c in 0.0f64..1.0) {
        let fan = solve_scalar_riemann(&FluxModel64::boomerang(4.0), c, sl, sr).unwrap();
        let rows = fan.sample_rows(-0.5, 4.0, 400);
        let dir = (sr - sl).signum();
        for w in rows.windows(2) {
            prop_assert!(dir * (w[1].1 - w[0].1) >= -1e-12);
        }
        prop_assert_eq!(rows[0].1, sl);
        prop_assert_eq!(rows[rows.len() - 1].1, sr);
    }
}
