use proptest::prelude::*;

use polaron_harvest::cli::RunConfig;
use polaron_harvest::oracle::bogoliubov_point;
use polaron_harvest::response::{self, assemble_state};
use polaron_harvest::special::{dawson, erf, erfc, erfcx, exp_neg_sq};
use polaron_harvest::units::DimensionlessParams;

fn base() -> (polaron_harvest::units::DerivedCondensate, DimensionlessParams) {
    RunConfig::default().setup.resolve().unwrap()
}

fn params(sigma: f64, omega: f64, l: f64) -> DimensionlessParams {
    let (_, p) = base();
    let t = p.t_bar;
    DimensionlessParams { sigma: sigma * t, omega_bar: omega / t, separation: l * t, ..p }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn observables_are_linear_in_coupling(s in 0.1f64..3.0, w in 0.0f64..5.0, l in 0.0f64..12.0, c in 0.01f64..100.0) {
        let p = params(s, w, l);
        let a = response::evaluate_fast(&p).unwrap();
        let b = response::evaluate_fast(&p.with_coupling(c * p.lambda_bar_sq)).unwrap();
        for (u, v) in [(a.l_term, b.l_term), (a.m_plus, b.m_plus), (a.m_minus_im, b.m_minus_im), (a.negativity, b.negativity)] {
            prop_assert!(rel(v, c * u) <= 1e-12, "{u} {v}");
        }
    }

    #[test]
    fn observables_are_scale_free(s in 0.1f64..3.0, w in 0.0f64..5.0, l in 0.0f64..12.0, k in 1e-3f64..1e3) {
        let p = params(s, w, l);
        let a = response::evaluate_fast(&p).unwrap();
        let b = response::evaluate_fast(&p.rescale_lengths(k)).unwrap();
        prop_assert!(rel(b.l_term, a.l_term) <= 1e-12);
        prop_assert!((b.m_abs - a.m_abs).abs() <= 1e-12 * a.m_abs.max(a.l_term));
    }

    #[test]
    fn negativity_and_signaling_bounds(s in 0.1f64..3.0, w in 0.0f64..5.0, l in 0.0f64..12.0) {
        let r = response::evaluate(&params(s, w, l)).unwrap();
        prop_assert!(r.l_term > 0.0);
        prop_assert!(r.negativity >= 0.0 && r.negativity <= r.m_abs);
        prop_assert!((0.0..=1.0).contains(&r.signaling));
        prop_assert!(r.l_cross.abs() <= r.l_term * (1.0 + 1e-9));
    }

    #[test]
    fn x_state_negativity_matches_formula(s in 0.1f64..3.0, w in 0.5f64..5.0, l in 0.0f64..12.0) {
        let p = params(s, w, l);
        let raw = response::evaluate_fast(&p).unwrap();
        // keep the state perturbative: ℒ = 1e-3
        let r = response::evaluate_fast(&p.with_coupling(p.lambda_bar_sq * 1e-3 / raw.l_term)).unwrap();
        let state = assemble_state(r.l_term, r.l_term, 0.0, r.m()).unwrap();
        prop_assert!((state.pt_negativity() - r.negativity).abs() <= 1e-10 * r.l_term.max(1e-30));
    }

    #[test]
    fn erf_family(x in -8.0f64..8.0) {
        prop_assert!((erf(x) + erfc(x) - 1.0).abs() <= 1e-14);
        prop_assert_eq!(erf(-x), -erf(x));
        prop_assert_eq!(dawson(-x), -dawson(x));
        if x >= 0.0 {
            prop_assert!(rel(erfcx(x) * exp_neg_sq(x), erfc(x)) <= 1e-14);
        }
    }

    #[test]
    fn bogoliubov_normalization(log_kxi in -3.0f64..3.0) {
        let (cond, _) = base();
        let b = bogoliubov_point(10f64.powf(log_kxi) / cond.xi, &cond).unwrap();
        prop_assert!((b.u * b.u - b.v * b.v - 1.0).abs() <= 1e-12);
        prop_assert!(b.v <= 0.0);
    }
}
