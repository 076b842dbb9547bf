//! Randomised invariants of the special functions, series and operators.

use std::f64::consts::PI;

use moderf::cli::table::format_real;
use moderf::picard::apply_tau;
use moderf::series::{phi1, psi};
use moderf::shooting::integrate_ivp;
use moderf::specfun::{dawson, erf, erfc_erfi_product, erfc_scaled, erfi};
use moderf::{ApproxOrder, Delta, GridFunction, QuadratureSpec, ShootingConfig};
use proptest::prelude::*;

fn delta(d: f64) -> Delta {
    Delta::new(d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn erf_is_odd(x in -6.0f64..6.0) {
        prop_assert_eq!(erf(-x), -erf(x));
    }

    #[test]
    fn erf_increasing(x in -4.0f64..4.0, gap in 1e-6f64..1.0) {
        prop_assert!(erf(x + gap) > erf(x));
    }

    #[test]
    fn erfc_scaled_decreasing(x in 0.0f64..50.0, gap in 1e-4f64..1.0) {
        prop_assert!(erfc_scaled(x + gap).unwrap() < erfc_scaled(x).unwrap());
    }

    #[test]
    fn erf_bounded(x in -30.0f64..30.0) {
        prop_assert!(erf(x).abs() <= 1.0);
    }

    #[test]
    fn erfi_dawson_identity(x in 0.0f64..5.0) {
        let lhs = erfi(x).unwrap() * (-x * x).exp();
        prop_assert!((lhs - 2.0 / PI.sqrt() * dawson(x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn product_finite_and_positive(x in 0.0f64..50.0) {
        let p = erfc_erfi_product(x).unwrap();
        prop_assert!(p.is_finite() && p >= 0.0);
    }

    #[test]
    fn real_formatting_round_trips(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
        let s = format_real(v);
        prop_assert_eq!(s.parse::<f64>().unwrap(), v);
    }

    #[test]
    fn zeroth_partial_sum_is_erf(d in -0.99f64..3.0, x in 0.0f64..8.0) {
        let spec = QuadratureSpec::default();
        prop_assert_eq!(psi(delta(d), ApproxOrder::Zero, x, &spec).unwrap(), erf(x));
        prop_assert_eq!(psi(delta(0.0), ApproxOrder::One, x, &spec).unwrap(), erf(x));
    }

    #[test]
    fn first_partial_sum_is_linear_in_delta(d in -0.99f64..3.0, x in 0.0f64..8.0) {
        let spec = QuadratureSpec::default();
        let v = psi(delta(d), ApproxOrder::One, x, &spec).unwrap();
        prop_assert!((v - erf(x) - d * phi1(x)).abs() < 1e-15);
    }
}

/// Arbitrary members of K sampled on `[0, 10]` with step 0.1: values in `[0, 1]`.
fn member_of_k() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.0f64..=1.0, 101)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tau_maps_k_into_k(values in member_of_k(), d in 0.0f64..0.2037) {
        let h = GridFunction::from_values(10.0, 0.1, values).unwrap();
        let g = apply_tau(&h, delta(d)).unwrap();
        let v = g.values();
        prop_assert_eq!(v[0], 0.0);
        prop_assert!(v.iter().all(|&y| (0.0..=1.0 + 1e-12).contains(&y)), "{v:?}");
        prop_assert!(v.windows(2).all(|w| w[1] >= w[0]), "{v:?}");
    }

    #[test]
    fn tau_at_zero_ignores_input(values in proptest::collection::vec(0.0f64..=1.0, 1001)) {
        let h = GridFunction::from_values(10.0, 0.01, values).unwrap();
        let erf_grid = GridFunction::from_fn(10.0, 0.01, erf).unwrap();
        let g = apply_tau(&h, delta(0.0)).unwrap();
        prop_assert!(g.sup_distance(&erf_grid).unwrap() < 10.0 * 0.01 * 0.01);
    }

    #[test]
    fn ivp_linear_in_slope_at_zero_delta(slope in 0.05f64..5.0) {
        let y = integrate_ivp(delta(0.0), slope, &ShootingConfig::default()).unwrap();
        for (x, v) in y.iter() {
            let exact = slope * PI.sqrt() / 2.0 * erf(x);
            prop_assert!((v - exact).abs() < 1e-8 * slope.max(1.0), "x = {x}");
        }
    }

    #[test]
    fn shooting_map_increasing_at_zero_delta(s in 0.1f64..5.0, gap in 1e-3f64..1.0) {
        let cfg = ShootingConfig::default();
        let f = |s: f64| integrate_ivp(delta(0.0), s, &cfg).unwrap().last() - 1.0;
        prop_assert!(f(s + gap) > f(s));
    }
}
