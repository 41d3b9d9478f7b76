use fracmax_core::multipliers::*;
use num_complex::Complex;
use proptest::prelude::*;

type C = Complex<f64>;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mtilde_of_linear_profile(alpha in 0.05f64..0.9, r in 0.1f64..10.0) {
        let m = MultiplierSpec::custom(|r| C::new(r, 0.0));
        let v = mtilde_radial(&m, alpha, r);
        let exact = r / (1.0 - alpha);
        prop_assert!((v.value.re - exact).abs() < 1e-6 * exact, "{} vs {exact}", v.value.re);
    }

    #[test]
    fn mtilde_of_quadratic_profile(alpha in 0.05f64..0.9, r in 0.1f64..4.0) {
        let m = MultiplierSpec::custom(|r| C::new(r * r, 0.0));
        let v = mtilde_radial(&m, alpha, r);
        let exact = r * r * (2.0 / (1.0 - alpha) - 1.0 / (2.0 - alpha));
        prop_assert!((v.value.re - exact).abs() < 1e-6 * exact, "{} vs {exact}", v.value.re);
    }

    #[test]
    fn mtilde_commutes_with_dilation(alpha in 0.1f64..0.9, r in 0.2f64..4.0, s in 0.5f64..2.0) {
        let m = MultiplierSpec::limited_decay(1.5);
        let direct = mtilde_radial(&m.dilated(s), alpha, r).value;
        let moved = mtilde_radial(&m, alpha, s * r).value;
        prop_assert!((direct - moved).norm() <= 1e-6 * (1.0 + moved.norm()));
    }

    #[test]
    fn dilated_evaluation(r in 0.0f64..20.0, s in 0.1f64..10.0) {
        let m = MultiplierSpec::slow_decay(1.0, 0.5);
        prop_assert_eq!(m.dilated(s).radial(r), m.radial(s * r));
    }

    #[test]
    fn radial_table_interpolates(r in 0.5f64..4.0) {
        let m = MultiplierSpec::oscillatory(0.5, 1.0);
        let t = RadialTable::build(&m, 0.5, 4.0, 1e-4);
        let v = t.get(r).unwrap();
        prop_assert!((v - m.radial(r)).norm() < 1e-6);
    }
}

#[test]
fn mtilde_of_constant_vanishes() {
    let m = MultiplierSpec::constant(3.0);
    for r in [0.1, 1.0, 7.0] {
        assert!(mtilde_radial(&m, 0.5, r).value.norm() < 1e-12);
    }
}

#[test]
fn band_bump_vanishes_off_its_annulus() {
    let m = MultiplierSpec::band_bump();
    for r in [0.0, 0.1, 0.2, 8.0, 100.0] {
        assert_eq!(m.radial(r), C::new(0.0, 0.0));
    }
    assert!(m.vanishes_near_origin());
}
