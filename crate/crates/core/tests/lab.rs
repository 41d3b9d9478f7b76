use fracmax_core::dilation::{distance_integral, BlockSet, DilationSet};
use fracmax_core::frames::GridFunction;
use fracmax_core::lab::*;
use fracmax_core::multipliers::MultiplierSpec;
use num_complex::Complex;
use proptest::prelude::*;

fn gaussian(n: usize, extent: f64) -> GridFunction<f64> {
    GridFunction::from_fn_1d(n, extent, |x: f64| Complex::new((-x * x).exp(), 0.0)).unwrap()
}

fn points() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1.0f64..2.0, 1..8).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn block_mass_is_the_distance_integral(pts in points(), beta in 0.1f64..0.45) {
        let b: BlockSet<f64> = BlockSet::from_points(0, &pts);
        let h = HBlock::build(&b, beta, 1.0 / 32.0, 3).unwrap();
        let exact = distance_integral(&b, 2.0 * beta).unwrap().value;
        prop_assert!(h.weights.iter().all(|w| *w >= 0.0));
        prop_assert!((h.mass() - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn maximal_function_grows_with_the_set(pts in points(), extra in points()) {
        let f = gaussian(128, 8.0);
        let m = MultiplierSpec::limited_decay(1.0);
        let small = DilationSet::explicit(pts.clone());
        let big = DilationSet::explicit(pts.into_iter().chain(extra).collect());
        let a = maximal_function(&f, &m, &small, 16, (0, 0)).unwrap();
        let b = maximal_function(&f, &m, &big, 16, (0, 0)).unwrap();
        for (x, y) in a.function.samples.iter().zip(&b.function.samples) {
            prop_assert!(y.re >= x.re);
        }
    }

    #[test]
    fn maximal_function_is_a_pointwise_sup(pts in points()) {
        let f = gaussian(128, 8.0);
        let m = MultiplierSpec::oscillatory(0.5, 1.0);
        let out = maximal_function(&f, &m, &DilationSet::explicit(pts.clone()), 16, (0, 0)).unwrap();
        let mut sup = vec![0.0f64; 128];
        for t in pts {
            let g = apply_dilated_multiplier(&f, &m, t).unwrap();
            for (s, v) in sup.iter_mut().zip(&g.samples) {
                *s = s.max(v.norm());
            }
        }
        for (x, s) in out.function.samples.iter().zip(&sup) {
            prop_assert!((x.re - s).abs() <= 1e-12 * (1.0 + s));
        }
    }

    #[test]
    fn dilated_multiplier_is_linear(a in -2.0f64..2.0, t in 0.1f64..8.0) {
        let f = gaussian(64, 8.0);
        let g = GridFunction::from_fn_1d(64, 8.0, |x: f64| Complex::new(0.0, (-(x - 1.0).powi(2)).exp())).unwrap();
        let m = MultiplierSpec::band_bump();
        let mut sum = f.clone();
        for (s, v) in sum.samples.iter_mut().zip(&g.samples) {
            *s += v * a;
        }
        let lhs = apply_dilated_multiplier(&sum, &m, t).unwrap();
        let tf = apply_dilated_multiplier(&f, &m, t).unwrap();
        let tg = apply_dilated_multiplier(&g, &m, t).unwrap();
        for i in 0..64 {
            let rhs = tf.samples[i] + tg.samples[i] * a;
            prop_assert!((lhs.samples[i] - rhs).norm() < 1e-12);
        }
    }
}

#[test]
fn square_functional_scales_quadratically() {
    let f = gaussian(128, 4.0);
    let mut f2 = f.clone();
    for s in f2.samples.iter_mut() {
        *s *= 3.0;
    }
    let m = MultiplierSpec::band_bump();
    let w = HWeights::build(&DilationSet::lacunary(), 0.3, (-2, 1), PathResolution::default()).unwrap();
    let a = square_functional(&f, &m, 0.45, &w).unwrap();
    let b = square_functional(&f2, &m, 0.45, &w).unwrap();
    for (x, y) in a.function.samples.iter().zip(&b.function.samples) {
        assert!((y.re - 9.0 * x.re).abs() <= 1e-10 * (1.0 + y.re));
    }
}
