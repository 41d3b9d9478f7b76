use fracmax_core::dilation::*;
use proptest::prelude::*;

fn points_in_block() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1.0f64..2.0, 1..12).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        v
    })
}

/// `∫_1^2 d(t,P)^{−1+a} dt` by the midpoint rule.
fn midpoint_distance_integral(pts: &[f64], a: f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    (0..n)
        .map(|k| {
            let t = 1.0 + (k as f64 + 0.5) * h;
            let d = pts.iter().map(|p| (t - p).abs()).fold(f64::INFINITY, f64::min);
            d.powf(a - 1.0) * h
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn distance_matches_brute_force(pts in points_in_block(), s in 0.5f64..2.5) {
        let b: BlockSet<f64> = BlockSet::from_points(0, &pts);
        let d = distance_to_set(s, &b).unwrap();
        let brute = pts.iter().map(|p| (s - p).abs()).fold(f64::INFINITY, f64::min);
        prop_assert!((d - brute).abs() < 1e-15);
    }

    #[test]
    fn covering_number_halving(pts in points_in_block(), k in 1i32..12) {
        let b: BlockSet<f64> = BlockSet::from_points(0, &pts);
        let delta = 2f64.powi(-k);
        let coarse = entropy_number(&b, delta).unwrap();
        let fine = entropy_number(&b, delta / 2.0).unwrap();
        prop_assert!(fine >= coarse);
        prop_assert!(fine <= 3 * coarse);
    }

    #[test]
    fn covering_number_of_separated_points(pts in points_in_block()) {
        let gap = pts.windows(2).map(|w| w[1] - w[0]).fold(1.0, f64::min);
        let b: BlockSet<f64> = BlockSet::from_points(0, &pts);
        let n = entropy_number(&b, gap / 4.0).unwrap();
        prop_assert!(n >= pts.len() as u64 && n <= 2 * pts.len() as u64);
    }

    #[test]
    fn union_covers_more(p in points_in_block(), q in points_in_block(), k in 1i32..10) {
        let delta = 2f64.powi(-k);
        let u = DilationSet::union(vec![DilationSet::explicit(p.clone()), DilationSet::explicit(q)]);
        let bu: BlockSet<f64> = u.rescaled_block(0).unwrap();
        let bp: BlockSet<f64> = DilationSet::explicit(p).rescaled_block(0).unwrap();
        prop_assert!(entropy_number(&bu, delta).unwrap() >= entropy_number(&bp, delta).unwrap());
    }

    #[test]
    fn rescaled_blocks_are_sorted_in_range(a in 0.3f64..3.0, j in 0i32..8) {
        let b: BlockSet<f64> = DilationSet::power_sequence(a).with_cap(2000).rescaled_block(-j).unwrap();
        prop_assert!(b.points.iter().all(|p| (1.0..=2.0).contains(p)));
        prop_assert!(b.points.windows(2).all(|w| w[0] < w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn distance_integral_matches_quadrature(pts in points_in_block(), a in 0.5f64..0.95) {
        let b: BlockSet<f64> = BlockSet::from_points(0, &pts);
        let exact = distance_integral(&b, a).unwrap();
        let quad = midpoint_distance_integral(&pts, a, 1 << 20);
        prop_assert!(exact.tail_finite && exact.tail == 0.0);
        prop_assert!((exact.value - quad).abs() < 2e-2 * exact.value, "{} vs {}", exact.value, quad);
    }
}

#[test]
fn lacunary_block_is_its_endpoints() {
    let b: BlockSet<f64> = DilationSet::lacunary().rescaled_block(5).unwrap();
    assert_eq!(b.points, vec![1.0, 2.0]);
    assert_eq!(entropy_number(&b, 0.3).unwrap(), 2);
}
