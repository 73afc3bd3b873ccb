mod common;

use common::*;
use geneval_core::metrics::{
    frechet_distance, inception_score_splits, kid_subset_estimate, precision_recall,
    PolynomialKernel,
};
use geneval_core::{
    merge_sets, trace_sqrt_product, validate_probability_rows, BackboneNaming, EmbeddingSet,
    PrSpec, ProbabilitySet, SplitSpec,
};
use ndarray::Array2;
use proptest::prelude::*;

fn matrix(rows: std::ops::RangeInclusive<usize>, cols: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Array2<f64>> {
    (rows, cols).prop_flat_map(|(n, d)| {
        prop::collection::vec(-10.0f64..10.0, n * d)
            .prop_map(move |v| Array2::from_shape_vec((n, d), v).unwrap())
    })
}

fn psd_pair() -> impl Strategy<Value = (Array2<f64>, Array2<f64>)> {
    (1usize..8, 1usize..12, 1usize..12, any::<u64>()).prop_map(|(d, ra, rb, seed)| {
        let mut rng = rng(seed);
        (random_psd(&mut rng, d, ra), random_psd(&mut rng, d, rb))
    })
}

fn stochastic(n: std::ops::Range<usize>, c: std::ops::Range<usize>) -> impl Strategy<Value = Array2<f64>> {
    (n, c, any::<u64>(), any::<bool>())
        .prop_map(|(n, c, seed, peaked)| random_probabilities(&mut rng(seed), n, c, peaked))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_sqrt_is_symmetric((a, b) in psd_pair()) {
        let ab = trace_sqrt_product(a.view(), b.view()).unwrap();
        let ba = trace_sqrt_product(b.view(), a.view()).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-8 * ab.abs().max(1.0), "{} vs {}", ab, ba);
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn trace_sqrt_of_a_with_itself_is_its_trace((a, _) in psd_pair()) {
        let t = trace_sqrt_product(a.view(), a.view()).unwrap();
        let tr = a.diag().sum();
        prop_assert!((t - tr).abs() <= 1e-8 * tr.max(1.0), "{} vs {}", t, tr);
    }

    #[test]
    fn trace_sqrt_is_homogeneous((a, b) in psd_pair(), c in 0.1f64..10.0) {
        let base = trace_sqrt_product(a.view(), b.view()).unwrap();
        let scaled = trace_sqrt_product((&a * c).view(), b.view()).unwrap();
        prop_assert!((scaled - c.sqrt() * base).abs() <= 1e-8 * scaled.max(1.0));
    }

    #[test]
    fn frechet_scales_quadratically(x in matrix(3..=20, 1..=5), shift in -3.0f64..3.0, c in 0.2f64..5.0) {
        let naming = BackboneNaming::default();
        let y = x.mapv(|v| v * 0.9 + shift);
        let a = frechet_distance(&set(x.clone(), "base"), &set(y.clone(), "base"), &naming, 0.0).unwrap().value;
        let b = frechet_distance(&set(&x * c, "base"), &set(&y * c, "base"), &naming, 0.0).unwrap().value;
        prop_assert!((b - c * c * a).abs() <= 1e-6 * (c * c * a).max(1e-9), "{} vs {}", b, c * c * a);
    }

    #[test]
    fn merge_is_associative(a in matrix(1..=5, 3..=3), b in matrix(1..=5, 3..=3), c in matrix(1..=5, 3..=3)) {
        let s = |m: Array2<f64>, label: &str| EmbeddingSet::new(m, "base", label).unwrap();
        let (a, b, c) = (s(a, "a"), s(b, "b"), s(c, "c"));
        let left = merge_sets(&merge_sets(&a, &b).unwrap(), &c).unwrap();
        let right = merge_sets(&a, &merge_sets(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn validator_accepts_exactly_valid_rows(p in stochastic(1..12, 2..8), fault in 0usize..5, at in any::<prop::sample::Index>()) {
        let mut p = p;
        let (n, c) = p.dim();
        let cell = at.index(n * c);
        let (i, j) = (cell / c, cell % c);
        match fault {
            0 => {}
            1 => p[(i, j)] = f64::NAN,
            2 => p[(i, j)] = -0.25,
            3 => p[(i, j)] += 0.01,
            _ => p[(i, j)] = f64::INFINITY,
        }
        let report = validate_probability_rows(p.view());
        prop_assert_eq!(report.is_ok(), fault == 0, "{:?}", report);
        prop_assert_eq!(ProbabilitySet::new(p, "base", "x").is_ok(), fault == 0);
    }

    #[test]
    fn kid_is_rotation_invariant(seed in any::<u64>(), n in 2usize..20, d in 1usize..6) {
        let mut rng = rng(seed);
        let x = normal_matrix(&mut rng, n, d);
        let y = normal_matrix(&mut rng, n, d) + 0.5;
        let q = random_rotation(&mut rng, d);
        let k = PolynomialKernel::standard(d);
        let a = kid_subset_estimate(x.view(), y.view(), &k);
        let b = kid_subset_estimate(x.dot(&q).view(), y.dot(&q).view(), &k);
        prop_assert!((a - b).abs() <= 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn pr_coverage_grows_with_k(seed in any::<u64>(), nr in 5usize..25, ng in 5usize..25) {
        let mut rng = rng(seed);
        let real = set(integer_points(&mut rng, nr, 0, 15), "base");
        let gen = set(integer_points(&mut rng, ng, 3, 18), "base");
        let mut last = (0.0, 0.0);
        for k in 1..4 {
            let (p, r) = precision_recall(&real, &gen, &PrSpec { neighborhood_k: k }).unwrap();
            prop_assert!(p.value >= last.0 && r.value >= last.1);
            prop_assert!((0.0..=1.0).contains(&p.value) && (0.0..=1.0).contains(&r.value));
            last = (p.value, r.value);
        }
    }

    #[test]
    fn inception_bounds_and_row_order(p in stochastic(2..60, 2..20), seed in any::<u64>()) {
        let c = p.ncols() as f64;
        let one = SplitSpec { split_count: 1, seed: None };
        let base = inception_score_splits(&ProbabilitySet::new(p.clone(), "base", "x").unwrap(), &one).unwrap()[0];
        prop_assert!((1.0..=c).contains(&base));
        let mut order: Vec<usize> = (0..p.nrows()).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng(seed));
        let shuffled = p.select(ndarray::Axis(0), &order);
        let again = inception_score_splits(&ProbabilitySet::new(shuffled, "base", "x").unwrap(), &one).unwrap()[0];
        prop_assert_eq!(base.to_bits(), again.to_bits());
    }
}
