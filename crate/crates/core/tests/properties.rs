mod common;

use common::random_path;
use dtw_mean::dtw::{alignment_cost, dtw_brute_force, dtw_squared, enumerate_paths, optimal_paths, path_count};
use dtw_mean::frechet::{component_minimizer, component_value, optimal_configuration};
use dtw_mean::path::validate_path;
use dtw_mean::solvers::seeded_rng;
use dtw_mean::{dtw, frechet_variation, Configuration, Sample, TimeSeries, WarpingPath};
use proptest::prelude::*;

fn series(max_len: usize, dim: usize) -> impl Strategy<Value = TimeSeries> {
    prop::collection::vec(-3.0f64..3.0, dim..=max_len * dim)
        .prop_map(move |mut v| {
            v.truncate(v.len() / dim * dim);
            TimeSeries::new(v.len() / dim, dim, v).unwrap()
        })
}

fn pair(max_len: usize) -> impl Strategy<Value = (TimeSeries, TimeSeries)> {
    (1usize..=3).prop_flat_map(move |d| (series(max_len, d), series(max_len, d)))
}

fn sample(max_count: usize, max_len: usize) -> impl Strategy<Value = Sample> {
    prop::collection::vec(series(max_len, 1), 1..=max_count).prop_map(|s| Sample::new(s).unwrap())
}

proptest! {
    #[test]
    fn dtw_is_symmetric((x, y) in pair(8)) {
        let a = dtw(&x, &y).unwrap();
        let b = dtw(&y, &x).unwrap();
        prop_assert!((a.squared - b.squared).abs() <= 1e-12 * a.squared.max(1.0));
        prop_assert_eq!(a.path.len(), a.path.points().len());
    }

    #[test]
    fn self_distance_is_zero(x in series(10, 2)) {
        let r = dtw(&x, &x).unwrap();
        prop_assert_eq!(r.distance, 0.0);
        prop_assert_eq!(r.path, WarpingPath::diagonal(x.len()).unwrap());
    }

    #[test]
    fn squared_variant_is_bitwise_equal((x, y) in pair(12)) {
        prop_assert_eq!(dtw(&x, &y).unwrap().squared.to_bits(), dtw_squared(&x, &y).unwrap().to_bits());
    }

    #[test]
    fn returned_path_is_valid_and_attains_the_distance((x, y) in pair(10)) {
        let r = dtw(&x, &y).unwrap();
        prop_assert!(validate_path(x.len(), y.len(), &r.path.one_based()));
        let cost = alignment_cost(&x, &y, &r.path).unwrap();
        prop_assert!((cost - r.squared).abs() <= 1e-12 * cost.max(1.0));
    }

    #[test]
    fn dtw_lower_bounds_every_path((x, y) in pair(8), seed in any::<u64>()) {
        let p = random_path(&mut seeded_rng(seed), x.len(), y.len());
        prop_assert!(dtw(&x, &y).unwrap().squared <= alignment_cost(&x, &y, &p).unwrap() + 1e-12);
    }

    #[test]
    fn dp_matches_enumeration((x, y) in pair(5)) {
        let fast = dtw(&x, &y).unwrap().squared;
        let slow = dtw_brute_force(&x, &y).unwrap().squared;
        prop_assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0));
    }

    #[test]
    fn optimal_path_search_matches_enumeration((x, y) in pair(5), tol in prop::sample::select(vec![1e-9, 0.05, 0.5])) {
        let found: Vec<WarpingPath> = optimal_paths(&x, &y, tol).unwrap().into_iter().map(|(p, _)| p).collect();
        let costed: Vec<(WarpingPath, f64)> = enumerate_paths(x.len(), y.len())
            .unwrap()
            .into_iter()
            .map(|p| { let c = alignment_cost(&x, &y, &p).unwrap(); (p, c) })
            .collect();
        let min = costed.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let slack = if min == 0.0 { 1e-12 } else { tol * min };
        let mut expected: Vec<WarpingPath> = costed.into_iter().filter(|c| c.1 <= min + slack).map(|c| c.0).collect();
        let mut found_sorted = found.clone();
        found_sorted.sort_by_key(|p| p.one_based());
        expected.sort_by_key(|p| p.one_based());
        prop_assert_eq!(found_sorted, expected);
    }

    #[test]
    fn path_count_matches_enumeration(m in 1usize..6, n in 1usize..6) {
        prop_assert_eq!(path_count(m, n), enumerate_paths(m, n).unwrap().len() as u128);
    }

    #[test]
    fn path_text_and_json_round_trip(m in 1usize..12, n in 1usize..12, seed in any::<u64>()) {
        let p = random_path(&mut seeded_rng(seed), m, n);
        let text: WarpingPath = p.to_string().parse().unwrap();
        prop_assert_eq!(&text, &p);
        let json: WarpingPath = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        prop_assert_eq!(&json, &p);
        prop_assert_eq!(p.transposed().transposed(), p);
    }

    #[test]
    fn frechet_is_the_lower_envelope(s in sample(4, 6), z in series(6, 1), seed in any::<u64>()) {
        let f = frechet_variation(&z, &s).unwrap().value;
        let opt = optimal_configuration(&z, &s).unwrap();
        let active = component_value(&z, &s, &opt).unwrap();
        prop_assert!((active - f).abs() <= 1e-12 * f.max(1.0));
        let mut rng = seeded_rng(seed);
        let other = Configuration::new(s.iter().map(|x| random_path(&mut rng, z.len(), x.len())).collect());
        prop_assert!(component_value(&z, &s, &other).unwrap() >= f - 1e-12 * f.max(1.0));
    }

    #[test]
    fn component_minimizer_minimizes(s in sample(4, 6), z in series(6, 1), seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let config = Configuration::new(s.iter().map(|x| random_path(&mut rng, z.len(), x.len())).collect());
        let m = component_minimizer(&s, &config).unwrap();
        let at_min = component_value(&m, &s, &config).unwrap();
        prop_assert!(at_min <= component_value(&z, &s, &config).unwrap() + 1e-12);
        // A minimizer step never increases the Fréchet function of an active configuration.
        let opt = optimal_configuration(&z, &s).unwrap();
        let next = component_minimizer(&s, &opt).unwrap();
        let (f0, f1) = (frechet_variation(&z, &s).unwrap().value, frechet_variation(&next, &s).unwrap().value);
        prop_assert!(f1 <= f0 + 1e-12 * f0.max(1.0));
    }
}
