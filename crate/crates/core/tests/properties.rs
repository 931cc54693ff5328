use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

use rmflat::counterex::{cauchy_binet_check, gn_rejects_symmetric, rank_criterion, GnInstance};
use rmflat::f2::{
    count_flats, enumerate_flats, independent_hyperplanes, normalize_to_coordinates, sample_flat, sample_full_rank,
};
use rmflat::flattest::{check_monotone, rej_exact, rej_gn_exact, run_flat_test};
use rmflat::gowers::gowers_exact;
use rmflat::ratio::{frac, pow2};
use rmflat::rmcode::delta_exact;
use rmflat::sewing::{bad_fraction, check_intersection_agreement, HyperplaneWitness};
use rmflat::{seeded_rng, AffineMap, BooleanFunction, F2Mat, F2Vec, Hyperplane, RmCode};

fn random_fn(n: usize, rng: &mut impl Rng) -> BooleanFunction {
    BooleanFunction::from_fn(n, |_| rng.gen())
}

fn random_invertible(n: usize, rng: &mut impl Rng) -> AffineMap {
    let m = sample_full_rank(n, n, rng);
    AffineMap::new(m, F2Vec::from_bits(rng.gen::<u64>() & ((1 << n) - 1), n)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_flats_are_well_formed(seed in any::<u64>(), n in 1usize..=12, kf in 0.0f64..=1.0) {
        let k = (n as f64 * kf).round() as usize;
        let flat = sample_flat(n, k, &mut seeded_rng(seed)).unwrap();
        prop_assert_eq!(flat.dim(), k);
        prop_assert_eq!(flat.basis().rank(), k);
        let pts: HashSet<u64> = flat.points().into_iter().collect();
        prop_assert_eq!(pts.len(), 1 << k);
        prop_assert!(pts.iter().all(|&p| p < 1 << n && flat.contains(p)));
    }

    #[test]
    fn rank_is_bounded(rows in proptest::collection::vec(any::<u64>(), 0..10), ncols in 1usize..=64) {
        let mask = if ncols == 64 { u64::MAX } else { (1 << ncols) - 1 };
        let m = F2Mat::from_rows(rows.iter().map(|r| r & mask).collect(), ncols);
        prop_assert!(m.rank() <= m.nrows().min(ncols));
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn enumerated_flats_match_count(n in 1usize..=6, kf in 0.0f64..=1.0) {
        let k = (n as f64 * kf).round() as usize;
        let flats: Vec<_> = enumerate_flats(n, k).unwrap().collect();
        let keys: HashSet<_> = flats.iter().map(|f| f.canonical_key()).collect();
        prop_assert_eq!(keys.len(), flats.len());
        prop_assert_eq!(num_bigint::BigUint::from(flats.len()), count_flats(n, k).unwrap());
    }

    #[test]
    fn enough_distinct_hyperplanes_contain_independent_ones(seed in any::<u64>(), n in 2usize..=8, want in 1usize..=4) {
        prop_assume!(want <= n);
        let mut rng = seeded_rng(seed);
        let size = rng.gen_range((1usize << want) - 1..=(1 << want) + 8);
        let mut all = Hyperplane::all(n);
        prop_assume!(size <= all.len());
        all.shuffle(&mut rng);
        let hs = &all[..size];
        let picked = independent_hyperplanes(hs, want).unwrap();
        prop_assert_eq!(picked.len(), want);
        let rows: Vec<u64> = picked.iter().map(|&i| hs[i].linear().bits()).collect();
        prop_assert_eq!(F2Mat::from_rows(rows, n).rank(), want);
    }

    #[test]
    fn normalization_is_a_bijection_sending_planes_to_coordinates(seed in any::<u64>(), n in 1usize..=8, l in 1usize..=8) {
        prop_assume!(l <= n);
        let mut rng = seeded_rng(seed);
        let lin = sample_full_rank(l, n, &mut rng);
        let hs: Vec<Hyperplane> = lin
            .row_bits()
            .iter()
            .map(|&r| Hyperplane::new(F2Vec::from_bits(r, n), rng.gen()).unwrap())
            .collect();
        let t = normalize_to_coordinates(&hs).unwrap();
        let image: HashSet<u64> = (0..1u64 << n).map(|p| t.apply(p)).collect();
        prop_assert_eq!(image.len(), 1 << n);
        for (i, h) in hs.iter().enumerate() {
            for p in 0..1u64 << n {
                prop_assert_eq!(h.contains(p), (t.apply(p) >> i) & 1 == 0);
            }
        }
    }

    #[test]
    fn invertible_maps_preserve_degree(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = seeded_rng(seed);
        let f = random_fn(n, &mut rng);
        let g = RmCode::new(rng.gen_range(0..=n), n).unwrap().random_codeword(&mut rng);
        let t = random_invertible(n, &mut rng);
        prop_assert_eq!(f.compose_affine(&t).unwrap().degree(), f.degree());
        prop_assert_eq!(g.compose_affine(&t).unwrap().degree(), g.degree());
    }

    #[test]
    fn table_files_round_trip(seed in any::<u64>(), n in 0usize..=10) {
        let f = random_fn(n, &mut seeded_rng(seed));
        prop_assert_eq!(BooleanFunction::parse_table_file(&f.to_table_file()).unwrap(), f);
    }

    #[test]
    fn distance_to_code_is_coset_invariant_and_at_most_half(seed in any::<u64>(), n in 1usize..=5, d in 0usize..=3) {
        prop_assume!(d <= n);
        let mut rng = seeded_rng(seed);
        let code = RmCode::new(d, n).unwrap();
        let f = random_fn(n, &mut rng);
        let g = code.random_codeword(&mut rng);
        let h = code.random_codeword(&mut rng);
        let delta = delta_exact(&code, &f).unwrap().distance;
        prop_assert!(delta <= frac(1, 2));
        prop_assert_eq!(delta_exact(&code, &f.xor(&g).unwrap()).unwrap().distance, delta);
        if g != h {
            prop_assert!(g.distance(&h).unwrap() >= pow2(-(d as i64)));
        }
    }

    #[test]
    fn codewords_always_pass(seed in any::<u64>(), n in 2usize..=6, d in 0usize..=3) {
        prop_assume!(d < n);
        let mut rng = seeded_rng(seed);
        let g = RmCode::new(d, n).unwrap().random_codeword(&mut rng);
        for k in d + 1..=n {
            prop_assert!(rej_exact(&g, d, k).unwrap().value().is_zero());
            prop_assert!(!run_flat_test(&g, d, k, &mut rng).unwrap().rejected);
        }
        prop_assert!(rej_gn_exact(&g, d + 1).unwrap().value().is_zero());
    }

    #[test]
    fn flat_test_verdict_matches_restriction(seed in any::<u64>(), n in 2usize..=8, d in 0usize..=3) {
        prop_assume!(d < n);
        let mut rng = seeded_rng(seed);
        let f = random_fn(n, &mut rng);
        let k = rng.gen_range(d + 1..=n);
        let out = run_flat_test(&f, d, k, &mut rng).unwrap();
        prop_assert_eq!(out.flat.dim(), k);
        prop_assert_eq!(out.rejected, f.restrict(&out.flat).unwrap().degree() > d as i32);
    }

    #[test]
    fn rejection_is_monotone_in_k(seed in any::<u64>(), n in 2usize..=5, d in 0usize..=3) {
        prop_assume!(d < n);
        let f = random_fn(n, &mut seeded_rng(seed));
        prop_assert!(check_monotone(&f, d).unwrap());
    }

    #[test]
    fn gowers_raw_is_in_unit_interval(seed in any::<u64>(), n in 1usize..=5, k in 1usize..=3) {
        let f = random_fn(n, &mut seeded_rng(seed));
        let raw = gowers_exact(&f, k).unwrap().raw;
        prop_assert!(raw >= BigRational::zero() && raw <= BigRational::one());
        prop_assert_eq!(raw.is_one(), f.degree() <= k as i32 - 1);
        prop_assert_eq!(raw, BigRational::one() - frac(2, 1) * rej_gn_exact(&f, k).unwrap().value());
    }

    #[test]
    fn bad_fraction_is_at_most_nine_over_k(seed in any::<u64>(), n in 3usize..=9, kf in 0.0f64..=1.0) {
        let mut rng = seeded_rng(seed);
        let mut all = Hyperplane::all(n);
        all.shuffle(&mut rng);
        let k = 1 + ((all.len() - 1) as f64 * kf) as usize;
        let tau = bad_fraction(&all[..k]).unwrap();
        prop_assert!(tau <= frac(9, k as u64));
    }

    #[test]
    fn intersection_agreement_is_symmetric(seed in any::<u64>(), n in 3usize..=6, d in 0usize..=2) {
        let mut rng = seeded_rng(seed);
        let f = random_fn(n, &mut rng);
        let all = Hyperplane::all(n);
        let code = RmCode::new(d, n - 1).unwrap();
        let w: Vec<_> = (0..2)
            .map(|_| {
                let h = *all.choose(&mut rng).unwrap();
                HyperplaneWitness::new(&f, h, code.random_codeword(&mut rng)).unwrap()
            })
            .collect();
        prop_assert_eq!(check_intersection_agreement(&w[0], &w[1], d), check_intersection_agreement(&w[1], &w[0], d));
    }

    #[test]
    fn symmetric_tuples_ignore_base_point(seed in any::<u64>(), n in 2usize..=16, d in 0usize..=4) {
        prop_assume!(d < n);
        let mut rng = seeded_rng(seed);
        let mask = (1u64 << n) - 1;
        let dirs = F2Mat::from_rows((0..=d).map(|_| rng.gen::<u64>() & mask).collect(), n);
        let a = GnInstance::new(F2Vec::from_bits(rng.gen::<u64>() & mask, n), dirs.clone()).unwrap();
        let b = GnInstance::new(F2Vec::from_bits(rng.gen::<u64>() & mask, n), dirs.clone()).unwrap();
        let ra = gn_rejects_symmetric(&a, d, n).unwrap();
        prop_assert_eq!(ra, gn_rejects_symmetric(&b, d, n).unwrap());
        prop_assert_eq!(ra, rank_criterion(&dirs));
    }

    #[test]
    fn cauchy_binet_three_way(seed in any::<u64>(), k in 1usize..=5, extra in 0usize..=6) {
        let mut rng = seeded_rng(seed);
        let n = k + extra;
        let m = F2Mat::from_rows((0..k).map(|_| rng.gen::<u64>() & ((1 << n) - 1)).collect(), n);
        prop_assert!(cauchy_binet_check(&m).unwrap());
    }
}
