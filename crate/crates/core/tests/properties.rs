use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crossed_commutant::commutant::{
    brute_force_sep, commutant_description, commutant_difference, find_noncommuting_witness,
    is_in_commutant, refined_sep, sep_set, SubalgebraView,
};
use crossed_commutant::crossed::{multiply, sigma_tilde_pow, CoefficientVector, CrossedElement};
use crossed_commutant::dynamics::{
    check_pi, cycle_classes, pi_profile, realize_pi, refined_cycle_classes,
    validate_refined_invariance, PiProfile, PieceMap,
};
use crossed_commutant::enumerate::{enumerate_refined_maps, lift_count, CaseSignature};
use crossed_commutant::instance::InstanceFile;
use crossed_commutant::partition::{build_real_line_partition, refine_real_line, PieceKind};
use crossed_commutant::random::{random_system, RandomConfig, RandomSystem};
use crossed_commutant::rational::{int, ratio, Rational};
use crossed_commutant::report::{build_report, Report};
use crossed_commutant::selftest::{random_member, random_non_member, relabelled_signature};

fn system() -> impl Strategy<Value = RandomSystem> {
    any::<u64>().prop_map(|seed| random_system(RandomConfig::default(), &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn small_system() -> impl Strategy<Value = RandomSystem> {
    any::<u64>().prop_map(|seed| {
        let config = RandomConfig { max_pieces: 7, max_levels: 1 };
        random_system(config, &mut ChaCha8Rng::seed_from_u64(seed))
    })
}

fn permutation(max_len: usize) -> impl Strategy<Value = PieceMap> {
    (1..=max_len).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|p| PieceMap::new(p).unwrap()))
}

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

fn vector(len: usize) -> impl Strategy<Value = CoefficientVector> {
    proptest::collection::vec(rational(), len).prop_map(CoefficientVector::new)
}

fn element(len: usize) -> impl Strategy<Value = CrossedElement> {
    proptest::collection::btree_map(-3i64..=3, vector(len), 0..=3)
        .prop_map(move |terms| CrossedElement::from_terms(len, terms).unwrap())
}

/// A permutation together with three elements and a scalar over it.
fn algebra_setup() -> impl Strategy<Value = (PieceMap, CrossedElement, CrossedElement, CrossedElement, Rational)> {
    permutation(7).prop_flat_map(|m| {
        let n = m.len();
        (Just(m), element(n), element(n), element(n), rational())
    })
}

/// An admissible profile: repeatedly pick `l` and add `l` children of
/// multiplier `l` until `p + 1` children are placed.
fn admissible_profile() -> impl Strategy<Value = PiProfile> {
    (1usize..=4, 0usize..=5, proptest::collection::vec(any::<u32>(), 6)).prop_map(|(k, p, picks)| {
        let mut left = p + 1;
        let mut pi: BTreeMap<usize, usize> = BTreeMap::new();
        let mut picks = picks.into_iter().cycle();
        while left > 0 {
            let l = 1 + picks.next().unwrap() as usize % left;
            *pi.entry(l).or_default() += l;
            left -= l;
        }
        PiProfile::new(k, p, pi)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn refinement_piece_count_and_children(
        n in 0usize..4,
        counts in proptest::collection::vec(0usize..3, 4),
    ) {
        let base = build_real_line_partition((0..n as i64).map(|t| int(10 * t)).collect()).unwrap();
        let mut additions = BTreeMap::new();
        let mut m = 0;
        for interval in 0..=n {
            let c = counts[interval];
            m += c;
            if c > 0 {
                let (l, r) = base.interval_bounds(interval).unwrap();
                additions.insert(interval, crossed_commutant::dynamics::interior_points(l, r, c));
            }
        }
        let refinement = refine_real_line(&base, &additions).unwrap();
        prop_assert_eq!(refinement.refined().len(), base.len() + 2 * m);
        let mut seen = BTreeSet::new();
        for b in 0..base.len() {
            for child in refinement.children_of(b) {
                prop_assert_eq!(refinement.parent_of()[child], b);
                prop_assert!(seen.insert(child));
            }
        }
        prop_assert_eq!(seen.len(), refinement.refined().len());
        prop_assert_eq!(refine_real_line(&base, &additions).unwrap(), refinement);
    }

    #[test]
    fn cycle_classes_partition_the_pieces(map in permutation(10)) {
        let cc = cycle_classes(&map);
        prop_assert_eq!(cc.classes.values().map(BTreeSet::len).sum::<usize>(), map.len());
        for (&k, class) in &cc.classes {
            let power = map.pow(k as i64);
            for &piece in class {
                prop_assert_eq!(power.apply(piece), piece);
                for j in 1..k {
                    prop_assert_ne!(map.pow(j as i64).apply(piece), piece);
                }
            }
        }
    }

    #[test]
    fn lifts_obey_lift_law_and_multiplier_bounds(sys in system()) {
        let inst = sys.last_step();
        let parent = inst.refinement.parent_of();
        for x in 0..parent.len() {
            prop_assert_eq!(parent[inst.refined_map.apply(x)], inst.base_map.apply(parent[x]));
        }
        let rcc = refined_cycle_classes(&inst.refinement, &inst.base_map, &inst.refined_map).unwrap();
        for x in 0..parent.len() {
            let k = rcc.base_period_of[parent[x]];
            prop_assert_eq!(rcc.refined_period_of[x], k * rcc.multiplier(x));
            if inst.refinement.base().is_real_line() {
                let p = inst.refinement.children_of_kind(parent[x], PieceKind::Point).len();
                match inst.refinement.refined().kind(x) {
                    PieceKind::Point => prop_assert!(rcc.multiplier(x) <= p.max(1)),
                    _ => prop_assert!(rcc.multiplier(x) <= p + 1),
                }
            }
        }
    }

    #[test]
    fn realized_profiles_round_trip(profile in admissible_profile()) {
        prop_assert!(check_pi(&profile).is_empty());
        let real = realize_pi(&profile).unwrap();
        let rcc = refined_cycle_classes(&real.refinement, &real.base_map, &real.refined_map).unwrap();
        prop_assert_eq!(pi_profile(&real.refinement, &rcc, &real.cycle).unwrap(), profile);
    }

    #[test]
    fn sigma_tilde_is_an_automorphism_action(
        (map, a, b) in permutation(8).prop_flat_map(|m| { let n = m.len(); (Just(m), vector(n), vector(n)) }),
        n in -6i64..=6,
        m in -6i64..=6,
    ) {
        let act = |v: &CoefficientVector, k| sigma_tilde_pow(v, &map, k).unwrap();
        prop_assert_eq!(act(&act(&a, m), n), act(&a, n + m));
        prop_assert_eq!(act(&a, 0), a.clone());
        prop_assert_eq!(act(&a.mul(&b).unwrap(), n), act(&a, n).mul(&act(&b, n)).unwrap());
        prop_assert_eq!(act(&a.add(&b).unwrap(), n), act(&a, n).add(&act(&b, n)).unwrap());
    }

    #[test]
    fn twisted_convolution_laws((map, f, g, h, c) in algebra_setup()) {
        let mul = |x: &CrossedElement, y: &CrossedElement| multiply(x, y, &map).unwrap();
        prop_assert_eq!(mul(&mul(&f, &g), &h), mul(&f, &mul(&g, &h)));
        prop_assert_eq!(mul(&f, &g.add(&h).unwrap()), mul(&f, &g).add(&mul(&f, &h)).unwrap());
        prop_assert_eq!(mul(&f.add(&g).unwrap(), &h), mul(&f, &h).add(&mul(&g, &h)).unwrap());
        prop_assert_eq!(mul(&f.scale(&c), &g), mul(&f, &g).scale(&c));
        let sums: BTreeSet<i64> = f.degrees().iter().flat_map(|a| g.degrees().into_iter().map(move |b| a + b)).collect();
        prop_assert!(mul(&f, &g).degrees().is_subset(&sums));
    }

    #[test]
    fn degree_zero_is_pointwise((map, a, b) in permutation(8).prop_flat_map(|m| { let n = m.len(); (Just(m), vector(n), vector(n)) })) {
        let (fa, fb) = (CrossedElement::from_function(a.clone()), CrossedElement::from_function(b.clone()));
        let product = multiply(&fa, &fb, &map).unwrap();
        prop_assert_eq!(&product, &multiply(&fb, &fa, &map).unwrap());
        prop_assert_eq!(product, CrossedElement::from_function(a.mul(&b).unwrap()));
    }

    #[test]
    fn sep_rule_matches_generators_and_divisibility(sys in system()) {
        let map = sys.finest_map();
        for view in sys.views() {
            prop_assert!(sep_set(&view, map, 0).unwrap().is_empty());
            for n in 1..=12i64 {
                let s = sep_set(&view, map, n).unwrap();
                prop_assert_eq!(&s, &brute_force_sep(&view, map, n).unwrap());
                prop_assert_eq!(&s, &sep_set(&view, map, -n).unwrap());
                for m in (1..=n).filter(|m| n % m == 0) {
                    prop_assert!(s.is_subset(&sep_set(&view, map, m).unwrap()));
                }
            }
        }
    }

    #[test]
    fn commutant_is_commutative_and_maximal(sys in system(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = sys.finest_map();
        let full = commutant_description(&SubalgebraView::full(sys.finest()), map).unwrap();
        let (a, b) = (random_member(&full, &mut rng), random_member(&full, &mut rng));
        prop_assert_eq!(multiply(&a, &b, map).unwrap(), multiply(&b, &a, map).unwrap());
        for view in sys.views() {
            let desc = commutant_description(&view, map).unwrap();
            if let Some(bad) = random_non_member(&desc, &mut rng) {
                prop_assert!(!is_in_commutant(&bad, &desc).unwrap().is_member());
                prop_assert!(find_noncommuting_witness(&bad, &view, map).unwrap().is_some());
            }
        }
    }

    #[test]
    fn refinement_shrinks_commutant_as_described(sys in system()) {
        let inst = sys.last_step();
        let coarse = commutant_description(&SubalgebraView::coarse_in_refined(&inst.refinement), &inst.refined_map).unwrap();
        let fine = commutant_description(&SubalgebraView::full(inst.refinement.refined()), &inst.refined_map).unwrap();
        let diff = commutant_difference(&inst.refinement, &inst.base_map, &inst.refined_map).unwrap();
        for n in -12i64..=12 {
            prop_assert!(coarse.sep(n).is_subset(&fine.sep(n)));
            prop_assert!(fine.allowed(n).is_subset(&coarse.allowed(n)));
            let assembled = refined_sep(&inst.refinement, &inst.base_map, &inst.refined_map, n).unwrap();
            let extra: BTreeSet<usize> = assembled.difference(&coarse.sep(n)).copied().collect();
            prop_assert_eq!(&extra, &diff.at(n).difference(&coarse.sep(n)).copied().collect());
            let union: BTreeSet<usize> = coarse.sep(n).union(&diff.at(n)).copied().collect();
            prop_assert_eq!(assembled, union);
        }
    }

    #[test]
    fn enumerated_lifts_are_exactly_the_valid_ones(sys in small_system()) {
        let inst = sys.last_step();
        let len = inst.refined_map.len();
        let stream: Vec<PieceMap> = enumerate_refined_maps(&inst.refinement, &inst.base_map).collect();
        prop_assert_eq!(stream.len() as u128, lift_count(&inst.refinement, &inst.base_map));
        let stream: BTreeSet<PieceMap> = stream.into_iter().collect();
        let brute: BTreeSet<PieceMap> = itertools::Itertools::permutations(0..len, len)
            .map(|p| PieceMap::new(p).unwrap())
            .filter(|m| validate_refined_invariance(&inst.refinement, &inst.base_map, m).is_ok())
            .collect();
        prop_assert_eq!(stream, brute);
    }

    #[test]
    fn signature_ignores_labels(sys in system(), seed in any::<u64>()) {
        let inst = sys.last_step();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(relabelled_signature(&inst, &mut rng), Some(CaseSignature::of(&inst).unwrap()));
    }

    #[test]
    fn files_and_reports_round_trip(sys in system(), window in 1i64..=4) {
        let inst = sys.last_step();
        let file = inst.to_file(Some(window));
        let back = InstanceFile::from_json(&file.to_json()).unwrap().load().unwrap();
        prop_assert_eq!(back.window, window);
        let back = back.instance().unwrap();
        prop_assert_eq!(back.order_key(), inst.order_key());
        prop_assert_eq!(back.to_file(Some(window)), file);
        let report = build_report(&inst, window).unwrap();
        prop_assert_eq!(Report::from_json(&report.to_json()).unwrap(), report);
    }
}
