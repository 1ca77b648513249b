use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use finorder::heyting::DownsetAlgebra;
use finorder::hierarchy::Hierarchy;
use finorder::kripke::{
    complex_algebra, coreflect, coreflect_fast, is_pmorphism, is_pmorphism_preimage, random_frame, KripkeFrame,
};
use finorder::maps::{is_monotone, is_open_v1, is_open_v2, is_open_v3, PointMap};
use finorder::order::{full, is_subset, poset_iso, random_poset, random_preorder};
use finorder::{BasePoset, FinitePreorder, Universe};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_map(n: usize, m: usize, r: &mut ChaCha8Rng) -> PointMap {
    PointMap::new((0..n).map(|_| r.gen_range(0..m)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn down_closure_is_a_closure_operator(seed: u64, n in 1usize..9, a: u64, b: u64) {
        let mut r = rng(seed);
        let p = random_preorder(n, 0.3, &mut r);
        let (a, b) = (a & full(n), b & full(n));
        let ca = p.down_closure(a);
        prop_assert!(is_subset(a, ca));
        prop_assert_eq!(p.down_closure(ca), ca);
        prop_assert!(p.is_downset(ca));
        prop_assert!(is_subset(p.down_closure(a & b), p.down_closure(a)));
        prop_assert_eq!(p.down_closure(a | b), ca | p.down_closure(b));
    }

    #[test]
    fn openness_conditions_agree(seed: u64, n in 1usize..6, m in 1usize..6) {
        let mut r = rng(seed);
        let p = random_preorder(n, 0.3, &mut r);
        let q = random_preorder(m, 0.3, &mut r);
        let f = random_map(n, m, &mut r);
        if is_monotone(&p, &q, &f) {
            let v1 = is_open_v1(&p, &q, &f);
            prop_assert_eq!(v1, is_open_v2(&p, &q, &f));
            prop_assert_eq!(v1, is_open_v3(&p, &q, &f));
        }
    }

    #[test]
    fn relabelled_posets_are_isomorphic(seed: u64, n in 0usize..8) {
        let mut r = rng(seed);
        let p = random_poset(n, 0.4, &mut r);
        let q = random_poset(n, 0.4, &mut r);
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, r.gen_range(0..=i));
        }
        let shuffled = p.restrict(&perm);
        let iso = poset_iso(&shuffled, &p).unwrap().expect("relabelling is an isomorphism");
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(shuffled.leq(a, b), p.leq(iso[a], iso[b]));
            }
        }
        // Isomorphism is symmetric.
        prop_assert_eq!(poset_iso(&p, &q).unwrap().is_some(), poset_iso(&q, &p).unwrap().is_some());
    }

    #[test]
    fn implication_is_the_residual_of_meet(seed: u64, n in 1usize..7) {
        let mut r = rng(seed);
        let p = random_poset(n, 0.35, &mut r);
        let alg = DownsetAlgebra::new(p).unwrap();
        let el = alg.elements();
        let pick = |r: &mut ChaCha8Rng| el[r.gen_range(0..el.len())];
        let (a, b, c) = (pick(&mut r), pick(&mut r), pick(&mut r));
        let imp = alg.implies(a, b);
        prop_assert!(alg.contains(imp));
        prop_assert_eq!(is_subset(c & a, b), is_subset(c, imp));
    }

    #[test]
    fn pmorphism_forms_agree(seed: u64, n in 1usize..6, m in 1usize..5, density in 0.1f64..0.9) {
        let mut r = rng(seed);
        let f = random_frame(n, density, &mut r);
        let g = random_frame(m, density, &mut r);
        let h = random_map(n, m, &mut r);
        prop_assert_eq!(is_pmorphism(&h, &f, &g), is_pmorphism_preimage(&h, &f, &g));
    }

    #[test]
    fn opens_between_preorders_are_pmorphisms(seed: u64, n in 1usize..6, m in 1usize..6) {
        let mut r = rng(seed);
        let p = random_preorder(n, 0.3, &mut r);
        let q = random_preorder(m, 0.3, &mut r);
        let f = random_map(n, m, &mut r);
        let (fp, fq) = (KripkeFrame::of_opposite(&p), KripkeFrame::of_opposite(&q));
        prop_assert_eq!(is_open_v1(&p, &q, &f), is_pmorphism(&f, &fp, &fq));
    }

    #[test]
    fn fast_coreflection_matches_upset_scan(seed: u64, n in 0usize..9, density in 0.05f64..0.95) {
        let mut r = rng(seed);
        let f = random_frame(n, density, &mut r);
        prop_assert_eq!(coreflect(&f).unwrap(), coreflect_fast(&f));
    }

    #[test]
    fn diamond_is_additive_and_box_is_dual(seed: u64, n in 1usize..7, a: u64, b: u64) {
        let mut r = rng(seed);
        let alg = complex_algebra(&random_frame(n, 0.4, &mut r));
        let (a, b) = (a & full(n), b & full(n));
        prop_assert_eq!(alg.diamond(a | b), alg.diamond(a) | alg.diamond(b));
        prop_assert_eq!(alg.boxed(a & b), alg.boxed(a) & alg.boxed(b));
        prop_assert!(is_subset(alg.boxed(a) & alg.diamond(b), alg.diamond(a & b)));
    }

    #[test]
    fn hierarchy_round_trips_through_json(seed: u64, n in 1usize..5) {
        let mut r = rng(seed);
        let order = random_poset(n, 0.3, &mut r);
        let labels: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
        let mut u = Universe::new(BasePoset::new(labels, order).unwrap());
        let base: Vec<_> = u.ids().collect();
        let h = Hierarchy::build(&base, 2, 5_000, &mut u).unwrap();
        let json = serde_json::to_string(&h.to_json(&u)).unwrap();
        let (back, v) = Hierarchy::from_json(&serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back.levels(), h.levels());
        prop_assert_eq!(v.dump(), u.dump());
    }
}

#[test]
fn preorder_json_round_trip() {
    let mut r = rng(9);
    for n in 0..7 {
        let p = random_preorder(n, 0.3, &mut r);
        assert_eq!(FinitePreorder::from_json(&p.to_json()).unwrap(), p);
        let f = random_frame(n, 0.5, &mut r);
        assert_eq!(KripkeFrame::from_json(&f.to_json()).unwrap(), f);
    }
}
