use std::collections::HashSet;

use ccm_core::coset::{self, Coset};
use ccm_core::group::library;
use ccm_core::subgroup::{self, Subgroup};
use ccm_core::{Element, Error, ExtendedIndex, GroupHandle};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn every_class() -> Vec<GroupHandle> {
    let mut v = library::infinite_corpus();
    v.push(library::heisenberg_f2(2));
    v.push(library::symmetric(4));
    v
}

fn random_subgroup(g: &GroupHandle, rng: &mut ChaCha8Rng) -> Subgroup {
    let gens: Vec<Element> = (0..rng.gen_range(0..=2)).map(|_| g.random_element(rng, 3)).collect();
    Subgroup::generated(g, &gens).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_axioms(seed in any::<u64>(), which in 0usize..9) {
        let g = &every_class()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (g.random_element(&mut rng, 5), g.random_element(&mut rng, 5), g.random_element(&mut rng, 5));
        prop_assert_eq!(g.mul(&g.mul(&a, &b), &c), g.mul(&a, &g.mul(&b, &c)));
        prop_assert_eq!(g.mul(&a, &g.inv(&a)), g.identity());
        prop_assert_eq!(g.mul(&g.identity(), &a), a.clone());
        prop_assert_eq!(g.pow(&a, 3), g.mul(&a, &g.mul(&a, &a)));
        prop_assert_eq!(g.pow(&a, -2), g.inv(&g.mul(&a, &a)));
        let comm = g.commutator(&a, &b);
        prop_assert_eq!(comm, g.mul(&g.mul(&g.inv(&a), &g.inv(&b)), &g.mul(&a, &b)));
    }

    #[test]
    fn membership_matches_coset_equality(seed in any::<u64>(), which in 0usize..9) {
        let g = &every_class()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_subgroup(g, &mut rng);
        let (x, y) = (g.random_element(&mut rng, 4), g.random_element(&mut rng, 4));
        let same = Coset::new(&h, &x).unwrap() == Coset::new(&h, &y).unwrap();
        prop_assert_eq!(same, h.contains(&g.mul(&g.inv(&x), &y)));
        let hx = h.coset_rep(&x);
        prop_assert_eq!(h.coset_rep(&hx), hx.clone());
        prop_assert!(h.contains(&g.mul(&g.inv(&x), &hx)));
    }

    #[test]
    fn conjugation_preserves_index(seed in any::<u64>(), which in 0usize..9) {
        let g = &every_class()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_subgroup(g, &mut rng);
        let x = g.random_element(&mut rng, 3);
        let conj = h.conjugate(&x);
        prop_assert_eq!(conj.index(), h.index());
        for y in h.canonical_generators() {
            prop_assert!(conj.contains(&g.conj(&x, &y)));
        }
    }

    #[test]
    fn canonical_form_is_generator_independent(seed in any::<u64>(), which in 0usize..9) {
        let g = &every_class()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_subgroup(g, &mut rng);
        let again = Subgroup::generated(g, &h.canonical_generators()).unwrap();
        prop_assert_eq!(&again, &h);
        let mut shuffled = h.generators().to_vec();
        shuffled.reverse();
        if let Some(first) = shuffled.first().cloned() {
            shuffled.push(g.mul(&first, &first));
        }
        prop_assert_eq!(Subgroup::generated(g, &shuffled).unwrap(), h);
    }

    #[test]
    fn intersection_and_join_bracket(seed in any::<u64>(), which in 0usize..9) {
        let g = &every_class()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (h, k) = (random_subgroup(g, &mut rng), random_subgroup(g, &mut rng));
        let meet = h.intersect(&k).unwrap();
        let join = h.join(&k).unwrap();
        prop_assert!(meet.is_subgroup_of(&h) && meet.is_subgroup_of(&k));
        prop_assert!(h.is_subgroup_of(&join) && k.is_subgroup_of(&join));
        for _ in 0..8 {
            let x = g.random_element(&mut rng, 4);
            prop_assert_eq!(meet.contains(&x), h.contains(&x) && k.contains(&x));
        }
    }
}

#[test]
fn index_times_order_is_group_order() {
    for g in library::finite_corpus() {
        let n = g.order().unwrap();
        let subs = subgroup::all_subgroups(&g).unwrap();
        for h in &subs {
            let members = g.elements().unwrap().into_iter().filter(|x| h.contains(x)).count() as u64;
            assert_eq!(h.order(), Some(members));
            assert_eq!(h.index(), ExtendedIndex::Finite(n / members), "{}", g.name());
            assert_eq!(coset::left_transversal(h).unwrap().len() as u64, n / members);
        }
    }
}

#[test]
fn finite_intersections_match_set_intersections() {
    for g in [library::symmetric(4), library::dihedral(6), library::quaternion()] {
        let subs = subgroup::all_subgroups(&g).unwrap();
        let all = g.elements().unwrap();
        for h in &subs {
            for k in &subs {
                let meet = h.intersect(k).unwrap();
                let brute: HashSet<&Element> = all.iter().filter(|x| h.contains(x) && k.contains(x)).collect();
                assert_eq!(meet.order(), Some(brute.len() as u64));
                assert!(brute.iter().all(|x| meet.contains(x)));
            }
        }
    }
}

#[test]
fn centralizers_match_brute_force() {
    for g in library::finite_corpus() {
        let all = g.elements().unwrap();
        for x in &all {
            let c = subgroup::centralizer(&g, x).unwrap();
            for y in &all {
                assert_eq!(c.contains(y), g.commute(x, y));
            }
        }
    }
    for g in library::infinite_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ball = g.enumerate(3);
        for _ in 0..10 {
            let x = g.random_element(&mut rng, 3);
            let c = subgroup::centralizer(&g, &x).unwrap();
            for y in &ball {
                assert_eq!(c.contains(y), g.commute(&x, y), "{}", g.name());
            }
        }
    }
}

#[test]
fn infinite_dihedral_examples() {
    let g = library::infinite_dihedral();
    let t = |k: i64| Element::Affine { v: vec![k], q: 0 };
    let s = Element::Affine { v: vec![0], q: 1 };
    assert_eq!(g.commutator(&t(1), &s), t(-2));
    assert_eq!(g.commutator(&s, &t(1)), t(2));
    assert_eq!(g.pow(&s, 2), g.identity());
    assert_eq!(Subgroup::generated(&g, &[t(3)]).unwrap().index(), ExtendedIndex::Finite(6));
    assert_eq!(Subgroup::generated(&g, std::slice::from_ref(&s)).unwrap().index(), ExtendedIndex::Infinite);
    let c = subgroup::centralizer(&g, &t(1)).unwrap();
    assert_eq!(c.index(), ExtendedIndex::Finite(2));
}

#[test]
fn foreign_elements_are_rejected() {
    let z = library::integers();
    let s3 = library::symmetric(3);
    assert!(matches!(z.multiply(&Element::Cayley(0), &z.identity()), Err(Error::ForeignElement(_))));
    assert!(Subgroup::generated(&s3, &[Element::Cayley(17)]).is_err());
    let h = Subgroup::trivial(&z);
    assert_eq!(h.intersect(&Subgroup::trivial(&s3)).unwrap_err(), Error::MixedGroups);
}

#[test]
fn quotients_have_the_expected_order() {
    let g = library::integral_heisenberg();
    let n = Subgroup::generated(
        &g,
        &[
            Element::Pairing { a: vec![3, 0], nu: vec![0] },
            Element::Pairing { a: vec![0, 3], nu: vec![0] },
            Element::Pairing { a: vec![0, 0], nu: vec![3] },
        ],
    )
    .unwrap();
    let (q, reps) = coset::quotient(&n, 1000).unwrap();
    assert_eq!(q.order(), Some(27));
    assert_eq!(reps.len(), 27);
    assert!(matches!(coset::quotient(&n, 10), Err(Error::QuotientTooLarge { order: 27, cap: 10 })));
    let s3 = library::symmetric(3);
    let order_two = subgroup::all_subgroups(&s3).unwrap().into_iter().find(|h| h.order() == Some(2)).unwrap();
    assert_eq!(coset::quotient(&order_two, 100).unwrap_err(), Error::NotNormal);
}
