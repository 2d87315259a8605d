use ccm_core::coset::Coset;
use ccm_core::coset_ring::CosetRingElement;
use ccm_core::exec::Execution;
use ccm_core::group::library;
use ccm_core::rational::{rat, Rational};
use ccm_core::subgroup::Subgroup;
use ccm_core::witness::{self, Atom, AtomSet, Constraint, WitnessOptions};
use ccm_core::{Element, Error, GroupHandle};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn residues(g: &GroupHandle, h: &Subgroup) -> Vec<CosetRingElement> {
    ccm_core::coset::left_transversal(h)
        .unwrap()
        .iter()
        .map(|r| CosetRingElement::from_coset(&Coset::new(h, r).unwrap()))
        .inspect(|c| assert_eq!(c.group(), g))
        .collect()
}

fn opts(mode: Execution) -> WitnessOptions {
    WitnessOptions { mode, ..WitnessOptions::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn subgroup_witnesses_balance_cosets(seed in any::<u64>(), which in 0usize..4) {
        let g = [library::integers(), library::z2(), library::infinite_dihedral(), library::integral_heisenberg()][which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let finite = ccm_core::dc::congruence_subgroup(&g, rng.gen_range(1..=3)).unwrap();
        let line = Subgroup::generated(&g, &[g.random_element(&mut rng, 2)]).unwrap();
        let eps: Rational = rat(1, rng.gen_range(2..=6));
        let cs = vec![
            Constraint { subgroup: finite.clone(), tolerance: rat(1, 2) },
            Constraint { subgroup: line.clone(), tolerance: eps.clone() },
        ];
        let w = witness::build_witness(&g, &cs, opts(Execution::Parallel)).unwrap();
        prop_assert_eq!(w.certificate.subgroup_deviations[0].clone(), rat(0, 1));
        if !line.has_finite_index() {
            prop_assert!(w.certificate.subgroup_deviations[1] < eps);
        }
        let seq = witness::build_witness(&g, &cs, opts(Execution::Sequential)).unwrap();
        prop_assert_eq!(seq, w);
    }

    #[test]
    fn partition_witnesses_meet_their_quotas(seed in any::<u64>(), n in 1usize..16) {
        let g = library::z2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = ccm_core::dc::congruence_subgroup(&g, 2).unwrap();
        let atoms: Vec<Atom> = residues(&g, &h)
            .into_iter()
            .zip([1, 2, 3, 4])
            .map(|(set, w)| Atom { set: AtomSet::Ring(set), target: rat(w, 10) })
            .collect();
        let shift = g.random_element(&mut rng, 2);
        let shifts: Vec<Element> = if g.is_identity(&shift) { vec![] } else { vec![shift] };
        let w = witness::disjoint_translates_witness(&g, &atoms, n, &shifts, opts(Execution::Parallel)).unwrap();
        prop_assert_eq!(w.elements.len(), n);
        for d in &w.certificate.atom_deviations {
            prop_assert!(*d <= rat(1, n as i64));
        }
        prop_assert!(w.certificate.disjoint.iter().all(|&b| b));
        let recomputed = witness::certify(&g, &w.elements, &[], &atoms, &shifts, &[]);
        prop_assert_eq!(recomputed, w.certificate);
    }
}

#[test]
fn documented_examples() {
    let z = library::integers();
    let zs = |xs: &[i64]| xs.iter().map(|&v| Element::Affine { v: vec![v], q: 0 }).collect::<Vec<_>>();
    let evens = Subgroup::generated(&z, &zs(&[2])[..]).unwrap();
    let w = witness::build_witness(&z, &[Constraint { subgroup: evens.clone(), tolerance: rat(1, 2) }], WitnessOptions::default())
        .unwrap();
    assert_eq!(w.elements, zs(&[0, -1]));
    let atoms: Vec<Atom> =
        residues(&z, &evens).into_iter().map(|set| Atom { set: AtomSet::Ring(set), target: rat(1, 2) }).collect();
    let w = witness::disjoint_translates_witness(&z, &atoms, 4, &zs(&[1]), WitnessOptions::default()).unwrap();
    assert_eq!(w.elements, zs(&[0, -2, 3, -5]));
    let plane = library::z2();
    let whole = vec![Atom { set: AtomSet::Ring(CosetRingElement::whole(&plane)), target: rat(1, 1) }];
    let e1 = Element::Affine { v: vec![1, 0], q: 0 };
    let w = witness::disjoint_translates_witness(&plane, &whole, 3, &[e1], WitnessOptions::default()).unwrap();
    assert_eq!(w.elements.len(), 3);
    assert_eq!(w.certificate.disjoint, vec![true]);
}

#[test]
fn amplified_witnesses_on_every_class() {
    for g in [library::z2(), library::infinite_dihedral(), library::z2_rot4(), library::mod2_symplectic(), library::integral_heisenberg()] {
        let h = ccm_core::dc::congruence_subgroup(&g, 2).unwrap();
        let atoms = residues(&g, &h);
        let k: Vec<Element> = g.generators().to_vec();
        let eps = rat(1, 2);
        let w = witness::folner_amplify(&g, &atoms, &k, &eps, WitnessOptions::default()).unwrap();
        let again = witness::certify(&g, &w.elements, &[], &atoms.iter().map(|a| Atom { set: AtomSet::Ring(a.clone()), target: a.measure() }).collect::<Vec<_>>(), &[], &k);
        assert_eq!(again, w.certificate, "{}", g.name());
        assert!(w.certificate.folner_ratios.iter().all(|r| *r < eps));
        assert!(w.certificate.atom_deviations.iter().all(|d| *d < eps));
    }
}

#[test]
fn folner_sets_shrink_their_boundary() {
    for g in library::infinite_corpus() {
        for eps in [rat(1, 2), rat(1, 4)] {
            let (s, ratios) = witness::folner_set(&g, g.generators(), &eps, WitnessOptions::default()).unwrap();
            for (x, r) in g.generators().iter().zip(&ratios) {
                assert_eq!(*r, witness::folner_ratio(&g, &s, x));
                assert!(*r < eps, "{}", g.name());
            }
        }
    }
}

#[test]
fn request_errors() {
    let z = library::integers();
    let c = Constraint { subgroup: Subgroup::whole(&z), tolerance: rat(0, 1) };
    assert!(matches!(witness::build_witness(&z, &[c], WitnessOptions::default()), Err(Error::InvalidRequest(_))));
    let explicit = vec![Atom { set: AtomSet::Finite(vec![z.identity()]), target: rat(1, 1) }];
    assert!(matches!(witness::approximate_mean(&z, &explicit, 1, WitnessOptions::default()), Err(Error::InvalidRequest(_))));
    let s3 = library::symmetric(3);
    let gaps = vec![Atom { set: AtomSet::Finite(vec![s3.identity()]), target: rat(1, 1) }];
    assert!(matches!(witness::approximate_mean(&s3, &gaps, 1, WitnessOptions::default()), Err(Error::NotAPartition(_))));
    let tight = WitnessOptions { horizon: 1, ..WitnessOptions::default() };
    let line = Subgroup::trivial(&z);
    let c = Constraint { subgroup: line, tolerance: rat(1, 10) };
    assert!(matches!(witness::build_witness(&z, &[c], tight), Err(Error::EnumerationExhausted { .. })));
}
