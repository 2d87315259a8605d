use ccm_core::coset;
use ccm_core::dc::{self, QuotientChain};
use ccm_core::exec::Execution;
use ccm_core::group::library;
use ccm_core::rational::rat;
use ccm_core::subgroup;
use ccm_core::{Element, Error, GroupHandle};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEQ: Execution = Execution::Sequential;

fn supported() -> Vec<GroupHandle> {
    let mut v = library::infinite_corpus();
    v.push(library::heisenberg_f2(1));
    v.push(library::heisenberg_f2(2));
    v
}

#[test]
fn strata_agree_with_centralizer_indices() {
    for g in supported() {
        let table = dc::centralizer_strata(&g, SEQ).unwrap();
        for x in g.enumerate(3) {
            let index = subgroup::centralizer(&g, &x).unwrap().index().finite();
            assert_eq!(table.locate(&x), index, "{} at {}", g.name(), g.format_element(&x));
            if index.is_none() {
                assert!(table.infinite.contains(&x));
            }
        }
    }
}

#[test]
fn strata_are_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for g in supported() {
        let table = dc::centralizer_strata(&g, SEQ).unwrap();
        for _ in 0..100 {
            let (h, x) = (g.random_element(&mut rng, 4), g.random_element(&mut rng, 4));
            let y = g.mul(&g.mul(&g.inv(&h), &x), &h);
            assert_eq!(table.locate(&x), table.locate(&y), "{}", g.name());
        }
    }
}

#[test]
fn strata_partition_the_group() {
    for g in supported() {
        let table = dc::centralizer_strata(&g, SEQ).unwrap();
        let total = table.strata.iter().map(|s| s.measure.clone()).sum::<ccm_core::Rational>() + &table.infinite_measure;
        assert_eq!(total, rat(1, 1));
        for (i, a) in table.strata.iter().enumerate() {
            assert!(a.set.meet(&table.infinite).unwrap().is_empty());
            for b in &table.strata[i + 1..] {
                assert!(a.set.meet(&b.set).unwrap().is_empty());
            }
        }
    }
}

#[test]
fn quotients_dominate_strata() {
    for g in library::infinite_corpus() {
        let strata = dc::dc_strata(&g, SEQ).unwrap();
        let chain = dc::congruence_family(&g, &[2, 3, 4, 6]).unwrap();
        for t in dc::dc_rf_chain(&chain, coset::QUOTIENT_CAP, SEQ).unwrap().terms {
            assert!(t.dc >= strata, "{}: quotient of order {}", g.name(), t.order);
        }
    }
}

#[test]
fn finite_pairing_groups_agree_with_their_tables() {
    for n in 1..=2 {
        let g = library::heisenberg_f2(n);
        let (c, _) = coset::to_cayley(&g, 100).unwrap();
        assert_eq!(dc::dc_strata(&g, SEQ).unwrap(), dc::dc_finite(&c, SEQ).unwrap());
    }
    assert_eq!(dc::dc_finite(&library::heisenberg_f2(2), SEQ).unwrap(), rat(17, 32));
}

#[test]
fn xn_bound_for_every_n() {
    for g in library::finite_corpus() {
        for n in 1..=g.order().unwrap() {
            assert!(dc::xn_check(&g, n, SEQ).unwrap().bound_holds, "{} at n = {n}", g.name());
        }
    }
}

#[test]
fn abelian_groups_have_constant_chains() {
    let g = library::z2();
    let r = dc::dc_rf_chain(&dc::congruence_family(&g, &[2, 3, 5]).unwrap(), 100, SEQ).unwrap();
    assert!(r.terms.iter().all(|t| t.dc == rat(1, 1)));
    let too_big = dc::congruence_family(&g, &[200]).unwrap();
    assert!(matches!(dc::dc_rf_chain(&too_big, 100, SEQ), Err(Error::QuotientTooLarge { .. })));
}

#[test]
fn chains_reject_bad_members() {
    let g = library::infinite_dihedral();
    let reflection = subgroup::Subgroup::generated(&g, &[Element::Affine { v: vec![0], q: 1 }]).unwrap();
    assert!(QuotientChain::family(vec![reflection]).is_err());
    let s3 = library::symmetric(3);
    let order_two = subgroup::all_subgroups(&s3).unwrap().into_iter().find(|h| h.order() == Some(2)).unwrap();
    assert_eq!(QuotientChain::family(vec![order_two]).unwrap_err(), Error::NotNormal);
}

#[test]
fn commuting_sums_vanish_across_center_cosets() {
    let g = library::integral_heisenberg();
    let center = subgroup::center(&g).unwrap();
    for n in [2, 3, 5] {
        let r = dc::small_commuting_sum(&g, n, &rat(1, 1000), 32).unwrap();
        assert_eq!(r.sum, rat(0, 1));
        for (i, a) in r.elements.iter().enumerate() {
            for b in &r.elements[i + 1..] {
                assert!(!center.contains(&g.mul(&g.inv(a), b)));
            }
        }
    }
    for g in [library::infinite_dihedral(), library::symmetric(3)] {
        assert!(matches!(dc::small_commuting_sum(&g, 2, &rat(1, 2), 8), Err(Error::HypothesisFails(_))));
    }
}

#[test]
fn execution_modes_agree() {
    for g in library::finite_corpus().into_iter().chain(supported()) {
        let a = dc::centralizer_strata(&g, Execution::Sequential).unwrap();
        let b = dc::centralizer_strata(&g, Execution::Parallel).unwrap();
        assert_eq!(a.dc(), b.dc());
        if g.is_finite() {
            assert_eq!(dc::dc_finite(&g, Execution::Sequential).unwrap(), dc::dc_finite(&g, Execution::Parallel).unwrap());
        }
    }
}
