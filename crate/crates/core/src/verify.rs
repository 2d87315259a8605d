//! The acceptance suite: ten criteria, each checked against a brute-force
//! path that shares as little code with the engine as possible, under a
//! wall-clock budget.

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coset::{self, Coset};
use crate::coset_ring::{neumann_check, CosetRingElement};
use crate::dc::{self, QuotientChain};
use crate::error::Result;
use crate::exec::Execution;
use crate::group::{library, Element, GroupHandle, GroupKind};
use crate::mean::{self, MeanVector};
use crate::rational::{self, rat, Rational};
use crate::subgroup::{self, Subgroup};
use crate::witness::{self, Atom, AtomSet, Constraint, WitnessOptions};

const SEED: u64 = 0x5eed;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {} ({} ms / budget {} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed_ms,
            self.budget_ms,
            self.detail
        )
    }
}

type Check = fn(Execution) -> Result<std::result::Result<String, String>>;

const CRITERIA: [(u8, &str, u64, Check); 10] = [
    (1, "coset measures", 30, coset_measures),
    (2, "Neumann covers", 10, neumann_covers),
    (3, "strata vs brute force", 60, strata_vs_brute_force),
    (4, "infinite-group anchors", 60, infinite_anchors),
    (5, "FAF dichotomy", 10, faf_dichotomy),
    (6, "witness certificates", 60, witness_certificates),
    (7, "defects and smoothing", 60, defects_and_smoothing),
    (8, "conjugacy counts", 30, conjugacy_counts),
    (9, "Gustafson and Gallagher", 60, gustafson_gallagher),
    (10, "Heisenberg transversal", 10, heisenberg_transversal),
];

pub fn criterion_ids() -> Vec<u8> {
    CRITERIA.iter().map(|c| c.0).collect()
}

pub fn run(id: u8, mode: Execution) -> Option<Outcome> {
    let &(id, title, budget_s, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let result = check(mode);
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_s);
    let (ok, detail) = match result {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(e) => (false, format!("error: {e}")),
    };
    Some(Outcome {
        id,
        title,
        passed: ok && elapsed <= budget,
        detail,
        elapsed_ms: elapsed.as_millis(),
        budget_ms: budget.as_millis(),
    })
}

pub fn run_all(mode: Execution) -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|c| run(c.0, mode)).collect()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Ok(Err(format!($($msg)+)));
        }
    };
}

fn distinct_classes(h: &Subgroup, xs: &[Element], stop: usize) -> Vec<Vec<Element>> {
    let g = h.group();
    let mut classes: Vec<Vec<Element>> = Vec::new();
    for x in xs {
        match classes.iter_mut().find(|c| h.contains(&g.mul(&g.inv(&c[0]), x))) {
            Some(c) => c.push(x.clone()),
            None => {
                classes.push(vec![x.clone()]);
                if classes.len() >= stop {
                    break;
                }
            }
        }
    }
    classes
}

/// `[G:H]` from a finite quotient `G/N` with `N ≤ H`, or `None` when the
/// first elements of the group already fall into many distinct cosets.
fn index_oracle(h: &Subgroup) -> Result<Option<u64>> {
    let g = h.group();
    if let Some(order) = g.order() {
        let inside = g.elements()?.iter().filter(|x| h.contains(x)).count() as u64;
        return Ok(Some(order / inside));
    }
    for k in 1..=60 {
        let n = dc::congruence_subgroup(g, k)?;
        if n.index().finite().unwrap() > coset::QUOTIENT_CAP {
            break;
        }
        if n.canonical_generators().iter().all(|x| h.contains(x)) {
            let (_, reps) = coset::quotient(&n, coset::QUOTIENT_CAP)?;
            let inside = reps.iter().filter(|x| h.contains(x)).count() as u64;
            return Ok(Some(reps.len() as u64 / inside));
        }
    }
    Ok(None)
}

/// Evidence of infinite index: a ball of at least 1000 elements meets 40
/// cosets, or meets strictly more cosets than the ball of half its radius.
fn unbounded_cosets(h: &Subgroup) -> bool {
    let g = h.group();
    let mut r = 1;
    while g.enumerate(r).len() < 1000 {
        r += 1;
    }
    let big = distinct_classes(h, &g.enumerate(r), 40).len();
    big >= 40 || distinct_classes(h, &g.enumerate(r / 2), 40).len() < big
}

fn structural_subgroups(g: &GroupHandle, rng: &mut ChaCha8Rng) -> Result<Vec<Subgroup>> {
    let mut out = vec![Subgroup::trivial(g), Subgroup::whole(g), subgroup::center(g)?, subgroup::derived_subgroup(g)?];
    for k in [2, 3] {
        out.push(dc::congruence_subgroup(g, k)?);
    }
    for x in g.generators() {
        out.push(subgroup::centralizer(g, x)?);
    }
    for _ in 0..24 {
        let gens: Vec<Element> = (0..rng.gen_range(1..=2)).map(|_| g.random_element(rng, 3)).collect();
        out.push(Subgroup::generated(g, &gens)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn coset_measures(_: Execution) -> Result<std::result::Result<String, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut groups: Vec<(GroupHandle, Vec<Subgroup>)> = Vec::new();
    for g in library::finite_corpus() {
        let subs = subgroup::all_subgroups(&g)?;
        groups.push((g, subs));
    }
    for n in [1, 2] {
        let h = library::heisenberg_f2(n);
        let (c, reps) = coset::to_cayley(&h, 1 << 10)?;
        let mut subs = Vec::new();
        for s in subgroup::all_subgroups(&c)? {
            let gens: Vec<Element> = s
                .generators()
                .iter()
                .map(|x| match x {
                    Element::Cayley(i) => reps[*i].clone(),
                    _ => unreachable!(),
                })
                .collect();
            subs.push(Subgroup::generated(&h, &gens)?);
        }
        groups.push((h, subs));
    }
    for g in [library::integers(), library::z2(), library::infinite_dihedral(), library::z2_rot4(), library::mod2_symplectic(), library::integral_heisenberg()] {
        let subs = structural_subgroups(&g, &mut rng)?;
        groups.push((g, subs));
    }
    let (mut subgroups, mut cosets, mut unchecked) = (0, 0, 0);
    for (g, subs) in &groups {
        let sample = if g.is_finite() { g.elements()? } else { Vec::new() };
        for h in subs {
            let oracle = index_oracle(h)?;
            let expected = match (oracle, h.index().finite()) {
                (Some(k), _) => rat(1, k as i64),
                (None, None) => {
                    ensure!(unbounded_cosets(h), "{}: subgroup reported infinite index but few cosets", g.name());
                    rational::zero()
                }
                (None, Some(_)) => {
                    unchecked += 1;
                    continue;
                }
            };
            subgroups += 1;
            for _ in 0..20 {
                let x = if g.is_finite() { sample.choose(&mut rng).unwrap().clone() } else { g.random_element(&mut rng, 6) };
                let c = Coset::new(h, &x)?;
                let m = CosetRingElement::from_coset(&c).measure();
                ensure!(m == expected, "{}: measure {} of a coset, expected {}", g.name(), rational::format(&m), rational::format(&expected));
                let probe = if g.is_finite() { sample.choose(&mut rng).unwrap().clone() } else { g.random_element(&mut rng, 6) };
                ensure!(c.contains(&probe) == h.contains(&g.mul(&g.inv(&x), &probe)), "{}: coset membership mismatch", g.name());
                cosets += 1;
            }
        }
    }
    ensure!(unchecked * 10 <= subgroups, "{unchecked} subgroups had no index oracle");
    Ok(Ok(format!("{subgroups} subgroups across {} groups, {cosets} cosets ({unchecked} without oracle)", groups.len())))
}

fn neumann_covers(mode: Execution) -> Result<std::result::Result<String, String>> {
    let z = library::integers();
    let zv = |v: i64| Element::Affine { v: vec![v], q: 0 };
    let mut pool = Vec::new();
    for m in 1..=6i64 {
        let h = Subgroup::generated(&z, &[zv(m)])?;
        for r in 0..m {
            pool.push((r, m, Coset::new(&h, &zv(r))?));
        }
    }
    let mut systems = 0u64;
    let mut covers = 0u64;
    let mut idx: Vec<usize> = Vec::new();
    fn next(idx: &mut [usize], n: usize, k: usize) -> bool {
        // Advances to the next k-subset of 0..n in lexicographic order.
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
    for k in 1..=4 {
        idx.clear();
        idx.extend(0..k);
        loop {
            let chosen: Vec<Coset> = idx.iter().map(|&i| pool[i].2.clone()).collect();
            let report = neumann_check(&chosen, mode)?;
            let brute = (0..60).all(|x: i64| idx.iter().any(|&i| (x - pool[i].0).rem_euclid(pool[i].1) == 0));
            let sum: Rational = idx.iter().map(|&i| rat(1, pool[i].1)).sum();
            ensure!(report.covers == brute, "cover decision differs from residue enumeration on {idx:?}");
            ensure!(report.reciprocal_sum == sum, "reciprocal sum differs on {idx:?}");
            ensure!(!brute || sum >= rational::one(), "cover {idx:?} with reciprocal sum below 1");
            systems += 1;
            covers += brute as u64;
            if !next(&mut idx, pool.len(), k) {
                break;
            }
        }
    }
    let three: Vec<Coset> = [(0, 2), (1, 4), (3, 4)]
        .iter()
        .map(|&(r, m)| Coset::new(&Subgroup::generated(&z, &[zv(m)]).unwrap(), &zv(r)).unwrap())
        .collect();
    let r = neumann_check(&three, mode)?;
    ensure!(r.covers && r.reciprocal_sum == rational::one(), "three-coset cover not certified");
    Ok(Ok(format!("{systems} systems, {covers} covers, none below 1")))
}

fn strata_vs_brute_force(mode: Execution) -> Result<std::result::Result<String, String>> {
    let corpus = library::finite_corpus();
    for g in &corpus {
        let t = g.as_cayley().unwrap();
        let n = t.order();
        let mut pairs = 0i64;
        for a in 0..n {
            for b in 0..n {
                pairs += (t.mul(a, b) == t.mul(b, a)) as i64;
            }
        }
        let brute = rat(pairs, (n * n) as i64);
        let strata = dc::dc_strata(g, mode)?;
        ensure!(strata == brute && dc::dc_finite(g, mode)? == brute, "{}: strata {} vs brute force {}", g.name(), rational::format(&strata), rational::format(&brute));
    }
    let named = [(library::symmetric(3), rat(1, 2)), (library::dihedral(4), rat(5, 8)), (library::quaternion(), rat(5, 8)), (library::symmetric(4), rat(5, 24))];
    for (g, v) in named {
        ensure!(dc::dc_strata(&g, mode)? == v, "{}: expected {}", g.name(), rational::format(&v));
    }
    Ok(Ok(format!("{} groups agree", corpus.len())))
}

fn infinite_anchors(mode: Execution) -> Result<std::result::Result<String, String>> {
    let cap = coset::QUOTIENT_CAP;
    let cases = [
        (library::infinite_dihedral(), rat(1, 4), vec![3, 5, 7, 9, 11, 13]),
        (library::mod2_symplectic(), rat(5, 8), vec![2, 4, 6]),
        (library::integral_heisenberg(), rat(0, 1), vec![2, 3, 5]),
        (library::z2_rot4(), rat(1, 16), vec![2, 3, 4, 5]),
    ];
    let mut notes = Vec::new();
    for (g, expected, moduli) in cases {
        let table = dc::centralizer_strata(&g, mode)?;
        ensure!(table.dc() == expected, "{}: strata give {}", g.name(), rational::format(&table.dc()));
        let report = dc::dc_rf_chain(&dc::congruence_family(&g, &moduli)?, cap, mode)?;
        for (k, t) in moduli.iter().zip(&report.terms) {
            ensure!(t.dc >= expected, "{}: quotient mod {k} has dc below the strata value", g.name());
            let brute = dc::dc_finite(&coset::quotient(&dc::congruence_subgroup(&g, *k)?, cap)?.0, Execution::Sequential)?;
            ensure!(brute == t.dc, "{}: chain term mod {k} disagrees with brute force", g.name());
        }
        notes.push(format!("{}={}", g.name(), rational::format(&expected)));
        if g.name() == "D_inf" {
            let want = [rat(1, 2), rat(2, 5), rat(5, 14)];
            ensure!(report.terms.iter().take(3).map(|t| &t.dc).eq(want.iter()), "dihedral chain values differ");
            for (k, t) in moduli.iter().zip(&report.terms) {
                ensure!(t.dc <= rat(1, 4) + rat(1, *k), "D_{k} exceeds 1/4 + 1/{k}");
            }
        }
        if g.name() == "Heis_Z" {
            for (p, t) in moduli.iter().zip(&report.terms) {
                let want = rat(p * p + p - 1, p * p * p);
                ensure!(t.dc == want && t.order == (p * p * p) as u64, "Heisenberg mod {p}: {}", rational::format(&t.dc));
            }
        }
    }
    let d = library::infinite_dihedral();
    let nested = QuotientChain::nested([2, 4, 8, 16].iter().map(|&k| dc::congruence_subgroup(&d, k)).collect::<Result<_>>()?)?;
    ensure!(dc::dc_rf_chain(&nested, cap, mode)?.non_increasing == Some(true), "nested dihedral chain increases");
    Ok(Ok(notes.join(", ")))
}

fn faf_corpus() -> Vec<GroupHandle> {
    let mut all = library::finite_corpus();
    all.extend(library::infinite_corpus());
    all.push(library::heisenberg_f2(1));
    all.push(library::heisenberg_f2(2));
    all
}

fn faf_dichotomy(mode: Execution) -> Result<std::result::Result<String, String>> {
    let mut faf = 0;
    let corpus = faf_corpus();
    for g in &corpus {
        let positive = !dc::dc_strata(g, mode)?.is_zero();
        let w = dc::faf_witness(g)?;
        ensure!(w.is_faf() == positive, "{}: FAF {} but dc positive {}", g.name(), w.is_faf(), positive);
        faf += w.is_faf() as usize;
    }
    Ok(Ok(format!("{} groups, {faf} FAF", corpus.len())))
}

fn random_finite_index(g: &GroupHandle, rng: &mut ChaCha8Rng, subs: &HashMap<u64, Vec<Subgroup>>) -> Result<Subgroup> {
    if g.is_finite() {
        return Ok(subs[&g.id()].choose(rng).unwrap().clone());
    }
    let mut gens = dc::congruence_subgroup(g, rng.gen_range(1..=3))?.canonical_generators();
    for _ in 0..rng.gen_range(0..=1) {
        gens.push(g.random_element(rng, 2));
    }
    Subgroup::generated(g, &gens)
}

fn random_infinite_index(g: &GroupHandle, rng: &mut ChaCha8Rng) -> Result<Subgroup> {
    for _ in 0..8 {
        let h = Subgroup::generated(g, &[g.random_element(rng, 2)])?;
        if !h.has_finite_index() {
            return Ok(h);
        }
    }
    Ok(Subgroup::trivial(g))
}

/// Cosets of a finite-index subgroup, merged at random into at most three atoms.
fn random_partition(h: &Subgroup, rng: &mut ChaCha8Rng) -> Result<Vec<CosetRingElement>> {
    let g = h.group();
    let reps = coset::left_transversal(h)?;
    let parts = rng.gen_range(1..=reps.len().min(3));
    let mut atoms = vec![CosetRingElement::empty(g); parts];
    for (i, r) in reps.iter().enumerate() {
        let slot = if i < parts { i } else { rng.gen_range(0..parts) };
        atoms[slot] = atoms[slot].union(&CosetRingElement::from_coset(&Coset::new(h, r)?))?;
    }
    Ok(atoms)
}

fn random_targets(n: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|x| rat(x, total)).collect()
}

/// Largest share of `F` in one coset of `h`, and the number of cosets met.
fn coset_shares(h: &Subgroup, f: &[Element]) -> (Rational, usize) {
    let classes = distinct_classes(h, f, usize::MAX);
    let top = classes.iter().map(|c| c.len()).max().unwrap_or(0);
    (rat(top as i64, f.len() as i64), classes.len())
}

fn folner_ratio_oracle(g: &GroupHandle, f: &[Element], x: &Element) -> Rational {
    let set: HashSet<&Element> = f.iter().collect();
    let moved: HashSet<Element> = f.iter().map(|y| g.mul(x, y)).collect();
    let sym = f.iter().filter(|y| !moved.contains(*y)).count() + moved.iter().filter(|y| !set.contains(y)).count();
    rat(sym as i64, f.len() as i64)
}

fn atom_share(atom: &CosetRingElement, f: &[Element]) -> Rational {
    rat(f.iter().filter(|x| atom.contains(x)).count() as i64, f.len() as i64)
}

fn witness_certificates(mode: Execution) -> Result<std::result::Result<String, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let opts = WitnessOptions { mode, ..WitnessOptions::default() };
    let finite: Vec<GroupHandle> = library::finite_corpus().into_iter().filter(|g| g.order().unwrap() <= 24).collect();
    let affine = vec![library::integers(), library::z2(), library::infinite_dihedral(), library::z2_rot4(), library::z2_swap()];
    let pairing = vec![library::mod2_symplectic(), library::integral_heisenberg(), library::heisenberg_f2(1), library::heisenberg_f2(2)];
    let mut subs = HashMap::new();
    for g in finite.iter().chain(&pairing).filter(|g| g.is_finite()) {
        let list = if g.as_cayley().is_some() {
            subgroup::all_subgroups(g)?
        } else {
            let mut v = Vec::new();
            for _ in 0..12 {
                v.push(Subgroup::generated(g, &[g.random_element(&mut rng, 1)])?);
            }
            v
        };
        subs.insert(g.id(), list);
    }
    let mut counts = [0usize; 4];
    for (class, groups) in [("finite", &finite), ("affine", &affine), ("pairing", &pairing)] {
        for req in 0..100 {
            let g = groups.choose(&mut rng).unwrap();
            let ops: &[usize] = if g.is_finite() { &[0, 1, 3] } else { &[0, 1, 2, 3] };
            let op = ops[req % ops.len()];
            counts[op] += 1;
            let ctx = format!("{class} request {req} on {}", g.name());
            match op {
                0 => {
                    let mut cs = Vec::new();
                    for _ in 0..rng.gen_range(1..=2) {
                        cs.push(Constraint { subgroup: random_finite_index(g, &mut rng, &subs)?, tolerance: rat(1, rng.gen_range(2..=4)) });
                    }
                    if !g.is_finite() {
                        for _ in 0..rng.gen_range(0..=2) {
                            cs.push(Constraint { subgroup: random_infinite_index(g, &mut rng)?, tolerance: rat(1, rng.gen_range(2..=5)) });
                        }
                    }
                    let w = witness::build_witness(g, &cs, opts)?;
                    for c in &cs {
                        let (top, met) = coset_shares(&c.subgroup, &w.elements);
                        match c.subgroup.index().finite() {
                            Some(k) => ensure!(met as u64 == k && top == rat(1, k as i64), "{ctx}: uneven coset proportions"),
                            None => ensure!(top < c.tolerance, "{ctx}: deviation {} not below tolerance", rational::format(&top)),
                        }
                    }
                }
                1 | 2 => {
                    let h = random_finite_index(g, &mut rng, &subs)?;
                    let atoms = random_partition(&h, &mut rng)?;
                    let (targets, n) = if g.is_finite() {
                        (atoms.iter().map(|a| a.measure()).collect(), rng.gen_range(1..=g.order().unwrap() as usize))
                    } else {
                        (random_targets(atoms.len(), &mut rng), rng.gen_range(1..=10))
                    };
                    let list: Vec<Atom> = atoms.iter().zip(&targets).map(|(a, t)| Atom { set: AtomSet::Ring(a.clone()), target: t.clone() }).collect();
                    let shifts: Vec<Element> = if op == 2 {
                        (0..rng.gen_range(1..=2)).map(|_| g.random_element(&mut rng, 2)).filter(|s| !g.is_identity(s)).collect()
                    } else {
                        Vec::new()
                    };
                    let w = if op == 1 {
                        witness::approximate_mean(g, &list, n, opts)?
                    } else {
                        witness::disjoint_translates_witness(g, &list, n, &shifts, opts)?
                    };
                    ensure!(w.elements.len() == n, "{ctx}: size {} instead of {n}", w.elements.len());
                    for (a, t) in atoms.iter().zip(&targets) {
                        let dev = rational::abs(&(atom_share(a, &w.elements) - t));
                        ensure!(dev <= rat(1, n as i64), "{ctx}: atom deviation {}", rational::format(&dev));
                    }
                    let set: HashSet<&Element> = w.elements.iter().collect();
                    ensure!(set.len() == n, "{ctx}: repeated elements");
                    for s in &shifts {
                        ensure!(w.elements.iter().all(|x| !set.contains(&g.mul(s, x))), "{ctx}: translate overlaps");
                    }
                }
                _ => {
                    let h = random_finite_index(g, &mut rng, &subs)?;
                    let mut atoms = random_partition(&h, &mut rng)?;
                    if !g.is_finite() && rng.gen_bool(0.5) {
                        let c = CosetRingElement::from_coset(&Coset::new(&random_infinite_index(g, &mut rng)?, &g.random_element(&mut rng, 2))?);
                        let first = atoms.remove(0);
                        atoms.insert(0, first.difference(&c)?);
                        atoms.insert(1, first.meet(&c)?);
                    }
                    let k: Vec<Element> = g.generators().iter().take(2).cloned().collect();
                    let eps = if matches!(g.kind(), GroupKind::CentralPairing(_)) && !g.is_finite() { rat(1, 2) } else { rat(1, rng.gen_range(2..=3)) };
                    let w = witness::folner_amplify(g, &atoms, &k, &eps, opts)?;
                    for a in &atoms {
                        let dev = rational::abs(&(atom_share(a, &w.elements) - a.measure()));
                        ensure!(dev < eps, "{ctx}: atom deviation {}", rational::format(&dev));
                    }
                    for (x, reported) in k.iter().zip(&w.certificate.folner_ratios) {
                        let r = folner_ratio_oracle(g, &w.elements, x);
                        ensure!(r < eps && r == *reported, "{ctx}: boundary ratio {}", rational::format(&r));
                    }
                    let distinct: HashSet<&Element> = w.elements.iter().collect();
                    ensure!(distinct.len() == w.elements.len(), "{ctx}: translates of the Følner set overlap");
                }
            }
        }
    }
    Ok(Ok(format!(
        "300 requests: {} subgroup, {} partition, {} disjoint-translate, {} amplified",
        counts[0], counts[1], counts[2], counts[3]
    )))
}

fn brute_defect(mu: &MeanVector) -> Rational {
    let t = mu.group().as_cayley().unwrap();
    let n = t.order();
    let w = mu.weights();
    let mut best = rational::zero();
    for mask in 0u32..(1 << n) {
        let a: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let ma: Rational = a.iter().map(|&i| w[i].clone()).sum();
        for g in 0..n {
            let mga: Rational = a.iter().map(|&i| w[t.mul(g, i)].clone()).sum();
            let d = rational::abs(&(mga - &ma));
            if d > best {
                best = d;
            }
        }
    }
    best
}

fn defects_and_smoothing(mode: Execution) -> Result<std::result::Result<String, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let mut checked = 0;
    for g in library::tiny_corpus() {
        ensure!(mean::defect_left(&MeanVector::uniform(&g)?, mode).is_zero(), "{}: uniform mean has a defect", g.name());
        for _ in 0..50 {
            let mu = MeanVector::random(&g, &mut rng)?;
            ensure!(mean::defect_left(&mu, mode) == brute_defect(&mu), "{}: TV defect differs from subset search", g.name());
            checked += 1;
        }
    }
    let mut smoothed = 0;
    let mut strict = 0;
    for g in library::finite_corpus().into_iter().filter(|g| g.order().unwrap() <= 12) {
        for _ in 0..100 {
            let mu = MeanVector::random(&g, &mut rng)?;
            let (_, r) = mean::smoothing_report(&mu, mode);
            ensure!(r.holds, "{}: smoothing bound fails", g.name());
            if r.right_before < rational::one() && !r.left_before.is_zero() {
                ensure!(r.left_after < r.left_before, "{}: smoothing did not strictly decrease the defect", g.name());
                strict += 1;
            }
            smoothed += 1;
        }
    }
    Ok(Ok(format!("{checked} subset comparisons, {smoothed} smoothings ({strict} strict)")))
}

fn conjugacy_counts(mode: Execution) -> Result<std::result::Result<String, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let corpus = library::finite_corpus();
    let mut checks = 0;
    for g in &corpus {
        let k = mean::k_uniform(g)?;
        ensure!(k == dc::dc_finite(g, mode)?, "{}: k(G) differs from dc", g.name());
        let uniform = MeanVector::uniform(g)?;
        let derived = subgroup::derived_subgroup(g)?.order().unwrap();
        ensure!(mean::k_mu(&uniform)? >= rat(1, derived as i64), "{}: k below 1/|G'|", g.name());
        let means = [uniform, MeanVector::random(g, &mut rng)?];
        for mu in &means {
            for n in 1..=g.order().unwrap() {
                let r = mean::kmu_strata_inequality(mu, n)?;
                ensure!(r.holds, "{}: (n+1)k_mu > 1 + n mu(X_n) at n = {n}", g.name());
                checks += 1;
            }
        }
    }
    Ok(Ok(format!("{} groups, {checks} inequality checks", corpus.len())))
}

fn gustafson_gallagher(mode: Execution) -> Result<std::result::Result<String, String>> {
    let mut pairs = 0;
    for g in library::finite_corpus() {
        let d = dc::dc_finite(&g, mode)?;
        let abelian = g.as_cayley().unwrap().is_abelian();
        ensure!((d == rational::one()) == abelian, "{}: dc = 1 disagrees with commutativity", g.name());
        ensure!(abelian || d <= rat(5, 8), "{}: dc {} above 5/8", g.name(), rational::format(&d));
        for n in subgroup::normal_subgroups(&g)? {
            let r = dc::gallagher_check(&n, mode)?;
            ensure!(r.holds, "{}: Gallagher fails for a normal subgroup of order {:?}", g.name(), n.order());
            pairs += 1;
        }
    }
    Ok(Ok(format!("{pairs} normal pairs")))
}

fn heisenberg_transversal(_: Execution) -> Result<std::result::Result<String, String>> {
    let heis = library::heisenberg_f2(2);
    let (h, reps) = coset::to_cayley(&heis, 64)?;
    let l_members: Vec<Element> = reps
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r, Element::Pairing { a, .. } if a[0] == 0))
        .map(|(i, _)| Element::Cayley(i))
        .collect();
    let l = Subgroup::generated(&h, &l_members)?;
    ensure!(l.index().finite() == Some(2), "the subgroup x1 = 0 should have index 2");
    let p = dc::square(&h)?;
    let e = h.as_cayley().unwrap().identity();
    let mut kgens = Vec::new();
    for x in l.canonical_generators() {
        let Element::Cayley(i) = x else { unreachable!() };
        kgens.push(dc::pair(&h, i, e));
        kgens.push(dc::pair(&h, e, i));
    }
    let k = Subgroup::generated(&p, &kgens)?;
    let cosets = coset::left_transversal(&k)?;
    ensure!(cosets.len() == 4, "K should have index 4");
    let t = h.as_cayley().unwrap();
    for g in &cosets {
        let Some(found) = dc::commuting_transversal(&h, &k, g)? else {
            return Ok(Err(format!("coset of {} has no commuting pair", p.format_element(g))));
        };
        let (a, b) = dc::unpair(&h, &found);
        ensure!(t.commute(a, b) && k.contains(&p.mul(&p.inv(g), &found)), "returned pair is not a commuting element of the coset");
    }
    Ok(Ok(format!("{} cosets, each with a commuting pair", cosets.len())))
}
