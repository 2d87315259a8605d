//! Finite sets that approximate coset proportions, partitions and invariance.
//!
//! Every "pick an element" step scans the group shell by shell in the fixed
//! element order and commits greedily. Keys for a shell may be computed in
//! parallel; commits are always sequential, so the output never depends on
//! the execution mode.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::coset_ring::CosetRingElement;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::group::{Element, ExtendedIndex, GroupHandle, GroupKind};
use crate::lattice::IVec;
use crate::rational::{self, Rational};
use crate::subgroup::Subgroup;

#[derive(Clone, Copy, Debug)]
pub struct WitnessOptions {
    /// Largest shell radius scanned before giving up.
    pub horizon: u64,
    /// Largest Følner box side tried.
    pub max_side: u64,
    pub mode: Execution,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { horizon: 512, max_side: 4096, mode: Execution::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub subgroup: Subgroup,
    pub tolerance: Rational,
}

#[derive(Clone, Debug)]
pub enum AtomSet {
    Ring(CosetRingElement),
    Finite(Vec<Element>),
}

#[derive(Clone, Debug)]
pub struct Atom {
    pub set: AtomSet,
    pub target: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Certificate {
    #[serde(serialize_with = "ser_rats")]
    pub subgroup_deviations: Vec<Rational>,
    #[serde(serialize_with = "ser_rats")]
    pub atom_deviations: Vec<Rational>,
    pub disjoint: Vec<bool>,
    #[serde(serialize_with = "ser_rats")]
    pub folner_ratios: Vec<Rational>,
}

fn ser_rats<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::format))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessSet {
    pub elements: Vec<Element>,
    pub certificate: Certificate,
}

/// `max_g |#(gH ∩ F)/|F| − 1/[G:H]|`. Cosets missing from `F` contribute `1/[G:H]`.
pub fn subgroup_deviation(h: &Subgroup, elements: &[Element]) -> Rational {
    let n = elements.len() as i64;
    let target = h.index().reciprocal();
    let mut counts: HashMap<Element, i64> = HashMap::new();
    for x in elements {
        *counts.entry(h.coset_rep(x)).or_default() += 1;
    }
    let mut worst = match h.index() {
        ExtendedIndex::Finite(k) if counts.len() < k as usize => target.clone(),
        _ => rational::zero(),
    };
    for &c in counts.values() {
        let d = (rational::rat(c, n) - &target).abs();
        if d > worst {
            worst = d;
        }
    }
    worst
}

/// `|F ⊕ gF| / |F|`.
pub fn folner_ratio(group: &GroupHandle, elements: &[Element], g: &Element) -> Rational {
    let set: HashSet<&Element> = elements.iter().collect();
    let gi = group.inv(g);
    let kept = elements.iter().filter(|x| set.contains(&group.mul(&gi, x))).count();
    rational::rat(2 * (elements.len() - kept) as i64, elements.len() as i64)
}

/// Whether `F ∩ sF = ∅`.
pub fn translate_disjoint(group: &GroupHandle, elements: &[Element], s: &Element) -> bool {
    let set: HashSet<&Element> = elements.iter().collect();
    elements.iter().all(|x| !set.contains(&group.mul(s, x)))
}

struct AtomIndex {
    atoms: Vec<Atom>,
    explicit: Vec<Option<HashSet<Element>>>,
}

impl AtomIndex {
    fn new(atoms: Vec<Atom>) -> Self {
        let explicit = atoms
            .iter()
            .map(|a| match &a.set {
                AtomSet::Finite(xs) => Some(xs.iter().cloned().collect()),
                AtomSet::Ring(_) => None,
            })
            .collect();
        AtomIndex { atoms, explicit }
    }

    fn contains(&self, i: usize, x: &Element) -> bool {
        match (&self.atoms[i].set, &self.explicit[i]) {
            (_, Some(set)) => set.contains(x),
            (AtomSet::Ring(r), None) => r.contains(x),
            _ => unreachable!(),
        }
    }

    fn locate(&self, x: &Element) -> Option<usize> {
        (0..self.atoms.len()).find(|&i| self.contains(i, x))
    }
}

/// `|{x ∈ F : x ∈ A}|/|F| − target`, in absolute value.
pub fn atom_deviation(group: &GroupHandle, atom: &Atom, elements: &[Element]) -> Rational {
    let idx = AtomIndex::new(vec![atom.clone()]);
    let _ = group;
    let hits = elements.iter().filter(|x| idx.contains(0, x)).count();
    (rational::rat(hits as i64, elements.len() as i64) - &atom.target).abs()
}

/// Recomputes every certificate field from the element list.
pub fn certify(
    group: &GroupHandle,
    elements: &[Element],
    constraints: &[Constraint],
    atoms: &[Atom],
    disjoint_from: &[Element],
    folner: &[Element],
) -> Certificate {
    Certificate {
        subgroup_deviations: constraints.iter().map(|c| subgroup_deviation(&c.subgroup, elements)).collect(),
        atom_deviations: atoms.iter().map(|a| atom_deviation(group, a, elements)).collect(),
        disjoint: disjoint_from.iter().map(|s| translate_disjoint(group, elements, s)).collect(),
        folner_ratios: folner.iter().map(|g| folner_ratio(group, elements, g)).collect(),
    }
}

/// Elements of the group shell by shell, up to the horizon.
fn shells(group: &GroupHandle, horizon: u64) -> impl Iterator<Item = Vec<Element>> + '_ {
    let top = group.max_radius().map_or(horizon, |m| m.min(horizon));
    (0..=top).map(move |r| group.shell(r))
}

fn check_group(group: &GroupHandle, xs: &[Element]) -> Result<()> {
    xs.iter().try_for_each(|x| group.check(x))
}

/// At most one chosen element per coset of each listed subgroup, exactly `r`
/// per coset of the common finite-index part.
pub fn build_witness(group: &GroupHandle, constraints: &[Constraint], opts: WitnessOptions) -> Result<WitnessSet> {
    for c in constraints {
        if *c.subgroup.group() != *group {
            return Err(Error::MixedGroups);
        }
        if !c.tolerance.is_positive() {
            return Err(Error::InvalidRequest("tolerances must be positive".into()));
        }
    }
    let mut d = Subgroup::whole(group);
    for c in constraints.iter().filter(|c| c.subgroup.has_finite_index()) {
        d = d.intersect(&c.subgroup)?;
    }
    let d_index = d.index().finite().unwrap();
    let infinite: Vec<&Constraint> = constraints.iter().filter(|c| !c.subgroup.has_finite_index()).collect();
    let r = match infinite.iter().map(|c| &c.tolerance).min() {
        None => 1,
        Some(eps) => {
            // Least r with 1/(r·[G:D]) < ε.
            let bound = (rational::one() / (eps * rational::int(d_index as i64))).floor();
            bound.to_integer().to_u64().unwrap() + 1
        }
    };
    let total = (r * d_index) as usize;
    let mut per_d: HashMap<Element, u64> = HashMap::new();
    let mut used: Vec<HashSet<Element>> = vec![HashSet::new(); infinite.len()];
    let mut chosen = Vec::with_capacity(total);
    'scan: for shell in shells(group, opts.horizon) {
        let keys = exec::map(opts.mode, &shell, |x| {
            (d.coset_rep(x), infinite.iter().map(|c| c.subgroup.coset_rep(x)).collect::<Vec<_>>())
        });
        for (x, (dk, ks)) in shell.into_iter().zip(keys) {
            let count = per_d.get(&dk).copied().unwrap_or(0);
            if count >= r || ks.iter().zip(&used).any(|(k, u)| u.contains(k)) {
                continue;
            }
            per_d.insert(dk, count + 1);
            for (k, u) in ks.into_iter().zip(used.iter_mut()) {
                u.insert(k);
            }
            chosen.push(x);
            if chosen.len() == total {
                break 'scan;
            }
        }
    }
    if chosen.len() < total {
        return Err(Error::EnumerationExhausted { radius: opts.horizon });
    }
    let certificate = certify(group, &chosen, constraints, &[], &[], &[]);
    for (c, dev) in constraints.iter().zip(&certificate.subgroup_deviations) {
        let ok = if c.subgroup.has_finite_index() { dev.is_zero() } else { *dev < c.tolerance };
        if !ok {
            return Err(Error::InvariantViolation(format!(
                "deviation {} for a subgroup of index {}",
                rational::format(dev),
                c.subgroup.index()
            )));
        }
    }
    Ok(WitnessSet { elements: chosen, certificate })
}

/// `⌊t_i N⌋` topped up by one for the largest remainders until the sizes sum to `N`.
pub fn quotas(targets: &[Rational], n: usize) -> Vec<usize> {
    let scaled: Vec<Rational> = targets.iter().map(|t| t * rational::int(n as i64)).collect();
    let mut q: Vec<usize> = scaled.iter().map(|s| s.floor().to_integer().to_usize().unwrap()).collect();
    let missing = n - q.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| (&scaled[b] - scaled[b].floor()).cmp(&(&scaled[a] - scaled[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().take(missing) {
        q[i] += 1;
    }
    q
}

fn validate_atoms(group: &GroupHandle, atoms: &[Atom]) -> Result<Vec<Atom>> {
    if atoms.is_empty() {
        return Err(Error::NotAPartition("no atoms".into()));
    }
    if atoms.iter().any(|a| a.target.is_negative()) {
        return Err(Error::InvalidRequest("targets must be non-negative".into()));
    }
    if atoms.iter().map(|a| a.target.clone()).sum::<Rational>() != rational::one() {
        return Err(Error::InvalidRequest("targets must sum to 1".into()));
    }
    if group.is_finite() {
        let all = group.elements()?;
        let mut explicit = Vec::with_capacity(atoms.len());
        let mut owner: HashMap<Element, usize> = HashMap::new();
        for (i, a) in atoms.iter().enumerate() {
            let xs: Vec<Element> = match &a.set {
                AtomSet::Finite(xs) => {
                    check_group(group, xs)?;
                    let mut xs = xs.clone();
                    xs.sort();
                    xs.dedup();
                    xs
                }
                AtomSet::Ring(r) => {
                    if r.group() != group {
                        return Err(Error::MixedGroups);
                    }
                    all.iter().filter(|x| r.contains(x)).cloned().collect()
                }
            };
            for x in &xs {
                if let Some(j) = owner.insert(x.clone(), i) {
                    return Err(Error::NotAPartition(format!("atoms {j} and {i} overlap")));
                }
            }
            explicit.push(Atom { set: AtomSet::Finite(xs), target: a.target.clone() });
        }
        if owner.len() != all.len() {
            return Err(Error::NotAPartition("atoms do not cover the group".into()));
        }
        return Ok(explicit);
    }
    let mut rings = Vec::with_capacity(atoms.len());
    for a in atoms {
        match &a.set {
            AtomSet::Ring(r) if r.group() == group => rings.push(r),
            AtomSet::Ring(_) => return Err(Error::MixedGroups),
            AtomSet::Finite(_) => {
                return Err(Error::InvalidRequest("explicit atoms are only accepted in finite groups".into()))
            }
        }
    }
    for i in 0..rings.len() {
        for j in i + 1..rings.len() {
            if !rings[i].meet(rings[j])?.is_empty() {
                return Err(Error::NotAPartition(format!("atoms {i} and {j} overlap")));
            }
        }
    }
    if rings.iter().map(|r| r.measure()).sum::<Rational>() != rational::one() {
        return Err(Error::NotAPartition("atom measures do not sum to 1".into()));
    }
    Ok(atoms.to_vec())
}

fn select_by_atoms(
    group: &GroupHandle,
    index: &AtomIndex,
    quota: &[usize],
    disjoint_from: &[Element],
    opts: WitnessOptions,
) -> Result<Vec<Element>> {
    let total: usize = quota.iter().sum();
    let mut count = vec![0usize; quota.len()];
    let mut chosen: Vec<Element> = Vec::with_capacity(total);
    let mut taken: HashSet<Element> = HashSet::new();
    let inverses: Vec<Element> = disjoint_from.iter().map(|s| group.inv(s)).collect();
    if total > 0 {
        'scan: for shell in shells(group, opts.horizon) {
            let owners = exec::map(opts.mode, &shell, |x| index.locate(x));
            for (x, owner) in shell.into_iter().zip(owners) {
                let Some(i) = owner else { continue };
                if count[i] >= quota[i] {
                    continue;
                }
                let clash = disjoint_from
                    .iter()
                    .zip(&inverses)
                    .any(|(s, si)| taken.contains(&group.mul(s, &x)) || taken.contains(&group.mul(si, &x)));
                if clash {
                    continue;
                }
                count[i] += 1;
                taken.insert(x.clone());
                chosen.push(x);
                if chosen.len() == total {
                    break 'scan;
                }
            }
        }
    }
    if chosen.len() < total {
        let atom = (0..quota.len()).find(|&i| count[i] < quota[i]).unwrap();
        if group.is_finite() {
            return Err(Error::AtomTooSmall { atom, quota: quota[atom] });
        }
        return Err(Error::EnumerationExhausted { radius: opts.horizon });
    }
    Ok(chosen)
}

fn mean_witness(
    group: &GroupHandle,
    atoms: &[Atom],
    n: usize,
    disjoint_from: &[Element],
    opts: WitnessOptions,
) -> Result<WitnessSet> {
    if n == 0 {
        return Err(Error::InvalidRequest("witness size must be positive".into()));
    }
    check_group(group, disjoint_from)?;
    if disjoint_from.iter().any(|s| group.is_identity(s)) {
        return Err(Error::InvalidRequest("translation set must exclude the identity".into()));
    }
    let atoms = validate_atoms(group, atoms)?;
    let targets: Vec<Rational> = atoms.iter().map(|a| a.target.clone()).collect();
    let quota = quotas(&targets, n);
    for (i, a) in atoms.iter().enumerate() {
        if let AtomSet::Finite(xs) = &a.set {
            if xs.len() < quota[i] {
                return Err(Error::AtomTooSmall { atom: i, quota: quota[i] });
            }
        }
    }
    let index = AtomIndex::new(atoms.clone());
    let chosen = select_by_atoms(group, &index, &quota, disjoint_from, opts)?;
    let certificate = certify(group, &chosen, &[], &atoms, disjoint_from, &[]);
    let bound = rational::rat(1, n as i64);
    if certificate.atom_deviations.iter().any(|d| *d > bound) || certificate.disjoint.iter().any(|ok| !ok) {
        return Err(Error::InvariantViolation("partition witness failed its certificate".into()));
    }
    Ok(WitnessSet { elements: chosen, certificate })
}

/// `N` elements distributed over a partition with `|#(F ∩ A_i)/N − t_i| ≤ 1/N`.
pub fn approximate_mean(group: &GroupHandle, atoms: &[Atom], n: usize, opts: WitnessOptions) -> Result<WitnessSet> {
    mean_witness(group, atoms, n, &[], opts)
}

/// As [`approximate_mean`], additionally with `F ∩ sF = ∅` for every `s` listed.
pub fn disjoint_translates_witness(
    group: &GroupHandle,
    atoms: &[Atom],
    n: usize,
    disjoint_from: &[Element],
    opts: WitnessOptions,
) -> Result<WitnessSet> {
    mean_witness(group, atoms, n, disjoint_from, opts)
}

/// Coordinate box of side `side`, centred as `[-⌊L/2⌋, ⌈L/2⌉ - 1]`.
fn box_range(side: u64) -> (i64, i64) {
    let l = side as i64;
    (-(l / 2), (l + 1) / 2 - 1)
}

fn box_vectors(dims: &[Option<(i64, i64)>], moduli: &[Option<i64>]) -> Vec<IVec> {
    let mut out: Vec<IVec> = vec![Vec::new()];
    for (range, m) in dims.iter().zip(moduli) {
        let vals: Vec<i64> = match (range, m) {
            (Some((lo, hi)), _) => (*lo..=*hi).collect(),
            (None, Some(d)) => (0..*d).collect(),
            (None, None) => unreachable!(),
        };
        let mut next = Vec::with_capacity(out.len() * vals.len());
        for v in &out {
            for &x in &vals {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// The box-shaped candidate set of side `side`.
fn folner_candidate(group: &GroupHandle, side: u64) -> Vec<Element> {
    match group.kind() {
        GroupKind::Finite(_) => group.elements().unwrap(),
        GroupKind::VirtuallyAbelian(s) => {
            let (lo, hi) = box_range(side);
            let dims = vec![Some((lo, hi)); s.rank()];
            let moduli = vec![None; s.rank()];
            let inside = |v: &IVec| v.iter().all(|x| (lo..=hi).contains(x));
            let mut out = Vec::new();
            for v in box_vectors(&dims, &moduli) {
                if (0..s.point().order()).all(|q| inside(&s.act(q, &v))) {
                    for q in 0..s.point().order() {
                        out.push(Element::Affine { v: v.clone(), q });
                    }
                }
            }
            out
        }
        GroupKind::CentralPairing(p) => {
            let a_box = box_range(side);
            let nu_box = box_range(side * side);
            type Dims = (Vec<Option<(i64, i64)>>, Vec<Option<i64>>);
            let dims_of = |ab: &crate::group::AbelianGroup, bx: (i64, i64)| -> Dims {
                (0..ab.dim()).map(|i| (ab.modulus(i).is_none().then_some(bx), ab.modulus(i))).unzip()
            };
            let (da, ma) = dims_of(p.base(), a_box);
            let (dn, mn) = dims_of(p.center(), nu_box);
            let avs = box_vectors(&da, &ma);
            let nvs = box_vectors(&dn, &mn);
            let mut out = Vec::with_capacity(avs.len() * nvs.len());
            for a in &avs {
                for nu in &nvs {
                    out.push(Element::Pairing { a: a.clone(), nu: nu.clone() });
                }
            }
            out
        }
    }
}

/// A finite `S` with `|S ⊕ gS|/|S| < ε` for every `g ∈ K`. Returns `S` in the
/// fixed order together with the achieved ratios.
pub fn folner_set(
    group: &GroupHandle,
    k: &[Element],
    eps: &Rational,
    opts: WitnessOptions,
) -> Result<(Vec<Element>, Vec<Rational>)> {
    check_group(group, k)?;
    if !eps.is_positive() {
        return Err(Error::InvalidRequest("tolerance must be positive".into()));
    }
    if k.is_empty() {
        return Ok((vec![group.identity()], Vec::new()));
    }
    for side in 1..=opts.max_side {
        let mut s = folner_candidate(group, side);
        let ratios: Vec<Rational> = exec::map(opts.mode, k, |g| folner_ratio(group, &s, g));
        if ratios.iter().all(|r| r < eps) {
            group.sort_elements(&mut s);
            return Ok((s, ratios));
        }
        if group.is_finite() {
            break;
        }
    }
    Err(Error::EnumerationExhausted { radius: opts.max_side })
}

/// `F = S·F₀`: a Følner set `S` for `K` right-multiplied by a core `F₀` whose
/// translates `S x` are pairwise disjoint and which approximates every atom
/// and every left translate `s⁻¹A` of it.
pub fn folner_amplify(
    group: &GroupHandle,
    atoms: &[CosetRingElement],
    k: &[Element],
    eps: &Rational,
    opts: WitnessOptions,
) -> Result<WitnessSet> {
    check_group(group, k)?;
    if !eps.is_positive() {
        return Err(Error::InvalidRequest("tolerance must be positive".into()));
    }
    let atom_list: Vec<Atom> =
        atoms.iter().map(|a| Atom { set: AtomSet::Ring(a.clone()), target: a.measure() }).collect();
    validate_atoms(group, &atom_list)?;
    if group.is_finite() {
        let mut all = group.elements()?;
        group.sort_elements(&mut all);
        let certificate = certify(group, &all, &[], &atom_list, &[], k);
        return Ok(WitnessSet { elements: all, certificate });
    }
    let (s, _) = folner_set(group, k, eps, opts)?;
    let mut d = Subgroup::whole(group);
    for a in atoms {
        d = d.intersect(a.denominator())?;
    }
    let d_index = d.index().finite().unwrap();
    let m = atoms.iter().map(|a| a.infinite_part().len()).max().unwrap_or(0) as u64;
    // Least r with r·[G:D] > m/ε.
    let need = rational::int(m as i64) / eps;
    let mut r = 1u64;
    while rational::int((r * d_index) as i64) <= need {
        r += 1;
    }
    let infinite_subgroups: Vec<Subgroup> = {
        let mut v: Vec<Subgroup> = atoms.iter().flat_map(|a| a.infinite_part().iter().map(|c| c.subgroup().clone())).collect();
        v.sort();
        v.dedup();
        v
    };
    let total = (r * d_index) as usize;
    let mut per_d: HashMap<Element, u64> = HashMap::new();
    let mut used: Vec<HashSet<Element>> = vec![HashSet::new(); infinite_subgroups.len()];
    let mut covered: HashSet<Element> = HashSet::new();
    let mut core = Vec::with_capacity(total);
    'scan: for shell in shells(group, opts.horizon) {
        let keys = exec::map(opts.mode, &shell, |x| {
            let dk = d.coset_rep(x);
            let ks: Vec<Element> = infinite_subgroups.iter().map(|h| h.coset_rep(x)).collect();
            let sx: Vec<Element> = s.iter().map(|t| group.mul(t, x)).collect();
            (dk, ks, sx)
        });
        for (x, (dk, ks, sx)) in shell.into_iter().zip(keys) {
            let count = per_d.get(&dk).copied().unwrap_or(0);
            if count >= r
                || ks.iter().zip(&used).any(|(key, u)| u.contains(key))
                || sx.iter().any(|y| covered.contains(y))
            {
                continue;
            }
            per_d.insert(dk, count + 1);
            for (key, u) in ks.into_iter().zip(used.iter_mut()) {
                u.insert(key);
            }
            covered.extend(sx);
            core.push(x);
            if core.len() == total {
                break 'scan;
            }
        }
    }
    if core.len() < total {
        return Err(Error::EnumerationExhausted { radius: opts.horizon });
    }
    let elements: Vec<Element> = core.iter().flat_map(|x| s.iter().map(move |t| group.mul(t, x))).collect();
    let certificate = certify(group, &elements, &[], &atom_list, &[], k);
    let ok = certificate.atom_deviations.iter().all(|d| d < eps)
        && certificate.folner_ratios.iter().all(|r| r < eps)
        && elements.len() == s.len() * core.len();
    if !ok {
        return Err(Error::InvariantViolation("amplified witness failed its certificate".into()));
    }
    Ok(WitnessSet { elements, certificate })
}

/// Convenience for tests and the CLI: `r` with `1/(r·k) < ε`.
pub fn copies_needed(index: u64, eps: &Rational) -> u64 {
    let bound = (Rational::one() / (eps * rational::int(index as i64))).floor();
    bound.to_integer().to_u64().unwrap() + 1
}
