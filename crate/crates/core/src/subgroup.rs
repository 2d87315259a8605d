//! Canonical subgroups and the subgroup algebra.
//!
//! Per class the canonical data is
//! - Cayley: the sorted member list;
//! - `ℤⁿ ⋊ Q`: the image `P ≤ Q`, the kernel lattice `L = H ∩ ℤⁿ` in HNF and,
//!   for each `p ∈ P`, the centred representative `t_p` of the translation
//!   class with `(t_p, p) ∈ H`;
//! - pairing groups: the base image `π(H)` and the central part `H ∩ N`, both
//!   as lattices containing the torsion relations, plus one central
//!   coordinate per HNF row of the base (reduced modulo `H ∩ N`).

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{AffineGroup, Element, ExtendedIndex, GroupHandle, GroupKind, PairingGroup};
use crate::lattice::{self, kernel, meet_translates, preimage, solve, transpose, IVec, Lattice};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SubgroupData {
    Finite { members: Vec<usize> },
    Affine { image: Vec<usize>, lattice: Lattice, corrections: Vec<IVec> },
    Pairing { base: Lattice, lifts: Vec<IVec>, central: Lattice },
}

#[derive(Clone)]
pub struct Subgroup {
    group: GroupHandle,
    data: Arc<SubgroupData>,
    gens: Arc<Vec<Element>>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.data == other.data
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.group.id().hash(state);
        self.data.hash(state);
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.group.id().cmp(&other.group.id()).then_with(|| self.data.cmp(&other.data))
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup({} of {:?})", self.index(), self.group)
    }
}

fn affine_parts(g: &GroupHandle) -> &AffineGroup {
    g.as_affine().expect("affine group")
}

fn pairing_parts(g: &GroupHandle) -> &PairingGroup {
    g.as_pairing().expect("pairing group")
}

fn split_affine(x: &Element) -> (&IVec, usize) {
    match x {
        Element::Affine { v, q } => (v, *q),
        _ => panic!("expected an affine element"),
    }
}

fn split_pairing(x: &Element) -> (&IVec, &IVec) {
    match x {
        Element::Pairing { a, nu } => (a, nu),
        _ => panic!("expected a pairing element"),
    }
}

fn sub(a: &[i64], b: &[i64]) -> IVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn affine_data(s: &AffineGroup, mut reps: Vec<(usize, IVec)>, lattice: Lattice) -> SubgroupData {
    reps.sort_by_key(|(p, _)| *p);
    reps.dedup_by_key(|(p, _)| *p);
    let image = reps.iter().map(|(p, _)| *p).collect();
    let corrections = reps.iter().map(|(_, t)| lattice.reduce_centered(t)).collect();
    let _ = s;
    SubgroupData::Affine { image, lattice, corrections }
}

fn pairing_data(p: &PairingGroup, base: Lattice, lifts: Vec<IVec>, central: Lattice) -> SubgroupData {
    debug_assert_eq!(lifts.len(), base.rank());
    let lifts = lifts.iter().map(|nu| p.center().reduced(central.reduce_centered(nu))).collect();
    SubgroupData::Pairing { base, lifts, central }
}

/// The element of `H` over `b ∈ π(H)` built as `ℓ₁^{c₁} ⋯ ℓ_k^{c_k}` from the
/// HNF coefficients of `b`; any other element over `b` differs by `H ∩ N`.
fn pairing_lift(g: &GroupHandle, base: &Lattice, lifts: &[IVec], b: &[i64]) -> Option<Element> {
    let p = pairing_parts(g);
    let coeffs = base.coefficients(b)?;
    let mut acc = g.identity();
    for ((row, nu), c) in base.basis().iter().zip(lifts).zip(coeffs) {
        if c == 0 {
            continue;
        }
        let ell = Element::Pairing { a: p.base().reduced(row.clone()), nu: nu.clone() };
        acc = g.mul(&acc, &g.pow(&ell, c));
    }
    Some(acc)
}

fn data_from_generators(g: &GroupHandle, gens: &[Element]) -> SubgroupData {
    match g.kind() {
        GroupKind::Finite(t) => {
            let idx: Vec<usize> = gens
                .iter()
                .map(|x| match x {
                    Element::Cayley(i) => *i,
                    _ => panic!("expected a Cayley element"),
                })
                .collect();
            SubgroupData::Finite { members: t.generated(&idx) }
        }
        GroupKind::VirtuallyAbelian(s) => {
            let q_order = s.point().order();
            let e = s.point().identity();
            let mut tau: Vec<Option<IVec>> = vec![None; q_order];
            tau[e] = Some(vec![0; s.rank()]);
            let mut queue = VecDeque::from([e]);
            let mut kernel_gens = Vec::new();
            while let Some(p) = queue.pop_front() {
                let tp = tau[p].clone().unwrap();
                for x in gens {
                    let (v, q) = split_affine(x);
                    let (w, pq) = s.mul((&tp, p), (v, q));
                    match &tau[pq] {
                        None => {
                            tau[pq] = Some(w);
                            queue.push_back(pq);
                        }
                        Some(t) => {
                            let d = sub(&w, t);
                            if d.iter().any(|&x| x != 0) {
                                kernel_gens.push(d);
                            }
                        }
                    }
                }
            }
            let lattice = Lattice::new(s.rank(), kernel_gens);
            let reps = tau.into_iter().enumerate().filter_map(|(p, t)| t.map(|t| (p, t))).collect();
            affine_data(s, reps, lattice)
        }
        GroupKind::CentralPairing(p) => {
            let ra = p.base().dim();
            let rn = p.center().dim();
            let rel_a = p.base().relations();
            let mut rows: Vec<IVec> = gens.iter().map(|x| split_pairing(x).0.clone()).collect();
            let k = rows.len();
            rows.extend(rel_a.basis().iter().cloned());
            let base = Lattice::new(ra, rows.clone());
            let word = |x: &[i64]| -> Element {
                let mut acc = g.identity();
                for (gj, &c) in gens.iter().zip(x) {
                    if c != 0 {
                        acc = g.mul(&acc, &g.pow(gj, c));
                    }
                }
                acc
            };
            let mut central_gens: Vec<IVec> = p.center().relations().basis().to_vec();
            for i in 0..k {
                for j in i + 1..k {
                    central_gens.push(p.pairing(split_pairing(&gens[i]).0, split_pairing(&gens[j]).0));
                }
            }
            for r in kernel(&rows, ra).basis() {
                let w = word(&r[..k]);
                central_gens.push(split_pairing(&w).1.clone());
            }
            let central = Lattice::new(rn, central_gens);
            let lifts = base
                .basis()
                .iter()
                .map(|b| {
                    let x = solve(&rows, ra, b).expect("basis row lies in the span");
                    split_pairing(&word(&x[..k])).1.clone()
                })
                .collect();
            pairing_data(p, base, lifts, central)
        }
    }
}

impl Subgroup {
    pub fn generated(group: &GroupHandle, gens: &[Element]) -> Result<Subgroup> {
        for x in gens {
            group.check(x)?;
        }
        Ok(Self::from_generators(group, gens.to_vec()))
    }

    pub(crate) fn from_generators(group: &GroupHandle, gens: Vec<Element>) -> Subgroup {
        let data = data_from_generators(group, &gens);
        Subgroup { group: group.clone(), data: Arc::new(data), gens: Arc::new(gens) }
    }

    fn from_data(group: &GroupHandle, data: SubgroupData) -> Subgroup {
        let mut s = Subgroup { group: group.clone(), data: Arc::new(data), gens: Arc::new(Vec::new()) };
        s.gens = Arc::new(s.canonical_generators());
        s
    }

    pub fn whole(group: &GroupHandle) -> Subgroup {
        Self::from_generators(group, group.generators().to_vec())
    }

    pub fn trivial(group: &GroupHandle) -> Subgroup {
        Self::from_generators(group, Vec::new())
    }

    pub fn group(&self) -> &GroupHandle {
        &self.group
    }

    pub fn data(&self) -> &SubgroupData {
        &self.data
    }

    /// The generator list the subgroup was built from.
    pub fn generators(&self) -> &[Element] {
        &self.gens
    }

    /// Generators read off the canonical data.
    pub fn canonical_generators(&self) -> Vec<Element> {
        match &*self.data {
            SubgroupData::Finite { members } => members.iter().map(|&i| Element::Cayley(i)).collect(),
            SubgroupData::Affine { image, lattice, corrections } => {
                let e = affine_parts(&self.group).point().identity();
                let mut out: Vec<Element> =
                    image.iter().zip(corrections).map(|(&q, t)| Element::Affine { v: t.clone(), q }).collect();
                out.extend(lattice.basis().iter().map(|b| Element::Affine { v: b.clone(), q: e }));
                out
            }
            SubgroupData::Pairing { base, lifts, central } => {
                let p = pairing_parts(&self.group);
                let mut out: Vec<Element> = base
                    .basis()
                    .iter()
                    .zip(lifts)
                    .map(|(b, nu)| Element::Pairing { a: p.base().reduced(b.clone()), nu: nu.clone() })
                    .collect();
                out.extend(
                    central
                        .basis()
                        .iter()
                        .map(|m| Element::Pairing { a: p.base().zero(), nu: p.center().reduced(m.clone()) }),
                );
                out
            }
        }
    }

    pub fn same_group(&self, other: &Subgroup) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::MixedGroups)
        }
    }

    pub fn contains(&self, x: &Element) -> bool {
        match (&*self.data, x) {
            (SubgroupData::Finite { members }, Element::Cayley(i)) => members.binary_search(i).is_ok(),
            (SubgroupData::Affine { image, lattice, corrections }, Element::Affine { v, q }) => {
                match image.binary_search(q) {
                    Ok(k) => lattice.contains(&sub(v, &corrections[k])),
                    Err(_) => false,
                }
            }
            (SubgroupData::Pairing { base, lifts, central }, Element::Pairing { a, nu }) => {
                match pairing_lift(&self.group, base, lifts, a) {
                    Some(w) => central.contains(&sub(nu, split_pairing(&w).1)),
                    None => false,
                }
            }
            _ => false,
        }
    }

    pub fn index(&self) -> ExtendedIndex {
        match &*self.data {
            SubgroupData::Finite { members } => {
                ExtendedIndex::Finite(self.group.order().unwrap() / members.len() as u64)
            }
            SubgroupData::Affine { image, lattice, .. } => {
                let q = affine_parts(&self.group).point().order() as u64;
                match lattice.index() {
                    Some(k) => ExtendedIndex::Finite(q / image.len() as u64 * k),
                    None => ExtendedIndex::Infinite,
                }
            }
            SubgroupData::Pairing { base, central, .. } => match (base.index(), central.index()) {
                (Some(x), Some(y)) => ExtendedIndex::Finite(x * y),
                _ => ExtendedIndex::Infinite,
            },
        }
    }

    pub fn has_finite_index(&self) -> bool {
        self.index().is_finite()
    }

    /// `|H|`, or `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        match &*self.data {
            SubgroupData::Finite { members } => Some(members.len() as u64),
            SubgroupData::Affine { image, lattice, .. } => (lattice.rank() == 0).then_some(image.len() as u64),
            SubgroupData::Pairing { base, central, .. } => {
                let p = pairing_parts(&self.group);
                let quotient = |l: &Lattice, rel: &Lattice| -> Option<u64> {
                    if l.rank() != rel.rank() {
                        return None;
                    }
                    let full: u64 = rel.basis().iter().zip(rel.pivots()).map(|(r, &c)| r[c] as u64).product();
                    let sub: u64 = l.basis().iter().zip(l.pivots()).map(|(r, &c)| r[c] as u64).product();
                    Some(full / sub)
                };
                Some(quotient(base, &p.base().relations())? * quotient(central, &p.center().relations())?)
            }
        }
    }

    pub fn is_whole(&self) -> bool {
        self.index() == ExtendedIndex::Finite(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == Some(1)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.group == other.group && self.gens.iter().all(|x| other.contains(x))
    }

    pub fn intersect(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_group(other)?;
        let g = &self.group;
        let data = match (&*self.data, &*other.data) {
            (SubgroupData::Finite { members: a }, SubgroupData::Finite { members: b }) => {
                let bs: BTreeSet<usize> = b.iter().copied().collect();
                SubgroupData::Finite { members: a.iter().copied().filter(|x| bs.contains(x)).collect() }
            }
            (
                SubgroupData::Affine { image: p1, lattice: l1, corrections: t1 },
                SubgroupData::Affine { image: p2, lattice: l2, corrections: t2 },
            ) => {
                let s = affine_parts(g);
                let mut reps = Vec::new();
                for (i, p) in p1.iter().enumerate() {
                    if let Ok(j) = p2.binary_search(p) {
                        if let Some(v) = meet_translates(&t1[i], l1, &t2[j], l2) {
                            reps.push((*p, v));
                        }
                    }
                }
                affine_data(s, reps, l1.intersect(l2))
            }
            (
                SubgroupData::Pairing { base: b1, lifts: f1, central: m1 },
                SubgroupData::Pairing { base: b2, lifts: f2, central: m2 },
            ) => {
                let p = pairing_parts(g);
                let j = b1.intersect(b2);
                let nu_of = |base: &Lattice, lifts: &[IVec], b: &[i64]| -> IVec {
                    split_pairing(&pairing_lift(g, base, lifts, b).expect("b lies in the base")).1.clone()
                };
                let delta: Vec<IVec> =
                    j.basis().iter().map(|b| sub(&nu_of(b1, f1, b), &nu_of(b2, f2, b))).collect();
                let coeffs = preimage(&delta, &m1.sum(m2));
                let base = Lattice::new(
                    p.base().dim(),
                    coeffs.basis().iter().map(|x| {
                        let mut v = vec![0; p.base().dim()];
                        for (xi, row) in x.iter().zip(j.basis()) {
                            for (vk, rk) in v.iter_mut().zip(row) {
                                *vk += xi * rk;
                            }
                        }
                        v
                    }),
                );
                let lifts = base
                    .basis()
                    .iter()
                    .map(|b| {
                        meet_translates(&nu_of(b1, f1, b), m1, &nu_of(b2, f2, b), m2)
                            .expect("lifts agree modulo the central sum")
                    })
                    .collect();
                pairing_data(p, base, lifts, m1.intersect(m2))
            }
            _ => unreachable!("subgroups of one group share a class"),
        };
        Ok(Subgroup::from_data(g, data))
    }

    pub fn join(&self, other: &Subgroup) -> Result<Subgroup> {
        self.same_group(other)?;
        let mut gens = self.gens.to_vec();
        gens.extend(other.gens.iter().cloned());
        Ok(Subgroup::from_generators(&self.group, gens))
    }

    /// `g H g⁻¹`.
    pub fn conjugate(&self, g: &Element) -> Subgroup {
        let gens = self.canonical_generators().iter().map(|h| self.group.conj(g, h)).collect();
        Subgroup::from_generators(&self.group, gens)
    }

    fn conjugators(&self) -> Vec<Element> {
        let gens = self.group.generators();
        let mut out = gens.to_vec();
        out.extend(gens.iter().map(|s| self.group.inv(s)));
        out
    }

    pub fn is_normal(&self) -> bool {
        let canon = self.canonical_generators();
        self.conjugators().iter().all(|s| canon.iter().all(|h| self.contains(&self.group.conj(s, h))))
    }

    /// The largest normal subgroup contained in `H`.
    pub fn normal_core(&self) -> Result<Subgroup> {
        let mut core = self.clone();
        for _ in 0..1000 {
            let mut next = core.clone();
            for s in self.conjugators() {
                next = next.intersect(&core.conjugate(&s))?;
            }
            if next == core {
                return Ok(core);
            }
            core = next;
        }
        Err(Error::UnsupportedForClass("normal core did not stabilise".into()))
    }

    /// Least element of `gH` in the fixed order.
    pub fn coset_rep(&self, x: &Element) -> Element {
        let g = &self.group;
        match (&*self.data, x) {
            (SubgroupData::Finite { members }, Element::Cayley(a)) => {
                let t = g.as_cayley().unwrap();
                let e = t.identity();
                let best = members.iter().map(|&h| t.mul(*a, h)).min_by_key(|&y| (y != e, y)).unwrap();
                Element::Cayley(best)
            }
            (SubgroupData::Affine { image, lattice, corrections }, Element::Affine { v, q }) => {
                let s = affine_parts(g);
                let moved = lattice.transform(s.action(*q));
                image
                    .iter()
                    .zip(corrections)
                    .map(|(&p, t)| {
                        let (w, qp) = s.mul((v, *q), (t, p));
                        Element::Affine { v: moved.reduce_centered(&w), q: qp }
                    })
                    .min_by(|a, b| g.cmp_elements(a, b))
                    .unwrap()
            }
            (SubgroupData::Pairing { base, lifts, central }, Element::Pairing { a, .. }) => {
                let p = pairing_parts(g);
                let target = base.reduce_centered(a);
                let shift = sub(&target, a);
                let h = pairing_lift(g, base, lifts, &shift).expect("shift lies in the base");
                let y = g.mul(x, &h);
                let nu = central.reduce_centered(split_pairing(&y).1);
                Element::Pairing { a: p.base().reduced(target), nu: p.center().reduced(nu) }
            }
            _ => panic!("element shape does not match {}", g.name()),
        }
    }

    /// Some element of `H ∩ yK`, if the coset `yK` meets `H`.
    pub fn meet_point(&self, y: &Element, k: &Subgroup) -> Option<Element> {
        let g = &self.group;
        match (&*self.data, &*k.data) {
            (SubgroupData::Finite { members }, _) => {
                let yi = g.inv(y);
                members.iter().map(|&h| Element::Cayley(h)).find(|h| k.contains(&g.mul(&yi, h)))
            }
            (
                SubgroupData::Affine { image: p1, lattice: l1, corrections: t1 },
                SubgroupData::Affine { image: p2, lattice: l2, corrections: t2 },
            ) => {
                let s = affine_parts(g);
                let (w, qy) = split_affine(y);
                let moved = l2.transform(s.action(qy));
                for (j, &p) in p2.iter().enumerate() {
                    let r = s.point().mul(qy, p);
                    if let Ok(i) = p1.binary_search(&r) {
                        let (shift, _) = s.mul((w, qy), (&t2[j], p));
                        if let Some(v) = meet_translates(&t1[i], l1, &shift, &moved) {
                            return Some(Element::Affine { v, q: r });
                        }
                    }
                }
                None
            }
            (
                SubgroupData::Pairing { base: b1, lifts: f1, central: m1 },
                SubgroupData::Pairing { base: b2, lifts: f2, central: m2 },
            ) => {
                let p = pairing_parts(g);
                let (ay, _) = split_pairing(y);
                let b0 = {
                    let mut rows = b1.basis().to_vec();
                    rows.extend(b2.basis().iter().cloned());
                    let x = solve(&rows, p.base().dim(), ay)?;
                    let mut v = vec![0; p.base().dim()];
                    for (xi, row) in x[b1.rank()..].iter().zip(b2.basis()) {
                        for (vk, rk) in v.iter_mut().zip(row) {
                            *vk -= xi * rk;
                        }
                    }
                    v
                };
                let j = b1.intersect(b2);
                let nu_of = |base: &Lattice, lifts: &[IVec], b: &[i64]| -> IVec {
                    split_pairing(&pairing_lift(g, base, lifts, b).expect("in base")).1.clone()
                };
                let y_k0 = g.mul(y, &pairing_lift(g, b2, f2, &b0).expect("b0 lies in K's base"));
                let (a0, nu0) = split_pairing(&y_k0);
                let f0 = sub(nu0, &nu_of(b1, f1, a0));
                let mut rows: Vec<IVec> =
                    j.basis().iter().map(|b| sub(&nu_of(b1, f1, b), &nu_of(b2, f2, b))).collect();
                let nj = rows.len();
                rows.extend(m1.sum(m2).basis().iter().cloned());
                let x = solve(&rows, p.center().dim(), &f0)?;
                let mut jv = vec![0; p.base().dim()];
                for (xi, row) in x[..nj].iter().zip(j.basis()) {
                    for (vk, rk) in jv.iter_mut().zip(row) {
                        *vk += xi * rk;
                    }
                }
                let bk: IVec = b0.iter().zip(&jv).map(|(x, y)| x + y).collect();
                let z = g.mul(y, &pairing_lift(g, b2, f2, &bk).expect("in K's base"));
                let (az, nuz) = split_pairing(&z);
                let target = nu_of(b1, f1, az);
                let fix = meet_translates(nuz, m2, &target, m1)?;
                let out = g.normalize(Element::Pairing { a: az.clone(), nu: fix });
                debug_assert!(self.contains(&out));
                Some(out)
            }
            _ => unreachable!("subgroups of one group share a class"),
        }
    }
}

/// `C_G(g)`.
pub fn centralizer(group: &GroupHandle, x: &Element) -> Result<Subgroup> {
    group.check(x)?;
    let data = match (group.kind(), x) {
        (GroupKind::Finite(t), Element::Cayley(a)) => {
            SubgroupData::Finite { members: (0..t.order()).filter(|&b| t.commute(*a, b)).collect() }
        }
        (GroupKind::VirtuallyAbelian(s), Element::Affine { v, q }) => {
            let n = s.rank();
            let mut m = s.action(*q).clone();
            for (i, row) in m.iter_mut().enumerate() {
                row[i] -= 1;
            }
            let rows = transpose(&m, n);
            let lat = kernel(&rows, n);
            let mut reps = Vec::new();
            for r in 0..s.point().order() {
                if !s.point().commute(*q, r) {
                    continue;
                }
                let target = sub(&s.act(r, v), v);
                let w = if n == 0 { Some(Vec::new()) } else { solve(&rows, n, &target) };
                if let Some(w) = w {
                    reps.push((r, w));
                }
            }
            affine_data(s, reps, lat)
        }
        (GroupKind::CentralPairing(p), Element::Pairing { a, .. }) => {
            let ra = p.base().dim();
            let rows: Vec<IVec> = (0..ra).map(|j| p.pairing(a, &lattice::unit(ra, j))).collect();
            let base = preimage(&rows, &p.center().relations());
            let lifts = vec![p.center().zero(); base.rank()];
            pairing_data(p, base, lifts, Lattice::full(p.center().dim()))
        }
        _ => unreachable!("checked above"),
    };
    Ok(Subgroup::from_data(group, data))
}

/// `C_G(K)`, the intersection of the centralizers of generators of `K`.
pub fn centralizer_of_subgroup(k: &Subgroup) -> Result<Subgroup> {
    let mut c = Subgroup::whole(k.group());
    for x in k.generators() {
        c = c.intersect(&centralizer(k.group(), x)?)?;
    }
    Ok(c)
}

pub fn center(group: &GroupHandle) -> Result<Subgroup> {
    centralizer_of_subgroup(&Subgroup::whole(group))
}

/// The smallest normal subgroup containing `xs`.
pub fn normal_closure(group: &GroupHandle, xs: &[Element]) -> Result<Subgroup> {
    let mut s = Subgroup::generated(group, xs)?;
    let conjugators = {
        let mut c = group.generators().to_vec();
        c.extend(group.generators().iter().map(|x| group.inv(x)));
        c
    };
    for _ in 0..1000 {
        let canon = s.canonical_generators();
        let mut gens = canon.clone();
        for c in &conjugators {
            gens.extend(canon.iter().map(|h| group.conj(c, h)));
        }
        let next = Subgroup::from_generators(group, gens);
        if next == s {
            return Ok(s);
        }
        s = next;
    }
    Err(Error::UnsupportedForClass("normal closure did not stabilise".into()))
}

/// `[G, G]`.
pub fn derived_subgroup(group: &GroupHandle) -> Result<Subgroup> {
    match group.kind() {
        GroupKind::CentralPairing(p) => {
            let ra = p.base().dim();
            let mut gens: Vec<IVec> = p.center().relations().basis().to_vec();
            for i in 0..ra {
                for j in i + 1..ra {
                    gens.push(p.beta(i, j).clone());
                }
            }
            let central = Lattice::new(p.center().dim(), gens);
            let base = p.base().relations();
            let lifts = vec![p.center().zero(); base.rank()];
            Ok(Subgroup::from_data(group, pairing_data(p, base, lifts, central)))
        }
        _ => {
            let gens = group.generators();
            let mut comms = Vec::new();
            for (i, x) in gens.iter().enumerate() {
                for y in &gens[i + 1..] {
                    comms.push(group.commutator(x, y));
                }
            }
            normal_closure(group, &comms)
        }
    }
}

/// Every subgroup of a Cayley group, sorted by order then members.
pub fn all_subgroups(group: &GroupHandle) -> Result<Vec<Subgroup>> {
    let t = group.require_cayley()?;
    let n = t.order();
    let mut found: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    let mut cyclic = Vec::new();
    for x in 0..n {
        let members = t.generated(&[x]);
        if !found.contains_key(&members) {
            found.insert(members.clone(), vec![x]);
            cyclic.push(x);
        }
    }
    let mut frontier: Vec<Vec<usize>> = found.values().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for gens in &frontier {
            for &c in &cyclic {
                let mut g2 = gens.clone();
                g2.push(c);
                let members = t.generated(&g2);
                if let std::collections::hash_map::Entry::Vacant(slot) = found.entry(members) {
                    slot.insert(g2.clone());
                    next.push(g2);
                }
            }
        }
        frontier = next;
    }
    let mut subs: Vec<(Vec<usize>, Vec<usize>)> = found.into_iter().collect();
    subs.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(subs
        .into_iter()
        .map(|(members, gens)| Subgroup {
            group: group.clone(),
            data: Arc::new(SubgroupData::Finite { members }),
            gens: Arc::new(gens.into_iter().map(Element::Cayley).collect()),
        })
        .collect())
}

pub fn normal_subgroups(group: &GroupHandle) -> Result<Vec<Subgroup>> {
    Ok(all_subgroups(group)?.into_iter().filter(|h| h.is_normal()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::library;

    fn z(v: i64) -> Element {
        Element::Affine { v: vec![v], q: 0 }
    }

    #[test]
    fn even_integers_have_index_two() {
        let g = library::integers();
        let h = Subgroup::generated(&g, &[z(2)]).unwrap();
        assert_eq!(h.index(), ExtendedIndex::Finite(2));
        assert!(h.contains(&z(-4)));
        assert!(!h.contains(&z(3)));
    }

    #[test]
    fn line_in_plane_has_infinite_index() {
        let g = library::z2();
        let h = Subgroup::generated(&g, &[Element::Affine { v: vec![1, 0], q: 0 }]).unwrap();
        assert_eq!(h.index(), ExtendedIndex::Infinite);
    }

    #[test]
    fn infinite_dihedral_index_two_subgroup() {
        let g = library::infinite_dihedral();
        let h = Subgroup::generated(&g, &[z(2), Element::Affine { v: vec![0], q: 1 }]).unwrap();
        assert_eq!(h.index(), ExtendedIndex::Finite(2));
        match h.data() {
            SubgroupData::Affine { image, lattice, .. } => {
                assert_eq!(image, &vec![0, 1]);
                assert_eq!(lattice.basis(), &[vec![2]]);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn intersection_of_2z_and_3z() {
        let g = library::integers();
        let a = Subgroup::generated(&g, &[z(2)]).unwrap();
        let b = Subgroup::generated(&g, &[z(3)]).unwrap();
        assert_eq!(a.intersect(&b).unwrap(), Subgroup::generated(&g, &[z(6)]).unwrap());
    }

    #[test]
    fn mixed_groups_are_rejected() {
        let a = Subgroup::whole(&library::integers());
        let b = Subgroup::whole(&library::integers());
        assert_eq!(a.intersect(&b).unwrap_err(), Error::MixedGroups);
    }

    #[test]
    fn s3_transposition_centralizer_and_core() {
        let g = library::symmetric(3);
        let t = g.as_cayley().unwrap();
        let tr = Element::Cayley(t.find_label("(1 2)").unwrap());
        let c = centralizer(&g, &tr).unwrap();
        assert_eq!(c.order(), Some(2));
        assert_eq!(c.index(), ExtendedIndex::Finite(3));
        let h = Subgroup::generated(&g, &[tr]).unwrap();
        assert!(h.normal_core().unwrap().is_trivial());
        let cyc = Subgroup::generated(&g, &[Element::Cayley(t.find_label("(1 2 3)").unwrap())]).unwrap();
        assert_eq!(cyc.order(), Some(3));
        assert!(cyc.is_normal());
    }

    #[test]
    fn centralizer_of_translation_in_infinite_dihedral() {
        let g = library::infinite_dihedral();
        let c = centralizer(&g, &z(1)).unwrap();
        assert_eq!(c.index(), ExtendedIndex::Finite(2));
        assert_eq!(c, Subgroup::generated(&g, &[z(1)]).unwrap());
        let r = centralizer(&g, &Element::Affine { v: vec![3], q: 1 }).unwrap();
        assert_eq!(r.order(), Some(2));
    }

    #[test]
    fn heisenberg_derived_subgroup_is_the_center() {
        let g = library::heisenberg_f2(2);
        let d = derived_subgroup(&g).unwrap();
        assert_eq!(d.order(), Some(2));
        assert_eq!(center(&g).unwrap(), d);
    }

    #[test]
    fn integral_heisenberg_centralizers() {
        let g = library::integral_heisenberg();
        let x = Element::Pairing { a: vec![1, 0], nu: vec![0] };
        let c = centralizer(&g, &x).unwrap();
        assert_eq!(c.index(), ExtendedIndex::Infinite);
        assert!(c.contains(&Element::Pairing { a: vec![5, 0], nu: vec![-7] }));
        assert!(!c.contains(&Element::Pairing { a: vec![0, 1], nu: vec![0] }));
        assert_eq!(center(&g).unwrap().index(), ExtendedIndex::Infinite);
    }

    #[test]
    fn pairing_subgroup_generated_by_squares() {
        let g = library::mod2_symplectic();
        let h = Subgroup::generated(
            &g,
            &[Element::Pairing { a: vec![2, 0], nu: vec![0] }, Element::Pairing { a: vec![0, 2], nu: vec![0] }],
        )
        .unwrap();
        // β((2,0),(0,2)) = 4 ≡ 0, so H ∩ N is trivial and [G:H] = 4·2.
        assert_eq!(h.index(), ExtendedIndex::Finite(8));
        assert!(h.contains(&Element::Pairing { a: vec![2, 2], nu: vec![0] }));
        assert!(!h.contains(&Element::Pairing { a: vec![2, 2], nu: vec![1] }));
    }

    #[test]
    fn coset_reps_are_least_in_coset() {
        let g = library::integers();
        let h = Subgroup::generated(&g, &[z(4)]).unwrap();
        let reps: Vec<Element> = (0..4).map(|v| h.coset_rep(&z(v))).collect();
        assert_eq!(reps, vec![z(0), z(1), z(-2), z(-1)]);
    }

    #[test]
    fn all_subgroups_of_s3() {
        let subs = all_subgroups(&library::symmetric(3)).unwrap();
        assert_eq!(subs.len(), 6);
        assert_eq!(normal_subgroups(&library::symmetric(3)).unwrap().len(), 3);
        assert_eq!(all_subgroups(&library::symmetric(4)).unwrap().len(), 30);
        assert_eq!(all_subgroups(&library::quaternion()).unwrap().len(), 6);
    }
}
