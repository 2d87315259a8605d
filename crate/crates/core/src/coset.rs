//! Left cosets with canonical representatives, transversals and quotients.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::group::{CayleyTable, Element, ExtendedIndex, GroupHandle};
use crate::subgroup::Subgroup;

/// Default bound on transversal sizes.
pub const TRANSVERSAL_CAP: usize = 1 << 20;

/// Default bound on quotient orders.
pub const QUOTIENT_CAP: u64 = 10_000;

/// `gH` with `g` the least element of the coset in the fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coset {
    subgroup: Subgroup,
    rep: Element,
}

impl Coset {
    pub fn new(h: &Subgroup, g: &Element) -> Result<Coset> {
        h.group().check(g)?;
        Ok(Self::of(h, g))
    }

    pub(crate) fn of(h: &Subgroup, g: &Element) -> Coset {
        Coset { subgroup: h.clone(), rep: h.coset_rep(g) }
    }

    /// `Hg`, rewritten as the left coset `g (g⁻¹ H g)`.
    pub fn right(h: &Subgroup, g: &Element) -> Result<Coset> {
        h.group().check(g)?;
        let conj = h.conjugate(&h.group().inv(g));
        Ok(Self::of(&conj, g))
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn rep(&self) -> &Element {
        &self.rep
    }

    pub fn group(&self) -> &GroupHandle {
        self.subgroup.group()
    }

    pub fn index(&self) -> ExtendedIndex {
        self.subgroup.index()
    }

    pub fn contains(&self, x: &Element) -> bool {
        let g = self.group();
        self.subgroup.contains(&g.mul(&g.inv(&self.rep), x))
    }

    /// `g · (xH) = (gx)H`.
    pub fn translate(&self, g: &Element) -> Coset {
        Self::of(&self.subgroup, &self.group().mul(g, &self.rep))
    }

    /// `xH ∩ yK`, which is empty or a coset of `H ∩ K`.
    pub fn meet(&self, other: &Coset) -> Result<Option<Coset>> {
        self.subgroup.same_group(&other.subgroup)?;
        let g = self.group();
        let y = g.mul(&g.inv(&self.rep), &other.rep);
        let Some(p) = self.subgroup.meet_point(&y, &other.subgroup) else {
            return Ok(None);
        };
        let hk = self.subgroup.intersect(&other.subgroup)?;
        Ok(Some(Self::of(&hk, &g.mul(&self.rep, &p))))
    }
}

/// Canonical representatives `x ∈ outer` of the left cosets `x·inner`, in the
/// fixed order. Requires `inner ≤ outer` with finite relative index.
pub fn transversal(outer: &Subgroup, inner: &Subgroup, cap: usize) -> Result<Vec<Element>> {
    outer.same_group(inner)?;
    let g = outer.group();
    let start = inner.coset_rep(&g.identity());
    let mut seen: HashSet<Element> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        for s in outer.generators() {
            let y = inner.coset_rep(&g.mul(s, &x));
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::EnumerationExhausted { radius: cap as u64 });
                }
                queue.push_back(y);
            }
        }
        out.push(x);
    }
    g.sort_elements(&mut out);
    Ok(out)
}

/// Left transversal of a finite-index subgroup in the whole group.
pub fn left_transversal(h: &Subgroup) -> Result<Vec<Element>> {
    match h.index() {
        ExtendedIndex::Infinite => Err(Error::UnsupportedForClass("subgroup has infinite index".into())),
        ExtendedIndex::Finite(k) if k as usize > TRANSVERSAL_CAP => {
            Err(Error::QuotientTooLarge { order: k, cap: TRANSVERSAL_CAP as u64 })
        }
        ExtendedIndex::Finite(_) => transversal(&Subgroup::whole(h.group()), h, TRANSVERSAL_CAP),
    }
}

/// `G/N` as a Cayley group, with the coset representative of each element.
pub fn quotient(n: &Subgroup, cap: u64) -> Result<(GroupHandle, Vec<Element>)> {
    let g = n.group();
    let k = n
        .index()
        .finite()
        .ok_or_else(|| Error::UnsupportedForClass("quotient by an infinite-index subgroup".into()))?;
    if k > cap {
        return Err(Error::QuotientTooLarge { order: k, cap });
    }
    if !n.is_normal() {
        return Err(Error::NotNormal);
    }
    let reps = transversal(&Subgroup::whole(g), n, cap as usize)?;
    let lookup: HashMap<&Element, usize> = reps.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut table = Vec::with_capacity(reps.len() * reps.len());
    for a in &reps {
        for b in &reps {
            table.push(lookup[&n.coset_rep(&g.mul(a, b))] as u32);
        }
    }
    let labels = reps.iter().map(|r| g.format_element(r)).collect();
    let identity = lookup[&n.coset_rep(&g.identity())];
    let handle = GroupHandle::finite(format!("{}/N", g.name()), CayleyTable::trusted(labels, table, identity));
    Ok((handle, reps))
}

/// A finite group of any class as a Cayley group (element `i` is `reps[i]`).
pub fn to_cayley(g: &GroupHandle, cap: u64) -> Result<(GroupHandle, Vec<Element>)> {
    if let Some(t) = g.as_cayley() {
        return Ok((g.clone(), (0..t.order()).map(Element::Cayley).collect()));
    }
    let order = g.order().ok_or_else(|| Error::UnsupportedForClass(format!("{} is infinite", g.name())))?;
    if order > cap {
        return Err(Error::QuotientTooLarge { order, cap });
    }
    let (h, reps) = quotient(&Subgroup::trivial(g), cap)?;
    let name = g.name().to_string();
    let t = h.as_cayley().unwrap().clone();
    Ok((GroupHandle::finite(name, t), reps))
}
