//! The Boolean ring generated by cosets and its coset-correct measure.
//!
//! An element is stored as `F ⊕ I` where `F` is a union of cosets of one
//! finite-index subgroup `D` (the denominator) and `I` is a XOR of cosets of
//! infinite-index subgroups, each contained in `D`. Keeping `I` under `D`
//! means every infinite-part coset sits inside a single `D`-coset, so meets
//! against the finite part reduce to a membership test.
//!
//! The measure only sees `F`: it is `|F| / [G : D]`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::coset::{transversal, Coset, TRANSVERSAL_CAP};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::group::{Element, GroupHandle};
use crate::rational::{self, Rational};
use crate::subgroup::Subgroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetRingElement {
    group: GroupHandle,
    denom: Subgroup,
    finite: BTreeSet<Element>,
    infinite: Vec<Coset>,
}

fn xor_cosets(mut list: Vec<Coset>) -> Vec<Coset> {
    list.sort();
    let mut out: Vec<Coset> = Vec::with_capacity(list.len());
    for c in list {
        if out.last() == Some(&c) {
            out.pop();
        } else {
            out.push(c);
        }
    }
    out
}

impl CosetRingElement {
    pub fn empty(group: &GroupHandle) -> Self {
        CosetRingElement {
            group: group.clone(),
            denom: Subgroup::whole(group),
            finite: BTreeSet::new(),
            infinite: Vec::new(),
        }
    }

    pub fn whole(group: &GroupHandle) -> Self {
        let mut x = Self::empty(group);
        x.finite.insert(x.denom.coset_rep(&group.identity()));
        x
    }

    pub fn from_coset(c: &Coset) -> Self {
        let group = c.group();
        if c.index().is_finite() {
            CosetRingElement {
                group: group.clone(),
                denom: c.subgroup().clone(),
                finite: BTreeSet::from([c.rep().clone()]),
                infinite: Vec::new(),
            }
        } else {
            let mut x = Self::empty(group);
            x.infinite.push(c.clone());
            x
        }
    }

    pub fn from_subgroup(h: &Subgroup) -> Self {
        Self::from_coset(&Coset::of(h, &h.group().identity()))
    }

    /// The finite set `xs` as a ring element (a XOR of singleton cosets).
    pub fn from_elements(group: &GroupHandle, xs: &[Element]) -> Result<Self> {
        let trivial = Subgroup::trivial(group);
        let mut out = Self::empty(group);
        let distinct: BTreeSet<&Element> = xs.iter().collect();
        for x in distinct {
            out = out.xor(&Self::from_coset(&Coset::new(&trivial, x)?))?;
        }
        Ok(out)
    }

    pub fn group(&self) -> &GroupHandle {
        &self.group
    }

    pub fn denominator(&self) -> &Subgroup {
        &self.denom
    }

    pub fn finite_reps(&self) -> impl Iterator<Item = &Element> {
        self.finite.iter()
    }

    pub fn finite_count(&self) -> usize {
        self.finite.len()
    }

    pub fn infinite_part(&self) -> &[Coset] {
        &self.infinite
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::MixedGroups)
        }
    }

    /// Re-expresses the element over a finite-index `d ≤ D`.
    pub fn refine(&self, d: &Subgroup) -> Result<Self> {
        if *d == self.denom {
            return Ok(self.clone());
        }
        if !d.is_subgroup_of(&self.denom) || !d.has_finite_index() {
            return Err(Error::InvalidRequest("refinement must be a finite-index subgroup of the denominator".into()));
        }
        let g = &self.group;
        let ts = transversal(&self.denom, d, TRANSVERSAL_CAP)?;
        let mut finite = BTreeSet::new();
        for x in &self.finite {
            for t in &ts {
                finite.insert(d.coset_rep(&g.mul(x, t)));
            }
        }
        let mut infinite = Vec::new();
        for c in &self.infinite {
            if c.subgroup().is_subgroup_of(d) {
                infinite.push(c.clone());
                continue;
            }
            let k = c.subgroup().intersect(d)?;
            for t in transversal(c.subgroup(), &k, TRANSVERSAL_CAP)? {
                infinite.push(Coset::of(&k, &g.mul(c.rep(), &t)));
            }
        }
        Ok(CosetRingElement { group: g.clone(), denom: d.clone(), finite, infinite: xor_cosets(infinite) })
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        self.same_group(other)?;
        if self.denom == other.denom {
            return Ok((self.clone(), other.clone()));
        }
        let d = self.denom.intersect(&other.denom)?;
        Ok((self.refine(&d)?, other.refine(&d)?))
    }

    /// Symmetric difference.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let finite = a.finite.symmetric_difference(&b.finite).cloned().collect();
        let mut inf = a.infinite;
        inf.extend(b.infinite);
        Ok(CosetRingElement { group: a.group, denom: a.denom, finite, infinite: xor_cosets(inf) })
    }

    /// Intersection.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let finite = a.finite.intersection(&b.finite).cloned().collect();
        let mut inf = Vec::new();
        for c in &a.infinite {
            if b.finite.contains(&a.denom.coset_rep(c.rep())) {
                inf.push(c.clone());
            }
        }
        for c in &b.infinite {
            if a.finite.contains(&a.denom.coset_rep(c.rep())) {
                inf.push(c.clone());
            }
        }
        for c in &a.infinite {
            for e in &b.infinite {
                if let Some(m) = c.meet(e)? {
                    inf.push(m);
                }
            }
        }
        Ok(CosetRingElement { group: a.group, denom: a.denom, finite, infinite: xor_cosets(inf) })
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.xor(other)?.xor(&self.meet(other)?)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.xor(&self.meet(other)?)
    }

    pub fn complement(&self) -> Result<Self> {
        self.xor(&Self::whole(&self.group))
    }

    /// `g·X`.
    pub fn translate(&self, g: &Element) -> Result<Self> {
        self.group.check(g)?;
        let grp = &self.group;
        let finite = self.finite.iter().map(|x| self.denom.coset_rep(&grp.mul(g, x))).collect();
        let infinite = xor_cosets(self.infinite.iter().map(|c| c.translate(g)).collect());
        Ok(CosetRingElement { group: grp.clone(), denom: self.denom.clone(), finite, infinite })
    }

    /// `(π(X), X ⊕ π(X))`.
    pub fn decompose(&self) -> (Self, Self) {
        let fin = CosetRingElement {
            group: self.group.clone(),
            denom: self.denom.clone(),
            finite: self.finite.clone(),
            infinite: Vec::new(),
        };
        let inf = CosetRingElement {
            group: self.group.clone(),
            denom: self.denom.clone(),
            finite: BTreeSet::new(),
            infinite: self.infinite.clone(),
        };
        (fin, inf)
    }

    pub fn contains(&self, x: &Element) -> bool {
        let mut inside = self.finite.contains(&self.denom.coset_rep(x));
        for c in &self.infinite {
            if c.contains(x) {
                inside = !inside;
            }
        }
        inside
    }

    /// The unique coset-correct measure: `|F| / [G : D]`.
    pub fn measure(&self) -> Rational {
        let idx = self.denom.index().finite().expect("denominator has finite index");
        rational::rat(self.finite.len() as i64, idx as i64)
    }

    /// Syntactic emptiness of the normal form.
    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.infinite.is_empty()
    }

    pub fn is_finite_part_only(&self) -> bool {
        self.infinite.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeumannReport {
    pub covers: bool,
    #[serde(with = "rational::serde_str")]
    pub reciprocal_sum: Rational,
}

/// Decides whether finitely many cosets cover the group.
///
/// Infinite-index cosets never matter: if the finite-index ones missed some
/// point, what they miss is a nonempty union of cosets of their common
/// finite-index intersection, and no such coset is covered by finitely many
/// cosets of infinite index. So only the residues modulo that intersection
/// are checked.
pub fn neumann_check(cosets: &[Coset], mode: Execution) -> Result<NeumannReport> {
    let Some(first) = cosets.first() else {
        return Ok(NeumannReport { covers: false, reciprocal_sum: rational::zero() });
    };
    let group = first.group().clone();
    if cosets.iter().any(|c| *c.group() != group) {
        return Err(Error::MixedGroups);
    }
    let reciprocal_sum = cosets.iter().map(|c| c.index().reciprocal()).sum::<Rational>();
    let finite: Vec<&Coset> = cosets.iter().filter(|c| c.index().is_finite()).collect();
    let covers = match finite.first() {
        None => false,
        Some(c0) => {
            let mut d = c0.subgroup().clone();
            for c in &finite[1..] {
                d = d.intersect(c.subgroup())?;
            }
            let reps = transversal(&Subgroup::whole(&group), &d, TRANSVERSAL_CAP)?;
            exec::all(mode, &reps, |t| finite.iter().any(|c| c.contains(t)))
        }
    };
    if covers && reciprocal_sum < rational::one() {
        return Err(Error::InvariantViolation(format!(
            "cover with reciprocal index sum {}",
            rational::format(&reciprocal_sum)
        )));
    }
    Ok(NeumannReport { covers, reciprocal_sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::library;
    use crate::rational::rat;

    fn z(v: i64) -> Element {
        Element::Affine { v: vec![v], q: 0 }
    }

    fn p(x: i64, y: i64) -> Element {
        Element::Affine { v: vec![x, y], q: 0 }
    }

    fn coset(g: &GroupHandle, gens: &[Element], rep: &Element) -> Coset {
        Coset::new(&Subgroup::generated(g, gens).unwrap(), rep).unwrap()
    }

    #[test]
    fn evens_and_odds_make_everything() {
        let g = library::integers();
        let evens = CosetRingElement::from_coset(&coset(&g, &[z(2)], &z(0)));
        let odds = CosetRingElement::from_coset(&coset(&g, &[z(2)], &z(1)));
        let all = evens.xor(&odds).unwrap();
        assert_eq!(all.measure(), rat(1, 1));
        assert!((-5..5).all(|v| all.contains(&z(v))));
        assert!(evens.xor(&evens).unwrap().is_empty());
        assert_eq!(evens.measure(), rat(1, 2));
    }

    #[test]
    fn meet_of_strips_is_a_sublattice() {
        let g = library::z2();
        let a = CosetRingElement::from_subgroup(&Subgroup::generated(&g, &[p(2, 0), p(0, 1)]).unwrap());
        let b = CosetRingElement::from_subgroup(&Subgroup::generated(&g, &[p(1, 0), p(0, 3)]).unwrap());
        let m = a.meet(&b).unwrap();
        assert_eq!(m.denominator().index().finite(), Some(6));
        assert_eq!(m.measure(), rat(1, 6));
        assert!(m.is_finite_part_only());
    }

    #[test]
    fn lines_live_in_the_infinite_part() {
        let g = library::z2();
        let h = Subgroup::generated(&g, &[p(2, 0), p(0, 1)]).unwrap();
        let line = coset(&g, &[p(1, 0)], &p(0, 3));
        let x = CosetRingElement::from_subgroup(&h).xor(&CosetRingElement::from_coset(&line)).unwrap();
        assert_eq!(x.measure(), rat(1, 2));
        let (fin, inf) = x.decompose();
        assert_eq!(fin.measure(), rat(1, 2));
        assert_eq!(inf.measure(), rat(0, 1));
        for a in -3..=3 {
            for b in -3..=3 {
                let e = p(a, b);
                assert_eq!(x.contains(&e), fin.contains(&e) ^ inf.contains(&e));
                assert_eq!(x.contains(&e), (a % 2 == 0) ^ (b == 3));
            }
        }
    }

    #[test]
    fn crossing_lines_exclude_their_meeting_point() {
        let g = library::z2();
        let h = CosetRingElement::from_coset(&coset(&g, &[p(1, 0)], &p(0, 0)));
        let v = CosetRingElement::from_coset(&coset(&g, &[p(0, 1)], &p(0, 0)));
        let x = h.xor(&v).unwrap();
        assert!(!x.contains(&p(0, 0)));
        assert!(x.contains(&p(4, 0)));
        assert!(x.meet(&x).unwrap().contains(&p(0, 7)));
        let (fin, inf) = x.decompose();
        assert!(fin.is_empty());
        assert_eq!(inf.infinite_part().len(), 2);
    }

    #[test]
    fn covering_system_mod_four() {
        let g = library::integers();
        let cs = vec![coset(&g, &[z(2)], &z(0)), coset(&g, &[z(4)], &z(1)), coset(&g, &[z(4)], &z(3))];
        let r = neumann_check(&cs, Execution::Sequential).unwrap();
        assert!(r.covers);
        assert_eq!(r.reciprocal_sum, rat(1, 1));
        let partial = neumann_check(&cs[..2], Execution::Parallel).unwrap();
        assert!(!partial.covers);
    }

    #[test]
    fn lines_never_cover_the_plane() {
        let g = library::z2();
        let cs: Vec<Coset> = (0..5).map(|k| coset(&g, &[p(1, k)], &p(0, k))).collect();
        let r = neumann_check(&cs, Execution::Sequential).unwrap();
        assert!(!r.covers);
        assert_eq!(r.reciprocal_sum, rat(0, 1));
    }

    #[test]
    fn mixed_groups_error() {
        let a = CosetRingElement::whole(&library::integers());
        let b = CosetRingElement::whole(&library::integers());
        assert_eq!(a.xor(&b).unwrap_err(), Error::MixedGroups);
    }
}
