//! Degrees of commutativity.
//!
//! Finite groups are brute-forced. For infinite groups the element set is cut
//! into centralizer strata `U_m = {g : [G:C_G(g)] = m}`, each a coset-ring
//! element, and `dc = Σ μ(U_m)/m`.
//!
//! - `ℤⁿ ⋊ Q`: `(v, q)` has finite centralizer index only when `q` acts
//!   trivially, and then `C(v, q) = ℤⁿ ⋊ (C_Q(q) ∩ Stab_Q(v))`. The vectors
//!   with stabilizer exactly `R` are `Fix(R) ∖ ⋃_{r ∉ R} Fix(R ∪ {r})`.
//! - pairing groups: `[G : C(a, ν)]` is the order of `M_a = ⟨β(a, eⱼ)⟩ ≤ N`.
//!   For a finite `M ≤ N` the set `{a : M_a ≤ M}` is a subgroup `L_M`, and
//!   `M_a = M` exactly on `L_M ∖ ⋃_{M′ < M} L_{M′}`.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::coset::{self, Coset};
use crate::coset_ring::CosetRingElement;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::group::{library, AbelianGroup, Element, GroupHandle, GroupKind};
use crate::lattice::{self, kernel, preimage, transpose, IVec, Lattice};
use crate::rational::{self, Rational};
use crate::subgroup::{self, Subgroup};

/// `|{(g, h) : gh = hg}|` for a finite group.
pub fn commuting_pairs(group: &GroupHandle, mode: Execution) -> Result<u64> {
    if let Some(t) = group.as_cayley() {
        let n = t.order();
        return Ok(exec::sum_range(mode, n, |a| (0..n).filter(|&b| t.commute(a, b)).count() as u64));
    }
    let xs = group.elements()?;
    Ok(exec::sum_range(mode, xs.len(), |i| xs.iter().filter(|y| group.commute(&xs[i], y)).count() as u64))
}

/// `|Comm(G)| / |G|²`.
pub fn dc_finite(group: &GroupHandle, mode: Execution) -> Result<Rational> {
    let n = group.order().ok_or_else(|| Error::UnsupportedForClass(format!("{} is infinite", group.name())))?;
    let pairs = commuting_pairs(group, mode)?;
    Ok(rational::rat(pairs as i64, (n * n) as i64))
}

/// `|S| / |G|²` for the pairs satisfying `pred`.
pub fn product_mean_finite<F>(group: &GroupHandle, pred: F, mode: Execution) -> Result<Rational>
where
    F: Fn(&Element, &Element) -> bool + Sync + Send,
{
    let xs = group.elements()?;
    let n = xs.len() as i64;
    let hits = exec::sum_range(mode, xs.len(), |i| xs.iter().filter(|y| pred(&xs[i], y)).count() as u64);
    Ok(rational::rat(hits as i64, n * n))
}

#[derive(Clone, Debug)]
pub struct Stratum {
    pub index: u64,
    pub set: CosetRingElement,
    pub measure: Rational,
}

#[derive(Clone, Debug)]
pub struct StratumTable {
    pub group: GroupHandle,
    /// Non-empty finite strata by increasing index.
    pub strata: Vec<Stratum>,
    pub infinite: CosetRingElement,
    pub infinite_measure: Rational,
}

impl StratumTable {
    fn assemble(group: &GroupHandle, pieces: BTreeMap<u64, CosetRingElement>) -> Result<Self> {
        let strata: Vec<Stratum> = pieces
            .into_iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(index, set)| Stratum { index, measure: set.measure(), set })
            .collect();
        for (i, a) in strata.iter().enumerate() {
            for b in &strata[i + 1..] {
                if !a.set.meet(&b.set)?.is_empty() {
                    return Err(Error::InvariantViolation(format!("strata {} and {} overlap", a.index, b.index)));
                }
            }
        }
        let mut finite = CosetRingElement::empty(group);
        for s in &strata {
            finite = finite.xor(&s.set)?;
        }
        let infinite = finite.complement()?;
        let infinite_measure = infinite.measure();
        let total: Rational = strata.iter().map(|s| s.measure.clone()).sum::<Rational>() + &infinite_measure;
        if total != rational::one() {
            return Err(Error::InvariantViolation(format!("strata measures sum to {}", rational::format(&total))));
        }
        if group.is_finite() && !infinite.is_empty() {
            return Err(Error::InvariantViolation("finite group with an infinite-index centralizer".into()));
        }
        Ok(StratumTable { group: group.clone(), strata, infinite, infinite_measure })
    }

    /// `Σ μ(U_m)/m`.
    pub fn dc(&self) -> Rational {
        self.strata.iter().map(|s| &s.measure / rational::int(s.index as i64)).sum()
    }

    /// `X_n = ⋃_{m ≤ n} U_m`.
    pub fn x_n(&self, n: u64) -> Result<CosetRingElement> {
        let mut out = CosetRingElement::empty(&self.group);
        for s in self.strata.iter().filter(|s| s.index <= n) {
            out = out.xor(&s.set)?;
        }
        Ok(out)
    }

    pub fn x_n_measure(&self, n: u64) -> Rational {
        self.strata.iter().filter(|s| s.index <= n).map(|s| s.measure.clone()).sum()
    }

    /// The stratum containing `x`: its centralizer index, or `None` when infinite.
    pub fn locate(&self, x: &Element) -> Option<u64> {
        self.strata.iter().find(|s| s.set.contains(x)).map(|s| s.index)
    }

    pub fn max_index(&self) -> u64 {
        self.strata.last().map_or(0, |s| s.index)
    }
}

fn add_piece(pieces: &mut BTreeMap<u64, CosetRingElement>, m: u64, piece: CosetRingElement) -> Result<()> {
    match pieces.get_mut(&m) {
        Some(acc) => *acc = acc.union(&piece)?,
        None => {
            pieces.insert(m, piece);
        }
    }
    Ok(())
}

fn cayley_strata(group: &GroupHandle, mode: Execution) -> Result<StratumTable> {
    let t = group.require_cayley()?;
    let n = t.order();
    let sizes = exec::map_range(mode, n, |a| (0..n).filter(|&b| t.commute(a, b)).count());
    let mut by_index: BTreeMap<u64, Vec<Element>> = BTreeMap::new();
    for (a, c) in sizes.into_iter().enumerate() {
        by_index.entry((n / c) as u64).or_default().push(Element::Cayley(a));
    }
    let mut pieces = BTreeMap::new();
    for (m, xs) in by_index {
        pieces.insert(m, CosetRingElement::from_elements(group, &xs)?);
    }
    StratumTable::assemble(group, pieces)
}

/// Vectors fixed by every listed point-group element.
fn fixed_lattice(s: &crate::group::AffineGroup, qs: &[usize]) -> Lattice {
    let n = s.rank();
    if qs.is_empty() || n == 0 {
        return Lattice::full(n);
    }
    let mut rows: Vec<IVec> = vec![Vec::new(); n];
    for &q in qs {
        let mut m = s.action(q).clone();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= 1;
        }
        for (i, col) in transpose(&m, n).into_iter().enumerate() {
            rows[i].extend(col);
        }
    }
    kernel(&rows, n * qs.len())
}

fn translation_subgroup(group: &GroupHandle, lat: &Lattice) -> Result<Subgroup> {
    let s = group.as_affine().unwrap();
    let id = s.point().identity();
    let gens: Vec<Element> = lat.basis().iter().map(|v| Element::Affine { v: v.clone(), q: id }).collect();
    Subgroup::generated(group, &gens)
}

fn affine_strata(group: &GroupHandle) -> Result<StratumTable> {
    let s = group.as_affine().unwrap();
    let point = s.point();
    let q_handle = GroupHandle::finite("Q", point.clone());
    let subgroups: Vec<Vec<usize>> = subgroup::all_subgroups(&q_handle)?
        .into_iter()
        .map(|h| match h.data() {
            subgroup::SubgroupData::Finite { members } => members.clone(),
            _ => unreachable!(),
        })
        .collect();
    let order = point.order();
    let mut pieces = BTreeMap::new();
    for &q in s.kernel() {
        for r in &subgroups {
            let fix_r = fixed_lattice(s, r);
            let base = Coset::new(&translation_subgroup(group, &fix_r)?, &Element::Affine { v: vec![0; s.rank()], q })?;
            let mut piece = CosetRingElement::from_coset(&base);
            let members: BTreeSet<usize> = r.iter().copied().collect();
            let mut seen = HashSet::new();
            for extra in (0..order).filter(|x| !members.contains(x)) {
                let mut bigger = r.clone();
                bigger.push(extra);
                let fix = fixed_lattice(s, &bigger);
                if fix == fix_r || !seen.insert(fix.clone()) {
                    if fix == fix_r {
                        piece = CosetRingElement::empty(group);
                    }
                    continue;
                }
                let c = Coset::new(&translation_subgroup(group, &fix)?, &Element::Affine { v: vec![0; s.rank()], q })?;
                piece = piece.difference(&CosetRingElement::from_coset(&c))?;
            }
            if piece.is_empty() {
                continue;
            }
            let kept = r.iter().filter(|&&x| point.commute(q, x)).count();
            add_piece(&mut pieces, (order / kept) as u64, piece)?;
        }
    }
    StratumTable::assemble(group, pieces)
}

/// Subgroups of a finite abelian group given by its element list.
fn finite_abelian_subgroups(ab: &AbelianGroup, elements: &[IVec]) -> Vec<Vec<IVec>> {
    let add = |x: &IVec, y: &IVec| ab.reduced(x.iter().zip(y).map(|(a, b)| a + b).collect());
    let span = |gens: &[IVec]| -> Vec<IVec> {
        let mut set: BTreeSet<IVec> = BTreeSet::from([ab.zero()]);
        let mut frontier = vec![ab.zero()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = add(&x, g);
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    };
    let mut found: BTreeSet<Vec<IVec>> = elements.iter().map(|x| span(std::slice::from_ref(x))).collect();
    let cyclic: Vec<Vec<IVec>> = found.iter().cloned().collect();
    loop {
        let current: Vec<Vec<IVec>> = found.iter().cloned().collect();
        let mut grew = false;
        for a in &current {
            for c in &cyclic {
                let mut gens = a.clone();
                gens.extend(c.iter().cloned());
                if found.insert(span(&gens)) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    found.into_iter().collect()
}

fn pairing_strata(group: &GroupHandle) -> Result<StratumTable> {
    let p = group.as_pairing().unwrap();
    let (ra, rn) = (p.base().dim(), p.center().dim());
    let torsion = p.center().torsion_elements();
    let ms = finite_abelian_subgroups(p.center(), &torsion);
    let rows: Vec<IVec> = (0..ra)
        .map(|i| (0..ra).flat_map(|j| p.pairing(&lattice::unit(ra, i), &lattice::unit(ra, j))).collect())
        .collect();
    let central_gens: Vec<Element> =
        (0..rn).map(|k| Element::Pairing { a: p.base().zero(), nu: lattice::unit(rn, k) }).collect();
    let level_set = |m: &[IVec]| -> Result<CosetRingElement> {
        let mut gens: Vec<IVec> = p.center().relations().basis().to_vec();
        gens.extend(m.iter().cloned());
        let lm = Lattice::new(rn, gens);
        let blocks = (0..ra).flat_map(|j| {
            lm.basis().iter().map(move |v| {
                let mut w = vec![0; ra * rn];
                w[j * rn..(j + 1) * rn].copy_from_slice(v);
                w
            })
        });
        let target = Lattice::new(ra * rn, blocks.collect::<Vec<_>>());
        let base = if ra == 0 { Lattice::full(0) } else { preimage(&rows, &target) };
        let mut hgens = central_gens.clone();
        hgens.extend(base.basis().iter().map(|a| Element::Pairing { a: p.base().reduced(a.clone()), nu: p.center().zero() }));
        Ok(CosetRingElement::from_subgroup(&Subgroup::generated(group, &hgens)?))
    };
    let sets: Vec<CosetRingElement> = ms.iter().map(|m| level_set(m)).collect::<Result<_>>()?;
    let mut pieces = BTreeMap::new();
    for (i, m) in ms.iter().enumerate() {
        let mset: BTreeSet<&IVec> = m.iter().collect();
        let mut piece = sets[i].clone();
        for (j, m2) in ms.iter().enumerate() {
            if m2.len() < m.len() && m2.iter().all(|x| mset.contains(x)) {
                piece = piece.difference(&sets[j])?;
            }
        }
        add_piece(&mut pieces, m.len() as u64, piece)?;
    }
    StratumTable::assemble(group, pieces)
}

pub fn centralizer_strata(group: &GroupHandle, mode: Execution) -> Result<StratumTable> {
    match group.kind() {
        GroupKind::Finite(_) => cayley_strata(group, mode),
        GroupKind::VirtuallyAbelian(_) => affine_strata(group),
        GroupKind::CentralPairing(_) => pairing_strata(group),
    }
}

pub fn dc_strata(group: &GroupHandle, mode: Execution) -> Result<Rational> {
    Ok(centralizer_strata(group, mode)?.dc())
}

/// Finite-index normal subgroups whose quotients are compared.
#[derive(Clone, Debug)]
pub struct QuotientChain {
    subgroups: Vec<Subgroup>,
}

impl QuotientChain {
    /// Any list of finite-index normal subgroups.
    pub fn family(subgroups: Vec<Subgroup>) -> Result<Self> {
        let Some(first) = subgroups.first() else {
            return Err(Error::InvalidRequest("empty quotient chain".into()));
        };
        for n in &subgroups {
            first.same_group(n)?;
            if !n.has_finite_index() {
                return Err(Error::InvalidRequest("chain members must have finite index".into()));
            }
            if !n.is_normal() {
                return Err(Error::NotNormal);
            }
        }
        Ok(QuotientChain { subgroups })
    }

    /// A descending chain `N₀ ⊇ N₁ ⊇ …`; the first offending step is reported.
    pub fn nested(subgroups: Vec<Subgroup>) -> Result<Self> {
        let chain = Self::family(subgroups)?;
        if let Some(i) = chain.first_unnested_step() {
            return Err(Error::InvalidRequest(format!("chain members {i} and {} are not nested", i + 1)));
        }
        Ok(chain)
    }

    pub fn subgroups(&self) -> &[Subgroup] {
        &self.subgroups
    }

    pub fn first_unnested_step(&self) -> Option<usize> {
        self.subgroups.windows(2).position(|w| !w[1].is_subgroup_of(&w[0]))
    }

    pub fn is_nested(&self) -> bool {
        self.first_unnested_step().is_none()
    }
}

/// Congruence subgroups `N_k` for each modulus: `kℤⁿ` in `ℤⁿ ⋊ Q`, the
/// subgroup generated by `k`-th powers of the coordinate generators of `A`
/// and `N` in pairing groups, and the trivial subgroup of a finite group.
pub fn congruence_subgroup(group: &GroupHandle, k: i64) -> Result<Subgroup> {
    if k < 1 {
        return Err(Error::InvalidRequest("moduli must be positive".into()));
    }
    match group.kind() {
        GroupKind::Finite(_) => Ok(Subgroup::trivial(group)),
        GroupKind::VirtuallyAbelian(s) => {
            let lat = Lattice::new(s.rank(), (0..s.rank()).map(|i| lattice::unit(s.rank(), i).iter().map(|x| x * k).collect()));
            translation_subgroup(group, &lat)
        }
        GroupKind::CentralPairing(p) => {
            let (ra, rn) = (p.base().dim(), p.center().dim());
            let mut gens = Vec::new();
            for i in 0..ra {
                let a = p.base().reduced(lattice::unit(ra, i).iter().map(|x| x * k).collect());
                gens.push(Element::Pairing { a, nu: p.center().zero() });
            }
            for j in 0..rn {
                let nu = p.center().reduced(lattice::unit(rn, j).iter().map(|x| x * k).collect());
                gens.push(Element::Pairing { a: p.base().zero(), nu });
            }
            Subgroup::generated(group, &gens)
        }
    }
}

pub fn congruence_family(group: &GroupHandle, moduli: &[i64]) -> Result<QuotientChain> {
    QuotientChain::family(moduli.iter().map(|&k| congruence_subgroup(group, k)).collect::<Result<_>>()?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainTerm {
    pub order: u64,
    #[serde(with = "rational::serde_str")]
    pub dc: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub terms: Vec<ChainTerm>,
    pub nested: bool,
    /// For nested chains, whether the values never increase.
    pub non_increasing: Option<bool>,
}

/// `dc(G/N_i)` for each member of the chain.
pub fn dc_rf_chain(chain: &QuotientChain, cap: u64, mode: Execution) -> Result<ChainReport> {
    let terms = chain
        .subgroups()
        .iter()
        .map(|n| {
            let (q, _) = coset::quotient(n, cap)?;
            Ok(ChainTerm { order: q.order().unwrap(), dc: dc_finite(&q, mode)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let nested = chain.is_nested();
    let non_increasing = nested.then(|| terms.windows(2).all(|w| w[1].dc <= w[0].dc));
    Ok(ChainReport { terms, nested, non_increasing })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InequalityCheck {
    #[serde(with = "rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
    pub holds: bool,
}

impl InequalityCheck {
    pub fn new(lhs: Rational, rhs: Rational) -> Self {
        let holds = lhs <= rhs;
        InequalityCheck { lhs, rhs, holds }
    }
}

/// Commuting probability inside a subgroup of a finite group.
pub fn dc_subgroup(n: &Subgroup) -> Result<Rational> {
    let g = n.group();
    let members: Vec<Element> = g.elements()?.into_iter().filter(|x| n.contains(x)).collect();
    let k = members.len() as i64;
    let pairs: usize = members.iter().map(|x| members.iter().filter(|y| g.commute(x, y)).count()).sum();
    Ok(rational::rat(pairs as i64, k * k))
}

/// `dc(G) ≤ dc(G/N) · dc(N)`.
pub fn gallagher_check(n: &Subgroup, mode: Execution) -> Result<InequalityCheck> {
    let g = n.group();
    if !g.is_finite() {
        return Err(Error::UnsupportedForClass("Gallagher check needs a finite group".into()));
    }
    if !n.is_normal() {
        return Err(Error::NotNormal);
    }
    let (q, _) = coset::quotient(n, coset::QUOTIENT_CAP)?;
    Ok(InequalityCheck::new(dc_finite(g, mode)?, dc_finite(&q, mode)? * dc_subgroup(n)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XnCheck {
    #[serde(with = "rational::serde_str")]
    pub dc: Rational,
    #[serde(with = "rational::serde_str")]
    pub xn_measure: Rational,
    pub bound_holds: bool,
}

/// `dc(G) ≤ |X_n|/|G| + 1/n`.
pub fn xn_check(group: &GroupHandle, n: u64, mode: Execution) -> Result<XnCheck> {
    if n == 0 {
        return Err(Error::InvalidRequest("n must be positive".into()));
    }
    let dc = dc_finite(group, mode)?;
    let xn_measure = centralizer_strata(group, mode)?.x_n_measure(n);
    let bound_holds = dc <= &xn_measure + rational::rat(1, n as i64);
    Ok(XnCheck { dc, xn_measure, bound_holds })
}

#[derive(Clone, Debug)]
pub enum FafWitness {
    /// `N₀` finite normal, central in the finite-index normal `H₀ ⊇ N₀`, with `H₀/N₀` abelian.
    Witness { n0: Subgroup, h0: Subgroup },
    NotFaf { reason: String },
}

impl FafWitness {
    pub fn is_faf(&self) -> bool {
        matches!(self, FafWitness::Witness { .. })
    }
}

fn verify_faf(n0: &Subgroup, h0: &Subgroup) -> Result<()> {
    let g = n0.group();
    let fail = |what: &str| Err(Error::InvariantViolation(format!("FAF witness: {what}")));
    if n0.order().is_none() || !n0.is_normal() {
        return fail("N0 is not finite and normal");
    }
    if !h0.has_finite_index() || !h0.is_normal() || !n0.is_subgroup_of(h0) {
        return fail("H0 is not a finite-index normal subgroup containing N0");
    }
    let hg = h0.canonical_generators();
    for x in n0.canonical_generators() {
        if hg.iter().any(|h| !g.commute(&x, h)) {
            return fail("N0 is not central in H0");
        }
    }
    for (i, a) in hg.iter().enumerate() {
        for b in &hg[i + 1..] {
            if !n0.contains(&g.commutator(a, b)) {
                return fail("H0/N0 is not abelian");
            }
        }
    }
    Ok(())
}

pub fn faf_witness(group: &GroupHandle) -> Result<FafWitness> {
    let (n0, h0) = match group.kind() {
        GroupKind::Finite(_) => (Subgroup::trivial(group), Subgroup::trivial(group)),
        GroupKind::VirtuallyAbelian(s) => {
            (Subgroup::trivial(group), translation_subgroup(group, &Lattice::full(s.rank()))?)
        }
        GroupKind::CentralPairing(p) => {
            let n0 = if p.center().is_finite() {
                let gens: Vec<Element> = (0..p.center().dim())
                    .map(|k| Element::Pairing { a: p.base().zero(), nu: lattice::unit(p.center().dim(), k) })
                    .collect();
                Subgroup::generated(group, &gens)?
            } else {
                subgroup::derived_subgroup(group)?
            };
            if n0.order().is_none() {
                return Ok(FafWitness::NotFaf { reason: "derived subgroup is infinite".into() });
            }
            (n0, Subgroup::whole(group))
        }
    };
    verify_faf(&n0, &h0)?;
    Ok(FafWitness::Witness { n0, h0 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingSum {
    pub elements: Vec<Element>,
    pub sum: Rational,
}

/// `Σ_{i<j} 1/[G : C(hᵢ⁻¹hⱼ)]`.
pub fn commuting_sum(group: &GroupHandle, hs: &[Element]) -> Result<Rational> {
    let mut sum = rational::zero();
    for (i, a) in hs.iter().enumerate() {
        for b in &hs[i + 1..] {
            let c = subgroup::centralizer(group, &group.mul(&group.inv(a), b))?;
            sum += c.index().reciprocal();
        }
    }
    Ok(sum)
}

/// `n` elements in distinct cosets of the finite-class subgroup
/// `G_fin = ⋃ X_n`, so every pairwise quotient has infinite centralizer index.
pub fn small_commuting_sum(group: &GroupHandle, n: usize, eps: &Rational, horizon: u64) -> Result<CommutingSum> {
    if n == 0 {
        return Err(Error::InvalidRequest("n must be positive".into()));
    }
    if *eps <= rational::zero() {
        return Err(Error::InvalidRequest("tolerance must be positive".into()));
    }
    if n == 1 {
        return Ok(CommutingSum { elements: vec![group.identity()], sum: rational::zero() });
    }
    let gfin = match group.kind() {
        GroupKind::CentralPairing(p) => {
            let (ra, rn) = (p.base().dim(), p.center().dim());
            let tor = Lattice::new(rn, {
                let mut g = p.center().relations().basis().to_vec();
                g.extend((0..rn).filter(|&k| p.center().modulus(k).is_some()).map(|k| lattice::unit(rn, k)));
                g
            });
            let rows: Vec<IVec> = (0..ra)
                .map(|i| (0..ra).flat_map(|j| p.pairing(&lattice::unit(ra, i), &lattice::unit(ra, j))).collect())
                .collect();
            let target = Lattice::new(
                ra * rn,
                (0..ra)
                    .flat_map(|j| {
                        tor.basis().iter().map(move |v| {
                            let mut w = vec![0; ra * rn];
                            w[j * rn..(j + 1) * rn].copy_from_slice(v);
                            w
                        })
                    })
                    .collect::<Vec<_>>(),
            );
            let base = if ra == 0 { Lattice::full(0) } else { preimage(&rows, &target) };
            let mut gens: Vec<Element> =
                (0..rn).map(|k| Element::Pairing { a: p.base().zero(), nu: lattice::unit(rn, k) }).collect();
            gens.extend(base.basis().iter().map(|a| Element::Pairing { a: p.base().reduced(a.clone()), nu: p.center().zero() }));
            Subgroup::generated(group, &gens)?
        }
        _ => Subgroup::whole(group),
    };
    if gfin.has_finite_index() {
        return Err(Error::HypothesisFails("elements with finite centralizer index form a finite-index subgroup".into()));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    'scan: for r in 0..=horizon {
        for x in group.shell(r) {
            if seen.insert(gfin.coset_rep(&x)) {
                out.push(x);
                if out.len() == n {
                    break 'scan;
                }
            }
        }
    }
    if out.len() < n {
        return Err(Error::EnumerationExhausted { radius: horizon });
    }
    let sum = commuting_sum(group, &out)?;
    if sum >= *eps {
        return Err(Error::InvariantViolation(format!("commuting sum {}", rational::format(&sum))));
    }
    Ok(CommutingSum { elements: out, sum })
}

/// `H × H` as a Cayley group; `(a, b)` has index `a·|H| + b`.
pub fn square(h: &GroupHandle) -> Result<GroupHandle> {
    library::direct_product(h, h)
}

pub fn pair(h: &GroupHandle, a: usize, b: usize) -> Element {
    Element::Cayley(a * h.as_cayley().unwrap().order() + b)
}

pub fn unpair(h: &GroupHandle, x: &Element) -> (usize, usize) {
    let m = h.as_cayley().unwrap().order();
    match x {
        Element::Cayley(i) => (i / m, i % m),
        _ => panic!("expected a Cayley element"),
    }
}

/// The least commuting pair in `gK ⊆ H × H`, if any.
pub fn commuting_transversal(h: &GroupHandle, k: &Subgroup, g: &Element) -> Result<Option<Element>> {
    let t = h.require_cayley()?;
    let p = k.group();
    if p.order() != Some((t.order() * t.order()) as u64) {
        return Err(Error::MixedGroups);
    }
    p.check(g)?;
    let mut coset: Vec<Element> = p.elements()?.into_iter().filter(|x| k.contains(&p.mul(&p.inv(g), x))).collect();
    p.sort_elements(&mut coset);
    Ok(coset.into_iter().find(|x| {
        let (a, b) = unpair(h, x);
        t.commute(a, b)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::library;
    use crate::rational::rat;

    const SEQ: Execution = Execution::Sequential;

    #[test]
    fn small_finite_values() {
        assert_eq!(dc_finite(&library::cyclic(6), SEQ).unwrap(), rat(1, 1));
        assert_eq!(dc_finite(&library::symmetric(3), SEQ).unwrap(), rat(1, 2));
        assert_eq!(dc_finite(&library::dihedral(4), SEQ).unwrap(), rat(5, 8));
        assert_eq!(dc_finite(&library::quaternion(), SEQ).unwrap(), rat(5, 8));
        assert_eq!(dc_finite(&library::symmetric(4), SEQ).unwrap(), rat(5, 24));
        assert_eq!(dc_finite(&library::heisenberg_f2(1), SEQ).unwrap(), rat(5, 8));
    }

    #[test]
    fn product_means() {
        let g = library::symmetric(3);
        assert_eq!(product_mean_finite(&g, |_, _| true, SEQ).unwrap(), rat(1, 1));
        assert_eq!(product_mean_finite(&g, |a, b| g.commute(a, b), SEQ).unwrap(), rat(1, 2));
        let shift = Element::Cayley(1);
        let diag_coset = product_mean_finite(&g, |a, b| *b == g.mul(a, &shift), SEQ).unwrap();
        assert_eq!(diag_coset, rat(1, 6));
    }

    #[test]
    fn strata_match_brute_force_on_small_groups() {
        for g in library::tiny_corpus() {
            assert_eq!(dc_strata(&g, SEQ).unwrap(), dc_finite(&g, SEQ).unwrap(), "{}", g.name());
        }
    }

    #[test]
    fn infinite_dihedral_strata() {
        let g = library::infinite_dihedral();
        let t = centralizer_strata(&g, SEQ).unwrap();
        let idx: Vec<u64> = t.strata.iter().map(|s| s.index).collect();
        assert_eq!(idx, vec![1, 2]);
        assert_eq!(t.strata[0].measure, rat(0, 1));
        assert_eq!(t.strata[1].measure, rat(1, 2));
        assert_eq!(t.infinite_measure, rat(1, 2));
        assert_eq!(t.dc(), rat(1, 4));
        assert_eq!(t.locate(&Element::Affine { v: vec![3], q: 1 }), None);
        assert_eq!(t.locate(&Element::Affine { v: vec![3], q: 0 }), Some(2));
    }

    #[test]
    fn infinite_anchor_values() {
        assert_eq!(dc_strata(&library::mod2_symplectic(), SEQ).unwrap(), rat(5, 8));
        assert_eq!(dc_strata(&library::integral_heisenberg(), SEQ).unwrap(), rat(0, 1));
        assert_eq!(dc_strata(&library::z2_rot4(), SEQ).unwrap(), rat(1, 16));
        assert_eq!(dc_strata(&library::z2_swap(), SEQ).unwrap(), rat(1, 4));
        assert_eq!(dc_strata(&library::z2(), SEQ).unwrap(), rat(1, 1));
        let h = library::heisenberg_f2(2);
        assert_eq!(dc_strata(&h, SEQ).unwrap(), rat(17, 32));
        assert_eq!(dc_finite(&h, SEQ).unwrap(), rat(17, 32));
    }

    #[test]
    fn symplectic_strata_are_lattice_lifts() {
        let t = centralizer_strata(&library::mod2_symplectic(), SEQ).unwrap();
        let summary: Vec<(u64, Rational)> = t.strata.iter().map(|s| (s.index, s.measure.clone())).collect();
        assert_eq!(summary, vec![(1, rat(1, 4)), (2, rat(3, 4))]);
        assert!(t.infinite.is_empty());
    }

    #[test]
    fn dihedral_quotients() {
        let g = library::infinite_dihedral();
        let chain = congruence_family(&g, &[3, 5, 7]).unwrap();
        assert!(!chain.is_nested());
        let r = dc_rf_chain(&chain, coset::QUOTIENT_CAP, SEQ).unwrap();
        let dcs: Vec<Rational> = r.terms.iter().map(|t| t.dc.clone()).collect();
        assert_eq!(dcs, vec![rat(1, 2), rat(2, 5), rat(5, 14)]);
        assert_eq!(r.non_increasing, None);
    }

    #[test]
    fn heisenberg_quotients() {
        let g = library::integral_heisenberg();
        let r = dc_rf_chain(&congruence_family(&g, &[2, 3, 5]).unwrap(), coset::QUOTIENT_CAP, SEQ).unwrap();
        let got: Vec<(u64, Rational)> = r.terms.iter().map(|t| (t.order, t.dc.clone())).collect();
        assert_eq!(got, vec![(8, rat(5, 8)), (27, rat(11, 27)), (125, rat(29, 125))]);
    }

    #[test]
    fn nested_chain_is_monotone() {
        let g = library::infinite_dihedral();
        let subs = [2, 4, 8].iter().map(|&k| congruence_subgroup(&g, k).unwrap()).collect();
        let r = dc_rf_chain(&QuotientChain::nested(subs).unwrap(), coset::QUOTIENT_CAP, SEQ).unwrap();
        assert_eq!(r.non_increasing, Some(true));
        let bad = [3, 2].iter().map(|&k| congruence_subgroup(&g, k).unwrap()).collect();
        assert!(QuotientChain::nested(bad).is_err());
    }

    #[test]
    fn gallagher_examples() {
        let d4 = library::dihedral(4);
        let r = gallagher_check(&subgroup::center(&d4).unwrap(), SEQ).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (rat(5, 8), rat(1, 1), true));
        let s4 = library::symmetric(4);
        let v4 = subgroup::normal_subgroups(&s4).unwrap().into_iter().find(|n| n.order() == Some(4)).unwrap();
        let r = gallagher_check(&v4, SEQ).unwrap();
        assert_eq!((r.lhs, r.rhs), (rat(5, 24), rat(1, 2)));
        let s3 = library::symmetric(3);
        let not_normal = subgroup::all_subgroups(&s3).unwrap().into_iter().find(|h| h.order() == Some(2)).unwrap();
        assert_eq!(gallagher_check(&not_normal, SEQ).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn xn_examples() {
        let r = xn_check(&library::symmetric(3), 2, SEQ).unwrap();
        assert_eq!((r.xn_measure, r.bound_holds), (rat(1, 2), true));
        let r = xn_check(&library::dihedral(4), 1, SEQ).unwrap();
        assert_eq!(r.xn_measure, rat(1, 4));
    }

    #[test]
    fn faf_examples() {
        let FafWitness::Witness { n0, h0 } = faf_witness(&library::mod2_symplectic()).unwrap() else { panic!() };
        assert_eq!(n0.order(), Some(2));
        assert!(h0.is_whole());
        let FafWitness::Witness { n0, h0 } = faf_witness(&library::infinite_dihedral()).unwrap() else { panic!() };
        assert!(n0.is_trivial());
        assert_eq!(h0.index().finite(), Some(2));
        assert!(!faf_witness(&library::integral_heisenberg()).unwrap().is_faf());
    }

    #[test]
    fn small_sums() {
        let g = library::integral_heisenberg();
        let r = small_commuting_sum(&g, 3, &rat(1, 100), 16).unwrap();
        assert_eq!(r.elements.len(), 3);
        assert_eq!(r.sum, rat(0, 1));
        let h = library::mod2_symplectic();
        assert!(matches!(small_commuting_sum(&h, 3, &rat(1, 2), 16), Err(Error::HypothesisFails(_))));
        assert_eq!(small_commuting_sum(&h, 1, &rat(1, 2), 16).unwrap().sum, rat(0, 1));
    }

    #[test]
    fn transversal_examples() {
        let (h, _) = coset::to_cayley(&library::heisenberg_f2(1), 100).unwrap();
        let p = square(&h).unwrap();
        let z = subgroup::center(&h).unwrap();
        let zgens: Vec<Element> = z.canonical_generators();
        let e = h.as_cayley().unwrap().identity();
        let mut kg = Vec::new();
        for x in &zgens {
            let Element::Cayley(i) = x else { unreachable!() };
            kg.push(pair(&h, *i, e));
            kg.push(pair(&h, e, *i));
        }
        let k = Subgroup::generated(&p, &kg).unwrap();
        let t = h.as_cayley().unwrap();
        let (a, b) = (0..t.order())
            .flat_map(|a| (0..t.order()).map(move |b| (a, b)))
            .find(|&(a, b)| !t.commute(a, b))
            .unwrap();
        assert_eq!(commuting_transversal(&h, &k, &pair(&h, a, b)).unwrap(), None);
        let c6 = library::cyclic(6);
        let p6 = square(&c6).unwrap();
        let k6 = Subgroup::generated(&p6, &[pair(&c6, 2, 3)]).unwrap();
        let g = pair(&c6, 5, 1);
        assert_eq!(commuting_transversal(&c6, &k6, &g).unwrap(), Some(k6.coset_rep(&g)));
    }
}
