//! Group handles, elements, the fixed element order and enumeration.

pub mod abelian;
pub mod affine;
pub mod cayley;
pub mod library;
pub mod pairing;

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use abelian::AbelianGroup;
pub use affine::AffineGroup;
pub use cayley::CayleyTable;
pub use pairing::PairingGroup;

use crate::error::{Error, Result};
use crate::lattice::IVec;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    Cayley(usize),
    Affine { v: IVec, q: usize },
    Pairing { a: IVec, nu: IVec },
}

/// `[G : H]`, possibly infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtendedIndex {
    Finite(u64),
    Infinite,
}

impl ExtendedIndex {
    pub fn reciprocal(self) -> Rational {
        match self {
            ExtendedIndex::Finite(k) => rational::rat(1, k as i64),
            ExtendedIndex::Infinite => rational::zero(),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedIndex::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtendedIndex::Finite(k) => Some(k),
            ExtendedIndex::Infinite => None,
        }
    }
}

impl fmt::Display for ExtendedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedIndex::Finite(k) => write!(f, "{k}"),
            ExtendedIndex::Infinite => f.write_str("infinite"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Finite(CayleyTable),
    VirtuallyAbelian(AffineGroup),
    CentralPairing(PairingGroup),
}

struct GroupInner {
    id: u64,
    name: String,
    kind: GroupKind,
    generators: Vec<Element>,
}

/// Shared, immutable handle to a group. Handles compare by identity.
#[derive(Clone)]
pub struct GroupHandle(Arc<GroupInner>);

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

impl PartialEq for GroupHandle {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for GroupHandle {}

impl fmt::Debug for GroupHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupHandle({}#{})", self.0.name, self.0.id)
    }
}

/// Sort key of one coordinate: `0, -1, 1, -2, 2, …`.
#[inline]
fn coord_key(x: i64) -> (u64, bool) {
    (x.unsigned_abs(), x > 0)
}

fn cmp_coords(a: &[i64], b: &[i64]) -> Ordering {
    a.iter().map(|&x| coord_key(x)).cmp(b.iter().map(|&x| coord_key(x)))
}

/// Values of one coordinate with centred absolute value at most `r`, in key order.
fn coord_values(modulus: Option<i64>, r: i64) -> Vec<i64> {
    let mut out = vec![0];
    let (lo, hi) = match modulus {
        None => (-r, r),
        Some(d) => {
            let h = d / 2;
            (-h.min(r), (d - 1 - h).min(r))
        }
    };
    for k in 1..=r {
        if -k >= lo {
            out.push(-k);
        }
        if k <= hi {
            out.push(k);
        }
    }
    out
}

/// Lexicographic product of per-coordinate value lists, keeping vectors of norm exactly `r`.
fn shell_vectors(values: &[Vec<i64>], r: i64) -> Vec<IVec> {
    let mut out: Vec<IVec> = vec![Vec::new()];
    for vals in values {
        let mut next = Vec::with_capacity(out.len() * vals.len());
        for v in &out {
            for &x in vals {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out.retain(|v| v.iter().map(|x| x.abs()).max().unwrap_or(0) == r);
    out
}

impl GroupHandle {
    pub fn new(name: impl Into<String>, kind: GroupKind) -> Self {
        let generators = default_generators(&kind);
        GroupHandle(Arc::new(GroupInner {
            id: NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed),
            name: name.into(),
            kind,
            generators,
        }))
    }

    pub fn finite(name: impl Into<String>, table: CayleyTable) -> Self {
        Self::new(name, GroupKind::Finite(table))
    }

    pub fn affine(name: impl Into<String>, g: AffineGroup) -> Self {
        Self::new(name, GroupKind::VirtuallyAbelian(g))
    }

    pub fn pairing(name: impl Into<String>, g: PairingGroup) -> Self {
        Self::new(name, GroupKind::CentralPairing(g))
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> &GroupKind {
        &self.0.kind
    }

    pub fn class_name(&self) -> &'static str {
        match self.kind() {
            GroupKind::Finite(_) => "finite_cayley",
            GroupKind::VirtuallyAbelian(_) => "virtually_abelian",
            GroupKind::CentralPairing(_) => "central_pairing",
        }
    }

    pub fn as_cayley(&self) -> Option<&CayleyTable> {
        match self.kind() {
            GroupKind::Finite(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_affine(&self) -> Option<&AffineGroup> {
        match self.kind() {
            GroupKind::VirtuallyAbelian(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_pairing(&self) -> Option<&PairingGroup> {
        match self.kind() {
            GroupKind::CentralPairing(g) => Some(g),
            _ => None,
        }
    }

    pub fn require_cayley(&self) -> Result<&CayleyTable> {
        self.as_cayley()
            .ok_or_else(|| Error::UnsupportedForClass(format!("{} is not given by a Cayley table", self.name())))
    }

    pub fn is_finite(&self) -> bool {
        self.order().is_some()
    }

    pub fn order(&self) -> Option<u64> {
        match self.kind() {
            GroupKind::Finite(t) => Some(t.order() as u64),
            GroupKind::VirtuallyAbelian(g) => (g.rank() == 0).then(|| g.point().order() as u64),
            GroupKind::CentralPairing(g) => Some(g.base().order()? * g.center().order()?),
        }
    }

    /// Generators of the whole group.
    pub fn generators(&self) -> &[Element] {
        &self.0.generators
    }

    pub fn identity(&self) -> Element {
        match self.kind() {
            GroupKind::Finite(t) => Element::Cayley(t.identity()),
            GroupKind::VirtuallyAbelian(g) => Element::Affine { v: vec![0; g.rank()], q: g.point().identity() },
            GroupKind::CentralPairing(g) => Element::Pairing { a: g.base().zero(), nu: g.center().zero() },
        }
    }

    pub fn is_identity(&self, g: &Element) -> bool {
        *g == self.identity()
    }

    /// Whether `g` has the shape and coordinate ranges of an element of this group.
    pub fn owns(&self, g: &Element) -> bool {
        match (self.kind(), g) {
            (GroupKind::Finite(t), Element::Cayley(i)) => *i < t.order(),
            (GroupKind::VirtuallyAbelian(h), Element::Affine { v, q }) => v.len() == h.rank() && *q < h.point().order(),
            (GroupKind::CentralPairing(h), Element::Pairing { a, nu }) => {
                h.base().is_reduced(a) && h.center().is_reduced(nu)
            }
            _ => false,
        }
    }

    pub fn check(&self, g: &Element) -> Result<()> {
        if self.owns(g) {
            Ok(())
        } else {
            Err(Error::ForeignElement(format!("{g:?} in {}", self.name())))
        }
    }

    /// Brings arbitrary integer coordinates into canonical range.
    pub fn normalize(&self, g: Element) -> Element {
        match (self.kind(), g) {
            (GroupKind::CentralPairing(h), Element::Pairing { a, nu }) => {
                Element::Pairing { a: h.base().reduced(a), nu: h.center().reduced(nu) }
            }
            (_, g) => g,
        }
    }

    pub fn mul(&self, g: &Element, h: &Element) -> Element {
        match (self.kind(), g, h) {
            (GroupKind::Finite(t), Element::Cayley(a), Element::Cayley(b)) => Element::Cayley(t.mul(*a, *b)),
            (GroupKind::VirtuallyAbelian(s), Element::Affine { v, q }, Element::Affine { v: w, q: r }) => {
                let (v, q) = s.mul((v, *q), (w, *r));
                Element::Affine { v, q }
            }
            (GroupKind::CentralPairing(p), Element::Pairing { a, nu }, Element::Pairing { a: b, nu: mu }) => {
                let (a, nu) = p.mul((a, nu), (b, mu));
                Element::Pairing { a, nu }
            }
            _ => panic!("element shape does not match {}", self.name()),
        }
    }

    pub fn inv(&self, g: &Element) -> Element {
        match (self.kind(), g) {
            (GroupKind::Finite(t), Element::Cayley(a)) => Element::Cayley(t.inv(*a)),
            (GroupKind::VirtuallyAbelian(s), Element::Affine { v, q }) => {
                let (v, q) = s.inv((v, *q));
                Element::Affine { v, q }
            }
            (GroupKind::CentralPairing(p), Element::Pairing { a, nu }) => {
                let (a, nu) = p.inv((a, nu));
                Element::Pairing { a, nu }
            }
            _ => panic!("element shape does not match {}", self.name()),
        }
    }

    pub fn pow(&self, g: &Element, k: i64) -> Element {
        if let (GroupKind::CentralPairing(p), Element::Pairing { a, nu }) = (self.kind(), g) {
            let (a, nu) = p.pow((a, nu), k);
            return Element::Pairing { a, nu };
        }
        let base = if k < 0 { self.inv(g) } else { g.clone() };
        let mut acc = self.identity();
        let mut sq = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// `g⁻¹ h⁻¹ g h`.
    pub fn commutator(&self, g: &Element, h: &Element) -> Element {
        let gh = self.mul(g, h);
        let hg = self.mul(h, g);
        self.mul(&self.inv(&hg), &gh)
    }

    pub fn conj(&self, g: &Element, x: &Element) -> Element {
        self.mul(&self.mul(g, x), &self.inv(g))
    }

    pub fn commute(&self, g: &Element, h: &Element) -> bool {
        self.mul(g, h) == self.mul(h, g)
    }

    pub fn multiply(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.mul(g, h))
    }

    pub fn invert(&self, g: &Element) -> Result<Element> {
        self.check(g)?;
        Ok(self.inv(g))
    }

    pub fn commutator_checked(&self, g: &Element, h: &Element) -> Result<Element> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.commutator(g, h))
    }

    fn point_key(&self, q: usize, identity: usize) -> (bool, usize) {
        let _ = self;
        (q != identity, q)
    }

    /// Centred coordinates used by the fixed order and by the max-norm.
    pub fn centered_coords(&self, g: &Element) -> IVec {
        match (self.kind(), g) {
            (GroupKind::Finite(_), _) => Vec::new(),
            (GroupKind::VirtuallyAbelian(_), Element::Affine { v, .. }) => v.clone(),
            (GroupKind::CentralPairing(p), Element::Pairing { a, nu }) => {
                let mut out: IVec = a.iter().enumerate().map(|(i, &x)| p.base().centered(i, x)).collect();
                out.extend(nu.iter().enumerate().map(|(i, &x)| p.center().centered(i, x)));
                out
            }
            _ => panic!("element shape does not match {}", self.name()),
        }
    }

    /// The fixed element order: coordinates compared lexicographically under
    /// `0, -1, 1, -2, 2, …` (torsion coordinates by centred value), then the
    /// point-group element with the identity first.
    pub fn cmp_elements(&self, g: &Element, h: &Element) -> Ordering {
        match (self.kind(), g, h) {
            (GroupKind::Finite(t), Element::Cayley(a), Element::Cayley(b)) => {
                self.point_key(*a, t.identity()).cmp(&self.point_key(*b, t.identity()))
            }
            (GroupKind::VirtuallyAbelian(s), Element::Affine { v, q }, Element::Affine { v: w, q: r }) => {
                cmp_coords(v, w).then_with(|| {
                    let e = s.point().identity();
                    self.point_key(*q, e).cmp(&self.point_key(*r, e))
                })
            }
            (GroupKind::CentralPairing(_), _, _) => cmp_coords(&self.centered_coords(g), &self.centered_coords(h)),
            _ => panic!("element shape does not match {}", self.name()),
        }
    }

    pub fn min_element<'a>(&self, items: impl IntoIterator<Item = &'a Element>) -> Option<&'a Element> {
        items.into_iter().min_by(|a, b| self.cmp_elements(a, b))
    }

    pub fn sort_elements(&self, items: &mut [Element]) {
        items.sort_by(|a, b| self.cmp_elements(a, b));
    }

    /// Max-norm of the centred coordinates (zero for Cayley elements).
    pub fn norm(&self, g: &Element) -> u64 {
        self.centered_coords(g).iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
    }

    /// Radius beyond which shells are empty, for groups with only bounded coordinates.
    pub fn max_radius(&self) -> Option<u64> {
        match self.kind() {
            GroupKind::Finite(_) => Some(0),
            GroupKind::VirtuallyAbelian(g) => (g.rank() == 0).then_some(0),
            GroupKind::CentralPairing(p) => p.is_finite().then(|| {
                p.base().torsion.iter().chain(&p.center().torsion).map(|&d| (d / 2) as u64).max().unwrap_or(0)
            }),
        }
    }

    /// Elements of max-norm exactly `r`, in the fixed order.
    pub fn shell(&self, r: u64) -> Vec<Element> {
        let r = r as i64;
        match self.kind() {
            GroupKind::Finite(t) => {
                if r > 0 {
                    return Vec::new();
                }
                let mut all: Vec<Element> = (0..t.order()).map(Element::Cayley).collect();
                self.sort_elements(&mut all);
                all
            }
            GroupKind::VirtuallyAbelian(s) => {
                let values = vec![coord_values(None, r); s.rank()];
                let mut qs: Vec<usize> = (0..s.point().order()).collect();
                let e = s.point().identity();
                qs.sort_by_key(|&q| self.point_key(q, e));
                let mut out = Vec::new();
                for v in shell_vectors(&values, r) {
                    for &q in &qs {
                        out.push(Element::Affine { v: v.clone(), q });
                    }
                }
                out
            }
            GroupKind::CentralPairing(p) => {
                let na = p.base().dim();
                let mut values: Vec<Vec<i64>> = (0..na).map(|i| coord_values(p.base().modulus(i), r)).collect();
                values.extend((0..p.center().dim()).map(|i| coord_values(p.center().modulus(i), r)));
                shell_vectors(&values, r)
                    .into_iter()
                    .map(|c| Element::Pairing {
                        a: p.base().reduced(c[..na].to_vec()),
                        nu: p.center().reduced(c[na..].to_vec()),
                    })
                    .collect()
            }
        }
    }

    /// All elements of max-norm at most `bound`, shell by shell; each shell in
    /// the fixed order. Cayley groups ignore `bound` and return every element.
    pub fn enumerate(&self, bound: u64) -> Vec<Element> {
        let top = match self.max_radius() {
            Some(m) => bound.min(m),
            None => bound,
        };
        let top = if self.as_cayley().is_some() { 0 } else { top };
        (0..=top).flat_map(|r| self.shell(r)).collect()
    }

    /// Every element of a finite group.
    pub fn elements(&self) -> Result<Vec<Element>> {
        let r = self
            .max_radius()
            .ok_or_else(|| Error::UnsupportedForClass(format!("{} is infinite", self.name())))?;
        Ok(self.enumerate(r))
    }

    /// Uniform element with free coordinates in `[-radius, radius]`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, radius: i64) -> Element {
        let free = |rng: &mut R| rng.gen_range(-radius..=radius);
        match self.kind() {
            GroupKind::Finite(t) => Element::Cayley(rng.gen_range(0..t.order())),
            GroupKind::VirtuallyAbelian(s) => Element::Affine {
                v: (0..s.rank()).map(|_| free(rng)).collect(),
                q: rng.gen_range(0..s.point().order()),
            },
            GroupKind::CentralPairing(p) => {
                let draw = |ab: &AbelianGroup, rng: &mut R| -> IVec {
                    (0..ab.dim())
                        .map(|i| match ab.modulus(i) {
                            None => free(rng),
                            Some(d) => rng.gen_range(0..d),
                        })
                        .collect()
                };
                let a = draw(p.base(), rng);
                let nu = draw(p.center(), rng);
                Element::Pairing { a, nu }
            }
        }
    }

    /// Human-readable form: the table label, `[v|q]`, or `[a|ν]`.
    pub fn format_element(&self, g: &Element) -> String {
        let join = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match (self.kind(), g) {
            (GroupKind::Finite(t), Element::Cayley(i)) => t.label(*i).to_string(),
            (GroupKind::VirtuallyAbelian(s), Element::Affine { v, q }) => {
                format!("[{}|{}]", join(v), s.point().label(*q))
            }
            (GroupKind::CentralPairing(_), Element::Pairing { a, nu }) => format!("[{}|{}]", join(a), join(nu)),
            _ => format!("{g:?}"),
        }
    }
}

fn default_generators(kind: &GroupKind) -> Vec<Element> {
    match kind {
        GroupKind::Finite(t) => t.generating_set().into_iter().map(Element::Cayley).collect(),
        GroupKind::VirtuallyAbelian(s) => {
            let n = s.rank();
            let e = s.point().identity();
            let mut gens: Vec<Element> = (0..n)
                .map(|i| {
                    let mut v = vec![0; n];
                    v[i] = 1;
                    Element::Affine { v, q: e }
                })
                .collect();
            gens.extend(s.point().generating_set().into_iter().map(|q| Element::Affine { v: vec![0; n], q }));
            gens
        }
        GroupKind::CentralPairing(p) => {
            let unit = |dim: usize, i: usize| {
                let mut v = vec![0; dim];
                v[i] = 1;
                v
            };
            let (na, nn) = (p.base().dim(), p.center().dim());
            let mut gens: Vec<Element> =
                (0..na).map(|i| Element::Pairing { a: unit(na, i), nu: vec![0; nn] }).collect();
            gens.extend((0..nn).map(|i| Element::Pairing { a: vec![0; na], nu: unit(nn, i) }));
            gens
        }
    }
}
