//! The group-specification file: one `[group]` table discriminated by
//! `class`, and an optional `[params]` table for the command.

use std::collections::BTreeMap;

use ccm_core::coset::{self, Coset};
use ccm_core::coset_ring::CosetRingElement;
use ccm_core::group::{library, AbelianGroup, AffineGroup, CayleyTable, PairingGroup};
use ccm_core::rational::{self, Rational};
use ccm_core::subgroup::Subgroup;
use ccm_core::witness::{Atom, AtomSet, Constraint};
use ccm_core::{Element, GroupHandle, GroupKind};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub group: GroupSpec,
    #[serde(default, skip_serializing_if = "Params::is_empty")]
    pub params: Params,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic { n: usize },
    Dihedral { n: usize },
    Dicyclic { m: usize },
    Quaternion,
    Symmetric { n: usize },
    Alternating { n: usize },
    #[serde(rename = "sl2_3")]
    Sl23,
    #[serde(rename = "gl2_3")]
    Gl23,
    Product { factors: Vec<GroupSpec> },
    Permutation {
        degree: usize,
        generators: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    FiniteCayley { labels: Vec<String>, table: Vec<Vec<usize>> },
    #[serde(rename = "heisenberg_f2")]
    HeisenbergF2 { n: usize },
    #[serde(rename = "mod2_symplectic")]
    Mod2Symplectic,
    IntegralHeisenberg,
    FreeAbelian { rank: usize },
    Integers,
    InfiniteDihedral,
    #[serde(rename = "z2_rot4")]
    Z2Rot4,
    #[serde(rename = "z2_swap")]
    Z2Swap,
    /// `ℤ^rank ⋊ Q`; `action` lists one matrix per point-group element in table order.
    VirtuallyAbelian { rank: usize, point: Box<GroupSpec>, action: Vec<Vec<Vec<i64>>> },
    /// `beta[i][j]` is the commutator of base generators `i` and `j`, in center coordinates.
    CentralPairing { base: AbelianSpec, center: AbelianSpec, beta: Vec<Vec<Vec<i64>>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbelianSpec {
    #[serde(default)]
    pub free: usize,
    #[serde(default)]
    pub torsion: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointRef {
    Index(usize),
    Label(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Index(usize),
    Label(String),
    Affine { v: Vec<i64>, q: PointRef },
    Pairing { a: Vec<i64>, nu: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosetSpec {
    pub subgroup: Vec<ElementSpec>,
    pub rep: ElementSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub subgroup: Vec<ElementSpec>,
    pub tolerance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    /// The atom is the union of these cosets ...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosets: Option<Vec<CosetSpec>>,
    /// ... or this explicit list (finite groups only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<ElementSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<Vec<ElementSpec>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nested: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cosets: Option<Vec<CosetSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraints: Option<Vec<ConstraintSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<ElementSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub folner: Option<Vec<ElementSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_subgroup: Option<Vec<[ElementSpec; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<[ElementSpec; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
}

impl Params {
    pub fn is_empty(&self) -> bool {
        *self == Params::default()
    }
}

fn location(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse_spec(text: &str) -> CliResult<SpecFile> {
    if let Err(e) = text.parse::<toml::Table>() {
        let (line, column) = e.span().map_or((0, 0), |s| location(text, s.start));
        return Err(CliError::Parse { line, column, message: e.message().to_string() });
    }
    toml::from_str(text).map_err(|e| {
        let at = e.span().map(|s| location(text, s.start));
        match at {
            Some((line, column)) => CliError::Schema(format!("line {line}, column {column}: {}", e.message())),
            None => CliError::Schema(e.message().to_string()),
        }
    })
}

pub fn emit_spec(spec: &SpecFile) -> CliResult<String> {
    toml::to_string(spec).map_err(|e| CliError::schema(e.to_string()))
}

pub fn parse_rational(s: &str) -> CliResult<Rational> {
    rational::parse(s).ok_or_else(|| CliError::schema(format!("not a rational: {s:?}")))
}

fn build_abelian(a: &AbelianSpec) -> CliResult<AbelianGroup> {
    if a.torsion.iter().any(|&d| d < 2) {
        return Err(CliError::schema("torsion orders must be at least 2"));
    }
    Ok(AbelianGroup::new(a.free, a.torsion.clone()))
}

fn positive(n: usize, what: &str) -> CliResult<usize> {
    if n == 0 {
        return Err(CliError::schema(format!("{what} must be positive")));
    }
    Ok(n)
}

pub fn build_group(spec: &GroupSpec) -> CliResult<GroupHandle> {
    use GroupSpec as S;
    Ok(match spec {
        S::Cyclic { n } => library::cyclic(positive(*n, "n")?),
        S::Dihedral { n } => library::dihedral(positive(*n, "n")?),
        S::Dicyclic { m } => library::dicyclic(positive(*m, "m")?),
        S::Quaternion => library::quaternion(),
        S::Symmetric { n } if *n <= 5 => library::symmetric(positive(*n, "n")?),
        S::Alternating { n } if *n <= 5 => library::alternating(positive(*n, "n")?),
        S::Symmetric { .. } | S::Alternating { .. } => return Err(CliError::schema("permutation degree above 5")),
        S::Sl23 => library::sl2_3(),
        S::Gl23 => library::gl2_3(),
        S::Product { factors } => {
            let mut it = factors.iter();
            let first = it.next().ok_or_else(|| CliError::schema("product needs at least one factor"))?;
            let mut g = build_group(first)?;
            for f in it {
                g = library::direct_product(&g, &build_group(f)?)?;
            }
            g
        }
        S::Permutation { degree, generators, name } => {
            library::permutation_group(name.clone().unwrap_or_else(|| "Perm".into()), *degree, generators)?
        }
        S::FiniteCayley { labels, table } => GroupHandle::finite("Cayley", CayleyTable::new(labels.clone(), table.clone())?),
        S::HeisenbergF2 { n } => library::heisenberg_f2(positive(*n, "n")?),
        S::Mod2Symplectic => library::mod2_symplectic(),
        S::IntegralHeisenberg => library::integral_heisenberg(),
        S::FreeAbelian { rank } => library::free_abelian(*rank),
        S::Integers => library::integers(),
        S::InfiniteDihedral => library::infinite_dihedral(),
        S::Z2Rot4 => library::z2_rot4(),
        S::Z2Swap => library::z2_swap(),
        S::VirtuallyAbelian { rank, point, action } => {
            let q = build_group(point)?;
            let table = q.as_cayley().ok_or_else(|| CliError::schema("point group must be given as a finite group"))?.clone();
            GroupHandle::affine("ZnQ", AffineGroup::new(*rank, table, action.clone())?)
        }
        S::CentralPairing { base, center, beta } => {
            let p = PairingGroup::new(build_abelian(base)?, build_abelian(center)?, beta.clone())?;
            GroupHandle::pairing("Pairing", p)
        }
    })
}

pub(crate) fn unknown_label(l: &str, labels: &[String]) -> CliError {
    let shown: Vec<String> = labels.iter().take(48).map(|x| format!("{x:?}")).collect();
    let more = if labels.len() > 48 { ", ..." } else { "" };
    CliError::schema(format!("no element labelled {l:?}; labels are {}{more}", shown.join(", ")))
}

fn point_index(g: &GroupHandle, q: &PointRef) -> CliResult<usize> {
    let s = g.as_affine().unwrap();
    match q {
        PointRef::Index(i) if *i < s.point().order() => Ok(*i),
        PointRef::Index(i) => Err(CliError::schema(format!("no point-group element {i}"))),
        PointRef::Label(l) => s.point().find_label(l).ok_or_else(|| unknown_label(l, s.point().labels())),
    }
}

pub fn build_element(g: &GroupHandle, e: &ElementSpec) -> CliResult<Element> {
    let x = match (g.kind(), e) {
        (GroupKind::Finite(_), ElementSpec::Index(i)) => Element::Cayley(*i),
        (GroupKind::Finite(t), ElementSpec::Label(l)) => {
            Element::Cayley(t.find_label(l).ok_or_else(|| unknown_label(l, t.labels()))?)
        }
        (GroupKind::VirtuallyAbelian(_), ElementSpec::Affine { v, q }) => Element::Affine { v: v.clone(), q: point_index(g, q)? },
        (GroupKind::CentralPairing(_), ElementSpec::Pairing { a, nu }) => {
            g.normalize(Element::Pairing { a: a.clone(), nu: nu.clone() })
        }
        _ => return Err(CliError::schema(format!("element {e:?} does not fit a {} group", g.class_name()))),
    };
    g.check(&x).map_err(|err| CliError::schema(err.to_string()))?;
    Ok(x)
}

pub fn build_elements(g: &GroupHandle, es: &[ElementSpec]) -> CliResult<Vec<Element>> {
    es.iter().map(|e| build_element(g, e)).collect()
}

pub fn build_subgroup(g: &GroupHandle, gens: &[ElementSpec]) -> CliResult<Subgroup> {
    Ok(Subgroup::generated(g, &build_elements(g, gens)?)?)
}

pub fn build_coset(g: &GroupHandle, c: &CosetSpec) -> CliResult<Coset> {
    Ok(Coset::new(&build_subgroup(g, &c.subgroup)?, &build_element(g, &c.rep)?)?)
}

pub fn build_constraint(g: &GroupHandle, c: &ConstraintSpec) -> CliResult<Constraint> {
    Ok(Constraint { subgroup: build_subgroup(g, &c.subgroup)?, tolerance: parse_rational(&c.tolerance)? })
}

pub fn build_atom_set(g: &GroupHandle, a: &AtomSpec) -> CliResult<AtomSet> {
    match (&a.cosets, &a.elements) {
        (Some(cs), None) => {
            let mut set = CosetRingElement::empty(g);
            for c in cs {
                set = set.union(&CosetRingElement::from_coset(&build_coset(g, c)?))?;
            }
            Ok(AtomSet::Ring(set))
        }
        (None, Some(es)) => Ok(AtomSet::Finite(build_elements(g, es)?)),
        _ => Err(CliError::schema("an atom needs exactly one of `cosets` and `elements`")),
    }
}

pub fn build_atoms(g: &GroupHandle, atoms: &[AtomSpec]) -> CliResult<Vec<Atom>> {
    atoms
        .iter()
        .map(|a| {
            let target = a.target.as_deref().ok_or_else(|| CliError::schema("every atom needs a target"))?;
            Ok(Atom { set: build_atom_set(g, a)?, target: parse_rational(target)? })
        })
        .collect()
}

/// A finite group as a Cayley group together with the map from its own elements.
pub struct CayleyView {
    pub table: GroupHandle,
    pub reps: Vec<Element>,
}

impl CayleyView {
    pub fn new(g: &GroupHandle, cap: u64) -> CliResult<Self> {
        let (table, reps) = coset::to_cayley(g, cap)?;
        Ok(CayleyView { table, reps })
    }

    pub fn index_of(&self, source: &GroupHandle, e: &ElementSpec) -> CliResult<usize> {
        let x = build_element(source, e)?;
        if source.as_cayley().is_some() {
            let Element::Cayley(i) = x else { unreachable!() };
            return Ok(i);
        }
        Ok(self.reps.iter().position(|r| *r == x).expect("transversal of the trivial subgroup lists every element"))
    }
}
