//! Exact finitely additive means on finite groups.
//!
//! `sup_A |μ(gA) − μ(A)|` is the total-variation distance between `μ` and
//! `x ↦ μ(gx)`, i.e. the sum of the positive parts of their difference, so
//! the defect is a maximum over `g` of such sums.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::group::{CayleyTable, GroupHandle};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeanVector {
    group: GroupHandle,
    weights: Vec<Rational>,
}

impl MeanVector {
    pub fn new(group: &GroupHandle, weights: Vec<Rational>) -> Result<Self> {
        let t = group.require_cayley()?;
        if weights.len() != t.order() {
            return Err(Error::InvalidRequest(format!("{} weights for a group of order {}", weights.len(), t.order())));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidRequest("weights must be non-negative".into()));
        }
        if weights.iter().sum::<Rational>() != rational::one() {
            return Err(Error::InvalidRequest("weights must sum to 1".into()));
        }
        Ok(MeanVector { group: group.clone(), weights })
    }

    pub fn uniform(group: &GroupHandle) -> Result<Self> {
        let n = group.require_cayley()?.order();
        Self::new(group, vec![rational::rat(1, n as i64); n])
    }

    pub fn point_mass(group: &GroupHandle, at: usize) -> Result<Self> {
        let n = group.require_cayley()?.order();
        let mut w = vec![rational::zero(); n];
        *w.get_mut(at).ok_or_else(|| Error::InvalidRequest(format!("no element {at}")))? = rational::one();
        Self::new(group, w)
    }

    /// Weights keyed by element label; missing labels weigh zero.
    pub fn from_labels(group: &GroupHandle, weights: &BTreeMap<String, Rational>) -> Result<Self> {
        let t = group.require_cayley()?;
        let mut w = vec![rational::zero(); t.order()];
        for (label, x) in weights {
            let i = t.find_label(label).ok_or_else(|| Error::InvalidRequest(format!("unknown element {label}")))?;
            w[i] = x.clone();
        }
        Self::new(group, w)
    }

    pub fn to_labels(&self) -> BTreeMap<String, Rational> {
        let t = self.table();
        self.weights.iter().enumerate().map(|(i, w)| (t.label(i).to_string(), w.clone())).collect()
    }

    /// Independent weights `a/b` with `b ≤ 64`, normalized.
    pub fn random<R: Rng + ?Sized>(group: &GroupHandle, rng: &mut R) -> Result<Self> {
        let n = group.require_cayley()?.order();
        loop {
            let raw: Vec<Rational> = (0..n)
                .map(|_| {
                    let b = rng.gen_range(1..=64);
                    rational::rat(rng.gen_range(0..=b), b)
                })
                .collect();
            let total: Rational = raw.iter().sum();
            if total.is_zero() {
                continue;
            }
            return Self::new(group, raw.into_iter().map(|w| w / &total).collect());
        }
    }

    pub fn group(&self) -> &GroupHandle {
        &self.group
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    fn table(&self) -> &CayleyTable {
        self.group.as_cayley().unwrap()
    }

    pub fn measure(&self, set: &[usize]) -> Rational {
        set.iter().map(|&i| self.weights[i].clone()).sum()
    }
}

fn positive_part_sum(shifted: impl Iterator<Item = Rational>, base: &[Rational]) -> Rational {
    shifted.zip(base).map(|(a, b)| a - b).filter(|d| d.is_positive()).sum()
}

/// `sup_{A, g} |μ(gA) − μ(A)|`.
pub fn defect_left(mu: &MeanVector, mode: Execution) -> Rational {
    let t = mu.table();
    let n = t.order();
    let w = &mu.weights;
    exec::map_range(mode, n, |g| positive_part_sum((0..n).map(|x| w[t.mul(g, x)].clone()), w))
        .into_iter()
        .max()
        .unwrap()
}

/// `sup_{A, g} |μ(Ag) − μ(A)|`.
pub fn defect_right(mu: &MeanVector, mode: Execution) -> Rational {
    let t = mu.table();
    let n = t.order();
    let w = &mu.weights;
    exec::map_range(mode, n, |g| positive_part_sum((0..n).map(|x| w[t.mul(x, g)].clone()), w))
        .into_iter()
        .max()
        .unwrap()
}

/// `μ̄({x}) = Σ_h μ(h) μ(hx)`.
pub fn smooth_mean(mu: &MeanVector, mode: Execution) -> MeanVector {
    let t = mu.table();
    let n = t.order();
    let w = &mu.weights;
    let weights = exec::map_range(mode, n, |x| (0..n).map(|h| &w[h] * &w[t.mul(h, x)]).sum());
    MeanVector { group: mu.group.clone(), weights }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmoothingReport {
    #[serde(with = "rational::serde_str")]
    pub left_before: Rational,
    #[serde(with = "rational::serde_str")]
    pub left_after: Rational,
    #[serde(with = "rational::serde_str")]
    pub right_before: Rational,
    #[serde(with = "rational::serde_str")]
    pub right_after: Rational,
    /// `(1 + δ_r(μ))/2 · δ_ℓ(μ)`.
    #[serde(with = "rational::serde_str")]
    pub left_bound: Rational,
    pub holds: bool,
}

pub fn smoothing_report(mu: &MeanVector, mode: Execution) -> (MeanVector, SmoothingReport) {
    let bar = smooth_mean(mu, mode);
    let left_before = defect_left(mu, mode);
    let right_before = defect_right(mu, mode);
    let left_after = defect_left(&bar, mode);
    let right_after = defect_right(&bar, mode);
    let left_bound = (rational::one() + &right_before) / rational::int(2) * &left_before;
    let holds = right_after <= right_before && left_after <= left_bound;
    (bar, SmoothingReport { left_before, left_after, right_before, right_after, left_bound, holds })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugacyPartition {
    /// Classes as sorted element indices, ordered by least element.
    pub classes: Vec<Vec<usize>>,
}

impl ConjugacyPartition {
    pub fn count(&self) -> usize {
        self.classes.len()
    }
}

pub fn conjugacy_partition(group: &GroupHandle) -> Result<ConjugacyPartition> {
    let t = group.require_cayley()?;
    let n = t.order();
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let mut class: Vec<usize> = (0..n).map(|g| t.mul(t.mul(g, x), t.inv(g))).collect();
        class.sort_unstable();
        class.dedup();
        for &y in &class {
            seen[y] = true;
        }
        classes.push(class);
    }
    Ok(ConjugacyPartition { classes })
}

/// `cc(G)/|G|`.
pub fn k_uniform(group: &GroupHandle) -> Result<Rational> {
    let n = group.require_cayley()?.order();
    Ok(rational::rat(conjugacy_partition(group)?.count() as i64, n as i64))
}

/// The least `μ(S)` over sets `S` of conjugacy-class representatives.
pub fn k_mu(mu: &MeanVector) -> Result<Rational> {
    let part = conjugacy_partition(&mu.group)?;
    Ok(part.classes.iter().map(|c| c.iter().map(|&i| mu.weights[i].clone()).min().unwrap()).sum())
}

/// Elements whose centralizer has index at most `n`.
pub fn x_n(group: &GroupHandle, n: u64) -> Result<Vec<usize>> {
    let t = group.require_cayley()?;
    let order = t.order();
    Ok((0..order)
        .filter(|&a| {
            let c = (0..order).filter(|&b| t.commute(a, b)).count();
            ((order / c) as u64) <= n
        })
        .collect())
}

/// `(n+1)·k_μ(G) ≤ 1 + n·μ(X_n)`.
pub fn kmu_strata_inequality(mu: &MeanVector, n: u64) -> Result<crate::dc::InequalityCheck> {
    let lhs = rational::int(n as i64 + 1) * k_mu(mu)?;
    let rhs = rational::one() + rational::int(n as i64) * mu.measure(&x_n(&mu.group, n)?);
    Ok(crate::dc::InequalityCheck::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::library;
    use crate::rational::rat;

    const SEQ: Execution = Execution::Sequential;

    fn two_point(a: Rational, b: Rational) -> MeanVector {
        MeanVector::new(&library::cyclic(2), vec![a, b]).unwrap()
    }

    #[test]
    fn rejects_bad_weights() {
        let g = library::cyclic(2);
        assert!(MeanVector::new(&g, vec![rat(1, 2), rat(1, 3)]).is_err());
        assert!(MeanVector::new(&g, vec![rat(3, 2), rat(-1, 2)]).is_err());
        assert!(MeanVector::new(&g, vec![rat(1, 1)]).is_err());
    }

    #[test]
    fn two_point_defects() {
        assert_eq!(defect_left(&MeanVector::uniform(&library::symmetric(3)).unwrap(), SEQ), rat(0, 1));
        assert_eq!(defect_left(&two_point(rat(1, 1), rat(0, 1)), SEQ), rat(1, 1));
        assert_eq!(defect_left(&two_point(rat(3, 4), rat(1, 4)), SEQ), rat(1, 2));
    }

    #[test]
    fn two_point_smoothing() {
        let pm = two_point(rat(1, 1), rat(0, 1));
        assert_eq!(smooth_mean(&pm, SEQ), pm);
        let (bar, r) = smoothing_report(&two_point(rat(3, 4), rat(1, 4)), SEQ);
        assert_eq!(bar.weights(), &[rat(5, 8), rat(3, 8)]);
        assert_eq!((r.left_after, r.left_bound, r.holds), (rat(1, 4), rat(3, 8), true));
    }

    #[test]
    fn class_counts() {
        assert_eq!(conjugacy_partition(&library::symmetric(3)).unwrap().count(), 3);
        assert_eq!(k_uniform(&library::dihedral(4)).unwrap(), rat(5, 8));
        assert_eq!(k_uniform(&library::cyclic(5)).unwrap(), rat(1, 1));
    }

    #[test]
    fn k_mu_examples() {
        let s3 = library::symmetric(3);
        assert_eq!(k_mu(&MeanVector::uniform(&s3).unwrap()).unwrap(), rat(1, 2));
        let e = s3.as_cayley().unwrap().identity();
        assert_eq!(k_mu(&MeanVector::point_mass(&s3, e).unwrap()).unwrap(), rat(1, 1));
    }

    #[test]
    fn kmu_inequality_examples() {
        let r = kmu_strata_inequality(&MeanVector::uniform(&library::symmetric(3)).unwrap(), 2).unwrap();
        assert_eq!((r.lhs, r.rhs), (rat(3, 2), rat(2, 1)));
        let r = kmu_strata_inequality(&MeanVector::uniform(&library::dihedral(4)).unwrap(), 1).unwrap();
        assert_eq!((r.lhs, r.rhs, r.holds), (rat(5, 4), rat(5, 4), true));
    }

    #[test]
    fn labels_round_trip() {
        let g = library::symmetric(3);
        let mu = MeanVector::random(&g, &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5)).unwrap();
        assert_eq!(MeanVector::from_labels(&g, &mu.to_labels()).unwrap(), mu);
    }
}
