//! Semidirect products `ℤⁿ ⋊ Q` with `Q` finite acting by unimodular matrices.

use super::cayley::CayleyTable;
use crate::error::{Error, Result};
use crate::lattice::{det, identity, mat_mul, mat_vec, IMat, IVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineGroup {
    rank: usize,
    point: CayleyTable,
    action: Vec<IMat>,
    kernel: Vec<usize>,
}

impl AffineGroup {
    pub fn new(rank: usize, point: CayleyTable, action: Vec<IMat>) -> Result<Self> {
        if action.len() != point.order() {
            return Err(Error::InvalidAction(format!(
                "{} matrices for a point group of order {}",
                action.len(),
                point.order()
            )));
        }
        for (q, m) in action.iter().enumerate() {
            if m.len() != rank || m.iter().any(|r| r.len() != rank) {
                return Err(Error::InvalidAction(format!("matrix {q} is not {rank}x{rank}")));
            }
            if det(m).abs() != 1 {
                return Err(Error::InvalidAction(format!("matrix {q} is not unimodular")));
            }
        }
        if action[point.identity()] != identity(rank) {
            return Err(Error::InvalidAction("identity does not act trivially".into()));
        }
        for a in 0..point.order() {
            for b in 0..point.order() {
                if mat_mul(&action[a], &action[b]) != action[point.mul(a, b)] {
                    return Err(Error::InvalidAction(format!("not a homomorphism at ({a},{b})")));
                }
            }
        }
        let id = identity(rank);
        let kernel = (0..point.order()).filter(|&q| action[q] == id).collect();
        Ok(AffineGroup { rank, point, action, kernel })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn point(&self) -> &CayleyTable {
        &self.point
    }

    pub fn action(&self, q: usize) -> &IMat {
        &self.action[q]
    }

    pub fn actions(&self) -> &[IMat] {
        &self.action
    }

    /// Point-group elements acting trivially.
    pub fn kernel(&self) -> &[usize] {
        &self.kernel
    }

    pub fn act(&self, q: usize, v: &[i64]) -> IVec {
        mat_vec(&self.action[q], v)
    }

    pub fn mul(&self, (v, q): (&[i64], usize), (w, r): (&[i64], usize)) -> (IVec, usize) {
        let mut out = self.act(q, w);
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
        (out, self.point.mul(q, r))
    }

    pub fn inv(&self, (v, q): (&[i64], usize)) -> (IVec, usize) {
        let qi = self.point.inv(q);
        let w = self.act(qi, v).into_iter().map(|x| -x).collect();
        (w, qi)
    }
}
