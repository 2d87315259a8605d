//! Finitely generated abelian groups `ℤ^r ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_t` in coordinates.

use crate::lattice::{IVec, Lattice};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<i64>,
}

impl AbelianGroup {
    pub fn new(free_rank: usize, torsion: Vec<i64>) -> Self {
        assert!(torsion.iter().all(|&d| d >= 2), "torsion factors must be at least 2");
        AbelianGroup { free_rank, torsion }
    }

    pub fn dim(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.torsion.iter().map(|&d| d as u64).product())
    }

    /// Modulus of coordinate `i`, or `None` for a free coordinate.
    pub fn modulus(&self, i: usize) -> Option<i64> {
        i.checked_sub(self.free_rank).map(|k| self.torsion[k])
    }

    /// The relation lattice `0 ⊕ d₁ℤ ⊕ … ⊕ d_tℤ`.
    pub fn relations(&self) -> Lattice {
        let n = self.dim();
        Lattice::new(
            n,
            self.torsion.iter().enumerate().map(|(k, &d)| {
                let mut v = vec![0; n];
                v[self.free_rank + k] = d;
                v
            }),
        )
    }

    pub fn reduce(&self, v: &mut [i64]) {
        for (k, &d) in self.torsion.iter().enumerate() {
            let x = &mut v[self.free_rank + k];
            *x = x.rem_euclid(d);
        }
    }

    pub fn reduced(&self, mut v: IVec) -> IVec {
        self.reduce(&mut v);
        v
    }

    pub fn is_reduced(&self, v: &[i64]) -> bool {
        v.len() == self.dim()
            && self.torsion.iter().enumerate().all(|(k, &d)| (0..d).contains(&v[self.free_rank + k]))
    }

    /// Centred value of coordinate `i`: torsion residues map into `[-⌊d/2⌋, d-1-⌊d/2⌋]`.
    pub fn centered(&self, i: usize, x: i64) -> i64 {
        match self.modulus(i) {
            None => x,
            Some(d) => {
                let h = d / 2;
                (x + h).rem_euclid(d) - h
            }
        }
    }

    pub fn zero(&self) -> IVec {
        vec![0; self.dim()]
    }

    /// Elements of the torsion subgroup, as reduced coordinate vectors.
    pub fn torsion_elements(&self) -> Vec<IVec> {
        let mut out = vec![self.zero()];
        for (k, &d) in self.torsion.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for v in &out {
                for x in 0..d {
                    let mut w = v.clone();
                    w[self.free_rank + k] = x;
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }
}
