//! Integer lattices in row-style Hermite normal form.
//!
//! A [`Lattice`] is the ℤ-span of a set of integer row vectors, stored as its
//! unique HNF basis: rows in echelon form, positive pivots, entries above each
//! pivot reduced into `[0, pivot)`. Everything the group kernel needs (index,
//! intersection, kernels, preimages, solving `x·B = t`) is built on one
//! partial row-reduction routine, [`echelon_block`].

use num_integer::Integer;

pub type IVec = Vec<i64>;
pub type IMat = Vec<Vec<i64>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lattice {
    dim: usize,
    basis: Vec<IVec>,
    pivots: Vec<usize>,
}

fn axpy(dst: &mut [i64], k: i64, src: &[i64]) {
    if k == 0 {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= k * *s;
    }
}

/// Row-reduces over the first `block` columns only.
///
/// Returns `(pivot_rows, pivot_columns, rest)`: the pivot rows are in HNF on
/// the block (trailing columns carried along), and `rest` holds the rows that
/// ended up zero on the block. The trailing columns of `rest` span exactly the
/// trailing parts of all integer combinations that vanish on the block.
pub fn echelon_block(rows: Vec<IVec>, block: usize) -> (Vec<IVec>, Vec<usize>, Vec<IVec>) {
    let mut active: Vec<IVec> = rows;
    let mut pivot_rows: Vec<IVec> = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..block {
        let pivot = loop {
            let nz: Vec<usize> = (0..active.len()).filter(|&i| active[i][c] != 0).collect();
            if nz.is_empty() {
                break None;
            }
            let best = *nz.iter().min_by_key(|&&i| active[i][c].unsigned_abs()).unwrap();
            if nz.len() == 1 {
                break Some(active.swap_remove(best));
            }
            let prow = active[best].clone();
            for &j in &nz {
                if j != best {
                    let q = Integer::div_floor(&active[j][c], &prow[c]);
                    axpy(&mut active[j], q, &prow);
                }
            }
        };
        if let Some(mut prow) = pivot {
            if prow[c] < 0 {
                prow.iter_mut().for_each(|x| *x = -*x);
            }
            for r in pivot_rows.iter_mut() {
                let q = Integer::div_floor(&r[c], &prow[c]);
                axpy(r, q, &prow);
            }
            pivot_rows.push(prow);
            pivots.push(c);
        }
    }
    (pivot_rows, pivots, active)
}

impl Lattice {
    pub fn new(dim: usize, gens: impl IntoIterator<Item = IVec>) -> Self {
        let rows: Vec<IVec> = gens
            .into_iter()
            .inspect(|g| assert_eq!(g.len(), dim, "generator length mismatch"))
            .filter(|g| g.iter().any(|&x| x != 0))
            .collect();
        let (basis, pivots, _) = echelon_block(rows, dim);
        Lattice { dim, basis, pivots }
    }

    pub fn zero(dim: usize) -> Self {
        Lattice { dim, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        Lattice::new(dim, (0..dim).map(|i| unit(dim, i)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[IVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    /// `[ℤ^dim : self]`, or `None` when the rank is deficient.
    pub fn index(&self) -> Option<u64> {
        if !self.is_full_rank() {
            return None;
        }
        Some(self.basis.iter().zip(&self.pivots).map(|(r, &c)| r[c] as u64).product())
    }

    pub fn coefficients(&self, v: &[i64]) -> Option<IVec> {
        assert_eq!(v.len(), self.dim);
        let mut t = v.to_vec();
        let mut coeffs = vec![0; self.rank()];
        for (i, (row, &c)) in self.basis.iter().zip(&self.pivots).enumerate() {
            if t[c] % row[c] != 0 {
                return None;
            }
            let k = t[c] / row[c];
            axpy(&mut t, k, row);
            coeffs[i] = k;
        }
        t.iter().all(|&x| x == 0).then_some(coeffs)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.coefficients(v).is_some()
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Coset representative with every pivot coordinate in `[0, pivot)`.
    pub fn reduce(&self, v: &[i64]) -> IVec {
        let mut t = v.to_vec();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            let k = Integer::div_floor(&t[c], &row[c]);
            axpy(&mut t, k, row);
        }
        t
    }

    /// Coset representative that is least in the centred coordinate order
    /// `0, -1, 1, -2, 2, …` compared lexicographically.
    pub fn reduce_centered(&self, v: &[i64]) -> IVec {
        let mut t = v.to_vec();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            let p = row[c];
            let h = p / 2;
            let k = Integer::div_floor(&(t[c] + h), &p);
            axpy(&mut t, k, row);
        }
        t
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        Lattice::new(self.dim, self.basis.iter().chain(&other.basis).cloned())
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut rows = Vec::new();
        for b in &self.basis {
            rows.push(b.iter().chain(b.iter()).copied().collect());
        }
        for b in &other.basis {
            rows.push(b.iter().copied().chain(std::iter::repeat_n(0, n)).collect());
        }
        let (_, _, rest) = echelon_block(rows, n);
        Lattice::new(n, rest.into_iter().map(|r| r[n..].to_vec()))
    }

    /// Image under `v ↦ M v` (column action).
    pub fn transform(&self, m: &IMat) -> Lattice {
        Lattice::new(self.dim, self.basis.iter().map(|b| mat_vec(m, b)))
    }
}

pub fn unit(dim: usize, i: usize) -> IVec {
    let mut v = vec![0; dim];
    v[i] = 1;
    v
}

/// `{x ∈ ℤ^rows : x·B = 0}` for the row matrix `B` with `ncols` columns.
pub fn kernel(rows: &[IVec], ncols: usize) -> Lattice {
    let s = rows.len();
    let aug: Vec<IVec> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            assert_eq!(r.len(), ncols);
            r.iter().copied().chain(unit(s, i)).collect()
        })
        .collect();
    let (_, _, rest) = echelon_block(aug, ncols);
    Lattice::new(s, rest.into_iter().map(|r| r[ncols..].to_vec()))
}

/// Some integer `x` with `x·B = target`, if one exists.
pub fn solve(rows: &[IVec], ncols: usize, target: &[i64]) -> Option<IVec> {
    let s = rows.len();
    let aug: Vec<IVec> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().copied().chain(unit(s, i)).collect())
        .collect();
    let (prows, pivots, _) = echelon_block(aug, ncols);
    let mut t = target.to_vec();
    let mut x = vec![0i64; s];
    for (row, &c) in prows.iter().zip(&pivots) {
        if t[c] % row[c] != 0 {
            return None;
        }
        let k = t[c] / row[c];
        axpy(&mut t, k, &row[..ncols]);
        for (xi, ri) in x.iter_mut().zip(&row[ncols..]) {
            *xi += k * ri;
        }
    }
    t.iter().all(|&v| v == 0).then_some(x)
}

/// `{x ∈ ℤ^m : x·Φ ∈ target}` where `Φ` has `m` rows in `ℤ^k`.
pub fn preimage(map_rows: &[IVec], target: &Lattice) -> Lattice {
    let m = map_rows.len();
    let k = target.dim();
    let mut rows: Vec<IVec> = map_rows.to_vec();
    rows.extend(target.basis().iter().cloned());
    let ker = kernel(&rows, k);
    Lattice::new(m, ker.basis().iter().map(|v| v[..m].to_vec()))
}

/// A point of `(t1 + L1) ∩ (t2 + L2)`, if the translates meet.
pub fn meet_translates(t1: &[i64], l1: &Lattice, t2: &[i64], l2: &Lattice) -> Option<IVec> {
    let dim = l1.dim();
    let mut rows = l1.basis().to_vec();
    rows.extend(l2.basis().iter().map(|r| r.iter().map(|x| -x).collect()));
    let target: IVec = t2.iter().zip(t1).map(|(a, b)| a - b).collect();
    let x = solve(&rows, dim, &target)?;
    let mut v = t1.to_vec();
    for (xi, row) in x.iter().zip(l1.basis()) {
        for (vj, rj) in v.iter_mut().zip(row) {
            *vj += xi * rj;
        }
    }
    Some(v)
}

pub fn mat_vec(m: &IMat, v: &[i64]) -> IVec {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect())
        .collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| unit(n, i)).collect()
}

pub fn transpose(m: &IMat, ncols: usize) -> IMat {
    (0..ncols).map(|j| m.iter().map(|r| r[j]).collect()).collect()
}

/// Determinant by fraction-free elimination.
pub fn det(m: &IMat) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hnf_is_canonical() {
        let a = Lattice::new(2, vec![vec![2, 0], vec![0, 3]]);
        let b = Lattice::new(2, vec![vec![2, 3], vec![4, 3], vec![0, 6]]);
        assert_eq!(a, b);
        assert_eq!(a.index(), Some(6));
        assert_eq!(a.basis(), &[vec![2, 0], vec![0, 3]]);
    }

    #[test]
    fn index_of_rank_deficient_is_none() {
        let l = Lattice::new(2, vec![vec![1, 0]]);
        assert_eq!(l.index(), None);
        assert_eq!(l.rank(), 1);
    }

    #[test]
    fn intersection_of_2z_and_3z() {
        let a = Lattice::new(1, vec![vec![2]]);
        let b = Lattice::new(1, vec![vec![3]]);
        assert_eq!(a.intersect(&b), Lattice::new(1, vec![vec![6]]));
        assert_eq!(a.sum(&b), Lattice::full(1));
    }

    #[test]
    fn intersection_2d() {
        let a = Lattice::new(2, vec![vec![2, 0], vec![0, 1]]);
        let b = Lattice::new(2, vec![vec![1, 0], vec![0, 3]]);
        let c = a.intersect(&b);
        assert_eq!(c, Lattice::new(2, vec![vec![2, 0], vec![0, 3]]));
        assert_eq!(c.index(), Some(6));
    }

    #[test]
    fn centered_reduction_orders_residues() {
        let l = Lattice::new(1, vec![vec![4]]);
        let reps: Vec<i64> = (0..4).map(|v| l.reduce_centered(&[v])[0]).collect();
        assert_eq!(reps, vec![0, 1, -2, -1]);
        let l2 = Lattice::new(1, vec![vec![2]]);
        assert_eq!(l2.reduce_centered(&[1]), vec![-1]);
        let line = Lattice::new(2, vec![vec![1, 0]]);
        assert_eq!(line.reduce_centered(&[5, 7]), vec![0, 7]);
    }

    #[test]
    fn kernel_and_solve() {
        let rows = vec![vec![1, 1], vec![2, 2], vec![0, 1]];
        let k = kernel(&rows, 2);
        assert_eq!(k.rank(), 1);
        for b in k.basis() {
            let img: Vec<i64> = (0..2).map(|j| (0..3).map(|i| b[i] * rows[i][j]).sum()).collect();
            assert_eq!(img, vec![0, 0]);
        }
        let x = solve(&rows, 2, &[3, 5]).unwrap();
        let img: Vec<i64> = (0..2).map(|j| (0..3).map(|i| x[i] * rows[i][j]).sum()).collect();
        assert_eq!(img, vec![3, 5]);
        assert!(solve(&[vec![2, 0]], 2, &[1, 0]).is_none());
    }

    #[test]
    fn preimage_mod_two() {
        // x ↦ x1 + x2 into ℤ, preimage of 2ℤ.
        let p = preimage(&[vec![1], vec![1]], &Lattice::new(1, vec![vec![2]]));
        assert_eq!(p.index(), Some(2));
        assert!(p.contains(&[1, 1]));
        assert!(!p.contains(&[1, 0]));
    }

    #[test]
    fn translates_meet_by_crt() {
        let a = Lattice::new(1, vec![vec![4]]);
        let b = Lattice::new(1, vec![vec![6]]);
        let v = meet_translates(&[1], &a, &[3], &b).unwrap();
        assert_eq!(v[0].rem_euclid(4), 1);
        assert_eq!(v[0].rem_euclid(6), 3);
        assert!(meet_translates(&[0], &a, &[1], &b).is_none());
    }

    #[test]
    fn det_matches_known_values() {
        assert_eq!(det(&vec![vec![0, 1], vec![-1, 0]]), 1);
        assert_eq!(det(&vec![vec![2, 1], vec![1, 1]]), 1);
        assert_eq!(det(&vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]), -1);
    }

    fn small_vecs(dim: usize, n: usize) -> impl Strategy<Value = Vec<IVec>> {
        prop::collection::vec(prop::collection::vec(-6i64..=6, dim), 0..=n)
    }

    proptest! {
        #[test]
        fn regenerating_from_basis_is_idempotent(gens in small_vecs(3, 4)) {
            let l = Lattice::new(3, gens.clone());
            prop_assert_eq!(Lattice::new(3, l.basis().to_vec()), l.clone());
            for g in &gens {
                prop_assert!(l.contains(g));
            }
        }

        #[test]
        fn intersection_is_exact(a in small_vecs(2, 3), b in small_vecs(2, 3), v in prop::collection::vec(-12i64..=12, 2)) {
            let la = Lattice::new(2, a);
            let lb = Lattice::new(2, b);
            let i = la.intersect(&lb);
            prop_assert_eq!(i.contains(&v), la.contains(&v) && lb.contains(&v));
        }

        #[test]
        fn centered_reduction_is_a_coset_invariant(gens in small_vecs(2, 3), v in prop::collection::vec(-20i64..=20, 2), w in prop::collection::vec(-3i64..=3, 3)) {
            let l = Lattice::new(2, gens);
            let r = l.reduce_centered(&v);
            let diff: Vec<i64> = v.iter().zip(&r).map(|(a, b)| a - b).collect();
            prop_assert!(l.contains(&diff));
            let mut shifted = v.clone();
            for (k, b) in w.iter().zip(l.basis()) {
                for (s, x) in shifted.iter_mut().zip(b) { *s += k * x; }
            }
            prop_assert_eq!(l.reduce_centered(&shifted), r);
        }
    }
}
