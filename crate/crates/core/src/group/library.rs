//! Builders for the groups used throughout the crate.

use super::cayley::{compose_perm, cycle_label, CayleyTable};
use super::{AbelianGroup, AffineGroup, GroupHandle, PairingGroup};
use crate::error::{Error, Result};
use crate::lattice::{mat_mul, IMat};

pub fn cyclic(n: usize) -> GroupHandle {
    assert!(n >= 1);
    GroupHandle::finite(format!("C{n}"), cyclic_table(n))
}

pub(crate) fn cyclic_table(n: usize) -> CayleyTable {
    CayleyTable::closure(0usize, &[1 % n], |a, b| (a + b) % n, |a| a.to_string())
}

/// Dihedral group of order `2n`, elements `r^k` and `r^k s`.
pub fn dihedral(n: usize) -> GroupHandle {
    assert!(n >= 1);
    let t = CayleyTable::closure(
        (0usize, false),
        &[(1 % n, false), (0, true)],
        |&(k, f), &(l, g)| {
            let l = if f { (n - l) % n } else { l };
            ((k + l) % n, f ^ g)
        },
        |&(k, f)| match (k, f) {
            (0, false) => "e".to_string(),
            (0, true) => "s".to_string(),
            (k, false) => format!("r{k}"),
            (k, true) => format!("r{k}s"),
        },
    );
    GroupHandle::finite(format!("D{n}"), t)
}

/// Dicyclic group of order `4m`: `⟨a, x | a^{2m}, x² = a^m, x a x⁻¹ = a⁻¹⟩`.
pub fn dicyclic(m: usize) -> GroupHandle {
    assert!(m >= 1);
    let n = 2 * m;
    let t = CayleyTable::closure(
        (0usize, false),
        &[(1 % n, false), (0, true)],
        |&(k, f), &(l, g)| match (f, g) {
            (false, _) => ((k + l) % n, g),
            (true, false) => ((k + n - l) % n, true),
            (true, true) => ((k + n - l + m) % n, false),
        },
        |&(k, f)| match (k, f) {
            (0, false) => "1".to_string(),
            (0, true) => "x".to_string(),
            (k, false) => format!("a{k}"),
            (k, true) => format!("a{k}x"),
        },
    );
    let name = if m == 2 { "Q8".to_string() } else { format!("Dic{m}") };
    GroupHandle::finite(name, t)
}

pub fn quaternion() -> GroupHandle {
    dicyclic(2)
}

fn perm_group(name: String, n: usize, gens: Vec<Vec<u8>>) -> GroupHandle {
    let id: Vec<u8> = (0..n as u8).collect();
    let t = CayleyTable::closure(id, &gens, |a, b| compose_perm(a, b), |p| cycle_label(p));
    GroupHandle::finite(name, t)
}

/// Permutation group generated by `gens` on `n` points (0-based images).
pub fn permutation_group(name: impl Into<String>, n: usize, gens: &[Vec<usize>]) -> Result<GroupHandle> {
    if n == 0 || n > 64 {
        return Err(Error::InvalidTable(format!("permutation degree {n} out of range 1..=64")));
    }
    let mut perms = Vec::new();
    for g in gens {
        let mut seen = vec![false; n];
        if g.len() != n || g.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return Err(Error::InvalidTable(format!("{g:?} is not a permutation of {n} points")));
        }
        perms.push(g.iter().map(|&x| x as u8).collect());
    }
    Ok(perm_group(name.into(), n, perms))
}

pub fn symmetric(n: usize) -> GroupHandle {
    assert!(n >= 1);
    let mut gens = Vec::new();
    if n >= 2 {
        let mut t: Vec<u8> = (0..n as u8).collect();
        t.swap(0, 1);
        gens.push(t);
        gens.push((0..n as u8).map(|i| (i + 1) % n as u8).collect());
    }
    perm_group(format!("S{n}"), n, gens)
}

pub fn alternating(n: usize) -> GroupHandle {
    assert!(n >= 1);
    let gens = (2..n)
        .map(|k| {
            let mut p: Vec<u8> = (0..n as u8).collect();
            p[0] = 1;
            p[1] = k as u8;
            p[k] = 0;
            p
        })
        .collect();
    perm_group(format!("A{n}"), n, gens)
}

type M2 = [u8; 4];

fn m2_mul(a: &M2, b: &M2, p: u8) -> M2 {
    let f = |i: usize, j: usize| (a[2 * i] as u32 * b[j] as u32 + a[2 * i + 1] as u32 * b[2 + j] as u32) % p as u32;
    [f(0, 0) as u8, f(0, 1) as u8, f(1, 0) as u8, f(1, 1) as u8]
}

fn matrix_group(name: &str, gens: &[M2]) -> GroupHandle {
    let t = CayleyTable::closure(
        [1u8, 0, 0, 1],
        gens,
        |a, b| m2_mul(a, b, 3),
        |m| format!("[{} {};{} {}]", m[0], m[1], m[2], m[3]),
    );
    GroupHandle::finite(name, t)
}

pub fn sl2_3() -> GroupHandle {
    matrix_group("SL(2,3)", &[[1, 1, 0, 1], [1, 0, 1, 1]])
}

pub fn gl2_3() -> GroupHandle {
    matrix_group("GL(2,3)", &[[1, 1, 0, 1], [1, 0, 1, 1], [2, 0, 0, 1]])
}

pub fn direct_product(g: &GroupHandle, h: &GroupHandle) -> Result<GroupHandle> {
    let a = g.require_cayley()?;
    let b = h.require_cayley()?;
    let (n, m) = (a.order(), b.order());
    let mut table = Vec::with_capacity(n * m * n * m);
    for x in 0..n * m {
        for y in 0..n * m {
            let (x1, x2) = (x / m, x % m);
            let (y1, y2) = (y / m, y % m);
            table.push((a.mul(x1, y1) * m + b.mul(x2, y2)) as u32);
        }
    }
    let labels = (0..n * m).map(|x| format!("({},{})", a.label(x / m), b.label(x % m))).collect();
    let identity = a.identity() * m + b.identity();
    Ok(GroupHandle::finite(
        format!("{}x{}", g.name(), h.name()),
        CayleyTable::trusted(labels, table, identity),
    ))
}

fn product(g: GroupHandle, h: GroupHandle) -> GroupHandle {
    direct_product(&g, &h).expect("library factors are Cayley groups")
}

/// `𝔽₂^{2n} × 𝔽₂` with `(x, y, z)(x′, y′, z′) = (x + x′, y + y′, z + z′ + ⟨x, y′⟩)`.
///
/// Base coordinates are ordered `x₁ … xₙ y₁ … yₙ`.
pub fn heisenberg_f2(n: usize) -> GroupHandle {
    let base = AbelianGroup::new(0, vec![2; 2 * n]);
    let center = AbelianGroup::new(0, vec![2]);
    let mut beta = vec![vec![vec![0i64]; 2 * n]; 2 * n];
    for i in 0..n {
        beta[i][n + i] = vec![1];
        beta[n + i][i] = vec![1];
    }
    let g = PairingGroup::new(base, center, beta).expect("symplectic form is alternating");
    GroupHandle::pairing(format!("Heis_F2({n})"), g)
}

/// `ℤ²` extended by `ℤ/2` through the standard symplectic form mod 2.
pub fn mod2_symplectic() -> GroupHandle {
    let g = PairingGroup::new(
        AbelianGroup::new(2, vec![]),
        AbelianGroup::new(0, vec![2]),
        vec![vec![vec![0], vec![1]], vec![vec![1], vec![0]]],
    )
    .expect("alternating");
    GroupHandle::pairing("Z2_by_F2", g)
}

/// Integral Heisenberg group: `ℤ²` extended by `ℤ` through the determinant form.
pub fn integral_heisenberg() -> GroupHandle {
    let g = PairingGroup::new(
        AbelianGroup::new(2, vec![]),
        AbelianGroup::new(1, vec![]),
        vec![vec![vec![0], vec![1]], vec![vec![-1], vec![0]]],
    )
    .expect("alternating");
    GroupHandle::pairing("Heis_Z", g)
}

fn affine(name: &str, rank: usize, point: CayleyTable, action: Vec<IMat>) -> GroupHandle {
    GroupHandle::affine(name, AffineGroup::new(rank, point, action).expect("valid action"))
}

/// Matrices `m^k` indexed like [`cyclic_table`].
fn cyclic_action(m: &IMat, order: usize) -> Vec<IMat> {
    let n = m.len();
    let mut out = vec![crate::lattice::identity(n)];
    for k in 1..order {
        out.push(mat_mul(&out[k - 1], m));
    }
    out
}

pub fn free_abelian(n: usize) -> GroupHandle {
    let name = match n {
        1 => "Z".to_string(),
        n => format!("Z^{n}"),
    };
    affine(&name, n, cyclic_table(1), vec![crate::lattice::identity(n)])
}

pub fn integers() -> GroupHandle {
    free_abelian(1)
}

pub fn z2() -> GroupHandle {
    free_abelian(2)
}

/// `ℤ ⋊ ℤ/2` with the reflection acting by `-1`.
pub fn infinite_dihedral() -> GroupHandle {
    affine("D_inf", 1, cyclic_table(2), cyclic_action(&vec![vec![-1]], 2))
}

/// `ℤ² ⋊ ℤ/4` with the generator acting by a quarter turn.
pub fn z2_rot4() -> GroupHandle {
    affine("Z2_rot4", 2, cyclic_table(4), cyclic_action(&vec![vec![0, -1], vec![1, 0]], 4))
}

/// `ℤ² ⋊ ℤ/2` with the generator swapping the coordinates.
pub fn z2_swap() -> GroupHandle {
    affine("Z2_swap", 2, cyclic_table(2), cyclic_action(&vec![vec![0, 1], vec![1, 0]], 2))
}

/// Finite groups of order at most 48 used by the exhaustive suites.
pub fn finite_corpus() -> Vec<GroupHandle> {
    vec![
        cyclic(1),
        cyclic(2),
        cyclic(3),
        cyclic(4),
        cyclic(6),
        cyclic(8),
        product(cyclic(2), cyclic(2)),
        product(cyclic(2), cyclic(4)),
        product(product(cyclic(2), cyclic(2)), cyclic(2)),
        product(cyclic(3), cyclic(3)),
        symmetric(3),
        dihedral(4),
        quaternion(),
        dihedral(5),
        dihedral(6),
        alternating(4),
        product(dihedral(4), cyclic(2)),
        dihedral(8),
        dicyclic(4),
        dicyclic(3),
        dihedral(10),
        symmetric(4),
        sl2_3(),
        dihedral(12),
        product(cyclic(4), symmetric(3)),
        product(alternating(4), cyclic(2)),
        product(symmetric(3), symmetric(3)),
        product(symmetric(4), cyclic(2)),
        gl2_3(),
    ]
}

/// Finite groups of order at most 8.
pub fn tiny_corpus() -> Vec<GroupHandle> {
    vec![
        cyclic(1),
        cyclic(2),
        cyclic(3),
        cyclic(4),
        product(cyclic(2), cyclic(2)),
        cyclic(5),
        cyclic(6),
        symmetric(3),
        cyclic(7),
        cyclic(8),
        product(cyclic(2), cyclic(4)),
        product(product(cyclic(2), cyclic(2)), cyclic(2)),
        dihedral(4),
        quaternion(),
    ]
}

/// The infinite groups of the supported classes.
pub fn infinite_corpus() -> Vec<GroupHandle> {
    vec![integers(), z2(), infinite_dihedral(), z2_rot4(), z2_swap(), mod2_symplectic(), integral_heisenberg()]
}
