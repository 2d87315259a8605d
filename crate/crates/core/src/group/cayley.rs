//! Finite groups given by a multiplication table.

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Largest user-supplied table whose associativity is checked exhaustively.
pub const MAX_CHECKED_ORDER: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    labels: Vec<String>,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<usize>,
}

impl CayleyTable {
    /// Validates a user-supplied table.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        if labels.len() != n {
            return Err(Error::InvalidTable(format!("{} labels for {} rows", labels.len(), n)));
        }
        if n > MAX_CHECKED_ORDER {
            return Err(Error::InvalidTable(format!(
                "order {n} exceeds {MAX_CHECKED_ORDER}, associativity cannot be checked"
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidTable(format!("row {i} has length {}", row.len())));
            }
            if let Some(&x) = row.iter().find(|&&x| x >= n) {
                return Err(Error::InvalidTable(format!("entry {x} out of range in row {i}")));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidTable(format!("row {i} repeats {x}")));
                }
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for row in &rows {
                if std::mem::replace(&mut seen[row[j]], true) {
                    return Err(Error::InvalidTable(format!("column {j} repeats {}", row[j])));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| rows[e][x] == x && rows[x][e] == x))
            .ok_or_else(|| Error::InvalidTable("no identity".into()))?;
        for a in 0..n {
            for b in 0..n {
                let ab = rows[a][b];
                for c in 0..n {
                    if rows[ab][c] != rows[a][rows[b][c]] {
                        return Err(Error::InvalidTable(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let table = rows.into_iter().flatten().map(|x| x as u32).collect();
        Ok(Self::assemble(labels, table, identity))
    }

    /// Builds a table already known to define a group (closures, quotients).
    pub(crate) fn trusted(labels: Vec<String>, table: Vec<u32>, identity: usize) -> Self {
        Self::assemble(labels, table, identity)
    }

    fn assemble(labels: Vec<String>, table: Vec<u32>, identity: usize) -> Self {
        let n = labels.len();
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if table[a * n + b] as usize == identity {
                    inverse[a] = b;
                    break;
                }
            }
        }
        CayleyTable { labels, table, identity, inverse }
    }

    /// Closes `gens` under `mul`, listing elements breadth first from the identity.
    pub fn closure<T, F, L>(identity: T, gens: &[T], mul: F, label: L) -> Self
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
        L: Fn(&T) -> String,
    {
        let mut elems = vec![identity.clone()];
        let mut index: HashMap<T, usize> = HashMap::from([(identity, 0)]);
        let mut head = 0;
        while head < elems.len() {
            let x = elems[head].clone();
            head += 1;
            for g in gens {
                let y = mul(&x, g);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    elems.push(y);
                }
            }
        }
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elems {
            for b in &elems {
                table.push(index[&mul(a, b)] as u32);
            }
        }
        let labels = elems.iter().map(label).collect();
        Self::trusted(labels, table, 0)
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn find_label(&self, s: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == s)
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        (0..n).map(|a| (0..n).map(|b| self.mul(a, b)).collect()).collect()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a + 1..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn commute(&self, a: usize, b: usize) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    /// Elements of the subgroup generated by `gens`, sorted.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut inside = vec![false; self.order()];
        inside[self.identity] = true;
        let mut members = vec![self.identity];
        let mut head = 0;
        while head < members.len() {
            let x = members[head];
            head += 1;
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    members.push(y);
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// A small generating set, chosen greedily in index order.
    pub fn generating_set(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut members = vec![self.identity];
        for x in 0..self.order() {
            if members.binary_search(&x).is_err() {
                gens.push(x);
                members = self.generated(&gens);
            }
        }
        gens
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }
}

/// Composes permutations left to right: `(p * q)(i) = q(p(i))`.
pub fn compose_perm(p: &[u8], q: &[u8]) -> Vec<u8> {
    p.iter().map(|&i| q[i as usize]).collect()
}

/// Cycle notation with points numbered from 1.
pub fn cycle_label(p: &[u8]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        out.push('(');
        let mut i = start;
        let mut first = true;
        while !seen[i] {
            seen[i] = true;
            if !first {
                out.push(' ');
            }
            out.push_str(&(i + 1).to_string());
            first = false;
            i = p[i] as usize;
        }
        out.push(')');
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}
