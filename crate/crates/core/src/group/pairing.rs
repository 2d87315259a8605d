//! Central extensions `1 → N → G → A → 1` defined by an alternating pairing.
//!
//! Elements are pairs `(a, ν)` with `a ∈ A`, `ν ∈ N`, multiplied by
//! `(a, ν)(b, μ) = (a + b, ν + μ + c(a, b))` where `c(a, b) = Σ_{i<j} aᵢ bⱼ βᵢⱼ`.
//! The commutator of `(a, ν)` and `(b, μ)` is then `β(a, b) = Σ aᵢ bⱼ βᵢⱼ`.

use super::abelian::AbelianGroup;
use crate::error::{Error, Result};
use crate::lattice::IVec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingGroup {
    base: AbelianGroup,
    center: AbelianGroup,
    beta: Vec<Vec<IVec>>,
}

impl PairingGroup {
    #[allow(clippy::needless_range_loop)]
    pub fn new(base: AbelianGroup, center: AbelianGroup, beta: Vec<Vec<IVec>>) -> Result<Self> {
        let r = base.dim();
        let s = center.dim();
        if beta.len() != r || beta.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidPairing(format!("pairing matrix must be {r}x{r}")));
        }
        if beta.iter().flatten().any(|v| v.len() != s) {
            return Err(Error::InvalidPairing(format!("pairing entries must have {s} coordinates")));
        }
        let beta: Vec<Vec<IVec>> = beta
            .into_iter()
            .map(|row| row.into_iter().map(|v| center.reduced(v)).collect())
            .collect();
        let zero = center.zero();
        for i in 0..r {
            if beta[i][i] != zero {
                return Err(Error::InvalidPairing(format!("entry ({i},{i}) is not zero")));
            }
            for j in 0..r {
                let neg = center.reduced(beta[j][i].iter().map(|x| -x).collect());
                if beta[i][j] != neg {
                    return Err(Error::InvalidPairing(format!("entries ({i},{j}) and ({j},{i}) are not opposite")));
                }
                if let Some(d) = base.modulus(i) {
                    let scaled = center.reduced(beta[i][j].iter().map(|x| x * d).collect());
                    if scaled != zero {
                        return Err(Error::InvalidPairing(format!(
                            "entry ({i},{j}) is not annihilated by the order {d} of generator {i}"
                        )));
                    }
                }
            }
        }
        Ok(PairingGroup { base, center, beta })
    }

    pub fn base(&self) -> &AbelianGroup {
        &self.base
    }

    pub fn center(&self) -> &AbelianGroup {
        &self.center
    }

    pub fn beta(&self, i: usize, j: usize) -> &IVec {
        &self.beta[i][j]
    }

    pub fn is_finite(&self) -> bool {
        self.base.is_finite() && self.center.is_finite()
    }

    fn form(&self, a: &[i64], b: &[i64], upper_only: bool) -> IVec {
        let mut out = self.center.zero();
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            let start = if upper_only { i + 1 } else { 0 };
            for (j, &bj) in b.iter().enumerate().skip(start) {
                if bj == 0 {
                    continue;
                }
                for (o, x) in out.iter_mut().zip(&self.beta[i][j]) {
                    *o += ai * bj * x;
                }
            }
        }
        out
    }

    /// `c(a, b)`, unreduced.
    pub fn cocycle(&self, a: &[i64], b: &[i64]) -> IVec {
        self.form(a, b, true)
    }

    /// `β(a, b)`, unreduced.
    pub fn pairing(&self, a: &[i64], b: &[i64]) -> IVec {
        self.form(a, b, false)
    }

    pub fn mul(&self, (a, nu): (&[i64], &[i64]), (b, mu): (&[i64], &[i64])) -> (IVec, IVec) {
        let c = self.cocycle(a, b);
        let s: IVec = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let t: IVec = nu.iter().zip(mu).zip(&c).map(|((x, y), z)| x + y + z).collect();
        (self.base.reduced(s), self.center.reduced(t))
    }

    pub fn inv(&self, (a, nu): (&[i64], &[i64])) -> (IVec, IVec) {
        let c = self.cocycle(a, a);
        let s: IVec = a.iter().map(|x| -x).collect();
        let t: IVec = nu.iter().zip(&c).map(|(x, z)| z - x).collect();
        (self.base.reduced(s), self.center.reduced(t))
    }

    /// `(a, ν)^k = (ka, kν + k(k-1)/2 · c(a, a))` for any integer `k`.
    pub fn pow(&self, (a, nu): (&[i64], &[i64]), k: i64) -> (IVec, IVec) {
        let c = self.cocycle(a, a);
        let tri = k * (k - 1) / 2;
        let s: IVec = a.iter().map(|x| k * x).collect();
        let t: IVec = nu.iter().zip(&c).map(|(x, z)| k * x + tri * z).collect();
        (self.base.reduced(s), self.center.reduced(t))
    }
}
