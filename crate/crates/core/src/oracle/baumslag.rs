//! BS(1,n) = Z[1/n] ⋊ Z with the generator of Z acting by multiplication by n.
//!
//! Finite-index normal subgroups are N(q, ℓ, v) = {(a, k) : ℓ | k, a ≡ (k/ℓ)v mod q}
//! with gcd(q, n) = 1, ord_q(n) | ℓ and (n - 1)v ≡ 0 mod q; the index is qℓ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Rational;
use crate::mgroup::{GroupElement, MGroupDescription};
use crate::ntheory::{mod_inv, multiplicative_order};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BsCertificate {
    pub q: u64,
    pub ell: u64,
    pub shift: u64,
    pub index: u64,
}

impl BsCertificate {
    /// Residue of a ∈ Z[1/n] mod q; None if the denominator is not a unit mod q.
    fn residue(a: &Rational, q: u64) -> Option<u64> {
        if q == 1 {
            return Some(0);
        }
        let qb = BigInt::from(q);
        let num = a.numer().mod_floor(&qb).to_u64().unwrap();
        let den = a.denom().mod_floor(&qb).to_i128().unwrap();
        let inv = mod_inv(den, q)?;
        Some(((num as u128 * inv as u128) % q as u128) as u64)
    }

    pub fn contains(&self, a: &Rational, k: i64) -> bool {
        if k.rem_euclid(self.ell as i64) != 0 {
            return false;
        }
        let t = (k / self.ell as i64).rem_euclid(self.q as i64) as u128;
        let target = ((t * self.shift as u128) % self.q as u128) as u64;
        Self::residue(a, self.q) == Some(target)
    }
}

#[derive(Clone, Debug)]
pub struct BsOracle {
    pub n: i64,
    pub bound: u64,
    /// All certificates of index ≤ bound, sorted by (index, q, shift).
    pub certificates: Vec<BsCertificate>,
}

impl BsOracle {
    /// Shape check: m = n = 1, abelian K, integer action s with |s| >= 2.
    pub fn applies(g: &MGroupDescription) -> bool {
        g.dim_k() == 1
            && g.rank_h() == 1
            && g.finite.is_none()
            && g.lie.is_abelian()
            && g.actions[0].data[0].is_integer()
            && g.actions[0].data[0].numer().abs() >= BigInt::from(2)
    }

    pub fn new(g: &MGroupDescription, bound: u64) -> Result<Self> {
        if !Self::applies(g) {
            return Err(Error::UnsupportedFamily("not of the form Z[1/n] ⋊ Z".into()));
        }
        let n = g.actions[0].data[0]
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::UnsupportedFamily("action scalar too large".into()))?;
        Ok(Self::with_scalar(n, bound))
    }

    pub fn with_scalar(n: i64, bound: u64) -> Self {
        let mut certificates = Vec::new();
        for q in 1..=bound {
            if (n as i128).gcd(&(q as i128)) != 1 {
                continue;
            }
            let o = if q == 1 { 1 } else { multiplicative_order(n as i128, q).unwrap() };
            let step = q / ((n - 1).unsigned_abs().gcd(&q).max(1));
            let step = if n == 1 { 1 } else { step };
            let mut ell = o;
            while q * ell <= bound {
                let mut v = 0;
                while v < q {
                    certificates.push(BsCertificate {
                        q,
                        ell,
                        shift: v,
                        index: q * ell,
                    });
                    v += step;
                }
                ell += o;
            }
        }
        certificates.sort_by_key(|c| (c.index, c.q, c.shift));
        BsOracle {
            n,
            bound,
            certificates,
        }
    }

    /// Least-index certificate not containing x, or None if all of index ≤ bound contain it.
    pub fn divisibility(&self, x: &GroupElement) -> Result<Option<&BsCertificate>> {
        if x.is_identity() {
            return Err(Error::Identity);
        }
        let a = &x.k[0];
        let k = x.h[0];
        for c in &self.certificates {
            if BsCertificate::residue(a, c.q).is_none() {
                return Err(Error::Precondition(format!(
                    "coordinate has a denominator not invertible mod {}",
                    c.q
                )));
            }
            if !c.contains(a, k) {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }
}
