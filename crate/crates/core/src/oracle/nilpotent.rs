//! Torsion-free nilpotent groups of class at most 2 in Mal'cev coordinates.
//!
//! With an adapted basis (central part C spanned by the bracket outputs, the
//! rest NC), an element is u(x)·exp(z) with u(x) = exp(x_1 v_1)⋯exp(x_r v_r),
//! x ∈ Z^r and z ∈ Z^s. The product is
//! (x, z)(x', z') = (x + x', z + z' + β(x, x')) with β(x, x') = Σ_{a>b} x_a x'_b ω_ab,
//! where ω_ab are the C-coordinates of [v_a, v_b].
//!
//! A finite-index normal subgroup N is determined by X = π(N) ⊆ Z^r,
//! C = N ∩ Z^s and values σ_i ∈ Z^s/C with (n_i, σ_i) ∈ N for the HNF rows n_i
//! of X. Normality is exactly ω(Z^r, X) ⊆ C, and [G : N] = [Z^r : X][Z^s : C].

use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::lattice::{enumerate_hnf, hnf_of, Hnf};
use crate::error::{Error, Result};
use crate::field::Rational;
use crate::mgroup::{GroupElement, MGroupDescription};
use crate::ntheory::divisors;

pub type Malcev = (Vec<i64>, Vec<i64>);

#[derive(Clone, Debug)]
pub struct MalcevBasis {
    pub nc: Vec<usize>,
    pub cc: Vec<usize>,
    /// omega[a][b] = C-coordinates of [v_{nc a}, v_{nc b}].
    pub omega: Vec<Vec<Vec<i64>>>,
}

fn to_i64(x: &Rational) -> Option<i64> {
    x.is_integer().then(|| x.to_integer().to_i64()).flatten()
}

impl MalcevBasis {
    pub fn r(&self) -> usize {
        self.nc.len()
    }
    pub fn s(&self) -> usize {
        self.cc.len()
    }

    pub fn new(g: &MGroupDescription) -> Result<Self> {
        let unsupported = |s: &str| Err(Error::UnsupportedFamily(s.to_string()));
        if g.rank_h() != 0 || g.finite.is_some() {
            return unsupported("nilpotent oracle needs n = 0 and no finite part");
        }
        let st = g.lie.structure();
        let mut cc: Vec<usize> = st.iter().map(|e| e.2).collect();
        cc.sort();
        cc.dedup();
        if st.iter().any(|e| cc.contains(&e.0) || cc.contains(&e.1)) {
            return unsupported("basis is not adapted to a class-2 decomposition");
        }
        if st.iter().any(|e| !e.3.is_integer()) {
            return unsupported("structure constants must be integers");
        }
        let nc: Vec<usize> = (0..g.dim_k()).filter(|i| !cc.contains(i)).collect();
        let s = cc.len();
        let mut omega = vec![vec![vec![0i64; s]; nc.len()]; nc.len()];
        for (i, j, k, c) in st {
            let a = nc.iter().position(|x| x == i).unwrap();
            let b = nc.iter().position(|x| x == j).unwrap();
            let kk = cc.iter().position(|x| x == k).unwrap();
            let c = to_i64(c).unwrap();
            omega[a][b][kk] += c;
            omega[b][a][kk] -= c;
        }
        let basis = MalcevBasis { nc, cc, omega };
        // the generators must generate the whole Mal'cev lattice
        let coords = g
            .generators
            .iter()
            .map(|x| basis.to_malcev(x))
            .collect::<Result<Vec<_>>>()?;
        if basis.r() > 0 {
            let xs: Vec<Vec<i64>> = coords.iter().map(|c| c.0.clone()).collect();
            if hnf_of(&xs, basis.r()).map(|h| h.index()) != Some(1) {
                return unsupported("generators do not project onto Z^r");
            }
        }
        if s > 0 {
            let mut zs: Vec<Vec<i64>> = Vec::new();
            for (i, a) in coords.iter().enumerate() {
                if a.0.iter().all(|&v| v == 0) {
                    zs.push(a.1.clone());
                }
                for b in &coords[i + 1..] {
                    zs.push(basis.omega_pair(&a.0, &b.0));
                }
            }
            if hnf_of(&zs, s).map(|h| h.index()) != Some(1) {
                return unsupported("commutators and central generators do not span the centre lattice");
            }
        }
        Ok(basis)
    }

    /// Σ_{a,b} x_a y_b ω_ab.
    pub fn omega_pair(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.s()];
        for a in 0..self.r() {
            for b in 0..self.r() {
                if x[a] != 0 && y[b] != 0 {
                    for k in 0..self.s() {
                        out[k] += x[a] * y[b] * self.omega[a][b][k];
                    }
                }
            }
        }
        out
    }

    fn beta(&self, x: &[i64], y: &[i64]) -> Vec<i128> {
        let mut out = vec![0i128; self.s()];
        for a in 0..self.r() {
            for b in 0..a {
                if x[a] != 0 && y[b] != 0 {
                    for k in 0..self.s() {
                        out[k] += x[a] as i128 * y[b] as i128 * self.omega[a][b][k] as i128;
                    }
                }
            }
        }
        out
    }

    pub fn to_malcev(&self, g: &GroupElement) -> Result<Malcev> {
        let outside = || Error::Precondition("element lies outside the Mal'cev lattice".into());
        let x: Vec<i64> = self
            .nc
            .iter()
            .map(|&i| to_i64(&g.k[i]).ok_or_else(outside))
            .collect::<Result<_>>()?;
        let mut z: Vec<Rational> = self.cc.iter().map(|&i| g.k[i].clone()).collect();
        let half = Rational::new(1.into(), 2.into());
        for a in 0..self.r() {
            for b in a + 1..self.r() {
                for (k, zk) in z.iter_mut().enumerate() {
                    *zk -= &half * Rational::from_integer((x[a] as i128 * x[b] as i128 * self.omega[a][b][k] as i128).into());
                }
            }
        }
        let z = z.iter().map(|c| to_i64(c).ok_or_else(outside)).collect::<Result<_>>()?;
        Ok((x, z))
    }

    pub fn mul(&self, g: &Malcev, h: &Malcev) -> Malcev {
        let b = self.beta(&g.0, &h.0);
        (
            g.0.iter().zip(&h.0).map(|(a, c)| a + c).collect(),
            (0..self.s()).map(|k| (g.1[k] as i128 + h.1[k] as i128 + b[k]) as i64).collect(),
        )
    }

    pub fn inv(&self, g: &Malcev) -> Malcev {
        self.pow(g, -1)
    }

    /// (u, σ)^n = (n u, n σ + C(n, 2) β(u, u)).
    pub fn pow(&self, g: &Malcev, n: i64) -> Malcev {
        let b = self.beta(&g.0, &g.0);
        let c2 = n as i128 * (n as i128 - 1) / 2;
        (
            g.0.iter().map(|a| a * n).collect(),
            (0..self.s()).map(|k| (n as i128 * g.1[k] as i128 + c2 * b[k]) as i64).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotentCertificate {
    pub x_lattice: Hnf,
    pub c_lattice: Hnf,
    pub sigma: Vec<Vec<i64>>,
    pub index: u64,
    /// Exponent of the image of the commutator subgroup in G/N.
    pub gamma2_exponent: u64,
}

impl NilpotentCertificate {
    /// The class-2 p-group bound: if G/N is a p-group whose commutator subgroup has
    /// exponent p^k, then |G/N| >= p^{3k}.
    pub fn p_group_bound_holds(&self) -> bool {
        let e = self.gamma2_exponent as u128;
        crate::ntheory::prime_power(self.index).is_none() || e * e * e <= self.index as u128
    }
}

#[derive(Clone, Debug)]
struct Pair {
    x: Hnf,
    c: Hnf,
}

#[derive(Debug)]
pub struct NilpotentOracle {
    pub basis: MalcevBasis,
    pub bound: u64,
    pairs: Vec<OnceLock<Vec<Pair>>>,
}

impl NilpotentOracle {
    pub fn new(g: &MGroupDescription, bound: u64) -> Result<Self> {
        let basis = MalcevBasis::new(g)?;
        Ok(NilpotentOracle {
            basis,
            bound,
            pairs: (0..=bound).map(|_| OnceLock::new()).collect(),
        })
    }

    /// Lattices (X, C) with ω(Z^r, X) ⊆ C and index d.
    fn pairs_at(&self, d: u64) -> &[Pair] {
        self.pairs[d as usize].get_or_init(|| self.compute_pairs(d))
    }

    fn compute_pairs(&self, d: u64) -> Vec<Pair> {
        let (r, s) = (self.basis.r(), self.basis.s());
        let mut out = Vec::new();
        for d1 in divisors(d) {
            let d2 = d / d1;
            let cs = enumerate_hnf(s, d2);
            if cs.is_empty() {
                continue;
            }
            for x in enumerate_hnf(r, d1) {
                let w: Vec<Vec<i64>> = (0..r)
                    .flat_map(|a| {
                        let mut e = vec![0; r];
                        e[a] = 1;
                        x.rows.iter().map(|n| self.basis.omega_pair(&e, n)).collect::<Vec<_>>()
                    })
                    .collect();
                for c in &cs {
                    if w.iter().all(|v| c.contains(v)) {
                        out.push(Pair { x: x.clone(), c: c.clone() });
                    }
                }
            }
        }
        out
    }

    /// Whether g ∈ N(X, C, σ).
    fn member(&self, p: &Pair, sigma: &[Vec<i64>], g: &Malcev) -> bool {
        let Some(t) = p.x.coefficients(&g.0) else {
            return false;
        };
        let b = &self.basis;
        let mut w: Malcev = (vec![0; b.r()], vec![0; b.s()]);
        for (i, &ti) in t.iter().enumerate() {
            if ti != 0 {
                w = b.mul(&w, &b.pow(&(p.x.rows[i].clone(), sigma[i].clone()), ti));
            }
        }
        let h = b.mul(g, &b.inv(&w));
        p.c.contains(&h.1)
    }

    fn certificate(&self, p: &Pair, sigma: Vec<Vec<i64>>) -> NilpotentCertificate {
        let r = self.basis.r();
        let mut exponent = 1u64;
        for a in 0..r {
            for b in a + 1..r {
                let y = &self.basis.omega[a][b];
                let ord = (1..=p.c.index())
                    .find(|&t| p.c.contains(&y.iter().map(|v| v * t as i64).collect::<Vec<_>>()))
                    .unwrap();
                exponent = exponent.lcm(&ord);
            }
        }
        NilpotentCertificate {
            x_lattice: p.x.clone(),
            c_lattice: p.c.clone(),
            sigma,
            index: p.x.index() * p.c.index(),
            gamma2_exponent: exponent,
        }
    }

    /// Least index of a normal subgroup missing g, searching d = 2, 3, ... up to the bound.
    pub fn divisibility(&self, x: &GroupElement) -> Result<Option<NilpotentCertificate>> {
        if x.is_identity() {
            return Err(Error::Identity);
        }
        let g = self.basis.to_malcev(x)?;
        let (r, s) = (self.basis.r(), self.basis.s());
        for d in 2..=self.bound {
            for p in self.pairs_at(d) {
                let zero = vec![vec![0; s]; r];
                let Some(t) = p.x.coefficients(&g.0) else {
                    return Ok(Some(self.certificate(p, zero)));
                };
                if !self.member(p, &zero, &g) {
                    return Ok(Some(self.certificate(p, zero)));
                }
                // membership is affine in σ with linear part σ ↦ Σ t_i σ_i mod C
                for (i, &ti) in t.iter().enumerate() {
                    for k in 0..s {
                        let mut v = vec![0; s];
                        v[k] = ti;
                        if !p.c.contains(&v) {
                            let mut sigma = zero.clone();
                            sigma[i][k] = 1;
                            return Ok(Some(self.certificate(p, sigma)));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// Exhaustive search over every σ, optionally only over N containing the
    /// congruence kernel {x ≡ 0, z ≡ 0 mod q}. Used to cross-check the fast path.
    pub fn divisibility_exhaustive(&self, x: &GroupElement, q: Option<i64>) -> Result<Option<u64>> {
        let g = self.basis.to_malcev(x)?;
        let (r, s) = (self.basis.r(), self.basis.s());
        let kernel: Vec<Malcev> = match q {
            Some(q) => (0..r)
                .map(|a| {
                    let mut e = vec![0; r];
                    e[a] = q;
                    (e, vec![0; s])
                })
                .chain((0..s).map(|k| {
                    let mut e = vec![0; s];
                    e[k] = q;
                    (vec![0; r], e)
                }))
                .collect(),
            None => Vec::new(),
        };
        for d in 2..=self.bound {
            if let Some(q) = q {
                if (q as u128).pow((r + s) as u32) % d as u128 != 0 {
                    continue;
                }
            }
            for p in self.pairs_at(d) {
                let reps = p.c.representatives();
                let mut sigma = vec![vec![0; s]; r];
                let total = (reps.len() as u64).pow(r as u32);
                for idx in 0..total {
                    let mut rest = idx;
                    for slot in sigma.iter_mut() {
                        *slot = reps[(rest % reps.len() as u64) as usize].clone();
                        rest /= reps.len() as u64;
                    }
                    if kernel.iter().all(|k| self.member(p, &sigma, k)) && !self.member(p, &sigma, &g) {
                        return Ok(Some(d));
                    }
                }
            }
        }
        Ok(None)
    }
}
