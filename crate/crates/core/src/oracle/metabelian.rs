//! Z^m ⋊_M Z for an integral unimodular M.
//!
//! Every finite-index normal subgroup is N = ⟨Λ × {0}, (v, ℓ)⟩ where Λ is an
//! M-invariant sublattice with (M^ℓ - I)Z^m ⊆ Λ and (M - I)v ∈ Λ: take
//! Λ = N ∩ K, ℓZ = π(N) and any (v, ℓ) ∈ N; conjugating (v, ℓ) by (w, 0) and by h
//! gives the last two conditions, and they suffice for normality. The shift is
//! only defined mod Λ, so (Λ, ℓ, v mod Λ) is a bijective parametrisation with index
//! [Z^m : Λ]·ℓ.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use super::lattice::{enumerate_hnf, Hnf};
use crate::error::{Error, Result};
use crate::mgroup::{GroupElement, MGroupDescription};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalSubgroupCertificate {
    pub lattice: Hnf,
    pub ell: u64,
    pub shift: Vec<i64>,
    pub index: u64,
}

impl NormalSubgroupCertificate {
    /// (a, k) ∈ N iff ℓ | k and a - (k/ℓ)v ∈ Λ.
    pub fn contains(&self, a: &[i64], k: i64) -> bool {
        if k.rem_euclid(self.ell as i64) != 0 {
            return false;
        }
        let t = k / self.ell as i64;
        let w: Vec<i64> = a.iter().zip(&self.shift).map(|(x, v)| x - t * v).collect();
        self.lattice.contains(&w)
    }
}

#[derive(Clone, Debug)]
pub struct MetabelianOracle {
    pub m: usize,
    /// Rows of M, acting on column vectors.
    pub matrix: Vec<Vec<i64>>,
    pub bound: u64,
    pub certificates: Vec<NormalSubgroupCertificate>,
}

fn integral_matrix(g: &MGroupDescription) -> Option<Vec<Vec<i64>>> {
    g.actions[0]
        .rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| x.is_integer().then(|| x.to_integer().to_i64()).flatten())
                .collect()
        })
        .collect()
}

fn mat_mul_mod(a: &[Vec<i64>], b: &[Vec<i64>], d: i64) -> Vec<Vec<i64>> {
    let m = a.len();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..m)
                        .map(|k| (a[i][k] as i128 * b[k][j] as i128).rem_euclid(d as i128))
                        .sum::<i128>()
                        .rem_euclid(d as i128) as i64
                })
                .collect()
        })
        .collect()
}

impl MetabelianOracle {
    pub fn applies(g: &MGroupDescription) -> bool {
        g.rank_h() == 1
            && g.finite.is_none()
            && g.lie.is_abelian()
            && g.ambient_delta() == 1
            && integral_matrix(g).is_some_and(|m| {
                let det = crate::linalg::det(&crate::field::Q, &g.actions[0]);
                !m.is_empty() && (det == crate::field::int(1) || det == crate::field::int(-1))
            })
    }

    pub fn new(g: &MGroupDescription, bound: u64) -> Result<Self> {
        if !Self::applies(g) {
            return Err(Error::UnsupportedFamily(
                "not of the form Z^m ⋊ Z with unimodular integral action".into(),
            ));
        }
        Ok(Self::with_matrix(integral_matrix(g).unwrap(), bound))
    }

    pub fn with_matrix(matrix: Vec<Vec<i64>>, bound: u64) -> Self {
        let m = matrix.len();
        let mut certificates: Vec<NormalSubgroupCertificate> = (1..=bound)
            .into_par_iter()
            .flat_map_iter(|d| {
                let matrix = &matrix;
                enumerate_hnf(m, d)
                    .into_iter()
                    .filter(|l| l.is_invariant(matrix))
                    .flat_map(move |l| Self::over_lattice(matrix, l, bound))
            })
            .collect();
        certificates.sort_by(|a, b| (a.index, a.ell, &a.lattice, &a.shift).cmp(&(b.index, b.ell, &b.lattice, &b.shift)));
        MetabelianOracle {
            m,
            matrix,
            bound,
            certificates,
        }
    }

    fn over_lattice(matrix: &[Vec<i64>], l: Hnf, bound: u64) -> Vec<NormalSubgroupCertificate> {
        let m = matrix.len();
        let d = l.index();
        let modulus = d as i64;
        let minus_id = |a: &[Vec<i64>]| -> Vec<Vec<i64>> {
            (0..m)
                .map(|i| (0..m).map(|j| a[i][j] - (i == j) as i64).collect())
                .collect()
        };
        // columns of a matrix lie in Λ
        let columns_in = |a: &[Vec<i64>]| (0..m).all(|j| l.contains(&(0..m).map(|i| a[i][j]).collect::<Vec<_>>()));
        let shifts: Vec<Vec<i64>> = {
            let mi = minus_id(matrix);
            l.representatives()
                .into_iter()
                .filter(|v| {
                    let w: Vec<i64> = mi.iter().map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum()).collect();
                    l.contains(&w)
                })
                .collect()
        };
        let reduced: Vec<Vec<i64>> = matrix
            .iter()
            .map(|r| r.iter().map(|x| x.rem_euclid(modulus)).collect())
            .collect();
        let mut power = reduced.clone();
        let mut out = Vec::new();
        let mut ell = 1;
        while d * ell <= bound {
            if columns_in(&minus_id(&power)) {
                for v in &shifts {
                    out.push(NormalSubgroupCertificate {
                        lattice: l.clone(),
                        ell,
                        shift: v.clone(),
                        index: d * ell,
                    });
                }
            }
            power = mat_mul_mod(&power, &reduced, modulus);
            ell += 1;
        }
        out
    }

    fn coords(x: &GroupElement) -> Result<Vec<i64>> {
        x.k.iter()
            .map(|c| {
                c.is_integer()
                    .then(|| c.to_integer().to_i64())
                    .flatten()
                    .ok_or_else(|| Error::Precondition("K-coordinate is not a machine integer".into()))
            })
            .collect()
    }

    pub fn divisibility(&self, x: &GroupElement) -> Result<Option<&NormalSubgroupCertificate>> {
        if x.is_identity() {
            return Err(Error::Identity);
        }
        let a = Self::coords(x)?;
        Ok(self.certificates.iter().find(|c| !c.contains(&a, x.h[0])))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int;

    fn fib(bound: u64) -> MetabelianOracle {
        MetabelianOracle::with_matrix(vec![vec![2, 1], vec![1, 1]], bound)
    }

    #[test]
    fn certificate_shapes() {
        let o = fib(10);
        // A - I is unimodular, so ℓ = 1 forces Λ = Z^2
        assert!(o.certificates.iter().filter(|c| c.ell == 1).all(|c| c.lattice.index() == 1));
        let a2_minus_i = crate::oracle::lattice::hnf_of(&[vec![4, 3], vec![3, 1]], 2).unwrap();
        assert!(o
            .certificates
            .iter()
            .any(|c| c.lattice == a2_minus_i && c.ell == 2 && c.index == 10));
    }

    #[test]
    fn fibonacci_e1() {
        let o = fib(40);
        let e1 = GroupElement {
            k: vec![int(1), int(0)],
            h: vec![0],
            f: 0,
        };
        let c = o.divisibility(&e1).unwrap().unwrap();
        assert_eq!((c.index, c.ell), (10, 2));
        let h = GroupElement {
            k: vec![int(0), int(0)],
            h: vec![1],
            f: 0,
        };
        assert_eq!(o.divisibility(&h).unwrap().unwrap().index, 2);
    }

    #[test]
    fn determinant_of_a_power_minus_identity() {
        // |det(A^ℓ - I)| = L_{2ℓ} - 2 with Lucas numbers L; the index of (A^ℓ - I)Z^2
        let lucas = |n: usize| {
            let (mut a, mut b) = (2i64, 1i64);
            for _ in 0..n {
                (a, b) = (b, a + b);
            }
            a
        };
        let mut p = vec![vec![2i64, 1], vec![1, 1]];
        for ell in 1..=6 {
            let d = (p[0][0] - 1) * (p[1][1] - 1) - p[0][1] * p[1][0];
            assert_eq!(d, 2 - lucas(2 * ell));
            p = vec![
                vec![2 * p[0][0] + p[1][0], 2 * p[0][1] + p[1][1]],
                vec![p[0][0] + p[1][0], p[0][1] + p[1][1]],
            ];
        }
    }

    #[test]
    fn identity_rejected() {
        let o = fib(5);
        let e = GroupElement {
            k: vec![int(0), int(0)],
            h: vec![0],
            f: 0,
        };
        assert_eq!(o.divisibility(&e), Err(Error::Identity));
    }
}
