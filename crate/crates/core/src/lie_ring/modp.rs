use super::submodules;
use super::{bch_with, bracket_with, LieRingDescription, StructureTable};
use crate::error::{Error, Result};
use crate::field::{Field, Fp, Rational};
use crate::linalg::{self, Matrix};
use crate::ntheory::is_prime;

#[derive(Clone, Debug)]
pub struct ModPLieRing {
    pub prime: u64,
    pub dim: usize,
    pub class: usize,
    pub structure: StructureTable<u64>,
    /// Reduced actions: the xi_j first, then the eta_s.
    pub actions: Vec<Matrix<u64>>,
}

impl ModPLieRing {
    pub fn reduce(l: &LieRingDescription, actions: &[Matrix<Rational>], p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Precondition(format!("{p} is not prime")));
        }
        if p <= l.delta() || p as usize <= l.dim() || p as usize <= l.class() || l.delta() % p == 0 {
            return Err(Error::Precondition(format!(
                "prime {p} must exceed delta={}, m={}, c={}",
                l.delta(),
                l.dim(),
                l.class()
            )));
        }
        let f = Fp::new(p);
        let structure = l
            .table_in(&f, |c| f.reduce(c))
            .ok_or_else(|| Error::Precondition(format!("structure constant not defined mod {p}")))?;
        let mut reduced = Vec::with_capacity(actions.len());
        for (index, a) in actions.iter().enumerate() {
            let data: Option<Vec<u64>> = a.data.iter().map(|x| f.reduce(x)).collect();
            let m = Matrix {
                n: a.n,
                data: data.ok_or(Error::DenominatorDivisibleByP(p))?,
            };
            if f.is_zero(&linalg::det(&f, &m)) {
                return Err(Error::NonInvertibleAction { prime: p, index });
            }
            reduced.push(m);
        }
        Ok(ModPLieRing {
            prime: p,
            dim: l.dim(),
            class: l.class(),
            structure,
            actions: reduced,
        })
    }

    pub fn field(&self) -> Fp {
        Fp::new(self.prime)
    }

    pub fn bracket(&self, v: &[u64], w: &[u64]) -> Vec<u64> {
        bracket_with(&self.field(), &self.structure, v, w)
    }

    pub fn bch_multiply(&self, v: &[u64], w: &[u64]) -> Vec<u64> {
        bch_with(&self.field(), &self.structure, self.class, v, w)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }

    fn ad_matrix(&self, i: usize) -> Matrix<u64> {
        let e = self.basis_vector(i);
        let cols: Vec<Vec<u64>> = (0..self.dim).map(|j| self.bracket(&e, &self.basis_vector(j))).collect();
        Matrix::from_rows((0..self.dim).map(|r| cols.iter().map(|c| c[r]).collect()).collect())
    }

    /// Operators whose common invariant subspaces are the invariant ideals.
    fn operators(&self) -> Vec<Matrix<u64>> {
        let mut ops: Vec<Matrix<u64>> = (0..self.dim)
            .map(|i| self.ad_matrix(i))
            .filter(|m| m.data.iter().any(|&x| x != 0))
            .collect();
        ops.extend(self.actions.iter().cloned());
        ops
    }

    /// Every subspace W with [L, W] in W and stable under all actions, in canonical
    /// RREF and sorted lexicographically on the flattened basis.
    pub fn invariant_ideals(&self, budget: u64) -> Result<Vec<IdealModP>> {
        let bases = submodules::invariant_subspaces(&self.field(), self.dim, &self.operators(), budget)?;
        Ok(self.to_ideals(bases))
    }

    /// Same lattice by scanning every projective point; slow, kept as a cross-check.
    pub fn invariant_ideals_by_scan(&self, budget: u64) -> Result<Vec<IdealModP>> {
        let bases = submodules::invariant_subspaces_by_scan(&self.field(), self.dim, &self.operators(), budget)?;
        Ok(self.to_ideals(bases))
    }

    fn to_ideals(&self, bases: Vec<Vec<Vec<u64>>>) -> Vec<IdealModP> {
        let mut ideals: Vec<IdealModP> = bases
            .into_iter()
            .map(|basis| IdealModP {
                codim: self.dim - basis.len(),
                basis,
            })
            .collect();
        ideals.sort_by(|a, b| a.flattened().cmp(&b.flattened()));
        ideals
    }

    /// Dimension of the intersection of all invariant ideals of codim <= d, for d = 0..=m.
    pub fn intersection_dims(&self, ideals: &[IdealModP]) -> Vec<usize> {
        let f = self.field();
        (0..=self.dim)
            .map(|d| {
                let fam: Vec<&[Vec<u64>]> = ideals.iter().filter(|i| i.codim <= d).map(|i| i.basis.as_slice()).collect();
                linalg::intersection(&f, &fam, self.dim).len()
            })
            .collect()
    }

    pub fn delta(&self, budget: u64) -> Result<DeltaReport> {
        let ideals = self.invariant_ideals(budget)?;
        Ok(self.delta_from(&ideals))
    }

    pub fn delta_from(&self, ideals: &[IdealModP]) -> DeltaReport {
        let dims = self.intersection_dims(ideals);
        let delta_p = dims.iter().position(|&d| d == 0).expect("the zero ideal has codim m");
        DeltaReport {
            prime: self.prime,
            delta_p,
            witness_family: ideals.iter().filter(|i| i.codim <= delta_p).cloned().collect(),
            stable_min: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdealModP {
    pub basis: Vec<Vec<u64>>,
    pub codim: usize,
}

impl IdealModP {
    pub fn flattened(&self) -> Vec<u64> {
        self.basis.iter().flatten().copied().collect()
    }

    pub fn contains(&self, f: &Fp, v: &[u64]) -> bool {
        linalg::in_span(f, &self.basis, v)
    }

    /// Canonical representative of v + W (pivot coordinates cleared).
    pub fn reduce(&self, f: &Fp, v: &[u64]) -> Vec<u64> {
        linalg::reduce_mod_span(f, &self.basis, v)
    }

    pub fn is_bracket_closed(&self, l: &ModPLieRing) -> bool {
        let f = l.field();
        self.basis
            .iter()
            .all(|w| (0..l.dim).all(|i| self.contains(&f, &l.bracket(&l.basis_vector(i), w))))
    }

    pub fn is_invariant(&self, l: &ModPLieRing) -> bool {
        let f = l.field();
        l.actions
            .iter()
            .all(|a| self.basis.iter().all(|w| self.contains(&f, &linalg::mul_vec(&f, a, w))))
    }

    /// Sort key (codim, flattened basis) used when choosing among ideals.
    pub fn separator_key(&self) -> (usize, Vec<u64>) {
        (self.codim, self.flattened())
    }
}

#[derive(Clone, Debug)]
pub struct DeltaReport {
    pub prime: u64,
    pub delta_p: usize,
    pub witness_family: Vec<IdealModP>,
    /// Minimum of delta_p over a sample of primes, filled in by [`DeltaReport::stabilize`].
    pub stable_min: Option<usize>,
}

impl DeltaReport {
    /// Record the sample minimum on every report; returns true when the sample disagrees.
    pub fn stabilize(reports: &mut [DeltaReport]) -> bool {
        let Some(min) = reports.iter().map(|r| r.delta_p).min() else {
            return false;
        };
        let unstable = reports.iter().any(|r| r.delta_p != min);
        for r in reports.iter_mut() {
            r.stable_min = Some(min);
        }
        unstable
    }
}

/// Least e >= 1 with M^e = I over F_p.
pub fn matrix_order_mod_p(m: &Matrix<u64>, p: u64, budget: u64) -> Result<u64> {
    let f = Fp::new(p);
    if f.is_zero(&linalg::det(&f, m)) {
        return Err(Error::Precondition("matrix is not invertible".into()));
    }
    let id = linalg::identity(&f, m.n);
    let mut acc = m.clone();
    let mut e = 1u64;
    while acc != id {
        if e >= budget {
            return Err(Error::BudgetExceeded {
                what: "matrix order",
                budget,
            });
        }
        acc = linalg::mul(&f, &acc, m);
        e += 1;
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderAnalysis {
    pub prime: u64,
    pub order: u64,
    pub splits: bool,
    pub diagonalizable: bool,
}

impl OrderAnalysis {
    /// e | (p-1)p when the characteristic polynomial splits, e | p-1 when diagonalizable.
    pub fn lemma_holds(&self) -> bool {
        let p = self.prime;
        (!self.splits || ((p - 1) * p) % self.order == 0) && (!self.diagonalizable || (p - 1) % self.order == 0)
    }

    pub fn describe(&self) -> String {
        let tag = if !self.splits {
            "nosplit"
        } else if !self.lemma_holds() {
            "fail"
        } else if self.diagonalizable {
            "diag"
        } else {
            "ok"
        };
        format!("{}:{}", self.order, tag)
    }
}

pub fn order_analysis(m: &Matrix<u64>, p: u64, budget: u64) -> Result<OrderAnalysis> {
    let f = Fp::new(p);
    let order = matrix_order_mod_p(m, p, budget)?;
    if m.n == 0 {
        return Ok(OrderAnalysis {
            prime: p,
            order,
            splits: true,
            diagonalizable: true,
        });
    }
    let cp = linalg::charpoly(&f, m);
    let roots = linalg::roots_with_multiplicity(&f, &cp);
    let splits = roots.len() == m.n;
    let diagonalizable = splits && {
        let mut distinct = roots.clone();
        distinct.dedup();
        let prod = distinct
            .iter()
            .fold(linalg::identity(&f, m.n), |acc, r| linalg::mul(&f, &acc, &linalg::shift(&f, m, r)));
        prod.data.iter().all(|&x| x == 0)
    };
    Ok(OrderAnalysis {
        prime: p,
        order,
        splits,
        diagonalizable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int;

    fn heis() -> LieRingDescription {
        LieRingDescription::new(3, vec![(0, 1, 2, int(1))], 2, 1).unwrap()
    }

    fn fib() -> Matrix<Rational> {
        Matrix::from_rows(vec![vec![int(2), int(1)], vec![int(1), int(1)]])
    }

    #[test]
    fn reduction_preconditions() {
        let bs = LieRingDescription::new(1, vec![], 1, 2).unwrap();
        let act = Matrix::from_rows(vec![vec![int(2)]]);
        let r = ModPLieRing::reduce(&bs, &[act.clone()], 3).unwrap();
        assert_eq!(r.actions[0].data, vec![2]);
        assert!(matches!(ModPLieRing::reduce(&bs, &[act], 2), Err(Error::Precondition(_))));
        let h = ModPLieRing::reduce(&heis(), &[], 5).unwrap();
        assert_eq!(h.structure, vec![(0, 1, 2, 1)]);
        assert!(ModPLieRing::reduce(&heis(), &[], 3).is_err());
        let a = ModPLieRing::reduce(&LieRingDescription::abelian(2), &[fib()], 11).unwrap();
        assert_eq!(a.actions[0].data, vec![2, 1, 1, 1]);
        let sing = Matrix::from_rows(vec![vec![int(5), int(0)], vec![int(0), int(1)]]);
        assert_eq!(
            ModPLieRing::reduce(&LieRingDescription::abelian(2), &[sing], 5).unwrap_err(),
            Error::NonInvertibleAction { prime: 5, index: 0 }
        );
    }

    #[test]
    fn ideal_lattice_matches_scan() {
        let h = ModPLieRing::reduce(&heis(), &[], 7).unwrap();
        assert_eq!(h.invariant_ideals(10_000).unwrap(), h.invariant_ideals_by_scan(10_000).unwrap());
        let a = ModPLieRing::reduce(&LieRingDescription::abelian(2), &[fib()], 19).unwrap();
        assert_eq!(a.invariant_ideals(10_000).unwrap(), a.invariant_ideals_by_scan(10_000).unwrap());
    }

    #[test]
    fn projective_points_are_distinct() {
        use super::submodules::projective_point;
        use std::collections::BTreeSet;
        let pts: BTreeSet<Vec<u64>> = (0..13).map(|i| projective_point(3, 3, i)).collect();
        assert_eq!(pts.len(), 13);
        assert!(pts.iter().all(|v| v[v.iter().position(|&x| x != 0).unwrap()] == 1));
    }

    #[test]
    fn abelian_plane_ideals() {
        let a = ModPLieRing::reduce(&LieRingDescription::abelian(2), &[], 3).unwrap();
        let ideals = a.invariant_ideals(1000).unwrap();
        assert_eq!(ideals.len(), 6);
        assert_eq!(a.delta(1000).unwrap().delta_p, 1);
    }

    #[test]
    fn heisenberg_ideals_contain_center() {
        let h = ModPLieRing::reduce(&heis(), &[], 5).unwrap();
        let ideals = h.invariant_ideals(10_000).unwrap();
        // 0, span(v3), the 6 planes through v3, full space
        assert_eq!(ideals.len(), 9);
        let f = h.field();
        for i in &ideals {
            assert!(i.is_bracket_closed(&h));
            if !i.basis.is_empty() {
                assert!(i.contains(&f, &[0, 0, 1]));
            }
        }
        let d = h.delta(10_000).unwrap();
        assert_eq!(d.delta_p, 3);
        assert_eq!(h.intersection_dims(&ideals), vec![3, 1, 1, 0]);
    }

    #[test]
    fn fibonacci_ideals() {
        let l = LieRingDescription::abelian(2);
        let a3 = ModPLieRing::reduce(&l, &[fib()], 3).unwrap();
        assert_eq!(a3.invariant_ideals(100).unwrap().len(), 2);
        assert_eq!(a3.delta(100).unwrap().delta_p, 2);
        let a11 = ModPLieRing::reduce(&l, &[fib()], 11).unwrap();
        let ideals = a11.invariant_ideals(1000).unwrap();
        let lines: Vec<&IdealModP> = ideals.iter().filter(|i| i.codim == 1).collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].basis, vec![vec![1, 3]]);
        assert_eq!(lines[1].basis, vec![vec![1, 7]]);
        assert_eq!(a11.delta(1000).unwrap().delta_p, 1);
    }

    #[test]
    fn orders() {
        let seven = Matrix::from_rows(vec![vec![2u64]]);
        assert_eq!(matrix_order_mod_p(&seven, 7, 100).unwrap(), 3);
        let id = linalg::identity(&Fp::new(5), 3);
        assert_eq!(matrix_order_mod_p(&id, 5, 100).unwrap(), 1);
        let a = Matrix::from_rows(vec![vec![2u64, 1], vec![1, 1]]);
        let an = order_analysis(&a, 11, 1000).unwrap();
        assert_eq!(an.order, 5);
        assert!(an.splits && an.diagonalizable && an.lemma_holds());
        let j = Matrix::from_rows(vec![vec![1u64, 1], vec![0, 1]]);
        let an = order_analysis(&j, 5, 1000).unwrap();
        assert_eq!(an.order, 5);
        assert!(an.splits && !an.diagonalizable && an.lemma_holds());
        let a3 = order_analysis(&a, 3, 1000).unwrap();
        assert!(!a3.splits);
        assert_eq!(a3.order, 4);
        assert!(matches!(matrix_order_mod_p(&a, 3, 3), Err(Error::BudgetExceeded { .. })));
    }
}
