//! Split M-groups G = K ⋊ (Z^n × F) in normal-form coordinates.
//!
//! An element is (λ, a, s) = exp(λ) h^a f_s with λ in Lie coordinates. The
//! product is (λ, a, s)(μ, b, t) = (λ * Ξ(a)η_s(μ), a + b, st).

mod ball;

pub use ball::{ball, coefficient_stats, BallReport, CoeffStatsRow, DEFAULT_BALL_BUDGET};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{format_rational, Rational, Q};
use crate::lie_ring::{bch_with, localize, LieRingDescription, LocalizedScalar};
use crate::linalg::{self, Matrix};
use crate::ntheory::lcm_upto_big;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub k: Vec<Rational>,
    pub h: Vec<i64>,
    /// Index into the finite part; 0 is its identity (always 0 without a finite part).
    pub f: usize,
}

impl GroupElement {
    pub fn in_k(&self) -> bool {
        self.h.iter().all(|&x| x == 0) && self.f == 0
    }

    pub fn is_identity(&self) -> bool {
        self.in_k() && self.k.iter().all(|x| x.is_zero())
    }

    /// "k_1 ... k_m|h_1 ... h_n" (plus "|f" with a finite part); no commas, so CSV-safe.
    pub fn coords(&self, with_f: bool) -> String {
        let k: Vec<String> = self.k.iter().map(format_rational).collect();
        let h: Vec<String> = self.h.iter().map(|x| x.to_string()).collect();
        let mut s = format!("{}|{}", k.join(" "), h.join(" "));
        if with_f {
            s.push_str(&format!("|{}", self.f));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinitePart {
    pub order: usize,
    /// table[s][t] = index of f_s f_t; index 0 must be the identity.
    pub table: Vec<Vec<usize>>,
    /// η_s for each element s.
    pub actions: Vec<Matrix<Rational>>,
}

impl FinitePart {
    pub fn inverse(&self, s: usize) -> usize {
        (0..self.order).find(|&t| self.table[s][t] == 0).unwrap_or(0)
    }
}

/// Growth model the group file declares for its RF curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeclaredBound {
    pub model: String,
    pub exponent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MGroupDescription {
    pub name: String,
    pub lie: LieRingDescription,
    pub actions: Vec<Matrix<Rational>>,
    action_inverses: Vec<Matrix<Rational>>,
    pub finite: Option<FinitePart>,
    pub generators: Vec<GroupElement>,
    pub generator_names: Vec<String>,
    pub declared_bound: Option<DeclaredBound>,
    /// Defining relators as words of (generator index, exponent).
    pub relators: Vec<Vec<(usize, i64)>>,
}

impl MGroupDescription {
    /// `generators = None` selects the standard set {k_i, h_j, f_s}.
    pub fn new(
        name: impl Into<String>,
        lie: LieRingDescription,
        actions: Vec<Matrix<Rational>>,
        finite: Option<FinitePart>,
        generators: Option<Vec<GroupElement>>,
    ) -> Result<Self> {
        let m = lie.dim();
        let mut action_inverses = Vec::new();
        for (j, a) in actions.iter().enumerate() {
            if a.n != m {
                return Err(Error::DimensionMismatch { expected: m, got: a.n });
            }
            action_inverses
                .push(linalg::inverse(&Q, a).ok_or_else(|| Error::Invalid(format!("action {} is singular", j + 1)))?);
        }
        if let Some(fp) = &finite {
            if fp.order == 0 || fp.table.len() != fp.order || fp.table.iter().any(|r| r.len() != fp.order) {
                return Err(Error::Invalid("finite part table must be order x order".into()));
            }
            if fp.actions.len() != fp.order || fp.actions.iter().any(|a| a.n != m) {
                return Err(Error::Invalid("finite part needs one m x m action per element".into()));
            }
            if fp.table.iter().flatten().any(|&x| x >= fp.order) {
                return Err(Error::Invalid("finite part table entry out of range".into()));
            }
        }
        let n = actions.len();
        let (generators, generator_names) = match generators {
            Some(g) => {
                let names = (1..=g.len()).map(|i| format!("g{i}")).collect();
                (g, names)
            }
            None => {
                let mut gens = Vec::new();
                let mut names = Vec::new();
                for i in 0..m {
                    gens.push(GroupElement {
                        k: lie.basis_vector(i),
                        h: vec![0; n],
                        f: 0,
                    });
                    names.push(format!("k{}", i + 1));
                }
                for j in 0..n {
                    let mut h = vec![0; n];
                    h[j] = 1;
                    gens.push(GroupElement { k: lie.zero(), h, f: 0 });
                    names.push(format!("h{}", j + 1));
                }
                if let Some(fp) = &finite {
                    for s in 1..fp.order {
                        gens.push(GroupElement {
                            k: lie.zero(),
                            h: vec![0; n],
                            f: s,
                        });
                        names.push(format!("f{s}"));
                    }
                }
                (gens, names)
            }
        };
        for g in &generators {
            if g.k.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: g.k.len() });
            }
            if g.h.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: g.h.len() });
            }
            if g.f >= finite.as_ref().map_or(1, |fp| fp.order) {
                return Err(Error::Invalid("generator finite index out of range".into()));
            }
        }
        Ok(MGroupDescription {
            name: name.into(),
            lie,
            actions,
            action_inverses,
            finite,
            generators,
            generator_names,
            declared_bound: None,
            relators: Vec::new(),
        })
    }

    pub fn dim_k(&self) -> usize {
        self.lie.dim()
    }
    pub fn rank_h(&self) -> usize {
        self.actions.len()
    }
    pub fn finite_order(&self) -> usize {
        self.finite.as_ref().map_or(1, |f| f.order)
    }
    pub fn ambient_delta(&self) -> u64 {
        self.lie.ambient_delta()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            k: self.lie.zero(),
            h: vec![0; self.rank_h()],
            f: 0,
        }
    }

    pub fn k_element(&self, k: Vec<Rational>) -> GroupElement {
        GroupElement {
            k,
            h: vec![0; self.rank_h()],
            f: 0,
        }
    }

    fn conforms(&self, g: &GroupElement) -> Result<()> {
        if g.k.len() != self.dim_k() {
            return Err(Error::DimensionMismatch {
                expected: self.dim_k(),
                got: g.k.len(),
            });
        }
        if g.h.len() != self.rank_h() {
            return Err(Error::DimensionMismatch {
                expected: self.rank_h(),
                got: g.h.len(),
            });
        }
        if g.f >= self.finite_order() {
            return Err(Error::Precondition("finite index out of range".into()));
        }
        Ok(())
    }

    /// Ξ(a) η_s (v).
    pub fn act(&self, a: &[i64], s: usize, v: &[Rational]) -> Vec<Rational> {
        let mut out = v.to_vec();
        if s != 0 {
            out = linalg::mul_vec(&Q, &self.finite.as_ref().unwrap().actions[s], &out);
        }
        for (j, &e) in a.iter().enumerate() {
            let m = if e >= 0 { &self.actions[j] } else { &self.action_inverses[j] };
            for _ in 0..e.unsigned_abs() {
                out = linalg::mul_vec(&Q, m, &out);
            }
        }
        out
    }

    pub(crate) fn mul(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        let moved = if g.h.iter().all(|&x| x == 0) && g.f == 0 {
            h.k.clone()
        } else {
            self.act(&g.h, g.f, &h.k)
        };
        let k = bch_with(&Q, self.lie.structure(), self.lie.class(), &g.k, &moved);
        let f = match &self.finite {
            Some(fp) => fp.table[g.f][h.f],
            None => 0,
        };
        GroupElement {
            k,
            h: g.h.iter().zip(&h.h).map(|(x, y)| x + y).collect(),
            f,
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.conforms(g)?;
        self.conforms(h)?;
        if self.lie.class() > crate::lie_ring::MAX_CLASS {
            return Err(Error::UnsupportedClass(self.lie.class()));
        }
        Ok(self.mul(g, h))
    }

    pub(crate) fn inv(&self, g: &GroupElement) -> GroupElement {
        let s_inv = self.finite.as_ref().map_or(0, |fp| fp.inverse(g.f));
        let neg: Vec<Rational> = g.k.iter().map(|x| -x).collect();
        let minus_a: Vec<i64> = g.h.iter().map(|x| -x).collect();
        GroupElement {
            k: self.act(&minus_a, s_inv, &neg),
            h: minus_a,
            f: s_inv,
        }
    }

    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement> {
        self.conforms(g)?;
        Ok(self.inv(g))
    }

    pub fn power(&self, g: &GroupElement, t: i64) -> Result<GroupElement> {
        self.conforms(g)?;
        let mut base = if t < 0 { self.inv(g) } else { g.clone() };
        let mut e = t.unsigned_abs();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        Ok(acc)
    }

    /// Product of a word given as (generator index, exponent) pairs.
    pub fn word(&self, letters: &[(usize, i64)]) -> Result<GroupElement> {
        let mut acc = self.identity();
        for &(i, e) in letters {
            let g = self
                .generators
                .get(i)
                .ok_or_else(|| Error::Precondition(format!("no generator {i}")))?;
            acc = self.mul(&acc, &self.power(g, e)?);
        }
        Ok(acc)
    }

    /// g^{lcm(1..r)} for g in K.
    pub fn lcm_witness(&self, g: &GroupElement, r: u64) -> Result<GroupElement> {
        self.conforms(g)?;
        if !g.in_k() {
            return Err(Error::NotInK);
        }
        if g.is_identity() {
            return Err(Error::Identity);
        }
        let l = Rational::from_integer(lcm_upto_big(r));
        Ok(self.k_element(self.lie.bch_power(&g.k, &l)?))
    }

    /// Checks every invariant of the description; the first entry is the first violation.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        if let Some(e) = self.lie.violation() {
            v.push(e);
        }
        let m = self.dim_k();
        let delta = self.lie.delta();
        let in_ring = |x: &Rational| LocalizedScalar::from_rational(x, delta).is_some();
        for (j, (a, ai)) in self.actions.iter().zip(&self.action_inverses).enumerate() {
            if !a.data.iter().all(in_ring) || !ai.data.iter().all(in_ring) {
                v.push(format!("action xi_{} is not invertible over Z[1/{}]", j + 1, delta));
            }
            if let Some(e) = self.automorphism_violation(a) {
                v.push(format!("action xi_{}: {}", j + 1, e));
            }
        }
        for a in 0..self.actions.len() {
            for b in a + 1..self.actions.len() {
                let ab = linalg::mul(&Q, &self.actions[a], &self.actions[b]);
                let ba = linalg::mul(&Q, &self.actions[b], &self.actions[a]);
                if ab != ba {
                    let (i, jj) = first_difference(&ab, &ba);
                    v.push(format!(
                        "actions xi_{} and xi_{} do not commute: entry ({},{}) is {} one way and {} the other",
                        a + 1,
                        b + 1,
                        i + 1,
                        jj + 1,
                        format_rational(ab.get(i, jj)),
                        format_rational(ba.get(i, jj))
                    ));
                }
            }
        }
        if let Some(fp) = &self.finite {
            v.extend(self.finite_part_violations(fp));
        }
        let ad = self.ambient_delta();
        for (g, name) in self.generators.iter().zip(&self.generator_names) {
            if localize(&g.k, ad).is_none() {
                v.push(format!("generator {name} has K-coordinates outside Z[1/{ad}]"));
            }
            if g.is_identity() {
                v.push(format!("generator {name} is the identity"));
            }
        }
        if m == 0 {
            v.push("K must have positive dimension".into());
        }
        ValidationReport { violations: v }
    }

    fn automorphism_violation(&self, a: &Matrix<Rational>) -> Option<String> {
        let m = self.dim_k();
        for i in 0..m {
            for j in i + 1..m {
                let ei = self.lie.basis_vector(i);
                let ej = self.lie.basis_vector(j);
                let lhs = linalg::mul_vec(&Q, a, &self.lie.bracket(&ei, &ej).ok()?);
                let rhs = self
                    .lie
                    .bracket(&linalg::mul_vec(&Q, a, &ei), &linalg::mul_vec(&Q, a, &ej))
                    .ok()?;
                if lhs != rhs {
                    return Some(format!(
                        "not a Lie automorphism on (v{}, v{}): image of bracket {:?} but bracket of images {:?}",
                        i + 1,
                        j + 1,
                        lhs.iter().map(format_rational).collect::<Vec<_>>(),
                        rhs.iter().map(format_rational).collect::<Vec<_>>()
                    ));
                }
            }
        }
        None
    }

    fn finite_part_violations(&self, fp: &FinitePart) -> Vec<String> {
        let mut v = Vec::new();
        let n = fp.order;
        if (0..n).any(|s| fp.table[0][s] != s || fp.table[s][0] != s) {
            v.push("finite part: index 0 is not the identity".into());
        }
        'assoc: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if fp.table[fp.table[a][b]][c] != fp.table[a][fp.table[b][c]] {
                        v.push(format!("finite part: table not associative at ({a},{b},{c})"));
                        break 'assoc;
                    }
                }
            }
        }
        for s in 0..n {
            if !(0..n).any(|t| fp.table[s][t] == 0) {
                v.push(format!("finite part: element {s} has no inverse"));
            }
        }
        if !linalg::is_identity(&Q, &fp.actions[0]) {
            v.push("finite part: eta of the identity is not the identity".into());
        }
        for s in 0..n {
            if let Some(e) = self.automorphism_violation(&fp.actions[s]) {
                v.push(format!("eta_{s}: {e}"));
            }
            for t in 0..n {
                let lhs = linalg::mul(&Q, &fp.actions[s], &fp.actions[t]);
                if lhs != fp.actions[fp.table[s][t]] {
                    v.push(format!("eta does not respect the table at ({s},{t})"));
                }
            }
            for (j, a) in self.actions.iter().enumerate() {
                if linalg::mul(&Q, a, &fp.actions[s]) != linalg::mul(&Q, &fp.actions[s], a) {
                    v.push(format!("eta_{s} does not commute with xi_{}", j + 1));
                }
            }
        }
        v
    }

    /// Inverse of xi_j.
    pub fn action_inverse(&self, j: usize) -> &Matrix<Rational> {
        &self.action_inverses[j]
    }

    /// Whether the word norm uses at least the unit h-vectors, i.e. the standard set is a subset.
    pub fn unit_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim_k()];
        v[i] = Rational::one();
        v
    }
}

fn first_difference(a: &Matrix<Rational>, b: &Matrix<Rational>) -> (usize, usize) {
    let idx = a.data.iter().zip(&b.data).position(|(x, y)| x != y).unwrap();
    (idx / a.n, idx % a.n)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
    pub fn first(&self) -> Option<&str> {
        self.violations.first().map(|s| s.as_str())
    }
}
