//! Explicit finite quotients separating a nontrivial element.
//!
//! For g in K we reduce L mod a prime p, pick an invariant ideal J of the
//! witness family that misses ḡ, and map G onto (L_p/J, *) ⋊ (Z_e)^n (⋊ F),
//! where e is the order of the induced action on L_p/J. Elements outside K are
//! separated in a quotient of the top group Z^n × F.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Fp, Rational, Q};
use crate::lie_ring::{bch_with, localize, order_analysis, IdealModP, ModPLieRing, OrderAnalysis};
use crate::linalg::{self, Matrix};
use crate::mgroup::{ball, BallReport, GroupElement, MGroupDescription, DEFAULT_BALL_BUDGET};
use crate::ntheory::is_prime;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeMode {
    /// Every ξ_j must split mod p with the same squarefree degree as over Q.
    Paper,
    /// Any prime where the reduction is defined; soundness rests on verification.
    BestEffort,
}

impl std::str::FromStr for PrimeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(PrimeMode::Paper),
            "best_effort" | "best-effort" => Ok(PrimeMode::BestEffort),
            _ => Err(Error::Precondition(format!("unknown prime mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for PrimeMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PrimeMode::Paper => "paper",
            PrimeMode::BestEffort => "best_effort",
        })
    }
}

/// K-part as Σ (μ_i / Δ'^j) v_i with j minimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateForm {
    pub mu: Vec<BigInt>,
    pub j: u32,
    pub gcd: BigInt,
    pub delta: u64,
}

impl CoordinateForm {
    pub fn value(&self) -> Vec<Rational> {
        let den = BigInt::from(self.delta).pow(self.j);
        self.mu.iter().map(|x| Rational::new(x.clone(), den.clone())).collect()
    }

    pub fn max_abs(&self) -> BigInt {
        self.mu.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    fn reduce(&self, p: u64) -> Vec<u64> {
        let f = Fp::new(p);
        let den = f.pow(self.delta % p, self.j as u64);
        let den_inv = f.inv(&den).expect("p does not divide delta");
        self.mu
            .iter()
            .map(|x| f.mul(&bigint_mod(x, p), &den_inv))
            .collect()
    }
}

fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

pub fn coordinate_form(g: &MGroupDescription, x: &GroupElement) -> Result<CoordinateForm> {
    if x.k.len() != g.dim_k() {
        return Err(Error::DimensionMismatch {
            expected: g.dim_k(),
            got: x.k.len(),
        });
    }
    if !x.in_k() {
        return Err(Error::NotInK);
    }
    if x.is_identity() {
        return Err(Error::Identity);
    }
    let delta = g.ambient_delta();
    let (mu, j) = localize(&x.k, delta)
        .ok_or_else(|| Error::Precondition(format!("coordinates outside Z[1/{delta}]")))?;
    let gcd = mu.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
    Ok(CoordinateForm { mu, j, gcd, delta })
}

/// Primes must exceed this: max(Δ', m, c, 2·max|structure constant|).
pub fn prime_floor(g: &MGroupDescription) -> u64 {
    let sc = g.lie.max_abs_structure_constant().to_u64().unwrap_or(u64::MAX / 4);
    g.ambient_delta()
        .max(g.dim_k() as u64)
        .max(g.lie.class() as u64)
        .max(2 * sc)
}

fn finite_actions(g: &MGroupDescription) -> Vec<Matrix<Rational>> {
    let mut a = g.actions.clone();
    if let Some(fp) = &g.finite {
        a.extend(fp.actions.iter().cloned());
    }
    a
}

/// Reduction mod p of L with every ξ_j and η_s, if p is admissible for the group in `mode`.
pub fn reduce_group(g: &MGroupDescription, p: u64, mode: PrimeMode) -> Option<ModPLieRing> {
    if !is_prime(p) || p <= prime_floor(g) {
        return None;
    }
    let ring = ModPLieRing::reduce(&g.lie, &finite_actions(g), p).ok()?;
    if mode == PrimeMode::Paper && !(0..g.rank_h()).all(|j| action_splits(g, &ring, j)) {
        return None;
    }
    Some(ring)
}

/// Char poly of ξ_j splits mod p, with the same squarefree degree as over Q.
pub fn action_splits(g: &MGroupDescription, ring: &ModPLieRing, j: usize) -> bool {
    let f = ring.field();
    let cp = linalg::charpoly(&f, &ring.actions[j]);
    let roots = linalg::roots_with_multiplicity(&f, &cp);
    let cq = linalg::charpoly(&Q, &g.actions[j]);
    roots.len() == g.dim_k() && linalg::squarefree_degree(&f, &cp) == linalg::squarefree_degree(&Q, &cq)
}

#[derive(Clone, Copy, Debug)]
pub struct SeparatorConfig {
    pub mode: PrimeMode,
    /// Number of candidate primes tried per element.
    pub count: usize,
    /// Largest prime considered.
    pub ceiling: u64,
    pub ideal_budget: u64,
    pub order_budget: u64,
}

impl Default for SeparatorConfig {
    fn default() -> Self {
        SeparatorConfig {
            mode: PrimeMode::Paper,
            count: 3,
            ceiling: 100_000,
            ideal_budget: 2_000_000,
            order_budget: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuotientElement {
    /// Canonical representative mod J (empty for top quotients).
    pub k: Vec<u64>,
    pub h: Vec<u64>,
    pub f: usize,
}

#[derive(Clone, Debug)]
pub struct SeparatingQuotient {
    /// None for a quotient of Z^n × F (element outside K).
    pub prime: Option<u64>,
    pub ideal: IdealModP,
    pub exponent: u64,
    pub finite_part_order: usize,
    pub order: u128,
    /// ξ̄_j on L_p/J in the coordinates not pivotal for J.
    pub induced_actions: Vec<Matrix<u64>>,
    pub order_checks: Vec<OrderAnalysis>,
    pub checks_passed: Vec<String>,
    ring: Option<Arc<ModPLieRing>>,
    finite_table: Option<Vec<Vec<usize>>>,
    n: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub prime: Option<u64>,
    pub ideal_basis: Vec<Vec<u64>>,
    pub exponent: u64,
    pub order: u128,
    pub checks_passed: Vec<String>,
}

impl SeparatingQuotient {
    pub fn codim(&self) -> usize {
        self.ideal.codim
    }

    pub fn identity(&self) -> QuotientElement {
        QuotientElement {
            k: self.ring.as_ref().map_or(Vec::new(), |r| vec![0; r.dim]),
            h: vec![0; self.n],
            f: 0,
        }
    }

    pub fn is_identity(&self, x: &QuotientElement) -> bool {
        x.k.iter().all(|&c| c == 0) && x.h.iter().all(|&c| c == 0) && x.f == 0
    }

    fn act(&self, ring: &ModPLieRing, h: &[u64], s: usize, v: &[u64]) -> Vec<u64> {
        let f = ring.field();
        let mut out = v.to_vec();
        if s != 0 {
            out = linalg::mul_vec(&f, &ring.actions[self.n + s], &out);
        }
        for (j, &e) in h.iter().enumerate() {
            for _ in 0..e {
                out = linalg::mul_vec(&f, &ring.actions[j], &out);
            }
        }
        out
    }

    pub fn multiply(&self, x: &QuotientElement, y: &QuotientElement) -> QuotientElement {
        let k = match &self.ring {
            Some(ring) => {
                let f = ring.field();
                let moved = self.act(ring, &x.h, x.f, &y.k);
                let prod = bch_with(&f, &ring.structure, ring.class, &x.k, &moved);
                self.ideal.reduce(&f, &prod)
            }
            None => Vec::new(),
        };
        QuotientElement {
            k,
            h: x.h.iter().zip(&y.h).map(|(a, b)| (a + b) % self.exponent).collect(),
            f: self.finite_table.as_ref().map_or(0, |t| t[x.f][y.f]),
        }
    }

    pub fn power(&self, x: &QuotientElement, mut t: u64) -> QuotientElement {
        let mut acc = self.identity();
        let mut base = x.clone();
        while t > 0 {
            if t & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            t >>= 1;
            if t > 0 {
                base = self.multiply(&base, &base);
            }
        }
        acc
    }

    /// φ(g).
    pub fn evaluate(&self, g: &GroupElement) -> Result<QuotientElement> {
        if g.h.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: g.h.len(),
            });
        }
        let k = match &self.ring {
            Some(ring) => {
                if g.k.len() != ring.dim {
                    return Err(Error::DimensionMismatch {
                        expected: ring.dim,
                        got: g.k.len(),
                    });
                }
                let f = ring.field();
                let v = g
                    .k
                    .iter()
                    .map(|x| f.reduce(x))
                    .collect::<Option<Vec<u64>>>()
                    .ok_or(Error::DenominatorDivisibleByP(ring.prime))?;
                self.ideal.reduce(&f, &v)
            }
            None => Vec::new(),
        };
        let e = self.exponent as i64;
        Ok(QuotientElement {
            k,
            h: g.h.iter().map(|&a| a.rem_euclid(e) as u64).collect(),
            f: if self.finite_table.is_some() { g.f } else { 0 },
        })
    }

    pub fn separates(&self, g: &GroupElement) -> Result<bool> {
        Ok(!self.is_identity(&self.evaluate(g)?))
    }

    pub fn certificate(&self) -> Certificate {
        Certificate {
            prime: self.prime,
            ideal_basis: self.ideal.basis.clone(),
            exponent: self.exponent,
            order: self.order,
            checks_passed: self.checks_passed.clone(),
        }
    }

    pub fn certificate_json(&self) -> serde_json::Value {
        serde_json::to_value(self.certificate()).expect("certificate serializes")
    }

    /// Runtime checks that φ is a well-defined homomorphism; returns the names of the passed checks.
    fn verify(&mut self, g: &MGroupDescription) -> Result<()> {
        let mut passed = Vec::new();
        if let Some(ring) = &self.ring {
            if !self.ideal.is_bracket_closed(ring) || !self.ideal.is_invariant(ring) {
                return Err(Error::VerificationFailed("J is not an invariant ideal".into()));
            }
            passed.push("ideal".to_string());
            let f = ring.field();
            for j in 0..self.n {
                let ok = (0..ring.dim).all(|i| {
                    let e = ring.basis_vector(i);
                    let mut v = e.clone();
                    for _ in 0..self.exponent {
                        v = linalg::mul_vec(&f, &ring.actions[j], &v);
                    }
                    self.ideal.reduce(&f, &linalg::sub_vec(&f, &v, &e)).iter().all(|&c| c == 0)
                });
                if !ok {
                    return Err(Error::VerificationFailed(format!(
                        "xi_{}^{} is not the identity on L/J",
                        j + 1,
                        self.exponent
                    )));
                }
            }
            passed.push("exponent".to_string());
        }
        let mut gens: Vec<GroupElement> = g.generators.clone();
        gens.extend(g.generators.iter().map(|s| g.invert(s).expect("generators conform")));
        let images: Vec<QuotientElement> = gens.iter().map(|s| self.evaluate(s)).collect::<Result<_>>()?;
        for (a, ia) in gens.iter().zip(&images) {
            for (b, ib) in gens.iter().zip(&images) {
                let lhs = self.evaluate(&g.multiply(a, b)?)?;
                if lhs != self.multiply(ia, ib) {
                    return Err(Error::VerificationFailed(format!(
                        "phi(st) != phi(s)phi(t) for s = {}, t = {}",
                        a.coords(g.finite.is_some()),
                        b.coords(g.finite.is_some())
                    )));
                }
            }
        }
        passed.push("hom_generators".to_string());
        for w in &g.relators {
            let mut acc = self.identity();
            for &(i, e) in w {
                let x = &images[if e >= 0 { i } else { i + g.generators.len() }];
                acc = self.multiply(&acc, &self.power(x, e.unsigned_abs()));
            }
            if !self.is_identity(&acc) {
                return Err(Error::VerificationFailed(format!("relator {w:?} does not vanish in Q")));
            }
        }
        if !g.relators.is_empty() {
            passed.push("relators".to_string());
        }
        // images of h_j^e are central
        for j in 0..self.n {
            let mut h = vec![0; self.n];
            h[j] = 1;
            let hj = self.evaluate(&GroupElement {
                k: g.lie.zero(),
                h,
                f: 0,
            })?;
            let z = self.power(&hj, self.exponent);
            if images.iter().any(|x| self.multiply(&z, x) != self.multiply(x, &z)) {
                return Err(Error::VerificationFailed(format!("h_{}^e is not central in Q", j + 1)));
            }
        }
        passed.push("centrality".to_string());
        let expected = self.order;
        let computed = (self.prime.unwrap_or(1) as u128)
            .checked_pow(self.ideal.codim as u32)
            .and_then(|x| x.checked_mul((self.exponent as u128).checked_pow(self.n as u32)?))
            .and_then(|x| x.checked_mul(self.finite_part_order as u128));
        if computed != Some(expected) {
            return Err(Error::VerificationFailed("order does not match p^codim e^n |F|".into()));
        }
        passed.push("order".to_string());
        self.checks_passed = passed;
        Ok(())
    }
}

struct PrimeData {
    ring: Arc<ModPLieRing>,
    delta_p: usize,
    /// Ideals of codim <= delta_p, sorted by (codim, basis).
    family: Vec<IdealModP>,
    cores: Vec<OnceLock<std::result::Result<SeparatingQuotient, Error>>>,
}

type Memo<K, V> = Mutex<HashMap<K, Arc<OnceLock<V>>>>;

fn memo_cell<K: std::hash::Hash + Eq + Clone, V>(m: &Memo<K, V>, k: &K) -> Arc<OnceLock<V>> {
    m.lock().unwrap().entry(k.clone()).or_default().clone()
}

/// Builds separating quotients for one group, caching per-prime ideal data and
/// per-(p, J) verified quotients.
pub struct Separator {
    pub group: MGroupDescription,
    pub config: SeparatorConfig,
    good_primes: Mutex<(Vec<u64>, u64)>,
    primes: Memo<u64, Result<Arc<PrimeData>>>,
    top: Memo<(u64, bool), Result<SeparatingQuotient>>,
}

impl Separator {
    pub fn new(group: &MGroupDescription, config: SeparatorConfig) -> Self {
        Separator {
            group: group.clone(),
            config,
            good_primes: Mutex::new((Vec::new(), prime_floor(group))),
            primes: Mutex::new(HashMap::new()),
            top: Mutex::new(HashMap::new()),
        }
    }

    /// i-th prime admissible for the group (independent of the element).
    fn good_prime(&self, i: usize) -> Option<u64> {
        let mut st = self.good_primes.lock().unwrap();
        while st.0.len() <= i {
            let mut p = st.1 + 1;
            loop {
                if p > self.config.ceiling {
                    st.1 = p;
                    return None;
                }
                if reduce_group(&self.group, p, self.config.mode).is_some() {
                    break;
                }
                p += 1;
            }
            st.0.push(p);
            st.1 = p;
        }
        Some(st.0[i])
    }

    /// The first `count` admissible primes not dividing gcd(μ).
    pub fn select_primes(&self, cf: &CoordinateForm, count: usize) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        let mut i = 0;
        while out.len() < count {
            match self.good_prime(i) {
                Some(p) => {
                    if !(&cf.gcd % BigInt::from(p)).is_zero() {
                        out.push(p);
                    }
                }
                None if out.is_empty() => return Err(Error::NoCandidatePrime(self.config.ceiling)),
                None => break,
            }
            i += 1;
        }
        Ok(out)
    }

    fn prime_data(&self, p: u64) -> Result<Arc<PrimeData>> {
        memo_cell(&self.primes, &p)
            .get_or_init(|| {
                let ring = ModPLieRing::reduce(&self.group.lie, &finite_actions(&self.group), p)?;
                let ideals = ring.invariant_ideals(self.config.ideal_budget)?;
                let report = ring.delta_from(&ideals);
                let mut family = report.witness_family;
                family.sort_by_key(|i| i.separator_key());
                let cores = (0..family.len()).map(|_| OnceLock::new()).collect();
                Ok(Arc::new(PrimeData {
                    ring: Arc::new(ring),
                    delta_p: report.delta_p,
                    family,
                    cores,
                }))
            })
            .clone()
    }

    pub fn delta_p(&self, p: u64) -> Result<usize> {
        Ok(self.prime_data(p)?.delta_p)
    }

    fn lie_quotient(&self, data: &PrimeData, idx: usize) -> Result<SeparatingQuotient> {
        data.cores[idx]
            .get_or_init(|| {
                let ring = &data.ring;
                let f = ring.field();
                let ideal = data.family[idx].clone();
                let n = self.group.rank_h();
                let induced: Vec<Matrix<u64>> = (0..n).map(|j| induced_matrix(&f, &ring.actions[j], &ideal)).collect();
                let mut exponent = 1u64;
                let mut checks = Vec::new();
                for m in &induced {
                    let a = order_analysis(m, ring.prime, self.config.order_budget)?;
                    exponent = exponent.lcm(&a.order);
                    checks.push(a);
                }
                let order = (ring.prime as u128)
                    .checked_pow(ideal.codim as u32)
                    .and_then(|x| x.checked_mul((exponent as u128).checked_pow(n as u32)?))
                    .and_then(|x| x.checked_mul(self.group.finite_order() as u128))
                    .ok_or_else(|| Error::Precondition("quotient order overflows u128".into()))?;
                let mut q = SeparatingQuotient {
                    prime: Some(ring.prime),
                    ideal,
                    exponent,
                    finite_part_order: self.group.finite_order(),
                    order,
                    induced_actions: induced,
                    order_checks: checks,
                    checks_passed: Vec::new(),
                    ring: Some(ring.clone()),
                    finite_table: self.group.finite.as_ref().map(|fp| fp.table.clone()),
                    n,
                };
                q.verify(&self.group)?;
                Ok(q)
            })
            .clone()
    }

    /// Quotient through p with the least witness-family ideal missing g.
    pub fn quotient_at(&self, cf: &CoordinateForm, p: u64) -> Result<SeparatingQuotient> {
        let data = self.prime_data(p)?;
        let gbar = cf.reduce(p);
        let f = data.ring.field();
        let idx = data
            .family
            .iter()
            .position(|j| !j.contains(&f, &gbar))
            .ok_or_else(|| Error::VerificationFailed(format!("witness family mod {p} does not separate")))?;
        self.lie_quotient(&data, idx)
    }

    fn top_quotient(&self, x: &GroupElement) -> Result<SeparatingQuotient> {
        let g = &self.group;
        let n = g.rank_h();
        let (q, with_f) = if x.h.iter().any(|&a| a != 0) {
            let d = x.h.iter().fold(0i64, |a, &b| a.gcd(&b)).unsigned_abs();
            ((2..).find(|q| d % q != 0).unwrap(), false)
        } else {
            (1, true)
        };
        memo_cell(&self.top, &(q, with_f))
            .get_or_init(|| {
                let fo = if with_f { g.finite_order() } else { 1 };
                let order = (q as u128)
                    .checked_pow(n as u32)
                    .and_then(|x| x.checked_mul(fo as u128))
                    .ok_or_else(|| Error::Precondition("quotient order overflows u128".into()))?;
                let mut quot = SeparatingQuotient {
                    prime: None,
                    ideal: IdealModP {
                        basis: Vec::new(),
                        codim: 0,
                    },
                    exponent: q,
                    finite_part_order: fo,
                    order,
                    induced_actions: Vec::new(),
                    order_checks: Vec::new(),
                    checks_passed: Vec::new(),
                    ring: None,
                    finite_table: if with_f { g.finite.as_ref().map(|fp| fp.table.clone()) } else { None },
                    n,
                };
                quot.verify(g)?;
                Ok(quot)
            })
            .clone()
    }

    /// Smallest verified quotient over the candidate primes (ties to the smaller prime).
    pub fn separate(&self, x: &GroupElement) -> Result<SeparatingQuotient> {
        if x.is_identity() {
            return Err(Error::Identity);
        }
        if !x.in_k() {
            let q = self.top_quotient(x)?;
            return self.check_separates(q, x);
        }
        let cf = coordinate_form(&self.group, x)?;
        let primes = self.select_primes(&cf, self.config.count)?;
        let mut best: Option<SeparatingQuotient> = None;
        for p in primes {
            let q = self.quotient_at(&cf, p)?;
            if best.as_ref().map_or(true, |b| q.order < b.order) {
                best = Some(q);
            }
        }
        self.check_separates(best.expect("at least one prime"), x)
    }

    fn check_separates(&self, mut q: SeparatingQuotient, x: &GroupElement) -> Result<SeparatingQuotient> {
        if !q.separates(x)? {
            return Err(Error::VerificationFailed(format!(
                "image of {} is trivial",
                x.coords(self.group.finite.is_some())
            )));
        }
        q.checks_passed.push("separates".to_string());
        Ok(q)
    }
}

/// Matrix of v ↦ A v on F_p^m / J, in the non-pivot coordinates of J.
pub fn induced_matrix(f: &Fp, a: &Matrix<u64>, ideal: &IdealModP) -> Matrix<u64> {
    let m = a.n;
    let pivots: Vec<usize> = ideal.basis.iter().filter_map(|r| linalg::pivot_of(f, r)).collect();
    let free: Vec<usize> = (0..m).filter(|i| !pivots.contains(i)).collect();
    let cols: Vec<Vec<u64>> = free
        .iter()
        .map(|&c| {
            let mut e = vec![0; m];
            e[c] = 1;
            let img = ideal.reduce(f, &linalg::mul_vec(f, a, &e));
            free.iter().map(|&r| img[r]).collect()
        })
        .collect();
    Matrix::from_rows((0..free.len()).map(|r| cols.iter().map(|c| c[r]).collect()).collect())
}

#[derive(Clone, Debug)]
pub struct UpperCurveRow {
    pub r: usize,
    pub rf_upper: u128,
    pub witness: GroupElement,
    pub witness_norm: usize,
    pub quotient: SeparatingQuotient,
}

/// r ↦ max over nontrivial g in B(r) of the constructed |Q|, each entry certified.
pub fn upper_bound_curve(sep: &Separator, r_max: usize, ball_budget: u64) -> Result<Vec<UpperCurveRow>> {
    upper_bound_curve_on(sep, &ball(&sep.group, r_max, ball_budget)?)
}

/// Same as [`upper_bound_curve`] on a ball that is already enumerated.
pub fn upper_bound_curve_on(sep: &Separator, b: &BallReport) -> Result<Vec<UpperCurveRow>> {
    let mut rows = Vec::new();
    let mut best: Option<(u128, GroupElement, usize, SeparatingQuotient)> = None;
    for (r, sphere) in b.spheres.iter().enumerate().skip(1) {
        let results: Vec<(u128, &GroupElement, SeparatingQuotient)> = sphere
            .par_iter()
            .map(|x| sep.separate(x).map(|q| (q.order, x, q)))
            .collect::<Result<_>>()?;
        // first maximal element in sorted sphere order, so the choice is deterministic
        if let Some((o, x, q)) = results
            .into_iter()
            .fold(None, |acc: Option<(u128, &GroupElement, SeparatingQuotient)>, c| match &acc {
                Some(a) if a.0 >= c.0 => acc,
                _ => Some(c),
            })
        {
            if best.as_ref().map_or(true, |b| o > b.0) {
                best = Some((o, x.clone(), r, q));
            }
        }
        let (o, x, norm, q) = best.clone().expect("B(1) has a nontrivial element");
        rows.push(UpperCurveRow {
            r,
            rf_upper: o,
            witness: x,
            witness_norm: norm,
            quotient: q,
        });
    }
    Ok(rows)
}

pub fn default_upper_curve(g: &MGroupDescription, r_max: usize, mode: PrimeMode) -> Result<Vec<UpperCurveRow>> {
    let sep = Separator::new(
        g,
        SeparatorConfig {
            mode,
            ..SeparatorConfig::default()
        },
    );
    upper_bound_curve(&sep, r_max, DEFAULT_BALL_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rational};
    use crate::groupfile::catalog;

    fn k(g: &MGroupDescription, v: &[Rational]) -> GroupElement {
        g.k_element(v.to_vec())
    }

    #[test]
    fn coordinate_forms() {
        let bs = catalog("bs12").unwrap();
        let cf = coordinate_form(&bs, &k(&bs, &[rational(3, 4)])).unwrap();
        assert_eq!((cf.mu.clone(), cf.j), (vec![BigInt::from(3)], 2));
        assert_eq!(cf.value(), vec![rational(3, 4)]);
        let z2 = catalog("z2_trivial").unwrap();
        let cf = coordinate_form(&z2, &k(&z2, &[int(5), int(-7)])).unwrap();
        assert_eq!((cf.mu, cf.j), (vec![BigInt::from(5), BigInt::from(-7)], 0));
        let h = catalog("heisenberg").unwrap();
        let cf = coordinate_form(&h, &k(&h, &[int(1), int(0), rational(1, 2)])).unwrap();
        assert_eq!(cf.mu, vec![BigInt::from(2), BigInt::from(0), BigInt::from(1)]);
        assert_eq!(cf.j, 1);
        assert_eq!(coordinate_form(&h, &h.identity()), Err(Error::Identity));
        let y = bs.generators[1].clone();
        assert_eq!(coordinate_form(&bs, &y), Err(Error::NotInK));
    }

    #[test]
    fn prime_selection() {
        let fib = catalog("z2_fibonacci").unwrap();
        let sep = Separator::new(&fib, SeparatorConfig::default());
        let cf = coordinate_form(&fib, &k(&fib, &[int(1), int(0)])).unwrap();
        assert_eq!(sep.select_primes(&cf, 3).unwrap(), vec![11, 19, 29]);
        let bs = catalog("bs12").unwrap();
        let sep = Separator::new(&bs, SeparatorConfig::default());
        let cf = coordinate_form(&bs, &k(&bs, &[int(1)])).unwrap();
        assert_eq!(sep.select_primes(&cf, 1).unwrap(), vec![3]);
        let cf = coordinate_form(&bs, &k(&bs, &[int(6)])).unwrap();
        assert_eq!(sep.select_primes(&cf, 1).unwrap(), vec![5]);
        let tight = Separator::new(
            &bs,
            SeparatorConfig {
                ceiling: 4,
                ..SeparatorConfig::default()
            },
        );
        assert_eq!(tight.select_primes(&cf, 1), Err(Error::NoCandidatePrime(4)));
    }

    #[test]
    fn fibonacci_quotient_at_11() {
        let fib = catalog("z2_fibonacci").unwrap();
        let sep = Separator::new(&fib, SeparatorConfig::default());
        let cf = coordinate_form(&fib, &k(&fib, &[int(1), int(0)])).unwrap();
        let q = sep.quotient_at(&cf, 11).unwrap();
        assert_eq!(q.codim(), 1);
        // J is the eigenline for 5, so the quotient sees the other eigenvalue 9
        assert_eq!(q.ideal.basis, vec![vec![1, 3]]);
        assert_eq!(q.induced_actions[0].data, vec![9]);
        assert_eq!((q.exponent, q.order), (5, 55));
        let best = sep.separate(&k(&fib, &[int(1), int(0)])).unwrap();
        assert_eq!(best.order, 55);
        assert_eq!(best.prime, Some(11));
    }

    #[test]
    fn best_effort_uses_nonsplit_prime() {
        let fib = catalog("z2_fibonacci").unwrap();
        let sep = Separator::new(
            &fib,
            SeparatorConfig {
                mode: PrimeMode::BestEffort,
                count: 1,
                ..SeparatorConfig::default()
            },
        );
        let q = sep.separate(&k(&fib, &[int(1), int(0)])).unwrap();
        assert_eq!(q.prime, Some(3));
        assert_eq!(q.codim(), 2);
        assert_eq!((q.exponent, q.order), (4, 36));
    }

    #[test]
    fn bs12_s3_quotient() {
        let bs = catalog("bs12").unwrap();
        let sep = Separator::new(&bs, SeparatorConfig::default());
        let x = k(&bs, &[int(1)]);
        let cf = coordinate_form(&bs, &x).unwrap();
        let q = sep.quotient_at(&cf, 3).unwrap();
        assert_eq!((q.codim(), q.exponent, q.order), (1, 2, 6));
        assert!(q.ideal.basis.is_empty());
        assert_eq!(q.evaluate(&x).unwrap(), QuotientElement { k: vec![1], h: vec![0], f: 0 });
        assert!(q.is_identity(&q.evaluate(&bs.identity()).unwrap()));
        assert!(q.checks_passed.contains(&"relators".to_string()));
        let y = bs.generators[1].clone();
        let t = sep.separate(&y).unwrap();
        assert_eq!((t.prime, t.order), (None, 2));
    }

    #[test]
    fn heisenberg_center() {
        let h = catalog("heisenberg").unwrap();
        let sep = Separator::new(&h, SeparatorConfig::default());
        let c = k(&h, &[int(0), int(0), int(1)]);
        let q = sep.separate(&c).unwrap();
        assert_eq!((q.prime, q.codim(), q.order), (Some(5), 3, 125));
        assert_eq!(sep.delta_p(5).unwrap(), 3);
        let json = q.certificate_json();
        assert_eq!(json["order"], 125);
        assert_eq!(json["prime"], 5);
        assert!(json["checks_passed"].as_array().unwrap().len() >= 4);
    }

    #[test]
    fn denominators_divisible_by_p() {
        let bs = catalog("bs12").unwrap();
        let sep = Separator::new(&bs, SeparatorConfig::default());
        let q = sep.separate(&k(&bs, &[int(1)])).unwrap();
        let p = q.prime.unwrap() as i64;
        assert_eq!(
            q.evaluate(&k(&bs, &[rational(1, p)])),
            Err(Error::DenominatorDivisibleByP(p as u64))
        );
    }

    #[test]
    fn hom_on_ball() {
        for name in ["bs12", "heisenberg", "z2_fibonacci"] {
            let g = catalog(name).unwrap();
            let sep = Separator::new(&g, SeparatorConfig::default());
            let b = ball(&g, 3, DEFAULT_BALL_BUDGET).unwrap();
            let x = b.spheres[3][0].clone();
            let x = if x.in_k() { x } else { g.k_element(g.lie.basis_vector(0)) };
            let q = sep.separate(&x).unwrap();
            for a in b.elements() {
                let ia = q.evaluate(&g.invert(a).unwrap()).unwrap();
                assert!(q.is_identity(&q.multiply(&q.evaluate(a).unwrap(), &ia)));
                for s in &g.generators {
                    let lhs = q.evaluate(&g.multiply(a, s).unwrap()).unwrap();
                    let rhs = q.multiply(&q.evaluate(a).unwrap(), &q.evaluate(s).unwrap());
                    assert_eq!(lhs, rhs, "{name}");
                }
            }
        }
    }
}
