//! Nilpotent Lie rings given by structure constants, with the truncated
//! Baker-Campbell-Hausdorff product as group law.

mod modp;
pub mod submodules;

pub use modp::{matrix_order_mod_p, order_analysis, DeltaReport, IdealModP, ModPLieRing, OrderAnalysis};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, Rational, Q};
use crate::linalg::{self, Matrix};

/// numerator / delta^delta_exponent, with delta supplied by the ambient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalizedScalar {
    pub numerator: BigInt,
    pub delta_exponent: u32,
}

impl LocalizedScalar {
    /// Reduced form of `x` over Z[1/delta]; None if the denominator has a prime not dividing delta.
    pub fn from_rational(x: &Rational, delta: u64) -> Option<Self> {
        let (mu, j) = localize(std::slice::from_ref(x), delta)?;
        let mut numerator = mu.into_iter().next().unwrap();
        let mut j = j;
        let d = BigInt::from(delta);
        while j > 0 && delta > 1 && (&numerator % &d).is_zero() {
            numerator /= &d;
            j -= 1;
        }
        Some(LocalizedScalar {
            numerator,
            delta_exponent: j,
        })
    }

    pub fn value(&self, delta: u64) -> Rational {
        Rational::new(self.numerator.clone(), BigInt::from(delta).pow(self.delta_exponent))
    }
}

/// Common minimal j with delta^j * x_i integral for all i, together with the numerators.
pub fn localize(xs: &[Rational], delta: u64) -> Option<(Vec<BigInt>, u32)> {
    let mut den = BigInt::one();
    for x in xs {
        den = den.lcm(x.denom());
    }
    let d = BigInt::from(delta);
    let mut power = BigInt::one();
    let mut j = 0u32;
    while !(&power % &den).is_zero() {
        if delta <= 1 || j > 4096 {
            return None;
        }
        power *= &d;
        j += 1;
    }
    let mu = xs
        .iter()
        .map(|x| (x * Rational::from_integer(power.clone())).to_integer())
        .collect();
    Some((mu, j))
}

/// Right-normed bracket words of the BCH series with their coefficients:
/// "yxy" means [y,[x,y]].
pub const BCH_TABLE: [(&str, i64, i64); 6] = [
    ("x", 1, 1),
    ("y", 1, 1),
    ("xy", 1, 2),
    ("xxy", 1, 12),
    ("yxy", -1, 12),
    ("yxxy", -1, 24),
];

pub const MAX_CLASS: usize = 4;

/// Sparse structure constants (i, j, k, c) with i < j: [v_i, v_j] has c in coordinate k.
pub type StructureTable<E> = Vec<(usize, usize, usize, E)>;

pub fn bracket_with<F: Field>(f: &F, sc: &StructureTable<F::E>, v: &[F::E], w: &[F::E]) -> Vec<F::E> {
    let mut out = vec![f.zero(); v.len()];
    for (i, j, k, c) in sc {
        let t = f.sub(&f.mul(&v[*i], &w[*j]), &f.mul(&v[*j], &w[*i]));
        if !f.is_zero(&t) {
            out[*k] = f.add(&out[*k], &f.mul(c, &t));
        }
    }
    out
}

/// v * w through degree `class` (at most 4).
pub fn bch_with<F: Field>(f: &F, sc: &StructureTable<F::E>, class: usize, v: &[F::E], w: &[F::E]) -> Vec<F::E> {
    let mut out: Vec<F::E> = v.iter().zip(w).map(|(a, b)| f.add(a, b)).collect();
    if class < 2 || sc.is_empty() {
        return out;
    }
    let mut cache: Vec<(&str, Vec<F::E>)> = Vec::new();
    for (word, num, den) in BCH_TABLE.iter().filter(|t| (2..=class).contains(&t.0.len())) {
        let value = eval_word(f, sc, word, v, w, &mut cache);
        let c = f.frac(*num, *den);
        for (o, x) in out.iter_mut().zip(&value) {
            if !f.is_zero(x) {
                *o = f.add(o, &f.mul(&c, x));
            }
        }
    }
    out
}

fn eval_word<'a, F: Field>(
    f: &F,
    sc: &StructureTable<F::E>,
    word: &'a str,
    v: &[F::E],
    w: &[F::E],
    cache: &mut Vec<(&'a str, Vec<F::E>)>,
) -> Vec<F::E> {
    if let Some((_, val)) = cache.iter().find(|(s, _)| *s == word) {
        return val.clone();
    }
    let letter = |c: u8| if c == b'x' { v } else { w };
    let val = if word.len() == 1 {
        letter(word.as_bytes()[0]).to_vec()
    } else {
        let inner = eval_word(f, sc, &word[1..], v, w, cache);
        bracket_with(f, sc, letter(word.as_bytes()[0]), &inner)
    };
    cache.push((word, val.clone()));
    val
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieRingDescription {
    dim: usize,
    structure: StructureTable<Rational>,
    class: usize,
    delta: u64,
}

impl LieRingDescription {
    /// Structure constants are (i, j, k, c) with 0-based indices and i < j; repeated
    /// entries are summed.
    pub fn new(dim: usize, constants: Vec<(usize, usize, usize, Rational)>, class: usize, delta: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        if class == 0 {
            return Err(Error::Invalid("nilpotency class must be at least 1".into()));
        }
        if delta == 0 {
            return Err(Error::Invalid("delta must be positive".into()));
        }
        let mut structure: StructureTable<Rational> = Vec::new();
        for (i, j, k, c) in constants {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::Invalid(format!("structure constant index ({i},{j},{k}) out of range")));
            }
            if i >= j {
                return Err(Error::Invalid(format!("structure constant ({i},{j},{k}) needs i < j")));
            }
            match structure.iter_mut().find(|e| (e.0, e.1, e.2) == (i, j, k)) {
                Some(e) => e.3 += c,
                None => structure.push((i, j, k, c)),
            }
        }
        structure.retain(|e| !e.3.is_zero());
        structure.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        Ok(LieRingDescription {
            dim,
            structure,
            class,
            delta,
        })
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new(dim, Vec::new(), 1, 1).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn class(&self) -> usize {
        self.class
    }
    pub fn delta(&self) -> u64 {
        self.delta
    }
    pub fn structure(&self) -> &StructureTable<Rational> {
        &self.structure
    }
    pub fn is_abelian(&self) -> bool {
        self.structure.is_empty()
    }

    /// Delta extended by the BCH denominators needed at this class.
    pub fn ambient_delta(&self) -> u64 {
        let bch_den = match self.class {
            1 => 1,
            2 => 2,
            3 => 12,
            _ => 24,
        };
        self.delta.lcm(&bch_den)
    }

    pub fn max_abs_structure_constant(&self) -> BigInt {
        let rats: Vec<Rational> = self.structure.iter().map(|e| e.3.clone()).collect();
        crate::field::max_abs_numerator(&rats)
    }

    /// Terms of the BCH table used at this class.
    pub fn bch_table(&self) -> Vec<(&'static str, Rational)> {
        BCH_TABLE
            .iter()
            .filter(|t| t.0.len() <= self.class.min(MAX_CLASS))
            .map(|t| (t.0, crate::field::rational(t.1, t.2)))
            .collect()
    }

    fn check_dim(&self, v: &[Rational]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn zero(&self) -> Vec<Rational> {
        vec![Rational::zero(); self.dim]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = self.zero();
        v[i] = Rational::one();
        v
    }

    pub fn bracket(&self, v: &[Rational], w: &[Rational]) -> Result<Vec<Rational>> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        Ok(bracket_with(&Q, &self.structure, v, w))
    }

    pub fn bch_multiply(&self, v: &[Rational], w: &[Rational]) -> Result<Vec<Rational>> {
        self.check_dim(v)?;
        self.check_dim(w)?;
        if self.class > MAX_CLASS {
            return Err(Error::UnsupportedClass(self.class));
        }
        Ok(bch_with(&Q, &self.structure, self.class, v, w))
    }

    /// t-th power in (L, *): since [v, v] = 0 this is the scalar multiple t v.
    pub fn bch_power(&self, v: &[Rational], t: &Rational) -> Result<Vec<Rational>> {
        self.check_dim(v)?;
        Ok(v.iter().map(|x| x * t).collect())
    }

    pub fn ad_matrix(&self, i: usize) -> Matrix<Rational> {
        let e = self.basis_vector(i);
        let cols: Vec<Vec<Rational>> = (0..self.dim)
            .map(|j| bracket_with(&Q, &self.structure, &e, &self.basis_vector(j)))
            .collect();
        Matrix::from_rows((0..self.dim).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect())
    }

    /// g_1 = L, g_{i+1} = [g_i, L], as RREF bases over Q, ending with the zero space.
    pub fn lower_central_series(&self) -> Vec<Vec<Vec<Rational>>> {
        let mut series = vec![linalg::rref(&Q, &linalg::identity(&Q, self.dim).rows())];
        while !series.last().unwrap().is_empty() {
            let cur = series.last().unwrap();
            let mut next = Vec::new();
            for b in cur {
                for j in 0..self.dim {
                    next.push(bracket_with(&Q, &self.structure, b, &self.basis_vector(j)));
                }
            }
            let next = linalg::rref(&Q, &next);
            if next.len() == cur.len() {
                // not nilpotent; stop rather than loop forever
                series.push(next);
                break;
            }
            series.push(next);
        }
        series
    }

    /// First failing Jacobi identity on basis triples, if any.
    pub fn jacobi_violation(&self) -> Option<String> {
        let b = |i: usize| self.basis_vector(i);
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let br = |x: &[Rational], y: &[Rational]| bracket_with(&Q, &self.structure, x, y);
                    let t1 = br(&b(i), &br(&b(j), &b(k)));
                    let t2 = br(&b(j), &br(&b(k), &b(i)));
                    let t3 = br(&b(k), &br(&b(i), &b(j)));
                    if t1.iter().zip(&t2).zip(&t3).any(|((a, b), c)| !(a + b + c).is_zero()) {
                        return Some(format!("Jacobi fails on basis triple ({},{},{})", i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        None
    }

    /// First violated invariant of the description, if any.
    pub fn violation(&self) -> Option<String> {
        for (i, j, k, c) in &self.structure {
            if LocalizedScalar::from_rational(c, self.delta).is_none() {
                return Some(format!(
                    "structure constant c_{{{},{}}}^{} = {} is not in Z[1/{}]",
                    i + 1,
                    j + 1,
                    k + 1,
                    crate::field::format_rational(c),
                    self.delta
                ));
            }
        }
        if let Some(v) = self.jacobi_violation() {
            return Some(v);
        }
        let lcs = self.lower_central_series();
        let steps = lcs.iter().position(|s| s.is_empty());
        match steps {
            Some(s) if s == self.class => {}
            Some(s) => {
                return Some(format!(
                    "lower central series vanishes at step {} but declared class is {}",
                    s + 1,
                    self.class
                ))
            }
            None => return Some("Lie ring is not nilpotent".into()),
        }
        if self.class > MAX_CLASS {
            return Some(format!("nilpotency class {} exceeds supported class {}", self.class, MAX_CLASS));
        }
        let ad = self.ambient_delta();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let prod = bch_with(&Q, &self.structure, self.class, &self.basis_vector(i), &self.basis_vector(j));
                if localize(&prod, ad).is_none() {
                    return Some(format!("v{} * v{} leaves the coordinate lattice", i + 1, j + 1));
                }
            }
        }
        None
    }

    /// Structure constants reduced into another field.
    pub fn table_in<F: Field>(&self, f: &F, reduce: impl Fn(&Rational) -> Option<F::E>) -> Option<StructureTable<F::E>> {
        let mut out = Vec::new();
        for (i, j, k, c) in &self.structure {
            let x = reduce(c)?;
            if !f.is_zero(&x) {
                out.push((*i, *j, *k, x));
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rational};

    pub(crate) fn heisenberg() -> LieRingDescription {
        LieRingDescription::new(3, vec![(0, 1, 2, int(1))], 2, 1).unwrap()
    }

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn heisenberg_brackets() {
        let h = heisenberg();
        assert_eq!(h.bracket(&v(&[1, 0, 0]), &v(&[0, 1, 0])).unwrap(), v(&[0, 0, 1]));
        assert_eq!(h.bracket(&v(&[2, 1, 0]), &v(&[0, 1, 0])).unwrap(), v(&[0, 0, 2]));
        let x = v(&[3, -2, 5]);
        assert_eq!(h.bracket(&x, &x).unwrap(), h.zero());
        assert!(matches!(h.bracket(&v(&[1, 0]), &x), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn heisenberg_bch() {
        let h = heisenberg();
        let p = h.bch_multiply(&v(&[1, 0, 0]), &v(&[0, 1, 0])).unwrap();
        assert_eq!(p, vec![int(1), int(1), rational(1, 2)]);
        let q = h.bch_multiply(&p, &v(&[-1, 0, 0])).unwrap();
        // a b a^-1 b^-1 is the commutator exp(v3), not the identity
        let r = h.bch_multiply(&q, &v(&[0, -1, 0])).unwrap();
        assert_eq!(r, v(&[0, 0, 1]));
        let q = h.bch_multiply(&p, &v(&[0, -1, 0])).unwrap();
        assert_eq!(h.bch_multiply(&q, &v(&[-1, 0, 0])).unwrap(), h.zero());
        let s = v(&[1, 1, 0]);
        assert_eq!(h.bch_power(&s, &int(2)).unwrap(), v(&[2, 2, 0]));
        assert_eq!(h.bch_power(&s, &int(-1)).unwrap(), v(&[-1, -1, 0]));
        assert_eq!(h.bch_power(&s, &int(0)).unwrap(), h.zero());
    }

    #[test]
    fn abelian_bch_is_addition() {
        let a = LieRingDescription::abelian(2);
        assert_eq!(a.bch_multiply(&v(&[1, 2]), &v(&[3, -5])).unwrap(), v(&[4, -3]));
    }

    #[test]
    fn lower_central_series_shapes() {
        let a = LieRingDescription::abelian(2);
        let s = a.lower_central_series();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].len(), 2);
        assert!(s[1].is_empty());
        let h = heisenberg();
        let s = h.lower_central_series();
        assert_eq!(s.iter().map(|b| b.len()).collect::<Vec<_>>(), vec![3, 1, 0]);
        assert_eq!(s[1], vec![v(&[0, 0, 1])]);
        // [v1,v2]=v3 with [v1,v3]=0 declared explicitly: same shape
        let f = LieRingDescription::new(3, vec![(0, 1, 2, int(1)), (0, 2, 1, int(0))], 2, 1).unwrap();
        assert_eq!(f.lower_central_series().iter().map(|b| b.len()).collect::<Vec<_>>(), vec![3, 1, 0]);
    }

    #[test]
    fn violations() {
        assert!(heisenberg().violation().is_none());
        let wrong_class = LieRingDescription::new(3, vec![(0, 1, 2, int(1))], 3, 1).unwrap();
        assert!(wrong_class.violation().unwrap().contains("declared class"));
        let bad_den = LieRingDescription::new(3, vec![(0, 1, 2, rational(1, 3))], 2, 2).unwrap();
        assert!(bad_den.violation().unwrap().contains("Z[1/2]"));
        // so(3)-like brackets are not nilpotent
        let so3 = LieRingDescription::new(
            3,
            vec![(0, 1, 2, int(1)), (1, 2, 0, int(1)), (0, 2, 1, int(-1))],
            2,
            1,
        )
        .unwrap();
        assert!(so3.violation().is_some());
    }

    #[test]
    fn localized_scalars() {
        let x = LocalizedScalar::from_rational(&rational(3, 4), 2).unwrap();
        assert_eq!((x.numerator.clone(), x.delta_exponent), (BigInt::from(3), 2));
        assert_eq!(x.value(2), rational(3, 4));
        let y = LocalizedScalar::from_rational(&int(12), 2).unwrap();
        assert_eq!(y.delta_exponent, 0);
        assert!(LocalizedScalar::from_rational(&rational(1, 3), 2).is_none());
        let z = LocalizedScalar::from_rational(&rational(1, 2), 6).unwrap();
        assert_eq!((z.numerator, z.delta_exponent), (BigInt::from(3), 1));
        assert_eq!(localize(&[int(5), int(-7)], 1), Some((vec![BigInt::from(5), BigInt::from(-7)], 0)));
    }

    #[test]
    fn class_above_four_rejected() {
        let l = LieRingDescription::new(2, vec![], 5, 1).unwrap();
        assert_eq!(l.bch_multiply(&v(&[1, 0]), &v(&[0, 1])), Err(Error::UnsupportedClass(5)));
    }
}
