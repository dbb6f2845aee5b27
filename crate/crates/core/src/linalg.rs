//! Dense matrices, subspaces and polynomials over an exact [`Field`].

use crate::field::{Field, Fp};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix<E> {
    pub n: usize,
    /// Row-major; acts on column vectors.
    pub data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<E>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map<T, G: Fn(&E) -> T>(&self, g: G) -> Matrix<T> {
        Matrix {
            n: self.n,
            data: self.data.iter().map(g).collect(),
        }
    }
}

pub fn identity<F: Field>(f: &F, n: usize) -> Matrix<F::E> {
    let mut data = vec![f.zero(); n * n];
    for i in 0..n {
        data[i * n + i] = f.one();
    }
    Matrix { n, data }
}

pub fn is_identity<F: Field>(f: &F, a: &Matrix<F::E>) -> bool {
    *a == identity(f, a.n)
}

pub fn mul<F: Field>(f: &F, a: &Matrix<F::E>, b: &Matrix<F::E>) -> Matrix<F::E> {
    let n = a.n;
    let mut data = vec![f.zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a.get(i, k);
            if f.is_zero(aik) {
                continue;
            }
            for j in 0..n {
                let t = f.mul(aik, b.get(k, j));
                data[i * n + j] = f.add(&data[i * n + j], &t);
            }
        }
    }
    Matrix { n, data }
}

pub fn mul_vec<F: Field>(f: &F, a: &Matrix<F::E>, v: &[F::E]) -> Vec<F::E> {
    (0..a.n)
        .map(|i| {
            a.row(i)
                .iter()
                .zip(v)
                .filter(|(x, y)| !f.is_zero(x) && !f.is_zero(y))
                .fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
        })
        .collect()
}

pub fn sub_vec<F: Field>(f: &F, v: &[F::E], w: &[F::E]) -> Vec<F::E> {
    v.iter().zip(w).map(|(x, y)| f.sub(x, y)).collect()
}

pub fn pow<F: Field>(f: &F, a: &Matrix<F::E>, mut e: u64) -> Matrix<F::E> {
    let mut acc = identity(f, a.n);
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(f, &acc, &b);
        }
        e >>= 1;
        if e > 0 {
            b = mul(f, &b, &b);
        }
    }
    acc
}

pub fn sub<F: Field>(f: &F, a: &Matrix<F::E>, b: &Matrix<F::E>) -> Matrix<F::E> {
    Matrix {
        n: a.n,
        data: a.data.iter().zip(&b.data).map(|(x, y)| f.sub(x, y)).collect(),
    }
}

/// a - lambda * I
pub fn shift<F: Field>(f: &F, a: &Matrix<F::E>, lambda: &F::E) -> Matrix<F::E> {
    let mut out = a.clone();
    for i in 0..a.n {
        out.data[i * a.n + i] = f.sub(a.get(i, i), lambda);
    }
    out
}

pub fn inverse<F: Field>(f: &F, a: &Matrix<F::E>) -> Option<Matrix<F::E>> {
    let n = a.n;
    let mut m: Vec<Vec<F::E>> = a.rows();
    let mut inv: Vec<Vec<F::E>> = identity(f, n).rows();
    for col in 0..n {
        let piv = (col..n).find(|&r| !f.is_zero(&m[r][col]))?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let s = f.inv(&m[col][col])?;
        for j in 0..n {
            m[col][j] = f.mul(&m[col][j], &s);
            inv[col][j] = f.mul(&inv[col][j], &s);
        }
        for r in 0..n {
            if r != col && !f.is_zero(&m[r][col]) {
                let t = m[r][col].clone();
                for j in 0..n {
                    let x = f.mul(&t, &m[col][j]);
                    m[r][j] = f.sub(&m[r][j], &x);
                    let y = f.mul(&t, &inv[col][j]);
                    inv[r][j] = f.sub(&inv[r][j], &y);
                }
            }
        }
    }
    Some(Matrix::from_rows(inv))
}

pub fn det<F: Field>(f: &F, a: &Matrix<F::E>) -> F::E {
    let n = a.n;
    let mut m = a.rows();
    let mut d = f.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !f.is_zero(&m[r][col])) else {
            return f.zero();
        };
        if piv != col {
            m.swap(col, piv);
            d = f.neg(&d);
        }
        d = f.mul(&d, &m[col][col]);
        let s = f.inv(&m[col][col]).expect("nonzero pivot");
        for r in col + 1..n {
            if !f.is_zero(&m[r][col]) {
                let t = f.mul(&m[r][col], &s);
                for j in col..n {
                    let x = f.mul(&t, &m[col][j]);
                    m[r][j] = f.sub(&m[r][j], &x);
                }
            }
        }
    }
    d
}

/// Characteristic polynomial det(xI - a), coefficients low to high.
/// Faddeev-LeVerrier; divides by 1..n, so over F_p it needs p > n.
pub fn charpoly<F: Field>(f: &F, a: &Matrix<F::E>) -> Vec<F::E> {
    let n = a.n;
    let mut coeffs = vec![f.zero(); n + 1];
    coeffs[n] = f.one();
    let mut m = Matrix {
        n,
        data: vec![f.zero(); n * n],
    };
    for k in 1..=n {
        let mut next = mul(f, a, &m);
        for i in 0..n {
            next.data[i * n + i] = f.add(next.get(i, i), &coeffs[n - k + 1]);
        }
        m = next;
        let am = mul(f, a, &m);
        let tr = (0..n).fold(f.zero(), |acc, i| f.add(&acc, am.get(i, i)));
        let kinv = f.inv(&f.from_i64(k as i64)).expect("field characteristic exceeds n");
        coeffs[n - k] = f.neg(&f.mul(&tr, &kinv));
    }
    coeffs
}

// ---------- subspaces (row vectors) ----------

/// Reduced row echelon form of the span of `rows`; zero rows dropped, pivots ascending.
pub fn rref<F: Field>(f: &F, rows: &[Vec<F::E>]) -> Vec<Vec<F::E>> {
    let mut m: Vec<Vec<F::E>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| !f.is_zero(&m[r][col])) else {
            continue;
        };
        m.swap(rank, piv);
        let s = f.inv(&m[rank][col]).unwrap();
        for j in 0..cols {
            m[rank][j] = f.mul(&m[rank][j], &s);
        }
        for r in 0..m.len() {
            if r != rank && !f.is_zero(&m[r][col]) {
                let t = m[r][col].clone();
                for j in 0..cols {
                    let x = f.mul(&t, &m[rank][j]);
                    m[r][j] = f.sub(&m[r][j], &x);
                }
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m
}

pub fn pivot_of<F: Field>(f: &F, row: &[F::E]) -> Option<usize> {
    row.iter().position(|x| !f.is_zero(x))
}

/// Eliminate the pivot coordinates of an RREF basis from v; zero iff v lies in the span.
pub fn reduce_mod_span<F: Field>(f: &F, basis: &[Vec<F::E>], v: &[F::E]) -> Vec<F::E> {
    let mut out = v.to_vec();
    for row in basis {
        let piv = pivot_of(f, row).expect("rref rows are nonzero");
        if !f.is_zero(&out[piv]) {
            let t = out[piv].clone();
            for (o, r) in out.iter_mut().zip(row) {
                *o = f.sub(o, &f.mul(&t, r));
            }
        }
    }
    out
}

pub fn in_span<F: Field>(f: &F, basis: &[Vec<F::E>], v: &[F::E]) -> bool {
    reduce_mod_span(f, basis, v).iter().all(|x| f.is_zero(x))
}

/// Basis of {u : u . w = 0 for all w in span(basis)}; `basis` must be in RREF.
pub fn annihilator<F: Field>(f: &F, basis: &[Vec<F::E>], dim: usize) -> Vec<Vec<F::E>> {
    let pivots: Vec<usize> = basis.iter().map(|r| pivot_of(f, r).unwrap()).collect();
    (0..dim)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut u = vec![f.zero(); dim];
            u[free] = f.one();
            for (row, &pc) in basis.iter().zip(&pivots) {
                u[pc] = f.neg(&row[free]);
            }
            u
        })
        .collect()
}

/// RREF basis of the intersection of the given subspaces (each in RREF).
pub fn intersection<F: Field>(f: &F, spaces: &[&[Vec<F::E>]], dim: usize) -> Vec<Vec<F::E>> {
    let mut ann: Vec<Vec<F::E>> = Vec::new();
    for s in spaces {
        ann.extend(annihilator(f, s, dim));
    }
    let ann = rref(f, &ann);
    rref(f, &annihilator(f, &ann, dim))
}

// ---------- polynomials (coefficients low to high) ----------

pub fn poly_trim<F: Field>(f: &F, mut p: Vec<F::E>) -> Vec<F::E> {
    while p.last().is_some_and(|c| f.is_zero(c)) {
        p.pop();
    }
    p
}

pub fn poly_rem<F: Field>(f: &F, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
    let b = poly_trim(f, b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = poly_trim(f, a.to_vec());
    let lead_inv = f.inv(b.last().unwrap()).unwrap();
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let t = f.mul(r.last().unwrap(), &lead_inv);
        for (i, c) in b.iter().enumerate() {
            r[shift + i] = f.sub(&r[shift + i], &f.mul(&t, c));
        }
        r = poly_trim(f, r);
    }
    r
}

pub fn poly_gcd<F: Field>(f: &F, a: &[F::E], b: &[F::E]) -> Vec<F::E> {
    let mut x = poly_trim(f, a.to_vec());
    let mut y = poly_trim(f, b.to_vec());
    while !y.is_empty() {
        let r = poly_rem(f, &x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        let s = f.inv(&lead).unwrap();
        x = x.iter().map(|c| f.mul(c, &s)).collect();
    }
    x
}

pub fn poly_derivative<F: Field>(f: &F, a: &[F::E]) -> Vec<F::E> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| f.mul(&f.from_i64(i as i64), c))
        .collect()
}

pub fn poly_degree<F: Field>(f: &F, a: &[F::E]) -> usize {
    poly_trim(f, a.to_vec()).len().saturating_sub(1)
}

/// Degree of the squarefree part a / gcd(a, a').
pub fn squarefree_degree<F: Field>(f: &F, a: &[F::E]) -> usize {
    let g = poly_gcd(f, a, &poly_derivative(f, a));
    poly_degree(f, a) - poly_degree(f, &g)
}

pub fn poly_eval<F: Field>(f: &F, a: &[F::E], x: &F::E) -> F::E {
    a.iter()
        .rev()
        .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
}

/// Roots in F_p listed with multiplicity.
pub fn roots_with_multiplicity(f: &Fp, a: &[u64]) -> Vec<u64> {
    let mut poly = poly_trim(f, a.to_vec());
    let mut roots = Vec::new();
    for r in 0..f.p {
        while poly.len() > 1 && poly_eval(f, &poly, &r) == 0 {
            // synthetic division by (x - r)
            let n = poly.len() - 1;
            let mut q = vec![0u64; n];
            let mut carry = 0u64;
            for i in (0..n).rev() {
                carry = f.add(&poly[i + 1], &f.mul(&carry, &r));
                q[i] = carry;
            }
            poly = q;
            roots.push(r);
        }
    }
    roots
}
