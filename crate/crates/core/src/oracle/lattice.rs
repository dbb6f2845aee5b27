//! Full-rank sublattices of Z^m in Hermite normal form.
//!
//! Rows are upper triangular with positive diagonal d_i, and every entry above
//! the diagonal in column j lies in [0, d_j). Each full-rank sublattice has
//! exactly one such basis.

use num_integer::Integer;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Hnf {
    pub rows: Vec<Vec<i64>>,
}

impl Hnf {
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn whole(m: usize) -> Self {
        Hnf {
            rows: (0..m)
                .map(|i| (0..m).map(|j| (i == j) as i64).collect())
                .collect(),
        }
    }

    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.dim()).map(|i| self.rows[i][i]).collect()
    }

    pub fn index(&self) -> u64 {
        self.diagonal().iter().map(|&d| d as u64).product()
    }

    /// Coefficients t with v = Σ t_i rows_i, if v lies in the lattice.
    pub fn coefficients(&self, v: &[i64]) -> Option<Vec<i64>> {
        let mut w = v.to_vec();
        let mut t = vec![0; self.dim()];
        for i in 0..self.dim() {
            let d = self.rows[i][i];
            if w[i] % d != 0 {
                return None;
            }
            t[i] = w[i] / d;
            for j in i..self.dim() {
                w[j] -= t[i] * self.rows[i][j];
            }
        }
        Some(t)
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.coefficients(v).is_some()
    }

    /// Canonical coset representative with 0 <= v_i < d_i.
    pub fn reduce(&self, v: &[i64]) -> Vec<i64> {
        let mut w = v.to_vec();
        for i in 0..self.dim() {
            let q = Integer::div_floor(&w[i], &self.rows[i][i]);
            for j in i..self.dim() {
                w[j] -= q * self.rows[i][j];
            }
        }
        w
    }

    /// All canonical coset representatives, in lexicographic order.
    pub fn representatives(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for d in self.diagonal() {
            out = out
                .into_iter()
                .flat_map(|v: Vec<i64>| {
                    (0..d).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    /// Whether the lattice contains q Z^m.
    pub fn contains_multiple_of_identity(&self, q: i64) -> bool {
        (0..self.dim()).all(|i| {
            let mut e = vec![0; self.dim()];
            e[i] = q;
            self.contains(&e)
        })
    }

    /// Whether A·Λ ⊆ Λ for an integer matrix A given by rows, acting on column vectors.
    pub fn is_invariant(&self, a: &[Vec<i64>]) -> bool {
        self.rows.iter().all(|r| {
            let img: Vec<i64> = a.iter().map(|row| row.iter().zip(r).map(|(x, y)| x * y).sum()).collect();
            self.contains(&img)
        })
    }
}

/// Every sublattice of Z^m of index d, in lexicographic order of the basis.
pub fn enumerate_hnf(m: usize, d: u64) -> Vec<Hnf> {
    let mut out = Vec::new();
    for diag in factorizations(d, m) {
        let mut partial: Vec<Vec<Vec<i64>>> = vec![(0..m)
            .map(|i| {
                let mut r = vec![0; m];
                r[i] = diag[i] as i64;
                r
            })
            .collect()];
        for j in 1..m {
            for i in 0..j {
                partial = partial
                    .into_iter()
                    .flat_map(|rows| {
                        (0..diag[j] as i64).map(move |x| {
                            let mut r = rows.clone();
                            r[i][j] = x;
                            r
                        })
                    })
                    .collect();
            }
        }
        out.extend(partial.into_iter().map(|rows| Hnf { rows }));
    }
    out.sort();
    out
}

/// Ordered tuples (d_1, ..., d_m) of positive integers with product d.
fn factorizations(d: u64, m: usize) -> Vec<Vec<u64>> {
    if m == 0 {
        return if d == 1 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for a in crate::ntheory::divisors(d) {
        for mut rest in factorizations(d / a, m - 1) {
            rest.insert(0, a);
            out.push(rest);
        }
    }
    out
}

/// HNF of the lattice spanned by integer vectors, or None if it is not of full rank.
pub fn hnf_of(gens: &[Vec<i64>], m: usize) -> Option<Hnf> {
    let mut rows: Vec<Vec<i128>> = gens.iter().map(|g| g.iter().map(|&x| x as i128).collect()).collect();
    let mut out: Vec<Vec<i128>> = Vec::new();
    for col in 0..m {
        // gcd-combine all rows with a nonzero entry in this column
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            for &i in &nz {
                if i != piv {
                    let q = rows[i][col] / rows[piv][col];
                    for j in 0..m {
                        rows[i][j] -= q * rows[piv][j];
                    }
                }
            }
        }
        let idx = (0..rows.len()).find(|&i| rows[i][col] != 0)?;
        let mut r = rows.remove(idx);
        if r[col] < 0 {
            r.iter_mut().for_each(|x| *x = -*x);
        }
        out.push(r);
    }
    for j in 0..m {
        let d = out[j][j];
        for i in 0..j {
            let q = Integer::div_floor(&out[i][j], &d);
            for k in 0..m {
                out[i][k] -= q * out[j][k];
            }
        }
    }
    Some(Hnf {
        rows: out
            .into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("HNF entry fits i64")).collect())
            .collect(),
    })
}
