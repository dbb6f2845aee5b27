//! Common invariant subspaces of a set of operators on F_p^d.
//!
//! The lattice is built by splitting along one proper invariant subspace I:
//! every invariant W is fixed by A = W ∩ I, B = (W + I)/I and a linear map
//! B → I/A, and invariance of W is an affine condition on that map.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field, Fp};
use crate::linalg::{self, Matrix};

pub type Basis = Vec<Vec<u64>>;

/// Smallest subspace containing v and stable under every operator, in RREF.
pub fn cyclic_submodule(f: &Fp, ops: &[Matrix<u64>], v: Vec<u64>) -> Basis {
    let mut basis = linalg::rref(f, &[v.clone()]);
    let mut queue = vec![v];
    while let Some(w) = queue.pop() {
        for op in ops {
            let u = linalg::mul_vec(f, op, &w);
            if !linalg::in_span(f, &basis, &u) {
                basis.push(u.clone());
                basis = linalg::rref(f, &basis);
                queue.push(u);
            }
        }
    }
    basis
}

fn unit(d: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

fn projective_count(p: u64, d: usize) -> u128 {
    ((p as u128).pow(d as u32) - 1) / (p as u128 - 1)
}

/// The idx-th nonzero vector of F_p^d whose first nonzero entry is 1.
pub(crate) fn projective_point(p: u64, d: usize, mut idx: u64) -> Vec<u64> {
    let mut v = vec![0u64; d];
    for lead in 0..d {
        let block = p.pow((d - 1 - lead) as u32);
        if idx < block {
            v[lead] = 1;
            for slot in (lead + 1..d).rev() {
                v[slot] = idx % p;
                idx /= p;
            }
            return v;
        }
        idx -= block;
    }
    unreachable!("projective index out of range")
}

fn kernel(f: &Fp, m: &Matrix<u64>) -> Basis {
    linalg::annihilator(f, &linalg::rref(f, &m.rows()), m.n)
}

/// Some invariant subspace other than 0 and F_p^d, if one exists.
fn proper_submodule(f: &Fp, d: usize, ops: &[Matrix<u64>], scan_budget: u64) -> Result<Option<Basis>> {
    if d <= 1 {
        return Ok(None);
    }
    let mut candidates: Vec<Vec<u64>> = (0..d).map(|i| unit(d, i)).collect();
    for op in ops {
        let mut roots: Vec<u64> = if f.p as usize > d {
            linalg::roots_with_multiplicity(f, &linalg::charpoly(f, op))
        } else {
            (0..f.p).filter(|l| linalg::det(f, &linalg::shift(f, op, l)) == 0).collect()
        };
        roots.dedup();
        for lambda in roots {
            candidates.extend(kernel(f, &linalg::shift(f, op, &lambda)));
        }
    }
    for v in candidates {
        let c = cyclic_submodule(f, ops, v);
        if c.len() < d {
            return Ok(Some(c));
        }
    }
    let points = projective_count(f.p, d);
    if points > scan_budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "projective points to scan",
            budget: scan_budget,
        });
    }
    Ok((0..points as u64).into_par_iter().find_map_first(|i| {
        let c = cyclic_submodule(f, ops, projective_point(f.p, d, i));
        (c.len() < d).then_some(c)
    }))
}

/// Solutions of the system whose rows are [coefficients | rhs], as a particular
/// solution plus a kernel basis; None if inconsistent.
fn solve_affine(f: &Fp, rows: &[Vec<u64>], nvars: usize) -> Option<(Vec<u64>, Basis)> {
    let r = linalg::rref(f, rows);
    let mut particular = vec![0; nvars];
    let mut pivots = Vec::new();
    for row in &r {
        let c = linalg::pivot_of(f, row).expect("rref rows are nonzero");
        if c == nvars {
            return None;
        }
        particular[c] = row[nvars];
        pivots.push((c, row));
    }
    let kernel = (0..nvars)
        .filter(|j| !pivots.iter().any(|(c, _)| c == j))
        .map(|j| {
            let mut v = unit(nvars, j);
            for (c, row) in &pivots {
                v[*c] = f.neg(&row[j]);
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

fn too_many(budget: u64) -> Error {
    Error::BudgetExceeded {
        what: "invariant ideals",
        budget,
    }
}

/// Every subspace of F_p^d stable under all `ops`, each in RREF.
/// `budget` caps both the number of subspaces and any fallback point scan.
pub fn invariant_subspaces(f: &Fp, d: usize, ops: &[Matrix<u64>], budget: u64) -> Result<Vec<Basis>> {
    let mut out = enumerate(f, d, ops, budget)?;
    out.sort();
    Ok(out)
}

fn enumerate(f: &Fp, d: usize, ops: &[Matrix<u64>], budget: u64) -> Result<Vec<Basis>> {
    if d == 0 {
        return Ok(vec![Vec::new()]);
    }
    let Some(ibasis) = proper_submodule(f, d, ops, budget)? else {
        return Ok(vec![Vec::new(), (0..d).map(|i| unit(d, i)).collect()]);
    };
    let k = ibasis.len();
    let pivots: Vec<usize> = ibasis.iter().map(|r| linalg::pivot_of(f, r).unwrap()).collect();
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();

    // Operators restricted to I (coordinates = pivot entries) and induced on V/I
    // (coordinates = free entries of the reduced representative).
    let on_i: Vec<Matrix<u64>> = ops
        .iter()
        .map(|t| {
            let cols: Vec<Vec<u64>> = ibasis.iter().map(|b| linalg::mul_vec(f, t, b)).collect();
            Matrix::from_rows((0..k).map(|s| cols.iter().map(|c| c[pivots[s]]).collect()).collect())
        })
        .collect();
    let on_quotient: Vec<Matrix<u64>> = ops
        .iter()
        .map(|t| {
            let cols: Vec<Vec<u64>> = free
                .iter()
                .map(|&c| linalg::reduce_mod_span(f, &ibasis, &linalg::mul_vec(f, t, &unit(d, c))))
                .collect();
            Matrix::from_rows(free.iter().map(|&s| cols.iter().map(|c| c[s]).collect()).collect())
        })
        .collect();
    let lift = |q: &[u64]| {
        let mut v = vec![0; d];
        for (x, &c) in q.iter().zip(&free) {
            v[c] = *x;
        }
        v
    };

    let subs: Vec<Basis> = enumerate(f, k, &on_i, budget)?
        .into_iter()
        .map(|a| {
            let rows: Vec<Vec<u64>> = a
                .iter()
                .map(|coords| {
                    coords.iter().zip(&ibasis).fold(vec![0; d], |acc, (x, row)| {
                        acc.iter().zip(row).map(|(s, r)| f.add(s, &f.mul(x, r))).collect()
                    })
                })
                .collect();
            linalg::rref(f, &rows)
        })
        .collect();
    let quots = enumerate(f, d - k, &on_quotient, budget)?;

    let mut found: BTreeSet<Basis> = BTreeSet::new();
    for a in &subs {
        // complement of A inside I
        let mut span = a.clone();
        let mut comp = Vec::new();
        for row in &ibasis {
            if !linalg::in_span(f, &span, row) {
                comp.push(row.clone());
                span = linalg::rref(f, &[span, vec![row.clone()]].concat());
            }
        }
        let t = comp.len();
        let red = |v: &[u64]| linalg::reduce_mod_span(f, a, v);
        let red_comp: Vec<Vec<u64>> = comp.iter().map(|c| red(c)).collect();
        for b in &quots {
            let s = b.len();
            let lifts: Vec<Vec<u64>> = b.iter().map(|q| lift(q)).collect();
            let bpiv: Vec<usize> = b.iter().map(|r| linalg::pivot_of(f, r).unwrap()).collect();
            let nvars = s * t;
            let mut rows = Vec::new();
            for (op, qop) in ops.iter().zip(&on_quotient) {
                let red_tc: Vec<Vec<u64>> = comp.iter().map(|c| red(&linalg::mul_vec(f, op, c))).collect();
                for kk in 0..s {
                    let image = linalg::mul_vec(f, qop, &b[kk]);
                    let beta: Vec<u64> = bpiv.iter().map(|&c| image[c]).collect();
                    let mut u = linalg::mul_vec(f, op, &lifts[kk]);
                    for (bk, l) in beta.iter().zip(&lifts) {
                        u = linalg::sub_vec(f, &u, &l.iter().map(|x| f.mul(bk, x)).collect::<Vec<_>>());
                    }
                    let u = red(&u);
                    for coord in 0..d {
                        let mut row = vec![0; nvars + 1];
                        for l in 0..t {
                            row[kk * t + l] = f.add(&row[kk * t + l], &red_tc[l][coord]);
                            for (k2, bk) in beta.iter().enumerate() {
                                let x = f.mul(bk, &red_comp[l][coord]);
                                row[k2 * t + l] = f.sub(&row[k2 * t + l], &x);
                            }
                        }
                        row[nvars] = f.neg(&u[coord]);
                        if row.iter().any(|&x| x != 0) {
                            rows.push(row);
                        }
                    }
                }
            }
            let Some((part, ker)) = solve_affine(f, &rows, nvars) else {
                continue;
            };
            let solutions = (f.p as u128).checked_pow(ker.len() as u32).unwrap_or(u128::MAX);
            if solutions + found.len() as u128 > budget as u128 {
                return Err(too_many(budget));
            }
            for mut idx in 0..solutions as u64 {
                let mut phi = part.clone();
                for kv in &ker {
                    let c = idx % f.p;
                    idx /= f.p;
                    phi = phi.iter().zip(kv).map(|(x, y)| f.add(x, &f.mul(&c, y))).collect();
                }
                let mut rows = a.clone();
                for (kk, l) in lifts.iter().enumerate() {
                    let mut w = l.clone();
                    for (j, c) in comp.iter().enumerate() {
                        let coef = phi[kk * t + j];
                        w = w.iter().zip(c).map(|(x, y)| f.add(x, &f.mul(&coef, y))).collect();
                    }
                    rows.push(w);
                }
                found.insert(linalg::rref(f, &rows));
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Reference enumeration: cyclic submodules of every projective point, closed under sums.
pub fn invariant_subspaces_by_scan(f: &Fp, d: usize, ops: &[Matrix<u64>], budget: u64) -> Result<Vec<Basis>> {
    let points = projective_count(f.p, d);
    if points > budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "projective points to scan",
            budget,
        });
    }
    let mut cyclic: Vec<Basis> = (0..points as u64)
        .into_par_iter()
        .map(|i| cyclic_submodule(f, ops, projective_point(f.p, d, i)))
        .collect();
    cyclic.sort();
    cyclic.dedup();
    let mut found: BTreeSet<Basis> = BTreeSet::new();
    found.insert(Vec::new());
    let mut work: Vec<Basis> = vec![Vec::new()];
    while let Some(w) = work.pop() {
        for c in &cyclic {
            let joined = linalg::rref(f, &[w.clone(), c.clone()].concat());
            if !found.contains(&joined) {
                if found.len() as u64 >= budget {
                    return Err(too_many(budget));
                }
                found.insert(joined.clone());
                work.push(joined);
            }
        }
    }
    Ok(found.into_iter().collect())
}
