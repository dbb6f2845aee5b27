#![allow(dead_code)]

use num_bigint::BigInt;
use rand::Rng;
use rfgrowth::field::{int, rational, Rational};
use rfgrowth::lie_ring::LieRingDescription;

/// Free nilpotent Lie ring of class 4 on x, y, in the basis
/// x, y, [x,y], [x,[x,y]], [y,[x,y]], [x,[x,[x,y]]], [y,[x,[x,y]]], [y,[y,[x,y]]].
pub fn free_class4() -> LieRingDescription {
    let c = |i, j, k| (i, j, k, int(1));
    LieRingDescription::new(
        8,
        vec![c(0, 1, 2), c(0, 2, 3), c(1, 2, 4), c(0, 3, 5), c(1, 3, 6), c(0, 4, 6), c(1, 4, 7)],
        4,
        1,
    )
    .unwrap()
}

/// Strictly upper-triangular 5x5 matrices with basis E_ij (i < j) in lexicographic order.
pub fn upper5_pairs() -> Vec<(usize, usize)> {
    (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect()
}

pub fn upper5() -> LieRingDescription {
    let pairs = upper5_pairs();
    let idx = |p: (usize, usize)| pairs.iter().position(|&q| q == p).unwrap();
    let mut consts = Vec::new();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(k, l)) in pairs.iter().enumerate() {
            // [E_ij, E_kl] = δ_jk E_il − δ_li E_kj
            if a < b {
                if j == k {
                    consts.push((a, b, idx((i, l)), int(1)));
                }
                if l == i {
                    consts.push((a, b, idx((k, j)), int(-1)));
                }
            }
        }
    }
    LieRingDescription::new(10, consts, 4, 1).unwrap()
}

pub type Mat = Vec<Vec<Rational>>;

pub fn mat_from(v: &[Rational]) -> Mat {
    let mut m = vec![vec![int(0); 5]; 5];
    for (x, &(i, j)) in v.iter().zip(&upper5_pairs()) {
        m[i][j] = x.clone();
    }
    m
}

pub fn mat_to(m: &Mat) -> Vec<Rational> {
    upper5_pairs().iter().map(|&(i, j)| m[i][j].clone()).collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    (0..5)
        .map(|i| {
            (0..5)
                .map(|j| (0..5).fold(int(0), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn mat_add_scaled(acc: &mut Mat, m: &Mat, s: &Rational) {
    for i in 0..5 {
        for j in 0..5 {
            acc[i][j] += &m[i][j] * s;
        }
    }
}

fn identity5() -> Mat {
    (0..5).map(|i| (0..5).map(|j| int((i == j) as i64)).collect()).collect()
}

pub fn mat_exp(n: &Mat) -> Mat {
    let mut acc = identity5();
    let mut pw = identity5();
    let mut fact = 1i64;
    for k in 1..5 {
        pw = mat_mul(&pw, n);
        fact *= k;
        mat_add_scaled(&mut acc, &pw, &rational(1, fact));
    }
    acc
}

/// log of a unipotent 5x5 matrix.
pub fn mat_log(u: &Mat) -> Mat {
    let mut n = u.clone();
    for (i, row) in n.iter_mut().enumerate() {
        row[i] -= int(1);
    }
    let mut acc = vec![vec![int(0); 5]; 5];
    let mut pw = identity5();
    for k in 1..5i64 {
        pw = mat_mul(&pw, &n);
        let sign = if k % 2 == 1 { 1 } else { -1 };
        mat_add_scaled(&mut acc, &pw, &rational(sign, k));
    }
    acc
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(BigInt::from(rng.gen_range(-6i64..=6)), BigInt::from(rng.gen_range(1i64..=4)))
}

pub fn random_vector(rng: &mut impl Rng, dim: usize) -> Vec<Rational> {
    (0..dim).map(|_| random_rational(rng)).collect()
}

pub fn heisenberg_ring() -> LieRingDescription {
    LieRingDescription::new(3, vec![(0, 1, 2, int(1))], 2, 1).unwrap()
}
