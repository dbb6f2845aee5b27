//! Splitting G into a direct product along coordinate blocks.
//!
//! Coordinates interact when they share a structure constant, an off-diagonal
//! action entry, or the support of one ξ_j. Connected components give
//! G = G_1 × ... × G_t, each h_j going to the block its ξ_j moves (or to the first
//! block when ξ_j = I). For g = (g_1, ..., g_t) every normal N missing g has
//! N ∩ G_i missing some g_i with [G_i : N ∩ G_i] ≤ [G : N], so
//! D_G(g) = min over g_i ≠ e of D_{G_i}(g_i).

use crate::error::{Error, Result};
use crate::field::Rational;
use crate::lie_ring::LieRingDescription;
use crate::linalg::Matrix;
use crate::mgroup::{GroupElement, MGroupDescription};

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub coords: Vec<usize>,
    pub hs: Vec<usize>,
    pub group: MGroupDescription,
}

impl Block {
    pub fn project(&self, g: &GroupElement) -> GroupElement {
        GroupElement {
            k: self.coords.iter().map(|&i| g.k[i].clone()).collect(),
            h: self.hs.iter().map(|&j| g.h[j]).collect(),
            f: 0,
        }
    }
}

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    parent[i] = r;
    r
}

fn union(parent: &mut [usize], a: usize, b: usize) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        parent[ra.max(rb)] = ra.min(rb);
    }
}

/// Blocks of the finest direct decomposition visible in the coordinates; one block if none.
pub fn decompose(g: &MGroupDescription) -> Result<Vec<Block>> {
    if g.finite.is_some() {
        return Err(Error::UnsupportedFamily("finite parts are not decomposed".into()));
    }
    let m = g.dim_k();
    let mut parent: Vec<usize> = (0..m).collect();
    for (i, j, k, _) in g.lie.structure() {
        union(&mut parent, *i, *j);
        union(&mut parent, *i, *k);
    }
    let mut supports = Vec::new();
    for a in &g.actions {
        let moved: Vec<usize> = (0..m)
            .filter(|&i| (0..m).any(|j| *a.get(i, j) != Rational::from_integer(((i == j) as i64).into())))
            .collect();
        for i in 0..m {
            for j in 0..m {
                if i != j && *a.get(i, j) != Rational::from_integer(0.into()) {
                    union(&mut parent, i, j);
                }
            }
        }
        for w in moved.windows(2) {
            union(&mut parent, w[0], w[1]);
        }
        supports.push(moved);
    }
    let mut roots: Vec<usize> = (0..m).map(|i| find(&mut parent, i)).collect();
    roots.sort();
    roots.dedup();
    let mut blocks = Vec::new();
    for (b, &root) in roots.iter().enumerate() {
        let coords: Vec<usize> = (0..m).filter(|&i| find(&mut parent, i) == root).collect();
        let hs: Vec<usize> = (0..g.rank_h())
            .filter(|&j| match supports[j].first() {
                Some(&i) => find(&mut parent, i) == root,
                None => b == 0,
            })
            .collect();
        let pos = |i: usize| coords.iter().position(|&c| c == i).unwrap();
        let constants: Vec<(usize, usize, usize, Rational)> = g
            .lie
            .structure()
            .iter()
            .filter(|e| coords.contains(&e.0))
            .map(|(i, j, k, c)| (pos(*i), pos(*j), pos(*k), c.clone()))
            .collect();
        let probe = LieRingDescription::new(coords.len(), constants.clone(), g.lie.class(), g.lie.delta())?;
        let class = probe.lower_central_series().iter().filter(|t| !t.is_empty()).count().max(1);
        let lie = LieRingDescription::new(coords.len(), constants, class, g.lie.delta())?;
        let actions = hs
            .iter()
            .map(|&j| {
                Matrix::from_rows(
                    coords
                        .iter()
                        .map(|&r| coords.iter().map(|&c| g.actions[j].get(r, c).clone()).collect())
                        .collect(),
                )
            })
            .collect();
        let group = MGroupDescription::new(format!("{}[{}]", g.name, b), lie, actions, None, None)?;
        blocks.push(Block { coords, hs, group });
    }
    Ok(blocks)
}
