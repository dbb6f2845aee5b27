use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{GroupElement, MGroupDescription};
use crate::error::{Error, Result};
use crate::lie_ring::localize;

pub const DEFAULT_BALL_BUDGET: u64 = 5_000_000;

/// B(r) stored as sorted spheres; spheres[i] holds the elements of word norm exactly i.
#[derive(Clone, Debug)]
pub struct BallReport {
    pub radius: usize,
    pub spheres: Vec<Vec<GroupElement>>,
    /// Largest |μ_i| over B(r) ∩ K, in reduced Z[1/Δ'] form.
    pub max_numerator: BigInt,
    pub max_delta_exponent: u32,
}

impl BallReport {
    pub fn size(&self) -> usize {
        self.spheres.iter().map(|s| s.len()).sum()
    }

    pub fn size_at(&self, r: usize) -> usize {
        self.spheres.iter().take(r + 1).map(|s| s.len()).sum()
    }

    pub fn elements(&self) -> impl Iterator<Item = &GroupElement> {
        self.spheres.iter().flatten()
    }

    /// Elements of norm ≤ r, in (norm, coordinate) order.
    pub fn elements_up_to(&self, r: usize) -> impl Iterator<Item = &GroupElement> {
        self.spheres.iter().take(r + 1).flatten()
    }

    pub fn norm(&self, g: &GroupElement) -> Option<usize> {
        self.spheres.iter().position(|s| s.binary_search(g).is_ok())
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.norm(g).is_some()
    }
}

/// Breadth-first enumeration of B(r) under left multiplication by S ∪ S⁻¹.
///
/// In a Cayley graph with symmetric generators the neighbours of sphere i lie in
/// spheres i-1, i, i+1, so only the last two spheres are needed for dedup.
pub fn ball(g: &MGroupDescription, r: usize, budget: u64) -> Result<BallReport> {
    let mut gens: Vec<GroupElement> = g.generators.clone();
    gens.extend(g.generators.iter().map(|s| g.inv(s)));
    let mut spheres: Vec<Vec<GroupElement>> = vec![vec![g.identity()]];
    let mut total = 1u64;
    for i in 0..r {
        let frontier = &spheres[i];
        let mut next: Vec<GroupElement> = frontier
            .par_iter()
            .flat_map_iter(|x| gens.iter().map(move |s| g.mul(s, x)))
            .collect();
        next.par_sort_unstable();
        next.dedup();
        let prev: Option<&Vec<GroupElement>> = if i > 0 { Some(&spheres[i - 1]) } else { None };
        next.retain(|x| frontier.binary_search(x).is_err() && prev.map_or(true, |p| p.binary_search(x).is_err()));
        total += next.len() as u64;
        if total > budget {
            return Err(Error::BudgetExceeded { what: "ball", budget });
        }
        spheres.push(next);
    }
    let ad = g.ambient_delta();
    let (max_numerator, max_delta_exponent) = spheres
        .par_iter()
        .flatten()
        .filter(|x| x.in_k())
        .map(|x| k_stats(&x.k, ad))
        .reduce(|| (BigInt::zero(), 0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Ok(BallReport {
        radius: r,
        spheres,
        max_numerator,
        max_delta_exponent,
    })
}

fn k_stats(k: &[crate::field::Rational], delta: u64) -> (BigInt, u32) {
    match localize(k, delta) {
        Some((mu, j)) => (mu.into_iter().map(|x| x.abs()).max().unwrap_or_default(), j),
        None => (BigInt::zero(), 0),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoeffStatsRow {
    pub r: usize,
    pub ball_size: usize,
    pub max_numerator: BigInt,
    pub max_delta_exponent: u32,
}

/// Per-radius maxima of reduced coefficients over B(r) ∩ K, from a single BFS.
pub fn coefficient_stats(g: &MGroupDescription, r_max: usize, budget: u64) -> Result<Vec<CoeffStatsRow>> {
    let b = ball(g, r_max, budget)?;
    let ad = g.ambient_delta();
    let mut rows = Vec::with_capacity(r_max + 1);
    let mut acc = (BigInt::zero(), 0u32);
    for (r, sphere) in b.spheres.iter().enumerate() {
        let s = sphere
            .par_iter()
            .filter(|x| x.in_k())
            .map(|x| k_stats(&x.k, ad))
            .reduce(|| (BigInt::zero(), 0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
        acc = (acc.0.max(s.0), acc.1.max(s.1));
        rows.push(CoeffStatsRow {
            r,
            ball_size: b.size_at(r),
            max_numerator: acc.0.clone(),
            max_delta_exponent: acc.1,
        });
    }
    Ok(rows)
}

/// Independent check for tests: sequential BFS with a hash set.
#[allow(dead_code)]
pub(crate) fn ball_sequential(g: &MGroupDescription, r: usize) -> HashSet<GroupElement> {
    let mut gens: Vec<GroupElement> = g.generators.clone();
    gens.extend(g.generators.iter().map(|s| g.inv(s)));
    let mut seen: HashSet<GroupElement> = HashSet::from([g.identity()]);
    let mut layer = vec![g.identity()];
    for _ in 0..r {
        let mut next = Vec::new();
        for x in &layer {
            for s in &gens {
                let y = g.mul(x, s);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        layer = next;
    }
    seen
}
