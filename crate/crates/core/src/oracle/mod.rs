//! Exact divisibility D_G(g) = min{[G : N] : N ◁ G, g ∉ N} for families whose
//! finite-index normal subgroups are completely classified, and the RF curves
//! built from it.

pub mod baumslag;
pub mod finite;
pub mod lattice;
pub mod metabelian;
pub mod nilpotent;
pub mod product;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mgroup::{ball, BallReport, GroupElement, MGroupDescription};
use crate::ntheory::lcm_upto_big;
use crate::separator::{upper_bound_curve_on, Separator};

use baumslag::{BsCertificate, BsOracle};
use metabelian::{MetabelianOracle, NormalSubgroupCertificate};
use nilpotent::{NilpotentCertificate, NilpotentOracle};
use product::Block;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NormalWitness {
    BaumslagSolitar(BsCertificate),
    Metabelian(NormalSubgroupCertificate),
    Nilpotent(NilpotentCertificate),
    Product { block: usize, inner: Box<NormalWitness> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Divisibility {
    Exact { value: u64, witness: NormalWitness },
    /// Every normal subgroup of index ≤ bound contains g.
    Exceeds { bound: u64 },
}

impl Divisibility {
    pub fn value(&self) -> Option<u64> {
        match self {
            Divisibility::Exact { value, .. } => Some(*value),
            Divisibility::Exceeds { .. } => None,
        }
    }

    /// The exact value, or bound + 1 when only a lower bound is known.
    pub fn lower_bound(&self) -> u64 {
        match self {
            Divisibility::Exact { value, .. } => *value,
            Divisibility::Exceeds { bound } => bound + 1,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Divisibility::Exact { .. })
    }
}

#[derive(Debug)]
pub enum Oracle {
    BaumslagSolitar(BsOracle),
    Metabelian(MetabelianOracle),
    Nilpotent(NilpotentOracle),
    Product(Vec<(Block, Oracle)>),
}

fn has_standard_generators(g: &MGroupDescription) -> Result<bool> {
    let std = MGroupDescription::new("", g.lie.clone(), g.actions.clone(), g.finite.clone(), None)?;
    Ok(std.generators.iter().all(|s| g.generators.contains(s)))
}

impl Oracle {
    /// Picks the family: direct products first, then BS(1,n), Z^m ⋊ Z, and nilpotent class ≤ 2.
    pub fn for_group(g: &MGroupDescription, bound: u64) -> Result<Oracle> {
        if bound < 2 {
            return Err(Error::Precondition("oracle bound must be at least 2".into()));
        }
        if g.finite.is_some() {
            return Err(Error::UnsupportedFamily("groups with a finite part".into()));
        }
        let blocks = product::decompose(g)?;
        if blocks.len() > 1 {
            if !has_standard_generators(g)? {
                return Err(Error::UnsupportedFamily(
                    "product decomposition needs the standard generators".into(),
                ));
            }
            let parts = blocks
                .into_iter()
                .map(|b| {
                    let o = Self::single(&b.group, bound)?;
                    Ok((b, o))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(Oracle::Product(parts));
        }
        Self::single(g, bound)
    }

    fn single(g: &MGroupDescription, bound: u64) -> Result<Oracle> {
        if g.rank_h() == 0 {
            return Ok(Oracle::Nilpotent(NilpotentOracle::new(g, bound)?));
        }
        if !has_standard_generators(g)? {
            return Err(Error::UnsupportedFamily("metabelian oracles need the standard generators".into()));
        }
        if BsOracle::applies(g) {
            return Ok(Oracle::BaumslagSolitar(BsOracle::new(g, bound)?));
        }
        if MetabelianOracle::applies(g) {
            return Ok(Oracle::Metabelian(MetabelianOracle::new(g, bound)?));
        }
        Err(Error::UnsupportedFamily(format!("no exact oracle for {}", g.name)))
    }

    pub fn family(&self) -> &'static str {
        match self {
            Oracle::BaumslagSolitar(_) => "baumslag_solitar",
            Oracle::Metabelian(_) => "metabelian",
            Oracle::Nilpotent(_) => "nilpotent",
            Oracle::Product(_) => "product",
        }
    }

    pub fn bound(&self) -> u64 {
        match self {
            Oracle::BaumslagSolitar(o) => o.bound,
            Oracle::Metabelian(o) => o.bound,
            Oracle::Nilpotent(o) => o.bound,
            Oracle::Product(parts) => parts[0].1.bound(),
        }
    }

    pub fn divisibility(&self, x: &GroupElement) -> Result<Divisibility> {
        if x.is_identity() {
            return Err(Error::Identity);
        }
        let bound = self.bound();
        let exceeds = Divisibility::Exceeds { bound };
        Ok(match self {
            Oracle::BaumslagSolitar(o) => o.divisibility(x)?.map_or(exceeds, |c| Divisibility::Exact {
                value: c.index,
                witness: NormalWitness::BaumslagSolitar(c.clone()),
            }),
            Oracle::Metabelian(o) => o.divisibility(x)?.map_or(exceeds, |c| Divisibility::Exact {
                value: c.index,
                witness: NormalWitness::Metabelian(c.clone()),
            }),
            Oracle::Nilpotent(o) => o.divisibility(x)?.map_or(exceeds, |c| Divisibility::Exact {
                value: c.index,
                witness: NormalWitness::Nilpotent(c),
            }),
            Oracle::Product(parts) => {
                let mut best = exceeds;
                for (i, (block, o)) in parts.iter().enumerate() {
                    let y = block.project(x);
                    if y.is_identity() {
                        continue;
                    }
                    if let Divisibility::Exact { value, witness } = o.divisibility(&y)? {
                        if best.value().map_or(true, |b| value < b) {
                            best = Divisibility::Exact {
                                value,
                                witness: NormalWitness::Product {
                                    block: i,
                                    inner: Box::new(witness),
                                },
                            };
                        }
                    }
                }
                best
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Exact,
    LowerBound,
}

impl std::fmt::Display for BoundStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundStatus::Exact => "exact",
            BoundStatus::LowerBound => "lower_bound",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RfRow {
    pub r: usize,
    /// Exact RF(r), or bound + 1 when some D in B(r) exceeded the bound.
    pub rf_exact: u64,
    pub status: BoundStatus,
    pub rf_upper: Option<u128>,
    pub witness: GroupElement,
    pub witness_norm: usize,
}

/// RF(r) = max{D(g) : e ≠ g ∈ B(r)} for r = 1..=r_max, with the separator curve alongside.
pub fn rf_curve_on(b: &BallReport, oracle: &Oracle, sep: Option<&Separator>) -> Result<Vec<RfRow>> {
    let upper = match sep {
        Some(s) => Some(upper_bound_curve_on(s, b)?),
        None => None,
    };
    let mut rows = Vec::new();
    let mut best: Option<(u64, GroupElement, usize)> = None;
    let mut exceeded = false;
    for (r, sphere) in b.spheres.iter().enumerate().skip(1) {
        let ds: Vec<Divisibility> = sphere.par_iter().map(|x| oracle.divisibility(x)).collect::<Result<_>>()?;
        for (x, d) in sphere.iter().zip(&ds) {
            exceeded |= !d.is_exact();
            if best.as_ref().map_or(true, |b| d.lower_bound() > b.0) {
                best = Some((d.lower_bound(), x.clone(), r));
            }
        }
        let (v, w, norm) = best.clone().expect("B(1) has a nontrivial element");
        rows.push(RfRow {
            r,
            rf_exact: v,
            status: if exceeded { BoundStatus::LowerBound } else { BoundStatus::Exact },
            rf_upper: upper.as_ref().map(|u| u[r - 1].rf_upper),
            witness: w,
            witness_norm: norm,
        });
    }
    Ok(rows)
}

pub fn rf_curve(
    g: &MGroupDescription,
    oracle: &Oracle,
    sep: Option<&Separator>,
    r_max: usize,
    ball_budget: u64,
) -> Result<Vec<RfRow>> {
    rf_curve_on(&ball(g, r_max, ball_budget)?, oracle, sep)
}

#[derive(Clone, Debug)]
pub struct WitnessRow {
    pub r: u64,
    pub lcm: BigInt,
    pub divisibility: Divisibility,
}

/// r ↦ D(g^{lcm(1..r)}) for g in K.
pub fn witness_curve(g: &MGroupDescription, oracle: &Oracle, x: &GroupElement, r_max: u64) -> Result<Vec<WitnessRow>> {
    (1..=r_max)
        .into_par_iter()
        .map(|r| {
            let w = g.lcm_witness(x, r)?;
            Ok(WitnessRow {
                r,
                lcm: lcm_upto_big(r),
                divisibility: oracle.divisibility(&w)?,
            })
        })
        .collect()
}
