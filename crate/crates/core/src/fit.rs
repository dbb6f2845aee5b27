//! Least-squares growth fits in transformed coordinates.
//!
//! ln y is regressed on ln r (polynomial r^α), ln ln r (polylog log^β r) or r
//! (exponential C^r, slope ln C). Only points with r >= 3 are used.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mgroup::DeclaredBound;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Polynomial,
    Polylog,
    Exponential,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Polynomial => "polynomial",
            Model::Polylog => "polylog",
            Model::Exponential => "exponential",
        }
    }

    fn transform(self, r: f64) -> f64 {
        match self {
            Model::Polynomial => r.ln(),
            Model::Polylog => r.ln().ln(),
            Model::Exponential => r,
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "polynomial" => Ok(Model::Polynomial),
            "polylog" => Ok(Model::Polylog),
            "exponential" => Ok(Model::Exponential),
            _ => Err(Error::Precondition(format!("unknown growth model {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    ViolatesUpper,
    Inconclusive,
}

/// Slack allowed above the declared exponent before a fit counts as a violation.
pub const VERDICT_TOLERANCE: f64 = 0.5;

#[derive(Clone, Debug, Serialize)]
pub struct GrowthFitReport {
    pub model: Model,
    pub exponent: f64,
    pub intercept: f64,
    /// Root mean square residual in the transformed coordinates.
    pub residual: f64,
    /// e^exponent; the growth base for the exponential model.
    pub base: f64,
    pub points: usize,
    pub verdict: Verdict,
}

pub const MIN_POINTS: usize = 4;

pub fn fit_exponent(data: &[(f64, f64)], model: Model, declared: Option<&DeclaredBound>) -> Result<GrowthFitReport> {
    let pts: Vec<(f64, f64)> = data
        .iter()
        .filter(|(r, y)| *r >= 3.0 && *y > 0.0)
        .map(|&(r, y)| (model.transform(r), y.ln()))
        .collect();
    if pts.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_POINTS,
            got: pts.len(),
        });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    let verdict = match declared {
        Some(d) if d.model == model.name() => {
            if slope <= d.exponent + VERDICT_TOLERANCE {
                Verdict::Consistent
            } else {
                Verdict::ViolatesUpper
            }
        }
        _ => Verdict::Inconclusive,
    };
    Ok(GrowthFitReport {
        model,
        exponent: slope,
        intercept,
        residual,
        base: slope.exp(),
        points: pts.len(),
        verdict,
    })
}
