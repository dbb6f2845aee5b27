//! Experiment runner behind the `rfg` command line: CSV tables plus a manifest.

use std::path::PathBuf;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::fit::{fit_exponent, Model};
use crate::groupfile::{load_group, parse_element, GroupFile, CATALOG};
use crate::lie_ring::order_analysis;
use crate::mgroup::{ball, coefficient_stats, BallReport, GroupElement, MGroupDescription, DEFAULT_BALL_BUDGET};
use crate::oracle::{rf_curve_on, witness_curve, BoundStatus, Oracle};
use crate::separator::{
    action_splits, prime_floor, reduce_group, upper_bound_curve_on, PrimeMode, Separator, SeparatorConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Ball,
    RfCurve,
    UpperCurve,
    WitnessCurve,
    Delta,
    Separate,
    CoeffStats,
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ball => "ball",
            Command::RfCurve => "rf-curve",
            Command::UpperCurve => "upper-curve",
            Command::WitnessCurve => "witness-curve",
            Command::Delta => "delta",
            Command::Separate => "separate",
            Command::CoeffStats => "coeff-stats",
            Command::Suite => "suite",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    /// Path to a group file, or a catalog name.
    pub group: String,
    pub command: Command,
    pub r_max: usize,
    pub bound: u64,
    pub mode: PrimeMode,
    pub primes: usize,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub seed: u64,
    pub element: Option<String>,
}

impl ExperimentConfig {
    pub fn new(group: impl Into<String>, command: Command) -> Self {
        ExperimentConfig {
            group: group.into(),
            command,
            r_max: 6,
            bound: 200,
            mode: PrimeMode::Paper,
            primes: 10,
            out: None,
            threads: 1,
            seed: 0,
            element: None,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.r_max < 1 {
            return Err(Error::Precondition("r_max must be at least 1".into()));
        }
        if self.bound < 2 {
            return Err(Error::Precondition("bound must be at least 2".into()));
        }
        if self.threads < 1 {
            return Err(Error::Precondition("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub manifest: Value,
    pub verified: bool,
}

/// What one command produced before it is wrapped into a manifest.
struct Outcome {
    artifacts: Vec<Artifact>,
    extra: Map<String, Value>,
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            artifacts: Vec::new(),
            extra: Map::new(),
            failures: Vec::new(),
        }
    }
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub const BALL_HEADER: [&str; 3] = ["r", "ball_size", "sphere_size"];
pub const RF_HEADER: [&str; 6] = ["r", "rf_exact", "rf_upper", "witness_norm", "witness_coords", "bound_status"];
pub const UPPER_HEADER: [&str; 7] = ["r", "rf_upper", "prime", "codim", "exponent", "witness_norm", "witness_coords"];
pub const WITNESS_HEADER: [&str; 4] = ["r", "lcm", "divisibility", "bound_status"];
pub const DELTA_HEADER: [&str; 4] = ["p", "delta_p", "split_ok", "order_checks"];
pub const COEFF_HEADER: [&str; 4] = ["r", "ball_size", "max_numerator", "max_delta_exponent"];

fn fit_json(points: &[(f64, f64)], model: Model, g: &MGroupDescription) -> Value {
    match fit_exponent(points, model, g.declared_bound.as_ref()) {
        Ok(rep) => serde_json::to_value(rep).unwrap(),
        Err(e) => json!({ "error": e.to_string(), "kind": e.kind() }),
    }
}

fn declared_model(g: &MGroupDescription) -> Model {
    g.declared_bound
        .as_ref()
        .and_then(|d| d.model.parse().ok())
        .unwrap_or(Model::Polynomial)
}

fn separator(g: &MGroupDescription, cfg: &ExperimentConfig) -> Separator {
    Separator::new(
        g,
        SeparatorConfig {
            mode: cfg.mode,
            ..SeparatorConfig::default()
        },
    )
}

/// φ(xy) = φ(x)φ(y) on seeded random pairs from the ball, for the given quotients.
fn sampled_hom_checks(
    g: &MGroupDescription,
    quotients: &[&crate::separator::SeparatingQuotient],
    b: &BallReport,
    seed: u64,
    out: &mut Outcome,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let els: Vec<&GroupElement> = b.elements().collect();
    let mut checked = 0;
    for q in quotients {
        for _ in 0..20 {
            let x = els.choose(&mut rng).unwrap();
            let y = els.choose(&mut rng).unwrap();
            let lhs = q.evaluate(&g.multiply(x, y)?)?;
            if lhs != q.multiply(&q.evaluate(x)?, &q.evaluate(y)?) {
                out.failures.push(format!("sampled hom check failed for quotient of order {}", q.order));
            }
            checked += 1;
        }
    }
    out.extra.insert("sampled_hom_checks".into(), json!(checked));
    Ok(())
}

fn run_ball(g: &MGroupDescription, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let b = ball(g, cfg.r_max, DEFAULT_BALL_BUDGET)?;
    let rows: Vec<Vec<String>> = (0..=cfg.r_max)
        .map(|r| vec![r.to_string(), b.size_at(r).to_string(), b.spheres[r].len().to_string()])
        .collect();
    out.artifacts.push(Artifact {
        name: "ball.csv".into(),
        contents: csv_table(&BALL_HEADER, &rows)?,
    });
    Ok(())
}

fn run_coeff_stats(g: &MGroupDescription, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let rows = coefficient_stats(g, cfg.r_max, DEFAULT_BALL_BUDGET)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.r.to_string(),
                r.ball_size.to_string(),
                r.max_numerator.to_string(),
                r.max_delta_exponent.to_string(),
            ]
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.r as f64, r.max_numerator.to_string().parse::<f64>().unwrap_or(f64::MAX)))
        .collect();
    let model = if g.rank_h() == 0 { Model::Polynomial } else { Model::Exponential };
    out.extra.insert("fit_max_numerator".into(), fit_json(&pts, model, g));
    out.artifacts.push(Artifact {
        name: "coeff-stats.csv".into(),
        contents: csv_table(&COEFF_HEADER, &table)?,
    });
    Ok(())
}

fn run_upper(g: &MGroupDescription, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let b = ball(g, cfg.r_max, DEFAULT_BALL_BUDGET)?;
    let sep = separator(g, cfg);
    let rows = upper_bound_curve_on(&sep, &b)?;
    let fin = g.finite.is_some();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.r.to_string(),
                r.rf_upper.to_string(),
                r.quotient.prime.map_or(String::new(), |p| p.to_string()),
                r.quotient.codim().to_string(),
                r.quotient.exponent.to_string(),
                r.witness_norm.to_string(),
                r.witness.coords(fin),
            ]
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.r as f64, r.rf_upper as f64)).collect();
    out.extra.insert("fit".into(), fit_json(&pts, declared_model(g), g));
    let qs: Vec<&_> = rows.iter().map(|r| &r.quotient).collect();
    sampled_hom_checks(g, &qs, &b, cfg.seed, out)?;
    for r in &rows {
        for a in &r.quotient.order_checks {
            if !a.lemma_holds() {
                out.failures.push(format!("order check {} failed at p = {}", a.describe(), a.prime));
            }
        }
    }
    out.extra.insert(
        "certificates".into(),
        Value::Array(rows.iter().map(|r| r.quotient.certificate_json()).collect()),
    );
    out.artifacts.push(Artifact {
        name: "upper-curve.csv".into(),
        contents: csv_table(&UPPER_HEADER, &table)?,
    });
    Ok(())
}

fn run_rf(g: &MGroupDescription, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let oracle = Oracle::for_group(g, cfg.bound)?;
    let b = ball(g, cfg.r_max, DEFAULT_BALL_BUDGET)?;
    let sep = separator(g, cfg);
    let rows = rf_curve_on(&b, &oracle, Some(&sep))?;
    let fin = g.finite.is_some();
    let mut table = Vec::new();
    for r in &rows {
        let upper = r.rf_upper.expect("separator curve requested");
        if r.status == BoundStatus::Exact && r.rf_exact as u128 > upper {
            out.failures.push(format!("rf_exact {} > rf_upper {} at r = {}", r.rf_exact, upper, r.r));
        }
        table.push(vec![
            r.r.to_string(),
            r.rf_exact.to_string(),
            upper.to_string(),
            r.witness_norm.to_string(),
            r.witness.coords(fin),
            r.status.to_string(),
        ]);
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.r as f64, r.rf_exact as f64)).collect();
    out.extra.insert("oracle_family".into(), json!(oracle.family()));
    out.extra.insert("fit".into(), fit_json(&pts, declared_model(g), g));
    out.artifacts.push(Artifact {
        name: "rf-curve.csv".into(),
        contents: csv_table(&RF_HEADER, &table)?,
    });
    Ok(())
}

fn chosen_element(g: &MGroupDescription, cfg: &ExperimentConfig) -> Result<Option<GroupElement>> {
    cfg.element.as_deref().map(|s| parse_element(g, s)).transpose()
}

fn run_witness(g: &MGroupDescription, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let oracle = Oracle::for_group(g, cfg.bound)?;
    let x = match chosen_element(g, cfg)? {
        Some(x) => x,
        None => g
            .generators
            .iter()
            .find(|s| s.in_k() && !s.is_identity())
            .cloned()
            .unwrap_or_else(|| g.k_element(g.lie.basis_vector(0))),
    };
    let rows = witness_curve(g, &oracle, &x, cfg.r_max as u64)?;
    let mut table = Vec::new();
    for r in &rows {
        if r.divisibility.lower_bound() < r.r {
            out.failures.push(format!("D(g^lcm(1..{})) = {} < r", r.r, r.divisibility.lower_bound()));
        }
        table.push(vec![
            r.r.to_string(),
            r.lcm.to_string(),
            r.divisibility.lower_bound().to_string(),
            if r.divisibility.is_exact() { "exact" } else { "lower_bound" }.to_string(),
        ]);
    }
    out.extra.insert("element".into(), json!(x.coords(g.finite.is_some())));
    out.artifacts.push(Artifact {
        name: "witness-curve.csv".into(),
        contents: csv_table(&WITNESS_HEADER, &table)?,
    });
    Ok(())
}

fn run_delta(g: &MGroupDescription, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let budget = SeparatorConfig::default();
    let mut p = prime_floor(g);
    let mut reports = Vec::new();
    let mut table = Vec::new();
    while reports.len() < cfg.primes {
        p += 1;
        if p > budget.ceiling {
            return Err(Error::NoCandidatePrime(budget.ceiling));
        }
        let Some(ring) = reduce_group(g, p, cfg.mode) else {
            continue;
        };
        let rep = ring.delta(budget.ideal_budget)?;
        let split_ok = (0..g.rank_h()).all(|j| action_splits(g, &ring, j));
        let mut checks = Vec::new();
        for j in 0..g.rank_h() {
            let a = order_analysis(&ring.actions[j], p, budget.order_budget)?;
            if !a.lemma_holds() {
                out.failures.push(format!("order of xi_{} mod {p} violates the divisibility lemma", j + 1));
            }
            checks.push(a.describe());
        }
        table.push(vec![p.to_string(), rep.delta_p.to_string(), split_ok.to_string(), checks.join(" ")]);
        reports.push(rep);
    }
    let unstable = crate::lie_ring::DeltaReport::stabilize(&mut reports);
    out.extra.insert("stable_min".into(), json!(reports.first().and_then(|r| r.stable_min)));
    out.extra.insert("delta_unstable_across_sample".into(), json!(unstable));
    out.artifacts.push(Artifact {
        name: "delta.csv".into(),
        contents: csv_table(&DELTA_HEADER, &table)?,
    });
    Ok(())
}

fn run_separate(g: &MGroupDescription, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let x = chosen_element(g, cfg)?.ok_or_else(|| Error::Precondition("separate needs --element".into()))?;
    let sep = separator(g, cfg);
    let q = sep.separate(&x)?;
    let mut cert = q.certificate_json();
    if let Ok(oracle) = Oracle::for_group(g, cfg.bound) {
        let d = oracle.divisibility(&x)?;
        if (q.order as u128) < d.lower_bound() as u128 {
            out.failures.push(format!("|Q| = {} is below D(g) = {}", q.order, d.lower_bound()));
        }
        out.extra.insert("oracle_divisibility".into(), json!(d.lower_bound()));
        out.extra.insert("oracle_exact".into(), json!(d.is_exact()));
    }
    cert["element"] = json!(x.coords(g.finite.is_some()));
    out.artifacts.push(Artifact {
        name: "separate.json".into(),
        contents: serde_json::to_string_pretty(&cert).unwrap() + "\n",
    });
    Ok(())
}

fn run_suite(cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    let mut groups = Map::new();
    for (name, _) in CATALOG {
        let g = crate::groupfile::catalog(name)?;
        let mut commands = vec![Command::Ball, Command::CoeffStats, Command::UpperCurve, Command::Delta];
        if Oracle::for_group(&g, cfg.bound).is_ok() {
            commands.push(Command::RfCurve);
            if g.rank_h() > 0 {
                commands.push(Command::WitnessCurve);
            }
        }
        let mut summary = Map::new();
        for c in commands {
            let sub = ExperimentConfig {
                group: name.to_string(),
                command: c,
                primes: cfg.primes.min(3),
                out: None,
                element: None,
                ..cfg.clone()
            };
            let mut o = Outcome::new();
            dispatch(&g, &sub, &mut o)?;
            for a in o.artifacts {
                out.artifacts.push(Artifact {
                    name: format!("{name}_{}", a.name),
                    contents: a.contents,
                });
            }
            out.failures.extend(o.failures.into_iter().map(|f| format!("{name}: {f}")));
            summary.insert(c.name().into(), Value::Object(o.extra));
        }
        groups.insert(name.into(), Value::Object(summary));
    }
    out.extra.insert("groups".into(), Value::Object(groups));
    Ok(())
}

fn dispatch(g: &MGroupDescription, cfg: &ExperimentConfig, out: &mut Outcome) -> Result<()> {
    match cfg.command {
        Command::Ball => run_ball(g, cfg, out),
        Command::CoeffStats => run_coeff_stats(g, cfg, out),
        Command::UpperCurve => run_upper(g, cfg, out),
        Command::RfCurve => run_rf(g, cfg, out),
        Command::WitnessCurve => run_witness(g, cfg, out),
        Command::Delta => run_delta(g, cfg, out),
        Command::Separate => run_separate(g, cfg, out),
        Command::Suite => run_suite(cfg, out),
    }
}

/// Runs one command on a dedicated thread pool and writes artifacts when `out` is set.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    cfg.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let start = Instant::now();
    let (group_json, outcome) = pool.install(|| -> Result<(Value, Outcome)> {
        let mut out = Outcome::new();
        if cfg.command == Command::Suite {
            run_suite(cfg, &mut out)?;
            return Ok((Value::Null, out));
        }
        let g = load_group(&cfg.group)?;
        dispatch(&g, cfg, &mut out)?;
        Ok((serde_json::to_value(GroupFile::from_description(&g, false)).unwrap(), out))
    })?;
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    let verified = outcome.failures.is_empty();
    let mut manifest = json!({
        "tool": "rfg",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "group": group_json,
        "artifacts": outcome.artifacts.iter().map(|a| a.name.clone()).collect::<Vec<_>>(),
        "verified": verified,
        "failures": outcome.failures,
        "timings_ms": { "total": elapsed },
    });
    for (k, v) in outcome.extra {
        manifest[k] = v;
    }
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        for a in &outcome.artifacts {
            let path = dir.join(&a.name);
            std::fs::write(&path, &a.contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        }
        let path = dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap() + "\n")
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(RunOutput {
        artifacts: outcome.artifacts,
        manifest,
        verified,
    })
}

/// Fits column `column` of a CSV table against its `r` column.
pub fn fit_csv(contents: &str, column: &str, model: Model, g: Option<&MGroupDescription>) -> Result<crate::fit::GrowthFitReport> {
    let mut rd = csv::Reader::from_reader(contents.as_bytes());
    let headers = rd.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("no column {name}")))
    };
    let (ri, yi) = (find("r")?, find(column)?);
    let mut pts = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::Schema(e.to_string()))?;
        let parse = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| Error::Schema(format!("not a number: {}", &rec[i])))
        };
        pts.push((parse(ri)?, parse(yi)?));
    }
    fit_exponent(&pts, model, g.and_then(|g| g.declared_bound.as_ref()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_csv() {
        let mut cfg = ExperimentConfig::new("bs12", Command::Ball);
        cfg.r_max = 2;
        let out = run(&cfg).unwrap();
        assert_eq!(out.artifacts[0].contents, "r,ball_size,sphere_size\n0,1,1\n1,5,4\n2,17,12\n");
        assert!(out.verified);
    }

    #[test]
    fn rf_curve_first_row() {
        let mut cfg = ExperimentConfig::new("bs12", Command::RfCurve);
        cfg.r_max = 4;
        let out = run(&cfg).unwrap();
        let csv = &out.artifacts[0].contents;
        assert!(csv.starts_with("r,rf_exact,rf_upper,witness_norm,witness_coords,bound_status\n1,6,"));
        assert!(out.verified);
    }

    #[test]
    fn fit_from_csv() {
        let csv: String = std::iter::once("r,y\n".to_string())
            .chain((1..=10).map(|r| format!("{r},{}\n", r * r)))
            .collect();
        let rep = fit_csv(&csv, "y", Model::Polynomial, None).unwrap();
        assert!((rep.exponent - 2.0).abs() < 1e-9);
        assert!(matches!(fit_csv(&csv, "z", Model::Polynomial, None), Err(Error::Schema(_))));
    }

    #[test]
    fn bad_config() {
        let mut cfg = ExperimentConfig::new("bs12", Command::Ball);
        cfg.bound = 1;
        assert!(matches!(run(&cfg), Err(Error::Precondition(_))));
        let cfg = ExperimentConfig::new("no_such_group", Command::Ball);
        assert!(matches!(run(&cfg), Err(Error::Io(_))));
    }
}
