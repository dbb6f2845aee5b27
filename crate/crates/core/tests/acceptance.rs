//! Acceptance criteria. Each prints one PASS/FAIL line; the test fails if any criterion fails.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rfgrowth::experiments::{run, Command, ExperimentConfig};
use rfgrowth::field::{int, Rational};
use rfgrowth::fit::{fit_exponent, Model};
use rfgrowth::groupfile::{catalog, CATALOG};
use rfgrowth::lie_ring::{order_analysis, LieRingDescription};
use rfgrowth::mgroup::{ball, coefficient_stats, MGroupDescription, DEFAULT_BALL_BUDGET};
use rfgrowth::ntheory::is_prime;
use rfgrowth::oracle::{rf_curve_on, witness_curve, Oracle};
use rfgrowth::separator::{
    action_splits, coordinate_form, reduce_group, upper_bound_curve_on, PrimeMode, Separator, SeparatorConfig,
};

struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn record(&mut self, id: usize, name: &str, failures: &[String], detail: String) {
        let ok = failures.is_empty();
        let mut line = format!("{} [{id}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        for f in failures.iter().take(5) {
            line.push_str(&format!("\n      {f}"));
        }
        let _ = writeln!(std::io::stderr(), "{line}");
        self.lines.push((ok, line));
    }
}

fn sep(g: &MGroupDescription, mode: PrimeMode) -> Separator {
    Separator::new(
        g,
        SeparatorConfig {
            mode,
            ..SeparatorConfig::default()
        },
    )
}

fn criterion_bch(rep: &mut Report) {
    let start = Instant::now();
    let mut fails = Vec::new();
    let rings: [(&str, LieRingDescription); 3] = [
        ("abelian Z^2", LieRingDescription::abelian(2)),
        ("heisenberg", common::heisenberg_ring()),
        ("free class 4", common::free_class4()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, l) in &rings {
        let d = l.dim();
        for _ in 0..1000 {
            let x = common::random_vector(&mut rng, d);
            let y = common::random_vector(&mut rng, d);
            let z = common::random_vector(&mut rng, d);
            let xy = l.bch_multiply(&x, &y).unwrap();
            let yz = l.bch_multiply(&y, &z).unwrap();
            if l.bch_multiply(&xy, &z).unwrap() != l.bch_multiply(&x, &yz).unwrap() {
                fails.push(format!("{name}: associativity fails at {x:?} {y:?} {z:?}"));
            }
            let neg: Vec<Rational> = x.iter().map(|v| -v).collect();
            if l.bch_multiply(&x, &neg).unwrap() != l.zero() {
                fails.push(format!("{name}: inverse fails at {x:?}"));
            }
            let cube = l.bch_multiply(&l.bch_multiply(&x, &x).unwrap(), &x).unwrap();
            if cube != l.bch_power(&x, &int(3)).unwrap() {
                fails.push(format!("{name}: power fails at {x:?}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        fails.push(format!("took {elapsed:?}"));
    }
    rep.record(1, "BCH group law", &fails, format!("3000 triples in {:.2}s", elapsed.as_secs_f64()));
}

fn criterion_delta(rep: &mut Report) {
    let mut fails = Vec::new();
    let fib = catalog("z2_fibonacci").unwrap();
    let mut split = Vec::new();
    let mut nonsplit = Vec::new();
    for p in (3..200u64).filter(|&p| is_prime(p)) {
        let Some(ring) = reduce_group(&fib, p, PrimeMode::BestEffort) else {
            continue;
        };
        let d = ring.delta(2_000_000).unwrap().delta_p;
        if reduce_group(&fib, p, PrimeMode::Paper).is_some() {
            if split.len() < 10 {
                split.push(p);
                if d != 1 {
                    fails.push(format!("fibonacci split p={p}: delta {d}"));
                }
            }
        } else {
            nonsplit.push(p);
            if d != 2 {
                fails.push(format!("fibonacci non-split p={p}: delta {d}"));
            }
        }
    }
    if split.first() != Some(&11) || split.len() < 10 {
        fails.push(format!("split primes {split:?}"));
    }
    let heis = catalog("heisenberg").unwrap();
    let mut hp = Vec::new();
    for p in (5..=31u64).filter(|&p| is_prime(p)) {
        let ring = reduce_group(&heis, p, PrimeMode::Paper).expect("heisenberg reduces");
        let d = ring.delta(2_000_000).unwrap().delta_p;
        hp.push(p);
        if d != 3 {
            fails.push(format!("heisenberg p={p}: delta {d}"));
        }
    }
    let z2 = catalog("z2_trivial").unwrap();
    for p in [3u64, 5, 7, 11] {
        let d = reduce_group(&z2, p, PrimeMode::Paper).unwrap().delta(2_000_000).unwrap().delta_p;
        if d != 1 {
            fails.push(format!("trivial Z^2 p={p}: delta {d}"));
        }
    }
    rep.record(
        2,
        "delta_p",
        &fails,
        format!(
            "fibonacci split {split:?} -> 1, non-split {:?} -> 2; heisenberg {hp:?} -> 3; Z^2 -> 1",
            &nonsplit[..nonsplit.len().min(6)]
        ),
    );
}

fn criterion_soundness(rep: &mut Report) {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut total = 0;
    let mut per_group = Vec::new();
    for (name, _) in CATALOG {
        let g = catalog(name).unwrap();
        let s = sep(&g, PrimeMode::Paper);
        let oracle = Oracle::for_group(&g, 200).unwrap();
        let b = ball(&g, 5, DEFAULT_BALL_BUDGET).unwrap();
        let mut count = 0;
        for x in b.elements().filter(|x| !x.is_identity()) {
            match s.separate(x) {
                Ok(q) => {
                    let checks = &q.checks_passed;
                    for c in ["hom_generators", "separates"] {
                        if !checks.iter().any(|k| k == c) {
                            fails.push(format!("{name} {x:?}: missing check {c}"));
                        }
                    }
                    if q.is_identity(&q.evaluate(x).unwrap()) {
                        fails.push(format!("{name} {x:?}: image is trivial"));
                    }
                    let d = oracle.divisibility(x).unwrap().lower_bound();
                    if q.order < d as u128 {
                        fails.push(format!("{name} {x:?}: |Q| = {} < D = {d}", q.order));
                    }
                }
                Err(e) => fails.push(format!("{name} {x:?}: {e}")),
            }
            count += 1;
        }
        per_group.push(format!("{name} {count}"));
        total += count;
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(300) {
        fails.push(format!("took {elapsed:?}"));
    }
    rep.record(
        3,
        "separator soundness on B(5)",
        &fails,
        format!("{total} elements ({}) in {:.1}s", per_group.join(", "), elapsed.as_secs_f64()),
    );
}

fn criterion_anchors(rep: &mut Report) {
    let mut fails = Vec::new();
    let mut check = |what: &str, got: Option<u64>, want: u64| {
        if got != Some(want) {
            fails.push(format!("{what}: got {got:?}, want {want}"));
        }
    };
    let bs = catalog("bs12").unwrap();
    let o = Oracle::for_group(&bs, 200).unwrap();
    let (x, y) = (bs.generators[0].clone(), bs.generators[1].clone());
    check("D_BS(x)", o.divisibility(&x).unwrap().value(), 6);
    check("D_BS(y)", o.divisibility(&y).unwrap().value(), 2);
    let rf = rf_curve_on(&ball(&bs, 1, DEFAULT_BALL_BUDGET).unwrap(), &o, None).unwrap();
    check("RF_BS(1)", Some(rf[0].rf_exact), 6);
    let fib = catalog("z2_fibonacci").unwrap();
    let o = Oracle::for_group(&fib, 200).unwrap();
    check("D_fib((e1,0))", o.divisibility(&fib.generators[0]).unwrap().value(), 10);
    let heis = catalog("heisenberg").unwrap();
    let o = Oracle::for_group(&heis, 200).unwrap();
    check("D_heis(central)", o.divisibility(&heis.generators[2]).unwrap().value(), 8);
    rep.record(4, "exact divisibility anchors", &fails, "6, 2, 6, 10, 8".into());
}

fn criterion_upper_shape(rep: &mut Report) {
    let mut fails = Vec::new();
    let mut detail = Vec::new();
    for (name, model, limit) in [
        ("bs12", Model::Polynomial, 2.5),
        ("z2_fibonacci", Model::Polynomial, 2.5),
        ("heisenberg", Model::Polylog, 3.5),
    ] {
        let g = catalog(name).unwrap();
        let s = sep(&g, PrimeMode::Paper);
        let rows = upper_bound_curve_on(&s, &ball(&g, 10, DEFAULT_BALL_BUDGET).unwrap()).unwrap();
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.r as f64, r.rf_upper as f64)).collect();
        let fit = fit_exponent(&pts, model, g.declared_bound.as_ref()).unwrap();
        detail.push(format!("{name} {} {:.3} ({:?})", model.name(), fit.exponent, fit.verdict));
        if fit.exponent > limit {
            fails.push(format!("{name}: exponent {} > {limit}", fit.exponent));
        }
    }
    rep.record(5, "upper-bound curve shape, r <= 10", &fails, detail.join("; "));
}

fn criterion_witness(rep: &mut Report) {
    let mut fails = Vec::new();
    let mut detail = Vec::new();
    for name in ["bs12", "z2_fibonacci"] {
        let g = catalog(name).unwrap();
        let o = Oracle::for_group(&g, 200).unwrap();
        let rows = witness_curve(&g, &o, &g.generators[0], 6).unwrap();
        let values: Vec<u64> = rows.iter().map(|w| w.divisibility.lower_bound()).collect();
        for w in &rows {
            let d = w.divisibility.lower_bound() as f64;
            let r = w.r as f64;
            if d < r || (w.r >= 3 && d < 0.5 * r * r.ln()) {
                fails.push(format!("{name} r={}: D = {d}", w.r));
            }
        }
        detail.push(format!("{name} {values:?}"));
    }
    let bs = catalog("bs12").unwrap();
    let o = Oracle::for_group(&bs, 200).unwrap();
    let x60 = bs.power(&bs.generators[0], 60).unwrap();
    let d = o.divisibility(&x60).unwrap().value();
    if d != Some(21) {
        fails.push(format!("D_BS(x^60) = {d:?}"));
    }
    detail.push(format!("D_BS(x^60) = {d:?}"));
    rep.record(6, "lower-bound witnesses", &fails, detail.join("; "));
}

fn criterion_geometry(rep: &mut Report) {
    let mut fails = Vec::new();
    let heis = catalog("heisenberg").unwrap();
    let stats = coefficient_stats(&heis, 12, DEFAULT_BALL_BUDGET).unwrap();
    let pts: Vec<(f64, f64)> = stats
        .iter()
        .map(|r| (r.r as f64, r.max_numerator.to_f64().unwrap()))
        .collect();
    let heis_fit = fit_exponent(&pts, Model::Polynomial, None).unwrap();
    if heis_fit.exponent > 3.0 {
        fails.push(format!("heisenberg log-log slope {}", heis_fit.exponent));
    }
    let bs = catalog("bs12").unwrap();
    let stats = coefficient_stats(&bs, 12, DEFAULT_BALL_BUDGET).unwrap();
    let pts: Vec<(f64, f64)> = stats
        .iter()
        .map(|r| (r.r as f64, r.max_numerator.to_f64().unwrap()))
        .collect();
    let bs_fit = fit_exponent(&pts, Model::Exponential, None).unwrap();
    if bs_fit.exponent < 0.25 {
        fails.push(format!("bs12 semilog slope {}", bs_fit.exponent));
    }
    // 3x3 unitriangular integer matrices (x, y, z) under the generators E12, E23, E13
    let ours = ball(&heis, 6, DEFAULT_BALL_BUDGET).unwrap();
    let mut seen = std::collections::HashSet::from([(0i64, 0i64, 0i64)]);
    let mut frontier = vec![(0i64, 0i64, 0i64)];
    let gens = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)];
    let mut matrix_sizes = vec![1usize];
    for _ in 0..6 {
        let mut next = Vec::new();
        for m in &frontier {
            for s in &gens {
                let p = (s.0 + m.0, s.1 + m.1, s.2 + m.2 + s.0 * m.1);
                if seen.insert(p) {
                    next.push(p);
                }
            }
        }
        frontier = next;
        matrix_sizes.push(seen.len());
    }
    let our_sizes: Vec<usize> = (0..=6).map(|r| ours.size_at(r)).collect();
    if our_sizes != matrix_sizes {
        fails.push(format!("ball sizes {our_sizes:?} vs matrices {matrix_sizes:?}"));
    }
    rep.record(
        7,
        "ball geometry",
        &fails,
        format!(
            "heisenberg slope {:.3}, bs12 semilog slope {:.3}, |B(r)| = {our_sizes:?}",
            heis_fit.exponent, bs_fit.exponent
        ),
    );
}

fn criterion_primes(rep: &mut Report) {
    let mut fails = Vec::new();
    let bs = catalog("bs12").unwrap();
    let s = sep(&bs, PrimeMode::Paper);
    let b = ball(&bs, 8, DEFAULT_BALL_BUDGET).unwrap();
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut n = 0;
    for x in b.elements().filter(|x| x.in_k() && !x.is_identity()) {
        let cf = coordinate_form(&bs, x).unwrap();
        let p = s.select_primes(&cf, 1).unwrap()[0];
        let mu = cf.max_abs().to_f64().unwrap().max(3.0);
        let bound = 8.0 * mu.ln() + 12.0;
        worst = worst.max(p as f64 - bound);
        if p as f64 > bound {
            fails.push(format!("{x:?}: p = {p} > {bound:.2}"));
        }
        n += 1;
    }
    let (mut checks, mut diag) = (0, 0);
    for (name, _) in CATALOG {
        let g = catalog(name).unwrap();
        let mut found = 0;
        let mut p = 2;
        while found < 10 && p < 2000 {
            p += 1;
            let Some(ring) = reduce_group(&g, p, PrimeMode::Paper) else {
                continue;
            };
            found += 1;
            for j in 0..g.rank_h() {
                let a = order_analysis(&ring.actions[j], p, 10_000_000).unwrap();
                checks += 1;
                diag += a.diagonalizable as usize;
                if !action_splits(&g, &ring, j) || !a.lemma_holds() {
                    fails.push(format!("{name} p={p} xi_{}: {a:?}", j + 1));
                }
            }
        }
    }
    rep.record(
        8,
        "prime selection and order lemma",
        &fails,
        format!(
            "{n} elements of B(8) ∩ K, max p - bound = {worst:.2}; {checks} order checks ({diag} diagonalizable)"
        ),
    );
}

fn criterion_determinism(rep: &mut Report) {
    let mut fails = Vec::new();
    let outputs: Vec<Vec<(String, String)>> = [1usize, 4]
        .iter()
        .map(|&threads| {
            let cfg = ExperimentConfig {
                threads,
                r_max: 4,
                seed: 7,
                ..ExperimentConfig::new("catalog", Command::Suite)
            };
            let out = run(&cfg).unwrap();
            if !out.verified {
                fails.push(format!("suite with {threads} threads not verified: {}", out.manifest["failures"]));
            }
            out.artifacts.into_iter().map(|a| (a.name, a.contents)).collect()
        })
        .collect();
    if outputs[0] != outputs[1] {
        fails.push("artifacts differ between 1 and 4 threads".into());
    }
    rep.record(9, "suite determinism", &fails, format!("{} byte-identical CSV artifacts", outputs[0].len()));
}

#[test]
fn acceptance() {
    let mut rep = Report { lines: Vec::new() };
    criterion_bch(&mut rep);
    criterion_delta(&mut rep);
    criterion_soundness(&mut rep);
    criterion_anchors(&mut rep);
    criterion_upper_shape(&mut rep);
    criterion_witness(&mut rep);
    criterion_geometry(&mut rep);
    criterion_primes(&mut rep);
    criterion_determinism(&mut rep);
    let failed: Vec<&String> = rep.lines.iter().filter(|(ok, _)| !ok).map(|(_, l)| l).collect();
    assert!(failed.is_empty(), "{} criteria failed", failed.len());
}

