//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use nobelnet::estimators::glm::{log_likelihood, score};
use nobelnet::estimators::{fit_glm, Covariate, DesignMatrix, GroupColumn, Link};
use nobelnet::io::ingest;
use nobelnet::panel::{build_panel, PanelConfig};
use nobelnet::proximity::{crosscloseness, holder_distance, incloseness, outcloseness, NobelSet};
use nobelnet::report::{configured_panel, fit_spec, run_table1, run_table3, surface_spec};
use nobelnet::{Direction, GenealogyGraph, Measure, MentorEdge, RunConfig, Scholar, Source};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// -- 1 --------------------------------------------------------------------

fn worked_example() -> Outcome {
    // X has laureate ancestors at distance 1 (L1) and 3 (L3 -> A -> B -> X).
    let g = GenealogyGraph::build(
        ["L1", "L3", "A", "B", "X"].map(Scholar::network_only),
        [("L1", "X"), ("L3", "A"), ("A", "B"), ("B", "X")].map(|(p, s)| MentorEdge::new(p, s)),
    )
    .map_err(|e| e.to_string())?;
    let targets = NobelSet::new(2000, ["L1".to_string(), "L3".to_string()]);
    let start = Instant::now();
    let arith = holder_distance(&g, "X", &targets, 1.0, Direction::TowardAncestors).map_err(|e| e.to_string())?;
    let harm = holder_distance(&g, "X", &targets, -1.0, Direction::TowardAncestors).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(arith == 2.0, || format!("arithmetic mean {arith} != 2"))?;
    ensure(harm == 1.5, || format!("harmonic mean {harm} != 1.5"))?;
    ensure(elapsed < Duration::from_millis(1), || format!("took {elapsed:?}"))?;
    Ok(format!("arithmetic 2, harmonic 1.5 exactly in {elapsed:?}"))
}

// -- 2 --------------------------------------------------------------------

fn closeness_oracle() -> Outcome {
    const TOL: f64 = 1e-12;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut checked = 0usize;
    for case in 0..200 {
        let dag = RawDag::random(&mut rng, 30, 60);
        let g = dag.build();
        let d = dag.ancestor_distances();
        let k = rng.random_range(1..=dag.n);
        let mut targets: Vec<usize> = (0..dag.n).filter(|_| rng.random_bool(0.5)).take(k).collect();
        if targets.is_empty() {
            targets.push(rng.random_range(0..dag.n));
        }
        targets.sort_by_key(|&t| node_id(t));
        let set = NobelSet::new(2000, targets.iter().map(|&t| node_id(t)));
        for v in 0..dag.n {
            let id = node_id(v);
            let pairs = [
                ("out", outcloseness(&g, &id, &set), oracle_outcloseness(&d, v, &targets)),
                ("in", incloseness(&g, &id, &set), oracle_incloseness(&d, v, &targets)),
                ("cross", crosscloseness(&g, &id, &set, 2), oracle_crosscloseness(&dag, v, &targets, 2)),
            ];
            for (name, got, want) in pairs {
                let got = got.map_err(|e| format!("case {case} node {id}: {e}"))?;
                ensure((got - want).abs() <= TOL, || {
                    format!("case {case} node {id} {name}closeness {got} vs oracle {want}")
                })?;
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("{checked} values on 200 DAGs within {TOL:e} in {elapsed:.2?}"))
}

// -- 3 --------------------------------------------------------------------

fn design(x: &[f64], y: &[f64]) -> DesignMatrix {
    DesignMatrix::new(
        vec!["x".into()],
        x.iter().map(|&v| vec![v]).collect(),
        Vec::<GroupColumn>::new(),
        y.to_vec(),
        (0..y.len()).map(|i| i.to_string()).collect(),
    )
    .expect("valid design")
}

fn rows_of(d: &DesignMatrix) -> Vec<Vec<f64>> {
    let x = d.x();
    (0..x.nrows()).map(|i| x.row(i).iter().copied().collect()).collect()
}

/// Largest relative gap between the analytic score and a central difference
/// of the log-likelihood.
fn gradient_gap(link: Link, d: &DesignMatrix, beta: &[f64]) -> f64 {
    let b = DVector::from_column_slice(beta);
    let analytic = score(link, d.x(), d.outcome(), &b);
    let f = |p: &[f64]| log_likelihood(link, d.x(), d.outcome(), &DVector::from_column_slice(p));
    let fd = fd_gradient(f, beta, 1e-5);
    analytic
        .iter()
        .zip(&fd)
        .map(|(a, n)| (a - n).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

fn glm_correctness() -> Outcome {
    // intercept-only logit against the closed-form log odds
    let y: Vec<f64> = (0..40).map(|i| f64::from(u8::from(i % 5 < 2))).collect();
    let d = DesignMatrix::new(vec![], vec![vec![]; 40], vec![], y.clone(), (0..40).map(|i| i.to_string()).collect())
        .map_err(|e| e.to_string())?;
    let fit = fit_glm(&d, Link::Logit).map_err(|e| e.to_string())?;
    let p: f64 = 16.0 / 40.0;
    let closed = (p / (1.0 - p)).ln();
    ensure((fit.coefficients[0] - closed).abs() < 1e-6, || {
        format!("intercept {} vs log odds {closed}", fit.coefficients[0])
    })?;

    const TOL: f64 = 2e-3;
    let mut worst: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut panels = 0;
    while panels < 20 {
        let x: Vec<f64> = (0..50).map(|_| rng.random_range(0.0..1.0)).collect();
        let (a, b) = (rng.random_range(-1.5..0.5), rng.random_range(0.5..3.0));
        let y: Vec<f64> = x
            .iter()
            .map(|&v| f64::from(u8::from(rng.random_range(0.0..1.0) < 1.0 / (1.0 + (-(a + b * v)).exp()))))
            .collect();
        let d = design(&x, &y);
        let rows = rows_of(&d);
        let mut ok = true;
        let mut results = Vec::new();
        for link in [Link::Logit, Link::Probit] {
            match fit_glm(&d, link) {
                Ok(f) => results.push((link, f)),
                // separated draws carry no finite optimum to compare; redraw
                Err(_) => ok = false,
            }
        }
        if !ok {
            continue;
        }
        panels += 1;
        for (link, fit) in results {
            let probit = link == Link::Probit;
            let grid = grid_argmax_2d(|p| loglik(probit, &rows, &y, p), 8.0, 0.05, 1e-3);
            for (k, g) in grid.iter().enumerate() {
                let gap = (fit.coefficients[k] - g).abs();
                worst = worst.max(gap);
                ensure(gap <= TOL, || {
                    format!("panel {panels} {}: coef {k} newton {} grid {g}", link.as_str(), fit.coefficients[k])
                })?;
            }
            let gg = gradient_gap(link, &d, fit.coefficients.as_slice());
            worst_grad = worst_grad.max(gg);
            ensure(gg <= 1e-4, || format!("panel {panels} {}: gradient gap {gg:e}", link.as_str()))?;
        }
    }
    Ok(format!(
        "log-odds exact to 1e-6; 20 panels x 2 links, max |newton - grid| {worst:.1e}, max gradient gap {worst_grad:.1e}"
    ))
}

// -- 4 --------------------------------------------------------------------

fn fixture_config() -> RunConfig {
    RunConfig::load(&fixture_dir().join("run.toml")).expect("fixture config loads")
}

fn panel_invariants() -> Outcome {
    // age boundary: in 2000, born 1960 is out, born 1959 is in
    let g = GenealogyGraph::build(
        [
            Scholar::laureate("W", 1930, 1990),
            Scholar::candidate("Y40", 1960, Source::Clarivate),
            Scholar::candidate("Y41", 1959, Source::Clarivate),
        ],
        [MentorEdge::new("W", "Y40"), MentorEdge::new("W", "Y41")],
    )
    .map_err(|e| e.to_string())?;
    let cfg = PanelConfig {
        first_year: 2000,
        last_year: 2000,
        ..PanelConfig::default()
    };
    let p = build_panel(&g, &cfg).map_err(|e| e.to_string())?;
    let ids: Vec<&str> = p.iter().map(|r| r.scholar.as_str()).collect();
    ensure(ids == ["Y41"], || format!("age boundary rows {ids:?}"))?;

    let cfg = fixture_config();
    let data = ingest(&cfg).map_err(|e| e.to_string())?;
    let panel = build_panel(&data.graph, &cfg.panel_config()).map_err(|e| e.to_string())?;
    for r in &panel {
        let s = data.graph.scholar(&r.scholar).unwrap();
        ensure(s.win_year.is_none_or(|w| r.year <= w), || format!("post-win row {}/{}", r.scholar, r.year))?;
        ensure(s.death_year.is_none_or(|d| r.year <= d), || format!("post-death row {}/{}", r.scholar, r.year))?;
        ensure(r.year - s.birth_year.unwrap() > 40, || format!("underage row {}/{}", r.scholar, r.year))?;
    }
    let wins = panel.iter().filter(|r| r.won).count();
    let laureates = data
        .graph
        .scholars()
        .iter()
        .filter(|s| s.win_year.is_some_and(|w| (cfg.first_year..=cfg.last_year).contains(&w)))
        .count();
    ensure(wins == laureates, || format!("{wins} wins vs {laureates} laureates in range"))?;
    let mut by_year: BTreeMap<i32, Vec<&nobelnet::PanelRow>> = BTreeMap::new();
    for r in &panel {
        by_year.entry(r.year).or_default().push(r);
    }
    for (y, rows) in &by_year {
        for m in Measure::ALL {
            let vals: Vec<f64> = rows.iter().map(|r| r.rel(m)).collect();
            ensure(vals.iter().all(|v| (0.0..=1.0).contains(v)), || format!("{y} {} out of [0,1]", m.as_str()))?;
            let max = vals.iter().copied().fold(0.0, f64::max);
            ensure(max == 1.0 || vals.iter().all(|&v| v == 0.0), || {
                format!("{y} {} maximum {max}", m.as_str())
            })?;
        }
    }
    Ok(format!(
        "age boundary holds; {} rows over {} years, {wins} wins = laureates in range",
        panel.len(),
        by_year.len()
    ))
}

// -- 5, 6 -----------------------------------------------------------------

/// Location of a locally prepared copy of the published dataset, converted to
/// this crate's CSV schemas, with a `run.toml` beside it.
fn dataset_config() -> Option<RunConfig> {
    let dir = std::env::var_os("NOBELNET_DATASET")
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/replication"));
    let path = dir.join("run.toml");
    path.exists().then(|| RunConfig::load(&path).expect("dataset config loads"))
}

fn within(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs()
}

fn replication(cfg: &RunConfig) -> Outcome {
    let start = Instant::now();
    let data = ingest(cfg).map_err(|e| e.to_string())?;
    let full = build_panel(&data.graph, &cfg.panel_config()).map_err(|e| e.to_string())?;
    let panel = configured_panel(cfg, &data.graph).map_err(|e| e.to_string())?;
    let t1 = run_table1(&panel);
    let t3 = run_table3(&full, cfg.rescale_after_filter).map_err(|e| e.to_string())?;
    let n = |o: &nobelnet::report::FitOutcome| o.fit.as_ref().map_or(0, |f| f.n_used);
    let counts = [n(&t1[0]), n(&t1[2]), n(&t1[4]), n(&t1[6])];
    ensure(counts == [4899, 4899, 4245, 4851], || format!("table 1 observations {counts:?}"))?;
    let filtered = [n(&t3[2]), n(&t3[4])];
    ensure(filtered == [4432, 4340], || format!("filtered observations {filtered:?}"))?;
    let f = t1[0].fit.as_ref().ok_or("logit without effects failed")?;
    for (name, coef, t) in [("peer", 10.93, Some(13.85)), ("student", 3.642, None), ("prof", -2.076, None)] {
        let c = f.coef(name).unwrap();
        ensure(within(c, coef, 0.05), || format!("{name} coefficient {c} vs {coef}"))?;
        if let Some(t) = t {
            let got = f.t(name).unwrap();
            ensure(within(got, t, 0.15), || format!("{name} t {got} vs {t}"))?;
        }
    }
    use nobelnet::estimators::{group_by_later, won_after, Relation};
    let sizes: Vec<usize> = [Relation::Professor, Relation::Student]
        .iter()
        .map(|&k| won_after(&data.graph, k, cfg.max_peer_degree).len())
        .chain([group_by_later(&won_after(&data.graph, Relation::Peer, cfg.max_peer_degree)).len()])
        .collect();
    ensure(sizes == [27, 7, 25], || format!("won-after sizes {sizes:?}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("counts, coefficients and relation lists match in {elapsed:.1?}"))
}

fn surface_shape(cfg: &RunConfig) -> Outcome {
    let data = ingest(cfg).map_err(|e| e.to_string())?;
    let panel = configured_panel(cfg, &data.graph).map_err(|e| e.to_string())?;
    let fit = fit_spec(&panel, &surface_spec()).map_err(|e| e.to_string())?;
    let at = |u: f64| {
        let x = BTreeMap::from([("student".to_string(), u), ("peer".to_string(), u)]);
        fit.predict_probability(&x).unwrap()
    };
    let (lo, hi) = (at(0.0), at(1.0));
    ensure(lo <= 0.20 && hi >= 0.80, || format!("p(0,0) = {lo:.3}, p(1,1) = {hi:.3}"))?;
    Ok(format!("p(0,0) = {lo:.3}, p(1,1) = {hi:.3}"))
}

// -- 7 --------------------------------------------------------------------

fn fixture_oracles() -> Outcome {
    const TOL: f64 = 1e-12;
    let cfg = fixture_config();
    let data = ingest(&cfg).map_err(|e| e.to_string())?;
    let g = &data.graph;
    ensure(g.node_count() == 60, || format!("fixture has {} nodes", g.node_count()))?;

    // the fixture as a plain index DAG for the oracles
    let ids: Vec<String> = g.scholars().iter().map(|s| s.id.clone()).collect();
    let pos: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let dag = RawDag {
        n: ids.len(),
        edges: g.edges().map(|e| (pos[e.professor_id.as_str()], pos[e.student_id.as_str()])).collect(),
    };
    let d = dag.ancestor_distances();

    // panel membership by direct enumeration of the eligibility rule
    let mut expected: BTreeSet<(i32, String)> = BTreeSet::new();
    for t in cfg.first_year..=cfg.last_year {
        for s in g.scholars() {
            let (Some(_), Some(b)) = (s.source, s.birth_year) else { continue };
            if s.death_year.is_none_or(|dd| dd >= t) && t - b > 40 && s.win_year.is_none_or(|w| w >= t) {
                expected.insert((t, s.id.clone()));
            }
        }
    }
    let panel = build_panel(g, &cfg.panel_config()).map_err(|e| e.to_string())?;
    let got: BTreeSet<(i32, String)> = panel.iter().map(|r| (r.year, r.scholar.clone())).collect();
    ensure(got == expected && got.len() == panel.len(), || {
        format!("panel has {} rows, enumeration gives {}", panel.len(), expected.len())
    })?;

    // raw closeness of every panel row against the oracles
    let mut checked = 0;
    for r in &panel {
        let mut targets: Vec<usize> = g
            .scholars()
            .iter()
            .filter(|s| s.win_year.is_some_and(|w| w < r.year))
            .map(|s| pos[s.id.as_str()])
            .collect();
        targets.sort_by_key(|&t| &ids[t]);
        let v = pos[r.scholar.as_str()];
        let want = [
            (Measure::Prof, oracle_outcloseness(&d, v, &targets)),
            (Measure::Student, oracle_incloseness(&d, v, &targets)),
            (Measure::Peer, oracle_crosscloseness(&dag, v, &targets, cfg.max_peer_degree)),
        ];
        for (m, w) in want {
            let got = r.prox.raw.get(m);
            ensure((got - w).abs() <= TOL, || {
                format!("{}/{} {}: {got} vs oracle {w}", r.scholar, r.year, m.as_str())
            })?;
            checked += 1;
        }
    }

    // three-covariate logit against a derivative-free likelihood maximiser
    let covs = [Measure::Prof, Measure::Student, Measure::Peer].map(Covariate::Proximity);
    let design = DesignMatrix::from_panel(&panel, &covs, &[]).map_err(|e| e.to_string())?;
    let fit = fit_glm(&design, Link::Logit).map_err(|e| e.to_string())?;
    let rows = rows_of(&design);
    let y = design.outcome().to_vec();
    let oracle = stencil_argmax(|b| loglik(false, &rows, &y, b), 4, 1.0, 1e-6);
    let gap = fit
        .coefficients
        .iter()
        .zip(&oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    ensure(gap <= 2e-3, || format!("logit {:?} vs oracle {oracle:?}", fit.coefficients.as_slice()))?;
    let gg = gradient_gap(Link::Logit, &design, fit.coefficients.as_slice());
    ensure(gg <= 1e-4, || format!("gradient gap {gg:e}"))?;
    Ok(format!(
        "{} panel rows match enumeration; {checked} closeness values within {TOL:e}; logit within {gap:.1e} of oracle",
        panel.len()
    ))
}

fn main() {
    let dataset = dataset_config();
    let mut results: Vec<(&str, &str, Outcome)> = vec![
        ("1", "worked power-mean example", worked_example()),
        ("2", "closeness vs brute-force oracle", closeness_oracle()),
        ("3", "GLM vs closed form, grid search and finite differences", glm_correctness()),
        ("4", "panel invariants", panel_invariants()),
    ];
    match &dataset {
        Some(cfg) => {
            results.push(("5", "dataset replication", replication(cfg)));
            results.push(("6", "probability surface shape", surface_shape(cfg)));
        }
        None => {
            let skip = || Ok("skipped: dataset absent, replaced by criterion 7".to_string());
            results.push(("5", "dataset replication", skip()));
            results.push(("6", "probability surface shape", skip()));
        }
    }
    results.push(("7", "synthetic fixture vs oracles", fixture_oracles()));

    let mut failed = 0;
    for (id, name, r) in &results {
        match r {
            Ok(msg) => println!("criterion {id} PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
