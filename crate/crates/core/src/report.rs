//! Orchestration of the full analysis and rendering of its outputs.
//!
//! Every artifact is rendered to an in-memory string first; files are written
//! in one pass at the end so that a run either produces a complete bundle or
//! nothing. No timestamps or run-dependent values enter the outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::estimators::{
    baseline_covariates, citation_break, group_by_later, won_after, BreakClass, CitationSeries, Covariate,
    DesignMatrix, EstimationError, GlmFit, Link, Relation, WonAfter,
};
use crate::graph::GenealogyGraph;
use crate::io::{self, CitationTable, Ingested};
use crate::panel::{apply_candidate_filter, build_panel, rescale_within_years, FixedEffect, PanelError, PanelRow};
use crate::proximity::Measure;
use crate::scholar::Source;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Panel(#[from] PanelError),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

/// One column of a results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub label: String,
    pub link: Link,
    pub covariates: Vec<Covariate>,
    pub effects: Vec<FixedEffect>,
}

impl ModelSpec {
    pub fn new(link: Link, covariates: Vec<Covariate>, effects: &[FixedEffect]) -> Self {
        let fe: Vec<&str> = effects.iter().map(|e| e.as_str()).collect();
        ModelSpec {
            label: format!(
                "{}{}",
                link.as_str(),
                if fe.is_empty() { String::new() } else { format!("+{}", fe.join("+")) }
            ),
            link,
            covariates,
            effects: effects.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitOutcome {
    pub spec: ModelSpec,
    pub sample: String,
    pub fit: Option<GlmFit>,
    pub error: Option<String>,
}

/// Builds the design, drops non-varying fixed-effect groups, and fits.
pub fn fit_spec(panel: &[PanelRow], spec: &ModelSpec) -> Result<GlmFit, EstimationError> {
    let mut design = DesignMatrix::from_panel(panel, &spec.covariates, &spec.effects)?;
    if !spec.effects.is_empty() {
        design = design.drop_separated_groups()?;
    }
    crate::estimators::fit_glm(&design, spec.link)
}

fn run_spec(panel: &[PanelRow], spec: ModelSpec, sample: &str) -> FitOutcome {
    let (fit, error) = match fit_spec(panel, &spec) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    FitOutcome {
        spec,
        sample: sample.to_string(),
        fit,
        error,
    }
}

const BOTH_LINKS: [Link; 2] = [Link::Logit, Link::Probit];

/// Logit and probit under no effects, year, year + alma mater, year + field.
pub fn table1_specs() -> Vec<ModelSpec> {
    use FixedEffect::*;
    let sets: [&[FixedEffect]; 4] = [&[], &[Year], &[Year, AlmaMater], &[Year, Field]];
    sets.iter()
        .flat_map(|fe| BOTH_LINKS.map(|l| ModelSpec::new(l, baseline_covariates(), fe)))
        .collect()
}

/// Year-effects fits with the professor and peer measures split.
pub fn table2_specs() -> Vec<ModelSpec> {
    use Measure::*;
    let p = Covariate::Proximity;
    let variants: [Vec<Covariate>; 4] = [
        vec![Covariate::Female, p(Student), p(Peer), p(Prof)],
        vec![Covariate::Female, p(Student), p(Peer), p(ProfDeceased), p(ProfLiving)],
        vec![Covariate::Female, p(Student), p(Peer), p(ProfEarlier), p(ProfRecent)],
        vec![Covariate::Female, p(Student), p(PeerEarlier), p(PeerRecent), p(ProfEarlier), p(ProfRecent)],
    ];
    variants
        .iter()
        .flat_map(|cov| BOTH_LINKS.map(|l| ModelSpec::new(l, cov.clone(), &[FixedEffect::Year])))
        .collect()
}

/// Candidate-source samples compared in the sensitivity table.
pub fn sensitivity_samples() -> Vec<(&'static str, BTreeSet<Source>)> {
    vec![
        ("all", BTreeSet::new()),
        ("without ad_hoc", BTreeSet::from([Source::AdHoc])),
        ("without ideas_repec", BTreeSet::from([Source::AdHoc, Source::IdeasRepec])),
    ]
}

/// Builds the panel for `config`, applying its source filter.
pub fn configured_panel(config: &RunConfig, graph: &GenealogyGraph) -> Result<Vec<PanelRow>, ReportError> {
    let full = build_panel(graph, &config.panel_config())?;
    filtered_panel(&full, &config.excluded_sources()?, config.rescale_after_filter)
}

pub fn filtered_panel(full: &[PanelRow], excluded: &BTreeSet<Source>, rescale: bool) -> Result<Vec<PanelRow>, ReportError> {
    let mut p = apply_candidate_filter(full, excluded)?;
    if rescale && !excluded.is_empty() {
        rescale_within_years(&mut p);
    }
    Ok(p)
}

pub fn run_table1(panel: &[PanelRow]) -> Vec<FitOutcome> {
    table1_specs().into_iter().map(|s| run_spec(panel, s, "all")).collect()
}

pub fn run_table2(panel: &[PanelRow]) -> Vec<FitOutcome> {
    table2_specs().into_iter().map(|s| run_spec(panel, s, "all")).collect()
}

pub fn run_table3(full: &[PanelRow], rescale: bool) -> Result<Vec<FitOutcome>, ReportError> {
    let mut out = Vec::new();
    for (name, excluded) in sensitivity_samples() {
        let p = filtered_panel(full, &excluded, rescale)?;
        for l in BOTH_LINKS {
            out.push(run_spec(&p, ModelSpec::new(l, baseline_covariates(), &[FixedEffect::Year]), name));
        }
    }
    Ok(out)
}

/// Two-sided standard-normal p-value stars.
pub fn stars(t: f64) -> &'static str {
    let p = erfc(t.abs() / std::f64::consts::SQRT_2);
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Plain-text results table: coefficients with stars, t statistics beneath.
pub fn format_table(title: &str, outcomes: &[FitOutcome]) -> String {
    const W: usize = 14;
    let mut rows: Vec<String> = Vec::new();
    for o in outcomes {
        for c in &o.spec.covariates {
            let n = c.name().to_string();
            if !rows.contains(&n) {
                rows.push(n);
            }
        }
    }
    let mut s = String::new();
    let rule = "=".repeat(18 + W * outcomes.len());
    let _ = writeln!(s, "{title}\n{rule}");
    let _ = write!(s, "{:<18}", "");
    for i in 1..=outcomes.len() {
        let _ = write!(s, "{:>W$}", format!("({i})"));
    }
    let _ = write!(s, "\n{:<18}", "");
    for o in outcomes {
        let _ = write!(s, "{:>W$}", o.spec.link.as_str());
    }
    let _ = writeln!(s, "\n{}", "-".repeat(rule.len()));
    for r in &rows {
        let _ = write!(s, "{r:<18}");
        for o in outcomes {
            let cell = o
                .fit
                .as_ref()
                .and_then(|f| Some(format!("{:.3}{}", f.coef(r)?, stars(f.t(r)?))))
                .unwrap_or_default();
            let _ = write!(s, "{cell:>W$}");
        }
        let _ = write!(s, "\n{:<18}", "");
        for o in outcomes {
            let cell = o
                .fit
                .as_ref()
                .and_then(|f| Some(format!("({:.2})", f.t(r)?)))
                .unwrap_or_default();
            let _ = write!(s, "{cell:>W$}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "{}", "-".repeat(rule.len()));
    for fe in [FixedEffect::Year, FixedEffect::AlmaMater, FixedEffect::Field] {
        let _ = write!(s, "{:<18}", format!("{} FE", fe.as_str()));
        for o in outcomes {
            let _ = write!(s, "{:>W$}", if o.spec.effects.contains(&fe) { "Yes" } else { "No" });
        }
        s.push('\n');
    }
    let line = |s: &mut String, label: &str, f: &dyn Fn(&FitOutcome) -> String| {
        let _ = write!(s, "{label:<18}");
        for o in outcomes {
            let _ = write!(s, "{:>W$}", f(o));
        }
        s.push('\n');
    };
    line(&mut s, "Sample", &|o| o.sample.chars().take(W - 1).collect());
    line(&mut s, "Observations", &|o| o.fit.as_ref().map_or("failed".into(), |f| f.n_used.to_string()));
    line(&mut s, "Log-likelihood", &|o| o.fit.as_ref().map_or(String::new(), |f| format!("{:.3}", f.log_likelihood)));
    let _ = writeln!(s, "{rule}");
    let _ = writeln!(s, "t statistics in parentheses");
    let _ = writeln!(s, "* p<0.05, ** p<0.01, *** p<0.001");
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(e) = &o.error {
            let _ = writeln!(s, "({}) failed: {e}", i + 1);
        }
    }
    s
}

/// Predicted win probability on an evenly spaced (student, peer) grid, with
/// every other regressor at zero or its reference category.
pub fn probability_surface(fit: &GlmFit, steps: usize) -> Result<String, EstimationError> {
    let mut s = String::from("student_rel,peer_rel,probability\n");
    for i in 0..steps {
        for j in 0..steps {
            let (u, v) = (i as f64 / (steps - 1) as f64, j as f64 / (steps - 1) as f64);
            let x = BTreeMap::from([
                (Measure::Student.as_str().to_string(), u),
                (Measure::Peer.as_str().to_string(), v),
            ]);
            let _ = writeln!(s, "{u},{v},{}", fit.predict_probability(&x)?);
        }
    }
    Ok(s)
}

pub fn won_after_csv(pairs: &[WonAfter]) -> String {
    let mut s = String::from("later,later_year,earlier,earlier_year\n");
    for p in pairs {
        let _ = writeln!(s, "{},{},{},{}", p.later, p.later_year, p.earlier, p.earlier_year);
    }
    s
}

pub fn won_after_text(kind: Relation, pairs: &[WonAfter]) -> String {
    let mut s = format!("Laureates who won after a laureate {}:\n", kind.as_str());
    for e in group_by_later(pairs) {
        let earlier: Vec<String> = e.earlier.iter().map(|(id, y)| format!("{id} ({y})")).collect();
        let _ = writeln!(s, "  {} ({}) after {}", e.later, e.later_year, earlier.join(", "));
    }
    s
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct BreakSummary {
    pub negative: usize,
    pub positive: usize,
    pub insignificant: usize,
    pub skipped: usize,
}

/// Citation-break regression for the later laureate of each pair, with the
/// earlier laureate's award year as the break.
pub fn citation_break_table(pairs: &[WonAfter], citations: &CitationTable) -> (String, BreakSummary) {
    let mut s = String::from("later,earlier,earlier_year,n,trend,break_coef,break_t,class\n");
    let mut sum = BreakSummary::default();
    for p in pairs {
        let Some(obs) = citations.get(&p.later) else {
            sum.skipped += 1;
            continue;
        };
        let series = CitationSeries {
            scholar: p.later.clone(),
            observations: obs.clone(),
            relative_award_year: p.earlier_year,
        };
        match citation_break(&series) {
            Ok(b) => {
                let class = match b.class() {
                    BreakClass::NegativeSignificant => {
                        sum.negative += 1;
                        "negative"
                    }
                    BreakClass::PositiveSignificant => {
                        sum.positive += 1;
                        "positive"
                    }
                    BreakClass::Insignificant => {
                        sum.insignificant += 1;
                        "insignificant"
                    }
                };
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{class}",
                    p.later, p.earlier, p.earlier_year, b.n, b.trend, b.break_coef, b.break_t
                );
            }
            Err(_) => sum.skipped += 1,
        }
    }
    (s, sum)
}

/// Citations accumulated up to and including the award year, per laureate.
pub fn cumulative_citations_csv(graph: &GenealogyGraph, citations: &CitationTable) -> String {
    let mut rows: Vec<(i32, &str, f64)> = graph
        .scholars()
        .iter()
        .filter_map(|s| {
            let w = s.win_year?;
            let obs = citations.get(&s.id)?;
            Some((w, s.id.as_str(), obs.iter().filter(|&&(y, _)| y <= w).map(|&(_, c)| c).sum()))
        })
        .collect();
    rows.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    let mut s = String::from("scholar_id,win_year,cumulative_citations\n");
    for (w, id, c) in rows {
        let _ = writeln!(s, "{id},{w},{c}");
    }
    s
}

fn fits_json(outcomes: &[FitOutcome]) -> String {
    serde_json::to_string_pretty(outcomes).expect("fit results serialise") + "\n"
}

/// Named output files plus the list of fits that failed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportBundle {
    pub files: BTreeMap<String, String>,
    pub failures: Vec<String>,
}

impl ReportBundle {
    fn add(&mut self, name: &str, body: String) {
        self.files.insert(name.to_string(), body);
    }

    fn record(&mut self, table: &str, outcomes: &[FitOutcome]) {
        for (i, o) in outcomes.iter().enumerate() {
            if let Some(e) = &o.error {
                self.failures.push(format!("{table} ({}) {}: {e}", i + 1, o.spec.label));
            }
        }
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), ReportError> {
        let err = |p: &Path, source| ReportError::Write {
            path: p.display().to_string(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(|e| err(dir, e))?;
        for (name, body) in &self.files {
            let p = dir.join(name);
            std::fs::write(&p, body).map_err(|e| err(&p, e))?;
        }
        Ok(())
    }
}

/// Year-effects logit on the baseline covariates, used for the surface.
pub fn surface_spec() -> ModelSpec {
    ModelSpec::new(Link::Logit, baseline_covariates(), &[FixedEffect::Year])
}

pub const SURFACE_STEPS: usize = 21;

/// Runs every table, the probability surface, relation lists and citation
/// analyses.
pub fn run_report(config: &RunConfig, data: &Ingested) -> Result<ReportBundle, ReportError> {
    let graph = &data.graph;
    let full = build_panel(graph, &config.panel_config())?;
    let panel = filtered_panel(&full, &config.excluded_sources()?, config.rescale_after_filter)?;
    let mut b = ReportBundle::default();

    b.add("load_report.txt", data.report.render());
    b.add("panel.csv", io::panel_csv(&panel));

    let t1 = run_table1(&panel);
    b.record("table1", &t1);
    b.add("table1.txt", format_table("Probability of winning: baseline specifications", &t1));
    b.add("table1.json", fits_json(&t1));

    let t2 = run_table2(&panel);
    b.record("table2", &t2);
    b.add("table2.txt", format_table("Probability of winning: split proximities", &t2));
    b.add("table2.json", fits_json(&t2));

    let t3 = run_table3(&full, config.rescale_after_filter)?;
    b.record("table3", &t3);
    b.add("table3.txt", format_table("Probability of winning: candidate sources", &t3));
    b.add("table3.json", fits_json(&t3));

    match fit_spec(&panel, &surface_spec()) {
        Ok(fit) => b.add("figure1_surface.csv", probability_surface(&fit, SURFACE_STEPS)?),
        Err(e) => {
            b.failures.push(format!("figure1 surface: {e}"));
            b.add("figure1_surface.csv", format!("# surface unavailable: {e}\n"));
        }
    }

    let mut summary = String::from("relation,negative,positive,insignificant,skipped\n");
    for kind in Relation::ALL {
        let pairs = won_after(graph, kind, config.max_peer_degree);
        b.add(&format!("won_after_{}.csv", kind.as_str()), won_after_csv(&pairs));
        b.add(&format!("won_after_{}.txt", kind.as_str()), won_after_text(kind, &pairs));
        let (table, sum) = citation_break_table(&pairs, &data.citations);
        b.add(&format!("citation_breaks_{}.csv", kind.as_str()), table);
        let _ = writeln!(
            summary,
            "{},{},{},{},{}",
            kind.as_str(),
            sum.negative,
            sum.positive,
            sum.insignificant,
            sum.skipped
        );
    }
    b.add("citation_breaks_summary.csv", summary);
    b.add("cumulative_citations.csv", cumulative_citations_csv(graph, &data.citations));
    Ok(b)
}
