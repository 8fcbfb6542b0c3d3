//! The candidate-year panel.
//!
//! A scholar is on the shortlist for year `t` when they are alive in `t`,
//! strictly older than 40 by birth-year arithmetic, and have not won before
//! `t`. Laureates appear in their award year with `won = true` and never again.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::GenealogyGraph;
use crate::proximity::{Measure, Measures, NobelSet, ProximityConfig, ProximityEngine, ProximityError, ProximityVector};
use crate::scholar::{Gender, Scholar, Source};

pub const FIRST_PANEL_YEAR: i32 = 1970;
pub const LAST_PANEL_YEAR: i32 = 2022;
const MIN_AGE_EXCLUSIVE: i32 = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PanelError {
    #[error(transparent)]
    Proximity(#[from] ProximityError),
    #[error("panel years {0}..={1} must lie within {FIRST_PANEL_YEAR}..={LAST_PANEL_YEAR}")]
    InvalidYears(i32, i32),
    #[error("laureates cannot be excluded from the candidate list")]
    InvalidFilter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelConfig {
    pub first_year: i32,
    pub last_year: i32,
    pub proximity: ProximityConfig,
}

impl Default for PanelConfig {
    fn default() -> Self {
        PanelConfig {
            first_year: FIRST_PANEL_YEAR,
            last_year: 2021,
            proximity: ProximityConfig::default(),
        }
    }
}

/// One candidate in one year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub scholar: String,
    pub year: i32,
    pub won: bool,
    pub female: bool,
    pub prox: ProximityVector,
    pub alma_mater: String,
    pub field: String,
    pub source: Source,
}

impl PanelRow {
    /// Category key of a fixed-effect set for this row.
    pub fn group_key(&self, set: FixedEffect) -> String {
        match set {
            FixedEffect::Year => self.year.to_string(),
            FixedEffect::AlmaMater => self.alma_mater.clone(),
            FixedEffect::Field => self.field.clone(),
        }
    }

    pub fn rel(&self, m: Measure) -> f64 {
        self.prox.rel.get(m)
    }
}

/// Categorical dummy sets available for fixed effects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedEffect {
    Year,
    AlmaMater,
    Field,
}

impl FixedEffect {
    pub fn as_str(self) -> &'static str {
        match self {
            FixedEffect::Year => "year",
            FixedEffect::AlmaMater => "alma_mater",
            FixedEffect::Field => "field",
        }
    }

    pub fn parse(s: &str) -> Option<FixedEffect> {
        match s.trim().to_ascii_lowercase().as_str() {
            "year" => Some(FixedEffect::Year),
            "alma" | "alma_mater" => Some(FixedEffect::AlmaMater),
            "field" | "jel" => Some(FixedEffect::Field),
            _ => None,
        }
    }
}

/// Laureates of all years before `year`.
pub fn nobel_set_at(scholars: &[Scholar], year: i32) -> NobelSet {
    NobelSet::at(scholars, year)
}

/// Whether `s` is a shortlisted candidate in `year`.
pub fn is_shortlisted(s: &Scholar, year: i32) -> bool {
    let Some(birth) = s.birth_year else { return false };
    s.is_candidate()
        && s.alive_in(year)
        && year - birth > MIN_AGE_EXCLUSIVE
        && s.win_year.is_none_or(|w| w >= year)
}

/// Ids eligible in `year`.
pub fn shortlist(scholars: &[Scholar], year: i32) -> BTreeSet<String> {
    scholars
        .iter()
        .filter(|s| is_shortlisted(s, year))
        .map(|s| s.id.clone())
        .collect()
}

/// One row per shortlisted scholar and year, ordered by (year, scholar id).
pub fn build_panel(graph: &GenealogyGraph, config: &PanelConfig) -> Result<Vec<PanelRow>, PanelError> {
    let (first, last) = (config.first_year, config.last_year);
    if first < FIRST_PANEL_YEAR || last > LAST_PANEL_YEAR || first > last {
        return Err(PanelError::InvalidYears(first, last));
    }
    let engine = ProximityEngine::new(graph, config.proximity)?;
    let scholars = graph.scholars();
    let per_year: Vec<Vec<PanelRow>> = (first..=last)
        .into_par_iter()
        .map(|year| {
            let ids = shortlist(scholars, year);
            if ids.is_empty() {
                return Ok(Vec::new());
            }
            let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
            let vectors = engine.year_vectors(&refs, year)?;
            Ok(vectors
                .into_iter()
                .map(|prox| {
                    let s = graph.scholar(&prox.scholar).expect("shortlisted id is in graph");
                    PanelRow {
                        scholar: s.id.clone(),
                        year,
                        won: s.win_year == Some(year),
                        female: s.gender == Gender::Female,
                        alma_mater: s.alma_mater.clone(),
                        field: s.field.clone(),
                        source: s.source.expect("shortlisted scholars are candidates"),
                        prox,
                    }
                })
                .collect())
        })
        .collect::<Result<_, PanelError>>()?;
    Ok(per_year.into_iter().flatten().collect())
}

/// Drops rows whose candidate source is in `excluded`. Relative proximities
/// keep the scaling of the unfiltered panel.
pub fn apply_candidate_filter(
    panel: &[PanelRow],
    excluded: &BTreeSet<Source>,
) -> Result<Vec<PanelRow>, PanelError> {
    if excluded.contains(&Source::Laureate) {
        return Err(PanelError::InvalidFilter);
    }
    Ok(panel
        .iter()
        .filter(|r| !excluded.contains(&r.source))
        .cloned()
        .collect())
}

/// Recomputes relative proximities from the raw values within each year of
/// `panel`, for runs that rescale after filtering.
pub fn rescale_within_years(panel: &mut [PanelRow]) {
    let mut maxima: BTreeMap<i32, Measures> = BTreeMap::new();
    for r in panel.iter() {
        let e = maxima.entry(r.year).or_default();
        for m in Measure::ALL {
            e.set(m, e.get(m).max(r.prox.raw.get(m)));
        }
    }
    for r in panel.iter_mut() {
        let max = maxima[&r.year];
        for m in Measure::ALL {
            let v = if max.get(m) > 0.0 { r.prox.raw.get(m) / max.get(m) } else { 0.0 };
            r.prox.rel.set(m, v);
        }
    }
}
