//! Regressor matrices with expanded fixed-effect dummies.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::EstimationError;
use crate::panel::{FixedEffect, PanelRow};
use crate::proximity::Measure;

pub const INTERCEPT: &str = "const";

/// A non-dummy regressor taken from a panel row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Covariate {
    Female,
    Proximity(Measure),
}

impl Covariate {
    pub fn name(self) -> &'static str {
        match self {
            Covariate::Female => "female",
            Covariate::Proximity(m) => m.as_str(),
        }
    }

    pub fn parse(s: &str) -> Option<Covariate> {
        match s.trim() {
            "female" => Some(Covariate::Female),
            other => Measure::parse(other).map(Covariate::Proximity),
        }
    }

    fn value(self, row: &PanelRow) -> f64 {
        match self {
            Covariate::Female => f64::from(u8::from(row.female)),
            Covariate::Proximity(m) => row.rel(m),
        }
    }
}

/// The regressors of the baseline specification: female and the three
/// relative proximities.
pub fn baseline_covariates() -> Vec<Covariate> {
    vec![
        Covariate::Female,
        Covariate::Proximity(Measure::Prof),
        Covariate::Proximity(Measure::Student),
        Covariate::Proximity(Measure::Peer),
    ]
}

/// Category keys of one fixed-effect set, one per row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupColumn {
    pub name: String,
    pub keys: Vec<String>,
}

/// A category removed because its outcomes do not vary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DroppedGroup {
    pub set: String,
    pub category: String,
    pub rows: usize,
    pub reason: String,
}

/// Intercept, named covariates and dummy columns for each fixed-effect set.
/// The lexicographically first category of every set is the reference and
/// gets no column.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    base_names: Vec<String>,
    base: Vec<Vec<f64>>,
    groups: Vec<GroupColumn>,
    outcome: Vec<f64>,
    labels: Vec<String>,
    names: Vec<String>,
    x: DMatrix<f64>,
    dropped: Vec<DroppedGroup>,
}

impl DesignMatrix {
    /// `base` holds one row of covariate values per observation.
    pub fn new(
        base_names: Vec<String>,
        base: Vec<Vec<f64>>,
        groups: Vec<GroupColumn>,
        outcome: Vec<f64>,
        labels: Vec<String>,
    ) -> Result<Self, EstimationError> {
        let n = outcome.len();
        if base.len() != n || labels.len() != n || groups.iter().any(|g| g.keys.len() != n) {
            return Err(EstimationError::InvalidDesign("row counts disagree".into()));
        }
        if base.iter().any(|r| r.len() != base_names.len()) {
            return Err(EstimationError::InvalidDesign("covariate row has the wrong width".into()));
        }
        if outcome.iter().any(|&y| y != 0.0 && y != 1.0) {
            return Err(EstimationError::InvalidDesign("outcome must be 0 or 1".into()));
        }
        let mut d = DesignMatrix {
            base_names,
            base,
            groups,
            outcome,
            labels,
            names: Vec::new(),
            x: DMatrix::zeros(0, 0),
            dropped: Vec::new(),
        };
        d.expand();
        Ok(d)
    }

    /// Builds the design for `covariates` plus dummies for `effects`.
    pub fn from_panel(
        panel: &[PanelRow],
        covariates: &[Covariate],
        effects: &[FixedEffect],
    ) -> Result<Self, EstimationError> {
        let base = panel
            .iter()
            .map(|r| covariates.iter().map(|c| c.value(r)).collect())
            .collect();
        let groups = effects
            .iter()
            .map(|&e| GroupColumn {
                name: e.as_str().to_string(),
                keys: panel.iter().map(|r| r.group_key(e)).collect(),
            })
            .collect();
        DesignMatrix::new(
            covariates.iter().map(|c| c.name().to_string()).collect(),
            base,
            groups,
            panel.iter().map(|r| f64::from(u8::from(r.won))).collect(),
            panel.iter().map(|r| format!("{}/{}", r.scholar, r.year)).collect(),
        )
    }

    fn expand(&mut self) {
        let n = self.outcome.len();
        let mut names = vec![INTERCEPT.to_string()];
        names.extend(self.base_names.iter().cloned());
        let mut dummy_cols: Vec<(usize, String)> = Vec::new();
        for (gi, g) in self.groups.iter().enumerate() {
            let cats: BTreeSet<&String> = g.keys.iter().collect();
            for c in cats.into_iter().skip(1) {
                names.push(format!("{}={}", g.name, c));
                dummy_cols.push((gi, c.clone()));
            }
        }
        let k = names.len();
        let nb = self.base_names.len();
        let mut x = DMatrix::zeros(n, k);
        for i in 0..n {
            x[(i, 0)] = 1.0;
            for j in 0..nb {
                x[(i, 1 + j)] = self.base[i][j];
            }
            for (d, (gi, c)) in dummy_cols.iter().enumerate() {
                if &self.groups[*gi].keys[i] == c {
                    x[(i, 1 + nb + d)] = 1.0;
                }
            }
        }
        self.names = names;
        self.x = x;
    }

    pub fn n_rows(&self) -> usize {
        self.outcome.len()
    }

    pub fn n_cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn covariate_names(&self) -> &[String] {
        &self.base_names
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.outcome)
    }

    pub fn outcome(&self) -> &[f64] {
        &self.outcome
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn groups(&self) -> &[GroupColumn] {
        &self.groups
    }

    pub fn dropped(&self) -> &[DroppedGroup] {
        &self.dropped
    }

    /// Same design with covariate `name` multiplied by `factor`.
    pub fn with_scaled_covariate(&self, name: &str, factor: f64) -> Option<Self> {
        let j = self.base_names.iter().position(|n| n == name)?;
        let mut d = self.clone();
        for r in &mut d.base {
            r[j] *= factor;
        }
        d.expand();
        Some(d)
    }

    /// Keeps only the rows where `keep` is true.
    fn retain_rows(&mut self, keep: &[bool]) {
        fn pick<T>(v: &mut Vec<T>, keep: &[bool]) {
            let mut it = keep.iter();
            v.retain(|_| *it.next().unwrap());
        }
        pick(&mut self.outcome, keep);
        pick(&mut self.labels, keep);
        pick(&mut self.base, keep);
        for g in &mut self.groups {
            pick(&mut g.keys, keep);
        }
    }

    /// Removes every category whose outcomes are all 0 or all 1, together
    /// with its rows, repeating until no such category remains.
    pub fn drop_separated_groups(&self) -> Result<Self, EstimationError> {
        let mut d = self.clone();
        loop {
            let mut remove = vec![false; d.n_rows()];
            let mut found = false;
            for g in &d.groups {
                let mut stats: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
                for (k, &y) in g.keys.iter().zip(&d.outcome) {
                    let e = stats.entry(k.as_str()).or_default();
                    e.0 += 1;
                    e.1 += usize::from(y == 1.0);
                }
                for (cat, &(rows, wins)) in &stats {
                    if wins == 0 || wins == rows {
                        found = true;
                        d.dropped.push(DroppedGroup {
                            set: g.name.clone(),
                            category: cat.to_string(),
                            rows,
                            reason: if wins == 0 { "no positive outcomes" } else { "only positive outcomes" }.into(),
                        });
                        for (i, k) in g.keys.iter().enumerate() {
                            if k == cat {
                                remove[i] = true;
                            }
                        }
                    }
                }
            }
            if !found {
                break;
            }
            let keep: Vec<bool> = remove.iter().map(|r| !r).collect();
            d.retain_rows(&keep);
            if d.n_rows() == 0 {
                return Err(EstimationError::AllRowsDropped);
            }
        }
        d.expand();
        Ok(d)
    }

    /// Columns (other than the intercept) that are constant, or identical to
    /// an earlier column.
    pub fn degenerate_columns(&self) -> Vec<String> {
        let (n, k) = self.x.shape();
        let mut bad = Vec::new();
        for j in 1..k {
            let col = self.x.column(j);
            if n > 0 && col.iter().all(|&v| v == col[0]) {
                bad.push(self.names[j].clone());
                continue;
            }
            if (1..j).any(|p| self.x.column(p) == col) {
                bad.push(self.names[j].clone());
            }
        }
        bad
    }
}
