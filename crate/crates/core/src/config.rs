//! Run configuration, read from a flat TOML file.
//!
//! ```toml
//! scholars = "scholars.csv"
//! edges = "edges.csv"
//! citations = "citations.csv"      # optional
//! first_year = 1970
//! last_year = 2021
//! h = -1.0
//! max_peer_degree = 2
//! recent_window = 10
//! exclude_sources = []             # e.g. ["ad_hoc"]
//! effects = ["year"]               # fixed effects for `fit`
//! link = "logit"
//! output_dir = "out"
//! rescale_after_filter = false
//! ```
//!
//! Relative paths are resolved against the directory holding the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimators::Link;
use crate::panel::{FixedEffect, PanelConfig, FIRST_PANEL_YEAR, LAST_PANEL_YEAR};
use crate::proximity::ProximityConfig;
use crate::scholar::Source;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Syntax { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scholars: PathBuf,
    pub edges: PathBuf,
    pub citations: Option<PathBuf>,
    pub first_year: i32,
    pub last_year: i32,
    pub h: f64,
    pub max_peer_degree: u32,
    pub recent_window: i32,
    pub exclude_sources: Vec<String>,
    pub effects: Vec<String>,
    pub link: String,
    pub output_dir: PathBuf,
    pub rescale_after_filter: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scholars: "scholars.csv".into(),
            edges: "edges.csv".into(),
            citations: None,
            first_year: FIRST_PANEL_YEAR,
            last_year: 2021,
            h: -1.0,
            max_peer_degree: 2,
            recent_window: 10,
            exclude_sources: Vec::new(),
            effects: vec!["year".into()],
            link: "logit".into(),
            output_dir: "out".into(),
            rescale_after_filter: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Reads `path`, resolves relative paths and validates.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut cfg = RunConfig::from_toml(&text).map_err(|message| ConfigError::Syntax {
            path: path.to_path_buf(),
            message,
        })?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.scholars);
        fix(&mut self.edges);
        if let Some(c) = self.citations.as_mut() {
            fix(c);
        }
        fix(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.first_year < FIRST_PANEL_YEAR || self.last_year > LAST_PANEL_YEAR || self.first_year > self.last_year {
            return bad(format!(
                "year range {}..={} must lie within {FIRST_PANEL_YEAR}..={LAST_PANEL_YEAR}",
                self.first_year, self.last_year
            ));
        }
        if self.recent_window < 1 {
            return bad("recent_window must be at least 1".into());
        }
        if self.h == 0.0 || !self.h.is_finite() {
            return bad("h must be non-zero".into());
        }
        if self.max_peer_degree == 0 {
            return bad("max_peer_degree must be at least 1".into());
        }
        self.excluded_sources()?;
        self.fixed_effects()?;
        self.link()?;
        Ok(())
    }

    pub fn excluded_sources(&self) -> Result<BTreeSet<Source>, ConfigError> {
        self.exclude_sources
            .iter()
            .map(|s| s.parse::<Source>().map_err(ConfigError::Invalid))
            .collect()
    }

    pub fn fixed_effects(&self) -> Result<Vec<FixedEffect>, ConfigError> {
        parse_effects(&self.effects)
    }

    pub fn link(&self) -> Result<Link, ConfigError> {
        Link::parse(&self.link).ok_or_else(|| ConfigError::Invalid(format!("unknown link `{}`", self.link)))
    }

    pub fn panel_config(&self) -> PanelConfig {
        PanelConfig {
            first_year: self.first_year,
            last_year: self.last_year,
            proximity: ProximityConfig {
                h: self.h,
                max_peer_degree: self.max_peer_degree,
                recent_window: self.recent_window,
            },
        }
    }
}

/// Parses fixed-effect names; `none` alone means no effects.
pub fn parse_effects<S: AsRef<str>>(names: &[S]) -> Result<Vec<FixedEffect>, ConfigError> {
    let mut out = Vec::new();
    for n in names {
        let n = n.as_ref();
        if n.eq_ignore_ascii_case("none") {
            continue;
        }
        let e = FixedEffect::parse(n).ok_or_else(|| ConfigError::Invalid(format!("unknown fixed effect `{n}`")))?;
        if !out.contains(&e) {
            out.push(e);
        }
    }
    Ok(out)
}
