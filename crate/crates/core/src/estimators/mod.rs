//! Discrete-choice fits, citation-break regressions and laureate relations.

pub mod citation;
pub mod design;
pub mod glm;
pub mod relations;

use thiserror::Error;

pub use citation::{citation_break, BreakClass, CitationBreak, CitationSeries};
pub use design::{baseline_covariates, Covariate, DesignMatrix, DroppedGroup, GroupColumn};
pub use glm::{fit_glm, fit_glm_with, FitOptions, GlmFit, Link};
pub use relations::{group_by_later, won_after, Relation, WonAfter, WonAfterEntry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("Newton-Raphson did not converge after {} iterations", .0.iterations)]
    NotConverged(Box<GlmFit>),
    #[error("perfect separation in columns: {}", .0.join(", "))]
    PerfectSeparation(Vec<String>),
    #[error("design is rank deficient in columns: {}", .0.join(", "))]
    RankDeficient(Vec<String>),
    #[error("{rows} observations are too few for {columns} columns")]
    TooFewObservations { rows: usize, columns: usize },
    #[error("the outcome does not vary")]
    NoOutcomeVariation,
    #[error("separation dropping removed every row")]
    AllRowsDropped,
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("covariate `{0}` is not in the fitted model")]
    UnknownCovariate(String),
    #[error("degenerate citation design: {0}")]
    DegenerateDesign(String),
    #[error("invalid citation series: {0}")]
    InvalidSeries(String),
}
