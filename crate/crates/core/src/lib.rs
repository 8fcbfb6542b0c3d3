//! Genealogy networks of prize laureates and candidates: closeness measures,
//! candidate-year panels and discrete-choice estimation.

pub mod config;
pub mod estimators;
pub mod graph;
pub mod io;
pub mod panel;
pub mod proximity;
pub mod report;
pub mod scholar;

pub use config::RunConfig;
pub use estimators::{fit_glm, DesignMatrix, EstimationError, GlmFit, Link};
pub use graph::{Direction, Distance, GenealogyGraph, GraphError};
pub use panel::{build_panel, FixedEffect, PanelConfig, PanelRow};
pub use proximity::{Measure, Measures, ProximityConfig, ProximityEngine, ProximityVector};
pub use scholar::{Gender, MentorEdge, Scholar, Source};
