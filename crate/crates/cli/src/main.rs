use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use nobelnet::config::ConfigError;
use nobelnet::estimators::{baseline_covariates, won_after, Covariate, EstimationError, Relation};
use nobelnet::io;
use nobelnet::panel::{self, PanelError};
use nobelnet::proximity::ProximityEngine;
use nobelnet::report::{self, ModelSpec, ReportError};
use nobelnet::RunConfig;

#[derive(Parser)]
#[command(name = "nobelnet", version, about = "Genealogy closeness and prize-panel estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML)
    #[arg(long, short)]
    config: PathBuf,
    /// Override the link function (logit or probit)
    #[arg(long)]
    link: Option<String>,
    /// Override the fixed effects, comma separated (year, alma_mater, field, none)
    #[arg(long, value_delimiter = ',')]
    effects: Option<Vec<String>>,
    /// Exclude a candidate source; repeatable
    #[arg(long = "exclude-source")]
    exclude_source: Vec<String>,
    /// Write to this file instead of standard output
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the input files and print row counts
    Ingest(Common),
    /// Raw and relative proximities of the shortlist
    Closeness {
        #[command(flatten)]
        common: Common,
        /// A single year instead of the configured range
        #[arg(long)]
        year: Option<i32>,
    },
    /// Candidate-year panel as CSV
    Panel(Common),
    /// Fit one model
    Fit {
        #[command(flatten)]
        common: Common,
        /// Covariates, comma separated (default: female,prof,student,peer)
        #[arg(long, value_delimiter = ',')]
        covariates: Option<Vec<String>>,
    },
    /// Fits with split professor and peer proximities
    Splits(Common),
    /// Fits on samples restricted by candidate source
    Sensitivity(Common),
    /// Won-after relations and citation-break regressions
    Citations(Common),
    /// Every table and figure input, written to the output directory
    Report(Common),
    /// Descendant subgraph of one scholar as node and edge CSVs
    Subgraph {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        root: String,
        /// Maximum number of student edges from the root
        #[arg(long)]
        depth: Option<u32>,
    },
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(l) = &self.link {
            cfg.link = l.clone();
        }
        if let Some(e) = &self.effects {
            cfg.effects = e.clone();
        }
        cfg.exclude_sources.extend(self.exclude_source.iter().cloned());
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Ingest(c) => {
            let cfg = c.load()?;
            c.emit(&io::ingest(&cfg)?.report.render())?;
        }
        Command::Closeness { common: c, year } => {
            let cfg = c.load()?;
            let data = io::ingest(&cfg)?;
            let engine = ProximityEngine::new(&data.graph, cfg.panel_config().proximity).map_err(PanelError::from)?;
            let years = match year {
                Some(y) => y..=y,
                None => cfg.first_year..=cfg.last_year,
            };
            let mut all = Vec::new();
            for y in years {
                let list = panel::shortlist(data.graph.scholars(), y);
                let ids: Vec<&str> = list.iter().map(String::as_str).collect();
                all.extend(engine.year_vectors(&ids, y).map_err(PanelError::from)?);
            }
            c.emit(&io::proximity_csv(&all))?;
        }
        Command::Panel(c) => {
            let cfg = c.load()?;
            let data = io::ingest(&cfg)?;
            c.emit(&io::panel_csv(&report::configured_panel(&cfg, &data.graph)?))?;
        }
        Command::Fit { common: c, covariates } => {
            let cfg = c.load()?;
            let data = io::ingest(&cfg)?;
            let covs = match covariates {
                Some(names) => names
                    .iter()
                    .map(|n| Covariate::parse(n).ok_or_else(|| ConfigError::Invalid(format!("unknown covariate `{n}`"))))
                    .collect::<Result<Vec<_>, _>>()?,
                None => baseline_covariates(),
            };
            let panel = report::configured_panel(&cfg, &data.graph)?;
            let spec = ModelSpec::new(cfg.link()?, covs, &cfg.fixed_effects()?);
            let fit = report::fit_spec(&panel, &spec)?;
            let outcome = report::FitOutcome {
                spec,
                sample: "configured".into(),
                fit: Some(fit),
                error: None,
            };
            c.emit(&report::format_table("Probability of winning", std::slice::from_ref(&outcome)))?;
        }
        Command::Splits(c) => {
            let cfg = c.load()?;
            let data = io::ingest(&cfg)?;
            let outcomes = report::run_table2(&report::configured_panel(&cfg, &data.graph)?);
            c.emit(&report::format_table("Probability of winning: split proximities", &outcomes))?;
            return Ok(fit_status(&outcomes));
        }
        Command::Sensitivity(c) => {
            let cfg = c.load()?;
            let data = io::ingest(&cfg)?;
            let full = panel::build_panel(&data.graph, &cfg.panel_config())?;
            let outcomes = report::run_table3(&full, cfg.rescale_after_filter)?;
            c.emit(&report::format_table("Probability of winning: candidate sources", &outcomes))?;
            return Ok(fit_status(&outcomes));
        }
        Command::Citations(c) => {
            let cfg = c.load()?;
            let data = io::ingest(&cfg)?;
            let mut text = String::new();
            for kind in Relation::ALL {
                let pairs = won_after(&data.graph, kind, cfg.max_peer_degree);
                text.push_str(&report::won_after_text(kind, &pairs));
                let (_, s) = report::citation_break_table(&pairs, &data.citations);
                text.push_str(&format!(
                    "  citation breaks: {} negative, {} positive, {} insignificant, {} skipped\n",
                    s.negative, s.positive, s.insignificant, s.skipped
                ));
            }
            c.emit(&text)?;
        }
        Command::Report(c) => {
            let cfg = c.load()?;
            let data = io::ingest(&cfg)?;
            let bundle = report::run_report(&cfg, &data)?;
            let dir = c.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
            bundle.write_to(&dir)?;
            println!("wrote {} files to {}", bundle.files.len(), dir.display());
            if !bundle.failures.is_empty() {
                for f in &bundle.failures {
                    eprintln!("fit failed: {f}");
                }
                return Ok(ExitCode::from(2));
            }
        }
        Command::Subgraph { common: c, root, depth } => {
            let cfg = c.load()?;
            let data = io::ingest(&cfg)?;
            let sub = data.graph.descendant_subgraph(&root, depth)?;
            let (nodes, edges) = io::subgraph_csv(&sub);
            let Some(dir) = &c.out else {
                bail!(ConfigError::Invalid("subgraph needs --out <directory>".into()));
            };
            write_pair(dir, &nodes, &edges)?;
            println!("{} nodes, {} edges", sub.node_count(), sub.edge_count());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_pair(dir: &Path, nodes: &str, edges: &str) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    std::fs::write(dir.join("nodes.csv"), nodes)?;
    std::fs::write(dir.join("edges.csv"), edges)?;
    Ok(())
}

fn fit_status(outcomes: &[report::FitOutcome]) -> ExitCode {
    let failed: Vec<_> = outcomes.iter().filter_map(|o| o.error.as_ref()).collect();
    for e in &failed {
        eprintln!("fit failed: {e}");
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

/// 2 for estimation failures, 1 for anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    let estimation = err.chain().any(|e| {
        e.is::<EstimationError>()
            || matches!(e.downcast_ref::<ReportError>(), Some(ReportError::Estimation(_)))
    });
    if estimation {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
