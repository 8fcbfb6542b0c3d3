//! CSV ingestion and emission.
//!
//! Input schemas (header row required, UTF-8, comma separated, empty = missing):
//!
//! ```text
//! scholars.csv   id,name,birth_year,death_year,win_year,gender,alma_mater,jel,source
//! edges.csv      professor_id,student_id
//! citations.csv  scholar_id,year,count
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::config::RunConfig;
use crate::graph::{GenealogyGraph, GraphError};
use crate::panel::PanelRow;
use crate::proximity::{Measure, Measures, ProximityVector};
use crate::scholar::{Gender, MentorEdge, Scholar, Source};

pub const SCHOLAR_COLUMNS: [&str; 9] = [
    "id",
    "name",
    "birth_year",
    "death_year",
    "win_year",
    "gender",
    "alma_mater",
    "jel",
    "source",
];
pub const EDGE_COLUMNS: [&str; 2] = ["professor_id", "student_id"];
pub const CITATION_COLUMNS: [&str; 3] = ["scholar_id", "year", "count"];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}:{line}: column `{column}`: {message}")]
    Parse {
        file: String,
        line: u64,
        column: String,
        message: String,
    },
    #[error("{file}: {message}")]
    Schema { file: String, message: String },
    #[error("{file}:{line}: {message}")]
    Validation { file: String, line: u64, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Annual citation counts per scholar, sorted by year.
pub type CitationTable = BTreeMap<String, Vec<(i32, f64)>>;

/// Row counts from a successful load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub scholars: usize,
    pub candidates: usize,
    pub laureates: usize,
    pub network_only: usize,
    pub edges: usize,
    pub citation_rows: usize,
    pub citation_series: usize,
}

impl LoadReport {
    pub fn render(&self) -> String {
        format!(
            "nodes: {}\nedges: {}\ncandidates: {} (laureates: {})\nnetwork-only nodes: {}\ncitation rows: {} in {} series\n",
            self.scholars,
            self.edges,
            self.candidates,
            self.laureates,
            self.network_only,
            self.citation_rows,
            self.citation_series
        )
    }
}

pub struct Ingested {
    pub graph: GenealogyGraph,
    pub citations: CitationTable,
    pub report: LoadReport,
}

struct Table<R: Read> {
    file: String,
    reader: csv::Reader<R>,
    columns: HashMap<String, usize>,
}

impl<R: Read> Table<R> {
    fn open(file: &str, input: R, required: &[&str]) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let headers = reader.headers().map_err(|e| IngestError::Schema {
            file: file.to_string(),
            message: e.to_string(),
        })?;
        let columns: HashMap<String, usize> =
            headers.iter().enumerate().map(|(i, h)| (h.trim().to_string(), i)).collect();
        let missing: Vec<&str> = required.iter().copied().filter(|c| !columns.contains_key(*c)).collect();
        if !missing.is_empty() {
            return Err(IngestError::Schema {
                file: file.to_string(),
                message: format!("missing columns: {}", missing.join(", ")),
            });
        }
        Ok(Table {
            file: file.to_string(),
            reader,
            columns,
        })
    }

    /// Visits each record with its 1-based file line.
    fn for_each(
        &mut self,
        mut f: impl FnMut(&Row<'_>) -> Result<(), IngestError>,
    ) -> Result<usize, IngestError> {
        let mut count = 0;
        for rec in self.reader.records() {
            let rec = rec.map_err(|e| IngestError::Parse {
                file: self.file.clone(),
                line: e.position().map_or(0, |p| p.line()),
                column: String::new(),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line());
            f(&Row {
                file: &self.file,
                line,
                rec: &rec,
                columns: &self.columns,
            })?;
            count += 1;
        }
        Ok(count)
    }
}

struct Row<'a> {
    file: &'a str,
    line: u64,
    rec: &'a csv::StringRecord,
    columns: &'a HashMap<String, usize>,
}

impl Row<'_> {
    fn text(&self, col: &str) -> &str {
        self.columns.get(col).and_then(|&i| self.rec.get(i)).unwrap_or("").trim()
    }

    fn parse_err(&self, col: &str, message: String) -> IngestError {
        IngestError::Parse {
            file: self.file.to_string(),
            line: self.line,
            column: col.to_string(),
            message,
        }
    }

    fn opt<T: std::str::FromStr>(&self, col: &str) -> Result<Option<T>, IngestError>
    where
        T::Err: std::fmt::Display,
    {
        let s = self.text(col);
        if s.is_empty() {
            return Ok(None);
        }
        s.parse().map(Some).map_err(|e| self.parse_err(col, format!("`{s}`: {e}")))
    }

    fn invalid(&self, message: String) -> IngestError {
        IngestError::Validation {
            file: self.file.to_string(),
            line: self.line,
            message,
        }
    }
}

pub fn parse_scholars(file: &str, input: impl Read) -> Result<Vec<Scholar>, IngestError> {
    let mut t = Table::open(file, input, &SCHOLAR_COLUMNS)?;
    let mut out = Vec::new();
    t.for_each(|row| {
        let gender = row
            .text("gender")
            .parse::<Gender>()
            .map_err(|e| row.parse_err("gender", e))?;
        let source = match row.text("source") {
            "" => None,
            s => Some(s.parse::<Source>().map_err(|e| row.parse_err("source", e))?),
        };
        let s = Scholar {
            id: row.text("id").to_string(),
            name: row.text("name").to_string(),
            birth_year: row.opt("birth_year")?,
            death_year: row.opt("death_year")?,
            win_year: row.opt("win_year")?,
            gender,
            alma_mater: row.text("alma_mater").to_string(),
            field: row.text("jel").to_string(),
            source,
        };
        s.validate()
            .map_err(|reason| row.invalid(format!("scholar `{}`: {reason}", s.id)))?;
        out.push(s);
        Ok(())
    })?;
    Ok(out)
}

pub fn parse_edges(file: &str, input: impl Read) -> Result<Vec<MentorEdge>, IngestError> {
    let mut t = Table::open(file, input, &EDGE_COLUMNS)?;
    let mut out = Vec::new();
    t.for_each(|row| {
        let (p, s) = (row.text("professor_id"), row.text("student_id"));
        if p.is_empty() || s.is_empty() {
            return Err(row.invalid("edge with an empty endpoint".into()));
        }
        out.push(MentorEdge::new(p, s));
        Ok(())
    })?;
    Ok(out)
}

/// Parses citations, checking scholars against `graph`.
pub fn parse_citations(
    file: &str,
    input: impl Read,
    graph: &GenealogyGraph,
) -> Result<(CitationTable, usize), IngestError> {
    let mut t = Table::open(file, input, &CITATION_COLUMNS)?;
    let mut out: CitationTable = BTreeMap::new();
    let rows = t.for_each(|row| {
        let id = row.text("scholar_id");
        if !graph.contains(id) {
            return Err(row.invalid(format!("unknown scholar `{id}`")));
        }
        let year: i32 = row.opt("year")?.ok_or_else(|| row.parse_err("year", "missing".into()))?;
        let count: f64 = row.opt("count")?.ok_or_else(|| row.parse_err("count", "missing".into()))?;
        if count < 0.0 || !count.is_finite() {
            return Err(row.invalid(format!("negative citation count for `{id}`")));
        }
        let series = out.entry(id.to_string()).or_default();
        if series.iter().any(|&(y, _)| y == year) {
            return Err(row.invalid(format!("duplicate citation year {year} for `{id}`")));
        }
        series.push((year, count));
        Ok(())
    })?;
    for s in out.values_mut() {
        s.sort_by_key(|&(y, _)| y);
    }
    Ok((out, rows))
}

fn open(path: &Path) -> Result<File, IngestError> {
    File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn label(path: &Path) -> String {
    path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned())
}

/// Loads and validates the files named in `config`.
pub fn ingest(config: &RunConfig) -> Result<Ingested, IngestError> {
    let scholars = parse_scholars(&label(&config.scholars), open(&config.scholars)?)?;
    let edges = parse_edges(&label(&config.edges), open(&config.edges)?)?;
    let graph = GenealogyGraph::build(scholars, edges)?;
    let (citations, citation_rows) = match &config.citations {
        Some(p) => parse_citations(&label(p), open(p)?, &graph)?,
        None => (BTreeMap::new(), 0),
    };
    let s = graph.scholars();
    let report = LoadReport {
        scholars: graph.node_count(),
        candidates: s.iter().filter(|x| x.is_candidate()).count(),
        laureates: s.iter().filter(|x| x.is_laureate()).count(),
        network_only: s.iter().filter(|x| !x.is_candidate()).count(),
        edges: graph.edge_count(),
        citation_rows,
        citation_series: citations.len(),
    };
    Ok(Ingested {
        graph,
        citations,
        report,
    })
}

fn to_string(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 fields")
}

fn opt(v: Option<i32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn scholars_csv<'a>(scholars: impl IntoIterator<Item = &'a Scholar>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCHOLAR_COLUMNS).unwrap();
    for s in scholars {
        w.write_record([
            s.id.clone(),
            s.name.clone(),
            opt(s.birth_year),
            opt(s.death_year),
            opt(s.win_year),
            s.gender.as_str().to_string(),
            s.alma_mater.clone(),
            s.field.clone(),
            s.source.map(|x| x.as_str().to_string()).unwrap_or_default(),
        ])
        .unwrap();
    }
    to_string(w)
}

pub fn edges_csv(edges: impl IntoIterator<Item = MentorEdge>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(EDGE_COLUMNS).unwrap();
    for e in edges {
        w.write_record([e.professor_id, e.student_id]).unwrap();
    }
    to_string(w)
}

/// Node and edge tables of a (sub)graph, in the input schemas.
pub fn subgraph_csv(graph: &GenealogyGraph) -> (String, String) {
    (scholars_csv(graph.scholars()), edges_csv(graph.edges()))
}

pub fn proximity_csv<'a>(vectors: impl IntoIterator<Item = &'a ProximityVector>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["scholar_id".to_string(), "year".to_string()];
    header.extend(Measure::ALL.iter().map(|m| format!("{}_raw", m.as_str())));
    header.extend(Measure::ALL.iter().map(|m| format!("{}_rel", m.as_str())));
    w.write_record(&header).unwrap();
    for v in vectors {
        let mut rec = vec![v.scholar.clone(), v.year.to_string()];
        rec.extend(Measure::ALL.iter().map(|&m| v.raw.get(m).to_string()));
        rec.extend(Measure::ALL.iter().map(|&m| v.rel.get(m).to_string()));
        w.write_record(&rec).unwrap();
    }
    to_string(w)
}

/// Panel rows: identifiers, outcome, relative proximities, group keys, and
/// trailing raw proximities.
pub fn panel_csv(panel: &[PanelRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = ["scholar_id", "year", "won", "female"].map(String::from).to_vec();
    header.extend(Measure::ALL.iter().map(|m| m.as_str().to_string()));
    header.extend(["alma_mater", "field", "source"].map(String::from));
    header.extend(Measure::ALL.iter().map(|m| format!("{}_raw", m.as_str())));
    w.write_record(&header).unwrap();
    for r in panel {
        let mut rec = vec![
            r.scholar.clone(),
            r.year.to_string(),
            u8::from(r.won).to_string(),
            u8::from(r.female).to_string(),
        ];
        rec.extend(Measure::ALL.iter().map(|&m| r.prox.rel.get(m).to_string()));
        rec.extend([r.alma_mater.clone(), r.field.clone(), r.source.as_str().to_string()]);
        rec.extend(Measure::ALL.iter().map(|&m| r.prox.raw.get(m).to_string()));
        w.write_record(&rec).unwrap();
    }
    to_string(w)
}

pub fn parse_panel(file: &str, input: impl Read) -> Result<Vec<PanelRow>, IngestError> {
    let mut required: Vec<&str> = vec!["scholar_id", "year", "won", "female", "alma_mater", "field", "source"];
    required.extend(Measure::ALL.iter().map(|m| m.as_str()));
    let raw_names: Vec<String> = Measure::ALL.iter().map(|m| format!("{}_raw", m.as_str())).collect();
    let mut t = Table::open(file, input, &required)?;
    let mut out = Vec::new();
    t.for_each(|row| {
        let flag = |col: &str| -> Result<bool, IngestError> {
            match row.text(col) {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(row.parse_err(col, format!("expected 0 or 1, got `{other}`"))),
            }
        };
        let mut rel = Measures::default();
        let mut raw = Measures::default();
        for (m, raw_col) in Measure::ALL.iter().zip(&raw_names) {
            rel.set(*m, row.opt(m.as_str())?.unwrap_or(0.0));
            raw.set(*m, row.opt(raw_col)?.unwrap_or(0.0));
        }
        let scholar = row.text("scholar_id").to_string();
        let year = row.opt("year")?.ok_or_else(|| row.parse_err("year", "missing".into()))?;
        out.push(PanelRow {
            prox: ProximityVector {
                scholar: scholar.clone(),
                year,
                raw,
                rel,
            },
            scholar,
            year,
            won: flag("won")?,
            female: flag("female")?,
            alma_mater: row.text("alma_mater").to_string(),
            field: row.text("field").to_string(),
            source: row.text("source").parse().map_err(|e| row.parse_err("source", e))?,
        });
        Ok(())
    })?;
    Ok(out)
}
