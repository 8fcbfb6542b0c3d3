//! Pairs of laureates where one won after a related earlier laureate.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{Direction, GenealogyGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// The earlier laureate was a professor of the later one.
    Professor,
    /// The earlier laureate was a student of the later one.
    Student,
    /// The two share at least one professor or grandprofessor.
    Peer,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Professor, Relation::Student, Relation::Peer];

    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Professor => "professor",
            Relation::Student => "student",
            Relation::Peer => "peer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WonAfter {
    pub later: String,
    pub earlier: String,
    pub later_year: i32,
    pub earlier_year: i32,
}

/// One later winner with every related earlier winner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WonAfterEntry {
    pub later: String,
    pub later_year: i32,
    pub earlier: Vec<(String, i32)>,
}

/// Laureate pairs `(i, j)` with `win_i > win_j` and `j` related to `i` as
/// `kind`. Professor and student relations are direct edges; peers share an
/// ancestor at some degree in `1..=peer_degree`. Sorted by later year, then ids.
pub fn won_after(graph: &GenealogyGraph, kind: Relation, peer_degree: u32) -> Vec<WonAfter> {
    let laureates: Vec<usize> = (0..graph.node_count())
        .filter(|&i| graph.scholar_at(i).is_laureate())
        .collect();
    let ancestors: Vec<Vec<BTreeSet<usize>>> = if kind == Relation::Peer {
        laureates
            .iter()
            .map(|&i| (1..=peer_degree).map(|d| graph.ancestor_indices(i, d)).collect())
            .collect()
    } else {
        Vec::new()
    };

    let mut out = Vec::new();
    for (a, &i) in laureates.iter().enumerate() {
        for (b, &j) in laureates.iter().enumerate() {
            let (si, sj) = (graph.scholar_at(i), graph.scholar_at(j));
            let (wi, wj) = (si.win_year.unwrap(), sj.win_year.unwrap());
            if wi <= wj {
                continue;
            }
            let related = match kind {
                Relation::Professor => graph.neighbours(i, Direction::TowardAncestors).contains(&j),
                Relation::Student => graph.neighbours(i, Direction::TowardDescendants).contains(&j),
                Relation::Peer => ancestors[a]
                    .iter()
                    .zip(&ancestors[b])
                    .any(|(x, y)| !x.is_disjoint(y)),
            };
            if related {
                out.push(WonAfter {
                    later: si.id.clone(),
                    earlier: sj.id.clone(),
                    later_year: wi,
                    earlier_year: wj,
                });
            }
        }
    }
    out.sort_by(|x, y| {
        (x.later_year, &x.later, x.earlier_year, &x.earlier).cmp(&(y.later_year, &y.later, y.earlier_year, &y.earlier))
    });
    out
}

/// Collapses pairs sharing a later winner into one entry each.
pub fn group_by_later(pairs: &[WonAfter]) -> Vec<WonAfterEntry> {
    let mut out: Vec<WonAfterEntry> = Vec::new();
    for p in pairs {
        match out.last_mut() {
            Some(e) if e.later == p.later => e.earlier.push((p.earlier.clone(), p.earlier_year)),
            _ => out.push(WonAfterEntry {
                later: p.later.clone(),
                later_year: p.later_year,
                earlier: vec![(p.earlier.clone(), p.earlier_year)],
            }),
        }
    }
    out
}
