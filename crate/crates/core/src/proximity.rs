//! Closeness of a scholar to earlier laureates.
//!
//! Three directions are measured on the genealogy:
//!
//! * **outcloseness**: laureate professors, grandprofessors, … (ancestry);
//! * **incloseness**: laureate students, grandstudents, … (descent);
//! * **crosscloseness**: laureate peers who share (grand)professors.
//!
//! All three are the inverse of a power (Hölder) mean of distances to the set
//! of earlier laureates,
//!
//! ```text
//! D_i(h) = ( (1/N) Σ_j D_ij^h )^(1/h),     C_i = D_i(h)^-1
//! ```
//!
//! With `h = -1` this is the harmonic mean, so `C_i = (1/N) Σ_j 1/D_ij`: one
//! point per laureate professor, half a point per laureate grandprofessor and
//! so on, divided by the number of earlier laureates. Unreachable laureates
//! have infinite distance and contribute nothing when `h < 0`.
//!
//! Peer distance at degree `n` is `n / J_n`, where `J_n` is the Jaccard overlap
//! of the two scholars' degree-`n` ancestor sets; a peer counts once, at the
//! degree that makes them closest.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Direction, Distance, GenealogyGraph, GraphError};
use crate::scholar::Scholar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProximityError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("horizontal proximity of `{0}` to itself is undefined")]
    SameNode(String),
    #[error("the target set for year {0} is empty")]
    EmptyTargets(i32),
    #[error("Hölder exponent must be non-zero and finite, got {0}")]
    InvalidExponent(f64),
    #[error("relative scaling needs at least one value")]
    EmptyInput,
    #[error("value for `{0}` is negative or not finite")]
    InvalidValue(String),
}

/// Laureates who won strictly before `year`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NobelSet {
    year: i32,
    members: BTreeSet<String>,
}

impl NobelSet {
    pub fn new(year: i32, members: impl IntoIterator<Item = String>) -> Self {
        NobelSet {
            year,
            members: members.into_iter().collect(),
        }
    }

    /// Everyone in `scholars` with `win_year < year`.
    pub fn at<'a>(scholars: impl IntoIterator<Item = &'a Scholar>, year: i32) -> Self {
        NobelSet::new(
            year,
            scholars
                .into_iter()
                .filter(|s| s.win_year.is_some_and(|w| w < year))
                .map(|s| s.id.clone()),
        )
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn count(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in ascending id order.
    pub fn members(&self) -> &BTreeSet<String> {
        &self.members
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.contains(id)
    }
}

/// A distance stored as the ratio `num / den`, so that integer path lengths
/// and Jaccard-based peer distances stay exact until the final power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    fn whole(n: u32) -> Self {
        Ratio {
            num: u64::from(n),
            den: 1,
        }
    }

    fn cmp_value(&self, other: &Ratio) -> Ordering {
        (u128::from(self.num) * u128::from(other.den)).cmp(&(u128::from(other.num) * u128::from(self.den)))
    }

    fn powf(self, h: f64) -> f64 {
        let (n, d) = (self.num as f64, self.den as f64);
        if h == 1.0 {
            n / d
        } else if h == -1.0 {
            d / n
        } else {
            (n / d).powf(h)
        }
    }
}

fn check_exponent(h: f64) -> Result<(), ProximityError> {
    if h == 0.0 || !h.is_finite() {
        Err(ProximityError::InvalidExponent(h))
    } else {
        Ok(())
    }
}

/// `(1/N) Σ D^h` over per-target distances; `None` is an unreachable target.
fn power_sum_mean(terms: impl IntoIterator<Item = Option<Ratio>>, count: usize, h: f64) -> f64 {
    let mut sum = 0.0;
    for t in terms {
        match t {
            Some(r) => sum += r.powf(h),
            None if h > 0.0 => return f64::INFINITY,
            None => {}
        }
    }
    sum / count as f64
}

fn mean_to_distance(mean: f64, h: f64) -> f64 {
    if h == 1.0 {
        mean
    } else if h == -1.0 {
        1.0 / mean
    } else {
        mean.powf(1.0 / h)
    }
}

fn mean_to_closeness(mean: f64, h: f64) -> f64 {
    if h == -1.0 {
        mean
    } else if h == 1.0 {
        1.0 / mean
    } else {
        mean.powf(-1.0 / h)
    }
}

fn vertical_terms<'a>(
    graph: &'a GenealogyGraph,
    node: usize,
    targets: &'a NobelSet,
    direction: Direction,
) -> Result<impl Iterator<Item = Option<Ratio>> + 'a, ProximityError> {
    let dist = graph.distances_from_index(node, direction);
    let mut idx = Vec::with_capacity(targets.count());
    for id in targets.members() {
        let j = graph.index_of(id)?;
        if j != node {
            idx.push(j);
        }
    }
    Ok(idx.into_iter().map(move |j| dist[j].finite().map(Ratio::whole)))
}

/// Power mean of the directed distances from `node` to every target.
///
/// Returns `f64::INFINITY` when `h > 0` and some target is unreachable, or when
/// `h < 0` and none is reachable. `node` itself is skipped if it is a target.
pub fn holder_distance(
    graph: &GenealogyGraph,
    node: &str,
    targets: &NobelSet,
    h: f64,
    direction: Direction,
) -> Result<f64, ProximityError> {
    check_exponent(h)?;
    if targets.is_empty() {
        return Err(ProximityError::EmptyTargets(targets.year()));
    }
    let i = graph.index_of(node)?;
    let mean = power_sum_mean(vertical_terms(graph, i, targets, direction)?, targets.count(), h);
    Ok(mean_to_distance(mean, h))
}

fn vertical_closeness(
    graph: &GenealogyGraph,
    node: &str,
    targets: &NobelSet,
    h: f64,
    direction: Direction,
) -> Result<f64, ProximityError> {
    check_exponent(h)?;
    if targets.is_empty() {
        return Err(ProximityError::EmptyTargets(targets.year()));
    }
    let i = graph.index_of(node)?;
    let mean = power_sum_mean(vertical_terms(graph, i, targets, direction)?, targets.count(), h);
    Ok(mean_to_closeness(mean, h))
}

/// Closeness to laureate ancestors (harmonic form).
pub fn outcloseness(graph: &GenealogyGraph, node: &str, targets: &NobelSet) -> Result<f64, ProximityError> {
    vertical_closeness(graph, node, targets, -1.0, Direction::TowardAncestors)
}

/// Closeness to laureate descendants (harmonic form).
pub fn incloseness(graph: &GenealogyGraph, node: &str, targets: &NobelSet) -> Result<f64, ProximityError> {
    vertical_closeness(graph, node, targets, -1.0, Direction::TowardDescendants)
}

fn jaccard_counts(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> (u64, u64) {
    let inter = a.intersection(b).count() as u64;
    let union = (a.len() + b.len()) as u64 - inter;
    (inter, union)
}

/// Jaccard overlap of the degree-`degree` ancestor sets of `i` and `j`.
/// One for full siblings; zero when nothing is shared or either set is empty.
pub fn horizontal_proximity(
    graph: &GenealogyGraph,
    i: &str,
    j: &str,
    degree: u32,
) -> Result<f64, ProximityError> {
    if degree == 0 {
        return Err(GraphError::ZeroDegree.into());
    }
    let (a, b) = (graph.index_of(i)?, graph.index_of(j)?);
    if a == b {
        return Err(ProximityError::SameNode(i.to_string()));
    }
    let (inter, union) = jaccard_counts(&graph.ancestor_indices(a, degree), &graph.ancestor_indices(b, degree));
    Ok(if inter == 0 { 0.0 } else { inter as f64 / union as f64 })
}

/// Ancestor sets per degree, 1..=max_degree, for every node.
#[derive(Debug, Clone)]
struct AncestorCache {
    by_degree: Vec<Vec<BTreeSet<usize>>>,
}

impl AncestorCache {
    fn new(graph: &GenealogyGraph, max_degree: u32) -> Self {
        let by_degree = (0..graph.node_count())
            .map(|i| {
                let mut levels = Vec::with_capacity(max_degree as usize);
                let mut frontier = BTreeSet::from([i]);
                for _ in 0..max_degree {
                    frontier = frontier
                        .iter()
                        .flat_map(|&u| graph.neighbours(u, Direction::TowardAncestors).iter().copied())
                        .collect();
                    levels.push(frontier.clone());
                }
                levels
            })
            .collect();
        AncestorCache { by_degree }
    }

    /// Smallest horizontal distance `n·|∪|/|∩|` over degrees, if any overlap.
    fn peer_distance(&self, i: usize, j: usize) -> Option<Ratio> {
        let mut best: Option<Ratio> = None;
        for (n, (a, b)) in self.by_degree[i].iter().zip(&self.by_degree[j]).enumerate() {
            let (inter, union) = jaccard_counts(a, b);
            if inter == 0 {
                continue;
            }
            let d = Ratio {
                num: (n as u64 + 1) * union,
                den: inter,
            };
            if best.is_none_or(|b| d.cmp_value(&b) == Ordering::Less) {
                best = Some(d);
            }
        }
        best
    }
}

/// Closeness to laureate peers: `(1/N) Σ_j max_n J_n(node, j) / n`.
pub fn crosscloseness(
    graph: &GenealogyGraph,
    node: &str,
    targets: &NobelSet,
    max_degree: u32,
) -> Result<f64, ProximityError> {
    if max_degree == 0 {
        return Err(GraphError::ZeroDegree.into());
    }
    if targets.is_empty() {
        return Err(ProximityError::EmptyTargets(targets.year()));
    }
    let i = graph.index_of(node)?;
    let cache = AncestorCache::new(graph, max_degree);
    let mut terms = Vec::with_capacity(targets.count());
    for id in targets.members() {
        let j = graph.index_of(id)?;
        if j != i {
            terms.push(cache.peer_distance(i, j));
        }
    }
    Ok(power_sum_mean(terms, targets.count(), -1.0))
}

/// Divides every value by the year's maximum. An all-zero year stays zero.
pub fn relative_scale(values: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>, ProximityError> {
    if values.is_empty() {
        return Err(ProximityError::EmptyInput);
    }
    if let Some((k, _)) = values.iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(ProximityError::InvalidValue(k.clone()));
    }
    let max = values.values().copied().fold(0.0, f64::max);
    Ok(values
        .iter()
        .map(|(k, &v)| (k.clone(), if max > 0.0 { v / max } else { 0.0 }))
        .collect())
}

/// The nine closeness measures carried per scholar-year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Prof,
    Student,
    Peer,
    ProfLiving,
    ProfDeceased,
    ProfRecent,
    ProfEarlier,
    PeerRecent,
    PeerEarlier,
}

impl Measure {
    pub const ALL: [Measure; 9] = [
        Measure::Prof,
        Measure::Student,
        Measure::Peer,
        Measure::ProfLiving,
        Measure::ProfDeceased,
        Measure::ProfRecent,
        Measure::ProfEarlier,
        Measure::PeerRecent,
        Measure::PeerEarlier,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Prof => "prof",
            Measure::Student => "student",
            Measure::Peer => "peer",
            Measure::ProfLiving => "prof_living",
            Measure::ProfDeceased => "prof_deceased",
            Measure::ProfRecent => "prof_recent",
            Measure::ProfEarlier => "prof_earlier",
            Measure::PeerRecent => "peer_recent",
            Measure::PeerEarlier => "peer_earlier",
        }
    }

    pub fn parse(s: &str) -> Option<Measure> {
        Measure::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

/// One value per [`Measure`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Measures([f64; 9]);

impl Measures {
    pub fn get(&self, m: Measure) -> f64 {
        self.0[m as usize]
    }

    pub fn set(&mut self, m: Measure, v: f64) {
        self.0[m as usize] = v;
    }
}

/// Raw and year-relative closeness for one scholar in one panel year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityVector {
    pub scholar: String,
    pub year: i32,
    pub raw: Measures,
    pub rel: Measures,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityConfig {
    /// Power-mean exponent; -1 gives the harmonic point scheme.
    pub h: f64,
    pub max_peer_degree: u32,
    /// A laureate is "recent" in year t when `t - win_year <= recent_window`.
    pub recent_window: i32,
}

impl Default for ProximityConfig {
    fn default() -> Self {
        ProximityConfig {
            h: -1.0,
            max_peer_degree: 2,
            recent_window: 10,
        }
    }
}

/// Precomputed traversals for evaluating many (scholar, year) pairs.
#[derive(Debug, Clone)]
pub struct ProximityEngine<'g> {
    graph: &'g GenealogyGraph,
    config: ProximityConfig,
    ancestors: AncestorCache,
    laureates: Vec<usize>,
}

impl<'g> ProximityEngine<'g> {
    pub fn new(graph: &'g GenealogyGraph, config: ProximityConfig) -> Result<Self, ProximityError> {
        check_exponent(config.h)?;
        if config.max_peer_degree == 0 {
            return Err(GraphError::ZeroDegree.into());
        }
        let mut laureates: Vec<usize> = (0..graph.node_count())
            .filter(|&i| graph.scholar_at(i).is_laureate())
            .collect();
        laureates.sort_by(|&a, &b| graph.scholar_at(a).id.cmp(&graph.scholar_at(b).id));
        Ok(ProximityEngine {
            graph,
            config,
            ancestors: AncestorCache::new(graph, config.max_peer_degree),
            laureates,
        })
    }

    pub fn config(&self) -> &ProximityConfig {
        &self.config
    }

    /// Raw measures for each id in `scholars` against the laureates of years
    /// before `year`. Errors if there are no such laureates.
    pub fn raw_measures(&self, scholars: &[&str], year: i32) -> Result<Vec<Measures>, ProximityError> {
        let h = self.config.h;
        let members: Vec<usize> = self
            .laureates
            .iter()
            .copied()
            .filter(|&j| self.graph.scholar_at(j).win_year.is_some_and(|w| w < year))
            .collect();
        if members.is_empty() {
            return Err(ProximityError::EmptyTargets(year));
        }
        let n = members.len();
        scholars
            .iter()
            .map(|id| {
                let i = self.graph.index_of(id)?;
                let up = self.graph.distances_from_index(i, Direction::TowardAncestors);
                let down = self.graph.distances_from_index(i, Direction::TowardDescendants);
                let ratio = |d: Distance| d.finite().map(Ratio::whole);
                let mut groups: BTreeMap<Measure, Vec<Option<Ratio>>> = BTreeMap::new();
                for &j in members.iter().filter(|&&j| j != i) {
                    let lau = self.graph.scholar_at(j);
                    let win = lau.win_year.expect("member is a laureate");
                    let recent = year - win <= self.config.recent_window;
                    let prof = ratio(up[j]);
                    let peer = self.ancestors.peer_distance(i, j);
                    let mut push = |m: Measure, t: Option<Ratio>| groups.entry(m).or_default().push(t);
                    push(Measure::Prof, prof);
                    push(Measure::Student, ratio(down[j]));
                    push(Measure::Peer, peer);
                    // Each split keeps the full N; the complement contributes an unreachable term.
                    let (living, deceased) = if lau.alive_in(year) { (prof, None) } else { (None, prof) };
                    push(Measure::ProfLiving, living);
                    push(Measure::ProfDeceased, deceased);
                    let (pr, pe) = if recent { (prof, None) } else { (None, prof) };
                    push(Measure::ProfRecent, pr);
                    push(Measure::ProfEarlier, pe);
                    let (qr, qe) = if recent { (peer, None) } else { (None, peer) };
                    push(Measure::PeerRecent, qr);
                    push(Measure::PeerEarlier, qe);
                }
                let mut out = Measures::default();
                for m in Measure::ALL {
                    let terms = groups.remove(&m).unwrap_or_default();
                    // a split with h > 0 sees unreachable complements as infinite
                    let mean = power_sum_mean(terms, n, h);
                    out.set(m, mean_to_closeness(mean, h));
                }
                Ok(out)
            })
            .collect()
    }

    /// Raw and relative measures for a year's shortlist, scaled by the
    /// shortlist maximum of each measure.
    pub fn year_vectors(&self, shortlist: &[&str], year: i32) -> Result<Vec<ProximityVector>, ProximityError> {
        let raw = self.raw_measures(shortlist, year)?;
        let mut maxima = Measures::default();
        for m in Measure::ALL {
            maxima.set(m, raw.iter().map(|r| r.get(m)).fold(0.0, f64::max));
        }
        Ok(shortlist
            .iter()
            .zip(raw)
            .map(|(id, raw)| {
                let mut rel = Measures::default();
                for m in Measure::ALL {
                    let max = maxima.get(m);
                    rel.set(m, if max > 0.0 { raw.get(m) / max } else { 0.0 });
                }
                ProximityVector {
                    scholar: id.to_string(),
                    year,
                    raw,
                    rel,
                }
            })
            .collect())
    }
}
