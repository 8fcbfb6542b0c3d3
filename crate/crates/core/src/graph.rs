//! The professor → student genealogy network.
//!
//! Nodes are stored densely and addressed by position; string ids are resolved
//! once through an index. Adjacency lists are kept sorted so that every
//! traversal visits neighbours in a fixed order.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::scholar::{MentorEdge, Scholar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("mentor edges contain a cycle: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("edge {professor} -> {student} names unknown scholar `{missing}`")]
    UnknownEndpoint {
        professor: String,
        student: String,
        missing: String,
    },
    #[error("scholar id `{0}` appears more than once")]
    DuplicateId(String),
    #[error("edge {0} -> {1} appears more than once")]
    DuplicateEdge(String, String),
    #[error("scholar `{0}` is listed as their own professor")]
    SelfLoop(String),
    #[error("invalid scholar `{id}`: {reason}")]
    InvalidScholar { id: String, reason: String },
    #[error("unknown scholar `{0}`")]
    UnknownNode(String),
    #[error("degree must be at least 1")]
    ZeroDegree,
}

/// Which way a shortest path may run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Student → professor → grandprofessor …
    TowardAncestors,
    /// Professor → student → grandstudent …
    TowardDescendants,
}

impl Direction {
    pub fn reverse(self) -> Self {
        match self {
            Direction::TowardAncestors => Direction::TowardDescendants,
            Direction::TowardDescendants => Direction::TowardAncestors,
        }
    }
}

/// Edge count along a directed path, or no path at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }

    /// As a float, with `Unreachable` mapped to +∞.
    pub fn as_f64(self) -> f64 {
        match self {
            Distance::Finite(d) => f64::from(d),
            Distance::Unreachable => f64::INFINITY,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Unreachable => f.write_str("unreachable"),
        }
    }
}

/// Immutable, validated directed acyclic mentor graph.
#[derive(Debug, Clone)]
pub struct GenealogyGraph {
    scholars: Vec<Scholar>,
    index: HashMap<String, usize>,
    students: Vec<Vec<usize>>,
    professors: Vec<Vec<usize>>,
    edge_count: usize,
}

impl GenealogyGraph {
    /// Validates records and edges and builds the graph.
    pub fn build(
        scholars: impl IntoIterator<Item = Scholar>,
        edges: impl IntoIterator<Item = MentorEdge>,
    ) -> Result<Self, GraphError> {
        let mut list = Vec::new();
        let mut index = HashMap::new();
        for mut s in scholars {
            s.id = s.id.trim().to_string();
            s.validate().map_err(|reason| GraphError::InvalidScholar {
                id: s.id.clone(),
                reason,
            })?;
            if index.insert(s.id.clone(), list.len()).is_some() {
                return Err(GraphError::DuplicateId(s.id));
            }
            list.push(s);
        }

        let n = list.len();
        let mut students = vec![Vec::new(); n];
        let mut professors = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for e in edges {
            let (p, s) = (e.professor_id.trim(), e.student_id.trim());
            let lookup = |id: &str| {
                index.get(id).copied().ok_or_else(|| GraphError::UnknownEndpoint {
                    professor: p.to_string(),
                    student: s.to_string(),
                    missing: id.to_string(),
                })
            };
            let (pi, si) = (lookup(p)?, lookup(s)?);
            if pi == si {
                return Err(GraphError::SelfLoop(p.to_string()));
            }
            if !seen.insert((pi, si)) {
                return Err(GraphError::DuplicateEdge(p.to_string(), s.to_string()));
            }
            students[pi].push(si);
            professors[si].push(pi);
        }
        for adj in students.iter_mut().chain(professors.iter_mut()) {
            adj.sort_unstable();
        }

        let graph = GenealogyGraph {
            scholars: list,
            index,
            students,
            professors,
            edge_count: seen.len(),
        };
        if let Err(cycle) = graph.topological_indices() {
            return Err(GraphError::CycleDetected(
                cycle.into_iter().map(|i| graph.scholars[i].id.clone()).collect(),
            ));
        }
        Ok(graph)
    }

    pub fn node_count(&self) -> usize {
        self.scholars.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn scholars(&self) -> &[Scholar] {
        &self.scholars
    }

    pub fn scholar(&self, id: &str) -> Option<&Scholar> {
        self.index.get(id).map(|&i| &self.scholars[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn index_of(&self, id: &str) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    pub fn scholar_at(&self, idx: usize) -> &Scholar {
        &self.scholars[idx]
    }

    /// Neighbour indices one step away in `direction`.
    pub fn neighbours(&self, idx: usize, direction: Direction) -> &[usize] {
        match direction {
            Direction::TowardAncestors => &self.professors[idx],
            Direction::TowardDescendants => &self.students[idx],
        }
    }

    pub fn professors_of(&self, id: &str) -> Result<Vec<&str>, GraphError> {
        let i = self.index_of(id)?;
        Ok(self.professors[i].iter().map(|&p| self.scholars[p].id.as_str()).collect())
    }

    pub fn students_of(&self, id: &str) -> Result<Vec<&str>, GraphError> {
        let i = self.index_of(id)?;
        Ok(self.students[i].iter().map(|&s| self.scholars[s].id.as_str()).collect())
    }

    /// All edges, ordered by (professor index, student index).
    pub fn edges(&self) -> impl Iterator<Item = MentorEdge> + '_ {
        self.students.iter().enumerate().flat_map(move |(p, studs)| {
            studs
                .iter()
                .map(move |&s| MentorEdge::new(&self.scholars[p].id, &self.scholars[s].id))
        })
    }

    /// Kahn's algorithm. On failure returns one cycle as node indices in
    /// professor → student order.
    fn topological_indices(&self) -> Result<Vec<usize>, Vec<usize>> {
        let n = self.node_count();
        let mut indeg: Vec<usize> = self.professors.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &v in &self.students[u] {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push_back(v);
                }
            }
        }
        if order.len() == n {
            return Ok(order);
        }
        // Every leftover node has a leftover professor; walk up until a repeat.
        let start = (0..n).find(|&i| indeg[i] > 0).expect("leftover node");
        let mut pos = HashMap::new();
        let mut path = Vec::new();
        let mut cur = start;
        while !pos.contains_key(&cur) {
            pos.insert(cur, path.len());
            path.push(cur);
            cur = *self.professors[cur]
                .iter()
                .find(|&&p| indeg[p] > 0)
                .expect("leftover professor");
        }
        let mut cycle = path.split_off(pos[&cur]);
        cycle.reverse();
        Err(cycle)
    }

    /// Scholar ids in an order where every professor precedes their students.
    pub fn topological_order(&self) -> Vec<&str> {
        self.topological_indices()
            .expect("graph validated acyclic at construction")
            .into_iter()
            .map(|i| self.scholars[i].id.as_str())
            .collect()
    }

    /// Breadth-first distances from `source` to every node, by index.
    pub fn distances_from_index(&self, source: usize, direction: Direction) -> Vec<Distance> {
        let mut dist = vec![Distance::Unreachable; self.node_count()];
        dist[source] = Distance::Finite(0);
        let mut queue = VecDeque::from([(source, 0u32)]);
        while let Some((u, d)) = queue.pop_front() {
            for &v in self.neighbours(u, direction) {
                if dist[v] == Distance::Unreachable {
                    dist[v] = Distance::Finite(d + 1);
                    queue.push_back((v, d + 1));
                }
            }
        }
        dist
    }

    pub fn distances_from(&self, id: &str, direction: Direction) -> Result<Vec<Distance>, GraphError> {
        Ok(self.distances_from_index(self.index_of(id)?, direction))
    }

    /// Shortest directed path length from `from` to `to`.
    pub fn directed_distance(
        &self,
        from: &str,
        to: &str,
        direction: Direction,
    ) -> Result<Distance, GraphError> {
        let (f, t) = (self.index_of(from)?, self.index_of(to)?);
        if f == t {
            return Ok(Distance::Finite(0));
        }
        let mut seen = vec![false; self.node_count()];
        seen[f] = true;
        let mut queue = VecDeque::from([(f, 0u32)]);
        while let Some((u, d)) = queue.pop_front() {
            for &v in self.neighbours(u, direction) {
                if v == t {
                    return Ok(Distance::Finite(d + 1));
                }
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back((v, d + 1));
                }
            }
        }
        Ok(Distance::Unreachable)
    }

    /// Indices reached by walking exactly `degree` professor edges.
    pub fn ancestor_indices(&self, idx: usize, degree: u32) -> BTreeSet<usize> {
        let mut frontier = BTreeSet::from([idx]);
        for _ in 0..degree {
            frontier = frontier
                .iter()
                .flat_map(|&u| self.professors[u].iter().copied())
                .collect();
            if frontier.is_empty() {
                break;
            }
        }
        frontier
    }

    /// Ids reached by walking exactly `degree` professor edges
    /// (1 = professors, 2 = grandprofessors, …).
    pub fn ancestor_set(&self, id: &str, degree: u32) -> Result<BTreeSet<String>, GraphError> {
        if degree == 0 {
            return Err(GraphError::ZeroDegree);
        }
        let i = self.index_of(id)?;
        Ok(self
            .ancestor_indices(i, degree)
            .into_iter()
            .map(|a| self.scholars[a].id.clone())
            .collect())
    }

    /// Induced subgraph on `root` and every node within `max_depth` student
    /// edges of it (`None` = unlimited).
    pub fn descendant_subgraph(
        &self,
        root: &str,
        max_depth: Option<u32>,
    ) -> Result<GenealogyGraph, GraphError> {
        let r = self.index_of(root)?;
        let dist = self.distances_from_index(r, Direction::TowardDescendants);
        let keep: Vec<bool> = dist
            .iter()
            .map(|d| match (d, max_depth) {
                (Distance::Finite(d), Some(m)) => *d <= m,
                (Distance::Finite(_), None) => true,
                (Distance::Unreachable, _) => false,
            })
            .collect();
        let scholars = self
            .scholars
            .iter()
            .zip(&keep)
            .filter(|(_, &k)| k)
            .map(|(s, _)| s.clone());
        let edges = self
            .edges()
            .filter(|e| keep[self.index[&e.professor_id]] && keep[self.index[&e.student_id]]);
        GenealogyGraph::build(scholars, edges)
    }
}
