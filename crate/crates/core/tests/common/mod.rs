//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the library's traversal or estimation code.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use nobelnet::{GenealogyGraph, MentorEdge, Scholar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixture")
}

/// A DAG on nodes `0..n` with edges `(professor, student)`.
#[derive(Debug, Clone)]
pub struct RawDag {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

pub fn node_id(i: usize) -> String {
    format!("n{i:02}")
}

impl RawDag {
    /// Random DAG: edges always run from earlier to later in a shuffled order.
    pub fn random(rng: &mut ChaCha8Rng, max_nodes: usize, max_edges: usize) -> Self {
        let n = rng.random_range(2..=max_nodes);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let m = rng.random_range(0..=max_edges.min(n * (n - 1) / 2));
        let mut set = BTreeSet::new();
        for _ in 0..m * 3 {
            if set.len() == m {
                break;
            }
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a < b {
                set.insert((order[a], order[b]));
            }
        }
        RawDag {
            n,
            edges: set.into_iter().collect(),
        }
    }

    pub fn seeded(seed: u64, max_nodes: usize, max_edges: usize) -> Self {
        RawDag::random(&mut ChaCha8Rng::seed_from_u64(seed), max_nodes, max_edges)
    }

    pub fn build(&self) -> GenealogyGraph {
        GenealogyGraph::build(
            (0..self.n).map(|i| Scholar::network_only(&node_id(i))),
            self.edges.iter().map(|&(p, s)| MentorEdge::new(&node_id(p), &node_id(s))),
        )
        .expect("random DAG is valid")
    }

    /// All-pairs shortest student-edge path lengths, `up[i][j]` = distance from
    /// `i` up to ancestor `j`. Floyd-Warshall over the full relation.
    pub fn ancestor_distances(&self) -> Vec<Vec<Option<u32>>> {
        let n = self.n;
        let mut d = vec![vec![None; n]; n];
        for i in 0..n {
            d[i][i] = Some(0);
        }
        for &(p, s) in &self.edges {
            d[s][p] = Some(1);
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                        if d[i][j].is_none_or(|c| a + b < c) {
                            d[i][j] = Some(a + b);
                        }
                    }
                }
            }
        }
        d
    }

    /// Nodes reachable from `i` by walks of exactly `degree` professor steps,
    /// found by enumerating every such walk.
    pub fn ancestors_exact(&self, i: usize, degree: u32) -> BTreeSet<usize> {
        fn walk(dag: &RawDag, u: usize, left: u32, out: &mut BTreeSet<usize>) {
            if left == 0 {
                out.insert(u);
                return;
            }
            for &(p, s) in &dag.edges {
                if s == u {
                    walk(dag, p, left - 1, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, i, degree, &mut out);
        out
    }
}

/// Harmonic closeness `(1/N) Σ 1/d` with unreachable targets contributing 0.
/// `dist(j)` is the distance to target `j`; `node` itself is skipped.
pub fn harmonic(node: usize, targets: &[usize], dist: impl Fn(usize) -> Option<f64>) -> f64 {
    let mut s = 0.0;
    for &j in targets {
        if j == node {
            continue;
        }
        if let Some(d) = dist(j) {
            s += 1.0 / d;
        }
    }
    s / targets.len() as f64
}

pub fn oracle_outcloseness(d: &[Vec<Option<u32>>], node: usize, targets: &[usize]) -> f64 {
    harmonic(node, targets, |j| d[node][j].map(f64::from))
}

pub fn oracle_incloseness(d: &[Vec<Option<u32>>], node: usize, targets: &[usize]) -> f64 {
    harmonic(node, targets, |j| d[j][node].map(f64::from))
}

/// Peer distance `min_n n·|A∪B|/|A∩B|` from enumerated ancestor sets.
pub fn oracle_peer_distance(dag: &RawDag, i: usize, j: usize, max_degree: u32) -> Option<f64> {
    let mut best: Option<f64> = None;
    for n in 1..=max_degree {
        let a = dag.ancestors_exact(i, n);
        let b = dag.ancestors_exact(j, n);
        let inter = a.intersection(&b).count();
        if inter == 0 {
            continue;
        }
        let union = a.union(&b).count();
        let d = f64::from(n) * union as f64 / inter as f64;
        if best.is_none_or(|x| d < x) {
            best = Some(d);
        }
    }
    best
}

pub fn oracle_crosscloseness(dag: &RawDag, node: usize, targets: &[usize], max_degree: u32) -> f64 {
    harmonic(node, targets, |j| oracle_peer_distance(dag, node, j, max_degree))
}

/// Binary-outcome log-likelihood written out directly.
pub fn loglik(probit: bool, x: &[Vec<f64>], y: &[f64], beta: &[f64]) -> f64 {
    let mut ll = 0.0;
    for (row, &yi) in x.iter().zip(y) {
        let eta: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
        // log P(y=1) and log P(y=0)
        let (l1, l0) = if probit {
            let phi = |z: f64| 0.5 * erfc(-z / std::f64::consts::SQRT_2);
            (phi(eta).ln(), phi(-eta).ln())
        } else {
            (-(1.0 + (-eta).exp()).ln(), -(1.0 + eta.exp()).ln())
        };
        ll += if yi == 1.0 { l1 } else { l0 };
    }
    ll
}

/// Exhaustive 2-parameter grid search: a coarse grid over `[-lim, lim]²`,
/// a fine grid around the coarse winner, and a tenfold finer one around that.
pub fn grid_argmax_2d(f: impl Fn(&[f64]) -> f64, lim: f64, coarse: f64, fine: f64) -> [f64; 2] {
    let scan = |c: [f64; 2], half: f64, step: f64| -> [f64; 2] {
        let k = (half / step).round() as i64;
        let mut best = (f64::NEG_INFINITY, c);
        for a in -k..=k {
            for b in -k..=k {
                let p = [c[0] + a as f64 * step, c[1] + b as f64 * step];
                let v = f(&p);
                if v > best.0 {
                    best = (v, p);
                }
            }
        }
        best.1
    };
    let c = scan([0.0, 0.0], lim, coarse);
    let c = scan(c, 2.0 * coarse, fine);
    scan(c, 5.0 * fine, fine / 10.0)
}

/// Derivative-free maximiser: evaluates the full 3^k stencil around the
/// current point, moves to the best neighbour, and halves the step when the
/// centre is already best.
pub fn stencil_argmax(f: impl Fn(&[f64]) -> f64, k: usize, start_step: f64, min_step: f64) -> Vec<f64> {
    let mut c = vec![0.0; k];
    let mut fc = f(&c);
    let mut step = start_step;
    let total = 3usize.pow(k as u32);
    while step >= min_step {
        let mut best = (fc, None);
        for code in 0..total {
            let mut p = c.clone();
            let mut r = code;
            for v in p.iter_mut() {
                *v += ((r % 3) as f64 - 1.0) * step;
                r /= 3;
            }
            let v = f(&p);
            if v > best.0 {
                best = (v, Some(p));
            }
        }
        match best.1 {
            Some(p) => {
                c = p;
                fc = best.0;
            }
            None => step /= 2.0,
        }
    }
    c
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, at: &[f64], h: f64) -> Vec<f64> {
    (0..at.len())
        .map(|i| {
            let mut a = at.to_vec();
            let mut b = at.to_vec();
            a[i] += h;
            b[i] -= h;
            (f(&a) - f(&b)) / (2.0 * h)
        })
        .collect()
}
