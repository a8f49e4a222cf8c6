use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simple undirected graph; edges are stored as `(u, v)` with `u < v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (u, v) in edges {
            let limit = n_nodes;
            if u >= limit || v >= limit {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v),
                    limit,
                });
            }
            if u == v {
                return Err(Error::ConfigInvalid(format!("self-loop on node {u}")));
            }
            out.push((u.min(v), u.max(v)));
        }
        let mut sorted = out.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::ConfigInvalid(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Graph {
            n_nodes,
            edges: out,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n_nodes];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn complete(n_nodes: usize) -> Self {
        let edges = (0..n_nodes)
            .flat_map(|u| (u + 1..n_nodes).map(move |v| (u, v)))
            .collect();
        Graph { n_nodes, edges }
    }
}

/// Random graph family and its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum GraphSpec {
    /// Barabási–Albert preferential attachment.
    Ba { n_nodes: usize, affinity: usize },
    /// Erdős–Rényi `G(n, p)`.
    Er { n_nodes: usize, edge_prob: f64 },
}

impl GraphSpec {
    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Graph> {
        match *self {
            GraphSpec::Ba { n_nodes, affinity } => gen_ba_graph(n_nodes, affinity, rng),
            GraphSpec::Er { n_nodes, edge_prob } => gen_er_graph(n_nodes, edge_prob, rng),
        }
    }

    pub fn n_nodes(&self) -> usize {
        match *self {
            GraphSpec::Ba { n_nodes, .. } | GraphSpec::Er { n_nodes, .. } => n_nodes,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            GraphSpec::Ba { n_nodes, affinity } => format!("ba{n_nodes}x{affinity}"),
            GraphSpec::Er { n_nodes, edge_prob } => format!("er{n_nodes}p{edge_prob}"),
        }
    }
}

/// Edge probability giving expected average degree `degree` on `n` nodes.
pub fn er_prob_for_degree(degree: f64, n: usize) -> f64 {
    if n < 2 {
        0.0
    } else {
        (degree / (n - 1) as f64).clamp(0.0, 1.0)
    }
}

/// Barabási–Albert graph: nodes `0..affinity` start edgeless, every later
/// node attaches to `affinity` distinct earlier nodes chosen with probability
/// proportional to degree (uniformly while all degrees are zero). Yields
/// exactly `affinity·(n − affinity)` edges.
pub fn gen_ba_graph<R: Rng + ?Sized>(n: usize, affinity: usize, rng: &mut R) -> Result<Graph> {
    if affinity < 1 || affinity >= n {
        return Err(Error::InvalidAffinity { affinity, n });
    }
    let mut edges = Vec::with_capacity(affinity * (n - affinity));
    // every edge endpoint once: sampling from it is degree-proportional
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * affinity * (n - affinity));
    let mut mark = vec![usize::MAX; n];
    let mut targets = Vec::with_capacity(affinity);
    for v in affinity..n {
        targets.clear();
        if endpoints.is_empty() {
            // all existing nodes have degree zero; with exactly `affinity` of
            // them a uniform distinct draw takes them all
            targets.extend(0..v);
        } else {
            while targets.len() < affinity {
                let t = endpoints[rng.gen_range(0..endpoints.len())];
                if mark[t] != v {
                    mark[t] = v;
                    targets.push(t);
                }
            }
        }
        for &t in &targets {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Ok(Graph { n_nodes: n, edges })
}

/// Erdős–Rényi `G(n, p)`: each unordered pair independently with
/// probability `p`.
pub fn gen_er_graph<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph { n_nodes: n, edges })
}
