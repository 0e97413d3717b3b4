//! Pathfinder network scaling.
//!
//! An edge survives when no path of at most `q` edges is strictly shorter than it under
//! the Minkowski-`r` path length. For finite `r` lengths are compared as sums of `d^r`,
//! which orders paths the same way as `(Σ d^r)^(1/r)`; for `r = ∞` the length is the
//! largest edge on the path.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DistanceGraph, NetError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Minkowski {
    Finite(f64),
    Infinite,
}

impl fmt::Display for Minkowski {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Minkowski::Finite(r) => write!(f, "{r}"),
            Minkowski::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Minkowski {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Minkowski::Infinite),
            other => other
                .parse::<f64>()
                .map(Minkowski::Finite)
                .map_err(|_| NetError::InvalidParams(format!("r must be a number or inf, got {s:?}"))),
        }
    }
}

/// Maximum number of edges in a competing path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathLength {
    /// `n - 1`: any simple path.
    Max,
    Edges(usize),
}

impl FromStr for PathLength {
    type Err = NetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "max" | "n-1" => Ok(PathLength::Max),
            other => other
                .parse::<usize>()
                .map(PathLength::Edges)
                .map_err(|_| NetError::InvalidParams(format!("q must be a count or max, got {s:?}"))),
        }
    }
}

impl fmt::Display for PathLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathLength::Max => f.write_str("max"),
            PathLength::Edges(q) => write!(f, "{q}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathfinderParams {
    pub r: Minkowski,
    pub q: PathLength,
}

impl Default for PathfinderParams {
    fn default() -> Self {
        PathfinderParams { r: Minkowski::Infinite, q: PathLength::Max }
    }
}

impl PathfinderParams {
    pub fn validate(&self) -> Result<(), NetError> {
        if let Minkowski::Finite(r) = self.r {
            if !(r >= 1.0 && r.is_finite()) {
                return Err(NetError::InvalidParams(format!("r = {r} must be >= 1")));
            }
        }
        if self.q == PathLength::Edges(0) {
            return Err(NetError::InvalidParams("q must be at least 1".into()));
        }
        Ok(())
    }

    /// `q` for a graph of `n` nodes, capped at `n - 1`.
    fn resolved_q(&self, n: usize) -> usize {
        let max = n.saturating_sub(1).max(1);
        match self.q {
            PathLength::Max => max,
            PathLength::Edges(q) => q.min(max),
        }
    }
}

/// Path algebra: how edge costs combine along a path.
#[derive(Clone, Copy)]
enum Combine {
    Sum,
    Max,
}

impl Combine {
    #[inline]
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Combine::Sum => a + b,
            Combine::Max => a.max(b),
        }
    }
}

/// Computes the PFNET of `g`. Retained edges keep their weights.
pub fn pathfinder(g: &DistanceGraph, params: PathfinderParams) -> Result<DistanceGraph, NetError> {
    params.validate()?;
    let indexed = g.graph().indexed();
    let n = indexed.len();
    if indexed.edges.is_empty() {
        return Ok(g.clone());
    }
    let (combine, cost): (Combine, Box<dyn Fn(f64) -> f64 + Sync>) = match params.r {
        Minkowski::Infinite => (Combine::Max, Box::new(|d| d)),
        Minkowski::Finite(1.0) => (Combine::Sum, Box::new(|d| d)),
        Minkowski::Finite(r) => (Combine::Sum, Box::new(move |d: f64| d.powf(r))),
    };

    let mut direct = vec![f64::INFINITY; n * n];
    for &(i, j, d) in &indexed.edges {
        let c = cost(d);
        direct[i * n + j] = c;
        direct[j * n + i] = c;
    }

    let q = params.resolved_q(n);
    let shortest = if q + 1 >= n {
        closure(&direct, n, combine)
    } else {
        bounded_paths(&direct, n, q, combine)
    };

    let mut out = g.graph().clone();
    let position: std::collections::BTreeMap<&str, usize> =
        indexed.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    out.retain_edges(|a, b, _| {
        let k = position[a] * n + position[b];
        // Ties keep the edge.
        shortest[k] >= direct[k]
    });
    Ok(DistanceGraph::from_distances(out))
}

/// Shortest path costs over paths of any length (Floyd-Warshall in the given algebra).
fn closure(direct: &[f64], n: usize, combine: Combine) -> Vec<f64> {
    let mut dist = direct.to_vec();
    for i in 0..n {
        dist[i * n + i] = 0.0;
    }
    for k in 0..n {
        // Row k is unchanged during step k, so rows update independently.
        let row_k: Vec<f64> = dist[k * n..(k + 1) * n].to_vec();
        dist.par_chunks_mut(n).for_each(|row| {
            let via = row[k];
            if via.is_infinite() {
                return;
            }
            for (cell, &tail) in row.iter_mut().zip(&row_k) {
                let candidate = combine.apply(via, tail);
                if candidate < *cell {
                    *cell = candidate;
                }
            }
        });
    }
    dist
}

/// Shortest path costs over paths of at most `q` edges, by repeated products with `direct`.
fn bounded_paths(direct: &[f64], n: usize, q: usize, combine: Combine) -> Vec<f64> {
    let mut dist = direct.to_vec();
    for _ in 1..q {
        let prev = dist.clone();
        dist.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let prev_row = &prev[i * n..(i + 1) * n];
            for (m, &head) in prev_row.iter().enumerate() {
                if head.is_infinite() {
                    continue;
                }
                let direct_row = &direct[m * n..(m + 1) * n];
                for (cell, &tail) in row.iter_mut().zip(direct_row) {
                    let candidate = combine.apply(head, tail);
                    if candidate < *cell {
                        *cell = candidate;
                    }
                }
            }
        });
    }
    dist
}

/// PFNET with `r = ∞, q = n - 1`: the union of all minimum spanning forests.
///
/// An edge lies on some minimum spanning forest exactly when its endpoints are not
/// already joined by strictly lighter edges.
pub fn pathfinder_mst(g: &DistanceGraph) -> DistanceGraph {
    let indexed = g.graph().indexed();
    let mut edges = indexed.edges.clone();
    edges.sort_by(|a, b| a.2.total_cmp(&b.2));
    let mut forest = DisjointSets::new(indexed.len());
    let mut keep = vec![false; indexed.len() * indexed.len()];
    let n = indexed.len();
    let mut start = 0;
    while start < edges.len() {
        let weight = edges[start].2;
        let end = start + edges[start..].iter().take_while(|e| e.2 == weight).count();
        for &(i, j, _) in &edges[start..end] {
            if forest.find(i) != forest.find(j) {
                keep[i * n + j] = true;
            }
        }
        for &(i, j, _) in &edges[start..end] {
            forest.union(i, j);
        }
        start = end;
    }
    let position: std::collections::BTreeMap<&str, usize> =
        indexed.ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let mut out = g.graph().clone();
    out.retain_edges(|a, b, _| keep[position[a] * n + position[b]]);
    DistanceGraph::from_distances(out)
}

struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
    }
}
