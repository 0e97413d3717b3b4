use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocite::{IndexedGraph, NodeId, WeightedGraph};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DegreeCentrality {
    pub degree: BTreeMap<NodeId, usize>,
    /// `degree / (n - 1)`; zero for a single node.
    pub normalized_degree: BTreeMap<NodeId, f64>,
    /// Sum of incident weights.
    pub strength: BTreeMap<NodeId, f64>,
}

pub fn degree_centrality(g: &WeightedGraph) -> DegreeCentrality {
    let indexed = g.indexed();
    let n = indexed.len();
    let mut out = DegreeCentrality::default();
    for (i, id) in indexed.ids.iter().enumerate() {
        let degree = indexed.adjacency[i].len();
        let strength = indexed.adjacency[i].iter().map(|&(_, w)| w).sum();
        out.degree.insert(id.clone(), degree);
        out.normalized_degree
            .insert(id.clone(), if n > 1 { degree as f64 / (n - 1) as f64 } else { 0.0 });
        out.strength.insert(id.clone(), strength);
    }
    out
}

/// Brandes betweenness for an undirected graph, as unnormalized pair counts.
///
/// With `weighted`, edge weights are path lengths (pass a distance graph); otherwise every
/// edge counts as one hop.
pub fn betweenness_centrality(g: &WeightedGraph, weighted: bool) -> BTreeMap<NodeId, f64> {
    let indexed = g.indexed();
    let n = indexed.len();
    // Per-source dependencies are summed in source order so the result does not depend on
    // how rayon splits the work.
    let per_source: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| if weighted { dependencies_weighted(&indexed, s) } else { dependencies_hops(&indexed, s) })
        .collect();
    let mut total = vec![0.0; n];
    for deps in per_source {
        for (t, d) in total.iter_mut().zip(deps) {
            *t += d;
        }
    }
    indexed.ids.into_iter().zip(total).map(|(id, b)| (id, b / 2.0)).collect()
}

/// Back-propagates pair dependencies from a shortest-path DAG rooted at `s`.
fn accumulate(s: usize, order: &[usize], preds: &[Vec<usize>], sigma: &[f64]) -> Vec<f64> {
    let mut delta = vec![0.0; sigma.len()];
    for &w in order.iter().rev() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
    }
    delta[s] = 0.0;
    delta
}

fn dependencies_hops(g: &IndexedGraph, s: usize) -> Vec<f64> {
    let n = g.len();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0; n];
    let mut preds = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    dist[s] = 0;
    sigma[s] = 1.0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, _) in &g.adjacency[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    accumulate(s, &order, &preds, &sigma)
}

#[derive(PartialEq)]
struct Pending {
    dist: f64,
    node: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dependencies_weighted(g: &IndexedGraph, s: usize) -> Vec<f64> {
    let n = g.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut sigma = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    dist[s] = 0.0;
    sigma[s] = 1.0;
    let mut heap = BinaryHeap::from([Pending { dist: 0.0, node: s }]);
    while let Some(Pending { dist: d, node: v }) = heap.pop() {
        if settled[v] || d > dist[v] {
            continue;
        }
        settled[v] = true;
        order.push(v);
        for &(w, weight) in &g.adjacency[v] {
            let candidate = dist[v] + weight;
            if candidate < dist[w] {
                dist[w] = candidate;
                sigma[w] = sigma[v];
                preds[w].clear();
                preds[w].push(v);
                heap.push(Pending { dist: candidate, node: w });
            } else if candidate == dist[w] && !settled[w] {
                sigma[w] += sigma[v];
                preds[w].push(v);
            }
        }
    }
    accumulate(s, &order, &preds, &sigma)
}

/// Degree and betweenness indicators of one network.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CentralityReport {
    pub degree: BTreeMap<NodeId, usize>,
    pub normalized_degree: BTreeMap<NodeId, f64>,
    pub strength: BTreeMap<NodeId, f64>,
    pub betweenness: BTreeMap<NodeId, f64>,
}

impl CentralityReport {
    /// `similarities` supplies degree and strength; `distances`, when given, weighted
    /// betweenness. Without it betweenness counts hops.
    pub fn compute(similarities: &WeightedGraph, distances: Option<&WeightedGraph>) -> Self {
        let degrees = degree_centrality(similarities);
        let betweenness = match distances {
            Some(d) => betweenness_centrality(d, true),
            None => betweenness_centrality(similarities, false),
        };
        CentralityReport {
            degree: degrees.degree,
            normalized_degree: degrees.normalized_degree,
            strength: degrees.strength,
            betweenness,
        }
    }
}
