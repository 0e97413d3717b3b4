//! Louvain-style greedy modularity optimization.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::NetError;
use crate::cocite::{NodeId, WeightedGraph};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    pub assignment: BTreeMap<NodeId, usize>,
    pub modularity: f64,
}

impl CommunityPartition {
    pub fn community_count(&self) -> usize {
        self.assignment.values().max().map_or(0, |&c| c + 1)
    }
}

/// Newman modularity of a weighted undirected graph. Zero for a graph without edges.
pub fn modularity(g: &WeightedGraph, assignment: &BTreeMap<NodeId, usize>) -> Result<f64, NetError> {
    if let Some(id) = g.node_ids().find(|id| !assignment.contains_key(*id)) {
        return Err(NetError::UncoveredNode(id.clone()));
    }
    let m: f64 = g.edges().map(|(_, _, w)| w).sum();
    if m == 0.0 {
        return Ok(0.0);
    }
    let mut internal: BTreeMap<usize, f64> = BTreeMap::new();
    let mut total: BTreeMap<usize, f64> = BTreeMap::new();
    for (a, b, w) in g.edges() {
        let (ca, cb) = (assignment[a], assignment[b]);
        if ca == cb {
            *internal.entry(ca).or_default() += w;
        }
        *total.entry(ca).or_default() += w;
        *total.entry(cb).or_default() += w;
    }
    Ok(total
        .iter()
        .map(|(c, &tot)| {
            let inside = internal.get(c).copied().unwrap_or(0.0);
            let share = tot / (2.0 * m);
            inside / m - share * share
        })
        .sum())
}

/// Weighted graph over communities of the previous level; `loops[i]` holds twice the
/// weight inside node `i`.
struct Level {
    adjacency: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
}

impl Level {
    fn strength(&self, i: usize) -> f64 {
        self.loops[i] + self.adjacency[i].iter().map(|&(_, w)| w).sum::<f64>()
    }

    /// One round of local moves. Returns the community of each node, or `None` if no node
    /// moved.
    fn local_moves(&self, resolution: f64, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
        let n = self.adjacency.len();
        let strength: Vec<f64> = (0..n).map(|i| self.strength(i)).collect();
        let two_m: f64 = strength.iter().sum();
        if two_m == 0.0 {
            return None;
        }
        let mut community: Vec<usize> = (0..n).collect();
        let mut total = strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut moved_any = false;
        for _pass in 0..1000 {
            let mut moved = false;
            for &i in &order {
                let own = community[i];
                let mut links: BTreeMap<usize, f64> = BTreeMap::new();
                links.insert(own, 0.0);
                for &(j, w) in &self.adjacency[i] {
                    *links.entry(community[j]).or_default() += w;
                }
                total[own] -= strength[i];
                let gain = |c: usize, into: f64| into - resolution * total[c] * strength[i] / two_m;
                let mut best = own;
                let mut best_gain = gain(own, links[&own]);
                for (&c, &into) in &links {
                    let g = gain(c, into);
                    if g > best_gain + 1e-12 {
                        best = c;
                        best_gain = g;
                    }
                }
                total[best] += strength[i];
                if best != own {
                    community[i] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        moved_any.then_some(community)
    }

    /// Collapses each community into one node. Returns the new level and the mapping.
    fn aggregate(&self, community: &[usize]) -> (Level, Vec<usize>) {
        let mut renumber: BTreeMap<usize, usize> = BTreeMap::new();
        let mapping: Vec<usize> = community
            .iter()
            .map(|c| {
                let next = renumber.len();
                *renumber.entry(*c).or_insert(next)
            })
            .collect();
        let k = renumber.len();
        let mut weights: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
        let mut loops = vec![0.0; k];
        for (i, &ci) in mapping.iter().enumerate() {
            loops[ci] += self.loops[i];
            for &(j, w) in &self.adjacency[i] {
                let cj = mapping[j];
                if ci == cj {
                    loops[ci] += w;
                } else {
                    *weights[ci].entry(cj).or_default() += w;
                }
            }
        }
        let adjacency = weights.into_iter().map(|m| m.into_iter().collect()).collect();
        (Level { adjacency, loops }, mapping)
    }
}

/// Greedy modularity communities. Node visit order is shuffled from `seed`, so equal seeds
/// give equal partitions. Communities are numbered by their smallest node id.
pub fn louvain_communities(
    g: &WeightedGraph,
    resolution: f64,
    seed: u64,
) -> Result<CommunityPartition, NetError> {
    if g.is_empty() {
        return Err(NetError::EmptyGraph);
    }
    let indexed = g.indexed();
    let n = indexed.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level { adjacency: indexed.adjacency.clone(), loops: vec![0.0; n] };
    let mut membership: Vec<usize> = (0..n).collect();
    while let Some(community) = level.local_moves(resolution, &mut rng) {
        let (next, mapping) = level.aggregate(&community);
        for m in membership.iter_mut() {
            *m = mapping[*m];
        }
        let shrank = next.adjacency.len() < level.adjacency.len();
        level = next;
        if !shrank {
            break;
        }
    }
    // Relabel by first appearance in id order.
    let mut relabel: BTreeMap<usize, usize> = BTreeMap::new();
    let assignment: BTreeMap<NodeId, usize> = indexed
        .ids
        .iter()
        .zip(&membership)
        .map(|(id, &c)| {
            let next = relabel.len();
            (id.clone(), *relabel.entry(c).or_insert(next))
        })
        .collect();
    let q = modularity(g, &assignment)?;
    Ok(CommunityPartition { assignment, modularity: q })
}
