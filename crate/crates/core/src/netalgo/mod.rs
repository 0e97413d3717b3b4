//! Network scaling, centrality, and community detection.

mod centrality;
mod community;
mod pathfinder;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use centrality::{betweenness_centrality, degree_centrality, CentralityReport, DegreeCentrality};
pub use community::{louvain_communities, modularity, CommunityPartition};
pub use pathfinder::{pathfinder, pathfinder_mst, Minkowski, PathLength, PathfinderParams};

use crate::cocite::{NodeId, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("edge {a:?}-{b:?}: weight {weight} has no finite positive reciprocal")]
    BadDistance { a: NodeId, b: NodeId, weight: f64 },
    #[error("invalid Pathfinder parameters: {0}")]
    InvalidParams(String),
    #[error("node {0:?} has no community")]
    UncoveredNode(NodeId),
    #[error("graph has no nodes")]
    EmptyGraph,
}

/// A graph whose weights are dissimilarities: lower means closer.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistanceGraph(WeightedGraph);

impl DistanceGraph {
    /// Takes the weights of `g` as distances as they are.
    pub fn from_distances(g: WeightedGraph) -> Self {
        DistanceGraph(g)
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.0
    }

    pub fn into_graph(self) -> WeightedGraph {
        self.0
    }
}

/// Converts similarities to distances, `d = 1 / w`.
pub fn to_distance(g: &WeightedGraph) -> Result<DistanceGraph, NetError> {
    let mut bad = None;
    let converted = g.map_weights(|w| {
        let d = 1.0 / w;
        if d.is_finite() {
            d
        } else {
            bad.get_or_insert(w);
            1.0
        }
    });
    let converted = converted.expect("reciprocal of a positive weight is positive");
    if let Some(weight) = bad {
        let (a, b, _) = g.edges().find(|(_, _, w)| *w == weight).expect("offending edge exists");
        return Err(NetError::BadDistance { a: a.clone(), b: b.clone(), weight });
    }
    Ok(DistanceGraph(converted))
}
