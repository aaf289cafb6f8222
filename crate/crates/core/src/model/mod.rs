//! Interaction model: a directed graph of user-perceived states (nodes) and
//! user actions (edges), grouped into feature subgraphs.

mod graphml;
mod validate;

pub use graphml::{parse_graphml, write_graphml, ParseError};
pub use validate::{validate, Finding, Severity, ValidationReport};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

id_newtype!(
    /// Identifier of a model node (the GraphML `id` attribute).
    NodeId
);
id_newtype!(
    /// Identifier of a model edge. Parallel edges are told apart by this id.
    EdgeId
);
id_newtype!(FeatureId);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    /// A screen or view the user can observe.
    #[default]
    ScreenState,
    /// An app lifecycle state on the device (installed, stopped, ...).
    DeviceState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub name: String,
    pub source: NodeId,
    pub target: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feature {
    pub id: FeatureId,
    pub name: String,
    pub member_edges: BTreeSet<EdgeId>,
    pub entry_node: NodeId,
    /// Teardown target of every test generated for this feature.
    pub final_node: NodeId,
}

/// The interaction model `M = (N, E)` plus start/home nodes and features.
///
/// Fields are public so models can be assembled (or deliberately broken)
/// in code; [`validate`] reports any violated structural invariant.
/// Node and edge order is document order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub start_node: NodeId,
    pub home_node: NodeId,
    pub features: Vec<Feature>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("feature `{0}` not found in model")]
    FeatureNotFound(FeatureId),
}

impl Model {
    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| &n.id == id)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| &e.id == id)
    }

    pub fn node_by_name(&self, name: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn feature(&self, id: &FeatureId) -> Option<&Feature> {
        self.features.iter().find(|f| &f.id == id)
    }

    /// Name of a node or `"?"` when the id is dangling.
    pub fn node_name(&self, id: &NodeId) -> &str {
        self.node(id).map_or("?", |n| n.name.as_str())
    }

    /// Whether an edge with this id connects `source` to `target`.
    pub fn has_transition(&self, source: &NodeId, edge: &EdgeId, target: &NodeId) -> bool {
        self.edge(edge)
            .is_some_and(|e| &e.source == source && &e.target == target)
    }

    /// Nodes reachable from `from` by directed traversal, `from` included.
    pub fn reachable_from(&self, from: &NodeId) -> BTreeSet<NodeId> {
        reachable(self.edges.iter(), from)
    }

    /// The induced subgraph of a feature: member edges plus their endpoints.
    pub fn feature_subgraph(&self, feature: &FeatureId) -> Result<Subgraph, ModelError> {
        let f = self
            .feature(feature)
            .ok_or_else(|| ModelError::FeatureNotFound(feature.clone()))?;
        let edges: Vec<Edge> = self
            .edges
            .iter()
            .filter(|e| f.member_edges.contains(&e.id))
            .cloned()
            .collect();
        let mut nodes = BTreeSet::new();
        for e in &edges {
            nodes.insert(e.source.clone());
            nodes.insert(e.target.clone());
        }
        let nodes = self
            .nodes
            .iter()
            .filter(|n| nodes.contains(&n.id))
            .cloned()
            .collect();
        Ok(Subgraph {
            feature: f.id.clone(),
            nodes,
            edges,
            entry_node: f.entry_node.clone(),
            final_node: f.final_node.clone(),
        })
    }
}

/// Free-function form of [`Model::feature_subgraph`].
pub fn feature_subgraph(model: &Model, feature: &FeatureId) -> Result<Subgraph, ModelError> {
    model.feature_subgraph(feature)
}

/// Induced subgraph of one feature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub feature: FeatureId,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub entry_node: NodeId,
    pub final_node: NodeId,
}

impl Subgraph {
    pub fn contains_node(&self, id: &NodeId) -> bool {
        self.nodes.iter().any(|n| &n.id == id)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| &e.id == id)
    }

    pub fn node(&self, id: &NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| &n.id == id)
    }
}

pub(crate) fn reachable<'a>(
    edges: impl Iterator<Item = &'a Edge>,
    from: &NodeId,
) -> BTreeSet<NodeId> {
    let mut adjacency: BTreeMap<&NodeId, Vec<&NodeId>> = BTreeMap::new();
    for e in edges {
        adjacency.entry(&e.source).or_default().push(&e.target);
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(from.clone());
    queue.push_back(from.clone());
    while let Some(n) = queue.pop_front() {
        if let Some(next) = adjacency.get(&n) {
            for t in next {
                if seen.insert((*t).clone()) {
                    queue.push_back((*t).clone());
                }
            }
        }
    }
    seen
}
