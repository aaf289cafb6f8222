//! Test sequence generation: shortest setup/teardown paths and the
//! Quick Random walk over a feature subgraph.
//!
//! All edges weigh 1, so the shortest-path search is a breadth-first search.
//! Among equally short paths the one whose sequence of edge ids is
//! lexicographically smallest wins, which makes every generated sequence a
//! pure function of `(model, feature, seed)`.

use crate::model::{Edge, EdgeId, FeatureId, Model, ModelError, NodeId, Subgraph};
use crate::rng::SplitMix64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum Element {
    Node(NodeId),
    Edge(EdgeId),
}

impl Element {
    pub fn is_node(&self) -> bool {
        matches!(self, Element::Node(_))
    }

    pub fn id(&self) -> &str {
        match self {
            Element::Node(id) => id.as_str(),
            Element::Edge(id) => id.as_str(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub element: Element,
    pub element_name: String,
}

impl Step {
    fn node(model_node: &crate::model::Node) -> Self {
        Step {
            element: Element::Node(model_node.id.clone()),
            element_name: model_node.name.clone(),
        }
    }

    fn edge(edge: &Edge) -> Self {
        Step {
            element: Element::Edge(edge.id.clone()),
            element_name: edge.name.clone(),
        }
    }
}

/// Node, edge, node, ..., node with pairwise distinct nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Path {
    pub steps: Vec<Step>,
}

/// Node, edge, node, ..., node; nodes and edges may repeat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Walk {
    pub steps: Vec<Step>,
    /// Set when a step budget ended the walk before its coverage target.
    pub truncated: bool,
}

macro_rules! sequence_accessors {
    ($ty:ty) => {
        impl $ty {
            pub fn first_node(&self) -> &NodeId {
                match &self.steps.first().expect("non-empty sequence").element {
                    Element::Node(id) => id,
                    Element::Edge(_) => unreachable!("sequences start with a node"),
                }
            }

            pub fn last_node(&self) -> &NodeId {
                match &self.steps.last().expect("non-empty sequence").element {
                    Element::Node(id) => id,
                    Element::Edge(_) => unreachable!("sequences end with a node"),
                }
            }

            pub fn edge_ids(&self) -> impl Iterator<Item = &EdgeId> {
                self.steps.iter().filter_map(|s| match &s.element {
                    Element::Edge(id) => Some(id),
                    Element::Node(_) => None,
                })
            }

            pub fn node_ids(&self) -> impl Iterator<Item = &NodeId> {
                self.steps.iter().filter_map(|s| match &s.element {
                    Element::Node(id) => Some(id),
                    Element::Edge(_) => None,
                })
            }

            /// Number of edge steps.
            pub fn len_edges(&self) -> usize {
                self.edge_ids().count()
            }
        }
    };
}

sequence_accessors!(Path);
sequence_accessors!(Walk);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Setup,
    Walk,
    Teardown,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Setup => "setup",
            Stage::Walk => "walk",
            Stage::Teardown => "teardown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestCase {
    pub feature: FeatureId,
    pub setup: Path,
    pub walk: Walk,
    pub teardown: Path,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlatStep {
    pub stage: Stage,
    pub step: Step,
}

impl TestCase {
    pub fn id(&self) -> &str {
        self.feature.as_str()
    }

    /// The whole test as one sequence. The node shared by two consecutive
    /// stages appears once, tagged with the earlier stage.
    pub fn flatten(&self) -> Vec<FlatStep> {
        let tag = |stage, steps: &[Step]| {
            steps
                .iter()
                .map(move |s| FlatStep {
                    stage,
                    step: s.clone(),
                })
                .collect::<Vec<_>>()
        };
        let mut out = tag(Stage::Setup, &self.setup.steps);
        out.extend(tag(Stage::Walk, &self.walk.steps[1..]));
        out.extend(tag(Stage::Teardown, &self.teardown.steps[1..]));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StopCondition {
    /// Stop once this fraction of member edges has been traversed.
    EdgeCoverage(f64),
    /// Stop after this many edge steps.
    MaxSteps(usize),
    /// Stop as soon as any inner condition holds.
    FirstOf(Vec<StopCondition>),
}

impl StopCondition {
    pub fn edge_coverage(fraction: f64) -> Result<Self, GenerateError> {
        let stop = StopCondition::EdgeCoverage(fraction);
        stop.check()?;
        Ok(stop)
    }

    pub fn max_steps(count: usize) -> Result<Self, GenerateError> {
        let stop = StopCondition::MaxSteps(count);
        stop.check()?;
        Ok(stop)
    }

    pub fn full_coverage() -> Self {
        StopCondition::EdgeCoverage(1.0)
    }

    pub fn check(&self) -> Result<(), GenerateError> {
        match self {
            StopCondition::EdgeCoverage(f) if !(*f > 0.0 && *f <= 1.0) => Err(
                GenerateError::InvalidStop(format!("edge coverage {f} outside (0, 1]")),
            ),
            StopCondition::MaxSteps(0) => {
                Err(GenerateError::InvalidStop("max steps must be at least 1".into()))
            }
            StopCondition::FirstOf(inner) if inner.is_empty() => {
                Err(GenerateError::InvalidStop("empty condition list".into()))
            }
            StopCondition::FirstOf(inner) => inner.iter().try_for_each(StopCondition::check),
            _ => Ok(()),
        }
    }

    fn coverage_met(&self, visited: usize, total: usize) -> bool {
        match self {
            StopCondition::EdgeCoverage(f) => {
                total == 0 || visited as f64 >= f * total as f64 - 1e-9
            }
            StopCondition::MaxSteps(_) => false,
            StopCondition::FirstOf(inner) => inner.iter().any(|c| c.coverage_met(visited, total)),
        }
    }

    fn budget_spent(&self, steps: usize) -> bool {
        match self {
            StopCondition::EdgeCoverage(_) => false,
            StopCondition::MaxSteps(n) => steps >= *n,
            StopCondition::FirstOf(inner) => inner.iter().any(|c| c.budget_spent(steps)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("node `{0}` is not part of the graph")]
    UnknownNode(NodeId),
    #[error("no path from `{from}` to `{to}`")]
    NoPath { from: NodeId, to: NodeId },
    #[error("edge `{edge}` cannot be reached from `{from}`")]
    UnreachableEdge { edge: EdgeId, from: NodeId },
    #[error("invalid stop condition: {0}")]
    InvalidStop(String),
    #[error("walk references `{0}`, which is not a member edge")]
    ForeignElement(EdgeId),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<GenerateError>,
    },
}

impl GenerateError {
    fn at(self, stage: Stage) -> Self {
        GenerateError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

/// Out-edges per node, each list sorted by edge id.
struct Adjacency<'a> {
    out: BTreeMap<&'a NodeId, Vec<&'a Edge>>,
    incoming: BTreeMap<&'a NodeId, Vec<&'a Edge>>,
}

impl<'a> Adjacency<'a> {
    fn new(edges: impl Iterator<Item = &'a Edge>) -> Self {
        let mut out: BTreeMap<&NodeId, Vec<&Edge>> = BTreeMap::new();
        let mut incoming: BTreeMap<&NodeId, Vec<&Edge>> = BTreeMap::new();
        for e in edges {
            out.entry(&e.source).or_default().push(e);
            incoming.entry(&e.target).or_default().push(e);
        }
        for list in out.values_mut() {
            list.sort_by(|a, b| a.id.cmp(&b.id));
        }
        Self { out, incoming }
    }

    /// Shortest edge sequence from `from` to `to`, lexicographically smallest
    /// by edge id among the shortest. `None` when unreachable.
    fn path(&self, from: &NodeId, to: &NodeId) -> Option<Vec<&'a Edge>> {
        // Distances to `to`, by BFS over reversed edges.
        let mut dist: BTreeMap<&NodeId, usize> = BTreeMap::new();
        let mut queue = VecDeque::new();
        dist.insert(to, 0);
        queue.push_back(to);
        while let Some(n) = queue.pop_front() {
            if n == from {
                break;
            }
            let d = dist[n];
            for e in self.incoming.get(n).into_iter().flatten() {
                if !dist.contains_key(&e.source) {
                    dist.insert(&e.source, d + 1);
                    queue.push_back(&e.source);
                }
            }
        }
        let mut remaining = *dist.get(from)?;
        let mut path = Vec::with_capacity(remaining);
        let mut cur = from;
        while remaining > 0 {
            // Out-lists are id-sorted, so the first edge one hop closer is the
            // smallest choice at this position.
            let next = self.out.get(cur)?.iter().find(|e| {
                dist.get(&e.target).is_some_and(|d| *d + 1 == remaining)
            })?;
            path.push(*next);
            cur = &next.target;
            remaining -= 1;
        }
        Some(path)
    }
}

fn path_steps(model: &Model, from: &NodeId, edges: &[&Edge]) -> Vec<Step> {
    let mut steps = Vec::with_capacity(edges.len() * 2 + 1);
    steps.push(Step::node(model.node(from).expect("checked endpoint")));
    for e in edges {
        steps.push(Step::edge(e));
        steps.push(Step::node(model.node(&e.target).expect("validated edge")));
    }
    steps
}

/// Shortest-path queries against one model. Builds the adjacency index once;
/// use it instead of [`shortest_path`] for many queries on the same model.
pub struct PathFinder<'a> {
    model: &'a Model,
    adjacency: Adjacency<'a>,
}

impl<'a> PathFinder<'a> {
    pub fn new(model: &'a Model) -> Self {
        PathFinder {
            model,
            adjacency: Adjacency::new(model.edges.iter()),
        }
    }

    pub fn path(&self, from: &NodeId, to: &NodeId) -> Result<Path, GenerateError> {
        for n in [from, to] {
            if self.model.node(n).is_none() {
                return Err(GenerateError::UnknownNode(n.clone()));
            }
        }
        let edges = self.adjacency.path(from, to).ok_or_else(|| GenerateError::NoPath {
            from: from.clone(),
            to: to.clone(),
        })?;
        Ok(Path {
            steps: path_steps(self.model, from, &edges),
        })
    }
}

/// Minimum-edge-count directed path between any two nodes of the model.
pub fn shortest_path(model: &Model, from: &NodeId, to: &NodeId) -> Result<Path, GenerateError> {
    PathFinder::new(model).path(from, to)
}

/// Quick Random: repeatedly pick an unvisited member edge uniformly at
/// random, travel to it along the shortest in-subgraph path, traverse it,
/// and mark every edge passed on the way as visited.
///
/// Detours stay inside the subgraph. The stop condition is checked after
/// every edge step.
pub fn quick_random_walk(
    subgraph: &Subgraph,
    start: &NodeId,
    seed: u64,
    stop: &StopCondition,
) -> Result<Walk, GenerateError> {
    stop.check()?;
    let start_node = subgraph
        .node(start)
        .ok_or_else(|| GenerateError::UnknownNode(start.clone()))?;
    let adjacency = Adjacency::new(subgraph.edges.iter());

    let reachable = crate::model::reachable(subgraph.edges.iter(), start);
    let mut member_ids: Vec<&EdgeId> = subgraph.edges.iter().map(|e| &e.id).collect();
    member_ids.sort();
    if let Some(e) = member_ids
        .iter()
        .map(|id| subgraph.edge(id).expect("member"))
        .find(|e| !reachable.contains(&e.source))
    {
        return Err(GenerateError::UnreachableEdge {
            edge: e.id.clone(),
            from: start.clone(),
        });
    }

    let total = member_ids.len();
    let mut unvisited: BTreeSet<&EdgeId> = member_ids.iter().copied().collect();
    let mut rng = SplitMix64::new(seed);
    let mut steps = vec![Step {
        element: Element::Node(start_node.id.clone()),
        element_name: start_node.name.clone(),
    }];
    let mut current = start;
    let mut edge_steps = 0usize;

    let done = |unvisited: &BTreeSet<&EdgeId>, edge_steps: usize| {
        stop.coverage_met(total - unvisited.len(), total)
            || stop.budget_spent(edge_steps)
            || unvisited.is_empty()
    };

    'outer: while !done(&unvisited, edge_steps) {
        let candidates: Vec<&EdgeId> = unvisited.iter().copied().collect();
        let chosen = subgraph
            .edge(candidates[rng.index(candidates.len())])
            .expect("member");
        let mut route = adjacency.path(current, &chosen.source).ok_or_else(|| {
            GenerateError::UnreachableEdge {
                edge: chosen.id.clone(),
                from: current.clone(),
            }
        })?;
        route.push(chosen);
        for e in route {
            steps.push(Step::edge(e));
            let target = subgraph.node(&e.target).expect("endpoint");
            steps.push(Step {
                element: Element::Node(target.id.clone()),
                element_name: target.name.clone(),
            });
            unvisited.remove(&e.id);
            edge_steps += 1;
            current = &e.target;
            if done(&unvisited, edge_steps) {
                break 'outer;
            }
        }
    }

    let truncated = !unvisited.is_empty()
        && stop.budget_spent(edge_steps)
        && !stop.coverage_met(total - unvisited.len(), total);
    Ok(Walk { steps, truncated })
}

/// Fraction of member edges the walk traverses at least once.
pub fn walk_edge_coverage(walk: &Walk, subgraph: &Subgraph) -> Result<f64, GenerateError> {
    let mut seen = BTreeSet::new();
    for id in walk.edge_ids() {
        if subgraph.edge(id).is_none() {
            return Err(GenerateError::ForeignElement(id.clone()));
        }
        seen.insert(id);
    }
    if subgraph.edges.is_empty() {
        return Ok(1.0);
    }
    Ok(seen.len() as f64 / subgraph.edges.len() as f64)
}

/// `[P_setup, W_random, P_teardown]` for one feature with full edge coverage.
pub fn compose_test(model: &Model, feature: &FeatureId, seed: u64) -> Result<TestCase, GenerateError> {
    compose_test_with(model, feature, seed, &StopCondition::full_coverage())
}

/// [`compose_test`] with a custom stop condition for the walk.
pub fn compose_test_with(
    model: &Model,
    feature: &FeatureId,
    seed: u64,
    stop: &StopCondition,
) -> Result<TestCase, GenerateError> {
    let subgraph = model.feature_subgraph(feature)?;
    let paths = PathFinder::new(model);
    let setup = paths
        .path(&model.start_node, &subgraph.entry_node)
        .map_err(|e| e.at(Stage::Setup))?;
    let walk = quick_random_walk(&subgraph, &subgraph.entry_node, seed, stop)
        .map_err(|e| e.at(Stage::Walk))?;
    let teardown = paths
        .path(walk.last_node(), &subgraph.final_node)
        .map_err(|e| e.at(Stage::Teardown))?;
    Ok(TestCase {
        feature: feature.clone(),
        setup,
        walk,
        teardown,
        seed,
    })
}

/// Whether every `(node, edge, node)` triple of a step sequence is an edge of
/// the model and node/edge steps alternate, starting and ending on a node.
pub fn is_valid_walk(model: &Model, steps: &[Step]) -> bool {
    if steps.is_empty() || steps.len().is_multiple_of(2) {
        return false;
    }
    steps.chunks(2).all(|c| c[0].element.is_node())
        && steps.windows(3).step_by(2).all(|w| match (&w[0].element, &w[1].element, &w[2].element) {
            (Element::Node(a), Element::Edge(e), Element::Node(b)) => model.has_transition(a, e, b),
            _ => false,
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Feature, Node, NodeKind};

    fn model(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Model {
        Model {
            nodes: nodes
                .iter()
                .map(|n| Node {
                    id: NodeId::new(*n),
                    name: format!("v_{n}"),
                    kind: NodeKind::ScreenState,
                })
                .collect(),
            edges: edges
                .iter()
                .map(|(id, s, t)| Edge {
                    id: EdgeId::new(*id),
                    name: format!("e_{id}"),
                    source: NodeId::new(*s),
                    target: NodeId::new(*t),
                })
                .collect(),
            start_node: NodeId::new(nodes[0]),
            home_node: NodeId::new(nodes[0]),
            features: vec![],
        }
    }

    fn with_feature(mut m: Model, edges: &[&str], entry: &str, fin: &str) -> Model {
        m.features.push(Feature {
            id: "f".into(),
            name: "f".into(),
            member_edges: edges.iter().map(|e| EdgeId::new(*e)).collect(),
            entry_node: entry.into(),
            final_node: fin.into(),
        });
        m
    }

    fn ids(steps: &[Step]) -> Vec<&str> {
        steps.iter().map(|s| s.element.id()).collect()
    }

    #[test]
    fn path_to_self_is_single_node() {
        let m = model(&["a", "b"], &[("e1", "a", "b")]);
        let p = shortest_path(&m, &"a".into(), &"a".into()).unwrap();
        assert_eq!(ids(&p.steps), ["a"]);
    }

    #[test]
    fn chain_path() {
        let m = model(&["n0", "a", "b"], &[("e1", "n0", "a"), ("e2", "a", "b")]);
        let p = shortest_path(&m, &"n0".into(), &"b".into()).unwrap();
        assert_eq!(ids(&p.steps), ["n0", "e1", "a", "e2", "b"]);
        assert_eq!(p.len_edges(), 2);
    }

    #[test]
    fn no_path_and_unknown_node() {
        let m = model(&["a", "b"], &[("e1", "a", "b")]);
        assert!(matches!(
            shortest_path(&m, &"b".into(), &"a".into()),
            Err(GenerateError::NoPath { .. })
        ));
        assert!(matches!(
            shortest_path(&m, &"a".into(), &"zz".into()),
            Err(GenerateError::UnknownNode(_))
        ));
    }

    #[test]
    fn ties_break_on_smallest_edge_ids() {
        // Two 2-hop routes a->b->d (e3,e4) and a->c->d (e1,e9); parallel e0/e2 a->c.
        let m = model(
            &["a", "b", "c", "d"],
            &[
                ("e3", "a", "b"),
                ("e4", "b", "d"),
                ("e2", "a", "c"),
                ("e1", "a", "c"),
                ("e9", "c", "d"),
            ],
        );
        let p = shortest_path(&m, &"a".into(), &"d".into()).unwrap();
        assert_eq!(ids(&p.steps), ["a", "e1", "c", "e9", "d"]);
    }

    #[test]
    fn single_edge_walk_for_any_seed() {
        let m = with_feature(model(&["a", "b"], &[("e", "a", "b")]), &["e"], "a", "b");
        let sub = m.feature_subgraph(&"f".into()).unwrap();
        for seed in 0..20 {
            let w = quick_random_walk(&sub, &"a".into(), seed, &StopCondition::full_coverage()).unwrap();
            assert_eq!(ids(&w.steps), ["a", "e", "b"]);
            assert!(!w.truncated);
        }
    }

    #[test]
    fn two_cycle_takes_two_steps() {
        let m = with_feature(
            model(&["a", "b"], &[("e1", "a", "b"), ("e2", "b", "a")]),
            &["e1", "e2"],
            "a",
            "a",
        );
        let sub = m.feature_subgraph(&"f".into()).unwrap();
        for seed in 0..20 {
            let w = quick_random_walk(&sub, &"a".into(), seed, &StopCondition::full_coverage()).unwrap();
            assert_eq!(w.len_edges(), 2);
            assert_eq!(walk_edge_coverage(&w, &sub).unwrap(), 1.0);
        }
    }

    #[test]
    fn unreachable_member_edge() {
        let m = with_feature(
            model(&["a", "b", "c"], &[("e1", "a", "b"), ("e2", "c", "b")]),
            &["e1", "e2"],
            "a",
            "b",
        );
        let sub = m.feature_subgraph(&"f".into()).unwrap();
        let err = quick_random_walk(&sub, &"a".into(), 0, &StopCondition::full_coverage()).unwrap_err();
        assert_eq!(
            err,
            GenerateError::UnreachableEdge {
                edge: "e2".into(),
                from: "a".into()
            }
        );
    }

    #[test]
    fn stuck_walk_reports_unreachable_edge() {
        // Both edges reachable from a, but after taking one the other is not.
        let m = with_feature(
            model(&["a", "b", "c"], &[("e1", "a", "b"), ("e2", "a", "c")]),
            &["e1", "e2"],
            "a",
            "b",
        );
        let sub = m.feature_subgraph(&"f".into()).unwrap();
        let err = quick_random_walk(&sub, &"a".into(), 1, &StopCondition::full_coverage()).unwrap_err();
        assert!(matches!(err, GenerateError::UnreachableEdge { .. }));
    }

    #[test]
    fn max_steps_truncates() {
        let m = with_feature(
            model(&["a", "b", "c"], &[("e1", "a", "b"), ("e2", "b", "c"), ("e3", "c", "a")]),
            &["e1", "e2", "e3"],
            "a",
            "a",
        );
        let sub = m.feature_subgraph(&"f".into()).unwrap();
        let stop = StopCondition::FirstOf(vec![
            StopCondition::full_coverage(),
            StopCondition::max_steps(2).unwrap(),
        ]);
        let w = quick_random_walk(&sub, &"a".into(), 5, &stop).unwrap();
        assert_eq!(w.len_edges(), 2);
        assert!(w.truncated);
        let half = quick_random_walk(&sub, &"a".into(), 5, &StopCondition::edge_coverage(0.5).unwrap()).unwrap();
        assert_eq!(half.len_edges(), 2);
        assert!(!half.truncated);
    }

    #[test]
    fn invalid_stops() {
        assert!(StopCondition::edge_coverage(0.0).is_err());
        assert!(StopCondition::edge_coverage(1.5).is_err());
        assert!(StopCondition::max_steps(0).is_err());
        assert!(StopCondition::FirstOf(vec![]).check().is_err());
    }

    #[test]
    fn coverage_of_partial_and_foreign_walks() {
        let m = with_feature(
            model(&["a", "b"], &[("e1", "a", "b"), ("e2", "b", "a"), ("e3", "a", "a"), ("x", "b", "b")]),
            &["e1", "e2", "e3"],
            "a",
            "a",
        );
        let sub = m.feature_subgraph(&"f".into()).unwrap();
        let node_only = Walk {
            steps: vec![Step { element: Element::Node("a".into()), element_name: "v_a".into() }],
            truncated: false,
        };
        assert_eq!(walk_edge_coverage(&node_only, &sub).unwrap(), 0.0);

        let loop_step = Step { element: Element::Edge("e3".into()), element_name: "e_e3".into() };
        let mut repeated = node_only.clone();
        for _ in 0..5 {
            repeated.steps.push(loop_step.clone());
            repeated.steps.push(node_only.steps[0].clone());
        }
        let two_edges = with_feature(
            model(&["a", "b"], &[("e3", "a", "a"), ("e4", "a", "b")]),
            &["e3", "e4"],
            "a",
            "a",
        );
        let sub2 = two_edges.feature_subgraph(&"f".into()).unwrap();
        assert_eq!(walk_edge_coverage(&repeated, &sub2).unwrap(), 0.5);

        let mut foreign = node_only;
        foreign.steps.push(Step { element: Element::Edge("x".into()), element_name: "e_x".into() });
        assert_eq!(
            walk_edge_coverage(&foreign, &sub),
            Err(GenerateError::ForeignElement("x".into()))
        );
    }

    #[test]
    fn compose_joins_stages() {
        let m = with_feature(
            model(
                &["s", "a", "b", "h"],
                &[("e1", "s", "a"), ("e2", "a", "b"), ("e3", "b", "a"), ("e4", "b", "h")],
            ),
            &["e2", "e3"],
            "a",
            "h",
        );
        let t = compose_test(&m, &"f".into(), 3).unwrap();
        assert_eq!(t.setup.first_node(), &NodeId::from("s"));
        assert_eq!(t.setup.last_node(), t.walk.first_node());
        assert_eq!(t.walk.last_node(), t.teardown.first_node());
        assert_eq!(t.teardown.last_node(), &NodeId::from("h"));
        let flat: Vec<Step> = t.flatten().into_iter().map(|f| f.step).collect();
        assert!(is_valid_walk(&m, &flat));
    }

    #[test]
    fn entry_at_start_gives_single_node_setup() {
        let m = with_feature(
            model(&["s", "a"], &[("e1", "s", "a"), ("e2", "a", "s")]),
            &["e1", "e2"],
            "s",
            "s",
        );
        let t = compose_test(&m, &"f".into(), 0).unwrap();
        assert_eq!(ids(&t.setup.steps), ["s"]);
        // walk ends where it started, which is also the final node
        assert_eq!(ids(&t.teardown.steps), ["s"]);
    }

    #[test]
    fn compose_reports_failing_stage() {
        let m = with_feature(
            model(&["s", "a", "b"], &[("e1", "a", "b"), ("e2", "b", "a")]),
            &["e1", "e2"],
            "a",
            "a",
        );
        match compose_test(&m, &"f".into(), 0).unwrap_err() {
            GenerateError::Stage { stage, .. } => assert_eq!(stage, Stage::Setup),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            compose_test(&m, &"zz".into(), 0),
            Err(GenerateError::Model(ModelError::FeatureNotFound(_)))
        ));
    }
}
