use super::{reachable, Edge, Model, NodeId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    /// Id of the offending node, edge or feature (`model` for graph-level).
    pub element: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Warning)
    }

    /// One `SEVERITY element_id message` line per finding.
    pub fn to_text(&self) -> String {
        self.findings
            .iter()
            .map(|f| format!("{} {} {}\n", f.severity, f.element, f.message))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn push(&mut self, severity: Severity, element: impl Into<String>, message: impl Into<String>) {
        self.findings.push(Finding {
            severity,
            element: element.into(),
            message: message.into(),
        });
    }
}

/// Checks the structural invariants of a model. Never fails; every problem
/// becomes a finding.
pub fn validate(model: &Model) -> ValidationReport {
    use Severity::{Error, Warning};
    let mut report = ValidationReport::default();

    let mut node_ids = BTreeSet::new();
    let mut names: BTreeMap<&str, &NodeId> = BTreeMap::new();
    for n in &model.nodes {
        if !node_ids.insert(&n.id) {
            report.push(Error, n.id.as_str(), format!("duplicate node id `{}`", n.id));
        }
        if n.name.is_empty() {
            report.push(Error, n.id.as_str(), "node has an empty name");
            continue;
        }
        if let Some(first) = names.get(n.name.as_str()) {
            report.push(
                Error,
                n.id.as_str(),
                format!("duplicate node name `{}` (also on `{first}`)", n.name),
            );
        } else {
            names.insert(&n.name, &n.id);
        }
        if !n.name.starts_with("v_") {
            report.push(
                Warning,
                n.id.as_str(),
                format!("node name `{}` lacks the `v_` prefix", n.name),
            );
        }
    }

    let mut edge_ids = BTreeSet::new();
    let mut sound_edges: Vec<&Edge> = Vec::new();
    for e in &model.edges {
        if !edge_ids.insert(&e.id) {
            report.push(Error, e.id.as_str(), format!("duplicate edge id `{}`", e.id));
        }
        if e.name.is_empty() {
            report.push(Error, e.id.as_str(), "edge has an empty name");
        } else if !e.name.starts_with("e_") {
            report.push(
                Warning,
                e.id.as_str(),
                format!("edge name `{}` lacks the `e_` prefix", e.name),
            );
        }
        let mut dangling = false;
        for (end, node) in [("source", &e.source), ("target", &e.target)] {
            if !node_ids.contains(node) {
                dangling = true;
                report.push(
                    Error,
                    e.id.as_str(),
                    format!("edge `{}` has dangling {end} `{node}`", e.name),
                );
            }
        }
        if !dangling {
            sound_edges.push(e);
        }
    }

    let start_ok = node_ids.contains(&model.start_node);
    if !start_ok {
        report.push(
            Error,
            model.start_node.as_str(),
            "start node is not a node of the model",
        );
    }
    if !node_ids.contains(&model.home_node) {
        report.push(
            Error,
            model.home_node.as_str(),
            "home node is not a node of the model",
        );
    }
    if start_ok {
        let from_start = reachable(sound_edges.iter().copied(), &model.start_node);
        for n in &model.nodes {
            if !from_start.contains(&n.id) {
                report.push(
                    Error,
                    n.id.as_str(),
                    format!("node `{}` is unreachable from start", n.name),
                );
            }
        }
    }

    let mut feature_ids = BTreeSet::new();
    let mut owners: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for f in &model.features {
        let fid = f.id.as_str();
        if !feature_ids.insert(fid) {
            report.push(Error, fid, format!("duplicate feature id `{fid}`"));
        }
        if f.member_edges.is_empty() {
            report.push(Error, fid, "feature has no member edges");
        }
        let mut members = Vec::new();
        for id in &f.member_edges {
            owners.entry(id.as_str()).or_default().push(fid);
            match sound_edges.iter().find(|e| &e.id == id) {
                Some(e) => members.push(*e),
                None => report.push(
                    Error,
                    fid,
                    format!("feature member edge `{id}` is missing or dangling"),
                ),
            }
        }
        for (role, node) in [("entry", &f.entry_node), ("final", &f.final_node)] {
            if !node_ids.contains(node) {
                report.push(Error, fid, format!("{role} node `{node}` does not exist"));
            }
        }
        if members.is_empty() {
            continue;
        }
        let induced: BTreeSet<&NodeId> = members
            .iter()
            .flat_map(|e| [&e.source, &e.target])
            .collect();
        if !induced.contains(&f.entry_node) {
            report.push(
                Error,
                fid,
                format!("entry node `{}` is not an endpoint of any member edge", f.entry_node),
            );
        } else {
            let from_entry = reachable(members.iter().copied(), &f.entry_node);
            for e in &members {
                if !from_entry.contains(&e.source) {
                    report.push(
                        Error,
                        e.id.as_str(),
                        format!(
                            "member edge `{}` of feature `{fid}` is unreachable from entry `{}`",
                            e.name, f.entry_node
                        ),
                    );
                }
            }
        }
        if !weakly_connected(&members) {
            report.push(Error, fid, "feature subgraph is not connected");
        }
        if node_ids.contains(&f.final_node) {
            for node in &induced {
                let from_node = reachable(sound_edges.iter().copied(), node);
                if !from_node.contains(&f.final_node) {
                    report.push(
                        Error,
                        node.as_str(),
                        format!(
                            "final node `{}` ({}) of feature `{fid}` is unreachable from `{node}` ({})",
                            f.final_node,
                            model.node_name(&f.final_node),
                            model.node_name(node)
                        ),
                    );
                }
            }
        }
    }
    for (edge, features) in owners {
        if features.len() > 1 {
            report.push(
                Warning,
                edge,
                format!("edge belongs to several features: {}", features.join(", ")),
            );
        }
    }
    report
}

fn weakly_connected(edges: &[&Edge]) -> bool {
    let Some(first) = edges.first() else {
        return true;
    };
    let undirected: Vec<Edge> = edges
        .iter()
        .flat_map(|e| {
            let back = Edge {
                id: e.id.clone(),
                name: e.name.clone(),
                source: e.target.clone(),
                target: e.source.clone(),
            };
            [(*e).clone(), back]
        })
        .collect();
    let seen = reachable(undirected.iter(), &first.source);
    edges
        .iter()
        .all(|e| seen.contains(&e.source) && seen.contains(&e.target))
}
