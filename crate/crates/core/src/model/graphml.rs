//! GraphML ingestion for the subset yEd and GraphWalker agree on.
//!
//! Recognised data keys (matched by `attr.name` of the declaring `<key>`,
//! or by the raw `key` attribute when no declaration exists):
//!
//! | scope | key            | value                                   |
//! |-------|----------------|-----------------------------------------|
//! | graph | `start`        | node id or node name                    |
//! | graph | `home`         | node id or node name (default: start)   |
//! | graph | `entry`        | `feature=node` (declares the feature)   |
//! | graph | `final`        | `feature=node` (default: home)          |
//! | graph | `feature_name` | `feature=Display name`                  |
//! | node  | `label`        | element name                            |
//! | node  | `kind`         | `screen` or `device`                    |
//! | edge  | `label`        | element name                            |
//! | edge  | `feature`      | comma-separated feature ids             |
//!
//! yEd stores labels inside `<y:NodeLabel>`/`<y:EdgeLabel>` below a
//! graphics data element; the first such label is used when no plain
//! `label` data is present.

use super::{Edge, EdgeId, Feature, FeatureId, Model, Node, NodeId, NodeKind};
use roxmltree::{Document, Node as XmlNode};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed XML at {line}:{column}: {message}")]
    Xml {
        line: u32,
        column: u32,
        message: String,
    },
    #[error("document must contain exactly one <graph> element, found {0}")]
    GraphCount(usize),
    #[error("<{tag}> element at line {line} has no id attribute")]
    MissingId { tag: &'static str, line: u32 },
    #[error("{kind} `{element}` has no label")]
    MissingLabel { kind: &'static str, element: String },
    #[error("edge `{edge}` references nonexistent node `{node}`")]
    DanglingEdge { edge: String, node: String },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("`{element}` references unknown feature `{feature}`")]
    UnknownFeature { element: String, feature: String },
    #[error("graph data `{key}` references unknown node `{value}`")]
    UnknownNode { key: String, value: String },
    #[error("graph data `start` is missing")]
    MissingStart,
    #[error("invalid value `{value}` for data key `{key}`")]
    InvalidValue { key: String, value: String },
}

/// Parses a GraphML document into a [`Model`].
///
/// Structural checks beyond what is needed to build the model (reachability,
/// feature connectivity, naming) are left to [`super::validate`].
pub fn parse_graphml(document: &str) -> Result<Model, ParseError> {
    let doc = Document::parse(document).map_err(|e| {
        let pos = e.pos();
        ParseError::Xml {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })?;
    let line_of = |n: XmlNode<'_, '_>| doc.text_pos_at(n.range().start).row;

    let keys: HashMap<&str, &str> = doc
        .descendants()
        .filter(|n| n.has_tag_name("key"))
        .filter_map(|n| Some((n.attribute("id")?, n.attribute("attr.name")?)))
        .collect();
    let key_name = |data: XmlNode<'_, '_>| -> String {
        let raw = data.attribute("key").unwrap_or_default();
        keys.get(raw).copied().unwrap_or(raw).to_string()
    };

    let graphs: Vec<_> = doc
        .descendants()
        .filter(|n| n.has_tag_name("graph"))
        .collect();
    if graphs.len() != 1 {
        return Err(ParseError::GraphCount(graphs.len()));
    }
    let graph = graphs[0];

    let mut nodes: Vec<Node> = Vec::new();
    let mut seen_nodes = BTreeSet::new();
    for xml in graph.children().filter(|n| n.has_tag_name("node")) {
        let id = xml.attribute("id").ok_or(ParseError::MissingId {
            tag: "node",
            line: line_of(xml),
        })?;
        if !seen_nodes.insert(id.to_string()) {
            return Err(ParseError::DuplicateId {
                kind: "node",
                id: id.to_string(),
            });
        }
        let name = label_of(xml, &key_name).ok_or_else(|| ParseError::MissingLabel {
            kind: "node",
            element: id.to_string(),
        })?;
        let kind = match data_value(xml, "kind", &key_name).as_deref() {
            None | Some("screen") | Some("screen-state") => NodeKind::ScreenState,
            Some("device") | Some("device-state") => NodeKind::DeviceState,
            Some(other) => {
                return Err(ParseError::InvalidValue {
                    key: "kind".into(),
                    value: other.into(),
                })
            }
        };
        nodes.push(Node {
            id: NodeId::new(id),
            name,
            kind,
        });
    }

    let mut edges = Vec::new();
    let mut memberships: Vec<(EdgeId, String)> = Vec::new();
    let mut seen_edges = BTreeSet::new();
    for (index, xml) in graph
        .children()
        .filter(|n| n.has_tag_name("edge"))
        .enumerate()
    {
        let id = xml
            .attribute("id")
            .map(str::to_string)
            .unwrap_or_else(|| format!("edge{index}"));
        if !seen_edges.insert(id.clone()) {
            return Err(ParseError::DuplicateId { kind: "edge", id });
        }
        for end in ["source", "target"] {
            let node = xml.attribute(end).unwrap_or_default();
            if !seen_nodes.contains(node) {
                return Err(ParseError::DanglingEdge {
                    edge: id,
                    node: node.to_string(),
                });
            }
        }
        let name = label_of(xml, &key_name).ok_or_else(|| ParseError::MissingLabel {
            kind: "edge",
            element: id.clone(),
        })?;
        if let Some(list) = data_value(xml, "feature", &key_name) {
            for feature in list.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                memberships.push((EdgeId::new(&id), feature.to_string()));
            }
        }
        edges.push(Edge {
            id: EdgeId::new(id),
            name,
            source: NodeId::new(xml.attribute("source").unwrap_or_default()),
            target: NodeId::new(xml.attribute("target").unwrap_or_default()),
        });
    }

    let resolve = |key: &str, value: &str| -> Result<NodeId, ParseError> {
        nodes
            .iter()
            .find(|n| n.id.as_str() == value)
            .or_else(|| nodes.iter().find(|n| n.name == value))
            .map(|n| n.id.clone())
            .ok_or_else(|| ParseError::UnknownNode {
                key: key.into(),
                value: value.into(),
            })
    };

    let mut start = None;
    let mut home = None;
    let mut declared: Vec<String> = Vec::new();
    let mut entries: BTreeMap<String, NodeId> = BTreeMap::new();
    let mut finals: BTreeMap<String, NodeId> = BTreeMap::new();
    let mut names: BTreeMap<String, String> = BTreeMap::new();
    for data in graph.children().filter(|n| n.has_tag_name("data")) {
        let key = key_name(data);
        let value = text_of(data);
        match key.as_str() {
            "start" => start = Some(resolve("start", &value)?),
            "home" => home = Some(resolve("home", &value)?),
            "entry" | "final" | "feature_name" => {
                let (feature, target) = value
                    .split_once('=')
                    .map(|(f, t)| (f.trim().to_string(), t.trim().to_string()))
                    .ok_or_else(|| ParseError::InvalidValue {
                        key: key.clone(),
                        value: value.clone(),
                    })?;
                match key.as_str() {
                    "entry" => {
                        if !declared.contains(&feature) {
                            declared.push(feature.clone());
                        }
                        entries.insert(feature, resolve("entry", &target)?);
                    }
                    "final" => {
                        finals.insert(feature, resolve("final", &target)?);
                    }
                    _ => {
                        names.insert(feature, target);
                    }
                }
            }
            _ => {}
        }
    }
    let start_node = start.ok_or(ParseError::MissingStart)?;
    let home_node = home.unwrap_or_else(|| start_node.clone());

    for feature in finals.keys().chain(names.keys()) {
        if !entries.contains_key(feature) {
            return Err(ParseError::UnknownFeature {
                element: "graph".into(),
                feature: feature.clone(),
            });
        }
    }
    let mut members: BTreeMap<String, BTreeSet<EdgeId>> = BTreeMap::new();
    for (edge, feature) in memberships {
        if !entries.contains_key(&feature) {
            return Err(ParseError::UnknownFeature {
                element: edge.0,
                feature,
            });
        }
        members.entry(feature).or_default().insert(edge);
    }

    let features = declared
        .into_iter()
        .map(|id| Feature {
            name: names.remove(&id).unwrap_or_else(|| id.clone()),
            member_edges: members.remove(&id).unwrap_or_default(),
            entry_node: entries[&id].clone(),
            final_node: finals.remove(&id).unwrap_or_else(|| home_node.clone()),
            id: FeatureId::new(id),
        })
        .collect();

    Ok(Model {
        nodes,
        edges,
        start_node,
        home_node,
        features,
    })
}

fn text_of(node: XmlNode<'_, '_>) -> String {
    node.descendants()
        .filter(|n| n.is_text())
        .filter_map(|n| n.text())
        .collect::<String>()
        .trim()
        .to_string()
}

fn data_value(
    element: XmlNode<'_, '_>,
    key: &str,
    key_name: &impl Fn(XmlNode<'_, '_>) -> String,
) -> Option<String> {
    element
        .children()
        .filter(|n| n.has_tag_name("data"))
        .find(|d| key_name(*d) == key)
        .map(text_of)
}

fn label_of(
    element: XmlNode<'_, '_>,
    key_name: &impl Fn(XmlNode<'_, '_>) -> String,
) -> Option<String> {
    for data in element.children().filter(|n| n.has_tag_name("data")) {
        let label = if key_name(data) == "label" {
            Some(text_of(data))
        } else {
            data.descendants()
                .find(|n| {
                    n.is_element() && n.tag_name().name().ends_with("Label")
                })
                .map(text_of)
        };
        if let Some(label) = label.filter(|l| !l.is_empty()) {
            return Some(label);
        }
    }
    None
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Serializes a model in the subset read by [`parse_graphml`].
pub fn write_graphml(model: &Model) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    for (id, scope, name) in [
        ("d_start", "graph", "start"),
        ("d_home", "graph", "home"),
        ("d_entry", "graph", "entry"),
        ("d_final", "graph", "final"),
        ("d_fname", "graph", "feature_name"),
        ("d_nlabel", "node", "label"),
        ("d_kind", "node", "kind"),
        ("d_elabel", "edge", "label"),
        ("d_feature", "edge", "feature"),
    ] {
        let _ = writeln!(
            out,
            "  <key id=\"{id}\" for=\"{scope}\" attr.name=\"{name}\" attr.type=\"string\"/>"
        );
    }
    out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");
    let _ = writeln!(out, "    <data key=\"d_start\">{}</data>", escape(model.start_node.as_str()));
    let _ = writeln!(out, "    <data key=\"d_home\">{}</data>", escape(model.home_node.as_str()));
    for f in &model.features {
        let id = escape(f.id.as_str());
        let _ = writeln!(out, "    <data key=\"d_entry\">{id}={}</data>", escape(f.entry_node.as_str()));
        let _ = writeln!(out, "    <data key=\"d_final\">{id}={}</data>", escape(f.final_node.as_str()));
        let _ = writeln!(out, "    <data key=\"d_fname\">{id}={}</data>", escape(&f.name));
    }
    for n in &model.nodes {
        let kind = match n.kind {
            NodeKind::ScreenState => "screen",
            NodeKind::DeviceState => "device",
        };
        let _ = writeln!(
            out,
            "    <node id=\"{}\"><data key=\"d_nlabel\">{}</data><data key=\"d_kind\">{kind}</data></node>",
            escape(n.id.as_str()),
            escape(&n.name)
        );
    }
    for e in &model.edges {
        let features: Vec<&str> = model
            .features
            .iter()
            .filter(|f| f.member_edges.contains(&e.id))
            .map(|f| f.id.as_str())
            .collect();
        let _ = write!(
            out,
            "    <edge id=\"{}\" source=\"{}\" target=\"{}\"><data key=\"d_elabel\">{}</data>",
            escape(e.id.as_str()),
            escape(e.source.as_str()),
            escape(e.target.as_str()),
            escape(&e.name)
        );
        if !features.is_empty() {
            let _ = write!(out, "<data key=\"d_feature\">{}</data>", escape(&features.join(",")));
        }
        out.push_str("</edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}
