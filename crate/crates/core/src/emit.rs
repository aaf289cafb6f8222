//! Serialization of generated tests: the offline step format (one JSON object
//! per line, keyed by `currentElementName`) and the runner script (one
//! normalized handler name per line).

use crate::generate::{Element, Stage, TestCase};
use crate::model::Model;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// Key under which fields beyond `currentElementName` are stored.
pub const VENDOR_KEY: &str = "x-modelwalk";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("method name `{method}` is produced by several element names: {}", names.join(", "))]
    NameCollision { method: String, names: Vec<String> },
    #[error("line {line}: {message}")]
    BadLine { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Node,
    Edge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepMeta {
    pub element_id: String,
    pub element_kind: ElementKind,
    pub stage: Stage,
}

/// One line of the offline format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfflineStep {
    #[serde(rename = "currentElementName")]
    pub current_element_name: String,
    #[serde(rename = "x-modelwalk", default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<StepMeta>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptLine {
    pub method_name: String,
    pub element_kind: ElementKind,
    pub source_element: String,
    pub element_name: String,
    pub stage: Stage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepScript {
    pub test_id: String,
    pub lines: Vec<ScriptLine>,
}

impl StepScript {
    pub fn method_names(&self) -> impl Iterator<Item = &str> {
        self.lines.iter().map(|l| l.method_name.as_str())
    }

    /// The `.script.txt` form: one method name per line, LF-terminated.
    pub fn to_text(&self) -> String {
        self.lines
            .iter()
            .map(|l| format!("{}\n", l.method_name))
            .collect()
    }

    /// The sidecar JSON carrying stage and trace metadata.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("script serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Lowercases and replaces every character outside `[a-z0-9_]` with `_`.
pub fn normalize(name: &str) -> String {
    name.to_lowercase()
        .chars()
        .map(|c| match c {
            'a'..='z' | '0'..='9' | '_' => c,
            _ => '_',
        })
        .collect()
}

pub fn is_normalized(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
}

/// Fails when two distinct names normalize to the same method name.
pub fn check_collisions<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<(), EmitError> {
    let mut by_method: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for name in names {
        let list = by_method.entry(normalize(name)).or_default();
        if !list.contains(&name) {
            list.push(name);
        }
    }
    match by_method.into_iter().find(|(_, names)| names.len() > 1) {
        Some((method, mut names)) => {
            names.sort_unstable();
            Err(EmitError::NameCollision {
                method,
                names: names.into_iter().map(String::from).collect(),
            })
        }
        None => Ok(()),
    }
}

/// Collision check over every element name of a model.
pub fn check_model_names(model: &Model) -> Result<(), EmitError> {
    check_collisions(
        model
            .nodes
            .iter()
            .map(|n| n.name.as_str())
            .chain(model.edges.iter().map(|e| e.name.as_str())),
    )
}

fn offline_steps(test: &TestCase) -> Vec<OfflineStep> {
    test.flatten()
        .into_iter()
        .map(|flat| OfflineStep {
            current_element_name: flat.step.element_name,
            meta: Some(StepMeta {
                element_id: flat.step.element.id().to_string(),
                element_kind: match flat.step.element {
                    Element::Node(_) => ElementKind::Node,
                    Element::Edge(_) => ElementKind::Edge,
                },
                stage: flat.stage,
            }),
        })
        .collect()
}

/// The `.steps.jsonl` document of a test, in flattened order.
pub fn to_offline_json(test: &TestCase) -> String {
    offline_steps(test)
        .iter()
        .map(|s| {
            let mut line = serde_json::to_string(s).expect("step serializes");
            line.push('\n');
            line
        })
        .collect()
}

/// Reads a `.steps.jsonl` document. Lines without vendor metadata (plain
/// generator output) get their kind from the `v_`/`e_` prefix.
pub fn parse_offline_json(text: &str) -> Result<Vec<OfflineStep>, EmitError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let mut step: OfflineStep = serde_json::from_str(l).map_err(|e| EmitError::BadLine {
                line: i + 1,
                message: e.to_string(),
            })?;
            if step.meta.is_none() {
                let kind = if step.current_element_name.starts_with("v_") {
                    ElementKind::Node
                } else if step.current_element_name.starts_with("e_") {
                    ElementKind::Edge
                } else {
                    return Err(EmitError::BadLine {
                        line: i + 1,
                        message: format!(
                            "cannot tell the kind of `{}` without metadata",
                            step.current_element_name
                        ),
                    });
                };
                step.meta = Some(StepMeta {
                    element_id: step.current_element_name.clone(),
                    element_kind: kind,
                    stage: Stage::Walk,
                });
            }
            Ok(step)
        })
        .collect()
}

/// Builds a runner script from offline steps.
pub fn script_from_offline(test_id: &str, steps: &[OfflineStep]) -> Result<StepScript, EmitError> {
    check_collisions(steps.iter().map(|s| s.current_element_name.as_str()))?;
    let lines = steps
        .iter()
        .map(|s| {
            let meta = s.meta.as_ref().expect("parsed steps carry metadata");
            ScriptLine {
                method_name: normalize(&s.current_element_name),
                element_kind: meta.element_kind,
                source_element: meta.element_id.clone(),
                element_name: s.current_element_name.clone(),
                stage: meta.stage,
            }
        })
        .collect();
    Ok(StepScript {
        test_id: test_id.to_string(),
        lines,
    })
}

/// One script line per flattened step.
pub fn to_runner_script(test: &TestCase) -> Result<StepScript, EmitError> {
    script_from_offline(test.id(), &offline_steps(test))
}
