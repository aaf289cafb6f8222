use super::{ActionOutcome, AssertOutcome, Handler};
use crate::sutsim::{Lifecycle, SutError, SutSession};
use serde::{Deserialize, Serialize};

/// What a node handler checks.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertSpec {
    /// Device-state nodes check the app lifecycle instead of the screen.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifecycle: Option<Lifecycle>,
    #[serde(default)]
    pub elements: Vec<String>,
    #[serde(default)]
    pub texts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingKind {
    Assert(AssertSpec),
    Action(String),
}

/// A handler declared in data rather than code.
///
/// ```json
/// {"method": "v_home", "assert": {"elements": ["home_title"], "texts": ["Home"]}}
/// {"method": "e_login", "action": "login"}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandlerBinding {
    pub method: String,
    #[serde(flatten)]
    pub kind: BindingKind,
}

impl HandlerBinding {
    pub fn to_handler(&self) -> Handler {
        match &self.kind {
            BindingKind::Assert(spec) => {
                let spec = spec.clone();
                Handler::assert(move |session| check(&spec, session))
            }
            BindingKind::Action(action) => {
                let action = action.clone();
                Handler::action(move |session| match session.apply_action(&action) {
                    Ok(_) => ActionOutcome::Performed,
                    Err(e @ SutError::NoEnabledTransition { .. }) => {
                        ActionOutcome::Failed(e.to_string())
                    }
                    Err(e) => ActionOutcome::Crashed(e.to_string()),
                })
            }
        }
    }
}

fn check(spec: &AssertSpec, session: &SutSession) -> AssertOutcome {
    if let Some(expected) = spec.lifecycle {
        if session.lifecycle() != expected {
            return AssertOutcome::Fail(format!(
                "expected app {expected:?}, found {:?}",
                session.lifecycle()
            ));
        }
        if spec.elements.is_empty() && spec.texts.is_empty() {
            return AssertOutcome::Pass;
        }
    }
    let snapshot = match session.snapshot() {
        Ok(s) => s,
        Err(e) => return AssertOutcome::Fail(e.to_string()),
    };
    let missing: Vec<&str> = spec
        .elements
        .iter()
        .filter(|id| !snapshot.has_element(id))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() {
        return AssertOutcome::Fail(format!("missing elements: {}", missing.join(", ")));
    }
    let missing: Vec<&str> = spec
        .texts
        .iter()
        .filter(|t| !snapshot.has_text(t))
        .map(String::as_str)
        .collect();
    if !missing.is_empty() {
        return AssertOutcome::Fail(format!("missing texts: {}", missing.join(", ")));
    }
    AssertOutcome::Pass
}
