//! A scripted finite-state-machine application used as the system under
//! test. Every fired transition is appended to a log, which is what the
//! coverage analysis consumes.
//!
//! A [`SutSpec`] is authored as JSON:
//!
//! ```json
//! {
//!   "name": "demo",
//!   "initial": "SignInPage",
//!   "states": [
//!     {"id": "SignInPage", "elements": [{"id": "login_button", "text": "Sign in"}]}
//!   ],
//!   "transitions": [
//!     {"id": "t01", "from": "SignInPage", "to": "Home",
//!      "trigger": {"action": "login"}, "guards": ["token_valid", "service_up"],
//!      "reasons": [], "user_model": true}
//!   ]
//! }
//! ```
//!
//! Guards name an environment flag, optionally negated with `!`.

use crate::runner::HandlerBinding;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use thiserror::Error;

id_newtype!(SutStateId);
id_newtype!(TransitionId);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReasonCategory {
    AccessToken,
    ExternalService,
    ExternalDeviceEvent,
    DiscoveredImplementationError,
    Timing,
    UserModelCoverageMiss,
}

impl ReasonCategory {
    pub const ALL: [ReasonCategory; 6] = [
        ReasonCategory::AccessToken,
        ReasonCategory::ExternalService,
        ReasonCategory::ExternalDeviceEvent,
        ReasonCategory::DiscoveredImplementationError,
        ReasonCategory::Timing,
        ReasonCategory::UserModelCoverageMiss,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ReasonCategory::AccessToken => "Access Token",
            ReasonCategory::ExternalService => "External Service",
            ReasonCategory::ExternalDeviceEvent => "External Device Event",
            ReasonCategory::DiscoveredImplementationError => "Discovered Implementation Error",
            ReasonCategory::Timing => "Timing",
            ReasonCategory::UserModelCoverageMiss => "User Model Coverage Miss",
        }
    }

    /// Reasons caused by something outside the user's control.
    pub fn is_external(self) -> bool {
        matches!(
            self,
            ReasonCategory::AccessToken
                | ReasonCategory::ExternalService
                | ReasonCategory::ExternalDeviceEvent
                | ReasonCategory::Timing
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    TokenValid,
    ServiceUp,
    Foreground,
    TimingWindow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GuardCondition {
    pub flag: Flag,
    pub expected: bool,
}

impl FromStr for GuardCondition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (expected, name) = match s.strip_prefix('!') {
            Some(rest) => (false, rest),
            None => (true, s),
        };
        let flag = match name {
            "token_valid" => Flag::TokenValid,
            "service_up" => Flag::ServiceUp,
            "foreground" => Flag::Foreground,
            "timing_window" => Flag::TimingWindow,
            other => return Err(format!("unknown guard flag `{other}`")),
        };
        Ok(GuardCondition { flag, expected })
    }
}

impl fmt::Display for GuardCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.flag {
            Flag::TokenValid => "token_valid",
            Flag::ServiceUp => "service_up",
            Flag::Foreground => "foreground",
            Flag::TimingWindow => "timing_window",
        };
        if !self.expected {
            f.write_str("!")?;
        }
        f.write_str(name)
    }
}

impl Serialize for GuardCondition {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GuardCondition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    TokenExpire,
    TokenRefresh,
    ServiceDown,
    ServiceUp,
    Background,
    Foreground,
    TimingTick,
}

impl Event {
    pub const ALL: [Event; 7] = [
        Event::TokenExpire,
        Event::TokenRefresh,
        Event::ServiceDown,
        Event::ServiceUp,
        Event::Background,
        Event::Foreground,
        Event::TimingTick,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Event::TokenExpire => "token_expire",
            Event::TokenRefresh => "token_refresh",
            Event::ServiceDown => "service_down",
            Event::ServiceUp => "service_up",
            Event::Background => "background",
            Event::Foreground => "foreground",
            Event::TimingTick => "timing_tick",
        }
    }
}

impl FromStr for Event {
    type Err = SutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Event::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| SutError::UnknownEvent(s.to_string()))
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    Action(String),
    Event(Event),
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trigger::Action(a) => write!(f, "action:{a}"),
            Trigger::Event(e) => write!(f, "event:{e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SutTransition {
    pub id: TransitionId,
    pub from: SutStateId,
    pub to: SutStateId,
    pub trigger: Trigger,
    #[serde(default)]
    pub guards: Vec<GuardCondition>,
    #[serde(default)]
    pub reasons: BTreeSet<ReasonCategory>,
    /// Part of the user-reachable subset.
    #[serde(default)]
    pub user_model: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub id: String,
    pub text: String,
    /// Narrower screens do not render the element.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_width: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SutState {
    pub id: SutStateId,
    #[serde(default)]
    pub elements: Vec<ElementSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SutSpec {
    #[serde(default)]
    pub name: String,
    pub initial: SutStateId,
    pub states: Vec<SutState>,
    pub transitions: Vec<SutTransition>,
    /// Declarative step handlers for the runner, keyed by method name.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub handlers: Vec<HandlerBinding>,
}

impl SutSpec {
    pub fn from_json(text: &str) -> Result<Self, SutError> {
        let spec: SutSpec =
            serde_json::from_str(text).map_err(|e| SutError::Spec(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    /// Structural checks: unique ids, known endpoints, known initial state.
    pub fn check(&self) -> Result<(), SutError> {
        let mut states = BTreeSet::new();
        for s in &self.states {
            if !states.insert(&s.id) {
                return Err(SutError::Spec(format!("duplicate state `{}`", s.id)));
            }
        }
        if !states.contains(&self.initial) {
            return Err(SutError::Spec(format!("initial state `{}` is not a state", self.initial)));
        }
        let mut ids = BTreeSet::new();
        for t in &self.transitions {
            if !ids.insert(&t.id) {
                return Err(SutError::Spec(format!("duplicate transition `{}`", t.id)));
            }
            for end in [&t.from, &t.to] {
                if !states.contains(end) {
                    return Err(SutError::Spec(format!(
                        "transition `{}` references unknown state `{end}`",
                        t.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn state(&self, id: &SutStateId) -> Option<&SutState> {
        self.states.iter().find(|s| &s.id == id)
    }

    pub fn transition(&self, id: &TransitionId) -> Option<&SutTransition> {
        self.transitions.iter().find(|t| &t.id == id)
    }

    pub fn transition_ids(&self) -> BTreeSet<TransitionId> {
        self.transitions.iter().map(|t| t.id.clone()).collect()
    }

    pub fn user_model_transitions(&self) -> BTreeSet<TransitionId> {
        self.transitions
            .iter()
            .filter(|t| t.user_model)
            .map(|t| t.id.clone())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub token_valid: bool,
    pub service_up: bool,
    pub foreground: bool,
    pub timing_window: bool,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            token_valid: true,
            service_up: true,
            foreground: true,
            timing_window: false,
        }
    }
}

impl Environment {
    pub fn get(&self, flag: Flag) -> bool {
        match flag {
            Flag::TokenValid => self.token_valid,
            Flag::ServiceUp => self.service_up,
            Flag::Foreground => self.foreground,
            Flag::TimingWindow => self.timing_window,
        }
    }

    pub fn holds(&self, guards: &[GuardCondition]) -> bool {
        guards.iter().all(|g| self.get(g.flag) == g.expected)
    }

    /// Flag update caused by an event.
    pub fn apply(&mut self, event: Event) {
        match event {
            Event::TokenExpire => self.token_valid = false,
            Event::TokenRefresh => self.token_valid = true,
            Event::ServiceDown => self.service_up = false,
            Event::ServiceUp => self.service_up = true,
            Event::Background => self.foreground = false,
            Event::Foreground => self.foreground = true,
            Event::TimingTick => self.timing_window = true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lifecycle {
    Uninstalled,
    Installed,
    Started,
    Stopped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    pub transition: TransitionId,
    pub from: SutStateId,
    pub to: SutStateId,
    pub trigger: String,
}

impl fmt::Display for LogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}",
            self.seq, self.transition, self.from, self.to, self.trigger
        )
    }
}

/// The transition log in its line format, LF-terminated.
pub fn log_to_text(entries: &[LogEntry]) -> String {
    entries.iter().map(|e| format!("{e}\n")).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservedElement {
    pub id: String,
    pub text: String,
}

/// What a tester can see at one moment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub lifecycle: Lifecycle,
    pub state: Option<SutStateId>,
    pub elements: Vec<ObservedElement>,
}

impl Snapshot {
    pub fn has_element(&self, id: &str) -> bool {
        self.elements.iter().any(|e| e.id == id)
    }

    pub fn has_text(&self, text: &str) -> bool {
        self.elements.iter().any(|e| e.text == text)
    }
}

/// Input history of a session, in order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    Action(String),
    Event(Event),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SutError {
    #[error("invalid SUT spec: {0}")]
    Spec(String),
    #[error("no enabled transition for action `{action}` in state `{state}`")]
    NoEnabledTransition { state: SutStateId, action: String },
    #[error("{count} transitions enabled for `{trigger}` in state `{state}`")]
    AmbiguousTransition {
        state: SutStateId,
        trigger: String,
        count: usize,
    },
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("application is not running")]
    NotRunning,
    #[error("lifecycle action `{action}` is invalid while {from:?}")]
    Lifecycle { action: String, from: Lifecycle },
}

const LIFECYCLE_ACTIONS: [&str; 4] = ["install", "start", "stop", "uninstall"];

/// One running (or not yet installed) instance of the application.
///
/// Sessions share nothing mutable; one per device execution.
#[derive(Debug, Clone)]
pub struct SutSession {
    spec: Arc<SutSpec>,
    state: SutStateId,
    env: Environment,
    lifecycle: Lifecycle,
    log: Vec<LogEntry>,
    inputs: Vec<Input>,
    screen_width: Option<u32>,
    schedule: BTreeMap<usize, Vec<Event>>,
}

impl SutSession {
    /// A fresh, uninstalled session.
    pub fn new(spec: Arc<SutSpec>) -> Self {
        SutSession {
            state: spec.initial.clone(),
            spec,
            env: Environment::default(),
            lifecycle: Lifecycle::Uninstalled,
            log: Vec::new(),
            inputs: Vec::new(),
            screen_width: None,
            schedule: BTreeMap::new(),
        }
    }

    /// A session already installed, as a device farm hands it to a test.
    pub fn installed(spec: Arc<SutSpec>) -> Self {
        let mut s = Self::new(spec);
        s.lifecycle = Lifecycle::Installed;
        s
    }

    /// Elements with a `min_width` above this are not rendered.
    pub fn with_screen_width(mut self, width: u32) -> Self {
        self.screen_width = Some(width);
        self
    }

    pub fn spec(&self) -> &SutSpec {
        &self.spec
    }

    pub fn state(&self) -> &SutStateId {
        &self.state
    }

    pub fn environment(&self) -> Environment {
        self.env
    }

    pub fn lifecycle(&self) -> Lifecycle {
        self.lifecycle
    }

    pub fn transition_log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn inputs(&self) -> &[Input] {
        &self.inputs
    }

    /// Queue an event to be injected right before step `index` runs.
    pub fn schedule_event(&mut self, index: usize, event: Event) {
        self.schedule.entry(index).or_default().push(event);
    }

    /// Injects the events scheduled for step `index`.
    pub fn before_step(&mut self, index: usize) -> Result<(), SutError> {
        if let Some(events) = self.schedule.remove(&index) {
            for e in events {
                self.inject(e)?;
            }
        }
        Ok(())
    }

    fn observe(&self) -> Snapshot {
        if self.lifecycle != Lifecycle::Started {
            return Snapshot {
                lifecycle: self.lifecycle,
                state: None,
                elements: Vec::new(),
            };
        }
        let width = self.screen_width.unwrap_or(u32::MAX);
        let elements = self
            .spec
            .state(&self.state)
            .map(|s| {
                s.elements
                    .iter()
                    .filter(|e| e.min_width.is_none_or(|w| width >= w))
                    .map(|e| ObservedElement {
                        id: e.id.clone(),
                        text: e.text.clone(),
                    })
                    .collect()
            })
            .unwrap_or_default();
        Snapshot {
            lifecycle: self.lifecycle,
            state: Some(self.state.clone()),
            elements,
        }
    }

    /// Observable record of the current screen. Never touches the log.
    pub fn snapshot(&self) -> Result<Snapshot, SutError> {
        if self.lifecycle != Lifecycle::Started {
            return Err(SutError::NotRunning);
        }
        Ok(self.observe())
    }

    fn fire(&mut self, trigger: &Trigger) -> Result<Option<TransitionId>, SutError> {
        let enabled: Vec<&SutTransition> = self
            .spec
            .transitions
            .iter()
            .filter(|t| t.from == self.state && &t.trigger == trigger && self.env.holds(&t.guards))
            .collect();
        match enabled.as_slice() {
            [] => Ok(None),
            [t] => {
                let entry = LogEntry {
                    seq: self.log.len() as u64 + 1,
                    transition: t.id.clone(),
                    from: t.from.clone(),
                    to: t.to.clone(),
                    trigger: trigger.to_string(),
                };
                let id = t.id.clone();
                self.state = entry.to.clone();
                self.log.push(entry);
                Ok(Some(id))
            }
            many => Err(SutError::AmbiguousTransition {
                state: self.state.clone(),
                trigger: trigger.to_string(),
                count: many.len(),
            }),
        }
    }

    fn lifecycle_action(&mut self, action: &str) -> Result<(), SutError> {
        use Lifecycle::*;
        let next = match (action, self.lifecycle) {
            ("install", Uninstalled) => Installed,
            ("start", Installed | Stopped) => {
                self.state = self.spec.initial.clone();
                Started
            }
            ("stop", Started) => Stopped,
            ("uninstall", Installed | Stopped) => Uninstalled,
            _ => {
                return Err(SutError::Lifecycle {
                    action: action.to_string(),
                    from: self.lifecycle,
                })
            }
        };
        self.lifecycle = next;
        Ok(())
    }

    /// Performs a user action: either a lifecycle action or a trigger of the
    /// unique enabled transition out of the current state.
    pub fn apply_action(&mut self, action: &str) -> Result<Snapshot, SutError> {
        self.inputs.push(Input::Action(action.to_string()));
        if LIFECYCLE_ACTIONS.contains(&action) {
            self.lifecycle_action(action)?;
            return Ok(self.observe());
        }
        if self.lifecycle != Lifecycle::Started {
            return Err(SutError::NotRunning);
        }
        let fired = self.fire(&Trigger::Action(action.to_string()));
        // a timing window only spans the next user action
        self.env.timing_window = false;
        match fired? {
            Some(_) => Ok(self.observe()),
            None => Err(SutError::NoEnabledTransition {
                state: self.state.clone(),
                action: action.to_string(),
            }),
        }
    }

    /// Flips the environment flag tied to `event` and fires the internal
    /// transition it triggers, if any.
    pub fn inject_event(&mut self, event: &str) -> Result<Option<TransitionId>, SutError> {
        self.inject(event.parse()?)
    }

    pub fn inject(&mut self, event: Event) -> Result<Option<TransitionId>, SutError> {
        self.inputs.push(Input::Event(event));
        self.env.apply(event);
        if self.lifecycle != Lifecycle::Started {
            return Ok(None);
        }
        self.fire(&Trigger::Event(event))
    }
}

/// Follows a transition log from the initial state, checking that every
/// entry starts where the previous one ended, or at the initial state after
/// a restart. Returns the final state.
pub fn replay_log(spec: &SutSpec, log: &[LogEntry]) -> Result<SutStateId, String> {
    let mut state = spec.initial.clone();
    for entry in log {
        let t = spec
            .transition(&entry.transition)
            .ok_or_else(|| format!("unknown transition `{}`", entry.transition))?;
        if t.from != state && t.from != spec.initial {
            return Err(format!(
                "entry {} leaves `{}` but the replay is in `{state}`",
                entry.seq, t.from
            ));
        }
        state = t.to.clone();
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> Arc<SutSpec> {
        Arc::new(
            SutSpec::from_json(
                r#"{
            "initial": "SignInPage",
            "states": [
                {"id": "SignInPage", "elements": [{"id": "login_button", "text": "Sign in"}]},
                {"id": "Home", "elements": [
                    {"id": "home_title", "text": "Home"},
                    {"id": "wide_panel", "text": "Overview", "min_width": 600}
                ]},
                {"id": "HomeOffline", "elements": [{"id": "offline_banner", "text": "Offline"}]}
            ],
            "transitions": [
                {"id": "t1", "from": "SignInPage", "to": "Home", "trigger": {"action": "login"},
                 "guards": ["token_valid"], "user_model": true},
                {"id": "t2", "from": "Home", "to": "HomeOffline", "trigger": {"event": "service_down"},
                 "reasons": ["ExternalService"]},
                {"id": "t3", "from": "Home", "to": "SignInPage", "trigger": {"action": "logout"}}
            ]
        }"#,
            )
            .unwrap(),
        )
    }

    fn started() -> SutSession {
        let mut s = SutSession::new(spec());
        s.apply_action("install").unwrap();
        s.apply_action("start").unwrap();
        s
    }

    #[test]
    fn install_then_start() {
        let s = started();
        assert_eq!(s.lifecycle(), Lifecycle::Started);
        assert_eq!(s.state().as_str(), "SignInPage");
        assert!(s.transition_log().is_empty());
    }

    #[test]
    fn login_fires_and_logs() {
        let mut s = started();
        let snap = s.apply_action("login").unwrap();
        assert_eq!(snap.state, Some("Home".into()));
        assert_eq!(s.transition_log().len(), 1);
        assert_eq!(s.transition_log()[0].transition.as_str(), "t1");
        assert_eq!(
            log_to_text(s.transition_log()),
            "1\tt1\tSignInPage\tHome\taction:login\n"
        );
    }

    #[test]
    fn action_without_transition() {
        let mut s = started();
        s.apply_action("login").unwrap();
        assert!(matches!(
            s.apply_action("login"),
            Err(SutError::NoEnabledTransition { .. })
        ));
    }

    #[test]
    fn expired_token_disables_guarded_transition() {
        let mut s = started();
        assert_eq!(s.inject_event("token_expire").unwrap(), None);
        assert!(!s.environment().token_valid);
        assert!(s.apply_action("login").is_err());
        s.inject_event("token_refresh").unwrap();
        assert!(s.apply_action("login").is_ok());
    }

    #[test]
    fn service_down_fires_internal_transition() {
        let mut s = started();
        s.apply_action("login").unwrap();
        assert_eq!(s.inject_event("service_down").unwrap(), Some("t2".into()));
        assert_eq!(s.state().as_str(), "HomeOffline");
        assert!(!s.environment().service_up);
        assert_eq!(s.transition_log()[1].trigger, "event:service_down");
    }

    #[test]
    fn background_and_back() {
        let mut s = started();
        s.inject_event("background").unwrap();
        s.inject_event("foreground").unwrap();
        assert_eq!(s.environment(), Environment::default());
        assert_eq!(s.state().as_str(), "SignInPage");
        assert!(s.transition_log().is_empty());
    }

    #[test]
    fn unknown_event() {
        assert_eq!(
            started().inject_event("earthquake"),
            Err(SutError::UnknownEvent("earthquake".into()))
        );
    }

    #[test]
    fn snapshots() {
        let mut s = started();
        s.apply_action("login").unwrap();
        let a = s.snapshot().unwrap();
        let b = s.snapshot().unwrap();
        assert_eq!(a, b);
        assert!(a.has_element("wide_panel"));
        assert_eq!(s.transition_log().len(), 1);
        s.apply_action("stop").unwrap();
        assert_eq!(s.snapshot(), Err(SutError::NotRunning));
    }

    #[test]
    fn narrow_screen_hides_elements() {
        let mut s = SutSession::installed(spec()).with_screen_width(320);
        s.apply_action("start").unwrap();
        s.apply_action("login").unwrap();
        let snap = s.snapshot().unwrap();
        assert!(snap.has_element("home_title"));
        assert!(!snap.has_element("wide_panel"));
    }

    #[test]
    fn lifecycle_rules() {
        let mut s = SutSession::new(spec());
        assert_eq!(s.apply_action("login"), Err(SutError::NotRunning));
        assert!(matches!(s.apply_action("start"), Err(SutError::Lifecycle { .. })));
        s.apply_action("install").unwrap();
        s.apply_action("start").unwrap();
        s.apply_action("login").unwrap();
        s.apply_action("stop").unwrap();
        s.apply_action("start").unwrap();
        assert_eq!(s.state().as_str(), "SignInPage");
        s.apply_action("stop").unwrap();
        s.apply_action("uninstall").unwrap();
        assert_eq!(s.lifecycle(), Lifecycle::Uninstalled);
    }

    #[test]
    fn scheduled_events_fire_before_their_step() {
        let mut s = started();
        s.apply_action("login").unwrap();
        s.schedule_event(3, Event::ServiceDown);
        s.before_step(2).unwrap();
        assert_eq!(s.state().as_str(), "Home");
        s.before_step(3).unwrap();
        assert_eq!(s.state().as_str(), "HomeOffline");
    }

    #[test]
    fn ambiguous_spec_is_reported() {
        let mut doc: SutSpec = (*spec()).clone();
        let mut dup = doc.transitions[0].clone();
        dup.id = "t9".into();
        dup.guards.clear();
        doc.transitions.push(dup);
        let mut s = SutSession::installed(Arc::new(doc));
        s.apply_action("start").unwrap();
        assert!(matches!(
            s.apply_action("login"),
            Err(SutError::AmbiguousTransition { count: 2, .. })
        ));
    }

    #[test]
    fn spec_checks() {
        let bad = r#"{"initial": "X", "states": [{"id": "A"}], "transitions": []}"#;
        assert!(matches!(SutSpec::from_json(bad), Err(SutError::Spec(_))));
        let bad_guard = r#"{"initial": "A", "states": [{"id": "A"}], "transitions": [
            {"id": "t", "from": "A", "to": "A", "trigger": {"action": "x"}, "guards": ["sunny"]}]}"#;
        assert!(SutSpec::from_json(bad_guard).is_err());
    }

    #[test]
    fn replay_reproduces_state() {
        let mut s = started();
        s.apply_action("login").unwrap();
        s.apply_action("logout").unwrap();
        s.apply_action("login").unwrap();
        s.inject_event("service_down").unwrap();
        assert_eq!(&replay_log(s.spec(), s.transition_log()).unwrap(), s.state());
    }
}
