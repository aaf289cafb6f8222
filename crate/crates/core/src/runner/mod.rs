//! Executes runner scripts against SUT sessions.
//!
//! Every method name in a script resolves to exactly one handler: node
//! handlers assert on what the session shows, edge handlers act on it. A
//! node handler only ever sees `&SutSession`, so it cannot fire transitions.

mod bindings;
mod metrics;
mod report;

pub use bindings::{AssertSpec, BindingKind, HandlerBinding};
pub use metrics::PerfSampler;
pub use report::{write_matrix, IndexEntry, ReportIndex};
pub(crate) use report::file_stem;

use crate::emit::{is_normalized, ElementKind, StepScript};
use crate::generate::Stage;
use crate::sutsim::{LogEntry, Snapshot, SutSession};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssertOutcome {
    Pass,
    Fail(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionOutcome {
    Performed,
    /// The action had no effect; later node assertions decide the verdict.
    Failed(String),
    /// The application is gone or in an impossible state.
    Crashed(String),
}

pub type AssertFn = dyn Fn(&SutSession) -> AssertOutcome + Send + Sync;
pub type ActionFn = dyn Fn(&mut SutSession) -> ActionOutcome + Send + Sync;

#[derive(Clone)]
pub enum Handler {
    NodeAssert(Arc<AssertFn>),
    EdgeAction(Arc<ActionFn>),
}

impl Handler {
    pub fn assert(f: impl Fn(&SutSession) -> AssertOutcome + Send + Sync + 'static) -> Self {
        Handler::NodeAssert(Arc::new(f))
    }

    pub fn action(f: impl Fn(&mut SutSession) -> ActionOutcome + Send + Sync + 'static) -> Self {
        Handler::EdgeAction(Arc::new(f))
    }

    pub fn kind(&self) -> ElementKind {
        match self {
            Handler::NodeAssert(_) => ElementKind::Node,
            Handler::EdgeAction(_) => ElementKind::Edge,
        }
    }
}

impl fmt::Debug for Handler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Handler::NodeAssert(_) => f.write_str("Handler::NodeAssert"),
            Handler::EdgeAction(_) => f.write_str("Handler::EdgeAction"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunnerError {
    #[error("handler `{0}` is already registered")]
    DuplicateHandler(String),
    #[error("`{0}` is not a normalized method name")]
    InvalidName(String),
    #[error("no handler bound for step {index} `{method}`")]
    UnboundStep { index: usize, method: String },
    #[error("step {index} `{method}` is a {expected:?} step but its handler is a {found:?} handler")]
    KindMismatch {
        index: usize,
        method: String,
        expected: ElementKind,
        found: ElementKind,
    },
    #[error("device list is empty")]
    EmptyDeviceList,
    #[error("invalid device profile `{id}`: {message}")]
    InvalidProfile { id: String, message: String },
}

/// One-to-one map from method name to handler.
#[derive(Debug, Clone, Default)]
pub struct HandlerRegistry {
    handlers: BTreeMap<String, Handler>,
}

impl HandlerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, method: impl Into<String>, handler: Handler) -> Result<(), RunnerError> {
        let method = method.into();
        if !is_normalized(&method) {
            return Err(RunnerError::InvalidName(method));
        }
        if self.handlers.contains_key(&method) {
            return Err(RunnerError::DuplicateHandler(method));
        }
        self.handlers.insert(method, handler);
        Ok(())
    }

    pub fn register_handlers<S: Into<String>>(
        mut self,
        bindings: impl IntoIterator<Item = (S, Handler)>,
    ) -> Result<Self, RunnerError> {
        for (method, handler) in bindings {
            self.register(method, handler)?;
        }
        Ok(self)
    }

    /// Registry built from declarative bindings (the `handlers` section of a
    /// SUT definition).
    pub fn from_bindings(bindings: &[HandlerBinding]) -> Result<Self, RunnerError> {
        Self::new().register_handlers(
            bindings
                .iter()
                .map(|b| (b.method.clone(), b.to_handler())),
        )
    }

    pub fn lookup(&self, method: &str) -> Option<&Handler> {
        self.handlers.get(method)
    }

    pub fn len(&self) -> usize {
        self.handlers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.handlers.is_empty()
    }

    pub fn method_names(&self) -> impl Iterator<Item = &str> {
        self.handlers.keys().map(String::as_str)
    }

    /// Fails on the first script line without a handler of the right kind.
    pub fn check_script(&self, script: &StepScript) -> Result<(), RunnerError> {
        for (index, line) in script.lines.iter().enumerate() {
            let handler = self
                .lookup(&line.method_name)
                .ok_or_else(|| RunnerError::UnboundStep {
                    index,
                    method: line.method_name.clone(),
                })?;
            if handler.kind() != line.element_kind {
                return Err(RunnerError::KindMismatch {
                    index,
                    method: line.method_name.clone(),
                    expected: line.element_kind,
                    found: handler.kind(),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Screen {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerfEnvelope {
    /// Idle CPU load in percent.
    pub cpu_base: f64,
    /// Resident memory at launch, MB.
    pub mem_base: f64,
    pub jitter_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceProfile {
    pub id: String,
    pub os_version: String,
    pub screen: Screen,
    pub perf: PerfEnvelope,
}

impl DeviceProfile {
    pub fn check(&self) -> Result<(), RunnerError> {
        let fail = |message: &str| {
            Err(RunnerError::InvalidProfile {
                id: self.id.clone(),
                message: message.to_string(),
            })
        };
        if self.id.is_empty() {
            return fail("empty id");
        }
        if self.screen.width == 0 || self.screen.height == 0 {
            return fail("screen dimensions must be positive");
        }
        if !(0.0..=100.0).contains(&self.perf.cpu_base) {
            return fail("cpu_base must lie in [0, 100]");
        }
        if self.perf.mem_base <= 0.0 {
            return fail("mem_base must be positive");
        }
        Ok(())
    }
}

/// A named set of device profiles, as stored in a devices file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceSet {
    #[serde(default)]
    pub name: String,
    pub devices: Vec<DeviceProfile>,
}

impl DeviceSet {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let set: DeviceSet = serde_json::from_str(text).map_err(|e| e.to_string())?;
        for d in &set.devices {
            d.check().map_err(|e| e.to_string())?;
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailedStep {
    pub index: usize,
    pub method_name: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub method_name: String,
    pub stage: Stage,
    /// Observable state right after the step; absent while not running.
    pub snapshot: Option<Snapshot>,
    pub cpu_pct: f64,
    pub mem_mb: f64,
    pub duration_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub test_id: String,
    pub device: String,
    pub verdict: Verdict,
    pub failed_step: Option<FailedStep>,
    pub steps: Vec<StepRecord>,
    pub transition_log: Vec<LogEntry>,
}

impl ExecutionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Runs a script on one session, stopping at the first failed node
/// assertion or crash.
pub fn execute(
    script: &StepScript,
    session: &mut SutSession,
    registry: &HandlerRegistry,
    profile: &DeviceProfile,
) -> Result<ExecutionReport, RunnerError> {
    registry.check_script(script)?;
    let mut sampler = PerfSampler::new(profile);
    let mut steps = Vec::with_capacity(script.lines.len());
    let mut failed_step = None;

    for (index, line) in script.lines.iter().enumerate() {
        let mut note = None;
        let mut failure = session
            .before_step(index)
            .err()
            .map(|e| format!("crash while injecting events: {e}"));
        if failure.is_none() {
            match registry.lookup(&line.method_name).expect("checked") {
                Handler::NodeAssert(f) => {
                    if let AssertOutcome::Fail(message) = f(session) {
                        failure = Some(message);
                    }
                }
                Handler::EdgeAction(f) => match f(session) {
                    ActionOutcome::Performed => {}
                    ActionOutcome::Failed(message) => note = Some(message),
                    ActionOutcome::Crashed(detail) => failure = Some(format!("crash: {detail}")),
                },
            }
        }
        let sample = sampler.sample(line.element_kind, session.transition_log().len());
        steps.push(StepRecord {
            index,
            method_name: line.method_name.clone(),
            stage: line.stage,
            snapshot: session.snapshot().ok(),
            cpu_pct: sample.cpu_pct,
            mem_mb: sample.mem_mb,
            duration_ms: sample.duration_ms,
            note,
        });
        if let Some(message) = failure {
            failed_step = Some(FailedStep {
                index,
                method_name: line.method_name.clone(),
                message,
            });
            break;
        }
    }

    Ok(ExecutionReport {
        test_id: script.test_id.clone(),
        device: profile.id.clone(),
        verdict: if failed_step.is_some() {
            Verdict::Fail
        } else {
            Verdict::Pass
        },
        failed_step,
        steps,
        transition_log: session.transition_log().to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub test_id: String,
    /// One report per device, in input order.
    pub reports: Vec<ExecutionReport>,
    pub passed: usize,
    pub failed: usize,
}

impl MatrixReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Runs the script once per device, each on its own session, concurrently.
pub fn run_matrix<F>(
    script: &StepScript,
    registry: &HandlerRegistry,
    sut_factory: F,
    devices: &[DeviceProfile],
) -> Result<MatrixReport, RunnerError>
where
    F: Fn(&DeviceProfile) -> SutSession + Sync,
{
    if devices.is_empty() {
        return Err(RunnerError::EmptyDeviceList);
    }
    for d in devices {
        d.check()?;
    }
    registry.check_script(script)?;

    let factory = &sut_factory;
    let reports: Vec<ExecutionReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = devices
            .iter()
            .map(|device| {
                scope.spawn(move || {
                    let mut session = factory(device);
                    execute(script, &mut session, registry, device)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("device thread panicked"))
            .collect::<Result<_, _>>()
    })?;

    let passed = reports.iter().filter(|r| r.passed()).count();
    Ok(MatrixReport {
        test_id: script.test_id.clone(),
        failed: reports.len() - passed,
        passed,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emit::ScriptLine;
    use crate::sutsim::SutSpec;

    fn spec() -> Arc<SutSpec> {
        Arc::new(
            SutSpec::from_json(
                r#"{"initial": "A",
                "states": [{"id": "A", "elements": [{"id": "a", "text": "A"}]},
                           {"id": "B", "elements": [{"id": "b", "text": "B", "min_width": 400}]}],
                "transitions": [{"id": "t1", "from": "A", "to": "B", "trigger": {"action": "go"}}],
                "handlers": [
                    {"method": "v_a", "assert": {"elements": ["a"]}},
                    {"method": "v_b", "assert": {"elements": ["b"]}},
                    {"method": "e_go", "action": "go"},
                    {"method": "e_start", "action": "start"},
                    {"method": "v_installed", "assert": {"lifecycle": "installed"}}
                ]}"#,
            )
            .unwrap(),
        )
    }

    fn script(lines: &[(&str, ElementKind)]) -> StepScript {
        StepScript {
            test_id: "t".into(),
            lines: lines
                .iter()
                .map(|(m, k)| ScriptLine {
                    method_name: m.to_string(),
                    element_kind: *k,
                    source_element: m.to_string(),
                    element_name: m.to_string(),
                    stage: Stage::Walk,
                })
                .collect(),
        }
    }

    fn happy() -> StepScript {
        use ElementKind::*;
        script(&[
            ("v_installed", Node),
            ("e_start", Edge),
            ("v_a", Node),
            ("e_go", Edge),
            ("v_b", Node),
        ])
    }

    pub(crate) fn profile(id: &str, width: u32) -> DeviceProfile {
        DeviceProfile {
            id: id.into(),
            os_version: "14".into(),
            screen: Screen { width, height: 800 },
            perf: PerfEnvelope {
                cpu_base: 20.0,
                mem_base: 150.0,
                jitter_seed: 7,
            },
        }
    }

    fn registry() -> HandlerRegistry {
        HandlerRegistry::from_bindings(&spec().handlers).unwrap()
    }

    #[test]
    fn registration_rules() {
        let mut r = HandlerRegistry::new();
        r.register("v_home", Handler::assert(|_| AssertOutcome::Pass)).unwrap();
        assert!(r.lookup("v_home").is_some());
        assert_eq!(
            r.register("v_home", Handler::assert(|_| AssertOutcome::Pass)),
            Err(RunnerError::DuplicateHandler("v_home".into()))
        );
        assert_eq!(
            r.register("v_Home", Handler::assert(|_| AssertOutcome::Pass)),
            Err(RunnerError::InvalidName("v_Home".into()))
        );
    }

    #[test]
    fn passing_run_records_every_step() {
        let mut s = SutSession::installed(spec());
        let r = execute(&happy(), &mut s, &registry(), &profile("p", 1080)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.steps.len(), 5);
        assert!(r.failed_step.is_none());
        assert_eq!(r.transition_log.len(), 1);
        let names: Vec<&str> = r.steps.iter().map(|s| s.method_name.as_str()).collect();
        assert_eq!(names, happy().method_names().collect::<Vec<_>>());
        for step in &r.steps {
            assert!((0.0..=100.0).contains(&step.cpu_pct));
            assert!(step.mem_mb > 0.0);
        }
        assert!(r.steps[0].snapshot.is_none());
        assert!(r.steps[2].snapshot.is_some());
    }

    #[test]
    fn first_assertion_failure_stops() {
        let mut s = SutSession::new(spec()); // not installed
        let r = execute(&happy(), &mut s, &registry(), &profile("p", 1080)).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.failed_step.as_ref().unwrap().index, 0);
        assert_eq!(r.steps.len(), 1);
    }

    #[test]
    fn crash_fails_the_step() {
        use ElementKind::*;
        let mut s = SutSession::new(spec());
        let r = execute(&script(&[("e_go", Edge), ("v_a", Node)]), &mut s, &registry(), &profile("p", 1080)).unwrap();
        let failed = r.failed_step.unwrap();
        assert_eq!(failed.index, 0);
        assert!(failed.message.starts_with("crash"));
    }

    #[test]
    fn unbound_and_mismatched_steps_are_rejected_up_front() {
        use ElementKind::*;
        let mut s = SutSession::installed(spec());
        assert_eq!(
            execute(&script(&[("v_installed", Node), ("e_fly", Edge)]), &mut s, &registry(), &profile("p", 1)),
            Err(RunnerError::UnboundStep { index: 1, method: "e_fly".into() })
        );
        assert!(matches!(
            execute(&script(&[("e_go", Node)]), &mut s, &registry(), &profile("p", 1)),
            Err(RunnerError::KindMismatch { .. })
        ));
        assert!(s.inputs().is_empty());
    }

    #[test]
    fn matrix_isolates_devices() {
        let spec = spec();
        let devices = [profile("wide", 1080), profile("narrow", 320), profile("tablet", 1600)];
        let m = run_matrix(&happy(), &registry(), |d| {
            SutSession::installed(spec.clone()).with_screen_width(d.screen.width)
        }, &devices)
        .unwrap();
        let verdicts: Vec<Verdict> = m.reports.iter().map(|r| r.verdict).collect();
        assert_eq!(verdicts, [Verdict::Pass, Verdict::Fail, Verdict::Pass]);
        assert_eq!((m.passed, m.failed), (2, 1));
        assert_eq!(m.reports[1].failed_step.as_ref().unwrap().index, 4);
        assert_eq!(m.reports[1].device, "narrow");
    }

    #[test]
    fn single_device_matrix_equals_direct_execute() {
        let spec = spec();
        let d = profile("only", 1080);
        let m = run_matrix(&happy(), &registry(), |_| SutSession::installed(spec.clone()), std::slice::from_ref(&d)).unwrap();
        let mut s = SutSession::installed(spec.clone());
        assert_eq!(m.reports, vec![execute(&happy(), &mut s, &registry(), &d).unwrap()]);
    }

    #[test]
    fn empty_matrix_and_bad_profiles() {
        let spec = spec();
        assert_eq!(
            run_matrix(&happy(), &registry(), |_| SutSession::installed(spec.clone()), &[]),
            Err(RunnerError::EmptyDeviceList)
        );
        let mut bad = profile("bad", 0);
        assert!(bad.check().is_err());
        bad.screen.width = 10;
        bad.perf.cpu_base = 140.0;
        assert!(bad.check().is_err());
    }
}
