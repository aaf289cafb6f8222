//! Command-line front end. Each subcommand is one pipeline stage reading and
//! writing files, so any stage can be swapped for an external tool.
//!
//! ```text
//! modelwalk validate demo.graphml
//! modelwalk generate --model demo.graphml --feature search --seed 42
//! modelwalk transform modelwalk-out/search.steps.jsonl
//! modelwalk run --script modelwalk-out/search.script.json --sut demo-sut.json --devices devices.json
//! modelwalk report --sut demo-sut.json
//! modelwalk pipeline --model demo.graphml --all-features --seed 42 --sut demo-sut.json --devices devices.json
//! ```
//!
//! Exit status is 0 on success, 1 on validation errors, missing features,
//! unbound handlers or failed devices, and 2 on usage errors. Errors are
//! written to stderr as one JSON object `{"error": kind, "message": text}`.

use crate::coverage::{compute_coverage, ingest_logs, CoverageError};
use crate::demo;
use crate::emit::{parse_offline_json, script_from_offline, to_offline_json, StepScript};
use crate::generate::{compose_test_with, StopCondition};
use crate::model::{parse_graphml, validate, FeatureId, Model};
use crate::rng::SplitMix64;
use crate::runner::{file_stem, write_matrix};
use crate::runner::{run_matrix, DeviceProfile, DeviceSet, HandlerRegistry, RunnerError};
use crate::sutsim::{Event, SutSpec};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "MODELWALK_OUT";
pub const DEFAULT_OUT: &str = "modelwalk-out";
/// Written by `generate`; later stages read the seed back from it.
pub const MANIFEST: &str = "generate.json";

#[derive(Debug, Parser)]
#[command(name = "modelwalk", version, about = "Model-based test generation and execution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a GraphML model for structural errors.
    Validate(ValidateArgs),
    /// Generate offline test steps (`<feature>.steps.jsonl`).
    Generate(GenerateArgs),
    /// Turn offline steps into runner scripts (`<test>.script.txt`/`.json`).
    Transform(TransformArgs),
    /// Execute scripts against the simulated app on every device.
    Run(RunArgs),
    /// Compute state-transition coverage from transition logs.
    Report(ReportArgs),
    /// generate, transform, run and report in one go.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// GraphML model; the bundled demo model when omitted.
    model: Option<PathBuf>,
    /// Print findings as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// GraphML model; the bundled demo model when omitted.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Feature id to generate a test for. Repeatable.
    #[arg(long = "feature", required_unless_present = "all_features")]
    features: Vec<String>,
    #[arg(long, conflicts_with = "features")]
    all_features: bool,
    /// Walk seed; generated and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Stop the walk at this fraction of feature edges (default 1.0).
    #[arg(long)]
    coverage: Option<f64>,
    /// Stop the walk after this many edges.
    #[arg(long)]
    max_steps: Option<usize>,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output directory; defaults to $MODELWALK_OUT, then ./modelwalk-out.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SutArgs {
    /// SUT definition JSON with handler bindings; the bundled demo when omitted.
    #[arg(long)]
    sut: Option<PathBuf>,
    /// Device set JSON; the bundled lab devices when omitted.
    #[arg(long)]
    devices: Option<PathBuf>,
    /// Inject an event right before a step, e.g. `7:service_down`. Repeatable.
    #[arg(long = "inject", value_parser = parse_injection)]
    injections: Vec<(usize, Event)>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct TransformArgs {
    /// `.steps.jsonl` files.
    #[arg(required = true)]
    steps: Vec<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// `.script.json` file (a `.script.txt` path picks its JSON sidecar). Repeatable.
    #[arg(long = "script", required = true)]
    scripts: Vec<PathBuf>,
    #[command(flatten)]
    sut: SutArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Transition logs; every `reports/*/*.log` under the output directory when omitted.
    logs: Vec<PathBuf>,
    /// SUT definition JSON; the bundled demo when omitted.
    #[arg(long)]
    sut: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    sut: SutArgs,
    #[command(flatten)]
    out: OutArgs,
}

fn parse_injection(s: &str) -> Result<(usize, Event), String> {
    let (step, event) = s
        .split_once(':')
        .ok_or_else(|| format!("expected STEP:EVENT, got `{s}`"))?;
    let step = step
        .parse()
        .map_err(|_| format!("`{step}` is not a step index"))?;
    let event = event.parse().map_err(|e| format!("{e}"))?;
    Ok((step, event))
}

/// A failed command: error kind for stderr JSON plus the exit status.
#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub code: i32,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
            code: 1,
        }
    }

    fn io(path: &Path, e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::NotFound {
            CliError::new("NotFound", format!("{}: {e}", path.display()))
        } else {
            CliError::new("Io", format!("{}: {e}", path.display()))
        }
    }

    fn to_json(&self) -> String {
        serde_json::json!({"error": self.kind, "message": self.message}).to_string()
    }
}

type CliResult<T> = Result<T, CliError>;

/// Runs the CLI with real stdout/stderr and returns the exit status.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_io(argv, &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// [`run_command`] writing to the given streams.
pub fn run_with_io<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let error = CliError {
                kind: "Usage",
                message: e.render().to_string().trim_end().to_string(),
                code: 2,
            };
            let _ = writeln!(err, "{}", error.to_json());
            return 2;
        }
    };
    let mut ctx = Ctx { out, err };
    match dispatch(cli.command, &mut ctx) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(ctx.err, "{}", e.to_json());
            e.code
        }
    }
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn say(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", line.as_ref());
    }

    fn warn(&mut self, line: impl AsRef<str>) {
        let _ = writeln!(self.err, "warning: {}", line.as_ref());
    }
}

fn dispatch(command: Command, ctx: &mut Ctx) -> CliResult<()> {
    match command {
        Command::Validate(a) => validate_cmd(&a, ctx),
        Command::Generate(a) => {
            let out = out_dir(&a.out)?;
            generate_stage(&a.model, &out, ctx).map(|_| ())
        }
        Command::Transform(a) => {
            let out = out_dir(&a.out)?;
            transform_stage(&a.steps, &out, ctx).map(|_| ())
        }
        Command::Run(a) => {
            let out = out_dir(&a.out)?;
            let (_, failed) = run_stage(&a.scripts, &a.sut, &out, ctx)?;
            device_failures(failed)
        }
        Command::Report(a) => {
            let out = out_dir(&a.out)?;
            let logs = if a.logs.is_empty() {
                find_logs(&out)?
            } else {
                a.logs.clone()
            };
            report_stage(&logs, a.sut.as_deref(), &out, ctx)
        }
        Command::Pipeline(a) => {
            let out = out_dir(&a.out)?;
            let steps = generate_stage(&a.model, &out, ctx)?;
            let scripts = transform_stage(&steps, &out, ctx)?;
            let (logs, failed) = run_stage(&scripts, &a.sut, &out, ctx)?;
            report_stage(&logs, a.sut.sut.as_deref(), &out, ctx)?;
            device_failures(failed)
        }
    }
}

fn device_failures(failed: usize) -> CliResult<()> {
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::new(
            "DeviceFailure",
            format!("{failed} device run(s) failed"),
        ))
    }
}

fn out_dir(args: &OutArgs) -> CliResult<PathBuf> {
    let dir = args
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads a user file, or the bundled default. Prints its digest.
fn load_input(
    path: Option<&Path>,
    what: &str,
    bundled: &'static str,
    ctx: &mut Ctx,
) -> CliResult<(String, String)> {
    let (label, text) = match path {
        Some(p) => (
            p.display().to_string(),
            fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        ),
        None => (format!("<bundled {what}>"), bundled.to_string()),
    };
    ctx.say(format!("input {what} {label} sha256:{}", sha256_hex(text.as_bytes())));
    Ok((label, text))
}

fn read_file(path: &Path, ctx: &mut Ctx) -> CliResult<String> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    ctx.say(format!(
        "input {} sha256:{}",
        path.display(),
        sha256_hex(text.as_bytes())
    ));
    Ok(text)
}

fn write_file(path: &Path, contents: &str, ctx: &mut Ctx) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
    ctx.say(format!("wrote {}", path.display()));
    Ok(())
}

fn load_model(path: Option<&Path>, ctx: &mut Ctx) -> CliResult<(String, Model)> {
    let (label, text) = load_input(path, "model", demo::GRAPHML, ctx)?;
    let model = parse_graphml(&text).map_err(|e| CliError::new("Parse", format!("{label}: {e}")))?;
    Ok((label, model))
}

fn load_sut(path: Option<&Path>, ctx: &mut Ctx) -> CliResult<Arc<SutSpec>> {
    let (label, text) = load_input(path, "sut", demo::SUT_JSON, ctx)?;
    SutSpec::from_json(&text)
        .map(Arc::new)
        .map_err(|e| CliError::new("Spec", format!("{label}: {e}")))
}

fn load_devices(path: Option<&Path>, ctx: &mut Ctx) -> CliResult<Vec<DeviceProfile>> {
    let (label, text) = load_input(path, "devices", demo::DEVICES_JSON, ctx)?;
    let set = DeviceSet::from_json(&text).map_err(|e| CliError::new("Spec", format!("{label}: {e}")))?;
    if set.devices.is_empty() {
        return Err(CliError::new("Spec", format!("{label}: no devices")));
    }
    Ok(set.devices)
}

fn validate_cmd(args: &ValidateArgs, ctx: &mut Ctx) -> CliResult<()> {
    ctx.say("== validate ==");
    let (label, model) = load_model(args.model.as_deref(), ctx)?;
    let report = validate(&model);
    if args.json {
        let _ = write!(ctx.out, "{}", report.to_json());
    } else {
        let _ = write!(ctx.out, "{}", report.to_text());
    }
    let errors = report.errors().count();
    ctx.say(format!(
        "{label}: {errors} error(s), {} warning(s)",
        report.warnings().count()
    ));
    if errors > 0 {
        return Err(CliError::new(
            "Validation",
            format!("{label}: {errors} validation error(s)"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    seed: u64,
    model: String,
    model_sha256: String,
    features: Vec<String>,
    stop: String,
}

fn fresh_seed() -> u64 {
    let nanos = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0);
    SplitMix64::new(nanos ^ u64::from(std::process::id())).next_u64()
}

fn stop_condition(args: &ModelArgs) -> CliResult<StopCondition> {
    let bad = |e: crate::generate::GenerateError| CliError {
        kind: "Usage",
        message: e.to_string(),
        code: 2,
    };
    let coverage = args
        .coverage
        .map(StopCondition::edge_coverage)
        .transpose()
        .map_err(bad)?;
    let max = args
        .max_steps
        .map(StopCondition::max_steps)
        .transpose()
        .map_err(bad)?;
    Ok(match (coverage, max) {
        (Some(c), Some(m)) => StopCondition::FirstOf(vec![c, m]),
        (Some(c), None) => c,
        (None, Some(m)) => StopCondition::FirstOf(vec![StopCondition::full_coverage(), m]),
        (None, None) => StopCondition::full_coverage(),
    })
}

fn generate_stage(args: &ModelArgs, out: &Path, ctx: &mut Ctx) -> CliResult<Vec<PathBuf>> {
    ctx.say("== generate ==");
    let seed = match args.seed {
        Some(s) => {
            ctx.say(format!("seed: {s}"));
            s
        }
        None => {
            let s = fresh_seed();
            ctx.say(format!("seed: {s} (generated)"));
            s
        }
    };
    let stop = stop_condition(args)?;
    let (label, model) = load_model(args.model.as_deref(), ctx)?;
    let report = validate(&model);
    for w in report.warnings() {
        ctx.warn(format!("{} {}", w.element, w.message));
    }
    if !report.is_valid() {
        let _ = write!(ctx.err, "{}", report.to_text());
        return Err(CliError::new(
            "Validation",
            format!("{label}: {} validation error(s)", report.errors().count()),
        ));
    }

    let features: Vec<FeatureId> = if args.all_features {
        model.features.iter().map(|f| f.id.clone()).collect()
    } else {
        args.features.iter().map(|f| FeatureId::new(f.as_str())).collect()
    };
    for f in &features {
        if model.feature(f).is_none() {
            return Err(CliError::new(
                "NotFound",
                format!("feature `{f}` not found in {label}"),
            ));
        }
    }

    let mut written = Vec::with_capacity(features.len());
    for f in &features {
        let test = compose_test_with(&model, f, seed, &stop)
            .map_err(|e| CliError::new("Generate", format!("feature `{f}`: {e}")))?;
        if test.walk.truncated {
            ctx.warn(format!("feature `{f}`: walk stopped before full edge coverage"));
        }
        let path = out.join(format!("{}.steps.jsonl", file_stem(f.as_str())));
        write_file(&path, &to_offline_json(&test), ctx)?;
        written.push(path);
    }

    let text = match &args.model {
        Some(p) => fs::read(p).map_err(|e| CliError::io(p, e))?,
        None => demo::GRAPHML.as_bytes().to_vec(),
    };
    let manifest = Manifest {
        seed,
        model: label,
        model_sha256: sha256_hex(&text),
        features: features.iter().map(|f| f.to_string()).collect(),
        stop: format!("{stop:?}"),
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    write_file(&out.join(MANIFEST), &json, ctx)?;
    Ok(written)
}

/// Seed recorded by `generate` next to `input`, if any.
fn print_recorded_seed(input: Option<&Path>, ctx: &mut Ctx) {
    let seed = input
        .and_then(|p| p.parent())
        .map(|dir| dir.join(MANIFEST))
        .and_then(|p| fs::read_to_string(p).ok())
        .and_then(|t| serde_json::from_str::<Manifest>(&t).ok())
        .map(|m| m.seed);
    match seed {
        Some(s) => ctx.say(format!("seed: {s} (from {MANIFEST})")),
        None => ctx.say("seed: unrecorded"),
    }
}

fn test_id_of(path: &Path, suffix: &str) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    match name.strip_suffix(suffix) {
        Some(stem) if !stem.is_empty() => stem.to_string(),
        _ => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or(name),
    }
}

fn transform_stage(steps: &[PathBuf], out: &Path, ctx: &mut Ctx) -> CliResult<Vec<PathBuf>> {
    ctx.say("== transform ==");
    print_recorded_seed(steps.first().map(PathBuf::as_path), ctx);
    let mut written = Vec::with_capacity(steps.len());
    for path in steps {
        let text = read_file(path, ctx)?;
        let parsed = parse_offline_json(&text)
            .map_err(|e| CliError::new("Parse", format!("{}: {e}", path.display())))?;
        let test_id = test_id_of(path, ".steps.jsonl");
        let script = script_from_offline(&test_id, &parsed)
            .map_err(|e| CliError::new("Emit", format!("{}: {e}", path.display())))?;
        let stem = file_stem(&test_id);
        write_file(&out.join(format!("{stem}.script.txt")), &script.to_text(), ctx)?;
        let json_path = out.join(format!("{stem}.script.json"));
        write_file(&json_path, &script.to_json(), ctx)?;
        written.push(json_path);
    }
    Ok(written)
}

fn script_json_path(path: &Path) -> PathBuf {
    let name = path.to_string_lossy();
    match name.strip_suffix(".script.txt") {
        Some(stem) => PathBuf::from(format!("{stem}.script.json")),
        None => path.to_path_buf(),
    }
}

fn runner_error(e: RunnerError) -> CliError {
    match e {
        RunnerError::UnboundStep { .. } | RunnerError::KindMismatch { .. } => {
            CliError::new("UnboundHandler", e.to_string())
        }
        _ => CliError::new("Runner", e.to_string()),
    }
}

/// Returns the written transition logs and the number of failed device runs.
fn run_stage(
    scripts: &[PathBuf],
    args: &SutArgs,
    out: &Path,
    ctx: &mut Ctx,
) -> CliResult<(Vec<PathBuf>, usize)> {
    ctx.say("== run ==");
    print_recorded_seed(scripts.first().map(PathBuf::as_path), ctx);
    let spec = load_sut(args.sut.as_deref(), ctx)?;
    let devices = load_devices(args.devices.as_deref(), ctx)?;
    if spec.handlers.is_empty() {
        return Err(CliError::new(
            "UnboundHandler",
            "the SUT definition declares no handlers",
        ));
    }
    let registry = HandlerRegistry::from_bindings(&spec.handlers).map_err(runner_error)?;
    for (step, event) in &args.injections {
        ctx.say(format!("inject: {event} before step {step}"));
    }

    let mut loaded = Vec::with_capacity(scripts.len());
    for path in scripts {
        let path = script_json_path(path);
        let text = read_file(&path, ctx)?;
        let script = StepScript::from_json(&text)
            .map_err(|e| CliError::new("Parse", format!("{}: {e}", path.display())))?;
        registry.check_script(&script).map_err(|e| {
            CliError::new(
                "UnboundHandler",
                format!("{}: {}", path.display(), runner_error(e).message),
            )
        })?;
        loaded.push(script);
    }

    let mut logs = Vec::new();
    let mut failed = 0;
    for script in &loaded {
        let factory = |device: &DeviceProfile| {
            let mut session = demo::session_for(&spec, device);
            for (step, event) in &args.injections {
                session.schedule_event(*step, *event);
            }
            session
        };
        let matrix = run_matrix(script, &registry, factory, &devices).map_err(runner_error)?;
        let dir = out.join("reports").join(file_stem(&script.test_id));
        let index = write_matrix(&dir, &matrix).map_err(|e| CliError::io(&dir, e))?;
        for entry in &index.devices {
            let verdict = match &entry.failed_step {
                None => "pass".to_string(),
                Some(f) => format!("fail at step {} `{}`: {}", f.index, f.method_name, f.message),
            };
            ctx.say(format!("{} on {}: {verdict}", script.test_id, entry.device));
            logs.push(dir.join(&entry.log));
        }
        ctx.say(format!("wrote {}", dir.join("index.json").display()));
        failed += matrix.failed;
    }
    Ok((logs, failed))
}

fn find_logs(out: &Path) -> CliResult<Vec<PathBuf>> {
    let reports = out.join("reports");
    let mut logs = Vec::new();
    let dirs = fs::read_dir(&reports).map_err(|e| CliError::io(&reports, e))?;
    for dir in dirs {
        let dir = dir.map_err(|e| CliError::io(&reports, e))?.path();
        if !dir.is_dir() {
            continue;
        }
        for f in fs::read_dir(&dir).map_err(|e| CliError::io(&dir, e))? {
            let f = f.map_err(|e| CliError::io(&dir, e))?.path();
            if f.extension().is_some_and(|x| x == "log") {
                logs.push(f);
            }
        }
    }
    logs.sort();
    if logs.is_empty() {
        return Err(CliError::new(
            "NotFound",
            format!("no transition logs under {}", reports.display()),
        ));
    }
    Ok(logs)
}

fn report_stage(logs: &[PathBuf], sut: Option<&Path>, out: &Path, ctx: &mut Ctx) -> CliResult<()> {
    ctx.say("== report ==");
    print_recorded_seed(Some(&out.join(MANIFEST)), ctx);
    let spec = load_sut(sut, ctx)?;
    let mut texts = Vec::with_capacity(logs.len());
    for path in logs {
        texts.push(read_file(path, ctx)?);
    }
    let ingested = ingest_logs(&spec, &texts).map_err(|e| match e {
        CoverageError::MalformedLine { log, line, message } => CliError::new(
            "Parse",
            format!("{}:{line}: {message}", logs[log].display()),
        ),
    })?;
    for u in &ingested.unknown {
        ctx.warn(format!(
            "{}:{}: transition `{}` is not in the spec",
            logs[u.log].display(),
            u.line,
            u.id
        ));
    }
    let report = compute_coverage(&spec, &ingested.observed);
    let table = report.to_table();
    write_file(&out.join("coverage.json"), &report.to_json(), ctx)?;
    write_file(&out.join("coverage.txt"), &table, ctx)?;
    let _ = write!(ctx.out, "{table}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("modelwalk").chain(args.iter().copied());
        let code = run_with_io(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn injection_syntax() {
        assert_eq!(parse_injection("7:service_down"), Ok((7, Event::ServiceDown)));
        assert!(parse_injection("7").is_err());
        assert!(parse_injection("x:service_down").is_err());
        assert!(parse_injection("3:earthquake").is_err());
    }

    #[test]
    fn usage_errors_exit_2_with_json() {
        let (code, _, err) = run(&["frobnicate"]);
        assert_eq!(code, 2);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "Usage");
        let (code, _, _) = run(&["generate"]);
        assert_eq!(code, 2);
        let (code, _, _) = run(&["run", "--script", "a.json", "--inject", "oops"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("pipeline"));
    }

    #[test]
    fn validate_bundled_model() {
        let (code, out, _) = run(&["validate"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("0 error(s)"));
    }

    #[test]
    fn stop_overrides() {
        let args = |coverage, max_steps| ModelArgs {
            model: None,
            features: vec![],
            all_features: true,
            seed: None,
            coverage,
            max_steps,
        };
        assert_eq!(stop_condition(&args(None, None)).unwrap(), StopCondition::full_coverage());
        assert_eq!(
            stop_condition(&args(Some(0.5), None)).unwrap(),
            StopCondition::EdgeCoverage(0.5)
        );
        assert!(matches!(
            stop_condition(&args(None, Some(3))).unwrap(),
            StopCondition::FirstOf(v) if v.len() == 2
        ));
        assert_eq!(stop_condition(&args(Some(1.5), None)).unwrap_err().code, 2);
    }

    #[test]
    fn test_ids_from_file_names() {
        assert_eq!(test_id_of(Path::new("out/search.steps.jsonl"), ".steps.jsonl"), "search");
        assert_eq!(test_id_of(Path::new("custom.jsonl"), ".steps.jsonl"), "custom");
        assert_eq!(
            script_json_path(Path::new("o/search.script.txt")),
            PathBuf::from("o/search.script.json")
        );
    }
}
