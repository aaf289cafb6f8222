// State-transition coverage of every feature's test, plus the same
// arithmetic on a larger, hand-tallied app.

use modelwalk::coverage::{breakdown_from_counts, compute_coverage, ingest_logs, percent};
use modelwalk::demo;
use modelwalk::emit::to_runner_script;
use modelwalk::generate::compose_test;
use modelwalk::runner::run_matrix;
use modelwalk::sutsim::{log_to_text, ReasonCategory};
use std::collections::BTreeMap;
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = demo::model();
    let spec = demo::sut_spec();
    let registry = demo::registry();
    let mut logs = Vec::new();
    for f in &model.features {
        let script = to_runner_script(&compose_test(&model, &f.id, 0)?)?;
        let matrix = run_matrix(&script, &registry, |d| demo::session_for(&spec, d), &demo::devices())?;
        logs.extend(matrix.reports.iter().map(|r| log_to_text(&r.transition_log)));
    }
    let observed = ingest_logs(&spec, &logs)?.observed;
    let report = compute_coverage(&spec, &observed);
    print!("{}", report.to_table());
    assert_eq!(report.user_model_pct, 90);

    println!("\n92 of 194 -> {}%, 92 of 95 -> {}%", percent(92, 194), percent(92, 95));
    let counts = BTreeMap::from([
        (ReasonCategory::AccessToken, 46),
        (ReasonCategory::ExternalService, 44),
        (ReasonCategory::ExternalDeviceEvent, 15),
        (ReasonCategory::DiscoveredImplementationError, 5),
        (ReasonCategory::Timing, 5),
        (ReasonCategory::UserModelCoverageMiss, 3),
    ]);
    let reasons = breakdown_from_counts(&counts);
    print!("{}", reasons.to_table());
    assert_eq!(reasons.total, 118);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
