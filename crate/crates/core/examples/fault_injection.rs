// The backend drops right before the query is submitted. The action is
// silently ignored and the next assertion catches it.

use modelwalk::demo;
use modelwalk::emit::to_runner_script;
use modelwalk::generate::compose_test;
use modelwalk::runner::{execute, Verdict};
use modelwalk::sutsim::Event;
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = demo::model();
    let spec = demo::sut_spec();
    let device = &demo::devices()[0];
    let script = to_runner_script(&compose_test(&model, &"search".into(), 9)?)?;
    assert_eq!(script.lines[7].method_name, "e_submitquery");

    let mut session = demo::session_for(&spec, device);
    session.schedule_event(7, Event::ServiceDown);
    let report = execute(&script, &mut session, &demo::registry(), device)?;

    for s in &report.steps {
        println!(
            "{:>2} {:<18} cpu {:>5.1}% mem {:>6.1}MB {:>4}ms {}",
            s.index,
            s.method_name,
            s.cpu_pct,
            s.mem_mb,
            s.duration_ms,
            s.note.as_deref().unwrap_or("")
        );
    }
    let failed = report.failed_step.as_ref().ok_or("expected a failure")?;
    println!("verdict {:?} at step {} `{}`: {}", report.verdict, failed.index, failed.method_name, failed.message);
    assert_eq!(report.verdict, Verdict::Fail);
    assert_eq!(failed.index, 8);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
