// One script against three device profiles in parallel. The 320px phone
// hides the result count, so only its run fails.

use modelwalk::demo;
use modelwalk::emit::to_runner_script;
use modelwalk::generate::compose_test;
use modelwalk::runner::{run_matrix, Verdict};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = demo::model();
    let spec = demo::sut_spec();
    let registry = demo::registry();
    let script = to_runner_script(&compose_test(&model, &"search".into(), 5)?)?;

    let matrix = run_matrix(&script, &registry, |d| demo::session_for(&spec, d), &demo::mixed_devices())?;
    for r in &matrix.reports {
        let peak = r.steps.iter().map(|s| s.cpu_pct).fold(0.0, f64::max);
        match &r.failed_step {
            None => println!("{:<14} pass  {} steps, peak cpu {peak}%", r.device, r.steps.len()),
            Some(f) => println!("{:<14} FAIL  step {} {}: {}", r.device, f.index, f.method_name, f.message),
        }
    }
    assert_eq!((matrix.passed, matrix.failed), (2, 1));
    assert_eq!(matrix.reports[2].verdict, Verdict::Fail);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
