// The whole chain through the command-line entry point, into a temporary
// directory: generate, transform, run and report for every feature.

use modelwalk::cli::run_command;
use std::error::Error;
use std::fs;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let out = tempfile::tempdir()?;
    let out_arg = out.path().to_string_lossy().into_owned();
    let code = run_command(["modelwalk", "pipeline", "--all-features", "--seed", "42", "--out", &out_arg]);
    if code != 0 {
        return Err(format!("pipeline exited with {code}").into());
    }
    let mut files: Vec<String> = fs::read_dir(out.path())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    println!("artifacts: {}", files.join(", "));
    let coverage: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.path().join("coverage.json"))?)?;
    println!("overall {}%, user model {}%", coverage["overall_pct"], coverage["user_model_pct"]);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
