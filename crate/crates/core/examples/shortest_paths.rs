// Shortest setup and teardown paths between model nodes.

use modelwalk::demo;
use modelwalk::generate::{shortest_path, GenerateError};
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = demo::model();
    let id = |name: &str| model.node_by_name(name).map(|n| n.id.clone()).ok_or("no such node");

    let path = shortest_path(&model, &id("v_AppInstalled")?, &id("v_AlarmDetails")?)?;
    let names: Vec<&str> = path.steps.iter().map(|s| s.element_name.as_str()).collect();
    println!("{} edges: {}", path.len_edges(), names.join(" -> "));
    assert_eq!(path.len_edges(), 4);

    let back = shortest_path(&model, &id("v_About")?, &id("v_Home")?)?;
    println!("teardown About -> Home: {} edges", back.len_edges());

    // nothing leads back to the installed-but-never-started state
    match shortest_path(&model, &id("v_Home")?, &id("v_AppInstalled")?) {
        Err(GenerateError::NoPath { from, to }) => println!("no path from {from} to {to}"),
        other => return Err(format!("expected NoPath, got {other:?}").into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
