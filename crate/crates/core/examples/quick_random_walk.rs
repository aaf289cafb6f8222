// Quick Random walks over one feature with different seeds and stop
// conditions.

use modelwalk::demo;
use modelwalk::generate::{quick_random_walk, walk_edge_coverage, StopCondition};
use modelwalk::model::FeatureId;
use std::error::Error;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = demo::model();
    let search = model.feature_subgraph(&FeatureId::new("search"))?;
    let alarms = model.feature_subgraph(&FeatureId::new("alarms"))?;

    for seed in [0, 1, 7] {
        let walk = quick_random_walk(&alarms, &alarms.entry_node, seed, &StopCondition::full_coverage())?;
        let names: Vec<&str> = walk
            .steps
            .iter()
            .filter(|s| !s.element.is_node())
            .map(|s| s.element_name.as_str())
            .collect();
        println!("seed {seed}: {}", names.join(", "));
        assert_eq!(walk_edge_coverage(&walk, &alarms)?, 1.0);
    }

    let half = quick_random_walk(&search, &search.entry_node, 1, &StopCondition::edge_coverage(0.5)?)?;
    println!("50% stop: {} edges", half.len_edges());
    assert!(walk_edge_coverage(&half, &search)? >= 0.5);

    let capped = StopCondition::FirstOf(vec![StopCondition::full_coverage(), StopCondition::max_steps(2)?]);
    let short = quick_random_walk(&search, &search.entry_node, 1, &capped)?;
    println!("max 2 steps: {} edges, truncated={}", short.len_edges(), short.truncated);
    assert!(short.truncated);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
