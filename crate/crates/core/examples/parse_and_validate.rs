// Parse a GraphML model, list its features and run the validator on a
// healthy and a broken model.

use modelwalk::demo;
use modelwalk::model::{parse_graphml, validate};
use std::error::Error;

const BROKEN: &str = r#"<graphml>
  <key id="l" for="all" attr.name="label"/>
  <key id="f" for="edge" attr.name="feature"/>
  <graph edgedefault="directed">
    <data key="start">a</data>
    <data key="entry">browse=b</data>
    <node id="a"><data key="l">v_Start</data></node>
    <node id="b"><data key="l">v_List</data></node>
    <node id="c"><data key="l">v_Orphan</data></node>
    <edge id="e1" source="a" target="b"><data key="l">e_Open</data><data key="f">browse</data></edge>
    <edge id="e2" source="b" target="a"><data key="l">e_Back</data><data key="f">browse</data></edge>
  </graph>
</graphml>"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let model = parse_graphml(demo::GRAPHML)?;
    println!(
        "demo model: {} nodes, {} edges, start {}, home {}",
        model.nodes.len(),
        model.edges.len(),
        model.node_name(&model.start_node),
        model.node_name(&model.home_node)
    );
    for f in &model.features {
        println!(
            "  feature {:<10} {:<24} {} edges, entry {}, final {}",
            f.id.as_str(),
            f.name,
            f.member_edges.len(),
            model.node_name(&f.entry_node),
            model.node_name(&f.final_node)
        );
    }
    let report = validate(&model);
    assert!(report.is_valid());
    println!("demo model: valid");

    let broken = parse_graphml(BROKEN)?;
    let report = validate(&broken);
    print!("{}", report.to_text());
    assert!(!report.is_valid());
    assert!(report.errors().any(|f| f.element == "c"));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
