//! Solves an instance, realizes the optimum as a flow over time and checks it.

use quickest::expansion::{extract_transshipment, verify_flow, DEFAULT_NODE_CAP};
use quickest::io::{parse_instance, FlowDocument};
use quickest::prelude::*;

const INSTANCE: &str = r#"{
  "nodes": 4,
  "arcs": [
    { "tail": 0, "head": 1, "capacity": 2, "transit": 1 },
    { "tail": 1, "head": 3, "capacity": 1, "transit": 2 },
    { "tail": 0, "head": 2, "capacity": 1, "transit": 3 },
    { "tail": 2, "head": 3, "capacity": "3/2", "transit": 0 }
  ],
  "sources": [{ "node": 0, "supply": 6 }],
  "sinks": [{ "node": 3, "demand": 6 }]
}"#;

fn main() -> quickest::Result<()> {
    let instance = parse_instance(INSTANCE)?;
    let theta = solve_newton_jumps(&Problem::new(instance.clone()))?.theta_star;
    println!("theta* = {}", format_rat(&theta));

    let flow = extract_transshipment(&instance, &theta, DEFAULT_NODE_CAP)?;
    let violations = verify_flow(&instance, &flow, &theta);
    println!("violations: {}", violations.len());

    let doc = FlowDocument::from_flow(&instance.network, &flow);
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    Ok(())
}
