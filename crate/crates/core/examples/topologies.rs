//! Builds the chain, star and layered-tree families, prints their shape and
//! attachment lists, round-trips one through JSON, and shows what the
//! validator reports for a broken custom configuration.
//!
//! ```sh
//! cargo run -p nlocal --example topologies
//! ```

use nlocal::topology::Edge;
use nlocal::{build_chain, build_star, build_tree, NetworkConfig, NodeId};

pub fn run_example() -> nlocal::Result<()> {
    let configs = [("chain(4)", build_chain(4)?), ("star(5)", build_star(5)?), ("tree(15,3)", build_tree(15, 3)?)];
    for (name, config) in &configs {
        let att = config.attachments()?;
        println!("{name}: n={} m={} p={} l={}", config.n, config.m, config.p, config.l());
        for i in 1..=config.l() {
            let lambda: Vec<String> = att.lambda(i).iter().map(|s| s.to_string()).collect();
            println!("  A{i} <- {}", lambda.join(" "));
        }
        let leaves: Vec<String> = att.extremal.iter().enumerate().map(|(j, s)| format!("B{}<-{s}", j + 1)).collect();
        println!("  {}", leaves.join(" "));
    }

    let json = configs[0].1.to_json()?;
    let back = NetworkConfig::from_json(&json)?;
    println!("chain(4) JSON round trip equal: {}", back == configs[0].1);

    // Two sources between the same pair of nodes close a cycle.
    let a = NodeId::intermediate(1);
    let broken = NetworkConfig::new(
        3,
        2,
        2,
        vec![
            Edge::new(1, NodeId::extremal(1), a),
            Edge::new(2, a, NodeId::intermediate(2)),
            Edge::new(3, a, NodeId::intermediate(2)),
        ],
    );
    println!("broken custom configuration:");
    for violation in broken.validate() {
        println!("  - {violation}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nlocal::Result<()> {
    run_example()
}
