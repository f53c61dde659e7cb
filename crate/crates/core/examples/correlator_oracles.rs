//! Computes one correlator three ways (product of per-source expectations,
//! dense state vector, Born-rule joint distribution) for general qubit
//! measurements, and prints the spread between them.
//!
//! ```sh
//! cargo run -p nlocal --example correlator_oracles
//! ```

use nlocal::{build_tree, BlochObservable, MeasurementPlan, QuantumNetwork, SettingAssignment};

pub fn run_example() -> nlocal::Result<()> {
    let config = build_tree(5, 3)?;
    let thetas = [0.2, 0.9, 0.45, 1.3, 0.7];
    let tilt = |k: f64| BlochObservable::from_direction(k.cos(), 0.3 * k, k.sin());
    let mut intermediate = Vec::new();
    for i in 0..config.l() {
        let a0 = (0..config.m).map(|s| tilt(0.4 + i as f64 + s as f64)).collect::<nlocal::Result<Vec<_>>>()?;
        let a1 = (0..config.m).map(|s| tilt(1.1 - i as f64 * 0.5 + s as f64)).collect::<nlocal::Result<Vec<_>>>()?;
        intermediate.push([a0, a1]);
    }
    let plan = MeasurementPlan::new(intermediate, vec![0.3, 0.8, 1.4, -0.6]);
    let net = QuantumNetwork::new(&config, &thetas, plan)?;

    for mask in 0..(1usize << config.p) {
        let setting = SettingAssignment::with_y_mask(&[true, false], config.p, mask);
        let f = net.correlator_factorized(&setting)?;
        let v = net.correlator_statevector(&setting)?;
        let dist = net.joint_distribution(&setting)?;
        let d = dist.correlator();
        let spread = (f - v).abs().max((f - d).abs()).max((v - d).abs());
        println!(
            "y={mask:04b} factorized={f:+.12} statevector={v:+.12} distribution={d:+.12} spread={spread:.1e} total prob={:.12}",
            dist.total()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nlocal::Result<()> {
    run_example()
}
