//! Sweeps the source angles of a three-source chain over a grid that includes
//! product states, writes the table as CSV, and counts how many grid points
//! violate the bound.
//!
//! ```sh
//! cargo run -p nlocal --example entanglement_sweep
//! ```

use std::f64::consts::PI;

use nlocal::optimizer::write_sweep_csv;
use nlocal::{build_chain, sweep};

pub fn run_example() -> nlocal::Result<()> {
    let config = build_chain(3)?;
    let grid: Vec<f64> = (0..5).map(|k| k as f64 * PI / 8.0).collect();
    let rows = sweep(&config, &grid)?;

    let mut csv = Vec::new();
    write_sweep_csv(&rows[..6], config.n, &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    println!("...");

    let violated = rows.iter().filter(|r| r.violated).count();
    let entangled = rows.iter().filter(|r| r.thetas.iter().all(|t| (2.0 * t).sin().abs() > 1e-12)).count();
    println!("{} grid points, {violated} violate, {entangled} have every source entangled", rows.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> nlocal::Result<()> {
    run_example()
}
