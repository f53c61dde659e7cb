//! Maximizes `S` over the extremal angles, first with one shared angle and
//! then with every angle free, starting the free search from two different
//! points.
//!
//! ```sh
//! cargo run -p nlocal --example maximize_angles
//! ```

use nlocal::{build_star, optimize_alpha_equal, optimize_alpha_free};

pub fn run_example() -> nlocal::Result<()> {
    let config = build_star(4)?;
    let thetas = [0.6, 0.35, 0.7, 0.5];
    let (alpha, smax) = optimize_alpha_equal(&thetas, config.p);
    println!("equal angles: alpha*={alpha:.9} S_max={smax:.12}");

    for start in [[0.1, 0.2, 0.3, 0.4], [1.5, 0.05, 1.0, 0.7]] {
        let free = optimize_alpha_free(&config, &thetas, &start)?;
        let alphas: Vec<String> = free.alphas.iter().map(|a| format!("{a:.6}")).collect();
        println!(
            "free from {start:?}: alphas=[{}] S={:.12} converged={} sweeps={}",
            alphas.join(", "),
            free.smax,
            free.converged,
            free.sweeps
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nlocal::Result<()> {
    run_example()
}
