//! Evaluates `I0`, `I1` and `S` for maximally entangled sources on several
//! networks at the optimal extremal angle, then at a partially entangled and a
//! separable point.
//!
//! ```sh
//! cargo run -p nlocal --example quantum_violation
//! ```

use std::f64::consts::FRAC_PI_4;

use nlocal::{build_chain, build_star, build_tree, closed_form_smax, evaluate_s, QuantumNetwork};

pub fn run_example() -> nlocal::Result<()> {
    for (name, config) in [
        ("chain(2)", build_chain(2)?),
        ("chain(4)", build_chain(4)?),
        ("star(3)", build_star(3)?),
        ("tree(7,3)", build_tree(7, 3)?),
    ] {
        let thetas = vec![FRAC_PI_4; config.n];
        let (_, alpha) = closed_form_smax(&thetas, config.p);
        let net = QuantumNetwork::canonical(&config, &thetas, &vec![alpha; config.p])?;
        let r = evaluate_s(&net)?;
        println!("{name:10} alpha={alpha:.6} I0={:+.6} I1={:+.6} S={:.9} violated={}", r.i0, r.i1, r.s, r.violated);
    }

    let config = build_star(3)?;
    for thetas in [[0.3, 0.5, 0.7], [0.3, 0.0, 0.7]] {
        let (smax, alpha) = closed_form_smax(&thetas, config.p);
        let r = evaluate_s(&QuantumNetwork::canonical(&config, &thetas, &[alpha; 3])?)?;
        println!("star(3) theta={thetas:?}: S={:.9} closed form={smax:.9} violated={}", r.s, r.violated);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> nlocal::Result<()> {
    run_example()
}
