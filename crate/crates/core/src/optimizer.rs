//! Maximizing `S` over the extremal measurement angles.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::correlator::QuantumNetwork;
use crate::error::{NetworkError, Result};
use crate::inequality::{closed_form_smax, evaluate_s, is_violation};
use crate::topology::NetworkConfig;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Common extremal angle maximizing `S` and the maximum, `(α*, S_max)`.
///
/// Setting `∂S/∂α = 0` for `S = |cos α| + |sin α| K` with
/// `K = |Π sin 2θ_r|^{1/p}` gives `tan α* = K`.
pub fn optimize_alpha_equal(thetas: &[f64], p: usize) -> (f64, f64) {
    let (smax, alpha_star) = closed_form_smax(thetas, p);
    (alpha_star, smax)
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    // The endpoints can win when the peak sits on the boundary.
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordinateAscent {
    /// A sweep counts as converged once no coordinate improves `S` by this much
    pub tolerance: f64,
    /// and no angle moves by more than this.
    pub step_tolerance: f64,
    pub max_sweeps: usize,
    /// Bracket width at which each line search stops.
    pub line_tolerance: f64,
}

impl Default for CoordinateAscent {
    fn default() -> Self {
        Self { tolerance: 1e-10, step_tolerance: 1e-8, max_sweeps: 10_000, line_tolerance: 1e-11 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreeOptimum {
    pub alphas: Vec<f64>,
    pub smax: f64,
    pub converged: bool,
    pub sweeps: usize,
}

impl CoordinateAscent {
    /// Maximizes `S` (canonical plan, full correlator evaluation) over
    /// `α_1..α_p`, one golden-section line search per coordinate on
    /// `[0, π/2]`. `S` only depends on `|cos α_j|` and `|sin α_j|`, so this
    /// bracket loses nothing, and on it each coordinate slice is unimodal
    /// even where a product crosses zero and `S` has a kink.
    pub fn run(&self, config: &NetworkConfig, thetas: &[f64], start: &[f64]) -> Result<FreeOptimum> {
        let mut net = QuantumNetwork::canonical(config, thetas, start)?;
        let mut alphas = start.to_vec();
        let mut current = evaluate_s(&net)?.s;
        let mut sweeps = 0;
        let mut converged = false;
        while sweeps < self.max_sweeps {
            sweeps += 1;
            let mut best_gain = 0.0f64;
            let mut largest_step = 0.0f64;
            for j in 0..alphas.len() {
                let mut trial = alphas.clone();
                let mut failure = None;
                let (x, value) = golden_section_max(
                    |a| {
                        trial[j] = a;
                        net.set_extremal_angles(&trial).and_then(|_| evaluate_s(&net)).map(|r| r.s).unwrap_or_else(
                            |e| {
                                failure.get_or_insert(e);
                                f64::NEG_INFINITY
                            },
                        )
                    },
                    0.0,
                    std::f64::consts::FRAC_PI_2,
                    self.line_tolerance,
                );
                if let Some(e) = failure {
                    return Err(e);
                }
                if value > current {
                    best_gain = best_gain.max(value - current);
                    largest_step = largest_step.max((x - alphas[j]).abs());
                    alphas[j] = x;
                    current = value;
                }
            }
            if best_gain < self.tolerance && largest_step < self.step_tolerance {
                converged = true;
                break;
            }
        }
        Ok(FreeOptimum { alphas, smax: current, converged, sweeps })
    }
}

/// Coordinate ascent over independent extremal angles with default settings.
pub fn optimize_alpha_free(config: &NetworkConfig, thetas: &[f64], start: &[f64]) -> Result<FreeOptimum> {
    CoordinateAscent::default().run(config, thetas, start)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub thetas: Vec<f64>,
    pub alpha_star: f64,
    pub smax: f64,
    pub violated: bool,
}

/// Every `θ`-tuple drawn from `grid` (first source varying slowest) with its
/// equal-angle optimum.
pub fn sweep(config: &NetworkConfig, grid: &[f64]) -> Result<Vec<SweepRow>> {
    config.ensure_valid()?;
    if grid.is_empty() {
        return Err(NetworkError::InvalidParameter("sweep grid is empty".into()));
    }
    let n = config.n;
    let rows = (grid.len() as u128).checked_pow(n as u32).filter(|&r| r <= 1 << 24).ok_or_else(|| {
        NetworkError::ResourceLimit {
            what: format!("sweep of {} points over {n} sources", grid.len()),
            size: (grid.len() as f64).powi(n as i32) as u128,
            cap: 1 << 24,
        }
    })? as usize;
    Ok((0..rows)
        .into_par_iter()
        .map(|k| {
            let thetas: Vec<f64> = (0..n).map(|r| grid[k / grid.len().pow((n - 1 - r) as u32) % grid.len()]).collect();
            let (alpha_star, smax) = optimize_alpha_equal(&thetas, config.p);
            SweepRow { thetas, alpha_star, smax, violated: is_violation(smax) }
        })
        .collect())
}

/// Rounds to 9 significant digits.
pub fn sig9(value: f64) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    format!("{value:.8e}").parse().unwrap_or(value)
}

/// CSV with header `theta_1,...,theta_n,alpha_star,smax,violated`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], n: usize, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    let mut header: Vec<String> = (1..=n).map(|r| format!("theta_{r}")).collect();
    header.extend(["alpha_star", "smax", "violated"].map(String::from));
    writer.write_record(&header)?;
    for row in rows {
        let mut record: Vec<String> = row.thetas.iter().map(|&t| sig9(t).to_string()).collect();
        record.push(sig9(row.alpha_star).to_string());
        record.push(sig9(row.smax).to_string());
        record.push(row.violated.to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequality::closed_form_s;
    use crate::topology::{build_chain, build_star};
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, SQRT_2};

    #[test]
    fn equal_alpha_examples() {
        let (a, s) = optimize_alpha_equal(&[FRAC_PI_4; 3], 3);
        assert!((a - FRAC_PI_4).abs() < 1e-15 && (s - SQRT_2).abs() < 1e-15);
        assert_eq!(optimize_alpha_equal(&[0.3, 0.0], 2), (0.0, 1.0));
        let (a, s) = optimize_alpha_equal(&[FRAC_PI_6; 2], 2);
        assert!((a - (3f64.sqrt() / 2.0).atan()).abs() < 1e-12);
        assert!((s - 7f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn golden_section_on_kinked_function() {
        let (x, v) = golden_section_max(|x| -(x - 0.3).abs(), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-10 && v > -1e-10);
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-12);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn free_matches_equal_for_equal_thetas() {
        let star = build_star(3).unwrap();
        let thetas = [FRAC_PI_6; 3];
        let (alpha_star, smax) = optimize_alpha_equal(&thetas, 3);
        let free = optimize_alpha_free(&star, &thetas, &[0.2, 1.0, 1.4]).unwrap();
        assert!(free.converged);
        assert!(free.smax >= smax - 1e-8);
        for a in &free.alphas {
            assert!((a - alpha_star).abs() < 1e-6, "{:?} vs {alpha_star}", free.alphas);
        }
    }

    #[test]
    fn free_mixed_thetas_on_bilocal_chain() {
        let chain = build_chain(2).unwrap();
        let thetas = [FRAC_PI_4, FRAC_PI_8];
        let expected = (1.0 + (FRAC_PI_4 * 2.0).sin() * (FRAC_PI_8 * 2.0).sin()).sqrt();
        let free = optimize_alpha_free(&chain, &thetas, &[0.1, 0.1]).unwrap();
        assert!((free.smax - expected).abs() < 1e-9);

        // Brute-force grid over (α1, α2).
        let steps = 400;
        let mut grid_best = 0.0f64;
        for i in 0..=steps {
            for j in 0..=steps {
                let a = [i as f64, j as f64].map(|k| std::f64::consts::FRAC_PI_2 * k / steps as f64);
                grid_best = grid_best.max(closed_form_s(&thetas, &a, 2));
            }
        }
        assert!(free.smax >= grid_best - 1e-12);
        assert!(grid_best > expected - 1e-5);
    }

    #[test]
    fn step_cap_reports_non_convergence() {
        let chain = build_chain(3).unwrap();
        let ascent = CoordinateAscent { max_sweeps: 1, ..Default::default() };
        let res = ascent.run(&chain, &[FRAC_PI_4, 0.6, 1.0], &[1.5, 0.01]).unwrap();
        assert!(!res.converged);
        assert_eq!(res.sweeps, 1);
    }

    #[test]
    fn sweep_rows() {
        let chain = build_chain(2).unwrap();
        let rows = sweep(&chain, &[0.0, FRAC_PI_8, FRAC_PI_4]).unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[0].thetas, vec![0.0, 0.0]);
        assert_eq!(rows[0].smax, 1.0);
        assert!(!rows[0].violated);
        assert_eq!(rows[8].thetas, vec![FRAC_PI_4, FRAC_PI_4]);
        assert!((rows[8].smax - SQRT_2).abs() < 1e-15 && rows[8].violated);
        assert_eq!(rows[5].thetas, vec![FRAC_PI_8, FRAC_PI_4]);
        for row in &rows {
            assert_eq!(row.smax, closed_form_smax(&row.thetas, 2).0);
        }
        assert!(sweep(&chain, &[]).is_err());
    }

    #[test]
    fn sweep_csv_layout() {
        let chain = build_chain(2).unwrap();
        let rows = sweep(&chain, &[0.0, FRAC_PI_4]).unwrap();
        let mut out = Vec::new();
        write_sweep_csv(&rows, 2, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "theta_1,theta_2,alpha_star,smax,violated");
        assert_eq!(lines[1], "0,0,0,1,false");
        assert_eq!(lines[4], "0.785398163,0.785398163,0.785398163,1.41421356,true");
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(1.234567891234), 1.23456789);
        assert_eq!(sig9(-0.000123456789123), -0.000123456789);
        assert_eq!(sig9(0.0), 0.0);
    }
}
