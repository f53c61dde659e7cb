//! The n-local quantities `I^k_X`, the nonlinear witness
//! `S = |I^0|^{1/p} + |I^1|^{1/p}` and their closed forms for the
//! canonical Pauli measurements.
//!
//! Every n-local model satisfies `S <= 1`.

use serde::Serialize;

use crate::correlator::{Correlations, SettingAssignment};
use crate::error::Result;

pub const CLASSICAL_BOUND: f64 = 1.0;

/// `S` must exceed the bound by more than this to count as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Concurrence below which a source counts as a product state.
pub const PRODUCT_STATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationResult {
    #[serde(rename = "I0")]
    pub i0: f64,
    #[serde(rename = "I1")]
    pub i1: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub bound: f64,
    pub violated: bool,
    #[serde(skip)]
    pub x0: Vec<bool>,
    #[serde(skip)]
    pub x1: Vec<bool>,
}

/// `|value|^{1/p}`, with `0^{1/p} = 0`.
pub fn pth_root(value: f64, p: usize) -> f64 {
    value.abs().powf(1.0 / p as f64)
}

pub fn s_value(i0: f64, i1: f64, p: usize) -> f64 {
    pth_root(i0, p) + pth_root(i1, p)
}

pub fn is_violation(s: f64) -> bool {
    s > CLASSICAL_BOUND + VIOLATION_TOL
}

/// `I^k_X = 2^{-p} Σ_Y (-1)^{k Σ y_j} <A_X B_Y>`.
///
/// The sum runs over `Y` in increasing mask order (bit `j - 1` is `y_j`) so
/// the result is bit-stable.
pub fn evaluate_i<C: Correlations + ?Sized>(source: &C, k: bool, x: &[bool]) -> Result<f64> {
    let (_, p) = source.shape();
    let mut total = 0.0;
    for mask in 0..1usize << p {
        let assignment = SettingAssignment::with_y_mask(x, p, mask);
        let term = source.correlator(&assignment)?;
        let negate = k && mask.count_ones() % 2 == 1;
        total += if negate { -term } else { term };
    }
    Ok(total / (1u64 << p) as f64)
}

/// `S` with `I^0` at `x0` and `I^1` at `x1`.
pub fn evaluate_s_with<C: Correlations + ?Sized>(source: &C, x0: &[bool], x1: &[bool]) -> Result<EvaluationResult> {
    let (_, p) = source.shape();
    let i0 = evaluate_i(source, false, x0)?;
    let i1 = evaluate_i(source, true, x1)?;
    let s = s_value(i0, i1, p);
    Ok(EvaluationResult {
        i0,
        i1,
        s,
        bound: CLASSICAL_BOUND,
        violated: is_violation(s),
        x0: x0.to_vec(),
        x1: x1.to_vec(),
    })
}

/// `S = |I^0_{0..0}|^{1/p} + |I^1_{1..1}|^{1/p}`.
pub fn evaluate_s<C: Correlations + ?Sized>(source: &C) -> Result<EvaluationResult> {
    let (l, _) = source.shape();
    evaluate_s_with(source, &vec![false; l], &vec![true; l])
}

/// `S` for the canonical plan, straight from the angles:
/// `|Π cos α_j|^{1/p} + |Π sin α_j Π sin 2θ_r|^{1/p}`.
pub fn closed_form_s(thetas: &[f64], alphas: &[f64], p: usize) -> f64 {
    let cos: f64 = alphas.iter().map(|a| a.cos()).product();
    let sin: f64 = alphas.iter().map(|a| a.sin()).product();
    let ent: f64 = thetas.iter().map(|t| (2.0 * t).sin()).product();
    pth_root(cos, p) + pth_root(sin * ent, p)
}

/// Maximum of `S` over a common extremal angle, `sqrt(1 + [Π sin² 2θ_r]^{1/p})`,
/// and the angle attaining it, `arctan |Π sin 2θ_r|^{1/p}`.
///
/// Sources with concurrence below [`PRODUCT_STATE_TOL`] count as product
/// states, so `θ = π/2` gives exactly 1 rather than `1 + O(ε^{2/p})`.
pub fn closed_form_smax(thetas: &[f64], p: usize) -> (f64, f64) {
    let ent: f64 =
        thetas.iter().map(|t| (2.0 * t).sin()).map(|c| if c.abs() < PRODUCT_STATE_TOL { 0.0 } else { c }).product();
    let tan = pth_root(ent, p);
    ((1.0 + tan * tan).sqrt(), tan.atan())
}
