//! Source states, dichotomic qubit observables and measurement plans.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NetworkError, Result};
use crate::topology::NetworkConfig;

const UNIT_TOL: f64 = 1e-12;

/// Two-qubit amplitudes in the order `|00>, |01>, |10>, |11>`.
pub type TwoQubitState = [Complex64; 4];

/// 2x2 complex matrix, row-major.
pub type Matrix2 = [[Complex64; 2]; 2];

/// Source angle `θ` of `cos θ |00> + sin θ |11>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceParam {
    pub theta: f64,
}

impl SourceParam {
    pub const fn new(theta: f64) -> Self {
        Self { theta }
    }

    /// `θ` reduced to `[0, 2π)`.
    pub fn canonical(&self) -> f64 {
        let t = self.theta.rem_euclid(TAU);
        if t >= TAU {
            0.0
        } else {
            t
        }
    }

    pub fn state(&self) -> TwoQubitState {
        source_state(*self)
    }

    pub fn concurrence(&self) -> f64 {
        concurrence(*self)
    }
}

impl From<f64> for SourceParam {
    fn from(theta: f64) -> Self {
        Self::new(theta)
    }
}

pub fn source_params(thetas: &[f64]) -> Vec<SourceParam> {
    thetas.iter().copied().map(SourceParam::new).collect()
}

pub fn source_state(param: SourceParam) -> TwoQubitState {
    let (s, c) = param.theta.sin_cos();
    let zero = Complex64::new(0.0, 0.0);
    [Complex64::new(c, 0.0), zero, zero, Complex64::new(s, 0.0)]
}

/// Concurrence of `cos θ |00> + sin θ |11>`, i.e. `|sin 2θ|`.
pub fn concurrence(param: SourceParam) -> f64 {
    (2.0 * param.theta).sin().abs()
}

/// `v · σ` for a unit Bloch vector `v`; eigenvalues are `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochObservable {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochObservable {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm2 = x * x + y * y + z * z;
        if !norm2.is_finite() || (norm2 - 1.0).abs() > UNIT_TOL {
            return Err(NetworkError::InvalidParameter(format!(
                "Bloch vector ({x}, {y}, {z}) has squared norm {norm2}, expected 1"
            )));
        }
        Ok(Self { x, y, z })
    }

    /// Normalizes an arbitrary non-zero direction.
    pub fn from_direction(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(NetworkError::InvalidParameter("zero Bloch direction".into()));
        }
        Self::new(x / norm, y / norm, z / norm)
    }

    pub const fn pauli_x() -> Self {
        Self { x: 1.0, y: 0.0, z: 0.0 }
    }

    pub const fn pauli_z() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn matrix(&self) -> Matrix2 {
        [
            [Complex64::new(self.z, 0.0), Complex64::new(self.x, -self.y)],
            [Complex64::new(self.x, self.y), Complex64::new(-self.z, 0.0)],
        ]
    }

    /// Rows are the normalized eigenvectors for eigenvalue `+1` then `-1`.
    pub fn eigenbasis(&self) -> Matrix2 {
        let (x, y, z) = (self.x, self.y, self.z);
        let (plus, minus) = if z >= 0.0 {
            (
                [Complex64::new(1.0 + z, 0.0), Complex64::new(x, y)],
                [Complex64::new(-x, y), Complex64::new(1.0 + z, 0.0)],
            )
        } else {
            (
                [Complex64::new(x, -y), Complex64::new(1.0 - z, 0.0)],
                [Complex64::new(1.0 - z, 0.0), Complex64::new(-x, -y)],
            )
        };
        let normalize = |v: [Complex64; 2]| {
            let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
            [v[0] / norm, v[1] / norm]
        };
        [normalize(plus), normalize(minus)]
    }
}

/// `B_y = cos α σ_z + (-1)^y sin α σ_x`.
pub fn extremal_observable(alpha: f64, y: bool) -> BlochObservable {
    let (s, c) = alpha.sin_cos();
    let sign = if y { -1.0 } else { 1.0 };
    BlochObservable { x: sign * s, y: 0.0, z: c }
}

/// `<ψ| first ⊗ second |ψ>`, with `first` acting on the high qubit.
pub fn pair_expectation(state: &TwoQubitState, first: &BlochObservable, second: &BlochObservable) -> f64 {
    let a = first.matrix();
    let b = second.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for row in 0..4 {
        let mut applied = Complex64::new(0.0, 0.0);
        for col in 0..4 {
            applied += a[row >> 1][col >> 1] * b[row & 1][col & 1] * state[col];
        }
        acc += state[row].conj() * applied;
    }
    acc.re
}

/// Dichotomic measurements for every node.
///
/// `intermediate[i - 1][x]` is the product observable `A^i_x`, one factor per
/// source in `Λ_i` (sorted by source index). Extremal node `j` measures
/// `B_y = cos α_j σ_z + (-1)^y sin α_j σ_x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub intermediate: Vec<[Vec<BlochObservable>; 2]>,
    pub extremal_angles: Vec<f64>,
}

impl MeasurementPlan {
    pub fn new(intermediate: Vec<[Vec<BlochObservable>; 2]>, extremal_angles: Vec<f64>) -> Self {
        Self { intermediate, extremal_angles }
    }

    /// `A_0 = σ_z^{⊗m}`, `A_1 = σ_x^{⊗m}` everywhere.
    pub fn canonical(config: &NetworkConfig, alphas: &[f64]) -> Result<Self> {
        if alphas.len() != config.p {
            return Err(NetworkError::Configuration(format!(
                "expected {} extremal angles, got {}",
                config.p,
                alphas.len()
            )));
        }
        let m = config.m;
        let node = [vec![BlochObservable::pauli_z(); m], vec![BlochObservable::pauli_x(); m]];
        Ok(Self::new(vec![node; config.l()], alphas.to_vec()))
    }

    pub fn check_arity(&self, config: &NetworkConfig) -> Result<()> {
        if self.extremal_angles.len() != config.p {
            return Err(NetworkError::Configuration(format!(
                "plan has {} extremal angles, network has p = {}",
                self.extremal_angles.len(),
                config.p
            )));
        }
        if self.intermediate.len() != config.l() {
            return Err(NetworkError::Configuration(format!(
                "plan has {} intermediate nodes, network has l = {}",
                self.intermediate.len(),
                config.l()
            )));
        }
        for (i, settings) in self.intermediate.iter().enumerate() {
            for (x, factors) in settings.iter().enumerate() {
                if factors.len() != config.m {
                    return Err(NetworkError::Configuration(format!(
                        "A{}_{x} has {} factors, expected m = {}",
                        i + 1,
                        factors.len(),
                        config.m
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn intermediate_factor(&self, i: usize, x: bool, slot: usize) -> BlochObservable {
        self.intermediate[i - 1][usize::from(x)][slot]
    }

    pub fn extremal_factor(&self, j: usize, y: bool) -> BlochObservable {
        extremal_observable(self.extremal_angles[j - 1], y)
    }
}

/// Parses an angle in radians, optionally suffixed with `pi` as a multiplier
/// (`"0.25pi"`, `"-pi"`, `"pi"`), and optionally divided (`"pi/4"`).
pub fn parse_angle(text: &str) -> Result<f64> {
    let t = text.trim();
    let bad = || NetworkError::Parse(format!("cannot parse angle {text:?}"));
    if let Some((num, den)) = t.split_once('/') {
        let den: f64 = den.trim().parse().map_err(|_| bad())?;
        let value = parse_angle(num)? / den;
        return if value.is_finite() { Ok(value) } else { Err(bad()) };
    }
    let value = match t.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.trim();
            let k = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => coef.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
            };
            k * PI
        }
        None => t.parse::<f64>().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Comma-separated angle list.
pub fn parse_angle_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').filter(|s| !s.trim().is_empty()).map(parse_angle).collect()
}
