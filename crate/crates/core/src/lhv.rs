//! n-local hidden-variable models and an exhaustive search for the largest
//! classical value of `S`.
//!
//! A model gives every source `r` a distribution over a finite alphabet
//! `{0, .., c-1}` and every node a deterministic response table. An
//! intermediate node `A_i` answers `a_i(x_i, λ_{Λ_i})`, an extremal node
//! `B_j` answers `b_j(y_j, λ_j)`.
//!
//! Hidden-variable tuples `λ = (λ_1, .., λ_n)` are indexed with `λ_1` as the
//! most significant base-`c` digit. Intermediate tables are indexed
//! `x * c^m + (λ over Λ_i, first source most significant)`, extremal tables
//! `y * c + λ_j`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlator::{Correlations, JointDistribution, SettingAssignment};
use crate::error::{NetworkError, Result};
use crate::inequality::{s_value, CLASSICAL_BOUND};
use crate::topology::{AttachmentMap, NetworkConfig};

/// Tolerance on the classical bound used when certifying a search.
pub const CERTIFY_TOL: f64 = 1e-6;

const PROB_TOL: f64 = 1e-12;

/// Largest hidden-variable tuple space the search handles.
pub const MAX_TUPLES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvModel {
    pub alphabet_size: usize,
    /// `source_weights[r - 1][λ]`.
    pub source_weights: Vec<Vec<f64>>,
    /// `intermediate_tables[i - 1]`, entries 0 or 1.
    pub intermediate_tables: Vec<Vec<u8>>,
    /// `extremal_tables[j - 1]`, entries 0 or 1.
    pub extremal_tables: Vec<Vec<u8>>,
}

impl LhvModel {
    pub fn check(&self, config: &NetworkConfig) -> Result<()> {
        let c = self.alphabet_size;
        let err = |msg: String| Err(NetworkError::Configuration(msg));
        if c == 0 {
            return err("alphabet size must be positive".into());
        }
        if self.source_weights.len() != config.n {
            return err(format!("{} source distributions for n = {}", self.source_weights.len(), config.n));
        }
        for (r, w) in self.source_weights.iter().enumerate() {
            let total: f64 = w.iter().sum();
            if w.len() != c || w.iter().any(|&v| v.is_nan() || v < 0.0) || (total - 1.0).abs() > PROB_TOL {
                return err(format!("S{} weights {w:?} are not a distribution over {c} symbols", r + 1));
            }
        }
        let a_len = 2 * c.pow(config.m as u32);
        if self.intermediate_tables.len() != config.l() {
            return err(format!("{} intermediate tables for l = {}", self.intermediate_tables.len(), config.l()));
        }
        if self.extremal_tables.len() != config.p {
            return err(format!("{} extremal tables for p = {}", self.extremal_tables.len(), config.p));
        }
        let tables = self.intermediate_tables.iter().map(|t| (t, a_len, "A"));
        let tables = tables.chain(self.extremal_tables.iter().map(|t| (t, 2 * c, "B")));
        for (t, len, kind) in tables {
            if t.len() != len || t.iter().any(|&b| b > 1) {
                return err(format!("{kind} response table must have {len} entries in {{0,1}}, got {t:?}"));
            }
        }
        Ok(())
    }

    /// Deterministic model: every source emits symbol 0.
    pub fn point_mass(
        config: &NetworkConfig,
        alphabet_size: usize,
        intermediate: Vec<Vec<u8>>,
        extremal: Vec<Vec<u8>>,
    ) -> Self {
        let mut weights = vec![0.0; alphabet_size];
        weights[0] = 1.0;
        Self {
            alphabet_size,
            source_weights: vec![weights; config.n],
            intermediate_tables: intermediate,
            extremal_tables: extremal,
        }
    }
}

struct Indexer {
    c: usize,
    n: usize,
}

impl Indexer {
    fn tuples(&self) -> usize {
        self.c.pow(self.n as u32)
    }

    /// `λ_r` inside tuple `t`.
    fn symbol(&self, t: usize, r: usize) -> usize {
        t / self.c.pow((self.n - r) as u32) % self.c
    }

    fn weight(&self, weights: &[Vec<f64>], t: usize) -> f64 {
        (1..=self.n).map(|r| weights[r - 1][self.symbol(t, r)]).product()
    }

    fn intermediate_entry(&self, att: &AttachmentMap, i: usize, x: bool, t: usize, m: usize) -> usize {
        let local = att.lambda(i).iter().fold(0, |acc, s| acc * self.c + self.symbol(t, s.0));
        usize::from(x) * self.c.pow(m as u32) + local
    }

    fn extremal_entry(&self, att: &AttachmentMap, j: usize, y: bool, t: usize) -> usize {
        usize::from(y) * self.c + self.symbol(t, att.extremal[j - 1].0)
    }
}

/// `P(A, B | X, Y) = Σ_λ Π_r ρ_r(λ_r) [a = a(x, λ)] [b = b(y, λ)]`.
pub fn lhv_distribution(
    config: &NetworkConfig,
    model: &LhvModel,
    assignment: &SettingAssignment,
) -> Result<JointDistribution> {
    let att = config.attachments()?;
    model.check(config)?;
    distribution_with(config, &att, model, assignment)
}

fn distribution_with(
    config: &NetworkConfig,
    att: &AttachmentMap,
    model: &LhvModel,
    assignment: &SettingAssignment,
) -> Result<JointDistribution> {
    let (l, p) = (config.l(), config.p);
    assignment.check(l, p)?;
    let ix = Indexer { c: model.alphabet_size, n: config.n };
    let mut dist = JointDistribution::zeros(l, p);
    for t in 0..ix.tuples() {
        let w = ix.weight(&model.source_weights, t);
        if w == 0.0 {
            continue;
        }
        let mut outcome = 0usize;
        for i in 1..=l {
            let e = ix.intermediate_entry(att, i, assignment.x[i - 1], t, config.m);
            outcome |= usize::from(model.intermediate_tables[i - 1][e]) << (i - 1);
        }
        for j in 1..=p {
            let e = ix.extremal_entry(att, j, assignment.y[j - 1], t);
            outcome |= usize::from(model.extremal_tables[j - 1][e]) << (l + j - 1);
        }
        dist.probs[outcome] += w;
    }
    Ok(dist)
}

/// An LHV model bound to its network, usable wherever quantum correlators are.
#[derive(Debug, Clone)]
pub struct LhvNetwork {
    config: NetworkConfig,
    attachments: AttachmentMap,
    model: LhvModel,
}

impl LhvNetwork {
    pub fn new(config: &NetworkConfig, model: LhvModel) -> Result<Self> {
        let attachments = config.attachments()?;
        model.check(config)?;
        Ok(Self { config: config.clone(), attachments, model })
    }

    pub fn model(&self) -> &LhvModel {
        &self.model
    }

    pub fn distribution(&self, assignment: &SettingAssignment) -> Result<JointDistribution> {
        distribution_with(&self.config, &self.attachments, &self.model, assignment)
    }
}

impl Correlations for LhvNetwork {
    fn shape(&self) -> (usize, usize) {
        (self.config.l(), self.config.p)
    }

    fn correlator(&self, assignment: &SettingAssignment) -> Result<f64> {
        Ok(self.distribution(assignment)?.correlator())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LhvSearchOptions {
    pub alphabet_size: usize,
    /// Grid points per simplex edge; `11` gives weights in steps of `0.1`.
    pub grid_steps: usize,
    /// Patterns passed to local refinement, best grid values first.
    pub refine_top: usize,
    /// Extra random starting points per refined pattern.
    pub restarts: usize,
    pub seed: u64,
    /// Maximum number of (flip-pruned) response-table combinations.
    pub table_cap: u128,
}

impl Default for LhvSearchOptions {
    fn default() -> Self {
        Self { alphabet_size: 2, grid_steps: 11, refine_top: 16, restarts: 4, seed: 0, table_cap: 1 << 26 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LhvSearchReport {
    pub best_s: f64,
    pub grid_best_s: f64,
    pub bound: f64,
    /// `best_s <= bound + CERTIFY_TOL`.
    pub certified: bool,
    pub tables_enumerated: u128,
    pub distinct_patterns: usize,
    pub model: LhvModel,
}

/// Number of response-table combinations enumerated for alphabet `c`.
///
/// Flipping every output of one node negates all correlators and leaves
/// `|I^k|` unchanged, so each table is enumerated with its first entry fixed
/// to 0.
pub fn enumeration_size(config: &NetworkConfig, c: usize) -> Result<u128> {
    let bits = free_bits(config, c)?;
    let total: u32 = bits.iter().map(|&b| b as u32).sum();
    if total >= 128 {
        return Ok(u128::MAX);
    }
    Ok(1u128 << total)
}

fn free_bits(config: &NetworkConfig, c: usize) -> Result<Vec<usize>> {
    if c == 0 {
        return Err(NetworkError::InvalidParameter("alphabet size must be positive".into()));
    }
    let a_bits = c
        .checked_pow(config.m as u32)
        .and_then(|v| v.checked_mul(2))
        .ok_or_else(|| NetworkError::InvalidParameter("alphabet too large".into()))?;
    let mut bits = vec![a_bits - 1; config.l()];
    bits.extend(std::iter::repeat_n(2 * c - 1, config.p));
    Ok(bits)
}

/// Per-node, per-table sign vectors over all `λ` tuples:
/// `(A(x=0), A(x=1))` for intermediate nodes and
/// `((B(0)+B(1))/2, (B(0)-B(1))/2)` for extremal nodes.
struct NodeTables {
    vectors: Vec<(Vec<i8>, Vec<i8>)>,
}

fn sign(bit: u64) -> i8 {
    if bit == 0 {
        1
    } else {
        -1
    }
}

fn node_tables(config: &NetworkConfig, att: &AttachmentMap, ix: &Indexer, bits: &[usize]) -> Vec<NodeTables> {
    let tuples = ix.tuples();
    let l = config.l();
    bits.iter()
        .enumerate()
        .map(|(k, &free)| {
            let vectors = (0..1u64 << free)
                .map(|code| {
                    let table = code << 1;
                    let entry = |e: usize| table >> e & 1;
                    let mut first = vec![0i8; tuples];
                    let mut second = vec![0i8; tuples];
                    for t in 0..tuples {
                        if k < l {
                            first[t] = sign(entry(ix.intermediate_entry(att, k + 1, false, t, config.m)));
                            second[t] = sign(entry(ix.intermediate_entry(att, k + 1, true, t, config.m)));
                        } else {
                            let j = k - l + 1;
                            let b0 = sign(entry(ix.extremal_entry(att, j, false, t)));
                            let b1 = sign(entry(ix.extremal_entry(att, j, true, t)));
                            first[t] = (b0 + b1) / 2;
                            second[t] = (b0 - b1) / 2;
                        }
                    }
                    (first, second)
                })
                .collect();
            NodeTables { vectors }
        })
        .collect()
}

/// Packs `(f0, f1)` up to an independent sign on each, 2 bits per entry.
fn pattern_key(f0: &[i8], f1: &[i8]) -> u128 {
    let pack = |f: &[i8]| {
        let flip = f.iter().find(|&&v| v != 0).is_some_and(|&v| v < 0);
        f.iter().enumerate().fold(0u128, |acc, (t, &v)| {
            let v = if flip { -v } else { v };
            let code: u128 = match v {
                0 => 0,
                1 => 1,
                _ => 2,
            };
            acc | code << (2 * t)
        })
    };
    pack(f0) | pack(f1) << 64
}

fn unpack(key: u128, tuples: usize) -> (Vec<f64>, Vec<f64>) {
    let decode = |word: u128| -> Vec<f64> {
        (0..tuples)
            .map(|t| match word >> (2 * t) & 3 {
                0 => 0.0,
                1 => 1.0,
                _ => -1.0,
            })
            .collect()
    };
    (decode(key & u128::from(u64::MAX)), decode(key >> 64))
}

/// Smallest mixed-radix table index reaching each distinct pattern.
type PatternMap = HashMap<u128, u128>;

struct Enumerator<'a> {
    tables: &'a [NodeTables],
    radix_weight: Vec<u128>,
    tuples: usize,
}

impl Enumerator<'_> {
    fn descend(&self, depth: usize, index: u128, f0: &[i8], f1: &[i8], out: &mut PatternMap) {
        if depth == self.tables.len() || (f0.iter().all(|&v| v == 0) && f1.iter().all(|&v| v == 0)) {
            // Remaining nodes cannot change an all-zero pattern; the
            // all-zero continuation has the smallest index.
            let key = pattern_key(f0, f1);
            out.entry(key).and_modify(|v| *v = (*v).min(index)).or_insert(index);
            return;
        }
        let mut g0 = vec![0i8; self.tuples];
        let mut g1 = vec![0i8; self.tuples];
        for (code, (v0, v1)) in self.tables[depth].vectors.iter().enumerate() {
            for t in 0..self.tuples {
                g0[t] = f0[t] * v0[t];
                g1[t] = f1[t] * v1[t];
            }
            let next = index + code as u128 * self.radix_weight[depth];
            self.descend(depth + 1, next, &g0, &g1, out);
        }
    }
}

fn merge(mut a: PatternMap, b: PatternMap) -> PatternMap {
    if a.len() < b.len() {
        return merge(b, a);
    }
    for (k, v) in b {
        a.entry(k).and_modify(|e| *e = (*e).min(v)).or_insert(v);
    }
    a
}

/// All weight vectors on the `c`-simplex with coordinates in steps of `1/(g-1)`.
fn simplex_grid(c: usize, g: usize) -> Vec<Vec<f64>> {
    fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            compositions(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    if c == 1 {
        return vec![vec![1.0]];
    }
    let steps = g - 1;
    let mut out = Vec::new();
    compositions(steps, c, &mut Vec::new(), &mut out);
    out.into_iter().map(|v| v.into_iter().map(|k| k as f64 / steps as f64).collect()).collect()
}

fn tuple_weights(ix: &Indexer, per_source: &[&[f64]]) -> Vec<f64> {
    (0..ix.tuples()).map(|t| (1..=ix.n).map(|r| per_source[r - 1][ix.symbol(t, r)]).product()).collect()
}

fn s_of(w: &[f64], f0: &[f64], f1: &[f64], p: usize) -> f64 {
    let i0: f64 = w.iter().zip(f0).map(|(a, b)| a * b).sum();
    let i1: f64 = w.iter().zip(f1).map(|(a, b)| a * b).sum();
    s_value(i0, i1, p)
}

/// Source weights from unconstrained coordinates, `ρ = u² / |u|²` per source.
fn weights_from_params(u: &[f64], n: usize, c: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|r| {
            let chunk = &u[r * c..(r + 1) * c];
            let norm: f64 = chunk.iter().map(|v| v * v).sum();
            if norm == 0.0 {
                vec![1.0 / c as f64; c]
            } else {
                chunk.iter().map(|v| v * v / norm).collect()
            }
        })
        .collect()
}

/// Nelder–Mead maximization of `f` from `start`.
fn nelder_mead(f: impl Fn(&[f64]) -> f64, start: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let d = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((start.to_vec(), f(start)));
    for k in 0..d {
        let mut v = start.to_vec();
        v[k] += if v[k].abs() > 1e-3 { step * v[k].abs().max(0.1) } else { step };
        let value = f(&v);
        simplex.push((v, value));
    }
    let mut evals = d + 1;
    while evals < max_evals {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (best, worst) = (simplex[0].1, simplex[d].1);
        if (best - worst).abs() <= 1e-14 * (1.0 + best.abs()) {
            break;
        }
        let centroid: Vec<f64> =
            (0..d).map(|k| simplex[..d].iter().map(|(v, _)| v[k]).sum::<f64>() / d as f64).collect();
        let along =
            |t: f64| -> Vec<f64> { (0..d).map(|k| centroid[k] + t * (simplex[d].0[k] - centroid[k])).collect() };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr > simplex[0].1 {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evals += 1;
            simplex[d] = if fe > fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr > simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let t = if fr > worst { -0.5 } else { 0.5 };
            let contracted = along(t);
            let fc = f(&contracted);
            evals += 1;
            if fc > worst.max(fr) {
                simplex[d] = (contracted, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for (v, value) in simplex.iter_mut().skip(1) {
                    for k in 0..d {
                        v[k] = anchor[k] + 0.5 * (v[k] - anchor[k]);
                    }
                    *value = f(v);
                }
                evals += d;
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    simplex.swap_remove(0)
}

/// Largest `S` over n-local models with alphabet `options.alphabet_size`.
///
/// Every flip-pruned combination of deterministic response tables is
/// enumerated and reduced to its pattern `(f0, f1)`, where
/// `I^0 = Σ_λ w(λ) f0(λ)` and `I^1 = Σ_λ w(λ) f1(λ)` for product weights `w`.
/// Each distinct pattern is scored on a simplex grid of source weights, and
/// the best `refine_top` patterns are polished with Nelder–Mead. Ties go to
/// the lexicographically smallest table combination.
pub fn lhv_best_s(config: &NetworkConfig, options: &LhvSearchOptions) -> Result<LhvSearchReport> {
    let att = config.attachments()?;
    let c = options.alphabet_size;
    if options.grid_steps < 2 && c > 1 {
        return Err(NetworkError::InvalidParameter("grid_steps must be at least 2".into()));
    }
    let bits = free_bits(config, c)?;
    let size = enumeration_size(config, c)?;
    if size > options.table_cap || bits.iter().any(|&b| b > 62) {
        return Err(NetworkError::ResourceLimit {
            what: "deterministic response-table enumeration".into(),
            size,
            cap: options.table_cap,
        });
    }
    let ix = Indexer { c, n: config.n };
    let tuples = ix.tuples();
    if tuples > MAX_TUPLES {
        return Err(NetworkError::ResourceLimit {
            what: "hidden-variable tuple space".into(),
            size: tuples as u128,
            cap: MAX_TUPLES as u128,
        });
    }
    let p = config.p;

    let tables = node_tables(config, &att, &ix, &bits);
    let mut radix_weight = vec![1u128; bits.len()];
    for k in (0..bits.len().saturating_sub(1)).rev() {
        radix_weight[k] = radix_weight[k + 1] << bits[k + 1];
    }
    let enumerator = Enumerator { tables: &tables, radix_weight, tuples };
    let patterns: PatternMap = tables[0]
        .vectors
        .par_iter()
        .enumerate()
        .fold(PatternMap::new, |mut acc, (code, (v0, v1))| {
            let index = code as u128 * enumerator.radix_weight[0];
            enumerator.descend(1, index, v0, v1, &mut acc);
            acc
        })
        .reduce(PatternMap::new, merge);

    let mut patterns: Vec<(u128, u128)> = patterns.into_iter().collect();
    patterns.sort_by_key(|&(_, index)| index);

    let per_source = simplex_grid(c, options.grid_steps);
    let grid_len = per_source.len().pow(config.n as u32);
    let grid: Vec<Vec<f64>> = (0..grid_len)
        .map(|g| {
            let choice: Vec<&[f64]> = (0..config.n)
                .map(|r| per_source[g / per_source.len().pow((config.n - 1 - r) as u32) % per_source.len()].as_slice())
                .collect();
            tuple_weights(&ix, &choice)
        })
        .collect();

    // (pattern position, grid score, grid point)
    let mut scored: Vec<(usize, f64, usize)> = patterns
        .par_iter()
        .enumerate()
        .map(|(pos, &(key, _))| {
            let (f0, f1) = unpack(key, tuples);
            let mut best = (f64::NEG_INFINITY, 0);
            for (g, w) in grid.iter().enumerate() {
                let s = s_of(w, &f0, &f1, p);
                if s > best.0 {
                    best = (s, g);
                }
            }
            (pos, best.0, best.1)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let grid_best_s = scored[0].1;

    let grid_point_params = |g: usize| -> Vec<f64> {
        (0..config.n)
            .flat_map(|r| {
                let w = &per_source[g / per_source.len().pow((config.n - 1 - r) as u32) % per_source.len()];
                w.iter().map(|v| v.sqrt()).collect::<Vec<_>>()
            })
            .collect()
    };

    // (score, pattern position, weights)
    let refined: Vec<(f64, usize, Vec<Vec<f64>>)> = scored
        .iter()
        .take(options.refine_top.max(1))
        .enumerate()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(rank, &(pos, grid_s, g))| {
            let (f0, f1) = unpack(patterns[pos].0, tuples);
            let objective = |u: &[f64]| {
                let weights = weights_from_params(u, config.n, c);
                let refs: Vec<&[f64]> = weights.iter().map(Vec::as_slice).collect();
                s_of(&tuple_weights(&ix, &refs), &f0, &f1, p)
            };
            let start = grid_point_params(g);
            let mut best = (grid_s, weights_from_params(&start, config.n, c));
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ (rank as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut starts = vec![start];
            for _ in 0..options.restarts {
                starts.push((0..config.n * c).map(|_| rng.random_range(0.05..1.0)).collect());
            }
            if c > 1 {
                for s in &starts {
                    let (u, value) = nelder_mead(objective, s, 0.2, 4000);
                    if value > best.0 {
                        best = (value, weights_from_params(&u, config.n, c));
                    }
                }
            }
            (best.0, pos, best.1)
        })
        .collect();

    let (best_s, pos, weights) = refined
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
        .expect("at least one pattern is refined");

    let model = decode_model(config, &ix, &bits, patterns[pos].1, weights);
    Ok(LhvSearchReport {
        best_s,
        grid_best_s,
        bound: CLASSICAL_BOUND,
        certified: best_s <= CLASSICAL_BOUND + CERTIFY_TOL,
        tables_enumerated: size,
        distinct_patterns: patterns.len(),
        model,
    })
}

fn decode_model(
    config: &NetworkConfig,
    ix: &Indexer,
    bits: &[usize],
    mut index: u128,
    source_weights: Vec<Vec<f64>>,
) -> LhvModel {
    let mut codes = vec![0u64; bits.len()];
    for k in (0..bits.len()).rev() {
        codes[k] = (index & ((1u128 << bits[k]) - 1)) as u64;
        index >>= bits[k];
    }
    let table = |code: u64, len: usize| -> Vec<u8> { (0..len).map(|e| ((code << 1) >> e & 1) as u8).collect() };
    let l = config.l();
    let a_len = 2 * ix.c.pow(config.m as u32);
    LhvModel {
        alphabet_size: ix.c,
        source_weights,
        intermediate_tables: codes[..l].iter().map(|&c| table(c, a_len)).collect(),
        extremal_tables: codes[l..].iter().map(|&c| table(c, 2 * ix.c)).collect(),
    }
}
