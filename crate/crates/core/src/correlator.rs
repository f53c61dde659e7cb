//! Full correlators `<A^1_{x1} ... A^l_{xl} B^1_{y1} ... B^p_{yp}>` of a
//! quantum network.
//!
//! Three independent routes are provided:
//!
//! * [`QuantumNetwork::correlator_factorized`] multiplies one two-qubit
//!   expectation per source. This works because every node measures a product
//!   observable and the global state is a product over sources.
//! * [`QuantumNetwork::correlator_statevector`] builds the full `2n`-qubit
//!   state and applies every single-qubit factor to it.
//! * [`QuantumNetwork::joint_distribution`] derives the Born-rule outcome
//!   distribution, from which the correlator is the parity-signed sum.
//!
//! Global qubit `2(r - 1) + e` carries particle `e` of source `r`, and qubit 0
//! is the most significant bit of a basis index.

use num_complex::Complex64;

use crate::error::{NetworkError, Result};
use crate::quantum::{source_state, BlochObservable, Matrix2, MeasurementPlan, SourceParam};
use crate::topology::{AttachmentMap, NetworkConfig, NodeId, NodeKind};

/// Largest source count accepted by the dense routes (4^6 amplitudes).
pub const STATEVECTOR_MAX_SOURCES: usize = 6;

/// Inputs `x_i` for intermediate nodes and `y_j` for extremal nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SettingAssignment {
    pub x: Vec<bool>,
    pub y: Vec<bool>,
}

impl SettingAssignment {
    pub fn new(x: Vec<bool>, y: Vec<bool>) -> Self {
        Self { x, y }
    }

    pub fn uniform(l: usize, p: usize, x: bool, y: bool) -> Self {
        Self { x: vec![x; l], y: vec![y; p] }
    }

    /// `y_j` taken from bit `j - 1` of `mask`.
    pub fn with_y_mask(x: &[bool], p: usize, mask: usize) -> Self {
        Self { x: x.to_vec(), y: (0..p).map(|j| mask >> j & 1 == 1).collect() }
    }

    pub fn check(&self, l: usize, p: usize) -> Result<()> {
        if self.x.len() != l || self.y.len() != p {
            return Err(NetworkError::Configuration(format!(
                "assignment has {} intermediate and {} extremal inputs, network needs {l} and {p}",
                self.x.len(),
                self.y.len()
            )));
        }
        Ok(())
    }
}

/// `P(A, B | X, Y)` over all `l + p` output bits. Bit `i - 1` of an outcome
/// index is `a_i`; bit `l + j - 1` is `b_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub l: usize,
    pub p: usize,
    pub probs: Vec<f64>,
}

impl JointDistribution {
    pub fn zeros(l: usize, p: usize) -> Self {
        Self { l, p, probs: vec![0.0; 1 << (l + p)] }
    }

    pub fn outcome_index(&self, a: &[bool], b: &[bool]) -> usize {
        let bits = a.iter().chain(b);
        bits.enumerate().fold(0, |acc, (k, &bit)| acc | usize::from(bit) << k)
    }

    pub fn probability(&self, a: &[bool], b: &[bool]) -> f64 {
        self.probs[self.outcome_index(a, b)]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `Σ (-1)^{Σa + Σb} P(A, B)`.
    pub fn correlator(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, &prob)| if k.count_ones() % 2 == 0 { prob } else { -prob }).sum()
    }
}

/// Anything that assigns a correlator to every input assignment.
pub trait Correlations {
    /// `(l, p)`.
    fn shape(&self) -> (usize, usize);

    fn correlator(&self, assignment: &SettingAssignment) -> Result<f64>;
}

/// Which route [`QuantumNetwork`] uses when acting as [`Correlations`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelatorRoute {
    #[default]
    Factorized,
    Statevector,
    JointDistribution,
}

/// A valid network with one pure source state per source and a measurement plan.
#[derive(Debug, Clone)]
pub struct QuantumNetwork {
    config: NetworkConfig,
    attachments: AttachmentMap,
    sources: Vec<SourceParam>,
    plan: MeasurementPlan,
    route: CorrelatorRoute,
}

impl QuantumNetwork {
    pub fn new(config: &NetworkConfig, thetas: &[f64], plan: MeasurementPlan) -> Result<Self> {
        let attachments = config.attachments()?;
        if thetas.len() != config.n {
            return Err(NetworkError::Configuration(format!(
                "expected {} source angles, got {}",
                config.n,
                thetas.len()
            )));
        }
        plan.check_arity(config)?;
        Ok(Self {
            config: config.clone(),
            attachments,
            sources: thetas.iter().copied().map(SourceParam::new).collect(),
            plan,
            route: CorrelatorRoute::Factorized,
        })
    }

    /// Canonical Pauli plan with extremal angles `alphas`.
    pub fn canonical(config: &NetworkConfig, thetas: &[f64], alphas: &[f64]) -> Result<Self> {
        let plan = MeasurementPlan::canonical(config, alphas)?;
        Self::new(config, thetas, plan)
    }

    pub fn with_route(mut self, route: CorrelatorRoute) -> Self {
        self.route = route;
        self
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn plan(&self) -> &MeasurementPlan {
        &self.plan
    }

    pub fn sources(&self) -> &[SourceParam] {
        &self.sources
    }

    /// Replaces the extremal angles `α_j`, keeping everything else.
    pub fn set_extremal_angles(&mut self, alphas: &[f64]) -> Result<()> {
        if alphas.len() != self.config.p {
            return Err(NetworkError::Configuration(format!(
                "expected {} extremal angles, got {}",
                self.config.p,
                alphas.len()
            )));
        }
        self.plan.extremal_angles.copy_from_slice(alphas);
        Ok(())
    }

    fn factor(&self, node: NodeId, source_index: usize, assignment: &SettingAssignment) -> BlochObservable {
        let slot = self
            .attachments
            .slot(node, crate::topology::SourceId(source_index))
            .expect("valid configuration attaches every edge end");
        match node.kind {
            NodeKind::Intermediate => self.plan.intermediate_factor(node.index, assignment.x[node.index - 1], slot),
            NodeKind::Extremal => self.plan.extremal_factor(node.index, assignment.y[node.index - 1]),
        }
    }

    /// Observable on every global qubit, indexed `2(r - 1) + e`.
    pub fn qubit_observables(&self, assignment: &SettingAssignment) -> Result<Vec<BlochObservable>> {
        assignment.check(self.config.l(), self.config.p)?;
        let mut out = vec![BlochObservable::pauli_z(); 2 * self.config.n];
        for edge in &self.config.edges {
            let r = edge.source.0;
            for (e, &end) in edge.ends.iter().enumerate() {
                out[2 * (r - 1) + e] = self.factor(end, r, assignment);
            }
        }
        Ok(out)
    }

    /// Node owning each global qubit.
    fn qubit_owners(&self) -> Vec<NodeId> {
        let mut owners = vec![NodeId::extremal(0); 2 * self.config.n];
        for edge in &self.config.edges {
            for (e, &end) in edge.ends.iter().enumerate() {
                owners[2 * (edge.source.0 - 1) + e] = end;
            }
        }
        owners
    }

    /// Product over sources of `Tr[ρ_r (O_u ⊗ O_v)]`.
    pub fn correlator_factorized(&self, assignment: &SettingAssignment) -> Result<f64> {
        let observables = self.qubit_observables(assignment)?;
        Ok(self
            .sources
            .iter()
            .enumerate()
            .map(|(k, &source)| {
                crate::quantum::pair_expectation(&source_state(source), &observables[2 * k], &observables[2 * k + 1])
            })
            .product())
    }

    fn check_dense(&self) -> Result<()> {
        let n = self.config.n;
        if n > STATEVECTOR_MAX_SOURCES {
            return Err(NetworkError::ResourceLimit {
                what: format!("dense state of {n} sources"),
                size: 1u128 << (2 * n),
                cap: 1u128 << (2 * STATEVECTOR_MAX_SOURCES),
            });
        }
        Ok(())
    }

    /// `⊗_r |Ψ_r>` over `2n` qubits.
    pub fn global_state(&self) -> Result<Vec<Complex64>> {
        self.check_dense()?;
        let mut state = vec![Complex64::new(1.0, 0.0)];
        for &source in &self.sources {
            let pair = source_state(source);
            state = state.iter().flat_map(|&a| pair.iter().map(move |&b| a * b)).collect();
        }
        Ok(state)
    }

    /// `<ψ| ⊗_q O_q |ψ>` on the dense `4^n` state.
    pub fn correlator_statevector(&self, assignment: &SettingAssignment) -> Result<f64> {
        let psi = self.global_state()?;
        let observables = self.qubit_observables(assignment)?;
        let mut phi = psi.clone();
        for (q, obs) in observables.iter().enumerate() {
            apply_single_qubit(&mut phi, observables.len(), q, &obs.matrix());
        }
        let value: Complex64 = psi.iter().zip(&phi).map(|(a, b)| a.conj() * b).sum();
        Ok(value.re)
    }

    /// Born-rule distribution of all node outcomes. An intermediate node's
    /// output bit is the parity of its `m` single-qubit outcomes.
    pub fn joint_distribution(&self, assignment: &SettingAssignment) -> Result<JointDistribution> {
        let mut amplitudes = self.global_state()?;
        let observables = self.qubit_observables(assignment)?;
        let qubits = observables.len();
        for (q, obs) in observables.iter().enumerate() {
            let basis = obs.eigenbasis();
            let rotate = [[basis[0][0].conj(), basis[0][1].conj()], [basis[1][0].conj(), basis[1][1].conj()]];
            apply_single_qubit(&mut amplitudes, qubits, q, &rotate);
        }

        let (l, p) = (self.config.l(), self.config.p);
        let owner_bit: Vec<usize> = self
            .qubit_owners()
            .into_iter()
            .map(|node| match node.kind {
                NodeKind::Intermediate => node.index - 1,
                NodeKind::Extremal => l + node.index - 1,
            })
            .collect();

        let mut dist = JointDistribution::zeros(l, p);
        for (basis_index, amp) in amplitudes.iter().enumerate() {
            let prob = amp.norm_sqr();
            if prob == 0.0 {
                continue;
            }
            let mut outcome = 0usize;
            for (q, &bit) in owner_bit.iter().enumerate() {
                if basis_index >> (qubits - 1 - q) & 1 == 1 {
                    outcome ^= 1 << bit;
                }
            }
            dist.probs[outcome] += prob;
        }
        Ok(dist)
    }
}

impl Correlations for QuantumNetwork {
    fn shape(&self) -> (usize, usize) {
        (self.config.l(), self.config.p)
    }

    fn correlator(&self, assignment: &SettingAssignment) -> Result<f64> {
        match self.route {
            CorrelatorRoute::Factorized => self.correlator_factorized(assignment),
            CorrelatorRoute::Statevector => self.correlator_statevector(assignment),
            CorrelatorRoute::JointDistribution => Ok(self.joint_distribution(assignment)?.correlator()),
        }
    }
}

/// Applies `gate` to qubit `q` of a `qubits`-qubit state.
fn apply_single_qubit(state: &mut [Complex64], qubits: usize, q: usize, gate: &Matrix2) {
    let stride = 1usize << (qubits - 1 - q);
    for base in 0..state.len() {
        if base & stride != 0 {
            continue;
        }
        let (a0, a1) = (state[base], state[base | stride]);
        state[base] = gate[0][0] * a0 + gate[0][1] * a1;
        state[base | stride] = gate[1][0] * a0 + gate[1][1] * a1;
    }
}

pub fn correlator_factorized(
    config: &NetworkConfig,
    thetas: &[f64],
    plan: &MeasurementPlan,
    assignment: &SettingAssignment,
) -> Result<f64> {
    QuantumNetwork::new(config, thetas, plan.clone())?.correlator_factorized(assignment)
}

pub fn correlator_statevector(
    config: &NetworkConfig,
    thetas: &[f64],
    plan: &MeasurementPlan,
    assignment: &SettingAssignment,
) -> Result<f64> {
    QuantumNetwork::new(config, thetas, plan.clone())?.correlator_statevector(assignment)
}

pub fn joint_distribution(
    config: &NetworkConfig,
    thetas: &[f64],
    plan: &MeasurementPlan,
    assignment: &SettingAssignment,
) -> Result<JointDistribution> {
    QuantumNetwork::new(config, thetas, plan.clone())?.joint_distribution(assignment)
}
