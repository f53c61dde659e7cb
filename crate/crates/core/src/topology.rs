//! Acyclic `(n, m, p)` network configurations.
//!
//! A network has `n` independent two-particle sources. Each source feeds
//! exactly two distinct nodes. Intermediate nodes `A1..Al` receive `m`
//! particles each and extremal nodes `B1..Bp` receive one, so that
//! `l * m + p = 2n`.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use petgraph::algo::{connected_components, is_cyclic_undirected};
use petgraph::graph::{NodeIndex, UnGraph};
use serde::{Deserialize, Serialize};

use crate::error::{NetworkError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Intermediate,
    Extremal,
}

/// A network party. Indices start at 1 within each kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NodeId {
    pub kind: NodeKind,
    pub index: usize,
}

impl NodeId {
    pub const fn intermediate(index: usize) -> Self {
        Self { kind: NodeKind::Intermediate, index }
    }

    pub const fn extremal(index: usize) -> Self {
        Self { kind: NodeKind::Extremal, index }
    }

    pub fn is_extremal(&self) -> bool {
        self.kind == NodeKind::Extremal
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NodeKind::Intermediate => write!(f, "A{}", self.index),
            NodeKind::Extremal => write!(f, "B{}", self.index),
        }
    }
}

impl FromStr for NodeId {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || NetworkError::Parse(format!("node name {s:?} is not of the form A<i> or B<j>"));
        let mut chars = s.chars();
        let kind = match chars.next() {
            Some('A') => NodeKind::Intermediate,
            Some('B') => NodeKind::Extremal,
            _ => return Err(bad()),
        };
        let index: usize = chars.as_str().parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        Ok(Self { kind, index })
    }
}

impl TryFrom<String> for NodeId {
    type Error = NetworkError;

    fn try_from(value: String) -> Result<Self> {
        value.parse()
    }
}

impl From<NodeId> for String {
    fn from(value: NodeId) -> Self {
        value.to_string()
    }
}

/// Source index `r`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SourceId(pub usize);

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.0)
    }
}

/// One source and the two nodes receiving its particles. Particle 0 goes to
/// `ends[0]`, particle 1 to `ends[1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: SourceId,
    pub ends: [NodeId; 2],
}

impl Edge {
    pub fn new(source: usize, first: NodeId, second: NodeId) -> Self {
        Self { source: SourceId(source), ends: [first, second] }
    }
}

/// An `(n, m, p)` configuration. Construction does not validate; use
/// [`NetworkConfig::validate`] or one of the `build_*` constructors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub edges: Vec<Edge>,
}

/// Vertex of the bipartite node/source incidence graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    Node(NodeKind),
    Source,
}

impl NetworkConfig {
    pub fn new(n: usize, m: usize, p: usize, edges: Vec<Edge>) -> Self {
        Self { n, m, p, edges }
    }

    /// Builds the configuration and rejects it unless it validates clean.
    pub fn checked(n: usize, m: usize, p: usize, edges: Vec<Edge>) -> Result<Self> {
        let config = Self::new(n, m, p, edges);
        config.ensure_valid()?;
        Ok(config)
    }

    /// `l = (2n - p) / m` when the division is exact.
    pub fn intermediate_count(&self) -> Option<usize> {
        let particles = (2 * self.n).checked_sub(self.p)?;
        (self.m > 0 && particles % self.m == 0).then(|| particles / self.m)
    }

    /// `l`, assuming the configuration is valid.
    pub fn l(&self) -> usize {
        self.intermediate_count().unwrap_or(0)
    }

    pub fn edge(&self, source: SourceId) -> Option<&Edge> {
        self.edges.iter().find(|e| e.source == source)
    }

    pub fn intermediate_nodes(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.l()).map(NodeId::intermediate)
    }

    pub fn extremal_nodes(&self) -> impl Iterator<Item = NodeId> {
        (1..=self.p).map(NodeId::extremal)
    }

    /// Every violated structural invariant, empty iff the configuration is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let (n, m, p) = (self.n, self.m, self.p);

        if n < 2 {
            violations.push(format!("n = {n} must be at least 2"));
        }
        if m < 2 {
            violations.push(format!("m = {m} must be at least 2"));
        }
        if p < 2 {
            violations.push(format!("p = {p} must be at least 2"));
        }
        if p > n {
            violations.push(format!("p = {p} exceeds n = {n}"));
        }
        let l = self.intermediate_count();
        if l.is_none() && p <= 2 * n && m > 0 {
            violations.push(format!("divisibility: 2n - p = {} is not divisible by m = {m}", 2 * n - p));
        }

        if self.edges.len() != n {
            violations.push(format!("expected {n} edges, found {}", self.edges.len()));
        }
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for edge in &self.edges {
            *seen.entry(edge.source.0).or_default() += 1;
            if edge.source.0 == 0 || edge.source.0 > n {
                violations.push(format!("source index {} outside 1..={n}", edge.source.0));
            }
            if edge.ends[0] == edge.ends[1] {
                violations.push(format!("{} sends both particles to {}", edge.source, edge.ends[0]));
            }
            for end in edge.ends {
                let limit = match end.kind {
                    NodeKind::Intermediate => l,
                    NodeKind::Extremal => Some(p),
                };
                if end.index == 0 {
                    violations.push(format!("{} references node index 0", edge.source));
                }
                if let Some(limit) = limit {
                    if end.index > limit {
                        violations.push(format!("{} references {end}, beyond 1..={limit}", edge.source));
                    }
                }
            }
        }
        for (&r, &count) in &seen {
            if count > 1 {
                violations.push(format!("S{r} listed {count} times"));
            }
        }
        for r in 1..=n {
            if !seen.contains_key(&r) {
                violations.push(format!("S{r} has no edge"));
            }
        }

        let mut degree: BTreeMap<NodeId, usize> = BTreeMap::new();
        for edge in &self.edges {
            for end in edge.ends {
                *degree.entry(end).or_default() += 1;
            }
        }
        for j in 1..=p {
            let d = degree.get(&NodeId::extremal(j)).copied().unwrap_or(0);
            if d != 1 {
                violations.push(format!("extremal node B{j} has degree {d}, expected 1"));
            }
        }
        if let Some(l) = l {
            for i in 1..=l {
                let d = degree.get(&NodeId::intermediate(i)).copied().unwrap_or(0);
                if d != m {
                    violations.push(format!("intermediate node A{i} has degree {d}, expected m = {m}"));
                }
            }
        }

        let graph = self.incidence_graph_with(&degree);
        if is_cyclic_undirected(&graph) {
            violations.push("acyclicity: the node/source incidence graph contains a cycle".into());
        }
        if graph.node_count() > 0 && connected_components(&graph) != 1 {
            violations.push("connectivity: the node/source incidence graph is disconnected".into());
        }

        violations
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(NetworkError::InvalidTopology(violations))
        }
    }

    /// Bipartite incidence graph: one vertex per node and per source, one
    /// edge per particle.
    pub fn incidence_graph(&self) -> UnGraph<Vertex, ()> {
        let mut degree: BTreeMap<NodeId, usize> = BTreeMap::new();
        for edge in &self.edges {
            for end in edge.ends {
                *degree.entry(end).or_default() += 1;
            }
        }
        self.incidence_graph_with(&degree)
    }

    fn incidence_graph_with(&self, referenced: &BTreeMap<NodeId, usize>) -> UnGraph<Vertex, ()> {
        let mut graph = UnGraph::new_undirected();
        let mut nodes: BTreeMap<NodeId, NodeIndex> = BTreeMap::new();
        let expected = self.intermediate_nodes().chain(self.extremal_nodes());
        for node in expected.chain(referenced.keys().copied()) {
            nodes.entry(node).or_insert_with(|| graph.add_node(Vertex::Node(node.kind)));
        }
        for edge in &self.edges {
            let s = graph.add_node(Vertex::Source);
            for end in edge.ends {
                graph.add_edge(s, nodes[&end], ());
            }
        }
        graph
    }

    /// The sources reaching each node, sorted by source index.
    pub fn attachments(&self) -> Result<AttachmentMap> {
        self.ensure_valid()?;
        let mut intermediate = vec![Vec::with_capacity(self.m); self.l()];
        let mut extremal = vec![SourceId(0); self.p];
        for edge in &self.edges {
            for end in edge.ends {
                match end.kind {
                    NodeKind::Intermediate => intermediate[end.index - 1].push(edge.source),
                    NodeKind::Extremal => extremal[end.index - 1] = edge.source,
                }
            }
        }
        for list in &mut intermediate {
            list.sort();
        }
        Ok(AttachmentMap { intermediate, extremal })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `Λ_i` for every intermediate node and the single source of every extremal node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttachmentMap {
    /// `intermediate[i - 1]` is `Λ_i`.
    pub intermediate: Vec<Vec<SourceId>>,
    /// `extremal[j - 1]` is the source feeding `B_j`.
    pub extremal: Vec<SourceId>,
}

impl AttachmentMap {
    pub fn lambda(&self, i: usize) -> &[SourceId] {
        &self.intermediate[i - 1]
    }

    /// Position of `source` inside the attachment list of `node`.
    pub fn slot(&self, node: NodeId, source: SourceId) -> Option<usize> {
        match node.kind {
            NodeKind::Intermediate => self.intermediate.get(node.index - 1)?.iter().position(|&s| s == source),
            NodeKind::Extremal => (self.extremal.get(node.index - 1) == Some(&source)).then_some(0),
        }
    }
}

fn require_at_least_two(name: &str, value: usize) -> Result<()> {
    if value < 2 {
        return Err(NetworkError::InvalidParameter(format!("{name} = {value} must be at least 2")));
    }
    Ok(())
}

/// Chain `(n, 2, 2)`: `A_i` joins sources `i` and `i + 1`, `B1` holds source 1
/// and `B2` holds source `n`.
pub fn build_chain(n: usize) -> Result<NetworkConfig> {
    require_at_least_two("n", n)?;
    let node = |r: usize| {
        if r == 0 {
            NodeId::extremal(1)
        } else if r == n {
            NodeId::extremal(2)
        } else {
            NodeId::intermediate(r)
        }
    };
    let edges = (1..=n).map(|r| Edge::new(r, node(r - 1), node(r))).collect();
    NetworkConfig::checked(n, 2, 2, edges)
}

/// Star `(n, n, n)`: one centre `A1`, source `j` feeds `B_j`.
pub fn build_star(n: usize) -> Result<NetworkConfig> {
    require_at_least_two("n", n)?;
    let edges = (1..=n).map(|j| Edge::new(j, NodeId::extremal(j), NodeId::intermediate(1))).collect();
    NetworkConfig::checked(n, n, n, edges)
}

/// Layered tree `(n, m, n - (n - m)/(m - 1))`, filled breadth-first from a
/// root `A1`. Every further intermediate node takes one pending source from
/// the layer above and opens `m - 1` fresh ones; sources still pending at the
/// end terminate in extremal nodes.
///
/// Leaf sources are numbered `1..=p` in the order of their extremal nodes and
/// the internal source feeding `A_{t+1}` is numbered `p + t`.
pub fn build_tree(n: usize, m: usize) -> Result<NetworkConfig> {
    require_at_least_two("m", m)?;
    if n < m {
        return Err(NetworkError::InvalidParameter(format!("tree needs n >= m, got n = {n}, m = {m}")));
    }
    if !(n - m).is_multiple_of(m - 1) {
        return Err(NetworkError::InvalidParameter(format!(
            "divisibility: (n - m) = {} is not divisible by (m - 1) = {}",
            n - m,
            m - 1
        )));
    }
    let internal = (n - m) / (m - 1);
    let l = internal + 1;
    let p = n - internal;

    // Provisional sources in creation order, recording the node that opened each.
    let mut opened_by: Vec<NodeId> = Vec::with_capacity(n);
    let mut closed_by: Vec<Option<NodeId>> = vec![None; n];
    let mut pending = VecDeque::new();
    let mut open = |node: NodeId, count: usize, pending: &mut VecDeque<usize>| {
        for _ in 0..count {
            pending.push_back(opened_by.len());
            opened_by.push(node);
        }
    };
    open(NodeId::intermediate(1), m, &mut pending);
    let mut internal_order = Vec::with_capacity(internal);
    for t in 2..=l {
        let parent = pending.pop_front().expect("tree arithmetic guarantees a pending source");
        let child = NodeId::intermediate(t);
        closed_by[parent] = Some(child);
        internal_order.push(parent);
        open(child, m - 1, &mut pending);
    }
    let mut leaf_order = Vec::with_capacity(p);
    for (j, source) in pending.into_iter().enumerate() {
        closed_by[source] = Some(NodeId::extremal(j + 1));
        leaf_order.push(source);
    }

    let edges = leaf_order
        .into_iter()
        .chain(internal_order)
        .enumerate()
        .map(|(k, prov)| Edge::new(k + 1, opened_by[prov], closed_by[prov].expect("every source is closed")))
        .collect();
    NetworkConfig::checked(n, m, p, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(list: &[SourceId]) -> Vec<usize> {
        list.iter().map(|s| s.0).collect()
    }

    #[test]
    fn bilocal_chain_edges() {
        let c = build_chain(2).unwrap();
        assert_eq!((c.n, c.m, c.p, c.l()), (2, 2, 2, 1));
        assert_eq!(c.edges[0], Edge::new(1, NodeId::extremal(1), NodeId::intermediate(1)));
        assert_eq!(c.edges[1], Edge::new(2, NodeId::intermediate(1), NodeId::extremal(2)));
    }

    #[test]
    fn chain_counts_and_errors() {
        assert_eq!(build_chain(3).unwrap().l(), 2);
        assert!(matches!(build_chain(1), Err(NetworkError::InvalidParameter(_))));
        assert!(matches!(build_star(1), Err(NetworkError::InvalidParameter(_))));
    }

    #[test]
    fn star_counts() {
        let s4 = build_star(4).unwrap();
        assert_eq!((s4.l(), s4.m, s4.p), (1, 4, 4));
        let s3 = build_star(3).unwrap();
        assert_eq!((s3.n, s3.m, s3.p, s3.l()), (3, 3, 3, 1));
    }

    #[test]
    fn tree_counts() {
        let t = build_tree(15, 3).unwrap();
        assert_eq!((t.p, t.l()), (9, 7));
        let t = build_tree(5, 3).unwrap();
        assert_eq!((t.p, t.l()), (4, 2));
        let t = build_tree(4, 4).unwrap();
        assert_eq!((t.p, t.l()), (4, 1));
        assert!(build_tree(6, 3).is_err());
        assert!(build_tree(2, 3).is_err());
        assert!(build_tree(5, 1).is_err());
    }

    #[test]
    fn tree_leaf_sources_come_first() {
        let t = build_tree(5, 3).unwrap();
        let att = t.attachments().unwrap();
        assert_eq!(ids(&att.extremal), vec![1, 2, 3, 4]);
        // A1 is the root, A2 hangs off internal source 5.
        assert!(att.lambda(1).contains(&SourceId(5)));
        assert!(att.lambda(2).contains(&SourceId(5)));
    }

    #[test]
    fn attachments_chain_and_star() {
        let att = build_chain(3).unwrap().attachments().unwrap();
        assert_eq!(ids(att.lambda(1)), vec![1, 2]);
        assert_eq!(ids(att.lambda(2)), vec![2, 3]);
        assert_eq!(ids(&att.extremal), vec![1, 3]);

        let att = build_star(3).unwrap().attachments().unwrap();
        assert_eq!(ids(att.lambda(1)), vec![1, 2, 3]);
        assert_eq!(att.slot(NodeId::intermediate(1), SourceId(3)), Some(2));
        assert_eq!(att.slot(NodeId::extremal(2), SourceId(2)), Some(0));
        assert_eq!(att.slot(NodeId::extremal(2), SourceId(1)), None);
    }

    #[test]
    fn divisibility_violation() {
        let edges = vec![
            Edge::new(1, NodeId::extremal(1), NodeId::intermediate(1)),
            Edge::new(2, NodeId::intermediate(1), NodeId::intermediate(2)),
            Edge::new(3, NodeId::intermediate(1), NodeId::intermediate(2)),
            Edge::new(4, NodeId::intermediate(2), NodeId::intermediate(3)),
            Edge::new(5, NodeId::intermediate(3), NodeId::extremal(2)),
        ];
        let v = NetworkConfig::new(5, 3, 2, edges).validate();
        assert!(v.iter().any(|s| s.starts_with("divisibility")), "{v:?}");
    }

    #[test]
    fn four_cycle_violation() {
        // A1 and A2 share two sources; each also has one extremal leg.
        let edges = vec![
            Edge::new(1, NodeId::extremal(1), NodeId::intermediate(1)),
            Edge::new(2, NodeId::extremal(2), NodeId::intermediate(2)),
            Edge::new(3, NodeId::intermediate(1), NodeId::intermediate(2)),
            Edge::new(4, NodeId::intermediate(1), NodeId::intermediate(2)),
        ];
        let config = NetworkConfig::new(4, 3, 2, edges);
        let v = config.validate();
        assert!(v.iter().any(|s| s.starts_with("acyclicity")), "{v:?}");
        assert!(matches!(config.attachments(), Err(NetworkError::InvalidTopology(_))));
    }

    #[test]
    fn disconnected_violation() {
        // Two bilocal chains glued into one (4,2,4) description.
        let edges = vec![
            Edge::new(1, NodeId::extremal(1), NodeId::intermediate(1)),
            Edge::new(2, NodeId::intermediate(1), NodeId::extremal(2)),
            Edge::new(3, NodeId::extremal(3), NodeId::intermediate(2)),
            Edge::new(4, NodeId::intermediate(2), NodeId::extremal(4)),
        ];
        let v = NetworkConfig::new(4, 2, 4, edges).validate();
        assert_eq!(v, vec!["connectivity: the node/source incidence graph is disconnected".to_string()]);
    }

    #[test]
    fn degree_and_index_violations() {
        let edges = vec![
            Edge::new(1, NodeId::extremal(1), NodeId::intermediate(1)),
            Edge::new(1, NodeId::extremal(1), NodeId::extremal(3)),
        ];
        let v = NetworkConfig::new(2, 2, 2, edges).validate();
        assert!(v.iter().any(|s| s.contains("listed 2 times")));
        assert!(v.iter().any(|s| s.contains("S2 has no edge")));
        assert!(v.iter().any(|s| s.contains("B1 has degree 2")));
        assert!(v.iter().any(|s| s.contains("references B3")));
    }

    #[test]
    fn small_parameter_violations() {
        let v = NetworkConfig::new(1, 1, 1, vec![]).validate();
        assert!(v.iter().any(|s| s.starts_with("n = 1")));
        assert!(v.iter().any(|s| s.starts_with("m = 1")));
        assert!(v.iter().any(|s| s.starts_with("p = 1")));
        let v = NetworkConfig::new(2, 2, 3, vec![]).validate();
        assert!(v.iter().any(|s| s.contains("exceeds n")));
    }

    #[test]
    fn node_names() {
        assert_eq!("A12".parse::<NodeId>().unwrap(), NodeId::intermediate(12));
        assert_eq!(NodeId::extremal(3).to_string(), "B3");
        assert!("C1".parse::<NodeId>().is_err());
        assert!("A0".parse::<NodeId>().is_err());
        assert!("B".parse::<NodeId>().is_err());
    }

    #[test]
    fn json_layout_is_stable() {
        let json = serde_json::to_string(&build_chain(2).unwrap()).unwrap();
        assert_eq!(
            json,
            r#"{"n":2,"m":2,"p":2,"edges":[{"source":1,"ends":["B1","A1"]},{"source":2,"ends":["A1","B2"]}]}"#
        );
        assert!(NetworkConfig::from_json(r#"{"n":2,"m":2,"p":2,"edges":[{"source":1,"ends":["X1","A1"]}]}"#).is_err());
    }
}
