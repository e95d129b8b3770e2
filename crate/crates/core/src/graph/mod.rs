//! Graphs, identifier-labeled input instances and radius-T views.

mod ball;
mod extend;
mod family;

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::{Label, LabelError};

pub use ball::{canonicalize, extract_ball, BallNode, BallView, CanonicalKey};
pub use extend::extend_instance;
pub use family::{count_bound, enumerate_instances, InstanceFamilySpec, Instances};

/// Node identifier. Identifiers of an instance with parameters `(n, c)` lie in
/// `{1, ..., n^c}`.
pub type NodeId = u64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({0}, {1}) appears twice")]
    ParallelEdge(usize, usize),
    #[error("edge ({0}, {1}) references a node outside 0..{2}")]
    NodeOutOfRange(usize, usize, usize),
    #[error("node count must be at least 1")]
    EmptyGraph,
    #[error("identifier exponent c must be at least 1")]
    BadExponent,
    #[error("{n}^{c} overflows 64-bit identifiers")]
    IdRangeOverflow { n: usize, c: u32 },
    #[error("{0} nodes need more than 63 edge-mask bits")]
    TooManyNodes(usize),
    #[error("maximum degree {delta} outside 0..={max}")]
    BadDegreeBound { delta: usize, max: usize },
    #[error("identifier {id} of node {node} outside 1..={max}")]
    IdOutOfRange { node: usize, id: NodeId, max: NodeId },
    #[error("identifier {0} assigned twice")]
    DuplicateId(NodeId),
    #[error("expected {expected} entries for {what}, found {found}")]
    WrongLength {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("node {0} is not in the instance")]
    NoSuchNode(usize),
    #[error("radius-{t} ball around node {node} covers the whole graph")]
    BallCoversGraph { node: usize, t: usize },
    #[error("target size {target} must exceed the node count {n}")]
    TargetTooSmall { target: usize, n: usize },
    #[error("instance graph is not connected")]
    Disconnected,
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("malformed instance dump: {0}")]
    Dump(String),
}

/// A simple undirected graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        let mut norm = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::NodeOutOfRange(a, b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a, b));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::ParallelEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &norm {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { n, edges: norm, adj })
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).expect("clique is simple")
    }

    pub fn star(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (0, i))).expect("star is simple")
    }

    pub fn empty(n: usize) -> Self {
        Graph::new(n, []).expect("empty graph is simple")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Edges as sorted `(min, max)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Breadth-first hop distances from `v`; `None` for unreachable nodes.
    pub fn distances_from(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[v] = Some(0);
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp: Vec<usize> = self
                .distances_from(s)
                .iter()
                .enumerate()
                .filter_map(|(u, d)| d.map(|_| u))
                .collect();
            comp.sort_unstable();
            for &u in &comp {
                seen[u] = true;
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }
}

/// One element `(G, id, λ_in)` of an input family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputInstance {
    graph: Graph,
    ids: Vec<NodeId>,
    inputs: Vec<Label>,
    c: u32,
}

impl InputInstance {
    pub fn new(graph: Graph, ids: Vec<NodeId>, inputs: Vec<Label>, c: u32) -> Result<Self, GraphError> {
        let n = graph.node_count();
        if c == 0 {
            return Err(GraphError::BadExponent);
        }
        for (what, len) in [("ids", ids.len()), ("inputs", inputs.len())] {
            if len != n {
                return Err(GraphError::WrongLength {
                    what,
                    expected: n,
                    found: len,
                });
            }
        }
        let max = id_range(n, c)?;
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateId(w[0]));
        }
        for (node, &id) in ids.iter().enumerate() {
            if id == 0 || id > max {
                return Err(GraphError::IdOutOfRange { node, id, max });
            }
        }
        Ok(InputInstance { graph, ids, inputs, c })
    }

    /// Instance whose node `i` carries identifier `i + 1` and the given input.
    pub fn with_sequential_ids(graph: Graph, input: Label) -> Self {
        let n = graph.node_count();
        InputInstance::new(graph, (1..=n as NodeId).collect(), vec![input; n], 1)
            .expect("sequential identifiers are valid")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, v: usize) -> NodeId {
        self.ids[v]
    }

    pub fn input(&self, v: usize) -> &Label {
        &self.inputs[v]
    }

    pub fn inputs(&self) -> &[Label] {
        &self.inputs
    }

    pub fn node_with_id(&self, id: NodeId) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// Nodes sorted by identifier.
    pub fn nodes_by_id(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = (0..self.node_count()).collect();
        nodes.sort_by_key(|&v| self.ids[v]);
        nodes
    }

    /// Encoding of the identifier-labeled structure, independent of node
    /// indices. Two instances get equal keys iff some renaming of nodes maps
    /// one onto the other preserving edges, identifiers and inputs; a LOCAL
    /// algorithm cannot tell such instances apart.
    pub fn identity_key(&self) -> String {
        let mut nodes: Vec<(NodeId, &Label)> = self.ids.iter().copied().zip(self.inputs.iter()).collect();
        nodes.sort_unstable();
        let mut edges: Vec<(NodeId, NodeId)> = self
            .graph
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (self.ids[a], self.ids[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        let mut key = String::new();
        for (id, input) in nodes {
            let _ = write!(key, "{id}:{input};");
        }
        key.push('|');
        for (a, b) in edges {
            let _ = write!(key, "{a}-{b};");
        }
        key
    }

    /// Disjoint union with `other`; `other`'s nodes are appended after ours.
    /// Identifiers must stay distinct; the result uses the larger `c`.
    pub fn disjoint_union(&self, other: &InputInstance) -> Result<InputInstance, GraphError> {
        let n = self.node_count();
        let edges = self
            .graph
            .edges()
            .iter()
            .copied()
            .chain(other.graph.edges().iter().map(|&(a, b)| (a + n, b + n)));
        let graph = Graph::new(n + other.node_count(), edges)?;
        let ids = self.ids.iter().chain(other.ids.iter()).copied().collect();
        let inputs = self.inputs.iter().chain(other.inputs.iter()).cloned().collect();
        InputInstance::new(graph, ids, inputs, self.c.max(other.c))
    }

    pub fn to_dump(&self) -> InstanceDump {
        InstanceDump {
            n: self.node_count(),
            c: self.c,
            edges: self.graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
            ids: self.ids.iter().copied().enumerate().collect(),
            inputs: self.inputs.iter().cloned().enumerate().collect(),
        }
    }

    pub fn from_dump(d: InstanceDump) -> Result<Self, GraphError> {
        let graph = Graph::new(d.n, d.edges.iter().map(|e| (e[0], e[1])))?;
        let keyed = |len: usize, keys: Vec<usize>, what: &str| -> Result<(), GraphError> {
            if keys != (0..d.n).collect::<Vec<_>>() {
                return Err(GraphError::Dump(format!("{what} must map every node 0..{} (got {len} entries)", d.n)));
            }
            Ok(())
        };
        keyed(d.ids.len(), d.ids.keys().copied().collect(), "ids")?;
        keyed(d.inputs.len(), d.inputs.keys().copied().collect(), "inputs")?;
        InputInstance::new(graph, d.ids.into_values().collect(), d.inputs.into_values().collect(), d.c)
    }

    /// One-line JSON in the instance dump format.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.to_dump()).expect("dump serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, GraphError> {
        let dump: InstanceDump = serde_json::from_str(line).map_err(|e| GraphError::Dump(e.to_string()))?;
        InputInstance::from_dump(dump)
    }
}

/// Serialized instance: `{"n", "c", "edges", "ids", "inputs"}` with nodes
/// indexed `0..n` and edges sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceDump {
    pub n: usize,
    pub c: u32,
    pub edges: Vec<[usize; 2]>,
    pub ids: BTreeMap<usize, NodeId>,
    pub inputs: BTreeMap<usize, Label>,
}

/// Reads an instance dump file: one JSON instance per non-blank line.
pub fn read_instances(text: &str) -> Result<Vec<InputInstance>, GraphError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(InputInstance::from_json_line)
        .collect()
}

/// `n^c` as a 64-bit identifier bound.
pub fn id_range(n: usize, c: u32) -> Result<NodeId, GraphError> {
    (n as u64).checked_pow(c).ok_or(GraphError::IdRangeOverflow { n, c })
}
