use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::{GraphError, InputInstance, NodeId};
use crate::label::Label;

/// A node as seen from inside a ball.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BallNode {
    pub id: NodeId,
    /// Degree in the originating graph, not within the view.
    pub degree: usize,
    pub input: Label,
    pub distance: usize,
}

/// The radius-T view `N_T[v]`: nodes within distance T of the center, and the
/// edges `{s, t}` with `d(v, s) <= T - 1` and `d(v, t) <= T`.
///
/// Edges are stored by identifier as `(min, max)` pairs; node storage order is
/// arbitrary and does not affect [`canonicalize`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallView {
    radius: usize,
    nodes: Vec<BallNode>,
    edges: Vec<(NodeId, NodeId)>,
}

impl BallView {
    pub fn new(radius: usize, nodes: Vec<BallNode>, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let edges = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        BallView { radius, nodes, edges }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn nodes(&self) -> &[BallNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn center(&self) -> &BallNode {
        self.nodes
            .iter()
            .find(|u| u.distance == 0)
            .expect("ball has a center")
    }

    pub fn position(&self, id: NodeId) -> Option<usize> {
        self.nodes.iter().position(|u| u.id == id)
    }

    /// Identifiers adjacent to `id` within the view.
    pub fn neighbors_of(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == id {
                Some(b)
            } else if b == id {
                Some(a)
            } else {
                None
            }
        })
    }

    /// True when the view is the entire `n`-node graph. Decidable from the
    /// view alone: all `n` nodes are present and the recorded original
    /// degrees account for every edge in the view.
    pub fn covers_graph(&self, n: usize) -> bool {
        let degree_sum: usize = self.nodes.iter().map(|u| u.degree).sum();
        self.nodes.len() == n && degree_sum == 2 * self.edges.len()
    }
}

/// Canonical text encoding of a [`BallView`], used as the normal-form table
/// key. Layout: `T<radius>|<dist>:<id>:<deg>:<input>;...|<a>-<b>;...` with
/// nodes sorted by `(distance, id)` and edges by `(min id, max id)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Wraps an existing key string (e.g. read back from a table file).
    pub fn from_raw(s: impl Into<String>) -> Self {
        CanonicalKey(s.into())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn extract_ball(instance: &InputInstance, v: usize, radius: usize) -> Result<BallView, GraphError> {
    let g = instance.graph();
    if v >= g.node_count() {
        return Err(GraphError::NoSuchNode(v));
    }
    let dist = g.distances_from(v);
    let within = |u: usize, r: usize| dist[u].is_some_and(|d| d <= r);
    let nodes = (0..g.node_count())
        .filter(|&u| within(u, radius))
        .map(|u| BallNode {
            id: instance.id(u),
            degree: g.degree(u),
            input: instance.input(u).clone(),
            distance: dist[u].unwrap(),
        })
        .collect();
    let edges = match radius.checked_sub(1) {
        None => Vec::new(),
        Some(inner) => g
            .edges()
            .iter()
            .filter(|&&(a, b)| (within(a, inner) && within(b, radius)) || (within(b, inner) && within(a, radius)))
            .map(|&(a, b)| (instance.id(a), instance.id(b)))
            .collect(),
    };
    Ok(BallView::new(radius, nodes, edges))
}

pub fn canonicalize(ball: &BallView) -> CanonicalKey {
    let mut nodes: Vec<&BallNode> = ball.nodes.iter().collect();
    nodes.sort_by_key(|u| (u.distance, u.id));
    let mut edges = ball.edges.clone();
    edges.sort_unstable();
    let mut s = format!("T{}|", ball.radius);
    for u in nodes {
        let _ = write!(s, "{}:{}:{}:{};", u.distance, u.id, u.degree, u.input);
    }
    s.push('|');
    for (a, b) in edges {
        let _ = write!(s, "{a}-{b};");
    }
    CanonicalKey(s)
}
