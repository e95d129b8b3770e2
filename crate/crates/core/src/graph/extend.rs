use super::{extract_ball, id_range, Graph, GraphError, InputInstance, NodeId};
use crate::label::Label;

/// Grows a connected instance to `target_size` nodes without changing the
/// radius-`t` view of node `v`.
///
/// The `target_size - n` fresh nodes form a path. If some node `w` lies at
/// distance at least `t + 1` from `v`, the path hangs off the smallest-id such
/// `w`. Otherwise every node is within distance `t` and some edge joining two
/// distance-`t` nodes is invisible from `v`; the path then subdivides the
/// smallest such edge, which keeps both endpoint degrees. Fresh nodes take the
/// smallest identifiers unused in `{1, ..., target_size^c}` and the input
/// `fill`.
pub fn extend_instance(
    instance: &InputInstance,
    v: usize,
    t: usize,
    target_size: usize,
    fill: &Label,
) -> Result<InputInstance, GraphError> {
    let g = instance.graph();
    let n = g.node_count();
    if v >= n {
        return Err(GraphError::NoSuchNode(v));
    }
    if target_size <= n {
        return Err(GraphError::TargetTooSmall { target: target_size, n });
    }
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    if extract_ball(instance, v, t)?.covers_graph(n) {
        return Err(GraphError::BallCoversGraph { node: v, t });
    }
    let max_id = id_range(target_size, instance.c())?;
    let extra = target_size - n;
    let mut fresh_ids: Vec<NodeId> = Vec::with_capacity(extra);
    let mut cand: NodeId = 1;
    while fresh_ids.len() < extra {
        if !instance.ids().contains(&cand) {
            fresh_ids.push(cand);
        }
        cand += 1;
    }
    debug_assert!(fresh_ids.last().is_some_and(|&x| x <= max_id));

    let dist = g.distances_from(v);
    let far = (0..n)
        .filter(|&u| dist[u].is_some_and(|d| d > t))
        .min_by_key(|&u| instance.id(u));
    let fresh: Vec<usize> = (n..target_size).collect();
    let mut edges: Vec<(usize, usize)> = g.edges().to_vec();
    let mut chain = fresh.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>();
    match far {
        Some(w) => chain.push((w, fresh[0])),
        None => {
            let (a, b) = g
                .edges()
                .iter()
                .copied()
                .filter(|&(a, b)| dist[a] == Some(t) && dist[b] == Some(t))
                .min_by_key(|&(a, b)| {
                    let (x, y) = (instance.id(a), instance.id(b));
                    (x.min(y), x.max(y))
                })
                .expect("an uncovered connected graph has a hidden rim edge");
            edges.retain(|&e| e != (a, b));
            chain.push((a, fresh[0]));
            chain.push((*fresh.last().unwrap(), b));
        }
    }
    edges.extend(chain);
    let graph = Graph::new(target_size, edges)?;
    let ids = instance.ids().iter().copied().chain(fresh_ids).collect();
    let inputs = instance
        .inputs()
        .iter()
        .cloned()
        .chain(std::iter::repeat_n(fill.clone(), extra))
        .collect();
    InputInstance::new(graph, ids, inputs, instance.c())
}
