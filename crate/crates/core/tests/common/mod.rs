#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lderand::graph::{canonicalize, extract_ball, Graph, InputInstance, NodeId};
use lderand::label::{label, Label};
use lderand::problem::{verify, OutputLabeling, ProblemSpec};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random instance: `n` nodes, each pair an edge with probability `p`,
/// identifiers a random injection into `1..=n^c`.
pub fn random_instance(rng: &mut impl Rng, n: usize, p: f64, c: u32) -> InputInstance {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    with_random_ids(rng, Graph::new(n, edges).unwrap(), c)
}

/// Random connected instance: a random tree plus extra edges.
pub fn random_connected(rng: &mut impl Rng, n: usize, extra: f64) -> InputInstance {
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(extra) {
                edges.insert((a, b));
            }
        }
    }
    with_random_ids(rng, Graph::new(n, edges).unwrap(), 1)
}

/// Sorted `(distance, id, degree, input)` tuples and sorted id pairs.
pub type Projection = (Vec<(usize, NodeId, usize, String)>, Vec<(NodeId, NodeId)>);

pub fn with_random_ids(rng: &mut impl Rng, g: Graph, c: u32) -> InputInstance {
    let n = g.node_count();
    let range = (n as u64).pow(c);
    let mut pool: Vec<NodeId> = (1..=range).collect();
    pool.shuffle(rng);
    pool.truncate(n);
    let inputs = (0..n).map(|_| label(if rng.gen_bool(0.5) { "a" } else { "b" })).collect();
    InputInstance::new(g, pool, inputs, c).unwrap()
}

/// Radius-`t` view by definition: all-pairs distances by relaxation, nodes
/// with `d <= t`, edges with one end at `d <= t - 1` and the other at `d <= t`.
/// Returns sorted `(distance, id, degree, input)` tuples and sorted id pairs.
pub fn ball_by_definition(
    inst: &InputInstance,
    v: usize,
    t: usize,
) -> Projection {
    let n = inst.node_count();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    let edges = inst.graph().edges();
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let degree = |u: usize| edges.iter().filter(|&&(a, b)| a == u || b == u).count();
    let mut nodes: Vec<_> = (0..n)
        .filter(|&u| d[v][u] <= t)
        .map(|u| (d[v][u], inst.id(u), degree(u), inst.input(u).as_str().to_owned()))
        .collect();
    nodes.sort();
    let mut es: Vec<_> = edges
        .iter()
        .filter(|&&(a, b)| {
            let (da, db) = (d[v][a], d[v][b]);
            t >= 1 && ((da < t && db <= t) || (db < t && da <= t))
        })
        .map(|&(a, b)| {
            let (x, y) = (inst.id(a), inst.id(b));
            (x.min(y), x.max(y))
        })
        .collect();
    es.sort();
    (nodes, es)
}

/// The same projection of an extracted view.
pub fn ball_projection(ball: &lderand::BallView) -> Projection {
    let mut nodes: Vec<_> = ball
        .nodes()
        .iter()
        .map(|u| (u.distance, u.id, u.degree, u.input.as_str().to_owned()))
        .collect();
    nodes.sort();
    let mut edges = ball.edges().to_vec();
    edges.sort();
    (nodes, edges)
}

/// Every mapping of realized views to labels, first view most significant.
pub fn naive_first_mapping(problem: &ProblemSpec, fam: &[InputInstance], radius: usize) -> Option<Vec<Label>> {
    let keys: Vec<_> = fam
        .iter()
        .flat_map(|inst| (0..inst.node_count()).map(move |v| canonicalize(&extract_ball(inst, v, radius).unwrap())))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let labels = problem.output_alphabet().labels();
    let k = labels.len();
    (0..k.pow(keys.len() as u32)).find_map(|code| {
        let mut rest = code;
        let mut choice = vec![0; keys.len()];
        for slot in choice.iter_mut().rev() {
            *slot = rest % k;
            rest /= k;
        }
        let map: BTreeMap<_, _> = keys.iter().zip(&choice).collect();
        let ok = fam.iter().all(|inst| {
            let out = (0..inst.node_count())
                .map(|v| labels[*map[&canonicalize(&extract_ball(inst, v, radius).unwrap())]].clone())
                .collect();
            verify(problem, inst, &OutputLabeling::new(out)).unwrap().is_valid()
        });
        ok.then(|| choice.iter().map(|&c| labels[c].clone()).collect())
    })
}
