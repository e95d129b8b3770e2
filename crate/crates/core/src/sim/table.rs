//! Normal-form tables: a deterministic T-round algorithm as a map from
//! canonical radius-T views to outputs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_deterministic, NodeInfo, NodeProgram, RunOutcome, SimError, Step};
use crate::graph::{canonicalize, extract_ball, BallNode, BallView, CanonicalKey, InputInstance, NodeId};
use crate::label::{Alphabet, Label};
use crate::problem::OutputLabeling;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormTable {
    radius: usize,
    output_alphabet: Alphabet,
    entries: BTreeMap<CanonicalKey, Label>,
    /// Which pipeline produced the table.
    pub provenance: Option<String>,
}

impl NormalFormTable {
    pub fn new(radius: usize, output_alphabet: Alphabet) -> Self {
        NormalFormTable {
            radius,
            output_alphabet,
            entries: BTreeMap::new(),
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = Some(p.into());
        self
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn output_alphabet(&self) -> &Alphabet {
        &self.output_alphabet
    }

    pub fn entries(&self) -> &BTreeMap<CanonicalKey, Label> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &CanonicalKey) -> Option<&Label> {
        self.entries.get(key)
    }

    pub fn insert(&mut self, key: CanonicalKey, out: Label) -> Result<(), SimError> {
        if !self.output_alphabet.contains(&out) {
            return Err(SimError::MalformedTable(format!("label {out} not in the output alphabet")));
        }
        self.entries.insert(key, out);
        Ok(())
    }

    /// Output of node `v`: the entry for its canonical radius-T view.
    pub fn lookup(&self, instance: &InputInstance, v: usize) -> Result<Label, SimError> {
        let key = canonicalize(&extract_ball(instance, v, self.radius)?);
        self.entries
            .get(&key)
            .cloned()
            .ok_or(SimError::IncompleteTable { key })
    }

    pub fn to_file(&self) -> TableFile {
        TableFile {
            radius: self.radius,
            output_alphabet: self.output_alphabet.clone(),
            entries: self
                .entries
                .iter()
                .map(|(k, v)| TableEntry {
                    key: k.clone(),
                    out: v.clone(),
                })
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn from_file(file: TableFile) -> Result<Self, SimError> {
        let mut table = NormalFormTable::new(file.radius, file.output_alphabet);
        table.provenance = file.provenance;
        for e in file.entries {
            if table.entries.contains_key(&e.key) {
                return Err(SimError::MalformedTable(format!("duplicate key {}", e.key)));
            }
            table.insert(e.key, e.out)?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, SimError> {
        let file: TableFile = serde_json::from_str(s).map_err(|e| SimError::MalformedTable(e.to_string()))?;
        NormalFormTable::from_file(file)
    }

    /// The table as a LOCAL program: gather the radius-T view, then look it up.
    pub fn as_program(&self) -> GatherProgram<impl Fn(&BallView) -> Result<Label, SimError> + Sync + '_> {
        GatherProgram::new(self.radius, self.output_alphabet.clone(), move |ball: &BallView| {
            let key = canonicalize(ball);
            self.entries
                .get(&key)
                .cloned()
                .ok_or(SimError::IncompleteTable { key })
        })
    }
}

/// Table file layout: `{"T", "output_alphabet", "entries": [{"key", "out"}]}`
/// with entries sorted by key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableFile {
    #[serde(rename = "T")]
    pub radius: usize,
    pub output_alphabet: Alphabet,
    pub entries: Vec<TableEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub key: CanonicalKey,
    pub out: Label,
}

/// Runs the table on every node. Costs `T` rounds to gather the views; the
/// lookup itself is local.
pub fn run_normal_form(table: &NormalFormTable, instance: &InputInstance) -> Result<OutputLabeling, SimError> {
    (0..instance.node_count())
        .map(|v| table.lookup(instance, v))
        .collect::<Result<Vec<_>, _>>()
        .map(OutputLabeling::new)
}

/// Two nodes with the same radius-T view but different outputs.
#[derive(Debug, Clone)]
pub struct LocalityWitness {
    pub radius: usize,
    pub key: CanonicalKey,
    pub first: (usize, usize, Label),
    pub second: (usize, usize, Label),
}

/// Records `view -> output` for every node of every instance. Fails if a view
/// maps to two outputs, or if some run took more than `radius` rounds.
pub fn tabulate<P: NodeProgram>(
    program: &P,
    radius: usize,
    family: &[InputInstance],
    claimed_n: &BigUint,
) -> Result<NormalFormTable, SimError> {
    let runs: Vec<Result<RunOutcome, SimError>> = family
        .par_iter()
        .map(|inst| run_deterministic(program, inst, claimed_n))
        .collect();
    let mut table = NormalFormTable::new(radius, program.output_alphabet().clone()).with_provenance("tabulated");
    let mut origin: BTreeMap<CanonicalKey, (usize, usize)> = BTreeMap::new();
    let mut slowest: Option<(usize, usize)> = None;
    for (i, (inst, run)) in family.iter().zip(runs).enumerate() {
        let run = run?;
        if run.rounds > radius && slowest.is_none() {
            slowest = Some((i, run.rounds));
        }
        for v in 0..inst.node_count() {
            let key = canonicalize(&extract_ball(inst, v, radius)?);
            let out = run.outputs.get(v).clone();
            match table.entries.get(&key) {
                Some(prev) if prev != &out => {
                    let (pi, pv) = origin[&key];
                    return Err(SimError::LocalityViolation(Box::new(LocalityWitness {
                        radius,
                        key,
                        first: (pi, pv, prev.clone()),
                        second: (i, v, out),
                    })));
                }
                Some(_) => {}
                None => {
                    origin.insert(key.clone(), (i, v));
                    table.entries.insert(key, out);
                }
            }
        }
    }
    if let Some((instance, rounds)) = slowest {
        return Err(SimError::ExceedsRadius { instance, rounds, radius });
    }
    Ok(table)
}

/// Everything a node has heard about so far.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GatherMsg {
    pub from: NodeId,
    pub nodes: BTreeMap<NodeId, (usize, Label)>,
    pub edges: BTreeSet<(NodeId, NodeId)>,
}

/// Floods for `radius` rounds, rebuilds the radius-`radius` view from what
/// arrived, and halts with `decide(view)`.
///
/// After `r` rounds a node has heard of exactly the nodes within distance `r`
/// and the edges with an endpoint within distance `r - 1`, so the rebuilt view
/// coincides with [`extract_ball`].
pub struct GatherProgram<F> {
    radius: usize,
    alphabet: Alphabet,
    decide: F,
}

impl<F> GatherProgram<F>
where
    F: Fn(&BallView) -> Result<Label, SimError> + Sync,
{
    pub fn new(radius: usize, alphabet: Alphabet, decide: F) -> Self {
        GatherProgram { radius, alphabet, decide }
    }
}

fn rebuild_view(center: NodeId, radius: usize, known: &GatherMsg) -> BallView {
    let mut dist: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([center]);
    dist.insert(center, 0);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        for &(a, b) in &known.edges {
            let w = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(du + 1);
                queue.push_back(w);
            }
        }
    }
    let nodes = known
        .nodes
        .iter()
        .filter_map(|(&id, (degree, input))| {
            let d = *dist.get(&id)?;
            (d <= radius).then(|| BallNode {
                id,
                degree: *degree,
                input: input.clone(),
                distance: d,
            })
        })
        .collect();
    BallView::new(radius, nodes, known.edges.iter().copied())
}

impl<F> NodeProgram for GatherProgram<F>
where
    F: Fn(&BallView) -> Result<Label, SimError> + Sync,
{
    type State = GatherMsg;
    type Msg = GatherMsg;

    fn output_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn round_bound(&self, _: &BigUint) -> usize {
        self.radius
    }

    fn init(&self, node: &NodeInfo<'_>) -> GatherMsg {
        GatherMsg {
            from: node.id,
            nodes: BTreeMap::from([(node.id, (node.degree, node.input.clone()))]),
            edges: BTreeSet::new(),
        }
    }

    fn step(
        &self,
        round: usize,
        node: &NodeInfo<'_>,
        state: &mut GatherMsg,
        inbox: &[GatherMsg],
    ) -> Result<Step<GatherMsg>, SimError> {
        for m in inbox {
            state.nodes.extend(m.nodes.iter().map(|(k, v)| (*k, v.clone())));
            state.edges.extend(m.edges.iter().copied());
            state.edges.insert((node.id.min(m.from), node.id.max(m.from)));
        }
        if round == self.radius {
            let view = rebuild_view(node.id, self.radius, state);
            return (self.decide)(&view).map(Step::Halt);
        }
        Ok(Step::Send(state.clone()))
    }
}
