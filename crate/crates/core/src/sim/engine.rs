use num_bigint::BigUint;

use super::{BitReader, NodeInfo, NodeProgram, RandomAssignment, RandomizedNodeProgram, SimError, Step, DEFAULT_BIT_CAP};
use crate::graph::InputInstance;
use crate::label::{Alphabet, Label};
use crate::problem::OutputLabeling;

/// Result of one synchronous execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub outputs: OutputLabeling,
    /// Largest halting round.
    pub rounds: usize,
    pub halted_at: Vec<usize>,
    /// `trace[r - 1][v]`: messages node `v` received in round `r`.
    pub trace: Vec<Vec<usize>>,
}

fn execute<M: Clone>(
    instance: &InputInstance,
    claimed_n: &BigUint,
    bound: usize,
    alphabet: &Alphabet,
    mut step: impl FnMut(usize, usize, &NodeInfo<'_>, &[M]) -> Result<Step<M>, SimError>,
) -> Result<RunOutcome, SimError> {
    let n = instance.node_count();
    if claimed_n < &BigUint::from(n) {
        return Err(SimError::ClaimedTooSmall {
            claimed: claimed_n.clone(),
            n,
        });
    }
    let g = instance.graph();
    let infos: Vec<NodeInfo<'_>> = (0..n)
        .map(|v| NodeInfo {
            id: instance.id(v),
            degree: g.degree(v),
            input: instance.input(v),
            claimed_n,
        })
        .collect();
    let senders: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut nb = g.neighbors(v).to_vec();
            nb.sort_by_key(|&u| instance.id(u));
            nb
        })
        .collect();
    let mut outputs: Vec<Option<Label>> = vec![None; n];
    let mut halted_at = vec![0; n];
    let mut outgoing: Vec<Option<M>> = vec![None; n];
    let mut trace = Vec::new();
    for round in 0..=bound {
        let mut next: Vec<Option<M>> = vec![None; n];
        let mut received = vec![0; n];
        for v in 0..n {
            if outputs[v].is_some() {
                continue;
            }
            let inbox: Vec<M> = senders[v].iter().filter_map(|&u| outgoing[u].clone()).collect();
            received[v] = inbox.len();
            match step(v, round, &infos[v], &inbox)? {
                Step::Send(m) => next[v] = Some(m),
                Step::Halt(label) => {
                    if !alphabet.contains(&label) {
                        return Err(SimError::OutputOutsideAlphabet { node: v, label });
                    }
                    outputs[v] = Some(label);
                    halted_at[v] = round;
                }
            }
        }
        if round > 0 {
            trace.push(received);
        }
        outgoing = next;
        if outputs.iter().all(Option::is_some) {
            return Ok(RunOutcome {
                outputs: OutputLabeling::new(outputs.into_iter().map(Option::unwrap).collect()),
                rounds: halted_at.iter().copied().max().unwrap_or(0),
                halted_at,
                trace,
            });
        }
    }
    Err(SimError::RoundBudgetExceeded { bound })
}

/// Runs `program` on `instance`, telling every node the graph has
/// `claimed_n` nodes.
pub fn run_deterministic<P: NodeProgram>(
    program: &P,
    instance: &InputInstance,
    claimed_n: &BigUint,
) -> Result<RunOutcome, SimError> {
    let bound = program.round_bound(claimed_n);
    let mut states: Vec<Option<P::State>> = (0..instance.node_count()).map(|_| None).collect();
    execute(instance, claimed_n, bound, program.output_alphabet(), |v, round, info, inbox| {
        let state = states[v].get_or_insert_with(|| program.init(info));
        program.step(round, info, state, inbox)
    })
}

/// Runs a randomized program with node `v` reading `streams(id(v))`, capped at
/// [`DEFAULT_BIT_CAP`] bits per node.
pub fn run_randomized<P: RandomizedNodeProgram>(
    program: &P,
    instance: &InputInstance,
    claimed_n: &BigUint,
    streams: &RandomAssignment,
) -> Result<RunOutcome, SimError> {
    run_randomized_capped(program, instance, claimed_n, streams, DEFAULT_BIT_CAP)
}

pub fn run_randomized_capped<P: RandomizedNodeProgram>(
    program: &P,
    instance: &InputInstance,
    claimed_n: &BigUint,
    streams: &RandomAssignment,
    cap: usize,
) -> Result<RunOutcome, SimError> {
    let bound = program.round_bound(claimed_n);
    let mut readers = (0..instance.node_count())
        .map(|v| {
            let id = instance.id(v);
            streams.stream_for(id).map(|s| BitReader::new(id, s, cap))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut states: Vec<Option<P::State>> = (0..instance.node_count()).map(|_| None).collect();
    execute(instance, claimed_n, bound, program.output_alphabet(), |v, round, info, inbox| {
        let state = states[v].get_or_insert_with(|| program.init(info));
        program.step(round, info, state, inbox, &mut readers[v])
    })
}

/// `A_rand[f]`: the deterministic program in which every node reads
/// `f(id(v))` as its random bits.
pub struct Fixed<'p, P> {
    program: &'p P,
    assignment: RandomAssignment,
    cap: usize,
}

pub fn fix_randomness<P: RandomizedNodeProgram>(program: &P, f: RandomAssignment) -> Fixed<'_, P> {
    Fixed {
        program,
        assignment: f,
        cap: DEFAULT_BIT_CAP,
    }
}

impl<P: RandomizedNodeProgram> NodeProgram for Fixed<'_, P> {
    type State = (P::State, Option<BitReader>);
    type Msg = P::Msg;

    fn output_alphabet(&self) -> &Alphabet {
        self.program.output_alphabet()
    }

    fn round_bound(&self, claimed_n: &BigUint) -> usize {
        self.program.round_bound(claimed_n)
    }

    fn init(&self, node: &NodeInfo<'_>) -> Self::State {
        (self.program.init(node), None)
    }

    fn step(
        &self,
        round: usize,
        node: &NodeInfo<'_>,
        state: &mut Self::State,
        inbox: &[P::Msg],
    ) -> Result<Step<P::Msg>, SimError> {
        if state.1.is_none() {
            let stream = self.assignment.stream_for(node.id)?;
            state.1 = Some(BitReader::new(node.id, stream, self.cap));
        }
        let (inner, reader) = state;
        self.program.step(round, node, inner, inbox, reader.as_mut().unwrap())
    }
}

/// Views a deterministic program as a randomized one that never reads bits.
pub struct BitFree<P>(pub P);

impl<P: NodeProgram> RandomizedNodeProgram for BitFree<P> {
    type State = P::State;
    type Msg = P::Msg;

    fn output_alphabet(&self) -> &Alphabet {
        self.0.output_alphabet()
    }

    fn round_bound(&self, claimed_n: &BigUint) -> usize {
        self.0.round_bound(claimed_n)
    }

    fn init(&self, node: &NodeInfo<'_>) -> P::State {
        self.0.init(node)
    }

    fn step(
        &self,
        round: usize,
        node: &NodeInfo<'_>,
        state: &mut P::State,
        inbox: &[P::Msg],
        _bits: &mut BitReader,
    ) -> Result<Step<P::Msg>, SimError> {
        self.0.step(round, node, state, inbox)
    }
}
