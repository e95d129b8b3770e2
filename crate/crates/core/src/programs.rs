//! Small node programs used by tests, the CLI and the examples.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::graph::NodeId;
use crate::label::{label, Alphabet, Label};
use crate::problem::make_coloring;
use crate::sim::{
    ceil_log2, claimed_as_usize, BitReader, NodeInfo, NodeProgram, RandomizedNodeProgram, SimError, Step,
};

fn numeric_alphabet(max: usize) -> Alphabet {
    Alphabet::new((0..=max).map(|i| Label::new(i.to_string()).unwrap()).collect()).unwrap()
}

/// Outputs `odd` or `even` by its own identifier, in zero rounds.
pub struct IdParity {
    alphabet: Alphabet,
}

impl IdParity {
    pub fn new() -> Self {
        IdParity {
            alphabet: Alphabet::parse_list(&["odd", "even"]).unwrap(),
        }
    }
}

impl Default for IdParity {
    fn default() -> Self {
        Self::new()
    }
}

impl NodeProgram for IdParity {
    type State = ();
    type Msg = ();

    fn output_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn round_bound(&self, _: &BigUint) -> usize {
        0
    }

    fn init(&self, _: &NodeInfo<'_>) {}

    fn step(&self, _: usize, node: &NodeInfo<'_>, _: &mut (), _: &[()]) -> Result<Step<()>, SimError> {
        Ok(Step::Halt(label(if node.id % 2 == 1 { "odd" } else { "even" })))
    }
}

/// Outputs its own degree (as a decimal label) in zero rounds.
pub struct OwnDegree {
    alphabet: Alphabet,
}

impl OwnDegree {
    /// Alphabet `0..=max_degree`.
    pub fn new(max_degree: usize) -> Self {
        OwnDegree {
            alphabet: numeric_alphabet(max_degree),
        }
    }
}

impl NodeProgram for OwnDegree {
    type State = ();
    type Msg = ();

    fn output_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn round_bound(&self, _: &BigUint) -> usize {
        0
    }

    fn init(&self, _: &NodeInfo<'_>) {}

    fn step(&self, _: usize, node: &NodeInfo<'_>, _: &mut (), _: &[()]) -> Result<Step<()>, SimError> {
        self.alphabet
            .get(node.degree)
            .cloned()
            .map(Step::Halt)
            .ok_or_else(|| SimError::Program(format!("degree {} above the alphabet", node.degree)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MisStatus {
    Undecided,
    In,
    Out,
}

#[derive(Debug, Default)]
pub struct GreedyState {
    status: Option<MisStatus>,
    announced: bool,
    neighbors: BTreeMap<NodeId, MisStatus>,
}

/// Deterministic greedy MIS: a node joins once every undecided neighbor has a
/// larger identifier, and drops out once a neighbor joins. Each decision is
/// announced for one round before halting.
pub struct GreedyMis {
    alphabet: Alphabet,
}

impl GreedyMis {
    pub fn new() -> Self {
        GreedyMis {
            alphabet: Alphabet::parse_list(&["IN", "OUT"]).unwrap(),
        }
    }
}

impl Default for GreedyMis {
    fn default() -> Self {
        Self::new()
    }
}

impl NodeProgram for GreedyMis {
    type State = GreedyState;
    type Msg = (NodeId, MisStatus);

    fn output_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn round_bound(&self, claimed_n: &BigUint) -> usize {
        claimed_as_usize(claimed_n).saturating_mul(2).saturating_add(2)
    }

    fn init(&self, _: &NodeInfo<'_>) -> GreedyState {
        GreedyState::default()
    }

    fn step(
        &self,
        round: usize,
        node: &NodeInfo<'_>,
        state: &mut GreedyState,
        inbox: &[(NodeId, MisStatus)],
    ) -> Result<Step<Self::Msg>, SimError> {
        if state.announced {
            let out = if state.status == Some(MisStatus::In) { "IN" } else { "OUT" };
            return Ok(Step::Halt(label(out)));
        }
        state.neighbors.extend(inbox.iter().copied());
        if round > 0 {
            let any_in = state.neighbors.values().any(|&s| s == MisStatus::In);
            let smallest = state
                .neighbors
                .iter()
                .filter(|(_, &s)| s == MisStatus::Undecided)
                .all(|(&id, _)| id > node.id);
            if any_in {
                state.status = Some(MisStatus::Out);
            } else if smallest {
                state.status = Some(MisStatus::In);
            }
        }
        match state.status {
            Some(s) => {
                state.announced = true;
                Ok(Step::Send((node.id, s)))
            }
            None => Ok(Step::Send((node.id, MisStatus::Undecided))),
        }
    }
}

/// Reads one bit and outputs the alphabet's label at that index.
pub struct FirstBit {
    alphabet: Alphabet,
}

impl FirstBit {
    pub fn new(alphabet: Alphabet) -> Self {
        assert!(alphabet.len() >= 2, "needs two labels");
        FirstBit { alphabet }
    }

    /// Outputs `0` or `1`.
    pub fn binary() -> Self {
        FirstBit::new(Alphabet::parse_list(&["0", "1"]).unwrap())
    }
}

impl RandomizedNodeProgram for FirstBit {
    type State = ();
    type Msg = ();

    fn output_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn round_bound(&self, _: &BigUint) -> usize {
        0
    }

    fn init(&self, _: &NodeInfo<'_>) {}

    fn step(&self, _: usize, _: &NodeInfo<'_>, _: &mut (), _: &[()], bits: &mut BitReader) -> Result<Step<()>, SimError> {
        let b = bits.next_bit()? as usize;
        Ok(Step::Halt(self.alphabet.labels()[b].clone()))
    }
}

/// Zero-round random `k`-coloring: reads `ceil(log2 k)` bits and outputs
/// color `value mod k`.
pub struct RandomColor {
    k: usize,
    alphabet: Alphabet,
}

impl RandomColor {
    pub fn new(k: usize) -> Self {
        RandomColor {
            k,
            alphabet: make_coloring(k).output_alphabet().clone(),
        }
    }

    pub fn bits_per_node(&self) -> usize {
        ceil_log2(&BigUint::from(self.k))
    }
}

impl RandomizedNodeProgram for RandomColor {
    type State = ();
    type Msg = ();

    fn output_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn round_bound(&self, _: &BigUint) -> usize {
        0
    }

    fn init(&self, _: &NodeInfo<'_>) {}

    fn step(&self, _: usize, _: &NodeInfo<'_>, _: &mut (), _: &[()], bits: &mut BitReader) -> Result<Step<()>, SimError> {
        let x = bits.next_bits(self.bits_per_node())? as usize;
        Ok(Step::Halt(self.alphabet.labels()[x % self.k].clone()))
    }
}

/// Counts leading 1-bits until the first 0 and outputs `min(count, cap)`.
/// The number of bits read is unbounded.
pub struct GeometricCount {
    cap: usize,
    alphabet: Alphabet,
}

impl GeometricCount {
    pub fn new(cap: usize) -> Self {
        GeometricCount {
            cap,
            alphabet: numeric_alphabet(cap),
        }
    }
}

impl RandomizedNodeProgram for GeometricCount {
    type State = ();
    type Msg = ();

    fn output_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn round_bound(&self, _: &BigUint) -> usize {
        0
    }

    fn init(&self, _: &NodeInfo<'_>) {}

    fn step(&self, _: usize, _: &NodeInfo<'_>, _: &mut (), _: &[()], bits: &mut BitReader) -> Result<Step<()>, SimError> {
        let mut count = 0usize;
        while bits.next_bit()? {
            count += 1;
        }
        Ok(Step::Halt(self.alphabet.labels()[count.min(self.cap)].clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LubyMsg {
    Priority(u64),
    Joined,
    Alive,
}

#[derive(Debug, Default)]
pub struct LubyState {
    priority: u64,
    joined: bool,
}

/// Luby-style randomized MIS in two-round phases: undecided nodes draw a
/// priority, a node joins if `(priority, id)` beats every undecided
/// neighbor, and neighbors of joiners drop out. Runs `ceil(log2 N) + 1`
/// phases for claimed size `N`; nodes still undecided after that output `OUT`,
/// which is where the algorithm can fail.
pub struct LubyMis {
    priority_bits: usize,
    alphabet: Alphabet,
}

impl LubyMis {
    pub fn new(priority_bits: usize) -> Self {
        assert!(priority_bits <= 64);
        LubyMis {
            priority_bits,
            alphabet: Alphabet::parse_list(&["IN", "OUT"]).unwrap(),
        }
    }

    pub fn phases(claimed_n: &BigUint) -> usize {
        ceil_log2(claimed_n) + 1
    }
}

impl RandomizedNodeProgram for LubyMis {
    type State = LubyState;
    type Msg = (NodeId, LubyMsg);

    fn output_alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn round_bound(&self, claimed_n: &BigUint) -> usize {
        2 * Self::phases(claimed_n)
    }

    fn init(&self, _: &NodeInfo<'_>) -> LubyState {
        LubyState::default()
    }

    fn step(
        &self,
        round: usize,
        node: &NodeInfo<'_>,
        state: &mut LubyState,
        inbox: &[(NodeId, LubyMsg)],
        bits: &mut BitReader,
    ) -> Result<Step<Self::Msg>, SimError> {
        if round.is_multiple_of(2) {
            if state.joined {
                return Ok(Step::Halt(label("IN")));
            }
            if inbox.iter().any(|(_, m)| *m == LubyMsg::Joined) {
                return Ok(Step::Halt(label("OUT")));
            }
            if round / 2 == Self::phases(node.claimed_n) {
                return Ok(Step::Halt(label("OUT")));
            }
            state.priority = bits.next_bits(self.priority_bits)?;
            return Ok(Step::Send((node.id, LubyMsg::Priority(state.priority))));
        }
        let mine = (state.priority, node.id);
        let wins = inbox.iter().all(|(id, m)| match m {
            LubyMsg::Priority(p) => mine < (*p, *id),
            _ => true,
        });
        if wins {
            state.joined = true;
            Ok(Step::Send((node.id, LubyMsg::Joined)))
        } else {
            Ok(Step::Send((node.id, LubyMsg::Alive)))
        }
    }
}
