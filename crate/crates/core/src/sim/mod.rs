//! Round-by-round execution of LOCAL algorithms.
//!
//! Every round, each running node broadcasts one message (messages are
//! unbounded, so per-neighbor messages add nothing), then receives its
//! neighbors' messages ordered by sender identifier. A node halts by emitting
//! its output; halted nodes stop sending. The number of nodes a program is
//! told about (`claimed_n`) is a run parameter, independent of the instance.

mod bits;
mod engine;
mod success;
mod table;

use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::{CanonicalKey, GraphError, NodeId};
use crate::label::{Alphabet, Label};
use crate::problem::ProblemError;

pub use bits::{BitReader, BitStream, BoundedAssignment, RandomAssignment, DEFAULT_BIT_CAP};
pub use engine::{fix_randomness, run_deterministic, run_randomized, run_randomized_capped, BitFree, Fixed, RunOutcome};
pub use success::{compute_success_exact, estimate_success_mc, McEstimate};
pub use table::{
    run_normal_form, tabulate, GatherMsg, GatherProgram, LocalityWitness, NormalFormTable, TableEntry, TableFile,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("claimed node count {claimed} is below the actual {n}")]
    ClaimedTooSmall { claimed: BigUint, n: usize },
    #[error("program did not halt within its bound of {bound} rounds")]
    RoundBudgetExceeded { bound: usize },
    #[error("node {node} output {label:?}, outside the program's alphabet")]
    OutputOutsideAlphabet { node: usize, label: Label },
    #[error("node with id {id} read more than {cap} random bits")]
    BitCapExceeded { id: NodeId, cap: usize },
    #[error("node with id {id} read past its {budget}-bit budget")]
    BitBudgetExceeded { id: NodeId, budget: usize },
    #[error("identifier {0} is outside the random assignment's domain")]
    UnknownIdentifier(NodeId),
    #[error("incomplete table: no entry for {key}")]
    IncompleteTable { key: CanonicalKey },
    #[error("program is not a function of its radius-{} view: {}", .0.radius, .0.key)]
    LocalityViolation(Box<LocalityWitness>),
    #[error("instance {instance} needed {rounds} rounds, more than the table radius {radius}")]
    ExceedsRadius { instance: usize, rounds: usize, radius: usize },
    #[error("{bits} random bits per instance is too many to enumerate")]
    BitSpaceTooLarge { bits: usize },
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("program fault: {0}")]
    Program(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// What a node knows before the first round.
#[derive(Debug, Clone, Copy)]
pub struct NodeInfo<'a> {
    pub id: NodeId,
    pub degree: usize,
    pub input: &'a Label,
    /// The number of nodes the program is told the graph has.
    pub claimed_n: &'a BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step<M> {
    /// Keep running; broadcast this message in the next round.
    Send(M),
    Halt(Label),
}

/// A deterministic LOCAL algorithm.
///
/// `step(0, ..)` runs before any communication; `step(r, ..)` for `r >= 1`
/// sees the messages neighbors sent at step `r - 1`. Halting at step `r`
/// costs `r` rounds.
pub trait NodeProgram: Sync {
    type State: Send;
    type Msg: Clone + Send + Sync;

    fn output_alphabet(&self) -> &Alphabet;

    /// Upper bound on the halting round when told there are `claimed_n` nodes.
    fn round_bound(&self, claimed_n: &BigUint) -> usize;

    fn init(&self, node: &NodeInfo<'_>) -> Self::State;

    fn step(
        &self,
        round: usize,
        node: &NodeInfo<'_>,
        state: &mut Self::State,
        inbox: &[Self::Msg],
    ) -> Result<Step<Self::Msg>, SimError>;
}

/// A randomized LOCAL algorithm: like [`NodeProgram`], plus a private,
/// unbounded bit stream read on demand.
pub trait RandomizedNodeProgram: Sync {
    type State: Send;
    type Msg: Clone + Send + Sync;

    fn output_alphabet(&self) -> &Alphabet;

    fn round_bound(&self, claimed_n: &BigUint) -> usize;

    fn init(&self, node: &NodeInfo<'_>) -> Self::State;

    fn step(
        &self,
        round: usize,
        node: &NodeInfo<'_>,
        state: &mut Self::State,
        inbox: &[Self::Msg],
        bits: &mut BitReader,
    ) -> Result<Step<Self::Msg>, SimError>;
}

/// Saturating conversion for round bounds derived from a claimed size.
pub fn claimed_as_usize(claimed_n: &BigUint) -> usize {
    usize::try_from(claimed_n).unwrap_or(usize::MAX)
}

/// `ceil(log2(claimed_n))`, 0 for `claimed_n <= 1`.
pub fn ceil_log2(claimed_n: &BigUint) -> usize {
    if claimed_n <= &BigUint::from(1u32) {
        return 0;
    }
    let m = claimed_n - 1u32;
    m.bits() as usize
}
