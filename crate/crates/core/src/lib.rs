//! A desk-scale workbench for the LOCAL model of distributed computing.
//!
//! Exhaustively enumerates small identifier-labeled input families, runs
//! deterministic and randomized node programs round by round, tabulates
//! programs into normal-form tables (radius-T view to output), and turns
//! randomized algorithms into deterministic ones by searching for a valid
//! table directly or by fixing a good random-bit assignment first.

pub mod cli;
pub mod connected;
pub mod derand;
pub mod graph;
pub mod label;
pub mod problem;
pub mod programs;
mod search;
pub mod sim;

pub use graph::{
    canonicalize, count_bound, enumerate_instances, extend_instance, extract_ball, BallNode, BallView, CanonicalKey,
    Graph, GraphError, InputInstance, InstanceFamilySpec, NodeId,
};
pub use label::{label, Alphabet, Label};
pub use problem::{
    brute_force_solve, make_coloring, make_leader_election, make_mis, verify, verify_componentwise, verify_locally,
    OutputLabeling, ProblemSpec, VerificationResult, Witness,
};
pub use sim::{
    fix_randomness, run_deterministic, run_normal_form, run_randomized, tabulate, NodeProgram, NormalFormTable,
    RandomAssignment, RandomizedNodeProgram,
};
