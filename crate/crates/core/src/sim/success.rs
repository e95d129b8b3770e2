//! Failure probabilities of randomized programs: exact by enumerating every
//! bounded bit pattern, or estimated from seeded replays.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_randomized, BitStream, RandomAssignment, RandomizedNodeProgram, SimError};
use crate::graph::InputInstance;
use crate::problem::{verify, ProblemSpec};

/// Largest `b * n` for which exact enumeration is attempted.
pub const MAX_EXACT_BITS: usize = 22;

/// For each instance, the exact fraction of the `2^(b n)` per-node bit
/// patterns on which the program's output is invalid. Reading more than `b`
/// bits at a node is an error.
pub fn compute_success_exact<P: RandomizedNodeProgram>(
    program: &P,
    problem: &ProblemSpec,
    family: &[InputInstance],
    b: usize,
    claimed_n: &BigUint,
) -> Result<Vec<BigRational>, SimError> {
    family
        .par_iter()
        .map(|inst| {
            let n = inst.node_count();
            let total_bits = b * n;
            if total_bits > MAX_EXACT_BITS {
                return Err(SimError::BitSpaceTooLarge { bits: total_bits });
            }
            let mut failures = 0u64;
            for pattern in 0..(1u64 << total_bits) {
                let f = RandomAssignment::Explicit(
                    (0..n)
                        .map(|v| {
                            let bits = (0..b).map(|j| pattern >> (v * b + j) & 1 == 1).collect();
                            (inst.id(v), BitStream::Finite(bits))
                        })
                        .collect(),
                );
                let run = run_randomized(program, inst, claimed_n, &f)?;
                if !verify(problem, inst, &run.outputs)?.is_valid() {
                    failures += 1;
                }
            }
            Ok(BigRational::new(failures.into(), (BigUint::one() << total_bits).into()))
        })
        .collect()
}

/// A Monte-Carlo failure estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub failures: u64,
    pub trials: u64,
    pub estimate: f64,
    pub std_error: f64,
}

/// Runs each instance `trials` times with seeded streams. Trial seeds for
/// instance `i` come from ChaCha8 keyed by `seed` on stream `i`, so the result
/// depends only on `(seed, family order)`.
pub fn estimate_success_mc<P: RandomizedNodeProgram>(
    program: &P,
    problem: &ProblemSpec,
    family: &[InputInstance],
    trials: u64,
    seed: u64,
    claimed_n: &BigUint,
) -> Result<Vec<McEstimate>, SimError> {
    let trials = trials.max(1);
    family
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut failures = 0u64;
            for _ in 0..trials {
                let f = RandomAssignment::Seeded(rng.next_u64());
                let run = run_randomized(program, inst, claimed_n, &f)?;
                if !verify(problem, inst, &run.outputs)?.is_valid() {
                    failures += 1;
                }
            }
            let p = failures as f64 / trials as f64;
            Ok(McEstimate {
                failures,
                trials,
                estimate: p,
                std_error: (p * (1.0 - p) / trials as f64).sqrt(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_instances, Graph, InstanceFamilySpec};
    use crate::label::{label, Alphabet};
    use crate::problem::{make_coloring, make_mis};
    use crate::programs::{FirstBit, GreedyMis, RandomColor};
    use crate::sim::{fix_randomness, run_deterministic, BitFree, BoundedAssignment};
    use num_traits::Zero;

    fn edge() -> Vec<InputInstance> {
        vec![InputInstance::with_sequential_ids(Graph::path(2), label("x"))]
    }

    fn ratio(a: u64, b: u64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn bit_free_correct_program_never_fails() {
        let spec = InstanceFamilySpec::new(3, 1, Alphabet::parse_list(&["x"]).unwrap());
        let fam: Vec<_> = enumerate_instances(&spec).unwrap().collect();
        let claimed = BigUint::from(512u32);
        let p = BitFree(GreedyMis::new());
        let exact = compute_success_exact(&p, &make_mis(), &fam, 0, &claimed).unwrap();
        assert!(exact.iter().all(Zero::is_zero));
        let mc = estimate_success_mc(&p, &make_mis(), &fam, 20, 1, &claimed).unwrap();
        assert!(mc.iter().all(|e| e.failures == 0 && e.estimate == 0.0));
    }

    #[test]
    fn first_bit_edge_fails_half_the_time() {
        let colors = FirstBit::new(make_coloring(2).output_alphabet().clone());
        let exact = compute_success_exact(&colors, &make_coloring(2), &edge(), 1, &BigUint::from(2u32)).unwrap();
        assert_eq!(exact, vec![ratio(1, 2)]);
    }

    #[test]
    fn one_shot_three_coloring_edge() {
        // Two bits mod 3 gives colors with weights 2/4, 1/4, 1/4;
        // monochromatic probability is 4/16 + 1/16 + 1/16.
        let exact = compute_success_exact(&RandomColor::new(3), &make_coloring(3), &edge(), 2, &BigUint::from(2u32)).unwrap();
        assert_eq!(exact, vec![ratio(3, 8)]);
    }

    #[test]
    fn reading_past_budget_is_an_error() {
        let r = compute_success_exact(&RandomColor::new(3), &make_coloring(3), &edge(), 1, &BigUint::from(2u32));
        assert!(matches!(r, Err(SimError::BitBudgetExceeded { budget: 1, .. })));
    }

    #[test]
    fn averaging_fixed_assignments_equals_exact() {
        let spec = InstanceFamilySpec::new(2, 1, Alphabet::parse_list(&["x"]).unwrap());
        let fam: Vec<_> = enumerate_instances(&spec).unwrap().collect();
        let claimed = BigUint::from(16u32);
        let p = FirstBit::new(make_coloring(2).output_alphabet().clone());
        let exact = compute_success_exact(&p, &make_coloring(2), &fam, 1, &claimed).unwrap();
        for (i, inst) in fam.iter().enumerate() {
            let mut bad = 0u64;
            for idx in 0..4u128 {
                let fixed = fix_randomness(&p, BoundedAssignment::from_index(&[1, 2], 1, idx).to_assignment());
                let out = run_deterministic(&fixed, inst, &claimed).unwrap().outputs;
                if !verify(&make_coloring(2), inst, &out).unwrap().is_valid() {
                    bad += 1;
                }
            }
            assert_eq!(exact[i], ratio(bad, 4));
        }
    }

    #[test]
    fn monte_carlo_is_replayable_and_close() {
        let p = FirstBit::new(make_coloring(2).output_alphabet().clone());
        let a = estimate_success_mc(&p, &make_coloring(2), &edge(), 10_000, 7, &BigUint::from(2u32)).unwrap();
        let b = estimate_success_mc(&p, &make_coloring(2), &edge(), 10_000, 7, &BigUint::from(2u32)).unwrap();
        assert_eq!(a, b);
        assert!((a[0].estimate - 0.5).abs() <= 3.0 * a[0].std_error);
    }
}
