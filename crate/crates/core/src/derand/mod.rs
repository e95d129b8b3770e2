//! Deterministic algorithms from randomized ones, two ways: find a good
//! random-bit assignment and tabulate the fixed program, or search the
//! normal-form tables directly in lexicographic order.

mod good_f;
mod normal_form;
mod report;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, InputInstance};
use crate::problem::ProblemError;
use crate::sim::SimError;

pub use good_f::{census_good_f, derandomize_via_f, search_good_f, GoodFSearch};
pub use normal_form::{find_normal_form, FamilySource, NormalFormOutcome, SearchConfig, SearchStats, UnsatWitness};
pub use report::{derandomize, DerandConfig, DerandReport, RandTime, Verdict};

#[derive(Debug, Error)]
pub enum DerandError {
    #[error("search space of {space} candidates exceeds the budget of {budget}")]
    SpaceTooLarge { space: String, budget: u64 },
    #[error("assignment is not good: the fixed program fails on instance {instance}")]
    BadAssignment { instance: usize, dump: String },
    #[error("table fails verification on instance {instance}")]
    TableInvalid { instance: usize, dump: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// Decimal-string serde for big integers.
pub(crate) mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `p/q` string serde for rationals, one value or a list.
pub(crate) mod fraction {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }

    pub mod list {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| s.parse().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// The claimed size `2^(n^2)` next to the family-size bound, with both
/// inequalities the constructions need checked explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimedSize {
    pub n: usize,
    pub c: u32,
    pub input_alphabet_size: usize,
    #[serde(with = "decimal")]
    pub claimed_n: BigUint,
    #[serde(with = "decimal")]
    pub bound: BigUint,
    /// `bound < claimed_n`.
    pub bound_below_claimed: bool,
    /// `bound < claimed_n / n`, compared exactly as `bound * n < claimed_n`.
    pub bound_below_claimed_per_node: bool,
}

/// `2^(n^2)`.
pub fn claimed_size(n: usize) -> BigUint {
    BigUint::one() << (n * n)
}

pub fn lift_claimed_size(n: usize, c: u32, input_alphabet_size: usize) -> Result<ClaimedSize, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyGraph);
    }
    if input_alphabet_size == 0 {
        return Err(GraphError::Label(crate::label::LabelError::EmptyAlphabet));
    }
    let pairs = n * (n - 1) / 2;
    let bound = (BigUint::one() << pairs)
        * BigUint::from(n).pow(c * n as u32)
        * BigUint::from(input_alphabet_size).pow(n as u32);
    let claimed_n = claimed_size(n);
    Ok(ClaimedSize {
        n,
        c,
        input_alphabet_size,
        bound_below_claimed: bound < claimed_n,
        bound_below_claimed_per_node: &bound * BigUint::from(n) < claimed_n,
        claimed_n,
        bound,
    })
}

/// Union-bound certificate for the existence of a good assignment.
///
/// Failure events are grouped by [`InputInstance::identity_key`]: instances
/// that differ only in node indexing are the same identifier-labeled graph
/// and fail under exactly the same assignments, so each such event is
/// counted once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodnessCertificate {
    #[serde(with = "fraction::list")]
    pub failure_probs: Vec<BigRational>,
    /// Sum over every listed instance.
    #[serde(with = "fraction")]
    pub instance_sum: BigRational,
    pub family_size: usize,
    pub distinct_events: usize,
    /// Sum over distinct failure events; the union bound.
    #[serde(with = "fraction")]
    pub sum: BigRational,
    #[serde(with = "decimal")]
    pub claimed_n: BigUint,
    /// `sum < 1`: some assignment avoids every failure event.
    pub verdict: bool,
}

/// Certificate from per-event probabilities; `event_keys[i]` names the event
/// of `probs[i]`, and equal keys must carry equal probabilities.
pub fn certify_events(
    probs: &[BigRational],
    event_keys: &[String],
    claimed_n: &BigUint,
) -> Result<GoodnessCertificate, DerandError> {
    if probs.len() != event_keys.len() {
        return Err(DerandError::Config(format!(
            "{} probabilities for {} events",
            probs.len(),
            event_keys.len()
        )));
    }
    let mut events: BTreeMap<&str, &BigRational> = BTreeMap::new();
    for (p, k) in probs.iter().zip(event_keys) {
        if p < &BigRational::zero() || p > &BigRational::one() {
            return Err(DerandError::Config(format!("probability {p} outside [0, 1]")));
        }
        if let Some(prev) = events.insert(k, p) {
            if prev != p {
                return Err(DerandError::Config(format!("event {k} has probabilities {prev} and {p}")));
            }
        }
    }
    let instance_sum = probs.iter().fold(BigRational::zero(), |a, p| a + p);
    let sum = events.values().fold(BigRational::zero(), |a, p| a + *p);
    Ok(GoodnessCertificate {
        failure_probs: probs.to_vec(),
        instance_sum,
        family_size: probs.len(),
        distinct_events: events.len(),
        verdict: sum < BigRational::one(),
        sum,
        claimed_n: claimed_n.clone(),
    })
}

/// Certificate for per-instance failure probabilities over `family`.
pub fn certify_good_f(
    probs: &[BigRational],
    family: &[InputInstance],
    claimed_n: &BigUint,
) -> Result<GoodnessCertificate, DerandError> {
    let keys: Vec<String> = family.iter().map(InputInstance::identity_key).collect();
    certify_events(probs, &keys, claimed_n)
}
