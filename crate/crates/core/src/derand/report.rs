//! End-to-end table search with a reproducible report.

use std::str::FromStr;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::normal_form::check_table;
use super::{
    decimal, find_normal_form, lift_claimed_size, ClaimedSize, DerandError, FamilySource, NormalFormOutcome,
    SearchConfig, SearchStats, UnsatWitness,
};
use crate::graph::InstanceFamilySpec;
use crate::problem::ProblemSpec;
use crate::sim::{ceil_log2, NormalFormTable};

/// A running-time formula for the randomized algorithm, evaluated at the
/// claimed size `N = 2^(n^2)` to show the deterministic radius it implies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandTime {
    Const(u64),
    /// `ceil(log2 N)`.
    Log,
    /// `ceil(log2 ceil(log2 N))`.
    LogLog,
    /// `ceil(log2 N)^2`.
    LogSquared,
}

impl RandTime {
    pub fn at(&self, claimed_n: &BigUint) -> BigUint {
        let log = BigUint::from(ceil_log2(claimed_n));
        match self {
            RandTime::Const(k) => BigUint::from(*k),
            RandTime::Log => log,
            RandTime::LogLog => BigUint::from(ceil_log2(&log)),
            RandTime::LogSquared => &log * &log,
        }
    }
}

impl FromStr for RandTime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "log2" => Ok(RandTime::Log),
            "loglog2" => Ok(RandTime::LogLog),
            "log2^2" => Ok(RandTime::LogSquared),
            _ => s
                .strip_prefix("const:")
                .and_then(|k| k.parse().ok())
                .map(RandTime::Const)
                .ok_or_else(|| format!("unknown time formula {s:?}; expected const:K, log2, loglog2 or log2^2")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DerandConfig {
    pub problem: ProblemSpec,
    pub family: InstanceFamilySpec,
    pub radius: usize,
    pub node_budget: Option<u64>,
    pub time_limit: Option<Duration>,
    pub workers: Option<usize>,
    pub rand_time: Option<RandTime>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Found,
    Unsat,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandTimeReport {
    pub formula: RandTime,
    /// The formula at the claimed size; the radius a deterministic table
    /// needs to simulate the randomized algorithm.
    #[serde(with = "decimal")]
    pub at_claimed_n: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerandReport {
    pub problem: String,
    pub n: usize,
    pub c: u32,
    pub input_alphabet: Vec<String>,
    pub max_degree: Option<usize>,
    #[serde(rename = "T")]
    pub radius: usize,
    pub claimed: ClaimedSize,
    pub family_size: usize,
    pub pipeline: String,
    pub verdict: Verdict,
    pub table_size: Option<usize>,
    pub verified: usize,
    /// Unsolvable instance, one-line dump.
    pub witness: Option<String>,
    pub unsat_reason: Option<String>,
    pub search: SearchStats,
    pub rand_time: Option<RandTimeReport>,
    /// Not serialized, so reports of identical configurations are identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Lifts the claimed size, enumerates the family, searches for a table and
/// verifies it.
pub fn derandomize(config: &DerandConfig) -> Result<(DerandReport, Option<NormalFormTable>), DerandError> {
    let start = Instant::now();
    let spec = &config.family;
    spec.validate()?;
    let claimed = lift_claimed_size(spec.n, spec.c, spec.input_alphabet.len())?;
    let search = SearchConfig {
        problem: config.problem.clone(),
        family: FamilySource::Spec(spec.clone()),
        radius: config.radius,
        output_order: None,
        node_budget: config.node_budget,
        time_limit: config.time_limit,
        workers: config.workers,
    };
    let outcome = find_normal_form(&search)?;
    let mut report = DerandReport {
        problem: config.problem.name().to_owned(),
        n: spec.n,
        c: spec.c,
        input_alphabet: spec.input_alphabet.labels().iter().map(|l| l.as_str().to_owned()).collect(),
        max_degree: spec.max_degree,
        radius: config.radius,
        rand_time: config.rand_time.map(|f| RandTimeReport {
            formula: f,
            at_claimed_n: f.at(&claimed.claimed_n),
        }),
        claimed,
        family_size: outcome.stats().family_size,
        pipeline: "find-normal-form".into(),
        verdict: Verdict::Found,
        table_size: None,
        verified: 0,
        witness: None,
        unsat_reason: None,
        search: outcome.stats().clone(),
        wall_time: Duration::ZERO,
    };
    let table = match outcome {
        NormalFormOutcome::Found { table, .. } => {
            let family = search.family.instances()?;
            check_table(&table, &config.problem, &family)?;
            report.verified = family.len();
            report.table_size = Some(table.len());
            Some(table)
        }
        NormalFormOutcome::Unsat { witness, .. } => {
            report.verdict = Verdict::Unsat;
            match witness {
                UnsatWitness::Instance { instance, .. } => {
                    report.witness = Some(instance.to_json_line());
                    report.unsat_reason = Some("instance has no valid labeling".into());
                }
                UnsatWitness::Exhausted => {
                    report.unsat_reason = Some("every table fails on some instance".into());
                }
            }
            None
        }
        NormalFormOutcome::BudgetExhausted { .. } => {
            report.verdict = Verdict::BudgetExhausted;
            None
        }
    };
    report.wall_time = start.elapsed();
    Ok((report, table))
}
