//! Direct search for a valid normal-form table: assign an output to every
//! radius-T view realized in the family, smallest table first.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::DerandError;
use crate::graph::{canonicalize, enumerate_instances, extract_ball, CanonicalKey, InputInstance, InstanceFamilySpec};
use crate::label::{Alphabet, Label};
use crate::problem::{brute_force_solve, verify, ProblemSpec};
use crate::search::{lex_first, Constraint, LexOutcome};
use crate::sim::{run_normal_form, NormalFormTable};

#[derive(Debug, Clone)]
pub enum FamilySource {
    Spec(InstanceFamilySpec),
    Instances(Vec<InputInstance>),
}

impl FamilySource {
    pub fn instances(&self) -> Result<Vec<InputInstance>, DerandError> {
        match self {
            FamilySource::Spec(spec) => Ok(enumerate_instances(spec)?.collect()),
            FamilySource::Instances(v) => Ok(v.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub problem: ProblemSpec,
    pub family: FamilySource,
    pub radius: usize,
    /// Order in which labels are tried; defaults to the problem's alphabet.
    pub output_order: Option<Alphabet>,
    /// Maximum number of label trials.
    pub node_budget: Option<u64>,
    pub time_limit: Option<Duration>,
    pub workers: Option<usize>,
}

impl SearchConfig {
    pub fn new(problem: ProblemSpec, family: FamilySource, radius: usize) -> Self {
        SearchConfig {
            problem,
            family,
            radius,
            output_order: None,
            node_budget: None,
            time_limit: None,
            workers: None,
        }
    }

    fn order(&self) -> Result<Alphabet, DerandError> {
        let base = self.problem.output_alphabet();
        match &self.output_order {
            None => Ok(base.clone()),
            Some(o) => {
                let a: BTreeSet<&Label> = o.labels().iter().collect();
                let b: BTreeSet<&Label> = base.labels().iter().collect();
                if a == b {
                    Ok(o.clone())
                } else {
                    Err(DerandError::Config("output order is not a permutation of the problem's alphabet".into()))
                }
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SearchStats {
    pub family_size: usize,
    /// Instances left after merging ones that differ only in node indexing.
    pub distinct_instances: usize,
    pub realized_balls: usize,
    pub constraints: usize,
    pub trials: u64,
}

#[derive(Debug, Clone)]
pub enum UnsatWitness {
    /// An instance with no valid labeling at all.
    Instance { index: usize, instance: InputInstance },
    /// Every instance is solvable on its own, but no single table serves all.
    Exhausted,
}

#[derive(Debug, Clone)]
pub enum NormalFormOutcome {
    Found { table: NormalFormTable, stats: SearchStats },
    Unsat { witness: UnsatWitness, stats: SearchStats },
    BudgetExhausted { stats: SearchStats },
}

impl NormalFormOutcome {
    pub fn stats(&self) -> &SearchStats {
        match self {
            NormalFormOutcome::Found { stats, .. }
            | NormalFormOutcome::Unsat { stats, .. }
            | NormalFormOutcome::BudgetExhausted { stats } => stats,
        }
    }

    pub fn table(&self) -> Option<&NormalFormTable> {
        match self {
            NormalFormOutcome::Found { table, .. } => Some(table),
            _ => None,
        }
    }
}

/// Lexicographically smallest valid table over the realized views (views
/// ordered by canonical key, labels by `output_order`), or unsat.
pub fn find_normal_form(config: &SearchConfig) -> Result<NormalFormOutcome, DerandError> {
    match config.workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| DerandError::Config(e.to_string()))?
            .install(|| search(config)),
        None => search(config),
    }
}

fn search(config: &SearchConfig) -> Result<NormalFormOutcome, DerandError> {
    let order = config.order()?;
    let problem = &config.problem;
    let family = config.family.instances()?;
    let mut stats = SearchStats {
        family_size: family.len(),
        ..SearchStats::default()
    };

    let unsolvable = family
        .par_iter()
        .enumerate()
        .find_first(|(_, inst)| brute_force_solve(problem, inst).is_none())
        .map(|(i, _)| i);
    if let Some(index) = unsolvable {
        return Ok(NormalFormOutcome::Unsat {
            witness: UnsatWitness::Instance {
                index,
                instance: family[index].clone(),
            },
            stats,
        });
    }

    let keys: Vec<Vec<CanonicalKey>> = family
        .par_iter()
        .map(|inst| {
            (0..inst.node_count())
                .map(|v| extract_ball(inst, v, config.radius).map(|b| canonicalize(&b)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let realized: BTreeSet<&CanonicalKey> = keys.iter().flatten().collect();
    let var_of_key: BTreeMap<&CanonicalKey, usize> = realized.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let balls: Vec<&CanonicalKey> = realized.into_iter().collect();
    stats.realized_balls = balls.len();

    let mut seen = BTreeSet::new();
    let distinct: Vec<usize> = (0..family.len())
        .filter(|&i| seen.insert(family[i].identity_key()))
        .collect();
    stats.distinct_instances = distinct.len();

    let labels = order.labels();
    let mut constraints: Vec<Constraint<'_>> = Vec::new();
    let mut dedup: BTreeSet<(String, Vec<usize>)> = BTreeSet::new();
    for &i in &distinct {
        let inst = &family[i];
        let vars: Vec<usize> = keys[i].iter().map(|k| var_of_key[k]).collect();
        if problem.is_locally_verifiable() {
            for v in 0..inst.node_count() {
                let ball = extract_ball(inst, v, problem.radius())?;
                let scope: Vec<usize> = ball
                    .nodes()
                    .iter()
                    .map(|u| vars[inst.node_with_id(u.id).expect("ball node in instance")])
                    .collect();
                if !dedup.insert((canonicalize(&ball).as_str().to_owned(), scope.clone())) {
                    continue;
                }
                constraints.push(Constraint {
                    trigger: *scope.iter().max().expect("ball has a center"),
                    check: Box::new(move |a: &[usize]| {
                        problem.holds_at(&ball, scope.iter().map(|&x| &labels[a[x]]).collect())
                    }),
                });
            }
        } else {
            for nodes in inst.graph().components() {
                let vars = vars.clone();
                constraints.push(Constraint {
                    trigger: nodes.iter().map(|&v| vars[v]).max().expect("nonempty component"),
                    check: Box::new(move |a: &[usize]| {
                        let mut outs = vec![labels[0].clone(); inst.node_count()];
                        for &v in &nodes {
                            outs[v] = labels[a[vars[v]]].clone();
                        }
                        problem.holds_on_component(inst, &nodes, &outs)
                    }),
                });
            }
        }
    }
    stats.constraints = constraints.len();

    let start = Instant::now();
    let limit = config.time_limit;
    let (outcome, trials) = lex_first(balls.len(), labels.len(), &constraints, config.node_budget, || {
        limit.is_some_and(|l| start.elapsed() >= l)
    });
    stats.trials = trials;
    let assignment = match outcome {
        LexOutcome::Found(a) => a,
        LexOutcome::Exhausted => {
            return Ok(NormalFormOutcome::Unsat {
                witness: UnsatWitness::Exhausted,
                stats,
            })
        }
        LexOutcome::BudgetExceeded => return Ok(NormalFormOutcome::BudgetExhausted { stats }),
    };

    let mut table = NormalFormTable::new(config.radius, order.clone()).with_provenance("find-normal-form");
    for (k, &x) in balls.iter().zip(&assignment) {
        table.insert((*k).clone(), labels[x].clone())?;
    }
    drop(constraints);
    check_table(&table, problem, &family)?;
    Ok(NormalFormOutcome::Found { table, stats })
}

/// Runs the table on every instance and verifies the outputs.
pub(crate) fn check_table(
    table: &NormalFormTable,
    problem: &ProblemSpec,
    family: &[InputInstance],
) -> Result<(), DerandError> {
    let bad = family
        .par_iter()
        .enumerate()
        .map(|(i, inst)| -> Result<Option<usize>, DerandError> {
            let out = run_normal_form(table, inst)?;
            Ok((!verify(problem, inst, &out)?.is_valid()).then_some(i))
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .next();
    match bad {
        Some(i) => Err(DerandError::TableInvalid {
            instance: i,
            dump: family[i].to_json_line(),
        }),
        None => Ok(()),
    }
}
