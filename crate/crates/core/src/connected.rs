//! The connected-graph variant: nodes whose exploration ball already holds
//! the whole graph solve it outright and tell everyone; otherwise every node
//! applies the normal-form table.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{canonicalize, extend_instance, extract_ball, CanonicalKey, GraphError, InputInstance, NodeId};
use crate::label::Label;
use crate::problem::{brute_force_solve, OutputLabeling, ProblemError, ProblemSpec};
use crate::sim::{run_normal_form, NormalFormTable, SimError};

#[derive(Debug, Error)]
pub enum ConnectedError {
    #[error("input graph is not connected")]
    Disconnected,
    #[error("problem {0} is not locally verifiable")]
    NotLocallyVerifiable(String),
    #[error("instance has no valid labeling")]
    Unsolvable,
    #[error("table radius {table} exceeds the exploration radius {t}")]
    RadiusTooLarge { table: usize, t: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// A locally verifiable problem with verification radius `r` and a table of
/// radius `T`; nodes explore to radius `t = T + r`.
#[derive(Debug, Clone)]
pub struct ConnectedRunConfig {
    problem: ProblemSpec,
    table: NormalFormTable,
}

impl ConnectedRunConfig {
    pub fn new(problem: ProblemSpec, table: NormalFormTable) -> Result<Self, ConnectedError> {
        if !problem.is_locally_verifiable() {
            return Err(ConnectedError::NotLocallyVerifiable(problem.name().to_owned()));
        }
        Ok(ConnectedRunConfig { problem, table })
    }

    pub fn problem(&self) -> &ProblemSpec {
        &self.problem
    }

    pub fn table(&self) -> &NormalFormTable {
        &self.table
    }

    pub fn exploration_radius(&self) -> usize {
        self.table.radius() + self.problem.radius()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathTaken {
    BruteForce,
    Table,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectedRun {
    pub outputs: OutputLabeling,
    pub path: PathTaken,
    /// `2t` on the brute-force path (explore, then broadcast), `2t + T` on
    /// the table path.
    pub rounds: usize,
    /// Smallest identifier whose exploration ball covers the graph.
    pub covering_id: Option<NodeId>,
}

pub fn run_connected_aware(config: &ConnectedRunConfig, instance: &InputInstance) -> Result<ConnectedRun, ConnectedError> {
    if !instance.graph().is_connected() {
        return Err(ConnectedError::Disconnected);
    }
    let n = instance.node_count();
    let t = config.exploration_radius();
    let mut covering_id = None;
    for v in instance.nodes_by_id() {
        if extract_ball(instance, v, t)?.covers_graph(n) {
            covering_id = Some(instance.id(v));
            break;
        }
    }
    if covering_id.is_some() {
        // the covering node's broadcast reaches everyone within t more rounds
        let outputs = brute_force_solve(&config.problem, instance).ok_or(ConnectedError::Unsolvable)?;
        return Ok(ConnectedRun {
            outputs,
            path: PathTaken::BruteForce,
            rounds: 2 * t,
            covering_id,
        });
    }
    Ok(ConnectedRun {
        outputs: run_normal_form(&config.table, instance)?,
        path: PathTaken::Table,
        rounds: 2 * t + config.table.radius(),
        covering_id: None,
    })
}

/// Outcome of comparing node `v` in `G` with its copy in an extension `G'`.
#[derive(Debug, Clone)]
pub struct Indistinguishability {
    pub extended: InputInstance,
    pub key: CanonicalKey,
    pub extended_key: CanonicalKey,
    pub keys_equal: bool,
    /// Table outputs agree on every node within `t - T` of `v`.
    pub outputs_equal: bool,
}

impl Indistinguishability {
    pub fn holds(&self) -> bool {
        self.keys_equal && self.outputs_equal
    }
}

/// Extends `instance` to `target_size` nodes around `v` and checks that `v`
/// sees the same radius-`t` view in both, and that the table gives the same
/// outputs on `N_(t-T)[v]` in both.
pub fn check_indistinguishability(
    instance: &InputInstance,
    v: usize,
    t: usize,
    table: &NormalFormTable,
    target_size: usize,
    fill: &Label,
) -> Result<Indistinguishability, ConnectedError> {
    if table.radius() > t {
        return Err(ConnectedError::RadiusTooLarge { table: table.radius(), t });
    }
    let extended = extend_instance(instance, v, t, target_size, fill)?;
    let v2 = extended.node_with_id(instance.id(v)).expect("extension keeps identifiers");
    let key = canonicalize(&extract_ball(instance, v, t)?);
    let extended_key = canonicalize(&extract_ball(&extended, v2, t)?);
    let inner = extract_ball(instance, v, t - table.radius())?;
    let mut outputs_equal = true;
    for u in inner.nodes() {
        let a = table.lookup(instance, instance.node_with_id(u.id).expect("ball node"))?;
        let b = table.lookup(&extended, extended.node_with_id(u.id).expect("extension keeps identifiers"))?;
        outputs_equal &= a == b;
    }
    Ok(Indistinguishability {
        keys_equal: key == extended_key,
        outputs_equal,
        key,
        extended_key,
        extended,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derand::{find_normal_form, FamilySource, SearchConfig};
    use crate::graph::{enumerate_instances, Graph, InstanceFamilySpec};
    use crate::label::{label, Alphabet};
    use crate::problem::{make_leader_election, make_mis, verify_locally};
    use crate::programs::OwnDegree;
    use crate::sim::tabulate;
    use num_bigint::BigUint;

    fn seq(g: Graph) -> InputInstance {
        InputInstance::with_sequential_ids(g, label("x"))
    }

    fn cycle_table() -> NormalFormTable {
        let c8 = seq(Graph::cycle(8));
        let out = find_normal_form(&SearchConfig::new(make_mis(), FamilySource::Instances(vec![c8]), 1)).unwrap();
        out.table().unwrap().clone()
    }

    #[test]
    fn small_path_takes_brute_force() {
        let config = ConnectedRunConfig::new(make_mis(), cycle_table()).unwrap();
        assert_eq!(config.exploration_radius(), 2);
        let inst = seq(Graph::path(3));
        let run = run_connected_aware(&config, &inst).unwrap();
        assert_eq!(run.path, PathTaken::BruteForce);
        assert_eq!(run.covering_id, Some(1));
        assert_eq!(run.outputs, brute_force_solve(&make_mis(), &inst).unwrap());
        assert_eq!(run.rounds, 4);
        let single = seq(Graph::empty(1));
        assert_eq!(run_connected_aware(&config, &single).unwrap().path, PathTaken::BruteForce);
    }

    #[test]
    fn cycle_takes_table_path() {
        let config = ConnectedRunConfig::new(make_mis(), cycle_table()).unwrap();
        let inst = seq(Graph::cycle(8));
        let run = run_connected_aware(&config, &inst).unwrap();
        assert_eq!(run.path, PathTaken::Table);
        assert_eq!(run.rounds, 5);
        assert!(verify_locally(&make_mis(), &inst, &run.outputs).unwrap().is_valid());
    }

    #[test]
    fn rejects_disconnected_and_nonlocal() {
        let config = ConnectedRunConfig::new(make_mis(), cycle_table()).unwrap();
        assert!(matches!(
            run_connected_aware(&config, &seq(Graph::empty(2))),
            Err(ConnectedError::Disconnected)
        ));
        assert!(ConnectedRunConfig::new(make_leader_election(), cycle_table()).is_err());
    }

    #[test]
    fn four_node_connected_family_table_path_at_radius0() {
        // With T = 0 and r = 1, n = 4 connected graphs without a node of
        // eccentricity <= 1 take the table path; the table was searched over
        // all n = 4 instances, so its output must verify there.
        let fam: Vec<_> = enumerate_instances(&InstanceFamilySpec::new(4, 1, Alphabet::parse_list(&["x"]).unwrap()))
            .unwrap()
            .filter(|i| i.graph().is_connected())
            .collect();
        let problem = crate::problem::make_coloring(4);
        let out = find_normal_form(&SearchConfig::new(problem.clone(), FamilySource::Instances(fam.clone()), 0)).unwrap();
        let config = ConnectedRunConfig::new(problem.clone(), out.table().unwrap().clone()).unwrap();
        let mut table_runs = 0;
        for inst in &fam {
            let run = run_connected_aware(&config, inst).unwrap();
            assert!(verify_locally(&problem, inst, &run.outputs).unwrap().is_valid());
            assert!(run.rounds <= 2 * config.exploration_radius() + config.table().radius());
            if run.path == PathTaken::Table {
                table_runs += 1;
            } else {
                assert_eq!(run.outputs, brute_force_solve(&problem, inst).unwrap());
            }
        }
        assert!(table_runs > 0);
    }

    #[test]
    fn indistinguishable_after_extension() {
        let inst = seq(Graph::path(3));
        let big = seq(Graph::path(6));
        let table = tabulate(&OwnDegree::new(2), 0, &[inst.clone(), big], &BigUint::from(6u32)).unwrap();
        let verdict = check_indistinguishability(&inst, 0, 1, &table, 6, &label("x")).unwrap();
        assert!(verdict.holds());
        assert_eq!(verdict.extended.node_count(), 6);
        assert!(matches!(
            check_indistinguishability(&inst, 1, 1, &table, 6, &label("x")),
            Err(ConnectedError::Graph(GraphError::BallCoversGraph { .. }))
        ));
    }
}
