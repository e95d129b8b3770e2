//! The fix-then-tabulate route: search for an assignment of bit strings to
//! identifiers under which the randomized program never fails, then tabulate
//! the resulting deterministic program.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DerandError;
use crate::graph::{InputInstance, NodeId};
use crate::problem::{verify, ProblemSpec};
use crate::sim::{
    fix_randomness, run_deterministic, run_normal_form, tabulate, BoundedAssignment, NormalFormTable, RandomizedNodeProgram,
};

/// Result of a good-assignment search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodFSearch {
    pub bits: usize,
    pub ids: Vec<NodeId>,
    /// Size of the candidate space, `2^(bits * |ids|)`.
    pub space: u64,
    /// Lexicographic index and value of the first good candidate.
    pub index: Option<u64>,
    pub found: Option<BoundedAssignment>,
}

fn space_size(ids: &[NodeId], bits: usize, budget: u64) -> Result<u64, DerandError> {
    let exp = bits * ids.len();
    let space = if exp < 64 { Some(1u64 << exp) } else { None };
    match space {
        Some(s) if s <= budget => Ok(s),
        _ => Err(DerandError::SpaceTooLarge {
            space: (BigUint::from(1u32) << exp).to_string(),
            budget,
        }),
    }
}

/// First failing instance of the fixed program, if any.
fn first_failure<P: RandomizedNodeProgram>(
    program: &P,
    problem: &ProblemSpec,
    family: &[InputInstance],
    f: &BoundedAssignment,
    claimed_n: &BigUint,
) -> Result<Option<usize>, DerandError> {
    let fixed = fix_randomness(program, f.to_assignment());
    for (i, inst) in family.iter().enumerate() {
        let out = run_deterministic(&fixed, inst, claimed_n)?.outputs;
        if !verify(problem, inst, &out)?.is_valid() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn sorted_ids(ids: &[NodeId]) -> Vec<NodeId> {
    let mut ids = ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// Scans `f: ids -> {0,1}^bits` in lexicographic order and returns the first
/// good one. Candidates are checked in parallel; the answer is the global
/// lexicographic minimum regardless of scheduling.
pub fn search_good_f<P: RandomizedNodeProgram>(
    program: &P,
    problem: &ProblemSpec,
    family: &[InputInstance],
    bits: usize,
    ids: &[NodeId],
    claimed_n: &BigUint,
    budget: u64,
) -> Result<GoodFSearch, DerandError> {
    let ids = sorted_ids(ids);
    let space = space_size(&ids, bits, budget)?;
    let hit = (0..space)
        .into_par_iter()
        .filter_map(|i| {
            let f = BoundedAssignment::from_index(&ids, bits, i as u128);
            match first_failure(program, problem, family, &f, claimed_n) {
                Ok(None) => Some(Ok((i, f))),
                Ok(Some(_)) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .find_first(|_| true)
        .transpose()?;
    Ok(GoodFSearch {
        bits,
        ids,
        space,
        index: hit.as_ref().map(|(i, _)| *i),
        found: hit.map(|(_, f)| f),
    })
}

/// Goodness of every candidate, in lexicographic order.
pub fn census_good_f<P: RandomizedNodeProgram>(
    program: &P,
    problem: &ProblemSpec,
    family: &[InputInstance],
    bits: usize,
    ids: &[NodeId],
    claimed_n: &BigUint,
    budget: u64,
) -> Result<Vec<bool>, DerandError> {
    let ids = sorted_ids(ids);
    let space = space_size(&ids, bits, budget)?;
    (0..space)
        .into_par_iter()
        .map(|i| {
            let f = BoundedAssignment::from_index(&ids, bits, i as u128);
            first_failure(program, problem, family, &f, claimed_n).map(|x| x.is_none())
        })
        .collect()
}

/// Fixes the program's randomness to `f`, tabulates it at `radius`, and
/// checks the table on every instance.
pub fn derandomize_via_f<P: RandomizedNodeProgram>(
    program: &P,
    f: &BoundedAssignment,
    radius: usize,
    family: &[InputInstance],
    problem: &ProblemSpec,
    claimed_n: &BigUint,
) -> Result<NormalFormTable, DerandError> {
    if let Some(i) = first_failure(program, problem, family, f, claimed_n)? {
        return Err(DerandError::BadAssignment {
            instance: i,
            dump: family[i].to_json_line(),
        });
    }
    let fixed = fix_randomness(program, f.to_assignment());
    let table = tabulate(&fixed, radius, family, claimed_n)?.with_provenance("via-f");
    for (i, inst) in family.iter().enumerate() {
        let out = run_normal_form(&table, inst)?;
        if !verify(problem, inst, &out)?.is_valid() {
            return Err(DerandError::TableInvalid {
                instance: i,
                dump: inst.to_json_line(),
            });
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{enumerate_instances, Graph, InstanceFamilySpec};
    use crate::label::{label, Alphabet};
    use crate::problem::{make_coloring, make_mis};
    use crate::programs::{FirstBit, GreedyMis};
    use crate::sim::BitFree;

    fn n2() -> Vec<InputInstance> {
        let spec = InstanceFamilySpec::new(2, 1, Alphabet::parse_list(&["x"]).unwrap());
        enumerate_instances(&spec).unwrap().collect()
    }

    fn color_bit() -> FirstBit {
        FirstBit::new(make_coloring(2).output_alphabet().clone())
    }

    #[test]
    fn bit_insensitive_program_takes_first_candidate() {
        let fam = n2();
        let s = search_good_f(&BitFree(GreedyMis::new()), &make_mis(), &fam, 1, &[1, 2], &BigUint::from(16u32), 1 << 10).unwrap();
        assert_eq!(s.index, Some(0));
    }

    #[test]
    fn must_output_one() {
        let one = crate::problem::ProblemSpec::local("one", 0, Alphabet::parse_list(&["0", "1"]).unwrap(), |b| {
            b.center_output().as_str() == "1"
        });
        let fam = vec![InputInstance::with_sequential_ids(Graph::empty(1), label("x"))];
        let s = search_good_f(&FirstBit::binary(), &one, &fam, 1, &[1], &BigUint::from(2u32), 16).unwrap();
        assert_eq!(s.index, Some(1));
        assert_eq!(s.found.unwrap().values[&1], vec![true]);
    }

    #[test]
    fn edge_coloring_needs_distinct_bits() {
        let fam = n2();
        let claimed = BigUint::from(16u32);
        let s = search_good_f(&color_bit(), &make_coloring(2), &fam, 1, &[2, 1], &claimed, 16).unwrap();
        let f = s.found.unwrap();
        assert_ne!(f.values[&1], f.values[&2]);
        assert_eq!(s.index, Some(1));
        let census = census_good_f(&color_bit(), &make_coloring(2), &fam, 1, &[1, 2], &claimed, 16).unwrap();
        assert_eq!(census, vec![false, true, true, false]);
    }

    #[test]
    fn budget_is_checked_before_searching() {
        let fam = n2();
        assert!(matches!(
            search_good_f(&color_bit(), &make_coloring(2), &fam, 4, &[1, 2], &BigUint::from(16u32), 100),
            Err(DerandError::SpaceTooLarge { .. })
        ));
        assert!(matches!(
            search_good_f(&color_bit(), &make_coloring(2), &fam, 40, &[1, 2], &BigUint::from(16u32), u64::MAX),
            Err(DerandError::SpaceTooLarge { .. })
        ));
    }

    #[test]
    fn via_f_table_and_bad_f() {
        let fam = n2();
        let claimed = BigUint::from(16u32);
        let good = BoundedAssignment::from_index(&[1, 2], 1, 1);
        let table = derandomize_via_f(&color_bit(), &good, 0, &fam, &make_coloring(2), &claimed).unwrap();
        assert_eq!(table.provenance.as_deref(), Some("via-f"));
        assert_eq!(table.len(), 4);
        assert_eq!(table.get(&crate::graph::CanonicalKey::from_raw("T0|0:2:1:x;|")).unwrap().as_str(), "B");
        for inst in &fam {
            let out = run_normal_form(&table, inst).unwrap();
            assert!(verify(&make_coloring(2), inst, &out).unwrap().is_valid());
        }
        let bad = BoundedAssignment::from_index(&[1, 2], 1, 0);
        match derandomize_via_f(&color_bit(), &bad, 0, &fam, &make_coloring(2), &claimed) {
            Err(DerandError::BadAssignment { instance, .. }) => assert!(fam[instance].graph().edges().len() == 1),
            other => panic!("{other:?}"),
        }
    }
}
