mod common;

use lderand::graph::{canonicalize, enumerate_instances, extract_ball, InputInstance, InstanceFamilySpec};
use lderand::label::Alphabet;
use lderand::programs::{FirstBit, GreedyMis, IdParity, OwnDegree, RandomColor};
use lderand::sim::{fix_randomness, run_deterministic, run_normal_form, run_randomized, tabulate, RandomAssignment};
use lderand::NormalFormTable;
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, max_n: usize) -> InputInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1 + (seed as usize % max_n);
    common::random_instance(&mut rng, n, 0.4, 1 + (seed % 2) as u32)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ball_matches_definition(seed in any::<u64>(), t in 0usize..4) {
        let inst = instance(seed, 8);
        for v in 0..inst.node_count() {
            let ball = extract_ball(&inst, v, t).unwrap();
            prop_assert_eq!(common::ball_projection(&ball), common::ball_by_definition(&inst, v, t));
        }
    }

    #[test]
    fn balls_grow_with_radius(seed in any::<u64>(), t in 0usize..4) {
        let inst = instance(seed, 8);
        for v in 0..inst.node_count() {
            let (small_nodes, small_edges) = common::ball_projection(&extract_ball(&inst, v, t).unwrap());
            let (big_nodes, big_edges) = common::ball_projection(&extract_ball(&inst, v, t + 1).unwrap());
            prop_assert!(small_nodes.iter().all(|x| big_nodes.contains(x)));
            prop_assert!(small_edges.iter().all(|e| big_edges.contains(e)));
        }
    }

    #[test]
    fn equal_keys_mean_equal_views(a in any::<u64>(), b in any::<u64>(), t in 0usize..3) {
        let (x, y) = (instance(a, 6), instance(b, 6));
        for u in 0..x.node_count() {
            for v in 0..y.node_count() {
                let (bu, bv) = (extract_ball(&x, u, t).unwrap(), extract_ball(&y, v, t).unwrap());
                let same_key = canonicalize(&bu) == canonicalize(&bv);
                let same_view = common::ball_projection(&bu) == common::ball_projection(&bv) && bu.center() == bv.center();
                prop_assert_eq!(same_key, same_view);
            }
        }
    }

    #[test]
    fn fixed_assignment_equals_run(seed in any::<u64>(), bits in any::<u64>()) {
        let inst = instance(seed, 6);
        let claimed = BigUint::from(inst.node_count());
        let program = RandomColor::new(3);
        let assignment = RandomAssignment::Seeded(bits);
        let direct = run_randomized(&program, &inst, &claimed, &assignment).unwrap();
        let fixed = fix_randomness(&program, assignment);
        let via_fixed = run_deterministic(&fixed, &inst, &claimed).unwrap();
        prop_assert_eq!(direct.outputs, via_fixed.outputs);
        prop_assert_eq!(direct.rounds, via_fixed.rounds);
    }

    #[test]
    fn tabulated_program_round_trips(seed in any::<u64>(), extra in 0usize..2) {
        let inst = instance(seed, 6);
        let claimed = BigUint::from(inst.node_count());
        let program = OwnDegree::new(5);
        let table = tabulate(&program, extra, std::slice::from_ref(&inst), &claimed).unwrap();
        let reread = NormalFormTable::from_json(&table.to_json()).unwrap();
        prop_assert_eq!(&reread, &table);
        prop_assert_eq!(
            run_normal_form(&reread, &inst).unwrap(),
            run_deterministic(&program, &inst, &claimed).unwrap().outputs
        );
    }
}

/// A table only sees views, so a node's output cannot depend on parts of the
/// graph it cannot reach, however large the graph claims to be.
#[test]
fn table_outputs_ignore_other_components() {
    let fam: Vec<_> = (1..=3)
        .flat_map(|n| {
            enumerate_instances(&InstanceFamilySpec::new(n, 1, Alphabet::parse_list(&["x"]).unwrap())).unwrap()
        })
        .collect();
    let claimed = BigUint::from(6u32);
    let program = GreedyMis::new();
    let mut unions = Vec::new();
    for a in fam.iter().step_by(7) {
        for b in fam.iter().filter(|b| b.node_count() > 1).step_by(11) {
            let shifted = InputInstance::new(
                b.graph().clone(),
                b.ids().iter().map(|id| id + 3).collect(),
                b.inputs().to_vec(),
                3,
            )
            .unwrap();
            unions.push((a.clone(), a.disjoint_union(&shifted).unwrap()));
        }
    }
    assert!(!unions.is_empty());
    let mut everything: Vec<_> = fam.clone();
    everything.extend(unions.iter().map(|(_, u)| u.clone()));
    let radius = 2 * 6 + 2;
    let table = tabulate(&program, radius, &everything, &claimed).unwrap();
    for (part, union) in &unions {
        let alone = run_normal_form(&table, part).unwrap();
        let inside = run_normal_form(&table, union).unwrap();
        for v in 0..part.node_count() {
            let w = union.node_with_id(part.id(v)).unwrap();
            assert_eq!(alone.get(v), inside.get(w));
        }
    }
}

#[test]
fn bit_free_programs_tabulate_at_zero_cost() {
    let fam: Vec<_> = enumerate_instances(&InstanceFamilySpec::new(3, 1, Alphabet::parse_list(&["x", "y"]).unwrap()))
        .unwrap()
        .collect();
    let claimed = BigUint::from(3u32);
    let parity = tabulate(&IdParity::new(), 0, &fam, &claimed).unwrap();
    assert!(parity.len() <= 3 * 2 * 3);
    let first = FirstBit::binary();
    let fixed = fix_randomness(&first, RandomAssignment::Seeded(5));
    let table = tabulate(&fixed, 1, &fam, &claimed).unwrap();
    for inst in &fam {
        assert_eq!(
            run_normal_form(&table, inst).unwrap(),
            run_deterministic(&fixed, inst, &claimed).unwrap().outputs
        );
    }
}
