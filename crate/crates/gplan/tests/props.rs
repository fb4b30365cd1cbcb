//! Cross-module property tests: feature invariance under object renaming,
//! the frame axiom of the successor function, and determinism of
//! expansion.

use gplan::bench::{make_blocks_clear, make_delivery, make_gripper, make_hanoi};
use gplan::features::{generate_pool, valuate, InstanceContext};
use gplan::graph::{expand, Limits};
use gplan::strips::{ground, GroundAtom, GroundTask, Instance, State};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Rebuild `inst` with objects renamed and repositioned by `perm`
/// (old index i becomes index perm[i] with a fresh name).
fn rename_objects(inst: &Instance, perm: &[usize]) -> Instance {
    let n = inst.objects.len();
    let mut objects = vec![String::new(); n];
    for i in 0..n {
        objects[perm[i]] = format!("ren-{i}");
    }
    let map = |a: &GroundAtom| GroundAtom {
        pred: a.pred,
        args: a.args.iter().map(|&o| perm[o]).collect(),
    };
    let init = inst.init.iter().map(&map).collect();
    let goal = inst
        .goal
        .iter()
        .map(|l| gplan::strips::GroundLiteral {
            atom: map(&l.atom),
            positive: l.positive,
        })
        .collect();
    Instance::new(
        format!("{}-renamed", inst.name),
        inst.domain.clone(),
        objects,
        init,
        goal,
    )
    .unwrap()
}

/// Translate a state of `src` into the equivalent state of `dst`.
fn map_state(s: &State, src: &GroundTask, dst: &GroundTask, perm: &[usize]) -> State {
    let ids = s
        .atoms()
        .iter()
        .map(|&a| {
            let atom = src.atom(a);
            let mapped = GroundAtom {
                pred: atom.pred,
                args: atom.args.iter().map(|&o| perm[o]).collect(),
            };
            dst.atom_id(&mapped).expect("mapped atom exists")
        })
        .collect();
    State::from_atoms(ids)
}

/// Check every pool feature on every reachable state against the renamed
/// instance; the valuations must agree exactly.
fn check_renaming_invariance(inst: Instance, perm: &[usize], max_complexity: u32) {
    let renamed = rename_objects(&inst, perm);
    let task = Arc::new(ground(Arc::new(inst)).unwrap());
    let task2 = Arc::new(ground(Arc::new(renamed)).unwrap());
    let limits = Limits::default();
    let ssg = expand(&task, &limits).unwrap();
    let ctx = InstanceContext::new(&task);
    let ctx2 = InstanceContext::new(&task2);
    let pool = generate_pool(&[(&ctx, ssg.states.as_slice())], max_complexity);
    assert!(!pool.is_empty());
    let phi: Vec<_> = pool.iter().map(|f| f.expr.clone()).collect();
    for s in &ssg.states {
        let s2 = map_state(s, &task, &task2, perm);
        assert_eq!(
            valuate(&phi, &ctx, s),
            valuate(&phi, &ctx2, &s2),
            "feature valuation changed under object renaming"
        );
    }
}

fn shuffled_perm(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn renaming_invariance_delivery(seed in any::<u64>()) {
        let inst = make_delivery(2, 2, 1, 3).unwrap();
        let perm = shuffled_perm(inst.objects.len(), seed);
        check_renaming_invariance(inst, &perm, 4);
    }

    #[test]
    fn renaming_invariance_blocks(seed in any::<u64>()) {
        let inst = make_blocks_clear(3, 1).unwrap();
        let perm = shuffled_perm(inst.objects.len(), seed);
        check_renaming_invariance(inst, &perm, 4);
    }

    #[test]
    fn renaming_invariance_gripper(seed in any::<u64>()) {
        let inst = make_gripper(2).unwrap();
        let perm = shuffled_perm(inst.objects.len(), seed);
        check_renaming_invariance(inst, &perm, 4);
    }

    #[test]
    fn frame_axiom_of_successors(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        // any atom outside add ∪ del keeps its truth value
        let inst = make_delivery(2, 2, 1, seed % 7).unwrap();
        let task = ground(Arc::new(inst)).unwrap();
        let ssg = expand(&task, &Limits::default()).unwrap();
        let s = &ssg.states[pick.index(ssg.states.len())];
        for ai in task.applicable(s) {
            let action = &task.actions[ai];
            let succ = task.apply_unchecked(s, action);
            for a in 0..task.atoms.len() as u32 {
                if action.add.contains(&a) {
                    prop_assert!(succ.contains(a));
                } else if action.del.contains(&a) {
                    prop_assert!(!succ.contains(a));
                } else {
                    prop_assert_eq!(succ.contains(a), s.contains(a));
                }
            }
        }
    }
}

#[test]
fn expansion_is_deterministic() {
    let inst = make_hanoi(3, 3).unwrap();
    let mk = || {
        let task = ground(Arc::new(inst.clone())).unwrap();
        let ssg = expand(&task, &Limits::default()).unwrap();
        ssg.to_graph(&task)
    };
    assert_eq!(mk(), mk());
}

#[test]
fn generated_instances_are_solvable() {
    // BFS oracle: some goal state must be reachable
    let mut instances = Vec::new();
    for n in 1..=3usize {
        for m in 1..=2usize {
            for pkgs in 0..=2usize {
                if pkgs < n * m {
                    instances.push(make_delivery(n, m, pkgs, 5).unwrap());
                }
            }
        }
    }
    for b in 1..=4usize {
        instances.push(make_blocks_clear(b, 2).unwrap());
    }
    instances.push(make_hanoi(2, 3).unwrap());
    instances.push(make_hanoi(3, 3).unwrap());
    instances.push(make_gripper(1).unwrap());
    instances.push(make_gripper(3).unwrap());
    for inst in instances {
        let name = inst.name.clone();
        let task = ground(Arc::new(inst)).unwrap();
        let ssg = expand(&task, &Limits::default()).unwrap();
        assert!(!ssg.goals.is_empty(), "{name}: no reachable goal state");
    }
}
