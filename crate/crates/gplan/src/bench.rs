//! Parameterized instance generators: Delivery, Blocksworld-clear(x),
//! Tower of Hanoi, and Gripper.
//!
//! The Delivery encoding keeps the `at` atom of a carried package in sync
//! with the agent cell (a dedicated carry-move schema updates it) and marks
//! completed deliveries with a `delivered` fluent; dropping anywhere except
//! the target is allowed but only the target drop delivers. This keeps the
//! package location defined in every state, so distance features over the
//! grid stay well-behaved while a package is in hand.

use crate::strips::{
    Domain, GroundAtom, GroundLiteral, Instance, SchemaAtom, SchemaDraft, SchemaLiteral,
    StripsError,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Strips(#[from] StripsError),
}

/// Parameters for one generated instance, as exposed on the CLI.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratorSpec {
    Delivery {
        n: usize,
        m: usize,
        packages: usize,
        seed: u64,
    },
    BlocksClear {
        blocks: usize,
        seed: u64,
    },
    Hanoi {
        disks: usize,
        pegs: usize,
    },
    Gripper {
        balls: usize,
    },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Instance, BenchError> {
        match *self {
            GeneratorSpec::Delivery { n, m, packages, seed } => make_delivery(n, m, packages, seed),
            GeneratorSpec::BlocksClear { blocks, seed } => make_blocks_clear(blocks, seed),
            GeneratorSpec::Hanoi { disks, pegs } => make_hanoi(disks, pegs),
            GeneratorSpec::Gripper { balls } => make_gripper(balls),
        }
    }
}

fn lit(pred: usize, args: &[usize], positive: bool) -> SchemaLiteral {
    SchemaLiteral {
        atom: SchemaAtom {
            pred,
            args: args.to_vec(),
        },
        positive,
    }
}

fn atom(pred: usize, args: &[usize]) -> GroundAtom {
    GroundAtom {
        pred,
        args: args.to_vec(),
    }
}

/// Delivery domain: predicates `at`, `at_r`, `hold`, `handempty`,
/// `delivered`, statics `adjacent` and `target`.
pub fn delivery_domain() -> Arc<Domain> {
    // predicate ids
    const AT: usize = 0; // at(pkg, cell)
    const AT_R: usize = 1; // at_r(cell)
    const HOLD: usize = 2; // hold(pkg)
    const HANDEMPTY: usize = 3;
    const DELIVERED: usize = 4; // delivered(pkg)
    const ADJACENT: usize = 5; // adjacent(cell, cell)
    const TARGET: usize = 6; // target(cell)
    let predicates = vec![
        ("at".to_string(), 2),
        ("at_r".to_string(), 1),
        ("hold".to_string(), 1),
        ("handempty".to_string(), 0),
        ("delivered".to_string(), 1),
        ("adjacent".to_string(), 2),
        ("target".to_string(), 1),
    ];
    let drafts = vec![
        SchemaDraft {
            // pick(p, c)
            name: "pick".into(),
            params: vec!["?p".into(), "?c".into()],
            pre: vec![
                lit(AT, &[0, 1], true),
                lit(AT_R, &[1], true),
                lit(HANDEMPTY, &[], true),
            ],
            eff: vec![
                lit(HOLD, &[0], true),
                lit(HANDEMPTY, &[], false),
                lit(DELIVERED, &[0], false),
            ],
        },
        SchemaDraft {
            // drop(p, c): anywhere except the target
            name: "drop".into(),
            params: vec!["?p".into(), "?c".into()],
            pre: vec![
                lit(HOLD, &[0], true),
                lit(AT_R, &[1], true),
                lit(AT, &[0, 1], true),
                lit(TARGET, &[1], false),
            ],
            eff: vec![lit(HOLD, &[0], false), lit(HANDEMPTY, &[], true)],
        },
        SchemaDraft {
            // drop-target(p, c): delivers
            name: "drop-target".into(),
            params: vec!["?p".into(), "?c".into()],
            pre: vec![
                lit(HOLD, &[0], true),
                lit(AT_R, &[1], true),
                lit(AT, &[0, 1], true),
                lit(TARGET, &[1], true),
            ],
            eff: vec![
                lit(HOLD, &[0], false),
                lit(HANDEMPTY, &[], true),
                lit(DELIVERED, &[0], true),
            ],
        },
        SchemaDraft {
            // move(c, c')
            name: "move".into(),
            params: vec!["?c".into(), "?d".into()],
            pre: vec![
                lit(AT_R, &[0], true),
                lit(ADJACENT, &[0, 1], true),
                lit(HANDEMPTY, &[], true),
            ],
            eff: vec![lit(AT_R, &[1], true), lit(AT_R, &[0], false)],
        },
        SchemaDraft {
            // move-carry(p, c, c'): carried package travels along
            name: "move-carry".into(),
            params: vec!["?p".into(), "?c".into(), "?d".into()],
            pre: vec![
                lit(AT_R, &[1], true),
                lit(ADJACENT, &[1, 2], true),
                lit(HOLD, &[0], true),
                lit(AT, &[0, 1], true),
            ],
            eff: vec![
                lit(AT_R, &[2], true),
                lit(AT_R, &[1], false),
                lit(AT, &[0, 2], true),
                lit(AT, &[0, 1], false),
            ],
        },
    ];
    Arc::new(Domain::assemble(predicates, drafts).expect("delivery domain is well-formed"))
}

/// Delivery instance on an `n x m` grid. The target is cell (1,1);
/// packages are placed on distinct non-target cells, the agent anywhere.
pub fn make_delivery(
    n: usize,
    m: usize,
    packages: usize,
    seed: u64,
) -> Result<Instance, BenchError> {
    if n < 1 || m < 1 {
        return Err(BenchError::BadParams("grid must be at least 1x1".into()));
    }
    if packages > n * m - 1 && packages > 0 {
        return Err(BenchError::BadParams(format!(
            "{packages} packages do not fit on {} free cells",
            n * m - 1
        )));
    }
    let domain = delivery_domain();
    let at = 0;
    let at_r = 1;
    let handempty = 3;
    let delivered = 4;
    let adjacent = 5;
    let target = 6;

    let mut objects = Vec::new();
    let cell = |i: usize, j: usize| (i - 1) * m + (j - 1);
    for i in 1..=n {
        for j in 1..=m {
            objects.push(format!("c{i}_{j}"));
        }
    }
    let pkg0 = objects.len();
    for p in 1..=packages {
        objects.push(format!("p{p}"));
    }

    let mut init = Vec::new();
    for i in 1..=n {
        for j in 1..=m {
            let c = cell(i, j);
            if i > 1 {
                init.push(atom(adjacent, &[c, cell(i - 1, j)]));
            }
            if i < n {
                init.push(atom(adjacent, &[c, cell(i + 1, j)]));
            }
            if j > 1 {
                init.push(atom(adjacent, &[c, cell(i, j - 1)]));
            }
            if j < m {
                init.push(atom(adjacent, &[c, cell(i, j + 1)]));
            }
        }
    }
    init.push(atom(target, &[cell(1, 1)]));
    init.push(atom(handempty, &[]));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let agent = rng.gen_range(0..n * m);
    init.push(atom(at_r, &[agent]));
    let mut free: Vec<usize> = (0..n * m).filter(|&c| c != cell(1, 1)).collect();
    free.shuffle(&mut rng);
    let mut goal = Vec::new();
    for p in 0..packages {
        init.push(atom(at, &[pkg0 + p, free[p]]));
        goal.push(GroundLiteral {
            atom: atom(delivered, &[pkg0 + p]),
            positive: true,
        });
    }

    let name = format!("delivery-{n}x{m}-{packages}p-s{seed}");
    Ok(Instance::new(name, domain, objects, init, goal)?)
}

/// Four-operator Blocksworld domain.
pub fn blocks_domain() -> Arc<Domain> {
    const ON: usize = 0;
    const ONTABLE: usize = 1;
    const CLEAR: usize = 2;
    const HOLDING: usize = 3;
    const HANDEMPTY: usize = 4;
    let predicates = vec![
        ("on".to_string(), 2),
        ("ontable".to_string(), 1),
        ("clear".to_string(), 1),
        ("holding".to_string(), 1),
        ("handempty".to_string(), 0),
    ];
    let drafts = vec![
        SchemaDraft {
            name: "pick-up".into(),
            params: vec!["?x".into()],
            pre: vec![
                lit(CLEAR, &[0], true),
                lit(ONTABLE, &[0], true),
                lit(HANDEMPTY, &[], true),
            ],
            eff: vec![
                lit(ONTABLE, &[0], false),
                lit(CLEAR, &[0], false),
                lit(HANDEMPTY, &[], false),
                lit(HOLDING, &[0], true),
            ],
        },
        SchemaDraft {
            name: "put-down".into(),
            params: vec!["?x".into()],
            pre: vec![lit(HOLDING, &[0], true)],
            eff: vec![
                lit(HOLDING, &[0], false),
                lit(CLEAR, &[0], true),
                lit(HANDEMPTY, &[], true),
                lit(ONTABLE, &[0], true),
            ],
        },
        SchemaDraft {
            name: "stack".into(),
            params: vec!["?x".into(), "?y".into()],
            pre: vec![lit(HOLDING, &[0], true), lit(CLEAR, &[1], true)],
            eff: vec![
                lit(HOLDING, &[0], false),
                lit(CLEAR, &[1], false),
                lit(CLEAR, &[0], true),
                lit(HANDEMPTY, &[], true),
                lit(ON, &[0, 1], true),
            ],
        },
        SchemaDraft {
            name: "unstack".into(),
            params: vec!["?x".into(), "?y".into()],
            pre: vec![
                lit(ON, &[0, 1], true),
                lit(CLEAR, &[0], true),
                lit(HANDEMPTY, &[], true),
            ],
            eff: vec![
                lit(ON, &[0, 1], false),
                lit(CLEAR, &[0], false),
                lit(CLEAR, &[1], true),
                lit(HANDEMPTY, &[], false),
                lit(HOLDING, &[0], true),
            ],
        },
    ];
    Arc::new(Domain::assemble(predicates, drafts).expect("blocks domain is well-formed"))
}

/// Blocksworld instance with a `clear(x)` goal. Blocks are stacked into
/// random towers; `x` is a block with the most blocks above it.
pub fn make_blocks_clear(nblocks: usize, seed: u64) -> Result<Instance, BenchError> {
    if nblocks < 1 {
        return Err(BenchError::BadParams("need at least one block".into()));
    }
    let domain = blocks_domain();
    let on = 0;
    let ontable = 1;
    let clear = 2;
    let handempty = 4;
    let objects: Vec<String> = (1..=nblocks).map(|i| format!("b{i}")).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..nblocks).collect();
    order.shuffle(&mut rng);
    // split into towers; bias toward few towers so the goal is nontrivial
    let mut towers: Vec<Vec<usize>> = vec![Vec::new()];
    for &b in &order {
        if !towers.last().unwrap().is_empty() && rng.gen_bool(0.3) {
            towers.push(Vec::new());
        }
        towers.last_mut().unwrap().push(b); // bottom to top
    }

    let mut init = vec![atom(handempty, &[])];
    let mut above = vec![0usize; nblocks];
    for tower in &towers {
        init.push(atom(ontable, &[tower[0]]));
        for w in tower.windows(2) {
            init.push(atom(on, &[w[1], w[0]]));
        }
        init.push(atom(clear, &[*tower.last().unwrap()]));
        for (depth, &b) in tower.iter().rev().enumerate() {
            above[b] = depth;
        }
    }
    let x = (0..nblocks)
        .max_by_key(|&b| (above[b], std::cmp::Reverse(b)))
        .unwrap();
    let goal = vec![GroundLiteral {
        atom: atom(clear, &[x]),
        positive: true,
    }];
    let name = format!("blocks-clear-{nblocks}-s{seed}");
    Ok(Instance::new(name, domain, objects, init, goal)?)
}

/// Tower of Hanoi with `larger`/`neq`-style statics (`larger(y,d)` holds
/// when `y` is a peg or a disk bigger than `d`).
pub fn hanoi_domain() -> Arc<Domain> {
    const ON: usize = 0;
    const CLEAR: usize = 1;
    const LARGER: usize = 2;
    let predicates = vec![
        ("on".to_string(), 2),
        ("clear".to_string(), 1),
        ("larger".to_string(), 2),
    ];
    let drafts = vec![SchemaDraft {
        name: "move".into(),
        params: vec!["?d".into(), "?fr".into(), "?to".into()],
        pre: vec![
            lit(CLEAR, &[0], true),
            lit(ON, &[0, 1], true),
            lit(CLEAR, &[2], true),
            lit(LARGER, &[2, 0], true),
        ],
        eff: vec![
            lit(ON, &[0, 2], true),
            lit(ON, &[0, 1], false),
            lit(CLEAR, &[1], true),
            lit(CLEAR, &[2], false),
        ],
    }];
    Arc::new(Domain::assemble(predicates, drafts).expect("hanoi domain is well-formed"))
}

/// All disks start on the first peg and must reach the last peg.
/// Disk 1 is the smallest.
pub fn make_hanoi(disks: usize, pegs: usize) -> Result<Instance, BenchError> {
    if disks < 1 || pegs < 2 {
        return Err(BenchError::BadParams(
            "need at least one disk and two pegs".into(),
        ));
    }
    let domain = hanoi_domain();
    let on = 0;
    let clear = 1;
    let larger = 2;
    let mut objects: Vec<String> = (1..=disks).map(|i| format!("d{i}")).collect();
    for p in 1..=pegs {
        objects.push(format!("peg{p}"));
    }
    let disk = |i: usize| i - 1; // d1 smallest
    let peg = |p: usize| disks + p - 1;

    let mut init = Vec::new();
    for i in 1..=disks {
        for j in 1..=disks {
            if i > j {
                init.push(atom(larger, &[disk(i), disk(j)]));
            }
        }
        for p in 1..=pegs {
            init.push(atom(larger, &[peg(p), disk(i)]));
        }
    }
    // stack on peg 1: largest at bottom
    init.push(atom(on, &[disk(disks), peg(1)]));
    for i in (1..disks).rev() {
        init.push(atom(on, &[disk(i), disk(i + 1)]));
    }
    init.push(atom(clear, &[disk(1)]));
    for p in 2..=pegs {
        init.push(atom(clear, &[peg(p)]));
    }

    let mut goal = vec![GroundLiteral {
        atom: atom(on, &[disk(disks), peg(pegs)]),
        positive: true,
    }];
    for i in (1..disks).rev() {
        goal.push(GroundLiteral {
            atom: atom(on, &[disk(i), disk(i + 1)]),
            positive: true,
        });
    }
    let name = format!("hanoi-{disks}d-{pegs}p");
    Ok(Instance::new(name, domain, objects, init, goal)?)
}

/// Classic Gripper: move all balls from room `ra` to room `rb`.
pub fn gripper_domain() -> Arc<Domain> {
    const AT_ROBBY: usize = 0;
    const AT: usize = 1;
    const FREE: usize = 2;
    const CARRY: usize = 3;
    let predicates = vec![
        ("at_robby".to_string(), 1),
        ("at".to_string(), 2),
        ("free".to_string(), 1),
        ("carry".to_string(), 2),
    ];
    let drafts = vec![
        SchemaDraft {
            name: "move".into(),
            params: vec!["?from".into(), "?to".into()],
            pre: vec![lit(AT_ROBBY, &[0], true)],
            eff: vec![lit(AT_ROBBY, &[1], true), lit(AT_ROBBY, &[0], false)],
        },
        SchemaDraft {
            name: "pick".into(),
            params: vec!["?b".into(), "?r".into(), "?g".into()],
            pre: vec![
                lit(AT, &[0, 1], true),
                lit(AT_ROBBY, &[1], true),
                lit(FREE, &[2], true),
            ],
            eff: vec![
                lit(CARRY, &[0, 2], true),
                lit(AT, &[0, 1], false),
                lit(FREE, &[2], false),
            ],
        },
        SchemaDraft {
            name: "drop".into(),
            params: vec!["?b".into(), "?r".into(), "?g".into()],
            pre: vec![lit(CARRY, &[0, 2], true), lit(AT_ROBBY, &[1], true)],
            eff: vec![
                lit(AT, &[0, 1], true),
                lit(FREE, &[2], true),
                lit(CARRY, &[0, 2], false),
            ],
        },
    ];
    Arc::new(Domain::assemble(predicates, drafts).expect("gripper domain is well-formed"))
}

pub fn make_gripper(balls: usize) -> Result<Instance, BenchError> {
    if balls < 1 {
        return Err(BenchError::BadParams("need at least one ball".into()));
    }
    let domain = gripper_domain();
    let at_robby = 0;
    let at = 1;
    let free = 2;
    let mut objects = vec!["ra".to_string(), "rb".to_string(), "g1".to_string(), "g2".to_string()];
    for b in 1..=balls {
        objects.push(format!("ball{b}"));
    }
    let mut init = vec![
        atom(at_robby, &[0]),
        atom(free, &[2]),
        atom(free, &[3]),
    ];
    let mut goal = Vec::new();
    for b in 0..balls {
        init.push(atom(at, &[4 + b, 0]));
        goal.push(GroundLiteral {
            atom: atom(at, &[4 + b, 1]),
            positive: true,
        });
    }
    let name = format!("gripper-{balls}");
    Ok(Instance::new(name, domain, objects, init, goal)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strips::ground;

    #[test]
    fn delivery_adjacency_count() {
        for (n, m) in [(2, 2), (3, 3), (2, 4)] {
            let inst = make_delivery(n, m, 1, 7).unwrap();
            let adjacent = inst.domain.predicate("adjacent").unwrap();
            let count = inst.init.iter().filter(|a| a.pred == adjacent).count();
            assert_eq!(count, 2 * (n * (m - 1) + (n - 1) * m));
        }
    }

    #[test]
    fn delivery_1x1_no_packages_is_goal() {
        let inst = make_delivery(1, 1, 0, 0).unwrap();
        let task = ground(Arc::new(inst)).unwrap();
        assert!(task.is_goal(&task.init));
    }

    #[test]
    fn delivery_rejects_overfull_grid() {
        assert!(make_delivery(2, 2, 4, 0).is_err());
    }

    #[test]
    fn blocks_single_block_is_goal() {
        let inst = make_blocks_clear(1, 3).unwrap();
        let task = ground(Arc::new(inst)).unwrap();
        assert!(task.is_goal(&task.init));
    }

    #[test]
    fn hanoi_statics_filter_bindings() {
        let inst = make_hanoi(3, 3).unwrap();
        let inst = Arc::new(inst);
        let task = ground(inst.clone()).unwrap();
        // oracle: enumerate all triples and keep those with larger(to, d)
        let larger = inst.domain.predicate("larger").unwrap();
        let statics: std::collections::HashSet<_> =
            inst.static_atoms().cloned().collect();
        let nobj = inst.objects.len();
        let mut expected = 0;
        for d in 0..nobj {
            for fr in 0..nobj {
                for to in 0..nobj {
                    // fr == to collapses an add and a delete onto the same
                    // atom, which grounding skips
                    if fr != to && statics.contains(&atom(larger, &[to, d])) {
                        expected += 1;
                    }
                }
            }
        }
        assert_eq!(task.actions.len(), expected);
    }
}
