//! Width-bounded search: IW(k) novelty pruning, width measurement, and
//! sketch-driven serialized search (SIW_R).
//!
//! A sketch shares the policy-rule syntax but reads each rule as a
//! subproblem: from the segment-start state s, reach any state s'' whose
//! valuation pair (f(s), f(s'')) satisfies some rule — in any number of
//! steps. SIW_R solves each segment with the least IW(k) that succeeds.

use crate::features::{valuate, InstanceContext};
use crate::policy::{pair_satisfies, Policy};
use crate::strips::{AtomId, GroundTask, State};
use std::collections::HashSet;
use thiserror::Error;

/// Sketches reuse the policy representation verbatim.
pub type Sketch = Policy;

#[derive(Debug, Error)]
pub enum WidthError {
    #[error("IW({k}) exhausted its frontier without reaching a stop state")]
    Exhausted { k: usize },
    #[error("IW({k}) node budget of {budget} exceeded")]
    NodeBudget { k: usize, budget: usize },
    #[error("no IW(k) with k <= {k_max} solved the subproblem at segment {segment}")]
    SegmentFail { segment: usize, k_max: usize },
    #[error("segment cap of {0} exceeded; sketch appears non-terminating")]
    SegmentCap(usize),
    #[error(transparent)]
    Policy(#[from] crate::policy::PolicyError),
}

/// Seen atom tuples of size ≤ k over the ground fluent atoms.
pub struct NoveltyTable {
    k: usize,
    seen: HashSet<Vec<AtomId>>,
}

impl NoveltyTable {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1);
        NoveltyTable {
            k,
            seen: HashSet::new(),
        }
    }

    /// Record all ≤k-tuples of the state's true atoms; true iff at least
    /// one tuple had not been seen before (the state is novel).
    pub fn note(&mut self, state: &State) -> bool {
        let atoms = state.atoms();
        let mut novel = false;
        let mut tuple: Vec<AtomId> = Vec::with_capacity(self.k);
        // enumerate sorted combinations of sizes 1..=k
        fn rec(
            atoms: &[AtomId],
            start: usize,
            tuple: &mut Vec<AtomId>,
            k: usize,
            seen: &mut HashSet<Vec<AtomId>>,
            novel: &mut bool,
        ) {
            for i in start..atoms.len() {
                tuple.push(atoms[i]);
                if seen.insert(tuple.clone()) {
                    *novel = true;
                }
                if tuple.len() < k {
                    rec(atoms, i + 1, tuple, k, seen, novel);
                }
                tuple.pop();
            }
        }
        rec(atoms, 0, &mut tuple, self.k, &mut self.seen, &mut novel);
        novel
    }
}

/// Default per-IW-call node budget.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// IW(k): breadth-first search from `init`, pruning states that carry no
/// novel ≤k-tuple, until `stop` holds. Returns the action sequence of the
/// first stop state generated (BFS order ⇒ shortest found).
pub fn iw(
    task: &GroundTask,
    init: &State,
    k: usize,
    stop: &dyn Fn(&State) -> bool,
    node_budget: usize,
) -> Result<Vec<usize>, WidthError> {
    if stop(init) {
        return Ok(Vec::new());
    }
    let mut table = NoveltyTable::new(k);
    table.note(init);
    // node arena with parent back-pointers for plan extraction
    let mut states = vec![init.clone()];
    let mut parent: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
    let mut next = 0usize;
    while next < states.len() {
        let s = states[next].clone();
        for ai in task.applicable(&s) {
            let succ = task.apply_unchecked(&s, &task.actions[ai]);
            if stop(&succ) {
                let mut plan = vec![ai];
                let mut at = next;
                while at != 0 {
                    let (p, a) = parent[at];
                    plan.push(a);
                    at = p;
                }
                plan.reverse();
                return Ok(plan);
            }
            if table.note(&succ) {
                if states.len() >= node_budget {
                    return Err(WidthError::NodeBudget {
                        k,
                        budget: node_budget,
                    });
                }
                parent.push((next, ai));
                states.push(succ);
            }
        }
        next += 1;
    }
    Err(WidthError::Exhausted { k })
}

/// Least k ≤ k_max with IW(k) reaching a stop state; the plan found.
/// A stop state at init reports width 1 with an empty plan, by convention.
pub fn width(
    task: &GroundTask,
    init: &State,
    stop: &dyn Fn(&State) -> bool,
    k_max: usize,
    node_budget: usize,
) -> Option<(usize, Vec<usize>)> {
    for k in 1..=k_max {
        if let Ok(plan) = iw(task, init, k, stop, node_budget) {
            return Some((k, plan));
        }
    }
    None
}

/// One solved SIW_R segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    /// The k at which IW solved the segment.
    pub k: usize,
    /// Number of actions in the segment.
    pub len: usize,
}

#[derive(Clone, Debug)]
pub struct SiwResult {
    pub plan: Vec<usize>,
    pub segments: Vec<Segment>,
}

/// Tunables for [`siw_r`].
#[derive(Clone, Copy, Debug)]
pub struct SiwLimits {
    pub k_max: usize,
    pub node_budget: usize,
    pub max_segments: usize,
}

impl Default for SiwLimits {
    fn default() -> Self {
        SiwLimits {
            k_max: 3,
            node_budget: DEFAULT_NODE_BUDGET,
            max_segments: 10_000,
        }
    }
}

/// Sketch-driven serialized IW: repeatedly solve the subproblem "reach the
/// goal or a state satisfying some sketch rule against the segment-start
/// valuation" with the least k ≤ k_max, concatenating the segment plans.
/// An empty sketch degenerates to plain SIW with the goal as the only stop.
pub fn siw_r(
    task: &GroundTask,
    sketch: &Sketch,
    limits: &SiwLimits,
) -> Result<SiwResult, WidthError> {
    sketch.validate(&task.instance.domain)?;
    let ctx = InstanceContext::new(task);
    let mut plan = Vec::new();
    let mut segments = Vec::new();
    let mut current = task.init.clone();
    while !task.is_goal(&current) {
        if segments.len() >= limits.max_segments {
            return Err(WidthError::SegmentCap(limits.max_segments));
        }
        let f0 = valuate(&sketch.features, &ctx, &current);
        let start = current.clone();
        let stop = |s: &State| -> bool {
            if task.is_goal(s) {
                return true;
            }
            if *s == start {
                return false;
            }
            let f2 = valuate(&sketch.features, &ctx, s);
            sketch.rules.iter().any(|r| pair_satisfies(&f0, &f2, r))
        };
        let mut solved = None;
        for k in 1..=limits.k_max {
            match iw(task, &current, k, &stop, limits.node_budget) {
                Ok(seg) => {
                    solved = Some((k, seg));
                    break;
                }
                Err(WidthError::Exhausted { .. }) | Err(WidthError::NodeBudget { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        let (k, seg) = solved.ok_or(WidthError::SegmentFail {
            segment: segments.len(),
            k_max: limits.k_max,
        })?;
        for &ai in &seg {
            current = task.apply_unchecked(&current, &task.actions[ai]);
        }
        segments.push(Segment { k, len: seg.len() });
        plan.extend(seg);
    }
    Ok(SiwResult { plan, segments })
}
