//! Learning general policies and sketches from training instances.
//!
//! The policy learner expands each training instance, keeps the alive
//! (reachable, solvable, non-goal) states, and treats every transition
//! from an alive state into a solvable state as a candidate policy step.
//! A Weighted Max-SAT model selects the cheapest feature subset together
//! with candidate transition classes such that every alive state keeps a
//! chosen class, no chosen class is confusable with a transition into an
//! unsolvable state, and goal states are separable from alive states.
//! Termination is decided outside the solver: for each candidate feature
//! subset, [`Encoding::terminating_selection`] searches directly for a
//! covering set of classes that admits a sieve certificate (discharged in
//! some order, each class strictly moves a selected feature in a direction
//! no remaining class reverses). Subsets without one are refuted with a
//! single clause demanding a feature outside the subset — sound for every
//! subset of the refuted set, since dropping features only weakens
//! separation and termination. The decoded policy is re-verified on the
//! training instances in a CEGIS loop that blocks its feature set on
//! failure.
//!
//! The sketch learner is generate-and-test: candidate feature subsets in
//! ascending cost, candidate rule sets in ascending size, accepted as soon
//! as SIW_R terminates on all training instances within the width bound.

use crate::features::{
    generate_pool, valuate, Feature, FeatureExpr, FeatureValuation, InstanceContext, Value,
};
use crate::graph::{expand, Distance, Limits, StateSpaceGraph};
use crate::maxsat::{self, Lit, MaxSatOutcome, WeightedClauseSet};
use crate::policy::{
    verify, CondOp, Condition, EffOp, Effect, Policy, PolicyRule, VerifyOutcome,
};
use crate::strips::{GroundTask, State};
use crate::width::{siw_r, Sketch, SiwLimits};
use serde::Serialize;
use std::collections::{HashMap, HashSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("training instance `{0}` has an unsolvable initial state")]
    UnsolvableInit(String),
    #[error("no feature subset of the pool satisfies the constraints")]
    Infeasible,
    #[error("learning budget of {0} CEGIS iterations exhausted")]
    BudgetExhausted(usize),
    #[error("no sketch within the rule and width bounds")]
    NoSketch,
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
    #[error(transparent)]
    MaxSat(#[from] crate::maxsat::MaxSatError),
    #[error(transparent)]
    Policy(#[from] crate::policy::PolicyError),
}

/// One expanded training instance with transition labels.
pub struct TrainingSample {
    pub task: Arc<GroundTask>,
    pub graph: StateSpaceGraph,
    pub dist: Vec<Distance>,
    /// Reachable, solvable, non-goal states.
    pub alive: Vec<usize>,
    /// Distinct (src, dst) state pairs with d*(dst) < d*(src), src alive.
    pub good: Vec<(usize, usize)>,
    /// Remaining distinct (src, dst) pairs with src alive.
    pub bad: Vec<(usize, usize)>,
}

/// Expand distances and label the sample's transitions.
pub fn label_transitions(
    task: Arc<GroundTask>,
    graph: StateSpaceGraph,
) -> Result<TrainingSample, LearnError> {
    let dist = graph.distances();
    if dist[graph.init] == Distance::Unreachable {
        return Err(LearnError::UnsolvableInit(task.instance.name.clone()));
    }
    let alive: Vec<usize> = (0..graph.states.len())
        .filter(|&s| dist[s] != Distance::Unreachable && !graph.is_goal(s))
        .collect();
    let alive_set: HashSet<usize> = alive.iter().copied().collect();
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for &(src, _, dst) in &graph.edges {
        if !alive_set.contains(&src) || !pairs.insert((src, dst)) {
            continue;
        }
        let decreasing = match (dist[src], dist[dst]) {
            (Distance::Finite(a), Distance::Finite(b)) => b < a,
            _ => false,
        };
        if decreasing {
            good.push((src, dst));
        } else {
            bad.push((src, dst));
        }
    }
    good.sort_unstable();
    bad.sort_unstable();
    Ok(TrainingSample {
        task,
        graph,
        dist,
        alive,
        good,
        bad,
    })
}

/// The boolean abstraction of one feature over a transition: sign at the
/// source and direction of change (-1 down, 0 frozen, +1 up).
type Pattern = Vec<(bool, i8)>;

/// Length of the statically encoded termination certificate; selections
/// needing longer sieve runs are treated as out of reach.
const CERT_ROWS: usize = 8;

fn sign(v: Value) -> bool {
    match v {
        Value::Bool(b) => b,
        Value::Num(n) => n > 0,
    }
}

fn delta(a: Value, b: Value) -> i8 {
    match b.cmp(&a) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

fn pattern(src: &FeatureValuation, dst: &FeatureValuation) -> Pattern {
    src.0
        .iter()
        .zip(&dst.0)
        .map(|(&a, &b)| (sign(a), delta(a, b)))
        .collect()
}

/// The constraint model plus the bookkeeping needed to decode models and
/// check termination certificates.
pub struct Encoding {
    pub cs: WeightedClauseSet,
    /// Selector variable per pool feature.
    pub sel: Vec<Lit>,
    /// Variable per candidate-transition equivalence class.
    pub class_var: Vec<Lit>,
    cand_patterns: Vec<Pattern>,
    fatal_patterns: Vec<Pattern>,
    /// Candidate class ids available at each alive state.
    cover: Vec<Vec<usize>>,
    alive_sigs: Vec<Vec<bool>>,
    goal_sigs: Vec<Vec<bool>>,
}

/// Build the Weighted Max-SAT model:
/// hard (a) every alive state keeps a chosen candidate transition class,
/// hard (b) chosen classes are feature-separated from every transition
///          into an unsolvable state, and strictly change some selected
///          feature (a class no feature sees cannot certify progress),
/// hard (c) goal and alive signature classes are separated;
/// soft: not selecting feature f, weighted by cost(f).
///
/// Termination of the chosen classes is not part of the static model; it
/// is decided per feature subset by [`Encoding::terminating_selection`].
pub fn encode(samples: &[TrainingSample], pool: &[Feature]) -> Encoding {
    let exprs: Vec<FeatureExpr> = pool.iter().map(|f| f.expr.clone()).collect();
    let mut cand_ids: HashMap<Pattern, usize> = HashMap::new();
    let mut cand_patterns: Vec<Pattern> = Vec::new();
    let mut fatal_ids: HashSet<Pattern> = HashSet::new();
    let mut fatal_patterns: Vec<Pattern> = Vec::new();
    let mut cover: Vec<Vec<usize>> = Vec::new();
    let mut alive_sigs: Vec<Vec<bool>> = Vec::new();
    let mut goal_sigs: Vec<Vec<bool>> = Vec::new();
    let mut alive_sig_seen: HashSet<Vec<bool>> = HashSet::new();
    let mut goal_sig_seen: HashSet<Vec<bool>> = HashSet::new();
    let mut mutex: Vec<(usize, usize)> = Vec::new();
    let mut mutex_seen: HashSet<(usize, usize)> = HashSet::new();

    for sample in samples {
        let ctx = InstanceContext::new(&sample.task);
        let vals: Vec<FeatureValuation> = sample
            .graph
            .states
            .iter()
            .map(|s| valuate(&exprs, &ctx, s))
            .collect();
        let mut per_state: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut pair_class: HashMap<(usize, usize), usize> = HashMap::new();
        for &(src, dst) in sample.good.iter().chain(&sample.bad) {
            let p = pattern(&vals[src], &vals[dst]);
            if sample.dist[dst] == Distance::Unreachable {
                if fatal_ids.insert(p.clone()) {
                    fatal_patterns.push(p);
                }
                continue;
            }
            let next = cand_patterns.len();
            let id = *cand_ids.entry(p.clone()).or_insert_with(|| {
                cand_patterns.push(p);
                next
            });
            pair_class.insert((src, dst), id);
            let row = per_state.entry(src).or_default();
            if !row.contains(&id) {
                row.push(id);
            }
        }
        // a transition and its reverse permanently block each other's
        // sieve discharge (their deltas negate), so no terminating class
        // set keeps both
        for (&(src, dst), &a) in &pair_class {
            if src < dst {
                if let Some(&b) = pair_class.get(&(dst, src)) {
                    if a != b {
                        let key = (a.min(b), a.max(b));
                        if mutex_seen.insert(key) {
                            mutex.push(key);
                        }
                    }
                }
            }
        }
        for &s in &sample.alive {
            cover.push(per_state.get(&s).cloned().unwrap_or_default());
            let sig: Vec<bool> = vals[s].0.iter().map(|&v| sign(v)).collect();
            if alive_sig_seen.insert(sig.clone()) {
                alive_sigs.push(sig);
            }
        }
        for &g in &sample.graph.goals {
            let sig: Vec<bool> = vals[g].0.iter().map(|&v| sign(v)).collect();
            if goal_sig_seen.insert(sig.clone()) {
                goal_sigs.push(sig);
            }
        }
    }

    let mut cs = WeightedClauseSet::new();
    let sel: Vec<Lit> = pool.iter().map(|_| cs.new_var()).collect();
    let class_var: Vec<Lit> = cand_patterns.iter().map(|_| cs.new_var()).collect();
    for (f, feat) in pool.iter().enumerate() {
        cs.add_soft(feat.cost as u64, vec![-sel[f]]);
    }
    // (a) coverage
    for row in &cover {
        cs.add_hard(row.iter().map(|&c| class_var[c]).collect());
    }
    // (b) separation from fatal transitions, and visible progress
    for (c, cp) in cand_patterns.iter().enumerate() {
        for fp in &fatal_patterns {
            let mut clause = vec![-class_var[c]];
            clause.extend(
                (0..pool.len()).filter(|&f| cp[f] != fp[f]).map(|f| sel[f]),
            );
            cs.add_hard(clause);
        }
        let mut progress = vec![-class_var[c]];
        progress.extend(
            (0..pool.len()).filter(|&f| cp[f].1 != 0).map(|f| sel[f]),
        );
        cs.add_hard(progress);
    }
    for &(a, b) in &mutex {
        cs.add_hard(vec![-class_var[a], -class_var[b]]);
    }
    // termination certificate, statically: an ordered run of rows, each
    // holding at most one selected feature plus a direction; a chosen
    // class must be hit first by a row moving it in the row's direction.
    // This mirrors the sieve searched by `terminating_selection`, so
    // infeasible feature subsets are unsatisfiable instead of needing a
    // refutation clause each.
    let k_rows = pool.len().min(CERT_ROWS);
    let ord: Vec<Vec<Lit>> = (0..pool.len())
        .map(|_| (0..k_rows).map(|_| cs.new_var()).collect())
        .collect();
    let dirv: Vec<Lit> = pool.iter().map(|_| cs.new_var()).collect();
    for f in 0..pool.len() {
        for r in 0..k_rows {
            // only selected features occupy rows, each at most once
            cs.add_hard(vec![-ord[f][r], sel[f]]);
            for r2 in r + 1..k_rows {
                cs.add_hard(vec![-ord[f][r], -ord[f][r2]]);
            }
        }
    }
    // at most one feature per row (sequential counter)
    for r in 0..k_rows {
        let mut prev: Option<Lit> = None;
        for f in 0..pool.len() {
            let cur = cs.new_var();
            cs.add_hard(vec![-ord[f][r], cur]);
            if let Some(p) = prev {
                cs.add_hard(vec![-p, cur]);
                cs.add_hard(vec![-p, -ord[f][r]]);
            }
            prev = Some(cur);
        }
    }
    for (c, cp) in cand_patterns.iter().enumerate() {
        let moving: Vec<(usize, i8)> = cp
            .iter()
            .enumerate()
            .filter(|&(_, &(_, d))| d != 0)
            .map(|(f, &(_, d))| (f, d))
            .collect();
        let hit: Vec<Lit> = (0..k_rows).map(|_| cs.new_var()).collect();
        for r in 0..k_rows {
            let mut any = vec![-hit[r]];
            for &(f, _) in &moving {
                cs.add_hard(vec![-ord[f][r], hit[r]]);
                any.push(ord[f][r]);
            }
            cs.add_hard(any);
        }
        // av ⇔ the class survived every earlier row unhit
        let mut av_prev: Option<Lit> = None;
        for r in 0..k_rows {
            for &(f, d) in &moving {
                let mut cl = vec![
                    -class_var[c],
                    -ord[f][r],
                    if d > 0 { dirv[f] } else { -dirv[f] },
                ];
                if let Some(av) = av_prev {
                    cl.push(-av);
                }
                cs.add_hard(cl);
            }
            let av_next = cs.new_var();
            match av_prev {
                None => {
                    cs.add_hard(vec![-av_next, -hit[r]]);
                    cs.add_hard(vec![av_next, hit[r]]);
                }
                Some(av) => {
                    cs.add_hard(vec![-av_next, av]);
                    cs.add_hard(vec![-av_next, -hit[r]]);
                    cs.add_hard(vec![av_next, -av, hit[r]]);
                }
            }
            av_prev = Some(av_next);
        }
        if let Some(av) = av_prev {
            // a chosen class is killed within the run
            cs.add_hard(vec![-class_var[c], -av]);
        }
    }
    // (c) goal separation
    for a in &alive_sigs {
        for g in &goal_sigs {
            cs.add_hard(
                (0..pool.len())
                    .filter(|&f| a[f] != g[f])
                    .map(|f| sel[f])
                    .collect(),
            );
        }
    }
    Encoding {
        cs,
        sel,
        class_var,
        cand_patterns,
        fatal_patterns,
        cover,
        alive_sigs,
        goal_sigs,
    }
}

/// Pattern admission status during the certificate search.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Adm {
    Open,
    In,
    Out,
}

impl Encoding {
    /// (classes, fatal, states, total moving feature slots, max moving).
    pub fn debug_stats(&self) -> (usize, usize, usize, usize, usize) {
        let moving: Vec<usize> = self
            .cand_patterns
            .iter()
            .map(|p| p.iter().filter(|&&(_, d)| d != 0).count())
            .collect();
        (
            self.cand_patterns.len(),
            self.fatal_patterns.len(),
            self.cover.len(),
            moving.iter().sum(),
            moving.iter().copied().max().unwrap_or(0),
        )
    }

    /// True iff the selected features distinguish every goal signature
    /// from every alive signature seen in the samples.
    pub fn goal_separated(&self, selected: &[usize]) -> bool {
        self.alive_sigs.iter().all(|a| {
            self.goal_sigs
                .iter()
                .all(|g| selected.iter().any(|&f| a[f] != g[f]))
        })
    }

    /// Search for a set of candidate classes over the selected features
    /// that covers every alive state, is separated from every fatal
    /// pattern, strictly changes some selected feature, and admits a
    /// sieve termination certificate: an ordered sequence of (feature,
    /// direction) picks such that each kept class, at the first picked
    /// feature it moves, moves it in the picked direction. Returns the
    /// kept-class mask, or `None` when no such set exists. Deterministic;
    /// the search is budgeted, so very large feature subsets may be
    /// reported infeasible conservatively.
    pub fn terminating_selection(&self, selected: &[usize]) -> Option<Vec<bool>> {
        let proj = |p: &Pattern| -> Vec<(bool, i8)> {
            selected.iter().map(|&f| p[f]).collect()
        };
        let fatal: HashSet<Vec<(bool, i8)>> =
            self.fatal_patterns.iter().map(proj).collect();
        // distinct admissible projections and the classes behind them
        let mut pat_ids: HashMap<Vec<(bool, i8)>, usize> = HashMap::new();
        let mut pats: Vec<Vec<(bool, i8)>> = Vec::new();
        let mut pat_of_class: Vec<Option<usize>> = Vec::new();
        for cp in &self.cand_patterns {
            let p = proj(cp);
            let admissible =
                !fatal.contains(&p) && p.iter().any(|&(_, d)| d != 0);
            pat_of_class.push(if admissible {
                let next = pats.len();
                Some(*pat_ids.entry(p.clone()).or_insert_with(|| {
                    pats.push(p);
                    next
                }))
            } else {
                None
            });
        }
        let mut state_pats: Vec<Vec<usize>> = Vec::new();
        for row in &self.cover {
            let mut ps: Vec<usize> =
                row.iter().filter_map(|&c| pat_of_class[c]).collect();
            ps.sort_unstable();
            ps.dedup();
            if ps.is_empty() {
                return None;
            }
            state_pats.push(ps);
        }

        let k = selected.len();
        let mut status = vec![Adm::Open; pats.len()];
        let mut used = vec![false; k];
        let mut budget = 100_000usize;
        if !certificate_dfs(&pats, &state_pats, &mut status, &mut used, &mut budget) {
            return None;
        }
        // extend the certificate to keep as many classes as possible:
        // open patterns move no used feature, so admitting a feature's
        // unanimous-direction movers stays sound
        for f in 0..k {
            let movers: Vec<usize> = (0..pats.len())
                .filter(|&p| status[p] == Adm::Open && pats[p][f].1 != 0)
                .collect();
            if movers.is_empty() {
                continue;
            }
            let ups = movers.iter().filter(|&&p| pats[p][f].1 > 0).count();
            let dir: i8 = if ups * 2 >= movers.len() { 1 } else { -1 };
            for p in movers {
                status[p] = if pats[p][f].1 == dir { Adm::In } else { Adm::Out };
            }
        }
        Some(
            pat_of_class
                .iter()
                .map(|po| po.map_or(false, |p| status[p] == Adm::In))
                .collect(),
        )
    }
}

/// Depth-first search over certificate sequences. Picking (feature f,
/// direction d) admits every still-open pattern moving f in direction d
/// and drops those moving it the other way. Succeeds once the admitted
/// patterns cover every alive state; prunes branches where some state has
/// lost all its patterns.
fn certificate_dfs(
    pats: &[Vec<(bool, i8)>],
    state_pats: &[Vec<usize>],
    status: &mut [Adm],
    used: &mut [bool],
    budget: &mut usize,
) -> bool {
    if state_pats
        .iter()
        .all(|ps| ps.iter().any(|&p| status[p] == Adm::In))
    {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    for f in 0..used.len() {
        if used[f] {
            continue;
        }
        let movers: Vec<usize> = (0..pats.len())
            .filter(|&p| status[p] == Adm::Open && pats[p][f].1 != 0)
            .collect();
        if movers.is_empty() {
            continue;
        }
        used[f] = true;
        for dir in [1i8, -1] {
            for &p in &movers {
                status[p] = if pats[p][f].1 == dir { Adm::In } else { Adm::Out };
            }
            let viable = state_pats
                .iter()
                .all(|ps| ps.iter().any(|&p| status[p] != Adm::Out));
            if viable && certificate_dfs(pats, state_pats, status, used, budget) {
                return true;
            }
            for &p in &movers {
                status[p] = Adm::Open;
            }
        }
        used[f] = false;
    }
    false
}

/// Rebuild a policy from a satisfying assignment: Φ = selected features,
/// rules = deduplicated abstractions of the chosen classes over Φ.
pub fn decode(model: &[bool], enc: &Encoding, pool: &[Feature]) -> Policy {
    let selected: Vec<usize> = (0..pool.len())
        .filter(|&f| model[(enc.sel[f] - 1) as usize])
        .collect();
    let features: Vec<FeatureExpr> = selected.iter().map(|&f| pool[f].expr.clone()).collect();
    let mut rules = Vec::new();
    let mut seen = HashSet::new();
    for (g, gp) in enc.cand_patterns.iter().enumerate() {
        if !model[(enc.class_var[g] - 1) as usize] {
            continue;
        }
        let mut conds = Vec::new();
        let mut effs = Vec::new();
        for (phi, &f) in selected.iter().enumerate() {
            let (src_sign, change) = gp[f];
            let boolean = pool[f].expr.is_boolean();
            let cond_op = match (boolean, src_sign) {
                (true, true) => CondOp::IsTrue,
                (true, false) => CondOp::IsFalse,
                (false, true) => CondOp::GtZero,
                (false, false) => CondOp::EqZero,
            };
            conds.push(Condition {
                feature: phi,
                op: cond_op,
            });
            let eff_op = match (boolean, change) {
                (_, 0) => None,
                (true, 1) => Some(EffOp::SetTrue),
                (true, _) => Some(EffOp::SetFalse),
                (false, 1) => Some(EffOp::Inc),
                (false, _) => Some(EffOp::Dec),
            };
            if let Some(op) = eff_op {
                effs.push(Effect { feature: phi, op });
            }
        }
        let key: Vec<(usize, u8, bool)> = conds
            .iter()
            .map(|c| (c.feature, c.op as u8, true))
            .chain(effs.iter().map(|e| (e.feature, e.op as u8, false)))
            .collect();
        if seen.insert(key) {
            rules.push(PolicyRule { conds, effs });
        }
    }
    Policy { features, rules }
}

#[derive(Clone, Debug)]
pub struct LearnConfig {
    /// Maximum feature cost admitted into the pool.
    pub max_complexity: u32,
    /// Cap on pool size after pruning (cheapest kept).
    pub max_pool: usize,
    /// CEGIS iteration budget.
    pub max_iterations: usize,
    pub expand_limits: Limits,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            max_complexity: 8,
            max_pool: 400,
            max_iterations: 20,
            expand_limits: Limits::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LearnReport {
    pub iterations: usize,
    pub pool_size: usize,
    pub selected: Vec<String>,
    pub total_cost: u64,
    pub train_outcomes: Vec<String>,
    pub validate_outcomes: Vec<String>,
}

fn outcome_name(o: &VerifyOutcome) -> String {
    match o {
        VerifyOutcome::Solves => "Solves".to_string(),
        VerifyOutcome::Cycle(c) => format!("Cycle({})", c.len()),
        VerifyOutcome::DeadEnd(_) => "DeadEnd".to_string(),
        VerifyOutcome::Unknown { explored } => format!("Unknown({explored})"),
    }
}

fn prepare_samples(
    train: &[Arc<GroundTask>],
    limits: &Limits,
) -> Result<Vec<TrainingSample>, LearnError> {
    train
        .iter()
        .map(|task| {
            let graph = expand(task, limits)?;
            label_transitions(task.clone(), graph)
        })
        .collect()
}

/// Drop every feature whose sign-and-delta behavior over the sample
/// states and transitions duplicates a cheaper feature's. The encoding
/// and the certificate search only observe that behavior, so the
/// reduction preserves the set of feasible selections and their optimum
/// while shrinking the subset lattice the solver explores.
fn dedup_columns(samples: &[TrainingSample], pool: Vec<Feature>) -> Vec<Feature> {
    let exprs: Vec<FeatureExpr> = pool.iter().map(|f| f.expr.clone()).collect();
    let mut columns: Vec<Vec<i8>> = vec![Vec::new(); pool.len()];
    for sample in samples {
        let ctx = InstanceContext::new(&sample.task);
        let vals: Vec<FeatureValuation> = sample
            .graph
            .states
            .iter()
            .map(|s| valuate(&exprs, &ctx, s))
            .collect();
        for v in &vals {
            for (f, &x) in v.0.iter().enumerate() {
                columns[f].push(sign(x) as i8);
            }
        }
        for &(src, dst) in sample.good.iter().chain(&sample.bad) {
            for f in 0..pool.len() {
                columns[f].push(delta(vals[src].0[f], vals[dst].0[f]));
            }
        }
    }
    // the pool is cost-ordered, so the first of each column survives
    let mut seen: HashSet<Vec<i8>> = HashSet::new();
    pool.into_iter()
        .zip(columns)
        .filter_map(|(f, col)| seen.insert(col).then_some(f))
        .collect()
}

fn build_pool(samples: &[TrainingSample], max_complexity: u32, max_pool: usize) -> Vec<Feature> {
    let ctxs: Vec<InstanceContext> = samples
        .iter()
        .map(|s| InstanceContext::new(&s.task))
        .collect();
    let groups: Vec<(&InstanceContext, &[State])> = ctxs
        .iter()
        .zip(samples)
        .map(|(c, s)| (c, s.graph.states.as_slice()))
        .collect();
    let mut pool = generate_pool(&groups, max_complexity);
    pool.truncate(max_pool);
    pool
}

/// Learn the cheapest policy that verifies on all training instances;
/// the report additionally lists verification outcomes on the validation
/// instances.
pub fn learn_policy(
    train: &[Arc<GroundTask>],
    validate: &[Arc<GroundTask>],
    config: &LearnConfig,
) -> Result<(Policy, LearnReport), LearnError> {
    learn_policy_with_pool(train, validate, config, None)
}

/// [`learn_policy`] over a caller-supplied pool (used by oracle tests).
pub fn learn_policy_with_pool(
    train: &[Arc<GroundTask>],
    validate: &[Arc<GroundTask>],
    config: &LearnConfig,
    pool: Option<Vec<Feature>>,
) -> Result<(Policy, LearnReport), LearnError> {
    let samples = prepare_samples(train, &config.expand_limits)?;
    let pool = match pool {
        Some(p) => p,
        None => build_pool(&samples, config.max_complexity, config.max_pool),
    };
    let pool = dedup_columns(&samples, pool);
    let mut enc = encode(&samples, &pool);
    // bound on refuted feature subsets across the whole run
    let mut refutations_left = 2_000_000usize;
    for iteration in 1..=config.max_iterations {
        let mut budget_hit = false;
        let outcome = {
            let enc = &enc;
            let refutations_left = &mut refutations_left;
            let budget_hit = &mut budget_hit;
            // feature-cost ceiling for the ascending search; policies
            // beyond it are treated as out of reach
            maxsat::solve_ascending(&enc.cs, 64, |model| {
                let selected: Vec<usize> = (0..pool.len())
                    .filter(|&f| model[(enc.sel[f] - 1) as usize])
                    .collect();
                if enc.terminating_selection(&selected).is_some() {
                    return None;
                }
                if *refutations_left == 0 {
                    *budget_hit = true;
                    return Some(Vec::new()); // abort the descent
                }
                *refutations_left -= 1;
                if std::env::var("GPLAN_DEBUG").is_ok() {
                    eprintln!(
                        "refuted subset #{}: {} features",
                        2_000_000 - *refutations_left,
                        selected.len()
                    );
                }
                // no covering terminating class set exists over this
                // subset, hence over any of its subsets: demand a
                // feature outside it
                let sel_set: HashSet<usize> = selected.into_iter().collect();
                Some(
                    (0..pool.len())
                        .filter(|f| !sel_set.contains(f))
                        .map(|f| enc.sel[f])
                        .collect(),
                )
            })?
        };
        let mut model = match outcome {
            MaxSatOutcome::Optimum { model, .. } => model,
            MaxSatOutcome::Unsat if budget_hit => {
                return Err(LearnError::BudgetExhausted(config.max_iterations))
            }
            MaxSatOutcome::Unsat => return Err(LearnError::Infeasible),
        };
        let selected: Vec<usize> = (0..pool.len())
            .filter(|&f| model[(enc.sel[f] - 1) as usize])
            .collect();
        // the certificate's class choice replaces the solver's
        let keep = enc
            .terminating_selection(&selected)
            .expect("accepted model lost its certificate");
        for (c, &k) in keep.iter().enumerate() {
            model[(enc.class_var[c] - 1) as usize] = k;
        }
        let policy = decode(&model, &enc, &pool);
        let train_outcomes: Vec<VerifyOutcome> = train
            .iter()
            .map(|t| verify(&policy, t, &config.expand_limits))
            .collect::<Result<_, _>>()?;
        if std::env::var("GPLAN_DEBUG").is_ok() {
            eprintln!(
                "iter {iteration}: train={:?} feats={:?}",
                train_outcomes,
                policy.features.iter().map(|f| f.to_string()).collect::<Vec<_>>()
            );
        }
        if train_outcomes.iter().all(|o| *o == VerifyOutcome::Solves) {
            let validate_outcomes: Vec<String> = validate
                .iter()
                .map(|t| Ok(outcome_name(&verify(&policy, t, &config.expand_limits)?)))
                .collect::<Result<_, LearnError>>()?;
            let selected: Vec<String> = policy.features.iter().map(|f| f.to_string()).collect();
            let total_cost = policy.features.iter().map(|f| f.cost() as u64).sum();
            let report = LearnReport {
                iterations: iteration,
                pool_size: pool.len(),
                selected,
                total_cost,
                train_outcomes: train_outcomes.iter().map(outcome_name).collect(),
                validate_outcomes,
            };
            return Ok((policy, report));
        }
        // block exactly this feature subset and try again
        let blocking: Vec<Lit> = (0..pool.len())
            .map(|f| {
                if model[(enc.sel[f] - 1) as usize] {
                    -enc.sel[f]
                } else {
                    enc.sel[f]
                }
            })
            .collect();
        enc.cs.add_hard(blocking);
    }
    Err(LearnError::BudgetExhausted(config.max_iterations))
}

// ---------------------------------------------------------------------------
// Sketch learning

#[derive(Clone, Debug)]
pub struct SketchConfig {
    pub max_complexity: u32,
    pub max_pool: usize,
    /// Width bound every segment must respect.
    pub k: usize,
    pub max_rules: usize,
    /// Cap on candidate sketches evaluated.
    pub max_candidates: usize,
    pub expand_limits: Limits,
}

impl Default for SketchConfig {
    fn default() -> Self {
        SketchConfig {
            max_complexity: 4,
            max_pool: 40,
            k: 2,
            max_rules: 1,
            max_candidates: 50_000,
            expand_limits: Limits::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SketchReport {
    pub candidates_tried: usize,
    pub total_cost: u64,
    /// Measured IW width of every segment, per training instance.
    pub segment_widths: Vec<Vec<usize>>,
}

/// All total-condition rules over the subset's features, in a fixed order.
fn rule_space(features: &[&Feature]) -> Vec<PolicyRule> {
    let n = features.len();
    let mut rules = Vec::new();
    let cond_ops = |b: bool| {
        if b {
            [CondOp::IsTrue, CondOp::IsFalse]
        } else {
            [CondOp::GtZero, CondOp::EqZero]
        }
    };
    let eff_ops = |b: bool| {
        if b {
            [None, Some(EffOp::SetTrue), Some(EffOp::SetFalse), Some(EffOp::AnyBool)]
        } else {
            [None, Some(EffOp::Dec), Some(EffOp::Inc), Some(EffOp::AnyNum)]
        }
    };
    let mut cond_choice = vec![0usize; n];
    loop {
        let mut eff_choice = vec![0usize; n];
        loop {
            let effs: Vec<Effect> = (0..n)
                .filter_map(|i| {
                    eff_ops(features[i].expr.is_boolean())[eff_choice[i]]
                        .map(|op| Effect { feature: i, op })
                })
                .collect();
            if !effs.is_empty() {
                let conds: Vec<Condition> = (0..n)
                    .map(|i| Condition {
                        feature: i,
                        op: cond_ops(features[i].expr.is_boolean())[cond_choice[i]],
                    })
                    .collect();
                rules.push(PolicyRule { conds, effs });
            }
            if !advance(&mut eff_choice, 4) {
                break;
            }
        }
        if n == 0 || !advance(&mut cond_choice, 2) {
            break;
        }
    }
    rules
}

fn advance(choice: &mut [usize], base: usize) -> bool {
    for slot in choice.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Learn a sketch by generate-and-test: feature subsets of size ≤ 2 in
/// ascending total cost, rule sets in ascending size, accepted when SIW_R
/// terminates on every training instance with all segments at width ≤ k.
pub fn learn_sketch(
    train: &[Arc<GroundTask>],
    config: &SketchConfig,
) -> Result<(Sketch, SketchReport), LearnError> {
    let samples = prepare_samples(train, &config.expand_limits)?;
    let pool = build_pool(&samples, config.max_complexity, config.max_pool);
    drop(samples);

    // candidate subsets: empty, singles, pairs — ascending total cost
    let mut subsets: Vec<Vec<usize>> = vec![Vec::new()];
    for i in 0..pool.len() {
        subsets.push(vec![i]);
    }
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            subsets.push(vec![i, j]);
        }
    }
    subsets.sort_by_key(|s| {
        (
            s.iter().map(|&f| pool[f].cost as u64).sum::<u64>(),
            s.clone(),
        )
    });

    let siw_limits = SiwLimits {
        k_max: config.k,
        node_budget: 200_000,
        max_segments: 50,
    };
    let mut tried = 0usize;
    for subset in &subsets {
        let feats: Vec<&Feature> = subset.iter().map(|&f| &pool[f]).collect();
        let features: Vec<FeatureExpr> = feats.iter().map(|f| f.expr.clone()).collect();
        let rules = rule_space(&feats);
        // rule sets of ascending size
        let mut rule_sets: Vec<Vec<usize>> = Vec::new();
        if subset.is_empty() {
            rule_sets.push(Vec::new());
        } else {
            if config.max_rules >= 1 {
                rule_sets.extend((0..rules.len()).map(|i| vec![i]));
            }
            if config.max_rules >= 2 {
                for i in 0..rules.len() {
                    for j in i + 1..rules.len() {
                        rule_sets.push(vec![i, j]);
                    }
                }
            }
        }
        for set in rule_sets {
            tried += 1;
            if tried > config.max_candidates {
                return Err(LearnError::NoSketch);
            }
            let sketch = Sketch {
                features: features.clone(),
                rules: set.iter().map(|&i| rules[i].clone()).collect(),
            };
            let mut widths = Vec::new();
            let mut ok = true;
            for task in train {
                match siw_r(task, &sketch, &siw_limits) {
                    Ok(res) => widths.push(res.segments.iter().map(|s| s.k).collect()),
                    Err(_) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let total_cost = feats.iter().map(|f| f.cost as u64).sum();
                return Ok((
                    sketch,
                    SketchReport {
                        candidates_tried: tried,
                        total_cost,
                        segment_widths: widths,
                    },
                ));
            }
        }
    }
    Err(LearnError::NoSketch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{make_blocks_clear, make_delivery};
    use crate::strips::ground;

    fn sample_of(task: Arc<GroundTask>) -> TrainingSample {
        let graph = expand(&task, &Limits::default()).unwrap();
        label_transitions(task, graph).unwrap()
    }

    /// Independent d* oracle: Bellman-style relaxation to fixpoint.
    fn dstar_oracle(graph: &StateSpaceGraph) -> Vec<Option<u32>> {
        let n = graph.states.len();
        let mut d: Vec<Option<u32>> = vec![None; n];
        for &g in &graph.goals {
            d[g] = Some(0);
        }
        loop {
            let mut changed = false;
            for &(src, _, dst) in &graph.edges {
                if let Some(dd) = d[dst] {
                    if d[src].map_or(true, |ds| ds > dd + 1) {
                        d[src] = Some(dd + 1);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        d
    }

    #[test]
    fn labels_match_independent_oracle() {
        let task = Arc::new(ground(Arc::new(make_delivery(2, 2, 1, 0).unwrap())).unwrap());
        let sample = sample_of(task);
        let oracle = dstar_oracle(&sample.graph);
        for (s, o) in oracle.iter().enumerate() {
            assert_eq!(sample.dist[s].finite(), *o);
        }
        let mut seen = HashSet::new();
        for &(src, _, dst) in &sample.graph.edges {
            if !seen.insert((src, dst)) {
                continue;
            }
            let src_alive = oracle[src].is_some() && !sample.graph.is_goal(src);
            let good = src_alive
                && matches!((oracle[src], oracle[dst]), (Some(a), Some(b)) if b < a);
            assert_eq!(sample.good.contains(&(src, dst)), good);
            assert_eq!(sample.bad.contains(&(src, dst)), src_alive && !good);
        }
        // goal-adjacent edges are good candidates
        assert!(sample
            .good
            .iter()
            .any(|&(_, dst)| sample.graph.is_goal(dst)));
    }

    #[test]
    fn trivial_goal_instance_learns_empty_policy() {
        // a 1x1 grid with no packages: one state, no transitions
        let task = Arc::new(ground(Arc::new(make_delivery(1, 1, 0, 0).unwrap())).unwrap());
        let (policy, report) =
            learn_policy(&[task.clone()], &[task], &LearnConfig::default()).unwrap();
        assert!(policy.rules.is_empty());
        assert!(policy.features.is_empty());
        assert_eq!(report.iterations, 1);
        assert_eq!(report.validate_outcomes, vec!["Solves"]);
    }

    #[test]
    fn learns_blocks_clear_policy_that_generalizes() {
        let train: Vec<Arc<GroundTask>> = [(2, 0), (3, 1)]
            .iter()
            .map(|&(b, s)| Arc::new(ground(Arc::new(make_blocks_clear(b, s).unwrap())).unwrap()))
            .collect();
        let validate: Vec<Arc<GroundTask>> = [(4, 5), (5, 9)]
            .iter()
            .map(|&(b, s)| Arc::new(ground(Arc::new(make_blocks_clear(b, s).unwrap())).unwrap()))
            .collect();
        let config = LearnConfig {
            max_complexity: 7,
            ..LearnConfig::default()
        };
        let (policy, report) = learn_policy(&train, &validate, &config).unwrap();
        assert!(!policy.rules.is_empty());
        assert!(report.train_outcomes.iter().all(|o| o == "Solves"));
        assert!(
            report.validate_outcomes.iter().all(|o| o == "Solves"),
            "validation outcomes: {:?} with features {:?}",
            report.validate_outcomes,
            report.selected
        );
    }

    #[test]
    fn too_small_pool_is_infeasible() {
        let train = vec![Arc::new(
            ground(Arc::new(make_blocks_clear(3, 1).unwrap())).unwrap(),
        )];
        let config = LearnConfig {
            max_complexity: 1,
            ..LearnConfig::default()
        };
        match learn_policy(&train, &[], &config) {
            Err(LearnError::Infeasible) => {}
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn decoded_rules_avoid_dead_ends() {
        // a corridor with a "sink" action that strands the walker: the
        // learned policy must never be compatible with a sink transition
        let dom = "(define (domain chute) (:requirements :strips)
            (:predicates (at ?x) (lost ?x) (succ ?x ?y))
            (:action step :parameters (?x ?y)
              :precondition (and (at ?x) (succ ?x ?y))
              :effect (and (at ?y) (not (at ?x))))
            (:action sink :parameters (?x)
              :precondition (and (at ?x))
              :effect (and (lost ?x) (not (at ?x)))))";
        let prob = "(define (problem walk) (:domain chute)
            (:objects c1 c2 c3 c4)
            (:init (at c1) (succ c1 c2) (succ c2 c1) (succ c2 c3)
                   (succ c3 c2) (succ c3 c4) (succ c4 c3))
            (:goal (and (at c4))))";
        let domain = crate::pddl::parse_domain(dom).value.unwrap();
        let inst = crate::pddl::parse_problem(prob, Arc::new(domain)).value.unwrap();
        let train = vec![Arc::new(ground(Arc::new(inst)).unwrap())];
        let config = LearnConfig {
            max_complexity: 4,
            ..LearnConfig::default()
        };
        let (policy, report) = learn_policy(&train, &[], &config).unwrap();
        assert!(report.train_outcomes.iter().all(|o| o == "Solves"));
        let sample = sample_of(train[0].clone());
        let ctx = InstanceContext::new(&sample.task);
        for &(src, dst) in &sample.bad {
            if sample.dist[dst] != Distance::Unreachable {
                continue;
            }
            let f = valuate(&policy.features, &ctx, &sample.graph.states[src]);
            let f2 = valuate(&policy.features, &ctx, &sample.graph.states[dst]);
            assert!(
                !crate::policy::compatible(&f, &f2, &policy),
                "fatal transition {src}->{dst} is policy-compatible"
            );
        }
    }

    #[test]
    fn sketch_learning_on_delivery() {
        let train: Vec<Arc<GroundTask>> = [(2, 2, 1, 0), (2, 2, 2, 3)]
            .iter()
            .map(|&(n, m, p, s)| {
                Arc::new(ground(Arc::new(make_delivery(n, m, p, s).unwrap())).unwrap())
            })
            .collect();
        // one rule suffices with segments at width <= 2
        let config = SketchConfig {
            k: 2,
            max_rules: 1,
            ..SketchConfig::default()
        };
        let (sketch, report) = learn_sketch(&train, &config).unwrap();
        assert!(sketch.rules.len() <= 1);
        assert!(report.candidates_tried >= 1);
        for widths in &report.segment_widths {
            assert!(widths.iter().all(|&k| k <= 2));
        }
        // no rules allowed on a nontrivial multi-package instance at k=1
        let config = SketchConfig {
            k: 1,
            max_rules: 0,
            ..SketchConfig::default()
        };
        match learn_sketch(&train, &config) {
            Err(LearnError::NoSketch) => {}
            other => panic!("expected NoSketch, got {:?}", other.map(|(s, _)| s)),
        }
    }
}
