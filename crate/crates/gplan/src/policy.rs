//! The C↦E policy-rule language: conditions over feature valuations,
//! effects constraining 1-step valuation changes, reactive execution, and
//! exhaustive verification over the reachable state space.
//!
//! A pair of valuations (f, f') satisfies a rule when f makes the rule's
//! conditions true, every effect is respected, and every feature of Φ not
//! mentioned in the effects keeps its value (the frame requirement).

use crate::features::{valuate, FeatureExpr, FeatureValuation, InstanceContext, Value};
use crate::graph::Limits;
use crate::strips::{Domain, GroundTask, State};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("rule {rule} references feature index {feature} out of range")]
    FeatureOutOfRange { rule: usize, feature: usize },
    #[error("rule {rule}: token `{token}` does not fit feature `{feature}`")]
    KindMismatch {
        rule: usize,
        token: String,
        feature: String,
    },
    #[error("rule {rule}: unknown token `{token}`")]
    BadToken { rule: usize, token: String },
    #[error("rule {rule}: expected {expected} entries, got {got}")]
    LengthMismatch {
        rule: usize,
        expected: usize,
        got: usize,
    },
    #[error(transparent)]
    Feature(#[from] crate::features::FeatureError),
    #[error("malformed policy JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CondOp {
    IsTrue,
    IsFalse,
    EqZero,
    GtZero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EffOp {
    SetTrue,
    SetFalse,
    AnyBool,
    Dec,
    Inc,
    AnyNum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Condition {
    pub feature: usize,
    pub op: CondOp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Effect {
    pub feature: usize,
    pub op: EffOp,
}

/// One rule C ↦ E. Feature indices refer to the owning policy's Φ;
/// each feature appears at most once per side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyRule {
    pub conds: Vec<Condition>,
    pub effs: Vec<Effect>,
}

/// Feature set Φ plus rules. The same type serves as a sketch; only the
/// satisfaction semantics differ (1-step filter here, subproblem goal in
/// the width module).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    pub features: Vec<FeatureExpr>,
    pub rules: Vec<PolicyRule>,
}

impl CondOp {
    fn is_boolean(self) -> bool {
        matches!(self, CondOp::IsTrue | CondOp::IsFalse)
    }

    fn token(self) -> &'static str {
        match self {
            CondOp::IsTrue => "p",
            CondOp::IsFalse => "-p",
            CondOp::EqZero => "n=0",
            CondOp::GtZero => "n>0",
        }
    }

    fn from_token(tok: &str) -> Option<CondOp> {
        Some(match tok {
            "p" => CondOp::IsTrue,
            "-p" => CondOp::IsFalse,
            "n=0" => CondOp::EqZero,
            "n>0" => CondOp::GtZero,
            _ => return None,
        })
    }
}

impl EffOp {
    fn is_boolean(self) -> bool {
        matches!(self, EffOp::SetTrue | EffOp::SetFalse | EffOp::AnyBool)
    }

    fn token(self) -> &'static str {
        match self {
            EffOp::SetTrue => "p",
            EffOp::SetFalse => "-p",
            EffOp::AnyBool => "p?",
            EffOp::Dec => "dec",
            EffOp::Inc => "inc",
            EffOp::AnyNum => "n?",
        }
    }

    fn from_token(tok: &str) -> Option<EffOp> {
        Some(match tok {
            "p" => EffOp::SetTrue,
            "-p" => EffOp::SetFalse,
            "p?" => EffOp::AnyBool,
            "dec" => EffOp::Dec,
            "inc" => EffOp::Inc,
            "n?" => EffOp::AnyNum,
            _ => return None,
        })
    }
}

impl Policy {
    /// Check feature arities against the domain and rule/feature kind
    /// consistency.
    pub fn validate(&self, domain: &Domain) -> Result<(), PolicyError> {
        for f in &self.features {
            f.validate(domain)?;
        }
        for (ri, rule) in self.rules.iter().enumerate() {
            for c in &rule.conds {
                let f = self
                    .features
                    .get(c.feature)
                    .ok_or(PolicyError::FeatureOutOfRange {
                        rule: ri,
                        feature: c.feature,
                    })?;
                if f.is_boolean() != c.op.is_boolean() {
                    return Err(PolicyError::KindMismatch {
                        rule: ri,
                        token: c.op.token().to_string(),
                        feature: f.to_string(),
                    });
                }
            }
            for e in &rule.effs {
                let f = self
                    .features
                    .get(e.feature)
                    .ok_or(PolicyError::FeatureOutOfRange {
                        rule: ri,
                        feature: e.feature,
                    })?;
                if f.is_boolean() != e.op.is_boolean() {
                    return Err(PolicyError::KindMismatch {
                        rule: ri,
                        token: e.op.token().to_string(),
                        feature: f.to_string(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Does valuation `f` make the rule's conditions true?
pub fn cond_holds(f: &FeatureValuation, rule: &PolicyRule) -> bool {
    rule.conds.iter().all(|c| match (f.0[c.feature], c.op) {
        (Value::Bool(b), CondOp::IsTrue) => b,
        (Value::Bool(b), CondOp::IsFalse) => !b,
        (Value::Num(n), CondOp::EqZero) => n == 0,
        (Value::Num(n), CondOp::GtZero) => n > 0,
        _ => false,
    })
}

/// Does the valuation pair (f, f') satisfy the rule? Conditions must hold
/// at f, effects must be respected, and unmentioned features are frozen.
pub fn pair_satisfies(f: &FeatureValuation, f2: &FeatureValuation, rule: &PolicyRule) -> bool {
    if !cond_holds(f, rule) {
        return false;
    }
    for e in &rule.effs {
        let ok = match (f.0[e.feature], f2.0[e.feature], e.op) {
            (_, Value::Bool(b), EffOp::SetTrue) => b,
            (_, Value::Bool(b), EffOp::SetFalse) => !b,
            (Value::Bool(_), Value::Bool(_), EffOp::AnyBool) => true,
            (Value::Num(a), Value::Num(b), EffOp::Dec) => b < a,
            (Value::Num(a), Value::Num(b), EffOp::Inc) => b > a,
            (Value::Num(_), Value::Num(_), EffOp::AnyNum) => true,
            _ => false,
        };
        if !ok {
            return false;
        }
    }
    // frame: features without an effect keep their value
    for i in 0..f.0.len() {
        if rule.effs.iter().all(|e| e.feature != i) && f.0[i] != f2.0[i] {
            return false;
        }
    }
    true
}

/// Is the transition (f, f') compatible with some rule of the policy?
pub fn compatible(f: &FeatureValuation, f2: &FeatureValuation, policy: &Policy) -> bool {
    policy.rules.iter().any(|r| pair_satisfies(f, f2, r))
}

/// Outcome of exhaustive policy verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    /// Every maximal compatible trajectory from init reaches a goal state.
    Solves,
    /// A cycle among reachable non-goal states, listed in order.
    Cycle(Vec<State>),
    /// A reachable non-goal state with no compatible successor.
    DeadEnd(State),
    /// Expansion limits exceeded before a verdict.
    Unknown { explored: usize },
}

/// Exhaustively verify a policy: BFS over compatible edges from init,
/// stopping at goal states. Solves iff no non-goal sink and no cycle among
/// non-goal states exists in that subgraph.
pub fn verify(
    policy: &Policy,
    task: &GroundTask,
    limits: &Limits,
) -> Result<VerifyOutcome, PolicyError> {
    policy.validate(&task.instance.domain)?;
    let ctx = InstanceContext::new(task);
    let val = |s: &State| valuate(&policy.features, &ctx, s);

    let mut index: HashMap<State, usize> = HashMap::new();
    let mut states = vec![task.init.clone()];
    let mut vals = vec![val(&task.init)];
    index.insert(task.init.clone(), 0);
    let mut succs: Vec<Vec<usize>> = Vec::new();
    let mut is_goal = vec![task.is_goal(&task.init)];
    let mut next = 0usize;
    while next < states.len() {
        if states.len() > limits.max_states {
            return Ok(VerifyOutcome::Unknown { explored: next });
        }
        let s = states[next].clone();
        let fv = vals[next].clone();
        let mut out = Vec::new();
        if !is_goal[next] {
            for ai in task.applicable(&s) {
                let succ = task.apply_unchecked(&s, &task.actions[ai]);
                let fv2 = val(&succ);
                if !compatible(&fv, &fv2, policy) {
                    continue;
                }
                let dst = match index.get(&succ) {
                    Some(&i) => i,
                    None => {
                        let i = states.len();
                        index.insert(succ.clone(), i);
                        is_goal.push(task.is_goal(&succ));
                        states.push(succ);
                        vals.push(fv2);
                        i
                    }
                };
                if !out.contains(&dst) {
                    out.push(dst);
                }
            }
            if out.is_empty() {
                return Ok(VerifyOutcome::DeadEnd(s));
            }
        }
        succs.push(out);
        next += 1;
    }

    // cycle detection among non-goal states (goals have no successors here)
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let n = states.len();
    let mut color = vec![Color::White; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if color[root] != Color::White {
            continue;
        }
        // iterative DFS with an explicit stack of (node, next-child index)
        let mut stack = vec![(root, 0usize)];
        color[root] = Color::Gray;
        while let Some(&mut (u, ref mut ci)) = stack.last_mut() {
            if *ci < succs[u].len() {
                let v = succs[u][*ci];
                *ci += 1;
                match color[v] {
                    Color::White => {
                        color[v] = Color::Gray;
                        parent[v] = u;
                        stack.push((v, 0));
                    }
                    Color::Gray => {
                        // back edge u -> v closes a cycle
                        let mut cyc = vec![states[u].clone()];
                        let mut w = u;
                        while w != v {
                            w = parent[w];
                            cyc.push(states[w].clone());
                        }
                        cyc.reverse();
                        return Ok(VerifyOutcome::Cycle(cyc));
                    }
                    Color::Black => {}
                }
            } else {
                color[u] = Color::Black;
                stack.pop();
            }
        }
    }
    Ok(VerifyOutcome::Solves)
}

/// Successor choice rule for [`execute`].
#[derive(Clone, Copy, Debug)]
pub enum TieBreak {
    /// First compatible action in the task's fixed order.
    Lexicographic,
    /// Uniform choice among compatible actions, seeded.
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExecOutcome {
    GoalReached,
    DeadEnd,
    StepLimit,
}

/// A realized walk: `states[i] --actions[i]--> states[i+1]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<State>,
    pub actions: Vec<usize>,
    pub outcome: ExecOutcome,
}

/// Greedy reactive execution: from each state pick a compatible successor
/// until a goal, a dead end, or the step limit.
pub fn execute(
    policy: &Policy,
    task: &GroundTask,
    max_steps: usize,
    tie_break: TieBreak,
) -> Result<Trajectory, PolicyError> {
    policy.validate(&task.instance.domain)?;
    let ctx = InstanceContext::new(task);
    let mut rng = match tie_break {
        TieBreak::Lexicographic => None,
        TieBreak::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut states = vec![task.init.clone()];
    let mut actions = Vec::new();
    loop {
        let s = states.last().unwrap().clone();
        if task.is_goal(&s) {
            return Ok(Trajectory {
                states,
                actions,
                outcome: ExecOutcome::GoalReached,
            });
        }
        if actions.len() >= max_steps {
            return Ok(Trajectory {
                states,
                actions,
                outcome: ExecOutcome::StepLimit,
            });
        }
        let fv = valuate(&policy.features, &ctx, &s);
        let mut options: Vec<(usize, State)> = Vec::new();
        for ai in task.applicable(&s) {
            let succ = task.apply_unchecked(&s, &task.actions[ai]);
            let fv2 = valuate(&policy.features, &ctx, &succ);
            if compatible(&fv, &fv2, policy) {
                options.push((ai, succ));
            }
        }
        let chosen = match &mut rng {
            None => options.into_iter().next(),
            Some(rng) => {
                options.shuffle(rng);
                options.into_iter().next()
            }
        };
        match chosen {
            Some((ai, succ)) => {
                actions.push(ai);
                states.push(succ);
            }
            None => {
                return Ok(Trajectory {
                    states,
                    actions,
                    outcome: ExecOutcome::DeadEnd,
                })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON interchange

#[derive(Serialize, Deserialize)]
struct RuleJson {
    cond: Vec<Option<String>>,
    eff: Vec<Option<String>>,
}

#[derive(Serialize, Deserialize)]
struct PolicyJson {
    features: Vec<String>,
    rules: Vec<RuleJson>,
}

impl Policy {
    /// Serialize as `{"features": [...], "rules": [{"cond": [...], "eff":
    /// [...]}]}` where `cond`/`eff` are positional over the feature list
    /// (`null` = unconstrained / frozen).
    pub fn to_json(&self) -> String {
        let nf = self.features.len();
        let rules = self
            .rules
            .iter()
            .map(|r| {
                let mut cond = vec![None; nf];
                for c in &r.conds {
                    cond[c.feature] = Some(c.op.token().to_string());
                }
                let mut eff = vec![None; nf];
                for e in &r.effs {
                    eff[e.feature] = Some(e.op.token().to_string());
                }
                RuleJson { cond, eff }
            })
            .collect();
        let doc = PolicyJson {
            features: self.features.iter().map(|f| f.to_string()).collect(),
            rules,
        };
        serde_json::to_string_pretty(&doc).expect("policy serializes")
    }

    pub fn from_json(text: &str) -> Result<Policy, PolicyError> {
        let doc: PolicyJson = serde_json::from_str(text)?;
        let features = doc
            .features
            .iter()
            .map(|s| crate::features::parse_feature(s))
            .collect::<Result<Vec<_>, _>>()?;
        let nf = features.len();
        let mut rules = Vec::new();
        for (ri, r) in doc.rules.iter().enumerate() {
            for side in [&r.cond, &r.eff] {
                if side.len() != nf {
                    return Err(PolicyError::LengthMismatch {
                        rule: ri,
                        expected: nf,
                        got: side.len(),
                    });
                }
            }
            let mut conds = Vec::new();
            for (i, tok) in r.cond.iter().enumerate() {
                if let Some(tok) = tok {
                    let op = CondOp::from_token(tok).ok_or_else(|| PolicyError::BadToken {
                        rule: ri,
                        token: tok.clone(),
                    })?;
                    conds.push(Condition { feature: i, op });
                }
            }
            let mut effs = Vec::new();
            for (i, tok) in r.eff.iter().enumerate() {
                if let Some(tok) = tok {
                    let op = EffOp::from_token(tok).ok_or_else(|| PolicyError::BadToken {
                        rule: ri,
                        token: tok.clone(),
                    })?;
                    effs.push(Effect { feature: i, op });
                }
            }
            rules.push(PolicyRule { conds, effs });
        }
        Ok(Policy { features, rules })
    }
}

// ---------------------------------------------------------------------------
