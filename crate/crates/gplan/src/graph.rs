//! Exhaustive expansion of the reachable state space G(P), goal distances,
//! and label-preserving graph isomorphism.

use crate::strips::{GroundTask, State};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("expansion limit exceeded: {states} states expanded, frontier size {frontier}")]
    LimitExceeded { states: usize, frontier: usize },
    #[error("time limit exceeded after {states} states")]
    TimeLimit { states: usize },
    #[error("graph has an edge endpoint {endpoint} >= node count {n}")]
    BadEdge { endpoint: usize, n: usize },
}

/// Limits for [`expand`].
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_states: usize,
    pub max_time: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1_000_000,
            max_time: None,
        }
    }
}

/// Expanded state space of one ground task. States are numbered in BFS
/// discovery order; edge labels are indices into the task's action table.
#[derive(Clone, Debug)]
pub struct StateSpaceGraph {
    pub states: Vec<State>,
    /// (source state, action index, destination state), grouped by source
    /// in BFS order and, per source, in the task's fixed action order.
    pub edges: Vec<(usize, usize, usize)>,
    pub init: usize,
    pub goals: Vec<usize>,
}

/// Shortest goal distance of one state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Unreachable,
}

impl Distance {
    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }
}

/// Expand all states reachable from the initial state.
///
/// Successors of a state are generated in the task's fixed action order,
/// which makes the numbering deterministic. Goal states are expanded like
/// any other state: the result is the full reachable G(P).
pub fn expand(task: &GroundTask, limits: &Limits) -> Result<StateSpaceGraph, GraphError> {
    let start = Instant::now();
    let mut index: HashMap<State, usize> = HashMap::new();
    let mut states = vec![task.init.clone()];
    index.insert(task.init.clone(), 0);
    let mut edges = Vec::new();
    let mut goals = Vec::new();
    let mut next = 0usize;
    while next < states.len() {
        if let Some(t) = limits.max_time {
            if start.elapsed() > t {
                return Err(GraphError::TimeLimit { states: next });
            }
        }
        let s = states[next].clone();
        if task.is_goal(&s) {
            goals.push(next);
        }
        for ai in task.applicable(&s) {
            let succ = task.apply_unchecked(&s, &task.actions[ai]);
            let dst = match index.get(&succ) {
                Some(&i) => i,
                None => {
                    if states.len() >= limits.max_states {
                        return Err(GraphError::LimitExceeded {
                            states: next,
                            frontier: states.len() - next,
                        });
                    }
                    let i = states.len();
                    index.insert(succ.clone(), i);
                    states.push(succ);
                    i
                }
            };
            edges.push((next, ai, dst));
        }
        next += 1;
    }
    Ok(StateSpaceGraph {
        states,
        edges,
        init: 0,
        goals,
    })
}

impl StateSpaceGraph {
    pub fn is_goal(&self, s: usize) -> bool {
        self.goals.binary_search(&s).is_ok()
    }

    /// Outgoing (action, destination) lists per state.
    pub fn outgoing(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for &(src, a, dst) in &self.edges {
            out[src].push((a, dst));
        }
        out
    }

    /// d*(s): shortest path length to any goal, by reverse BFS.
    pub fn distances(&self) -> Vec<Distance> {
        let mut rev = vec![Vec::new(); self.states.len()];
        for &(src, _, dst) in &self.edges {
            rev[dst].push(src);
        }
        let mut dist = vec![Distance::Unreachable; self.states.len()];
        let mut queue = std::collections::VecDeque::new();
        for &g in &self.goals {
            if dist[g] == Distance::Unreachable {
                dist[g] = Distance::Finite(0);
                queue.push_back(g);
            }
        }
        while let Some(s) = queue.pop_front() {
            let d = match dist[s] {
                Distance::Finite(d) => d,
                Distance::Unreachable => unreachable!(),
            };
            for &p in &rev[s] {
                if dist[p] == Distance::Unreachable {
                    dist[p] = Distance::Finite(d + 1);
                    queue.push_back(p);
                }
            }
        }
        dist
    }

    /// Anonymized view with ground-action-name labels, for serialization,
    /// isomorphism checks, and the model learner.
    pub fn to_graph(&self, task: &GroundTask) -> Graph {
        Graph {
            n: self.states.len(),
            init: Some(self.init),
            goals: Some(self.goals.clone()),
            edges: self
                .edges
                .iter()
                .map(|&(src, a, dst)| (src, dst, Some(task.action_name(a))))
                .collect(),
        }
    }
}

/// Plain labeled digraph with anonymous nodes.
///
/// Serializes as `{"n": int, "init": int|null, "goals": [int]|null,
/// "edges": [[src, dst, label]]}` with `null` labels for plain graphs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub init: Option<usize>,
    pub goals: Option<Vec<usize>>,
    pub edges: Vec<(usize, usize, Option<String>)>,
}

impl Graph {
    pub fn validate(&self) -> Result<(), GraphError> {
        for &(src, dst, _) in &self.edges {
            for endpoint in [src, dst] {
                if endpoint >= self.n {
                    return Err(GraphError::BadEdge {
                        endpoint,
                        n: self.n,
                    });
                }
            }
        }
        if let Some(goals) = &self.goals {
            for &g in goals {
                if g >= self.n {
                    return Err(GraphError::BadEdge { endpoint: g, n: self.n });
                }
            }
        }
        Ok(())
    }

    /// Distinct labels, sorted; unlabeled edges contribute nothing.
    pub fn labels(&self) -> Vec<&str> {
        let mut ls: Vec<&str> = self
            .edges
            .iter()
            .filter_map(|(_, _, l)| l.as_deref())
            .collect();
        ls.sort_unstable();
        ls.dedup();
        ls
    }
}

/// A bundle of input graphs sharing a label alphabet.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GraphBundle {
    pub graphs: Vec<Graph>,
}

/// Edge-preserving (and optionally label-preserving) bijection between two
/// graphs; returns the witness mapping g1-node → g2-node when one exists.
pub fn isomorphic(g1: &Graph, g2: &Graph, respect_labels: bool) -> Option<Vec<usize>> {
    if g1.n != g2.n || g1.edges.len() != g2.edges.len() {
        return None;
    }
    let n = g1.n;
    // shared label alphabet
    let mut label_ids: HashMap<String, usize> = HashMap::new();
    let mut label_of = |l: &Option<String>| -> usize {
        match l {
            Some(s) if respect_labels => {
                let next = label_ids.len() + 1;
                *label_ids.entry(s.clone()).or_insert(next)
            }
            _ => 0,
        }
    };
    // adjacency as (src,dst) -> sorted label multiset
    let adj = |g: &Graph, label_of: &mut dyn FnMut(&Option<String>) -> usize| {
        let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (src, dst, l) in &g.edges {
            m.entry((*src, *dst)).or_default().push(label_of(l));
        }
        for v in m.values_mut() {
            v.sort_unstable();
        }
        m
    };
    let a1 = adj(g1, &mut label_of);
    let a2 = adj(g2, &mut label_of);

    // color refinement: iterate signatures of (out,in) labeled neighborhoods
    let refine = |adj: &HashMap<(usize, usize), Vec<usize>>| -> Vec<u64> {
        let mut colors = vec![0u64; n];
        for _ in 0..n {
            let mut sigs: Vec<(u64, Vec<(bool, Vec<usize>, u64)>)> = colors
                .iter()
                .map(|&c| (c, Vec::new()))
                .collect();
            for (&(src, dst), labels) in adj {
                sigs[src].1.push((true, labels.clone(), colors[dst]));
                sigs[dst].1.push((false, labels.clone(), colors[src]));
            }
            for (_, v) in sigs.iter_mut() {
                v.sort();
            }
            // canonical color ids: rank among sorted distinct signatures,
            // so colors are comparable across graphs
            let mut distinct: Vec<_> = sigs.clone();
            distinct.sort();
            distinct.dedup();
            let mut next_colors = vec![0u64; n];
            for (i, sig) in sigs.into_iter().enumerate() {
                next_colors[i] = distinct.binary_search(&sig).unwrap() as u64;
            }
            if next_colors == colors {
                break;
            }
            colors = next_colors;
        }
        colors
    };
    let c1 = refine(&a1);
    let c2 = refine(&a2);

    // color class sizes must agree
    let histogram = |c: &[u64]| {
        let mut h: HashMap<u64, usize> = HashMap::new();
        for &x in c {
            *h.entry(x).or_default() += 1;
        }
        h
    };
    if histogram(&c1) != histogram(&c2) {
        return None;
    }

    // backtracking over color-compatible candidates, most-constrained first
    let mut order: Vec<usize> = (0..n).collect();
    let h2 = histogram(&c2);
    order.sort_by_key(|&u| (h2.get(&c1[u]).copied().unwrap_or(0), u));
    let mut mapping = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn consistent(
        u: usize,
        v: usize,
        mapping: &[usize],
        a1: &HashMap<(usize, usize), Vec<usize>>,
        a2: &HashMap<(usize, usize), Vec<usize>>,
    ) -> bool {
        for (w, &mw) in mapping.iter().enumerate() {
            if mw == usize::MAX {
                continue;
            }
            if a1.get(&(u, w)) != a2.get(&(v, mw)) || a1.get(&(w, u)) != a2.get(&(mw, v)) {
                return false;
            }
        }
        a1.get(&(u, u)) == a2.get(&(v, v))
    }

    fn solve(
        pos: usize,
        order: &[usize],
        c1: &[u64],
        c2: &[u64],
        a1: &HashMap<(usize, usize), Vec<usize>>,
        a2: &HashMap<(usize, usize), Vec<usize>>,
        mapping: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let u = order[pos];
        for v in 0..c2.len() {
            if used[v] || c1[u] != c2[v] || !consistent(u, v, mapping, a1, a2) {
                continue;
            }
            mapping[u] = v;
            used[v] = true;
            if solve(pos + 1, order, c1, c2, a1, a2, mapping, used) {
                return true;
            }
            mapping[u] = usize::MAX;
            used[v] = false;
        }
        false
    }

    if solve(0, &order, &c1, &c2, &a1, &a2, &mut mapping, &mut used) {
        Some(mapping)
    } else {
        None
    }
}
