//! Learning lifted domains from labeled state-space graphs — the inverse
//! planning problem. Graph nodes are anonymous; the learner invents fluent
//! predicates, schema precondition/effect structure, and per-graph
//! instances (object set, per-node states, the extension of one learnable
//! static relation) such that each input graph is label-isomorphic to the
//! expansion of the learned domain.
//!
//! The constraint model ties anonymous nodes to candidate ground states
//! with variables Holds(node, atom) and Bind(edge, binding), with shared
//! flag variables selecting lifted precondition/effect literals per schema.
//! Hard constraints enforce per-edge effect consistency, pairwise node
//! distinctness, and completeness: every applicable ground action must be
//! realized by an outgoing edge. Cost is minimized lexicographically —
//! structural cost (used parameters and predicates) first, literal count
//! second — and every optimum is re-checked end to end by expanding the
//! decoded domain and testing label isomorphism; failing assignments are
//! blocked and the search resumes.

use crate::graph::{expand, isomorphic, Graph, GraphBundle, Limits};
use crate::maxsat::{self, Lit, MaxSatOutcome, WeightedClauseSet};
use crate::strips::{
    ground, Domain, GroundAtom, Instance, SchemaAtom, SchemaDraft, SchemaLiteral, EQ_PRED,
};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("graph {graph} edge {edge} carries no label; only the labeled variant is supported")]
    Unlabeled { graph: usize, edge: usize },
    #[error("no schema arity bound given for edge label `{0}`")]
    MissingArity(String),
    #[error("graph {0} has no designated initial node")]
    MissingInit(usize),
    #[error("no hypothesis within the given bounds fits the graphs")]
    Infeasible,
    #[error("no sound hypothesis found within {0} candidate models")]
    RetriesExhausted(usize),
    #[error(transparent)]
    MaxSat(#[from] crate::maxsat::MaxSatError),
    #[error(transparent)]
    Strips(#[from] crate::strips::StripsError),
}

/// Bounds on the hypothesis space searched by [`learn_domain`].
#[derive(Clone, Debug)]
pub struct HypothesisSpace {
    /// Maximum number of invented fluent predicates.
    pub max_predicates: usize,
    /// Maximum arity of an invented fluent predicate.
    pub max_pred_arity: usize,
    /// Maximum schema arity per edge label.
    pub schema_arity: BTreeMap<String, usize>,
    /// Number of objects per input graph.
    pub objects: usize,
}

/// A per-graph instantiation of the learned domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceWitness {
    pub objects: Vec<String>,
    /// Fluent atoms assigned to each graph node.
    pub node_atoms: Vec<Vec<GroundAtom>>,
    /// Extension of the learnable static predicate(s).
    pub static_atoms: Vec<GroundAtom>,
    /// Node whose atom set is the instance's initial state.
    pub init: usize,
}

impl InstanceWitness {
    /// Build the goal-free instance this witness describes.
    pub fn instance(&self, name: String, domain: Arc<Domain>) -> Result<Instance, ModelError> {
        let mut init = self.node_atoms[self.init].clone();
        init.extend(self.static_atoms.iter().cloned());
        Ok(Instance::new(name, domain, self.objects.clone(), init, vec![])?)
    }
}

#[derive(Clone, Debug)]
pub struct DomainHypothesis {
    pub domain: Arc<Domain>,
    pub witnesses: Vec<InstanceWitness>,
    pub cost: u32,
}

/// Solver budget for the verify-and-block outer loop.
#[derive(Clone, Copy, Debug)]
pub struct SolverCfg {
    pub max_retries: usize,
}

impl Default for SolverCfg {
    fn default() -> Self {
        SolverCfg { max_retries: 16 }
    }
}

/// Σ over schemas of (1 + arity) plus Σ over fluent predicates of
/// (1 + arity); static predicates and equality are free.
pub fn cost(domain: &Domain) -> u32 {
    let schemas: u32 = domain.schemas.iter().map(|s| 1 + s.params.len() as u32).sum();
    let preds: u32 = domain
        .predicates
        .iter()
        .filter(|p| !p.is_static)
        .map(|p| 1 + p.arity as u32)
        .sum();
    schemas + preds
}

/// Replace full ground-action labels (`name(a,b)`) with the schema name.
pub fn strip_labels(graph: &Graph) -> Graph {
    Graph {
        n: graph.n,
        init: graph.init,
        goals: graph.goals.clone(),
        edges: graph
            .edges
            .iter()
            .map(|(s, d, l)| {
                let l = l
                    .as_ref()
                    .map(|l| l.split('(').next().unwrap_or(l).to_string());
                (*s, *d, l)
            })
            .collect(),
    }
}

/// All sequences of length `len` over `0..n`, lexicographic.
fn tuples(n: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for v in 0..n {
                let mut t = t.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Learning encoding

struct LabelEnc {
    name: String,
    arity: usize,
    /// Per candidate predicate: argument tuples over the schema params.
    tuples: Vec<Vec<Vec<usize>>>,
    pre_pos: Vec<Vec<Lit>>,
    pre_neg: Vec<Vec<Lit>>,
    eff_pos: Vec<Vec<Lit>>,
    eff_neg: Vec<Vec<Lit>>,
    /// Positive inequality static flags per param pair i < j.
    neq: Vec<(usize, usize, Lit)>,
    /// Learnable-static precondition flags per ordered param pair.
    s_pos: Vec<(usize, usize, Lit)>,
    s_neg: Vec<(usize, usize, Lit)>,
    param_used: Vec<Lit>,
    bindings: Vec<Vec<usize>>,
}

/// Per-(label, binding) precomputation shared by edge and completeness
/// constraints across all graphs.
struct BindInfo {
    /// atom id per (candidate, tuple index).
    atom: Vec<Vec<usize>>,
    /// Distinct image atoms with the effect flags that add/delete them.
    image: Vec<(usize, Vec<Lit>, Vec<Lit>)>,
    /// neq flags violated by this binding (aliased params).
    aliased_neq: Vec<Lit>,
    /// (flag, stat atom index) for the learnable static, per sign.
    s_pos: Vec<(Lit, usize)>,
    s_neg: Vec<(Lit, usize)>,
    /// (eff_pos flag, eff_neg flag) pairs colliding under this binding.
    collisions: Vec<(Lit, Lit)>,
}

struct GraphEnc {
    holds: Vec<Vec<Lit>>,
    stat: Vec<Lit>,
}

struct Encoding {
    nvars: usize,
    hard: Vec<Vec<Lit>>,
    labels: Vec<LabelEnc>,
    cands: Vec<usize>,
    atoms: Vec<(usize, Vec<usize>)>,
    graphs: Vec<GraphEnc>,
    /// (weight, variable) terms of the structural cost.
    primary: Vec<(u64, Lit)>,
    flags: Vec<Lit>,
    /// Variables that determine the decoded hypothesis and its expansion.
    block: Vec<Lit>,
}

impl Encoding {
    fn new_var(nvars: &mut usize) -> Lit {
        *nvars += 1;
        *nvars as Lit
    }
}

fn build_encoding(bundle: &GraphBundle, space: &HypothesisSpace) -> Result<Encoding, ModelError> {
    let m = space.objects;
    // distinct labels in sorted order
    let mut label_names: Vec<String> = Vec::new();
    for (gi, g) in bundle.graphs.iter().enumerate() {
        if g.init.is_none() {
            return Err(ModelError::MissingInit(gi));
        }
        for (ei, (_, _, l)) in g.edges.iter().enumerate() {
            match l {
                None => return Err(ModelError::Unlabeled { graph: gi, edge: ei }),
                Some(l) => {
                    if !label_names.contains(l) {
                        label_names.push(l.clone());
                    }
                }
            }
        }
    }
    label_names.sort();

    // candidate fluent predicates: `max_predicates` copies of every arity
    let mut cands = Vec::new();
    for r in 0..=space.max_pred_arity {
        for _ in 0..space.max_predicates {
            cands.push(r);
        }
    }

    let mut nvars = 0usize;
    let mut hard: Vec<Vec<Lit>> = Vec::new();
    let mut flags: Vec<Lit> = Vec::new();

    let pred_used: Vec<Lit> = cands.iter().map(|_| Encoding::new_var(&mut nvars)).collect();
    let mut labels: Vec<LabelEnc> = Vec::new();
    for name in &label_names {
        let arity = *space
            .schema_arity
            .get(name)
            .ok_or_else(|| ModelError::MissingArity(name.clone()))?;
        let mut le = LabelEnc {
            name: name.clone(),
            arity,
            tuples: Vec::new(),
            pre_pos: Vec::new(),
            pre_neg: Vec::new(),
            eff_pos: Vec::new(),
            eff_neg: Vec::new(),
            neq: Vec::new(),
            s_pos: Vec::new(),
            s_neg: Vec::new(),
            param_used: (0..arity).map(|_| Encoding::new_var(&mut nvars)).collect(),
            bindings: tuples(m, arity),
        };
        for (c, &r) in cands.iter().enumerate() {
            let ts = tuples(arity, r);
            let mut mk = |ts: &Vec<Vec<usize>>| -> Vec<Lit> {
                ts.iter().map(|_| Encoding::new_var(&mut nvars)).collect()
            };
            let (pp, pn, ep, en) = (mk(&ts), mk(&ts), mk(&ts), mk(&ts));
            for (ti, t) in ts.iter().enumerate() {
                for &f in [pp[ti], pn[ti], ep[ti], en[ti]].iter() {
                    flags.push(f);
                    hard.push(vec![-f, pred_used[c]]);
                    for &i in t {
                        hard.push(vec![-f, le.param_used[i]]);
                    }
                }
                // contradictory literals on the same atom are useless
                hard.push(vec![-pp[ti], -pn[ti]]);
                hard.push(vec![-ep[ti], -en[ti]]);
            }
            le.tuples.push(ts);
            le.pre_pos.push(pp);
            le.pre_neg.push(pn);
            le.eff_pos.push(ep);
            le.eff_neg.push(en);
        }
        for i in 0..arity {
            for j in i + 1..arity {
                let f = Encoding::new_var(&mut nvars);
                flags.push(f);
                hard.push(vec![-f, le.param_used[i]]);
                hard.push(vec![-f, le.param_used[j]]);
                le.neq.push((i, j, f));
            }
        }
        for i in 0..arity {
            for j in 0..arity {
                for positive in [true, false] {
                    let f = Encoding::new_var(&mut nvars);
                    flags.push(f);
                    hard.push(vec![-f, le.param_used[i]]);
                    hard.push(vec![-f, le.param_used[j]]);
                    if positive {
                        le.s_pos.push((i, j, f));
                    } else {
                        le.s_neg.push((i, j, f));
                    }
                }
            }
        }
        // a schema with no effect never explains an edge
        let eff_any: Vec<Lit> = (0..cands.len())
            .flat_map(|c| le.eff_pos[c].iter().chain(&le.eff_neg[c]).copied())
            .collect();
        hard.push(eff_any);
        labels.push(le);
    }

    // at most max_predicates candidates in use; identical-arity copies
    // are ordered to break symmetry
    for combo in combinations(cands.len(), space.max_predicates + 1) {
        hard.push(combo.iter().map(|&c| -pred_used[c]).collect());
    }
    for c in 1..cands.len() {
        if cands[c] == cands[c - 1] {
            hard.push(vec![-pred_used[c], pred_used[c - 1]]);
        }
    }

    // shared ground atom universe (all graphs have `m` objects)
    let mut atoms: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut atom_id: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
    for (c, &r) in cands.iter().enumerate() {
        for args in tuples(m, r) {
            atom_id.insert((c, args.clone()), atoms.len());
            atoms.push((c, args));
        }
    }

    // per-(label, binding) precomputation
    let bind_info: Vec<Vec<BindInfo>> = labels
        .iter()
        .map(|le| {
            le.bindings
                .iter()
                .map(|b| {
                    let atom: Vec<Vec<usize>> = (0..cands.len())
                        .map(|c| {
                            le.tuples[c]
                                .iter()
                                .map(|t| {
                                    let args: Vec<usize> = t.iter().map(|&i| b[i]).collect();
                                    atom_id[&(c, args)]
                                })
                                .collect()
                        })
                        .collect();
                    let mut image: BTreeMap<usize, (Vec<Lit>, Vec<Lit>)> = BTreeMap::new();
                    let mut collisions = Vec::new();
                    for c in 0..cands.len() {
                        for (ti, &a) in atom[c].iter().enumerate() {
                            let e = image.entry(a).or_default();
                            e.0.push(le.eff_pos[c][ti]);
                            e.1.push(le.eff_neg[c][ti]);
                        }
                        for t1 in 0..atom[c].len() {
                            for t2 in 0..atom[c].len() {
                                if t1 != t2 && atom[c][t1] == atom[c][t2] {
                                    collisions.push((le.eff_pos[c][t1], le.eff_neg[c][t2]));
                                }
                            }
                        }
                    }
                    BindInfo {
                        atom,
                        image: image.into_iter().map(|(a, (p, n))| (a, p, n)).collect(),
                        aliased_neq: le
                            .neq
                            .iter()
                            .filter(|&&(i, j, _)| b[i] == b[j])
                            .map(|&(_, _, f)| f)
                            .collect(),
                        s_pos: le.s_pos.iter().map(|&(i, j, f)| (f, b[i] * m + b[j])).collect(),
                        s_neg: le.s_neg.iter().map(|&(i, j, f)| (f, b[i] * m + b[j])).collect(),
                        collisions,
                    }
                })
                .collect()
        })
        .collect();

    // collision auxiliaries are shared across graphs
    let mut k_aux: HashMap<(Lit, Lit), Lit> = HashMap::new();
    let mut block: Vec<Lit> = flags.clone();
    let mut graphs: Vec<GraphEnc> = Vec::new();

    for g in &bundle.graphs {
        let holds: Vec<Vec<Lit>> = (0..g.n)
            .map(|_| atoms.iter().map(|_| Encoding::new_var(&mut nvars)).collect())
            .collect();
        let stat: Vec<Lit> = (0..m * m).map(|_| Encoding::new_var(&mut nvars)).collect();
        block.extend(stat.iter());
        block.extend(holds[g.init.unwrap()].iter());

        let label_of = |l: &Option<String>| -> usize {
            let l = l.as_ref().unwrap();
            labels.iter().position(|le| &le.name == l).unwrap()
        };
        let bind: Vec<Vec<Lit>> = g
            .edges
            .iter()
            .map(|(_, _, l)| {
                labels[label_of(l)]
                    .bindings
                    .iter()
                    .map(|_| Encoding::new_var(&mut nvars))
                    .collect()
            })
            .collect();
        for lits in &bind {
            hard.push(lits.clone());
        }
        // object symmetry: the encoding is invariant under renaming this
        // graph's objects, so demand that the first edge is explained by
        // at least one binding in first-use canonical form (each object
        // index at most one above the largest index seen so far)
        if let Some((_, _, l)) = g.edges.first() {
            let li = label_of(l);
            let canonical: Vec<Lit> = labels[li]
                .bindings
                .iter()
                .enumerate()
                .filter(|(_, b)| {
                    let mut fresh = 0usize;
                    b.iter().all(|&x| {
                        if x > fresh {
                            return false;
                        }
                        if x == fresh {
                            fresh += 1;
                        }
                        true
                    })
                })
                .map(|(bi, _)| bind[0][bi])
                .collect();
            hard.push(canonical);
        }
        // determinism: one binding may not explain two parallel edges
        let mut by_src: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (ei, (u, _, l)) in g.edges.iter().enumerate() {
            by_src.entry((*u, label_of(l))).or_default().push(ei);
        }
        for edges in by_src.values() {
            for (x, &e1) in edges.iter().enumerate() {
                for &e2 in &edges[x + 1..] {
                    for bi in 0..bind[e1].len() {
                        hard.push(vec![-bind[e1][bi], -bind[e2][bi]]);
                    }
                }
            }
        }

        // edge constraints
        for (ei, (u, v, l)) in g.edges.iter().enumerate() {
            let (u, v, li) = (*u, *v, label_of(l));
            // change markers: chg(a) is forced true when the atom differs
            let chg: Vec<Lit> = atoms
                .iter()
                .enumerate()
                .map(|(a, _)| {
                    let c = Encoding::new_var(&mut nvars);
                    hard.push(vec![c, -holds[u][a], holds[v][a]]);
                    hard.push(vec![c, holds[u][a], -holds[v][a]]);
                    c
                })
                .collect();
            for (bi, info) in bind_info[li].iter().enumerate() {
                let bv = bind[ei][bi];
                let le = &labels[li];
                for c in 0..cands.len() {
                    for ti in 0..le.tuples[c].len() {
                        let a = info.atom[c][ti];
                        hard.push(vec![-bv, -le.pre_pos[c][ti], holds[u][a]]);
                        hard.push(vec![-bv, -le.pre_neg[c][ti], -holds[u][a]]);
                        hard.push(vec![-bv, -le.eff_pos[c][ti], holds[v][a]]);
                        // delete takes effect unless the atom is re-added
                        let adds = &info.image.iter().find(|(x, _, _)| *x == a).unwrap().1;
                        let mut cl = vec![-bv, -le.eff_neg[c][ti]];
                        cl.extend(adds.iter().copied());
                        cl.push(-holds[v][a]);
                        hard.push(cl);
                    }
                }
                for &f in &info.aliased_neq {
                    hard.push(vec![-bv, -f]);
                }
                // grounding skips colliding add/delete pairs, so a
                // binding with one selected cannot explain an edge
                for &(fp, fn_) in &info.collisions {
                    hard.push(vec![-bv, -fp, -fn_]);
                }
                for &(f, si) in &info.s_pos {
                    hard.push(vec![-bv, -f, stat[si]]);
                }
                for &(f, si) in &info.s_neg {
                    hard.push(vec![-bv, -f, -stat[si]]);
                }
                // frame: image atoms persist unless deleted / added
                let mut in_image = vec![false; atoms.len()];
                for (a, adds, dels) in &info.image {
                    in_image[*a] = true;
                    let mut cl = vec![-bv, -holds[u][*a], holds[v][*a]];
                    cl.extend(dels.iter().copied());
                    hard.push(cl);
                    let mut cl = vec![-bv, holds[u][*a], -holds[v][*a]];
                    cl.extend(adds.iter().copied());
                    hard.push(cl);
                }
                for a in 0..atoms.len() {
                    if !in_image[a] {
                        hard.push(vec![-bv, -chg[a]]);
                    }
                }
            }
        }

        // distinctness of node states, witnessed by used predicates only
        for n1 in 0..g.n {
            for n2 in n1 + 1..g.n {
                let mut any = Vec::with_capacity(atoms.len());
                for (a, &(c, _)) in atoms.iter().enumerate() {
                    let d = Encoding::new_var(&mut nvars);
                    hard.push(vec![-d, pred_used[c]]);
                    hard.push(vec![-d, holds[n1][a], holds[n2][a]]);
                    hard.push(vec![-d, -holds[n1][a], -holds[n2][a]]);
                    any.push(d);
                }
                hard.push(any);
            }
        }

        // completeness: an applicable ground action must have an edge
        // (or be skipped by grounding due to colliding effects)
        let mut y_aux: HashMap<(Lit, usize, usize), Lit> = HashMap::new();
        let mut z_aux: HashMap<(Lit, usize), Lit> = HashMap::new();
        for u in 0..g.n {
            for (li, le) in labels.iter().enumerate() {
                let out: Vec<usize> = g
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, (s, _, l))| *s == u && label_of(l) == li)
                    .map(|(ei, _)| ei)
                    .collect();
                for (bi, info) in bind_info[li].iter().enumerate() {
                    let mut cl: Vec<Lit> = Vec::new();
                    for c in 0..cands.len() {
                        for ti in 0..le.tuples[c].len() {
                            let a = info.atom[c][ti];
                            // violated positive precondition
                            let f = le.pre_pos[c][ti];
                            let y = *y_aux.entry((f, u, a)).or_insert_with(|| {
                                let y = Encoding::new_var(&mut nvars);
                                hard.push(vec![-y, f]);
                                hard.push(vec![-y, -holds[u][a]]);
                                y
                            });
                            cl.push(y);
                            // violated negative precondition
                            let f = le.pre_neg[c][ti];
                            let y = *y_aux.entry((f, u, a)).or_insert_with(|| {
                                let y = Encoding::new_var(&mut nvars);
                                hard.push(vec![-y, f]);
                                hard.push(vec![-y, holds[u][a]]);
                                y
                            });
                            cl.push(y);
                        }
                    }
                    cl.extend(info.aliased_neq.iter().copied());
                    for &(f, si) in &info.s_pos {
                        let z = *z_aux.entry((f, si)).or_insert_with(|| {
                            let z = Encoding::new_var(&mut nvars);
                            hard.push(vec![-z, f]);
                            hard.push(vec![-z, -stat[si]]);
                            z
                        });
                        cl.push(z);
                    }
                    for &(f, si) in &info.s_neg {
                        let z = *z_aux.entry((f, si)).or_insert_with(|| {
                            let z = Encoding::new_var(&mut nvars);
                            hard.push(vec![-z, f]);
                            hard.push(vec![-z, stat[si]]);
                            z
                        });
                        cl.push(z);
                    }
                    for &(fp, fn_) in &info.collisions {
                        let k = *k_aux.entry((fp, fn_)).or_insert_with(|| {
                            let k = Encoding::new_var(&mut nvars);
                            hard.push(vec![-k, fp]);
                            hard.push(vec![-k, fn_]);
                            hard.push(vec![k, -fp, -fn_]);
                            k
                        });
                        cl.push(k);
                    }
                    for &ei in &out {
                        cl.push(bind[ei][bi]);
                    }
                    hard.push(cl);
                }
            }
        }
        graphs.push(GraphEnc { holds, stat });
    }

    let mut primary: Vec<(u64, Lit)> = Vec::new();
    for (c, &r) in cands.iter().enumerate() {
        primary.push((1 + r as u64, pred_used[c]));
    }
    for le in &labels {
        for &p in &le.param_used {
            primary.push((1, p));
        }
    }

    Ok(Encoding {
        nvars,
        hard,
        labels,
        cands,
        atoms,
        graphs,
        primary,
        flags,
        block,
    })
}

fn decode(
    model: &[bool],
    enc: &Encoding,
    bundle: &GraphBundle,
    space: &HypothesisSpace,
) -> Result<DomainHypothesis, ModelError> {
    let set = |l: Lit| model[(l - 1) as usize];
    // predicates in use = those mentioned by a selected flag
    let mut cand_used = vec![false; enc.cands.len()];
    let mut uses_s = false;
    let mut uses_eq = false;
    for le in &enc.labels {
        for c in 0..enc.cands.len() {
            for ti in 0..le.tuples[c].len() {
                if set(le.pre_pos[c][ti])
                    || set(le.pre_neg[c][ti])
                    || set(le.eff_pos[c][ti])
                    || set(le.eff_neg[c][ti])
                {
                    cand_used[c] = true;
                }
            }
        }
        uses_eq |= le.neq.iter().any(|&(_, _, f)| set(f));
        uses_s |= le
            .s_pos
            .iter()
            .chain(&le.s_neg)
            .any(|&(_, _, f)| set(f));
    }
    let mut pred_of_cand = vec![usize::MAX; enc.cands.len()];
    let mut predicates: Vec<(String, usize)> = Vec::new();
    for (c, &r) in enc.cands.iter().enumerate() {
        if cand_used[c] {
            pred_of_cand[c] = predicates.len();
            predicates.push((format!("p{}", predicates.len()), r));
        }
    }
        let s_pred = if uses_s {
        predicates.push(("s0".to_string(), 2));
        Some(predicates.len() - 1)
    } else {
        None
    };
    let eq_pred = if uses_eq {
        predicates.push((EQ_PRED.to_string(), 2));
        Some(predicates.len() - 1)
    } else {
        None
    };

    let mut drafts = Vec::new();
    for le in &enc.labels {
        // parameters actually mentioned by selected flags, compacted
        let mut used = vec![false; le.arity];
        let mut mark = |t: &[usize]| {
            for &i in t {
                used[i] = true;
            }
        };
        for c in 0..enc.cands.len() {
            for (ti, t) in le.tuples[c].iter().enumerate() {
                if set(le.pre_pos[c][ti])
                    || set(le.pre_neg[c][ti])
                    || set(le.eff_pos[c][ti])
                    || set(le.eff_neg[c][ti])
                {
                    mark(t);
                }
            }
        }
        for &(i, j, f) in le.neq.iter().chain(&le.s_pos).chain(&le.s_neg) {
            if set(f) {
                mark(&[i, j]);
            }
        }
        let mut pmap = vec![usize::MAX; le.arity];
        let mut params = Vec::new();
        for i in 0..le.arity {
            if used[i] {
                pmap[i] = params.len();
                params.push(format!("?x{}", params.len()));
            }
        }
        let lit = |pred: usize, args: &[usize], positive: bool| SchemaLiteral {
            atom: SchemaAtom {
                pred,
                args: args.iter().map(|&i| pmap[i]).collect(),
            },
            positive,
        };
        let mut pre = Vec::new();
        let mut eff = Vec::new();
        for c in 0..enc.cands.len() {
            let p = pred_of_cand[c];
            for (ti, t) in le.tuples[c].iter().enumerate() {
                if set(le.pre_pos[c][ti]) {
                    pre.push(lit(p, t, true));
                }
                if set(le.pre_neg[c][ti]) {
                    pre.push(lit(p, t, false));
                }
                if set(le.eff_pos[c][ti]) {
                    eff.push(lit(p, t, true));
                }
                if set(le.eff_neg[c][ti]) {
                    eff.push(lit(p, t, false));
                }
            }
        }
        for &(i, j, f) in &le.neq {
            if set(f) {
                pre.push(lit(eq_pred.unwrap(), &[i, j], false));
            }
        }
        for &(i, j, f) in &le.s_pos {
            if set(f) {
                pre.push(lit(s_pred.unwrap(), &[i, j], true));
            }
        }
        for &(i, j, f) in &le.s_neg {
            if set(f) {
                pre.push(lit(s_pred.unwrap(), &[i, j], false));
            }
        }
        drafts.push(SchemaDraft {
            name: le.name.clone(),
            params,
            pre,
            eff,
        });
    }
    let domain = Arc::new(Domain::assemble(predicates, drafts)?);

    let m = space.objects;
    let witnesses: Vec<InstanceWitness> = bundle
        .graphs
        .iter()
        .zip(&enc.graphs)
        .map(|(g, ge)| {
            let node_atoms: Vec<Vec<GroundAtom>> = (0..g.n)
                .map(|n| {
                    enc.atoms
                        .iter()
                        .enumerate()
                        .filter(|&(a, &(c, _))| cand_used[c] && set(ge.holds[n][a]))
                        .map(|(_, (c, args))| GroundAtom {
                            pred: pred_of_cand[*c],
                            args: args.clone(),
                        })
                        .collect()
                })
                .collect();
            let static_atoms: Vec<GroundAtom> = match s_pred {
                None => vec![],
                Some(sp) => (0..m * m)
                    .filter(|&si| set(ge.stat[si]))
                    .map(|si| GroundAtom {
                        pred: sp,
                        args: vec![si / m, si % m],
                    })
                    .collect(),
            };
            InstanceWitness {
                objects: (0..m).map(|i| format!("o{i}")).collect(),
                node_atoms,
                static_atoms,
                init: g.init.unwrap(),
            }
        })
        .collect();

    let cost = cost(&domain);
    Ok(DomainHypothesis {
        domain,
        witnesses,
        cost,
    })
}

/// Expand every witness instance and require label isomorphism with its
/// input graph — the end-to-end soundness oracle.
fn sound(hyp: &DomainHypothesis, bundle: &GraphBundle) -> bool {
    for (i, (w, g)) in hyp.witnesses.iter().zip(&bundle.graphs).enumerate() {
        let inst = match w.instance(format!("witness{i}"), hyp.domain.clone()) {
            Ok(inst) => inst,
            Err(_) => return false,
        };
        let task = match ground(Arc::new(inst)) {
            Ok(t) => t,
            Err(_) => return false,
        };
        let limits = Limits {
            max_states: g.n + 1,
            max_time: None,
        };
        let ssg = match expand(&task, &limits) {
            Ok(s) => s,
            Err(_) => return false,
        };
        let produced = strip_labels(&ssg.to_graph(&task));
        if isomorphic(&produced, g, true).is_none() {
            if std::env::var("GPLAN_DEBUG").is_ok() {
                eprintln!(
                    "oracle: witness{i} expands to n={} e={} (want n={} e={})",
                    produced.n,
                    produced.edges.len(),
                    g.n,
                    g.edges.len()
                );
            }
            return false;
        }
    }
    true
}

/// Learn the cheapest domain (plus per-graph instances) whose expansions
/// are label-isomorphic to the input graphs.
pub fn learn_domain(
    bundle: &GraphBundle,
    space: &HypothesisSpace,
    cfg: &SolverCfg,
) -> Result<DomainHypothesis, ModelError> {
    let dbg = std::env::var("GPLAN_DEBUG").is_ok();
    let t0 = std::time::Instant::now();
    let enc = build_encoding(bundle, space)?;
    if dbg {
        eprintln!(
            "encoding: {} vars, {} hard, {} primary, {} flags [{:?}]",
            enc.nvars,
            enc.hard.len(),
            enc.primary.len(),
            enc.flags.len(),
            t0.elapsed()
        );
    }
    let mut blocked: Vec<Vec<Lit>> = Vec::new();
    for _ in 0..=cfg.max_retries {
        // phase 1: minimize structural cost
        let mut cs = WeightedClauseSet {
            num_vars: enc.nvars,
            hard: enc.hard.iter().chain(&blocked).cloned().collect(),
            soft: enc.primary.iter().map(|&(w, v)| (w, vec![-v])).collect(),
        };
        let t1 = std::time::Instant::now();
        let bound = match maxsat::solve(&cs)? {
            MaxSatOutcome::Unsat => return Err(ModelError::Infeasible),
            MaxSatOutcome::Optimum { cost, .. } => cost,
        };
        if dbg {
            eprintln!("phase 1: cost {bound} [{:?}]", t1.elapsed());
        }
        // phase 2: fix the structural optimum, minimize literal count
        let mut nv = cs.num_vars;
        maxsat::add_counter(&mut cs.hard, &enc.primary, bound, &mut nv);
        cs.num_vars = nv;
        cs.soft = enc.flags.iter().map(|&f| (1, vec![-f])).collect();
        let t2 = std::time::Instant::now();
        let model = match maxsat::solve(&cs)? {
            MaxSatOutcome::Unsat => return Err(ModelError::Infeasible),
            MaxSatOutcome::Optimum { model, .. } => model,
        };
        if dbg {
            eprintln!("phase 2 [{:?}]", t2.elapsed());
        }
        let hyp = decode(&model, &enc, bundle, space)?;
        if sound(&hyp, bundle) {
            return Ok(hyp);
        }
        if dbg {
            eprintln!("unsound hypothesis, retrying:");
            eprintln!("{}", crate::pddl::print_domain(&hyp.domain));
            for w in &hyp.witnesses {
                eprintln!("witness init node {}: {:?}", w.init, w.node_atoms[w.init]);
                eprintln!("witness statics: {:?}", w.static_atoms);
            }
        }
        blocked.push(
            enc.block
                .iter()
                .map(|&v| if model[(v - 1) as usize] { -v } else { v })
                .collect(),
        );
    }
    Err(ModelError::RetriesExhausted(cfg.max_retries + 1))
}

// ---------------------------------------------------------------------------
// Validation: the domain is frozen, only an instance is sought.

/// True (with an instance witness) iff some instance over at most
/// `space.objects` objects expands to a graph label-isomorphic to `graph`.
/// Object counts are tried in ascending order.
pub fn validate_domain(
    domain: &Arc<Domain>,
    graph: &Graph,
    space: &HypothesisSpace,
    cfg: &SolverCfg,
) -> Result<Option<InstanceWitness>, ModelError> {
    let init = match graph.init {
        Some(i) => i,
        None => return Err(ModelError::MissingInit(0)),
    };
    for (_, _, l) in &graph.edges {
        match l {
            None => return Err(ModelError::Unlabeled { graph: 0, edge: 0 }),
            Some(l) => {
                if !domain.schemas.iter().any(|s| &s.name == l) {
                    return Ok(None);
                }
            }
        }
    }
    for m in 1..=space.objects {
        let Some((mut clauses, mut nvars, holds, stats, fluent_atoms, static_atoms)) =
            frozen_encoding(domain, graph, m)
        else {
            continue;
        };
        let _ = &mut nvars;
        for _ in 0..=cfg.max_retries {
            let Some(model) = maxsat::sat(&clauses, nvars)? else {
                break;
            };
            let set = |l: Lit| model[(l - 1) as usize];
            let witness = InstanceWitness {
                objects: (0..m).map(|i| format!("o{i}")).collect(),
                node_atoms: (0..graph.n)
                    .map(|n| {
                        fluent_atoms
                            .iter()
                            .enumerate()
                            .filter(|&(a, _)| set(holds[n][a]))
                            .map(|(_, atom)| atom.clone())
                            .collect()
                    })
                    .collect(),
                static_atoms: static_atoms
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| set(stats[s]))
                    .map(|(_, atom)| atom.clone())
                    .collect(),
                init,
            };
            let hyp = DomainHypothesis {
                domain: domain.clone(),
                witnesses: vec![witness.clone()],
                cost: cost(domain),
            };
            let bundle = GraphBundle {
                graphs: vec![graph.clone()],
            };
            if sound(&hyp, &bundle) {
                return Ok(Some(witness));
            }
            // block the expansion-relevant part of this assignment
            let mut cl: Vec<Lit> = Vec::new();
            for &v in holds[init].iter().chain(stats.iter()) {
                cl.push(if set(v) { -v } else { v });
            }
            clauses.push(cl);
        }
    }
    Ok(None)
}

type Frozen = (
    Vec<Vec<Lit>>,
    usize,
    Vec<Vec<Lit>>,
    Vec<Lit>,
    Vec<GroundAtom>,
    Vec<GroundAtom>,
);

/// Build the instance-search constraint model for a frozen domain and a
/// fixed object count; `None` when `m` objects cannot possibly work.
fn frozen_encoding(domain: &Domain, graph: &Graph, m: usize) -> Option<Frozen> {
    let mut nvars = 0usize;
    let mut var = || {
        nvars += 1;
        nvars as Lit
    };
    // ground atom universes
    let mut fluent_atoms: Vec<GroundAtom> = Vec::new();
    let mut fluent_id: HashMap<GroundAtom, usize> = HashMap::new();
    let mut static_atoms: Vec<GroundAtom> = Vec::new();
    let mut static_id: HashMap<GroundAtom, usize> = HashMap::new();
    for (p, pred) in domain.predicates.iter().enumerate() {
        if pred.name == EQ_PRED {
            continue;
        }
        for args in tuples(m, pred.arity) {
            let atom = GroundAtom { pred: p, args };
            if pred.is_static {
                static_id.insert(atom.clone(), static_atoms.len());
                static_atoms.push(atom);
            } else {
                fluent_id.insert(atom.clone(), fluent_atoms.len());
                fluent_atoms.push(atom);
            }
        }
    }
    // quick infeasibility: not enough atoms to tell the nodes apart
    if (fluent_atoms.len() as u32) < usize::BITS - (graph.n - 1).leading_zeros() {
        return None;
    }

    let holds: Vec<Vec<Lit>> = (0..graph.n)
        .map(|_| fluent_atoms.iter().map(|_| var()).collect())
        .collect();
    let stats: Vec<Lit> = static_atoms.iter().map(|_| var()).collect();
    let mut clauses: Vec<Vec<Lit>> = Vec::new();

    // per-schema bindings with grounded literal lists
    struct GroundCand {
        pre_pos: Vec<usize>,
        pre_neg: Vec<usize>,
        stat_lits: Vec<(usize, bool)>,
        add: Vec<usize>,
        del: Vec<usize>,
    }
    let inst = |atom: &SchemaAtom, b: &[usize]| -> GroundAtom {
        GroundAtom {
            pred: atom.pred,
            args: atom.args.iter().map(|&i| b[i]).collect(),
        }
    };
    let schema_bindings: Vec<Vec<Option<GroundCand>>> = domain
        .schemas
        .iter()
        .map(|s| {
            tuples(m, s.params.len())
                .into_iter()
                .map(|b| {
                    let mut stat_lits = Vec::new();
                    for l in &s.static_pre {
                        if domain.predicates[l.atom.pred].name == EQ_PRED {
                            let eq = b[l.atom.args[0]] == b[l.atom.args[1]];
                            if eq != l.positive {
                                return None; // structurally inapplicable
                            }
                        } else {
                            stat_lits.push((static_id[&inst(&l.atom, &b)], l.positive));
                        }
                    }
                    let mut add = Vec::new();
                    let mut del = Vec::new();
                    for l in &s.eff {
                        let a = fluent_id[&inst(&l.atom, &b)];
                        if l.positive {
                            add.push(a);
                        } else {
                            del.push(a);
                        }
                    }
                    if add.iter().any(|a| del.contains(a)) {
                        return None; // grounding skips colliding effects
                    }
                    Some(GroundCand {
                        pre_pos: s
                            .pre
                            .iter()
                            .filter(|l| l.positive)
                            .map(|l| fluent_id[&inst(&l.atom, &b)])
                            .collect(),
                        pre_neg: s
                            .pre
                            .iter()
                            .filter(|l| !l.positive)
                            .map(|l| fluent_id[&inst(&l.atom, &b)])
                            .collect(),
                        stat_lits,
                        add,
                        del,
                    })
                })
                .collect()
        })
        .collect();

    let schema_of = |l: &Option<String>| -> usize {
        let l = l.as_ref().unwrap();
        domain.schemas.iter().position(|s| &s.name == l).unwrap()
    };

    // edge constraints
    let bind: Vec<Vec<Option<Lit>>> = graph
        .edges
        .iter()
        .map(|(_, _, l)| {
            schema_bindings[schema_of(l)]
                .iter()
                .map(|gc| gc.as_ref().map(|_| var()))
                .collect()
        })
        .collect();
    for (ei, (u, v, l)) in graph.edges.iter().enumerate() {
        let (u, v, si) = (*u, *v, schema_of(l));
        let alive: Vec<Lit> = bind[ei].iter().flatten().copied().collect();
        if alive.is_empty() {
            return None; // no binding can realize this edge
        }
        clauses.push(alive);
        for (bi, gc) in schema_bindings[si].iter().enumerate() {
            let (Some(gc), Some(bv)) = (gc, bind[ei][bi]) else {
                continue;
            };
            for &a in &gc.pre_pos {
                clauses.push(vec![-bv, holds[u][a]]);
            }
            for &a in &gc.pre_neg {
                clauses.push(vec![-bv, -holds[u][a]]);
            }
            for &(s, pos) in &gc.stat_lits {
                clauses.push(vec![-bv, if pos { stats[s] } else { -stats[s] }]);
            }
            let mut touched = vec![false; fluent_atoms.len()];
            for &a in &gc.add {
                touched[a] = true;
                clauses.push(vec![-bv, holds[v][a]]);
            }
            for &a in &gc.del {
                touched[a] = true;
                clauses.push(vec![-bv, -holds[v][a]]);
            }
            for a in 0..fluent_atoms.len() {
                if !touched[a] {
                    clauses.push(vec![-bv, -holds[u][a], holds[v][a]]);
                    clauses.push(vec![-bv, holds[u][a], -holds[v][a]]);
                }
            }
        }
    }
    // determinism
    let mut by_src: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (ei, (u, _, l)) in graph.edges.iter().enumerate() {
        by_src.entry((*u, schema_of(l))).or_default().push(ei);
    }
    for edges in by_src.values() {
        for (x, &e1) in edges.iter().enumerate() {
            for &e2 in &edges[x + 1..] {
                for bi in 0..bind[e1].len() {
                    if let (Some(a), Some(b)) = (bind[e1][bi], bind[e2][bi]) {
                        clauses.push(vec![-a, -b]);
                    }
                }
            }
        }
    }
    // distinctness
    for n1 in 0..graph.n {
        for n2 in n1 + 1..graph.n {
            let mut any = Vec::with_capacity(fluent_atoms.len());
            for a in 0..fluent_atoms.len() {
                let d = var();
                clauses.push(vec![-d, holds[n1][a], holds[n2][a]]);
                clauses.push(vec![-d, -holds[n1][a], -holds[n2][a]]);
                any.push(d);
            }
            clauses.push(any);
        }
    }
    // completeness
    for u in 0..graph.n {
        for (si, _s) in domain.schemas.iter().enumerate() {
            let out: Vec<usize> = graph
                .edges
                .iter()
                .enumerate()
                .filter(|(_, (src, _, l))| *src == u && schema_of(l) == si)
                .map(|(ei, _)| ei)
                .collect();
            for (bi, gc) in schema_bindings[si].iter().enumerate() {
                let Some(gc) = gc else { continue };
                let mut cl: Vec<Lit> = Vec::new();
                for &a in &gc.pre_pos {
                    cl.push(-holds[u][a]);
                }
                for &a in &gc.pre_neg {
                    cl.push(holds[u][a]);
                }
                for &(st, pos) in &gc.stat_lits {
                    cl.push(if pos { -stats[st] } else { stats[st] });
                }
                for &ei in &out {
                    if let Some(bv) = bind[ei][bi] {
                        cl.push(bv);
                    }
                }
                clauses.push(cl);
            }
        }
    }
    Some((clauses, nvars, holds, stats, fluent_atoms, static_atoms))
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{hanoi_domain, make_delivery};
    use crate::strips::GroundLiteral;

    fn toggle_graph() -> Graph {
        Graph {
            n: 2,
            init: Some(0),
            goals: Some(vec![]),
            edges: vec![(0, 1, Some("toggle".to_string()))],
        }
    }

    fn toggle_space() -> HypothesisSpace {
        HypothesisSpace {
            max_predicates: 1,
            max_pred_arity: 1,
            schema_arity: [("toggle".to_string(), 1)].into_iter().collect(),
            objects: 1,
        }
    }

    #[test]
    fn toggle_toy_learns_minimal_model() {
        let bundle = GraphBundle {
            graphs: vec![toggle_graph()],
        };
        let hyp = learn_domain(&bundle, &toggle_space(), &SolverCfg::default()).unwrap();
        assert_eq!(hyp.cost, 2, "one parameterless schema, one nullary fluent");
        assert_eq!(hyp.domain.schemas.len(), 1);
        assert!(hyp.domain.schemas[0].params.is_empty());
        let fluents: Vec<_> = hyp
            .domain
            .predicates
            .iter()
            .filter(|p| !p.is_static)
            .collect();
        assert_eq!(fluents.len(), 1);
        assert_eq!(fluents[0].arity, 0);
    }

    #[test]
    fn toggle_minimum_matches_exhaustive_oracle() {
        // brute force over every domain with one schema (arity <= 1) and
        // at most one fluent predicate (arity <= 1), over one object
        let mut best: Option<u32> = None;
        let target = toggle_graph();
        for schema_arity in 0..=1usize {
            for pred_arity in 0..=1usize {
                let tuple_count = schema_arity.pow(pred_arity as u32).max(
                    // arity-0 predicates have the empty tuple
                    if pred_arity == 0 { 1 } else { 0 },
                );
                let slots = 4 * tuple_count; // pre+/pre-/eff+/eff-
                for mask in 0u32..(1 << slots) {
                    let lits = |base: usize, positive: bool| -> Vec<SchemaLiteral> {
                        (0..tuple_count)
                            .filter(|ti| mask & (1 << (base * tuple_count + ti)) != 0)
                            .map(|_| SchemaLiteral {
                                atom: SchemaAtom {
                                    pred: 0,
                                    args: vec![0; pred_arity],
                                },
                                positive,
                            })
                            .collect()
                    };
                    let mut pre = lits(0, true);
                    pre.extend(lits(1, false));
                    let mut eff = lits(2, true);
                    eff.extend(lits(3, false));
                    let draft = SchemaDraft {
                        name: "toggle".to_string(),
                        params: (0..schema_arity).map(|i| format!("?x{i}")).collect(),
                        pre,
                        eff,
                    };
                    let Ok(domain) =
                        Domain::assemble(vec![("p".to_string(), pred_arity)], vec![draft])
                    else {
                        continue;
                    };
                    let domain = Arc::new(domain);
                    // skip unused-parameter schemas: they ground to
                    // duplicate edges and can never match
                    let used_params = domain.schemas[0]
                        .pre
                        .iter()
                        .chain(&domain.schemas[0].eff)
                        .flat_map(|l| l.atom.args.iter())
                        .count();
                    if schema_arity > 0 && used_params == 0 {
                        continue;
                    }
                    for init_mask in 0..(1u32 << pred_arity.max(1)) {
                        let init: Vec<GroundAtom> = (0..1)
                            .filter(|_| init_mask & 1 != 0)
                            .map(|_| GroundAtom {
                                pred: 0,
                                args: vec![0; pred_arity],
                            })
                            .collect();
                        let Ok(inst) = Instance::new(
                            "o".to_string(),
                            domain.clone(),
                            vec!["o0".to_string()],
                            init,
                            vec![],
                        ) else {
                            continue;
                        };
                        let Ok(task) = ground(Arc::new(inst)) else {
                            continue;
                        };
                        let Ok(ssg) = expand(
                            &task,
                            &Limits {
                                max_states: 3,
                                max_time: None,
                            },
                        ) else {
                            continue;
                        };
                        let produced = strip_labels(&ssg.to_graph(&task));
                        if isomorphic(&produced, &target, true).is_some() {
                            let c = cost(&domain);
                            best = Some(best.map_or(c, |b| b.min(c)));
                        }
                    }
                }
            }
        }
        let bundle = GraphBundle {
            graphs: vec![toggle_graph()],
        };
        let hyp = learn_domain(&bundle, &toggle_space(), &SolverCfg::default()).unwrap();
        assert_eq!(Some(hyp.cost), best);
    }

    #[test]
    fn two_label_cycle_learns_and_validates() {
        let graph = Graph {
            n: 2,
            init: Some(0),
            goals: Some(vec![]),
            edges: vec![
                (0, 1, Some("fwd".to_string())),
                (1, 0, Some("back".to_string())),
            ],
        };
        let space = HypothesisSpace {
            max_predicates: 1,
            max_pred_arity: 1,
            schema_arity: [
                ("fwd".to_string(), 1),
                ("back".to_string(), 1),
            ]
            .into_iter()
            .collect(),
            objects: 1,
        };
        let bundle = GraphBundle {
            graphs: vec![graph.clone()],
        };
        let hyp = learn_domain(&bundle, &space, &SolverCfg::default()).unwrap();
        assert_eq!(hyp.cost, 3);
        // validation on the training graph holds by the learn postcondition
        let w = validate_domain(&hyp.domain, &graph, &space, &SolverCfg::default())
            .unwrap()
            .expect("own training graph validates");
        assert_eq!(w.node_atoms.len(), 2);
        // a mutated graph with a missing edge must not validate
        let broken = Graph {
            edges: graph.edges[..1].to_vec(),
            ..graph.clone()
        };
        assert!(validate_domain(&hyp.domain, &broken, &space, &SolverCfg::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn learning_is_deterministic() {
        let bundle = GraphBundle {
            graphs: vec![toggle_graph()],
        };
        let a = learn_domain(&bundle, &toggle_space(), &SolverCfg::default()).unwrap();
        let b = learn_domain(&bundle, &toggle_space(), &SolverCfg::default()).unwrap();
        assert_eq!(a.domain, b.domain);
        assert_eq!(a.witnesses, b.witnesses);
    }

    #[test]
    fn cost_examples() {
        let empty = Domain {
            predicates: vec![],
            schemas: vec![],
        };
        assert_eq!(cost(&empty), 0);
        // hanoi: move(d,fr,to) + fluents clear/1, on/2; larger is static
        assert_eq!(cost(&hanoi_domain()), (1 + 3) + (1 + 1) + (1 + 2));
        // delivery fluents: at/2 at_r/1 hold/1 handempty/0 delivered/1;
        // adjacent and target are static and therefore free
        let delivery = make_delivery(2, 2, 1, 0).unwrap().domain.clone();
        let schemas: u32 = delivery.schemas.iter().map(|s| 1 + s.params.len() as u32).sum();
        assert_eq!(
            cost(&delivery),
            schemas + (1 + 2) + (1 + 1) + (1 + 1) + (1 + 0) + (1 + 1)
        );
    }

    #[test]
    fn unlabeled_and_unknown_label_inputs() {
        let g = Graph {
            n: 2,
            init: Some(0),
            goals: None,
            edges: vec![(0, 1, None)],
        };
        let bundle = GraphBundle {
            graphs: vec![g.clone()],
        };
        assert!(matches!(
            learn_domain(&bundle, &toggle_space(), &SolverCfg::default()),
            Err(ModelError::Unlabeled { .. })
        ));
        let g2 = Graph {
            edges: vec![(0, 1, Some("unknown".to_string()))],
            ..g
        };
        assert!(matches!(
            learn_domain(
                &GraphBundle { graphs: vec![g2] },
                &toggle_space(),
                &SolverCfg::default()
            ),
            Err(ModelError::MissingArity(_))
        ));
    }

    #[test]
    fn witness_goal_literals_stay_empty() {
        let bundle = GraphBundle {
            graphs: vec![toggle_graph()],
        };
        let hyp = learn_domain(&bundle, &toggle_space(), &SolverCfg::default()).unwrap();
        let inst = hyp.witnesses[0]
            .instance("w".to_string(), hyp.domain.clone())
            .unwrap();
        assert_eq!(inst.goal, Vec::<GroundLiteral>::new());
    }
}
