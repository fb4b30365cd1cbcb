//! Lifted STRIPS-with-negation: vocabulary, schemas, grounding, and
//! successor semantics.
//!
//! All types are immutable after construction. States are closed-world:
//! a state stores the sorted set of true ground fluent atoms; static atoms
//! live in the [`Instance`] and never change.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Identifier of a ground fluent atom within a [`GroundTask`].
pub type AtomId = u32;

#[derive(Debug, Error, PartialEq)]
pub enum StripsError {
    #[error("predicate `{0}` declared twice")]
    DuplicatePredicate(String),
    #[error("schema `{schema}` references undeclared predicate `{pred}`")]
    UndeclaredPredicate { schema: String, pred: String },
    #[error("arity mismatch for `{pred}`: expected {expected}, got {got}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        got: usize,
    },
    #[error("schema `{0}` has an atom both added and deleted")]
    ContradictoryEffect(String),
    #[error("schema `{0}` has an empty effect list")]
    EmptyEffect(String),
    #[error("schema `{schema}` literal argument index {arg} out of range")]
    BadParamIndex { schema: String, arg: usize },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("goal references static predicate `{0}`")]
    StaticInGoal(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("action `{0}` not applicable in state")]
    Inapplicable(String),
    #[error("ground atom universe too large ({0} atoms)")]
    TooManyAtoms(usize),
}

/// Predicate symbol. `is_static` is computed: a predicate is static iff it
/// appears in no schema effect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
    pub is_static: bool,
}

/// Atom over schema parameters: `args` are parameter indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaAtom {
    pub pred: usize,
    pub args: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaLiteral {
    pub atom: SchemaAtom,
    pub positive: bool,
}

/// Action schema. `static_pre` holds literals over static predicates,
/// `pre` and `eff` literals over fluents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<String>,
    pub static_pre: Vec<SchemaLiteral>,
    pub pre: Vec<SchemaLiteral>,
    pub eff: Vec<SchemaLiteral>,
}

/// Schema as written: preconditions not yet split into static and fluent
/// parts. [`Domain::assemble`] does the split once staticness is known.
#[derive(Clone, Debug)]
pub struct SchemaDraft {
    pub name: String,
    pub params: Vec<String>,
    pub pre: Vec<SchemaLiteral>,
    pub eff: Vec<SchemaLiteral>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub predicates: Vec<Predicate>,
    pub schemas: Vec<ActionSchema>,
}

/// Name of the built-in equality predicate (enabled by `:equality`).
pub const EQ_PRED: &str = "=";

impl Domain {
    /// Build a domain from raw predicate declarations and schema drafts.
    ///
    /// Computes which predicates are static (never in an effect), splits
    /// each draft's preconditions accordingly, and validates the schema
    /// invariants.
    pub fn assemble(
        predicates: Vec<(String, usize)>,
        drafts: Vec<SchemaDraft>,
    ) -> Result<Domain, StripsError> {
        let mut names: HashMap<&str, usize> = HashMap::new();
        for (i, (name, _)) in predicates.iter().enumerate() {
            if names.insert(name.as_str(), i).is_some() {
                return Err(StripsError::DuplicatePredicate(name.clone()));
            }
        }
        let mut in_effect = vec![false; predicates.len()];
        for d in &drafts {
            for lit in &d.eff {
                if lit.atom.pred >= predicates.len() {
                    return Err(StripsError::UndeclaredPredicate {
                        schema: d.name.clone(),
                        pred: format!("#{}", lit.atom.pred),
                    });
                }
                in_effect[lit.atom.pred] = true;
            }
        }
        let preds: Vec<Predicate> = predicates
            .into_iter()
            .enumerate()
            .map(|(i, (name, arity))| Predicate {
                is_static: !in_effect[i] || name == EQ_PRED,
                name,
                arity,
            })
            .collect();

        let mut schemas = Vec::with_capacity(drafts.len());
        for d in drafts {
            let check = |lits: &[SchemaLiteral]| -> Result<(), StripsError> {
                for lit in lits {
                    let p = preds.get(lit.atom.pred).ok_or_else(|| {
                        StripsError::UndeclaredPredicate {
                            schema: d.name.clone(),
                            pred: format!("#{}", lit.atom.pred),
                        }
                    })?;
                    if p.arity != lit.atom.args.len() {
                        return Err(StripsError::ArityMismatch {
                            pred: p.name.clone(),
                            expected: p.arity,
                            got: lit.atom.args.len(),
                        });
                    }
                    if let Some(&a) = lit.atom.args.iter().find(|&&a| a >= d.params.len()) {
                        return Err(StripsError::BadParamIndex {
                            schema: d.name.clone(),
                            arg: a,
                        });
                    }
                }
                Ok(())
            };
            check(&d.pre)?;
            check(&d.eff)?;
            if d.eff.is_empty() {
                return Err(StripsError::EmptyEffect(d.name.clone()));
            }
            for lit in &d.eff {
                if d.eff
                    .iter()
                    .any(|o| o.atom == lit.atom && o.positive != lit.positive)
                {
                    return Err(StripsError::ContradictoryEffect(d.name.clone()));
                }
            }
            let (static_pre, pre): (Vec<_>, Vec<_>) = d
                .pre
                .into_iter()
                .partition(|l| preds[l.atom.pred].is_static);
            schemas.push(ActionSchema {
                name: d.name,
                params: d.params,
                static_pre,
                pre,
                eff: d.eff,
            });
        }
        Ok(Domain {
            predicates: preds,
            schemas,
        })
    }

    pub fn predicate(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }
}

/// Ground atom: predicate index plus object indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: usize,
    pub args: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundLiteral {
    pub atom: GroundAtom,
    pub positive: bool,
}

/// Ground task: a domain plus objects, initial atoms, and goal literals.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub domain: Arc<Domain>,
    pub objects: Vec<String>,
    /// Initial ground atoms, fluent and static alike.
    pub init: Vec<GroundAtom>,
    pub goal: Vec<GroundLiteral>,
}

impl Instance {
    pub fn new(
        name: String,
        domain: Arc<Domain>,
        objects: Vec<String>,
        init: Vec<GroundAtom>,
        goal: Vec<GroundLiteral>,
    ) -> Result<Instance, StripsError> {
        let check = |atom: &GroundAtom| -> Result<(), StripsError> {
            let p = domain
                .predicates
                .get(atom.pred)
                .ok_or_else(|| StripsError::UnknownPredicate(format!("#{}", atom.pred)))?;
            if p.arity != atom.args.len() {
                return Err(StripsError::ArityMismatch {
                    pred: p.name.clone(),
                    expected: p.arity,
                    got: atom.args.len(),
                });
            }
            if let Some(&o) = atom.args.iter().find(|&&o| o >= objects.len()) {
                return Err(StripsError::UnknownObject(format!("#{o}")));
            }
            Ok(())
        };
        for a in &init {
            check(a)?;
        }
        for l in &goal {
            check(&l.atom)?;
            if domain.predicates[l.atom.pred].is_static {
                return Err(StripsError::StaticInGoal(
                    domain.predicates[l.atom.pred].name.clone(),
                ));
            }
        }
        Ok(Instance {
            name,
            domain,
            objects,
            init,
            goal,
        })
    }

    pub fn object(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    /// True ground static atoms of the instance (from init).
    pub fn static_atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.init
            .iter()
            .filter(|a| self.domain.predicates[a.pred].is_static)
    }
}

/// Closed-world state: sorted set of true ground fluent atom ids.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(Vec<AtomId>);

impl State {
    pub fn from_atoms(mut atoms: Vec<AtomId>) -> State {
        atoms.sort_unstable();
        atoms.dedup();
        State(atoms)
    }

    pub fn contains(&self, a: AtomId) -> bool {
        self.0.binary_search(&a).is_ok()
    }

    pub fn atoms(&self) -> &[AtomId] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: usize,
    pub args: Vec<usize>,
    pub pre_pos: Vec<AtomId>,
    pub pre_neg: Vec<AtomId>,
    pub add: Vec<AtomId>,
    pub del: Vec<AtomId>,
}

/// Grounded instance: the full fluent atom universe (lexicographic by
/// predicate then arguments) and every ground action whose static
/// preconditions hold in the initial situation.
#[derive(Clone, Debug)]
pub struct GroundTask {
    pub instance: Arc<Instance>,
    pub atoms: Vec<GroundAtom>,
    atom_ids: HashMap<GroundAtom, AtomId>,
    pub actions: Vec<GroundAction>,
    pub init: State,
    pub goal_pos: Vec<AtomId>,
    pub goal_neg: Vec<AtomId>,
}

const MAX_GROUND_ATOMS: usize = 5_000_000;

impl GroundTask {
    pub fn atom_id(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.atom_ids.get(atom).copied()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id as usize]
    }

    pub fn action_name(&self, idx: usize) -> String {
        let a = &self.actions[idx];
        let schema = &self.instance.domain.schemas[a.schema];
        let args: Vec<&str> = a
            .args
            .iter()
            .map(|&o| self.instance.objects[o].as_str())
            .collect();
        if args.is_empty() {
            schema.name.clone()
        } else {
            format!("{}({})", schema.name, args.join(","))
        }
    }

    pub fn applicable_in(&self, state: &State, action: &GroundAction) -> bool {
        action.pre_pos.iter().all(|&a| state.contains(a))
            && action.pre_neg.iter().all(|&a| !state.contains(a))
    }

    /// Indices of actions applicable in `state`, in the task's fixed order.
    pub fn applicable(&self, state: &State) -> Vec<usize> {
        (0..self.actions.len())
            .filter(|&i| self.applicable_in(state, &self.actions[i]))
            .collect()
    }

    pub fn apply_unchecked(&self, state: &State, action: &GroundAction) -> State {
        let mut atoms: Vec<AtomId> = state
            .atoms()
            .iter()
            .copied()
            .filter(|a| !action.del.contains(a))
            .collect();
        atoms.extend_from_slice(&action.add);
        State::from_atoms(atoms)
    }

    /// Successor state; errors if the action is not applicable.
    pub fn apply(&self, state: &State, idx: usize) -> Result<State, StripsError> {
        let action = &self.actions[idx];
        if !self.applicable_in(state, action) {
            return Err(StripsError::Inapplicable(self.action_name(idx)));
        }
        Ok(self.apply_unchecked(state, action))
    }

    pub fn is_goal(&self, state: &State) -> bool {
        self.goal_pos.iter().all(|&a| state.contains(a))
            && self.goal_neg.iter().all(|&a| !state.contains(a))
    }
}

fn eval_static_lit(
    lit: &SchemaLiteral,
    binding: &[usize],
    domain: &Domain,
    static_true: &std::collections::HashSet<GroundAtom>,
) -> bool {
    let args: Vec<usize> = lit.atom.args.iter().map(|&p| binding[p]).collect();
    let truth = if domain.predicates[lit.atom.pred].name == EQ_PRED {
        args[0] == args[1]
    } else {
        static_true.contains(&GroundAtom {
            pred: lit.atom.pred,
            args,
        })
    };
    truth == lit.positive
}

/// Ground an instance: enumerate all schema bindings, keep those whose
/// static preconditions hold initially, and index the fluent atom universe.
pub fn ground(instance: Arc<Instance>) -> Result<GroundTask, StripsError> {
    let domain = instance.domain.clone();
    let nobj = instance.objects.len();

    // fluent atom universe, lexicographic by (pred, args)
    let mut atoms = Vec::new();
    for (p, pred) in domain.predicates.iter().enumerate() {
        if pred.is_static {
            continue;
        }
        let count = nobj.checked_pow(pred.arity as u32).unwrap_or(usize::MAX);
        if atoms.len().saturating_add(count) > MAX_GROUND_ATOMS {
            return Err(StripsError::TooManyAtoms(atoms.len() + count));
        }
        let mut args = vec![0usize; pred.arity];
        loop {
            atoms.push(GroundAtom {
                pred: p,
                args: args.clone(),
            });
            if !next_tuple(&mut args, nobj) {
                break;
            }
        }
    }
    let atom_ids: HashMap<GroundAtom, AtomId> = atoms
        .iter()
        .enumerate()
        .map(|(i, a)| (a.clone(), i as AtomId))
        .collect();

    let static_true: std::collections::HashSet<GroundAtom> =
        instance.static_atoms().cloned().collect();

    let mut actions = Vec::new();
    for (si, schema) in domain.schemas.iter().enumerate() {
        let np = schema.params.len();
        if nobj == 0 && np > 0 {
            continue;
        }
        let mut binding = vec![0usize; np];
        loop {
            if schema
                .static_pre
                .iter()
                .all(|l| eval_static_lit(l, &binding, &domain, &static_true))
            {
                let resolve = |lits: &[SchemaLiteral], want_pos: bool| -> Vec<AtomId> {
                    let mut v: Vec<AtomId> = lits
                        .iter()
                        .filter(|l| l.positive == want_pos)
                        .map(|l| {
                            let args: Vec<usize> =
                                l.atom.args.iter().map(|&p| binding[p]).collect();
                            atom_ids[&GroundAtom {
                                pred: l.atom.pred,
                                args,
                            }]
                        })
                        .collect();
                    v.sort_unstable();
                    v.dedup();
                    v
                };
                let add = resolve(&schema.eff, true);
                let del = resolve(&schema.eff, false);
                // bindings collapsing an add and a delete onto the same atom
                // are ill-formed and skipped
                if !add.iter().any(|a| del.contains(a)) {
                    actions.push(GroundAction {
                        schema: si,
                        args: binding.clone(),
                        pre_pos: resolve(&schema.pre, true),
                        pre_neg: resolve(&schema.pre, false),
                        add,
                        del,
                    });
                }
            }
            if np == 0 || !next_tuple(&mut binding, nobj) {
                break;
            }
        }
    }
    // deterministic order: schema name, then argument names
    actions.sort_by(|a, b| {
        let an = &domain.schemas[a.schema].name;
        let bn = &domain.schemas[b.schema].name;
        an.cmp(bn).then_with(|| {
            let aa: Vec<&str> = a.args.iter().map(|&o| instance.objects[o].as_str()).collect();
            let ba: Vec<&str> = b.args.iter().map(|&o| instance.objects[o].as_str()).collect();
            aa.cmp(&ba)
        })
    });

    let init = State::from_atoms(
        instance
            .init
            .iter()
            .filter(|a| !domain.predicates[a.pred].is_static)
            .map(|a| atom_ids[a])
            .collect(),
    );
    let mut goal_pos = Vec::new();
    let mut goal_neg = Vec::new();
    for l in &instance.goal {
        let id = atom_ids[&l.atom];
        if l.positive {
            goal_pos.push(id);
        } else {
            goal_neg.push(id);
        }
    }

    Ok(GroundTask {
        instance,
        atoms,
        atom_ids,
        actions,
        init,
        goal_pos,
        goal_neg,
    })
}

/// Advance `tuple` to the next assignment over `0..n`; false when exhausted.
fn next_tuple(tuple: &mut [usize], n: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atom#{}({:?})", self.pred, self.args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_domain() -> Arc<Domain> {
        // p(x) toggled by flip(x); q static
        let preds = vec![("p".to_string(), 1), ("q".to_string(), 1)];
        let drafts = vec![
            SchemaDraft {
                name: "set".into(),
                params: vec!["x".into()],
                pre: vec![
                    SchemaLiteral {
                        atom: SchemaAtom { pred: 0, args: vec![0] },
                        positive: false,
                    },
                    SchemaLiteral {
                        atom: SchemaAtom { pred: 1, args: vec![0] },
                        positive: true,
                    },
                ],
                eff: vec![SchemaLiteral {
                    atom: SchemaAtom { pred: 0, args: vec![0] },
                    positive: true,
                }],
            },
            SchemaDraft {
                name: "clear".into(),
                params: vec!["x".into()],
                pre: vec![SchemaLiteral {
                    atom: SchemaAtom { pred: 0, args: vec![0] },
                    positive: true,
                }],
                eff: vec![SchemaLiteral {
                    atom: SchemaAtom { pred: 0, args: vec![0] },
                    positive: false,
                }],
            },
        ];
        Arc::new(Domain::assemble(preds, drafts).unwrap())
    }

    #[test]
    fn statics_computed_and_split() {
        let d = toy_domain();
        assert!(!d.predicates[0].is_static);
        assert!(d.predicates[1].is_static);
        assert_eq!(d.schemas[0].static_pre.len(), 1);
        assert_eq!(d.schemas[0].pre.len(), 1);
    }

    #[test]
    fn grounding_respects_statics() {
        let d = toy_domain();
        // q holds only for object a; so set(b) is never ground
        let inst = Arc::new(
            Instance::new(
                "t".into(),
                d,
                vec!["a".into(), "b".into()],
                vec![GroundAtom { pred: 1, args: vec![0] }],
                vec![GroundLiteral {
                    atom: GroundAtom { pred: 0, args: vec![0] },
                    positive: true,
                }],
            )
            .unwrap(),
        );
        let task = ground(inst).unwrap();
        let names: Vec<String> = (0..task.actions.len())
            .map(|i| task.action_name(i))
            .collect();
        assert_eq!(names, vec!["clear(a)", "clear(b)", "set(a)"]);
    }

    #[test]
    fn apply_follows_set_semantics() {
        let d = toy_domain();
        let inst = Arc::new(
            Instance::new(
                "t".into(),
                d,
                vec!["a".into()],
                vec![GroundAtom { pred: 1, args: vec![0] }],
                vec![],
            )
            .unwrap(),
        );
        let task = ground(inst).unwrap();
        let set = (0..task.actions.len())
            .find(|&i| task.action_name(i) == "set(a)")
            .unwrap();
        let s1 = task.apply(&task.init, set).unwrap();
        assert!(s1.contains(task.atom_id(&GroundAtom { pred: 0, args: vec![0] }).unwrap()));
        // now inapplicable (negative precondition fails)
        assert!(matches!(
            task.apply(&s1, set),
            Err(StripsError::Inapplicable(_))
        ));
    }

    #[test]
    fn zero_objects_yields_no_bindings() {
        let d = toy_domain();
        let inst = Arc::new(Instance::new("t".into(), d, vec![], vec![], vec![]).unwrap());
        let task = ground(inst).unwrap();
        assert!(task.actions.is_empty());
    }

    #[test]
    fn contradictory_effect_rejected() {
        let preds = vec![("p".to_string(), 0)];
        let drafts = vec![SchemaDraft {
            name: "bad".into(),
            params: vec![],
            pre: vec![],
            eff: vec![
                SchemaLiteral {
                    atom: SchemaAtom { pred: 0, args: vec![] },
                    positive: true,
                },
                SchemaLiteral {
                    atom: SchemaAtom { pred: 0, args: vec![] },
                    positive: false,
                },
            ],
        }];
        assert!(matches!(
            Domain::assemble(preds, drafts),
            Err(StripsError::ContradictoryEffect(_))
        ));
    }
}
