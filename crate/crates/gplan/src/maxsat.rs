//! Weighted partial Max-SAT: clause sets, the weighted-CNF text format,
//! and an optimizing solver built on iterative SAT calls.
//!
//! Literals use DIMACS convention: variable v > 0, literal +v or -v.
//! The optimizer relaxes each soft clause with a fresh selector variable
//! and descends on the total weight of falsified soft clauses, enforcing
//! each candidate bound with a sequential weighted counter; the last
//! satisfiable bound yields the optimum.

use std::fmt::Write as _;
use thiserror::Error;
use varisat::{ExtendFormula, Solver};

pub type Lit = i32;

#[derive(Debug, Error)]
pub enum MaxSatError {
    #[error("malformed wcnf at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("literal references variable {var} > declared {declared}")]
    VarOutOfRange { var: usize, declared: usize },
    #[error("solver failure: {0}")]
    Solver(String),
}

/// Hard clauses plus weighted soft clauses over variables `1..=num_vars`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WeightedClauseSet {
    pub num_vars: usize,
    pub hard: Vec<Vec<Lit>>,
    pub soft: Vec<(u64, Vec<Lit>)>,
}

impl WeightedClauseSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocate a fresh variable and return its index.
    pub fn new_var(&mut self) -> Lit {
        self.num_vars += 1;
        self.num_vars as Lit
    }

    pub fn add_hard(&mut self, clause: Vec<Lit>) {
        debug_assert!(clause.iter().all(|&l| l != 0));
        self.hard.push(clause);
    }

    pub fn add_soft(&mut self, weight: u64, clause: Vec<Lit>) {
        debug_assert!(weight >= 1);
        self.soft.push((weight, clause));
    }

    fn check(&self) -> Result<(), MaxSatError> {
        for clause in self.hard.iter().chain(self.soft.iter().map(|(_, c)| c)) {
            for &l in clause {
                let var = l.unsigned_abs() as usize;
                if var > self.num_vars {
                    return Err(MaxSatError::VarOutOfRange {
                        var,
                        declared: self.num_vars,
                    });
                }
            }
        }
        Ok(())
    }

    /// Serialize in the classic weighted-CNF text format: header
    /// `p wcnf <vars> <clauses> <top>`, then one `<weight> <lits...> 0`
    /// line per clause, hard clauses carrying the top weight.
    pub fn to_wcnf(&self) -> String {
        let top = self.soft.iter().map(|(w, _)| w).sum::<u64>() + 1;
        let mut out = String::new();
        writeln!(
            out,
            "p wcnf {} {} {}",
            self.num_vars,
            self.hard.len() + self.soft.len(),
            top
        )
        .unwrap();
        for c in &self.hard {
            write!(out, "{top}").unwrap();
            for l in c {
                write!(out, " {l}").unwrap();
            }
            writeln!(out, " 0").unwrap();
        }
        for (w, c) in &self.soft {
            write!(out, "{w}").unwrap();
            for l in c {
                write!(out, " {l}").unwrap();
            }
            writeln!(out, " 0").unwrap();
        }
        out
    }

    pub fn from_wcnf(text: &str) -> Result<Self, MaxSatError> {
        let mut cs = WeightedClauseSet::new();
        let mut top: Option<u64> = None;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            let err = |message: &str| MaxSatError::Parse {
                line: ln + 1,
                message: message.to_string(),
            };
            if let Some(rest) = line.strip_prefix("p ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 4 || parts[0] != "wcnf" {
                    return Err(err("expected `p wcnf <vars> <clauses> <top>`"));
                }
                cs.num_vars = parts[1].parse().map_err(|_| err("bad variable count"))?;
                top = Some(parts[3].parse().map_err(|_| err("bad top weight"))?);
                continue;
            }
            let top = top.ok_or_else(|| err("clause before header"))?;
            let mut nums = line.split_whitespace();
            let weight: u64 = nums
                .next()
                .ok_or_else(|| err("empty clause line"))?
                .parse()
                .map_err(|_| err("bad weight"))?;
            let mut clause = Vec::new();
            let mut terminated = false;
            for tok in nums {
                let l: Lit = tok.parse().map_err(|_| err("bad literal"))?;
                if l == 0 {
                    terminated = true;
                    break;
                }
                clause.push(l);
            }
            if !terminated {
                return Err(err("clause not 0-terminated"));
            }
            if weight >= top {
                cs.hard.push(clause);
            } else {
                cs.soft.push((weight, clause));
            }
        }
        if top.is_none() {
            return Err(MaxSatError::Parse {
                line: 0,
                message: "missing `p wcnf` header".to_string(),
            });
        }
        cs.check()?;
        Ok(cs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaxSatOutcome {
    /// Minimal total weight of falsified soft clauses, with a witnessing
    /// assignment over the original variables (index 0 = variable 1).
    Optimum { cost: u64, model: Vec<bool> },
    /// Hard clauses alone are unsatisfiable.
    Unsat,
}

fn vlit(l: Lit) -> varisat::Lit {
    varisat::Lit::from_dimacs(l as isize)
}

/// Decide satisfiability of a plain clause set; `Some(model)` over
/// variables `1..=num_vars` when satisfiable.
pub fn sat(clauses: &[Vec<Lit>], num_vars: usize) -> Result<Option<Vec<bool>>, MaxSatError> {
    let mut solver = Solver::new();
    // materialize every variable so the model covers all of them
    for v in 1..=num_vars {
        let l = vlit(v as Lit);
        solver.add_clause(&[l, !l]);
    }
    for c in clauses {
        let lits: Vec<varisat::Lit> = c.iter().map(|&l| vlit(l)).collect();
        solver.add_clause(&lits);
    }
    match solver.solve() {
        Ok(true) => {
            let model = solver.model().ok_or_else(|| {
                MaxSatError::Solver("sat result without model".to_string())
            })?;
            let mut assign = vec![false; num_vars];
            for l in model {
                let v = l.to_dimacs();
                let var = v.unsigned_abs() as usize;
                if (1..=num_vars).contains(&var) {
                    assign[var - 1] = v > 0;
                }
            }
            Ok(Some(assign))
        }
        Ok(false) => Ok(None),
        Err(e) => Err(MaxSatError::Solver(e.to_string())),
    }
}

/// Append a sequential weighted counter enforcing Σ wᵢ·xᵢ ≤ bound.
/// `terms` pairs each weight with the DIMACS variable of xᵢ; fresh
/// variables are drawn from `next_var`.
pub(crate) fn add_counter(
    clauses: &mut Vec<Vec<Lit>>,
    terms: &[(u64, Lit)],
    bound: u64,
    next_var: &mut usize,
) {
    if terms.iter().map(|(w, _)| w).sum::<u64>() <= bound {
        return;
    }
    if bound == 0 {
        for &(_, x) in terms {
            clauses.push(vec![-x]);
        }
        return;
    }
    let b = bound as usize;
    let n = terms.len();
    // s[i][j] ⇔ partial sum of first i+1 terms ≥ j+1 (implied upward only)
    let mut fresh = || {
        *next_var += 1;
        *next_var as Lit
    };
    let mut s: Vec<Vec<Lit>> = Vec::with_capacity(n);
    for _ in 0..n {
        s.push((0..b).map(|_| fresh()).collect());
    }
    for i in 0..n {
        let (w, x) = terms[i];
        let w = w as usize;
        if w > b {
            // the term alone exceeds the bound
            clauses.push(vec![-x]);
            if i > 0 {
                for j in 0..b {
                    clauses.push(vec![-s[i - 1][j], s[i][j]]);
                }
            }
            continue;
        }
        for j in 0..w {
            // x_i alone pushes the count to w_i
            clauses.push(vec![-x, s[i][j]]);
        }
        if i > 0 {
            for j in 0..b {
                // counts carry over
                clauses.push(vec![-s[i - 1][j], s[i][j]]);
                // adding w_i on top of a count of j+1
                if j + w < b {
                    clauses.push(vec![-x, -s[i - 1][j], s[i][j + w]]);
                }
            }
            // overflow: previous count of bound+1-w_i forbids x_i
            clauses.push(vec![-x, -s[i - 1][b - w]]);
        }
    }
}

/// Minimize the weight of falsified soft clauses subject to the hard
/// clauses, by solution-improving descent on the cost bound.
pub fn solve(cs: &WeightedClauseSet) -> Result<MaxSatOutcome, MaxSatError> {
    solve_seeded(cs, None)
}

/// Minimize the weight of falsified soft clauses subject to the hard
/// clauses and an external acceptance test, by ascending bound search:
/// one incremental solver holds the hard clauses and a weighted counter
/// sized to `cap`; each bound is enforced through an assumption on the
/// counter's top row, so bounds can rise as candidates are rejected.
/// `reject` inspects each candidate model (over the original variables)
/// and either accepts it with `None` or returns a clause ruling it out —
/// the clause must be falsified by the model. An empty rejection clause
/// aborts the search. Solutions costing more than `cap` are out of reach:
/// the search reports `Unsat` instead.
pub fn solve_ascending<F>(
    cs: &WeightedClauseSet,
    cap: u64,
    mut reject: F,
) -> Result<MaxSatOutcome, MaxSatError>
where
    F: FnMut(&[bool]) -> Option<Vec<Lit>>,
{
    cs.check()?;
    let base_vars = cs.num_vars;
    let mut next_var = base_vars;
    let mut hard = cs.hard.clone();
    let mut relax: Vec<(u64, Lit)> = Vec::new();
    for (w, c) in &cs.soft {
        next_var += 1;
        let r = next_var as Lit;
        let mut clause = c.clone();
        clause.push(r);
        hard.push(clause);
        relax.push((*w, r));
    }
    let relaxed_vars = next_var;
    let total: u64 = relax.iter().map(|&(w, _)| w).sum();
    // the counter hard-caps the relaxed weight; rows then express the
    // per-bound cuts as assumptions
    let ceiling = cap.min(total.saturating_sub(1));
    let mut nv = relaxed_vars;
    add_counter(&mut hard, &relax, ceiling, &mut nv);
    let top: Vec<Lit> = if nv > relaxed_vars {
        ((nv - ceiling as usize + 1)..=nv).map(|v| v as Lit).collect()
    } else {
        Vec::new()
    };

    let mut solver = Solver::new();
    for v in 1..=relaxed_vars {
        let l = vlit(v as Lit);
        solver.add_clause(&[l, !l]);
    }
    for c in &hard {
        let lits: Vec<varisat::Lit> = c.iter().map(|&l| vlit(l)).collect();
        solver.add_clause(&lits);
    }

    let cost_of = |model: &[bool]| -> u64 {
        cs.soft
            .iter()
            .filter(|(_, c)| {
                !c.iter().any(|&l| {
                    let v = l.unsigned_abs() as usize - 1;
                    (l > 0) == model[v]
                })
            })
            .map(|(w, _)| w)
            .sum()
    };

    let mut bound = 0u64;
    loop {
        match top.get(bound as usize) {
            Some(&s) => solver.assume(&[!vlit(s)]),
            None => solver.assume(&[]),
        }
        match solver.solve() {
            Ok(true) => {
                let model = solver.model().ok_or_else(|| {
                    MaxSatError::Solver("sat result without model".to_string())
                })?;
                let mut assign = vec![false; base_vars];
                for l in model {
                    let v = l.to_dimacs();
                    let var = v.unsigned_abs() as usize;
                    if (1..=base_vars).contains(&var) {
                        assign[var - 1] = v > 0;
                    }
                }
                let cost = cost_of(&assign);
                if cost > bound {
                    return Err(MaxSatError::Solver(
                        "cost bound not respected by counter encoding".to_string(),
                    ));
                }
                match reject(&assign) {
                    None => return Ok(MaxSatOutcome::Optimum { cost, model: assign }),
                    Some(clause) if clause.is_empty() => {
                        return Ok(MaxSatOutcome::Unsat)
                    }
                    Some(clause) => {
                        debug_assert!(!clause.iter().any(|&l| {
                            (l > 0) == assign[l.unsigned_abs() as usize - 1]
                        }));
                        let lits: Vec<varisat::Lit> =
                            clause.iter().map(|&l| vlit(l)).collect();
                        solver.add_clause(&lits);
                    }
                }
            }
            Ok(false) => {
                if bound > ceiling {
                    return Ok(MaxSatOutcome::Unsat);
                }
                bound += 1;
                if std::env::var("GPLAN_DEBUG").is_ok() {
                    eprintln!("ascending bound -> {bound}");
                }
            }
            Err(e) => return Err(MaxSatError::Solver(e.to_string())),
        }
    }
}

/// [`solve`] with an optional known feasible assignment over the original
/// variables; a valid seed lets the descent start from its cost instead of
/// an unbounded first call. Seeds violating a hard clause are ignored.
pub fn solve_seeded(
    cs: &WeightedClauseSet,
    seed: Option<Vec<bool>>,
) -> Result<MaxSatOutcome, MaxSatError> {
    solve_filtered(cs, seed, |_| None)
}

/// [`solve_seeded`] under an external acceptance test: `reject` inspects
/// each candidate model (over the original variables) and either accepts
/// it with `None` or returns a clause ruling it out — the clause must be
/// falsified by the model, or the descent would revisit it. Rejections
/// are handled inside one incremental solver, so the minimum over the
/// accepted models costs one re-solve per rejected candidate. An empty
/// rejection clause aborts the search, returning the best accepted model
/// so far (or `Unsat`).
pub fn solve_filtered<F>(
    cs: &WeightedClauseSet,
    seed: Option<Vec<bool>>,
    mut reject: F,
) -> Result<MaxSatOutcome, MaxSatError>
where
    F: FnMut(&[bool]) -> Option<Vec<Lit>>,
{
    cs.check()?;
    let base_vars = cs.num_vars;
    // relax soft clauses
    let mut next_var = base_vars;
    let mut hard = cs.hard.clone();
    let mut relax: Vec<(u64, Lit)> = Vec::new();
    for (w, c) in &cs.soft {
        next_var += 1;
        let r = next_var as Lit;
        let mut clause = c.clone();
        clause.push(r);
        hard.push(clause);
        relax.push((*w, r));
    }
    let relaxed_vars = next_var;

    let cost_of = |model: &[bool]| -> u64 {
        cs.soft
            .iter()
            .filter(|(_, c)| {
                !c.iter().any(|&l| {
                    let v = l.unsigned_abs() as usize - 1;
                    (l > 0) == model[v]
                })
            })
            .map(|(w, _)| w)
            .sum()
    };

    let mut best: Option<(u64, Vec<bool>)> = None;
    if let Some(model) = seed {
        let ok = model.len() == base_vars
            && cs.hard.iter().all(|c| {
                c.iter()
                    .any(|&l| (l > 0) == model[l.unsigned_abs() as usize - 1])
            });
        if ok && reject(&model).is_none() {
            best = Some((cost_of(&model), model));
        }
    }

    // One incremental solver for the whole descent: hard clauses go in
    // once, the counter is built once at the first finite bound, and
    // later bounds are enforced by unit clauses on the counter's top row.
    let mut solver = Solver::new();
    for v in 1..=relaxed_vars {
        let l = vlit(v as Lit);
        solver.add_clause(&[l, !l]);
    }
    for c in &hard {
        let lits: Vec<varisat::Lit> = c.iter().map(|&l| vlit(l)).collect();
        solver.add_clause(&lits);
    }
    // top-row counter literals: counter_top[j] ⇔ relaxed weight ≥ j+1
    let mut counter_top: Option<Vec<Lit>> = None;
    let mut num_vars = relaxed_vars;
    loop {
        match &best {
            None => {}
            Some((0, _)) => break,
            Some((c, _)) => {
                let b = c - 1;
                match &counter_top {
                    None => {
                        let mut clauses = Vec::new();
                        let mut nv = num_vars;
                        add_counter(&mut clauses, &relax, b, &mut nv);
                        for c in &clauses {
                            let lits: Vec<varisat::Lit> =
                                c.iter().map(|&l| vlit(l)).collect();
                            solver.add_clause(&lits);
                        }
                        // the counter's final row occupies the top b slots
                        let top: Vec<Lit> = if nv > num_vars {
                            ((nv - b as usize + 1)..=nv).map(|v| v as Lit).collect()
                        } else {
                            Vec::new() // total weight ≤ bound: no counter
                        };
                        num_vars = nv;
                        counter_top = Some(top);
                    }
                    Some(top) => {
                        // forbid a relaxed weight of b+1 or more
                        if let Some(&s) = top.get(b as usize) {
                            solver.add_clause(&[!vlit(s)]);
                        }
                    }
                }
            }
        }
        match solver.solve() {
            Ok(true) => {
                let model = solver.model().ok_or_else(|| {
                    MaxSatError::Solver("sat result without model".to_string())
                })?;
                let mut assign = vec![false; base_vars];
                for l in model {
                    let v = l.to_dimacs();
                    let var = v.unsigned_abs() as usize;
                    if (1..=base_vars).contains(&var) {
                        assign[var - 1] = v > 0;
                    }
                }
                let cost = cost_of(&assign);
                if let Some((c, _)) = &best {
                    // the counter bounds the cost by c-1, so descent is strict
                    if cost >= *c {
                        return Err(MaxSatError::Solver(
                            "cost bound not respected by counter encoding".to_string(),
                        ));
                    }
                }
                if let Some(clause) = reject(&assign) {
                    if clause.is_empty() {
                        break;
                    }
                    debug_assert!(!clause.iter().any(|&l| {
                        (l > 0) == assign[l.unsigned_abs() as usize - 1]
                    }));
                    let lits: Vec<varisat::Lit> =
                        clause.iter().map(|&l| vlit(l)).collect();
                    solver.add_clause(&lits);
                    continue;
                }
                best = Some((cost, assign));
            }
            Ok(false) => break,
            Err(e) => return Err(MaxSatError::Solver(e.to_string())),
        }
    }
    Ok(match best {
        Some((cost, model)) => MaxSatOutcome::Optimum { cost, model },
        None => MaxSatOutcome::Unsat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sat_basics() {
        assert!(sat(&[vec![1, 2], vec![-1]], 2).unwrap().is_some());
        assert!(sat(&[vec![1], vec![-1]], 1).unwrap().is_none());
        let m = sat(&[vec![-3]], 3).unwrap().unwrap();
        assert_eq!(m.len(), 3);
        assert!(!m[2]);
    }

    #[test]
    fn optimum_picks_cheapest_branch() {
        let mut cs = WeightedClauseSet::new();
        let a = cs.new_var();
        let b = cs.new_var();
        cs.add_hard(vec![a, b]);
        cs.add_soft(2, vec![-a]);
        cs.add_soft(3, vec![-b]);
        match solve(&cs).unwrap() {
            MaxSatOutcome::Optimum { cost, model } => {
                assert_eq!(cost, 2);
                assert!(model[0] && !model[1]);
            }
            MaxSatOutcome::Unsat => panic!("satisfiable"),
        }
    }

    #[test]
    fn zero_cost_when_softs_compatible() {
        let mut cs = WeightedClauseSet::new();
        let a = cs.new_var();
        let b = cs.new_var();
        cs.add_hard(vec![a]);
        cs.add_soft(5, vec![a, b]);
        match solve(&cs).unwrap() {
            MaxSatOutcome::Optimum { cost, .. } => assert_eq!(cost, 0),
            MaxSatOutcome::Unsat => panic!("satisfiable"),
        }
    }

    #[test]
    fn hard_contradiction_is_unsat() {
        let mut cs = WeightedClauseSet::new();
        let a = cs.new_var();
        cs.add_hard(vec![a]);
        cs.add_hard(vec![-a]);
        cs.add_soft(1, vec![a]);
        assert_eq!(solve(&cs).unwrap(), MaxSatOutcome::Unsat);
    }

    #[test]
    fn optimum_matches_brute_force_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..25 {
            let nv = rng.gen_range(2..7usize);
            let mut cs = WeightedClauseSet::new();
            for _ in 0..nv {
                cs.new_var();
            }
            let random_clause = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<Lit> {
                let mut c = Vec::new();
                for v in 1..=nv as Lit {
                    if rng.gen_bool(0.5) {
                        c.push(if rng.gen_bool(0.5) { v } else { -v });
                    }
                }
                c
            };
            for _ in 0..rng.gen_range(1..5) {
                let c = random_clause(&mut rng);
                if !c.is_empty() {
                    cs.add_hard(c);
                }
            }
            for _ in 0..rng.gen_range(1..6) {
                let c = random_clause(&mut rng);
                if !c.is_empty() {
                    let w = rng.gen_range(1..6);
                    cs.add_soft(w, c);
                }
            }
            // brute force over all assignments
            let mut oracle: Option<u64> = None;
            for bits in 0..(1u32 << nv) {
                let assign: Vec<bool> = (0..nv).map(|i| bits & (1 << i) != 0).collect();
                let holds = |c: &[Lit]| {
                    c.iter()
                        .any(|&l| (l > 0) == assign[l.unsigned_abs() as usize - 1])
                };
                if !cs.hard.iter().all(|c| holds(c)) {
                    continue;
                }
                let cost: u64 = cs
                    .soft
                    .iter()
                    .filter(|(_, c)| !holds(c))
                    .map(|(w, _)| w)
                    .sum();
                oracle = Some(oracle.map_or(cost, |o: u64| o.min(cost)));
            }
            match (solve(&cs).unwrap(), oracle) {
                (MaxSatOutcome::Optimum { cost, .. }, Some(o)) => assert_eq!(cost, o),
                (MaxSatOutcome::Unsat, None) => {}
                (got, want) => panic!("solver {got:?} vs oracle {want:?}"),
            }
        }
    }

    #[test]
    fn wcnf_roundtrip_and_format() {
        let mut cs = WeightedClauseSet::new();
        let a = cs.new_var();
        let b = cs.new_var();
        cs.add_hard(vec![a, -b]);
        cs.add_soft(2, vec![-a]);
        cs.add_soft(3, vec![b]);
        let text = cs.to_wcnf();
        assert_eq!(text, "p wcnf 2 3 6\n6 1 -2 0\n2 -1 0\n3 2 0\n");
        let back = WeightedClauseSet::from_wcnf(&text).unwrap();
        assert_eq!(back, cs);
        assert!(WeightedClauseSet::from_wcnf("garbage\n").is_err());
        assert!(WeightedClauseSet::from_wcnf("p wcnf 1 1 5\n5 1\n").is_err());
    }
}
