//! Parser and printer for the STRIPS-with-negation PDDL fragment.
//!
//! Supported requirements: `:strips`, `:negative-preconditions`, and
//! `:equality`. Identifiers are case-insensitive and normalized to lower
//! case. Anything outside the fragment is rejected with a positioned
//! diagnostic naming the construct.

use crate::strips::{
    Domain, GroundAtom, GroundLiteral, Instance, SchemaAtom, SchemaDraft, SchemaLiteral, EQ_PRED,
};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug)]
pub struct ParseDiagnostic {
    pub pos: Pos,
    pub severity: Severity,
    pub message: String,
}

impl ParseDiagnostic {
    /// Fixed `file:line:col: severity: message` rendering.
    pub fn render(&self, file: &str) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        format!(
            "{}:{}:{}: {}: {}",
            file, self.pos.line, self.pos.col, sev, self.message
        )
    }
}

/// Parse result: `value` is present iff no error diagnostics were emitted.
#[derive(Debug)]
pub struct ParseOutcome<T> {
    pub value: Option<T>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl<T> ParseOutcome<T> {
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
    }
}

// ---------------------------------------------------------------- s-exprs

#[derive(Clone, Debug)]
enum Sexp {
    Sym(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Sym(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Sexp>, ParseDiagnostic> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top: Vec<Sexp> = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let pos = Pos { line, col };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                continue;
            }
            ';' => {
                for c2 in chars.by_ref() {
                    if c2 == '\n' {
                        line += 1;
                        col = 1;
                        break;
                    }
                }
                continue;
            }
            '(' => {
                stack.push((std::mem::take(&mut top), pos));
            }
            ')' => {
                let (mut parent, open_pos) = stack.pop().ok_or(ParseDiagnostic {
                    pos,
                    severity: Severity::Error,
                    message: "unmatched `)`".into(),
                })?;
                let list = std::mem::replace(&mut top, Vec::new());
                parent.push(Sexp::List(list, open_pos));
                top = parent;
            }
            c if c.is_whitespace() => {}
            _ => {
                let mut sym = String::new();
                sym.push(c);
                while let Some(&c2) = chars.peek() {
                    if c2.is_whitespace() || c2 == '(' || c2 == ')' || c2 == ';' {
                        break;
                    }
                    sym.push(c2);
                    chars.next();
                    col += 1;
                }
                top.push(Sexp::Sym(sym.to_lowercase(), pos));
            }
        }
        col += 1;
    }
    if let Some((_, open_pos)) = stack.pop() {
        return Err(ParseDiagnostic {
            pos: open_pos,
            severity: Severity::Error,
            message: "unclosed `(`".into(),
        });
    }
    Ok(top)
}

// ---------------------------------------------------------------- domain

struct DomainBuilder {
    diags: Vec<ParseDiagnostic>,
    predicates: Vec<(String, usize)>,
    pred_ids: HashMap<String, usize>,
    drafts: Vec<SchemaDraft>,
    equality: bool,
}

impl DomainBuilder {
    fn err(&mut self, pos: Pos, msg: impl Into<String>) {
        self.diags.push(ParseDiagnostic {
            pos,
            severity: Severity::Error,
            message: msg.into(),
        });
    }

    fn warn(&mut self, pos: Pos, msg: impl Into<String>) {
        self.diags.push(ParseDiagnostic {
            pos,
            severity: Severity::Warning,
            message: msg.into(),
        });
    }
}

pub fn parse_domain(text: &str) -> ParseOutcome<Domain> {
    let mut b = DomainBuilder {
        diags: Vec::new(),
        predicates: Vec::new(),
        pred_ids: HashMap::new(),
        drafts: Vec::new(),
        equality: false,
    };
    let forms = match tokenize(text) {
        Ok(f) => f,
        Err(d) => {
            return ParseOutcome {
                value: None,
                diagnostics: vec![d],
            }
        }
    };
    let body = match expect_define(&forms, "domain", &mut b.diags) {
        Some(body) => body,
        None => {
            return ParseOutcome {
                value: None,
                diagnostics: b.diags,
            }
        }
    };
    let mut saw_action = false;
    for form in body {
        let (head, items, pos) = match section(form) {
            Some(t) => t,
            None => {
                b.err(form.pos(), "expected a (:section ...) form");
                continue;
            }
        };
        match head.as_str() {
            ":requirements" => {
                for item in items {
                    match item {
                        Sexp::Sym(s, p) => match s.as_str() {
                            ":strips" | ":negative-preconditions" => {}
                            ":equality" => b.equality = true,
                            other => b.err(*p, format!("unsupported requirement `{other}`")),
                        },
                        _ => b.err(item.pos(), "expected a requirement flag"),
                    }
                }
            }
            ":predicates" => {
                for item in items {
                    if let Sexp::List(parts, p) = item {
                        match decl_predicate(parts) {
                            Some((name, arity)) => {
                                if b.pred_ids.contains_key(&name) {
                                    b.err(*p, format!("predicate `{name}` declared twice"));
                                } else {
                                    b.pred_ids.insert(name.clone(), b.predicates.len());
                                    b.predicates.push((name, arity));
                                }
                            }
                            None => b.err(*p, "malformed predicate declaration"),
                        }
                    } else {
                        b.err(item.pos(), "expected (name ?arg ...)");
                    }
                }
            }
            ":action" => {
                saw_action = true;
                parse_action(items, pos, &mut b);
            }
            other => b.err(pos, format!("unsupported construct `{other}`")),
        }
    }
    if !saw_action {
        b.warn(
            Pos { line: 1, col: 1 },
            "domain declares no action schemas".to_string(),
        );
    }
    if b.diags.iter().any(|d| d.severity == Severity::Error) {
        return ParseOutcome {
            value: None,
            diagnostics: b.diags,
        };
    }
    let predicates = std::mem::take(&mut b.predicates);
    let drafts = std::mem::take(&mut b.drafts);
    match Domain::assemble(predicates, drafts) {
        Ok(d) => ParseOutcome {
            value: Some(d),
            diagnostics: b.diags,
        },
        Err(e) => {
            b.err(Pos { line: 1, col: 1 }, e.to_string());
            ParseOutcome {
                value: None,
                diagnostics: b.diags,
            }
        }
    }
}

fn decl_predicate(parts: &[Sexp]) -> Option<(String, usize)> {
    let mut it = parts.iter();
    let name = match it.next()? {
        Sexp::Sym(s, _) => s.clone(),
        _ => return None,
    };
    let mut arity = 0;
    for p in it {
        match p {
            Sexp::Sym(s, _) if s.starts_with('?') => arity += 1,
            _ => return None,
        }
    }
    Some((name, arity))
}

fn section(form: &Sexp) -> Option<(String, &[Sexp], Pos)> {
    if let Sexp::List(parts, pos) = form {
        if let Some(Sexp::Sym(head, _)) = parts.first() {
            if head.starts_with(':') {
                return Some((head.clone(), &parts[1..], *pos));
            }
        }
    }
    None
}

fn expect_define<'a>(
    forms: &'a [Sexp],
    kind: &str,
    diags: &mut Vec<ParseDiagnostic>,
) -> Option<&'a [Sexp]> {
    let first = match forms {
        [one] => one,
        _ => {
            diags.push(ParseDiagnostic {
                pos: Pos { line: 1, col: 1 },
                severity: Severity::Error,
                message: "expected a single (define ...) form".into(),
            });
            return None;
        }
    };
    if let Sexp::List(parts, pos) = first {
        if let [Sexp::Sym(def, _), Sexp::List(header, _), rest @ ..] = parts.as_slice() {
            if def == "define" {
                if let [Sexp::Sym(k, _), Sexp::Sym(_, _)] = header.as_slice() {
                    if k == kind {
                        return Some(rest);
                    }
                }
            }
        }
        diags.push(ParseDiagnostic {
            pos: *pos,
            severity: Severity::Error,
            message: format!("expected (define ({kind} <name>) ...)"),
        });
    } else {
        diags.push(ParseDiagnostic {
            pos: first.pos(),
            severity: Severity::Error,
            message: "expected a (define ...) form".into(),
        });
    }
    None
}

fn parse_action(items: &[Sexp], pos: Pos, b: &mut DomainBuilder) {
    let mut name = None;
    let mut params: Vec<String> = Vec::new();
    let mut pre: Vec<SchemaLiteral> = Vec::new();
    let mut eff: Vec<SchemaLiteral> = Vec::new();
    let mut it = items.iter().peekable();
    if let Some(Sexp::Sym(n, _)) = it.next() {
        name = Some(n.clone());
    } else {
        b.err(pos, "action is missing a name");
    }
    let mut param_ids: HashMap<String, usize> = HashMap::new();
    while let Some(key) = it.next() {
        let keyword = match key {
            Sexp::Sym(s, _) if s.starts_with(':') => s.clone(),
            _ => {
                b.err(key.pos(), "expected :parameters, :precondition, or :effect");
                continue;
            }
        };
        let value = match it.next() {
            Some(v) => v,
            None => {
                b.err(key.pos(), format!("`{keyword}` is missing its argument"));
                break;
            }
        };
        match keyword.as_str() {
            ":parameters" => {
                if let Sexp::List(vars, _) = value {
                    for v in vars {
                        match v {
                            Sexp::Sym(s, p) if s.starts_with('?') => {
                                if param_ids.contains_key(s) {
                                    b.err(*p, format!("duplicate parameter `{s}`"));
                                } else {
                                    param_ids.insert(s.clone(), params.len());
                                    params.push(s.clone());
                                }
                            }
                            _ => b.err(v.pos(), "parameters must be ?variables"),
                        }
                    }
                } else {
                    b.err(value.pos(), "expected a parameter list");
                }
            }
            ":precondition" => parse_lit_conj(value, &param_ids, &mut pre, b),
            ":effect" => parse_lit_conj(value, &param_ids, &mut eff, b),
            other => b.err(key.pos(), format!("unsupported construct `{other}`")),
        }
    }
    if let Some(name) = name {
        b.drafts.push(SchemaDraft {
            name,
            params,
            pre,
            eff,
        });
    }
}

fn parse_lit_conj(
    expr: &Sexp,
    params: &HashMap<String, usize>,
    out: &mut Vec<SchemaLiteral>,
    b: &mut DomainBuilder,
) {
    let items: Vec<&Sexp> = match expr {
        Sexp::List(parts, _) => match parts.first() {
            Some(Sexp::Sym(s, _)) if s == "and" => parts[1..].iter().collect(),
            _ => vec![expr],
        },
        _ => {
            b.err(expr.pos(), "expected a literal or (and ...)");
            return;
        }
    };
    for item in items {
        if let Some(lit) = parse_schema_literal(item, params, b) {
            out.push(lit);
        }
    }
}

fn parse_schema_literal(
    expr: &Sexp,
    params: &HashMap<String, usize>,
    b: &mut DomainBuilder,
) -> Option<SchemaLiteral> {
    let (inner, positive) = strip_not(expr, b)?;
    let parts = match inner {
        Sexp::List(parts, _) => parts,
        _ => {
            b.err(inner.pos(), "expected an atom");
            return None;
        }
    };
    let (name, pos) = match parts.first() {
        Some(Sexp::Sym(s, p)) => (s.clone(), *p),
        _ => {
            b.err(inner.pos(), "expected a predicate name");
            return None;
        }
    };
    let pred = if name == EQ_PRED {
        if !b.equality {
            b.err(pos, "`=` used without the :equality requirement");
            return None;
        }
        *b.pred_ids.entry(EQ_PRED.to_string()).or_insert_with(|| {
            b.predicates.push((EQ_PRED.to_string(), 2));
            b.predicates.len() - 1
        })
    } else {
        match b.pred_ids.get(&name) {
            Some(&i) => i,
            None => {
                b.err(pos, format!("undeclared predicate `{name}`"));
                return None;
            }
        }
    };
    let mut args = Vec::new();
    for a in &parts[1..] {
        match a {
            Sexp::Sym(s, p) if s.starts_with('?') => match params.get(s) {
                Some(&i) => args.push(i),
                None => {
                    b.err(*p, format!("unknown variable `{s}`"));
                    return None;
                }
            },
            _ => {
                b.err(a.pos(), "schema atoms may only use ?variables");
                return None;
            }
        }
    }
    let expected = b.predicates[pred].1;
    if args.len() != expected {
        b.err(
            pos,
            format!(
                "arity mismatch for `{name}`: expected {expected}, got {}",
                args.len()
            ),
        );
        return None;
    }
    Some(SchemaLiteral {
        atom: SchemaAtom { pred, args },
        positive,
    })
}

fn strip_not<'a>(expr: &'a Sexp, b: &mut DomainBuilder) -> Option<(&'a Sexp, bool)> {
    if let Sexp::List(parts, _) = expr {
        if let Some(Sexp::Sym(s, _)) = parts.first() {
            if s == "not" {
                if parts.len() == 2 {
                    return Some((&parts[1], false));
                }
                b.err(expr.pos(), "`not` takes exactly one atom");
                return None;
            }
        }
    }
    Some((expr, true))
}

// ---------------------------------------------------------------- problem

pub fn parse_problem(text: &str, domain: Arc<Domain>) -> ParseOutcome<Instance> {
    let mut diags: Vec<ParseDiagnostic> = Vec::new();
    let forms = match tokenize(text) {
        Ok(f) => f,
        Err(d) => {
            return ParseOutcome {
                value: None,
                diagnostics: vec![d],
            }
        }
    };
    let body = match expect_define(&forms, "problem", &mut diags) {
        Some(b) => b,
        None => {
            return ParseOutcome {
                value: None,
                diagnostics: diags,
            }
        }
    };
    let mut name = "problem".to_string();
    if let [Sexp::List(parts, _)] = forms.as_slice() {
        if let Some(Sexp::List(header, _)) = parts.get(1) {
            if let Some(Sexp::Sym(n, _)) = header.get(1) {
                name = n.clone();
            }
        }
    }
    let mut objects: Vec<String> = Vec::new();
    let mut obj_ids: HashMap<String, usize> = HashMap::new();
    let mut init: Vec<GroundAtom> = Vec::new();
    let mut goal: Vec<GroundLiteral> = Vec::new();
    let err = |diags: &mut Vec<ParseDiagnostic>, pos: Pos, m: String| {
        diags.push(ParseDiagnostic {
            pos,
            severity: Severity::Error,
            message: m,
        })
    };
    for form in body {
        let (head, items, pos) = match section(form) {
            Some(t) => t,
            None => {
                err(&mut diags, form.pos(), "expected a (:section ...) form".into());
                continue;
            }
        };
        match head.as_str() {
            ":domain" => {}
            ":objects" => {
                for item in items {
                    match item {
                        Sexp::Sym(s, p) => {
                            if obj_ids.contains_key(s) {
                                err(&mut diags, *p, format!("object `{s}` declared twice"));
                            } else {
                                obj_ids.insert(s.clone(), objects.len());
                                objects.push(s.clone());
                            }
                        }
                        _ => err(&mut diags, item.pos(), "objects must be plain names".into()),
                    }
                }
            }
            ":init" => {
                for item in items {
                    if let Some(atom) =
                        parse_ground_atom(item, &domain, &obj_ids, &mut diags)
                    {
                        init.push(atom);
                    }
                }
            }
            ":goal" => {
                let items: Vec<&Sexp> = match items {
                    [Sexp::List(parts, _)] => match parts.first() {
                        Some(Sexp::Sym(s, _)) if s == "and" => parts[1..].iter().collect(),
                        _ => items.iter().collect(),
                    },
                    _ => items.iter().collect(),
                };
                for item in items {
                    let (inner, positive) = match item {
                        Sexp::List(parts, _)
                            if matches!(parts.first(), Some(Sexp::Sym(s, _)) if s == "not") =>
                        {
                            if parts.len() != 2 {
                                err(&mut diags, item.pos(), "`not` takes exactly one atom".into());
                                continue;
                            }
                            (&parts[1], false)
                        }
                        other => (other, true),
                    };
                    if let Some(atom) = parse_ground_atom(inner, &domain, &obj_ids, &mut diags) {
                        goal.push(GroundLiteral { atom, positive });
                    }
                }
            }
            other => err(&mut diags, pos, format!("unsupported construct `{other}`")),
        }
    }
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return ParseOutcome {
            value: None,
            diagnostics: diags,
        };
    }
    match Instance::new(name, domain, objects, init, goal) {
        Ok(inst) => ParseOutcome {
            value: Some(inst),
            diagnostics: diags,
        },
        Err(e) => {
            diags.push(ParseDiagnostic {
                pos: Pos { line: 1, col: 1 },
                severity: Severity::Error,
                message: e.to_string(),
            });
            ParseOutcome {
                value: None,
                diagnostics: diags,
            }
        }
    }
}

fn parse_ground_atom(
    expr: &Sexp,
    domain: &Domain,
    obj_ids: &HashMap<String, usize>,
    diags: &mut Vec<ParseDiagnostic>,
) -> Option<GroundAtom> {
    let mut err = |pos: Pos, m: String| {
        diags.push(ParseDiagnostic {
            pos,
            severity: Severity::Error,
            message: m,
        });
        None
    };
    let parts = match expr {
        Sexp::List(parts, _) => parts,
        _ => return err(expr.pos(), "expected a ground atom".into()),
    };
    let (name, pos) = match parts.first() {
        Some(Sexp::Sym(s, p)) => (s, *p),
        _ => return err(expr.pos(), "expected a predicate name".into()),
    };
    let pred = match domain.predicate(name) {
        Some(p) => p,
        None => return err(pos, format!("unknown predicate `{name}`")),
    };
    let mut args = Vec::new();
    for a in &parts[1..] {
        match a {
            Sexp::Sym(s, p) => match obj_ids.get(s) {
                Some(&o) => args.push(o),
                None => return err(*p, format!("unknown object `{s}`")),
            },
            _ => return err(a.pos(), "atom arguments must be object names".into()),
        }
    }
    let expected = domain.predicates[pred].arity;
    if args.len() != expected {
        return err(
            pos,
            format!(
                "arity mismatch for `{name}`: expected {expected}, got {}",
                args.len()
            ),
        );
    }
    Some(GroundAtom { pred, args })
}

// ---------------------------------------------------------------- printing

pub fn print_domain(domain: &Domain) -> String {
    let mut out = String::new();
    out.push_str("(define (domain dom)\n");
    let equality = domain.predicates.iter().any(|p| p.name == EQ_PRED);
    out.push_str("  (:requirements :strips :negative-preconditions");
    if equality {
        out.push_str(" :equality");
    }
    out.push_str(")\n  (:predicates");
    for p in &domain.predicates {
        if p.name == EQ_PRED {
            continue;
        }
        out.push_str(&format!(" ({}", p.name));
        for i in 0..p.arity {
            let _ = write!(out, " ?x{i}");
        }
        out.push(')');
    }
    out.push_str(")\n");
    for s in &domain.schemas {
        let _ = write!(out, "  (:action {}\n    :parameters (", s.name);
        out.push_str(
            &s.params
                .iter()
                .map(|p| p.as_str())
                .collect::<Vec<_>>()
                .join(" "),
        );
        out.push_str(")\n");
        let lits = |lits: Vec<&SchemaLiteral>| -> String {
            let body: Vec<String> = lits
                .iter()
                .map(|l| {
                    let mut a = format!("({}", domain.predicates[l.atom.pred].name);
                    for &i in &l.atom.args {
                        a.push(' ');
                        a.push_str(&s.params[i]);
                    }
                    a.push(')');
                    if l.positive {
                        a
                    } else {
                        format!("(not {a})")
                    }
                })
                .collect();
            format!("(and {})", body.join(" "))
        };
        let pre: Vec<&SchemaLiteral> = s.static_pre.iter().chain(&s.pre).collect();
        let _ = write!(out, "    :precondition {}\n", lits(pre));
        let _ = write!(out, "    :effect {})\n", lits(s.eff.iter().collect()));
    }
    out.push_str(")\n");
    out
}

pub fn print_problem(instance: &Instance) -> String {
    let domain = &instance.domain;
    let mut out = String::new();
    let _ = write!(out, "(define (problem {})\n  (:domain dom)\n", instance.name);
    out.push_str("  (:objects");
    for o in &instance.objects {
        out.push(' ');
        out.push_str(o);
    }
    out.push_str(")\n  (:init");
    for a in &instance.init {
        out.push(' ');
        out.push_str(&ground_atom_text(a, instance, domain));
    }
    out.push_str(")\n  (:goal (and");
    for l in &instance.goal {
        let a = ground_atom_text(&l.atom, instance, domain);
        if l.positive {
            let _ = write!(out, " {a}");
        } else {
            let _ = write!(out, " (not {a})");
        }
    }
    out.push_str(")))\n");
    out
}

fn ground_atom_text(a: &GroundAtom, instance: &Instance, domain: &Domain) -> String {
    let mut s = format!("({}", domain.predicates[a.pred].name);
    for &o in &a.args {
        s.push(' ');
        s.push_str(&instance.objects[o]);
    }
    s.push(')');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "
(define (domain toy)
  (:requirements :strips :negative-preconditions)
  (:predicates (p ?x) (q ?x))
  (:action set
    :parameters (?x)
    :precondition (and (not (p ?x)) (q ?x))
    :effect (p ?x)))
";

    #[test]
    fn parses_toy_domain() {
        let out = parse_domain(TOY);
        let d = out.value.expect("domain parses");
        assert_eq!(d.schemas.len(), 1);
        assert_eq!(d.predicates.len(), 2);
        assert!(d.predicates[1].is_static);
    }

    #[test]
    fn empty_domain_warns() {
        let out = parse_domain("(define (domain e) (:predicates (p ?x)))");
        assert!(out.value.is_some());
        assert!(out
            .diagnostics
            .iter()
            .any(|d| d.severity == Severity::Warning));
    }

    #[test]
    fn undeclared_predicate_is_one_positioned_error() {
        let text = "
(define (domain bad)
  (:predicates (p ?x))
  (:action a
    :parameters (?x)
    :precondition (q ?x)
    :effect (p ?x)))
";
        let out = parse_domain(text);
        assert!(out.value.is_none());
        let errs: Vec<_> = out.errors().collect();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("undeclared predicate `q`"));
        assert_eq!(errs[0].pos.line, 6);
    }

    #[test]
    fn problem_roundtrip() {
        let d = Arc::new(parse_domain(TOY).value.unwrap());
        let prob = "
(define (problem t1)
  (:domain toy)
  (:objects a b)
  (:init (q a))
  (:goal (and (p a) (not (p b)))))
";
        let out = parse_problem(prob, d.clone());
        let inst = out.value.expect("problem parses");
        assert_eq!(inst.objects.len(), 2);
        assert_eq!(inst.goal.len(), 2);
        let printed = print_problem(&inst);
        let again = parse_problem(&printed, d).value.expect("reparses");
        assert_eq!(inst.objects, again.objects);
        assert_eq!(inst.init, again.init);
        assert_eq!(inst.goal, again.goal);
    }

    #[test]
    fn empty_goal_is_valid() {
        let d = Arc::new(parse_domain(TOY).value.unwrap());
        let out = parse_problem(
            "(define (problem t) (:domain toy) (:objects a) (:init) (:goal (and)))",
            d,
        );
        assert!(out.value.unwrap().goal.is_empty());
    }

    #[test]
    fn goal_unknown_predicate_errors() {
        let d = Arc::new(parse_domain(TOY).value.unwrap());
        let out = parse_problem(
            "(define (problem t) (:domain toy) (:objects a) (:init) (:goal (r a)))",
            d,
        );
        assert!(out.value.is_none());
        assert!(out.errors().any(|e| e.message.contains("unknown predicate")));
    }

    #[test]
    fn domain_roundtrip_structural_equality() {
        let d = parse_domain(TOY).value.unwrap();
        let printed = print_domain(&d);
        let again = parse_domain(&printed).value.unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn diagnostic_rendering_format() {
        let d = ParseDiagnostic {
            pos: Pos { line: 3, col: 7 },
            severity: Severity::Error,
            message: "boom".into(),
        };
        assert_eq!(d.render("f.pddl"), "f.pddl:3:7: error: boom");
    }
}
