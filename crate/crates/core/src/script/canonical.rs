//! Recognises scripts that are conjunctions of output assignments and input
//! lookups, the shape a transaction builder can execute directly:
//!
//! ```text
//! (∧ out[i].x = f(in)) ∧ (∧ in[1].x = g(in[0])) ∧ (∧ in[2].x = g(in[0], in[1])) ∧ ...
//! ```
//!
//! `let` bindings are inlined first. An `if` whose result feeds the
//! conjunction is lifted to the top, which splits the script into branches;
//! each branch is the path of conditions that selects it plus its own list
//! of rules. Inside a branch, known facts (`in.size = k` from the guard) are
//! used to resolve indexing into concatenations of synthetic outputs, so
//! that e.g. `(synth(..) ++ in)[1].x` becomes `in[0].x`.
//!
//! For well-typed payloads, a script and its form agree on every context:
//! the script evaluates to true iff the guard of exactly one branch holds
//! and every rule and residual check of that branch holds.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use super::ast::{ArithOp, BoolOp, CmpOp, Ctx, ScriptExpr};
use super::eval::{evaluate_with, EvalContext, EvalLimits};
use super::value::Value;

use ScriptExpr as E;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotCanonical {
    pub reason: String,
}

impl fmt::Display for NotCanonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.reason)
    }
}

fn reject<T>(reason: impl Into<String>) -> Result<T, NotCanonical> {
    Err(NotCanonical { reason: reason.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutTarget {
    Field(String),
    Script,
}

/// `out[output].target = expr`, with `expr` free of `out`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutRule {
    pub output: usize,
    pub target: OutTarget,
    pub expr: ScriptExpr,
}

/// `out[output]` equals `out[source]` with `overrides` applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyRule {
    pub output: usize,
    pub source: usize,
    pub overrides: Vec<(String, ScriptExpr)>,
}

/// `in[input].field = expr`, with `expr` reading only `in[j]` for `j < input`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupRule {
    pub input: usize,
    pub field: String,
    pub expr: ScriptExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub expr: ScriptExpr,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CanonicalBranch {
    /// Conditions along the decision path, outermost first.
    pub guard: Vec<Condition>,
    pub out_rules: Vec<OutRule>,
    pub copy_rules: Vec<CopyRule>,
    pub lookup_rules: Vec<LookupRule>,
    /// Remaining conjuncts: checks over inputs, plus `out.size` checks.
    pub residual: Vec<ScriptExpr>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub branches: Vec<CanonicalBranch>,
}

pub fn analyze_canonical(script: &ScriptExpr) -> Result<CanonicalForm, NotCanonical> {
    let inlined = inline_lets(script, &mut Vec::new())?;
    let tree = lift(&inlined);
    let mut leaves = Vec::new();
    tree.collect(&mut Vec::new(), &mut leaves);

    let mut branches = Vec::new();
    for (path, leaf) in leaves {
        for cond in &path {
            if cond.expr.mentions(Ctx::Outputs) {
                return reject(format!("branch condition `{}` reads outputs", cond.expr));
            }
        }
        let facts = Facts::from_path(&path);
        let body = simplify(&leaf, &facts);
        let mut branch = CanonicalBranch {
            guard: path,
            ..Default::default()
        };
        for conjunct in conjuncts(&body) {
            classify(conjunct, &mut branch)?;
        }
        branches.push(branch);
    }
    Ok(CanonicalForm { branches })
}

impl CanonicalBranch {
    /// The branch's rules turned back into boolean expressions.
    pub fn equalities(&self) -> Vec<ScriptExpr> {
        let out = |i: usize| E::outputs().at_lit(i as i64);
        let mut v = Vec::new();
        for r in &self.out_rules {
            let lhs = match &r.target {
                OutTarget::Field(f) => out(r.output).field(f),
                OutTarget::Script => out(r.output).script_of(),
            };
            v.push(E::eq(lhs, r.expr.clone()));
        }
        for r in &self.copy_rules {
            v.push(E::CopyEq {
                lhs: Box::new(out(r.output)),
                rhs: Box::new(out(r.source)),
                overrides: r.overrides.clone(),
            });
        }
        for r in &self.lookup_rules {
            v.push(E::eq(
                E::inputs().at_lit(r.input as i64).field(&r.field),
                r.expr.clone(),
            ));
        }
        v.extend(self.residual.iter().cloned());
        v
    }

    /// The input count pinned down by an `in.size = k` test in the guard
    /// or among the residual checks.
    pub fn input_count_hint(&self) -> Option<usize> {
        let residual = self.residual.iter().map(|e| Condition {
            expr: e.clone(),
            holds: true,
        });
        let all: Path = self.guard.iter().cloned().chain(residual).collect();
        Facts::from_path(&all).in_size
    }

    /// Whether this branch's guard selects it in `ctx`. `None` on evaluation error.
    pub fn selected(&self, ctx: &EvalContext<'_>, limits: &EvalLimits) -> Option<bool> {
        for c in &self.guard {
            match evaluate_with(&c.expr, ctx, limits) {
                Ok((Value::Bool(b), _)) if b == c.holds => {}
                Ok((Value::Bool(_), _)) => return Some(false),
                _ => return None,
            }
        }
        Some(true)
    }
}

impl CanonicalForm {
    /// Evaluates the form itself: the selected branch's rules and residual
    /// checks must all hold. Evaluation errors count as false.
    pub fn holds(&self, ctx: &EvalContext<'_>, limits: &EvalLimits) -> bool {
        for branch in &self.branches {
            match branch.selected(ctx, limits) {
                None => return false,
                Some(false) => continue,
                Some(true) => {
                    return branch
                        .equalities()
                        .iter()
                        .all(|e| matches!(evaluate_with(e, ctx, limits), Ok((Value::Bool(true), _))))
                }
            }
        }
        false
    }

    pub fn out_rule_count(&self) -> usize {
        self.branches
            .iter()
            .map(|b| b.out_rules.len() + b.copy_rules.len())
            .sum()
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.branches.iter().enumerate() {
            writeln!(f, "branch {i}:")?;
            if b.guard.is_empty() {
                writeln!(f, "  when: always")?;
            }
            for c in &b.guard {
                let neg = if c.holds { "" } else { "not " };
                writeln!(f, "  when: {neg}{}", c.expr)?;
            }
            for r in &b.out_rules {
                match &r.target {
                    OutTarget::Field(name) => writeln!(f, "  out[{}].{name} <- {}", r.output, r.expr)?,
                    OutTarget::Script => writeln!(f, "  out[{}].script <- {}", r.output, r.expr)?,
                }
            }
            for r in &b.copy_rules {
                write!(f, "  out[{}] <- copy of out[{}]", r.output, r.source)?;
                for (name, e) in &r.overrides {
                    write!(f, ", {name} <- {e}")?;
                }
                writeln!(f)?;
            }
            let inputs: BTreeSet<usize> = b.lookup_rules.iter().map(|r| r.input).collect();
            for k in inputs {
                let keys: Vec<String> = b
                    .lookup_rules
                    .iter()
                    .filter(|r| r.input == k)
                    .map(|r| format!("{} = {}", r.field, r.expr))
                    .collect();
                writeln!(f, "  in[{k}] <- lookup {}", keys.join(", "))?;
            }
            for r in &b.residual {
                writeln!(f, "  check: {r}")?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// let inlining

fn free_vars(e: &ScriptExpr, bound: &mut Vec<String>, acc: &mut BTreeSet<String>) {
    match e {
        E::Var(n) => {
            if !bound.contains(n) {
                acc.insert(n.clone());
            }
        }
        E::Map { len, var, body } => {
            free_vars(len, bound, acc);
            bound.push(var.clone());
            free_vars(body, bound, acc);
            bound.pop();
        }
        E::Let { name, value, body } => {
            free_vars(value, bound, acc);
            bound.push(name.clone());
            free_vars(body, bound, acc);
            bound.pop();
        }
        _ => {
            for c in e.children() {
                free_vars(c, bound, acc);
            }
        }
    }
}

/// Environment entries: `Some(e)` substitutes, `None` marks a `map` binder
/// that shadows outer lets of the same name.
type Env = Vec<(String, Option<ScriptExpr>)>;

fn inline_lets(e: &ScriptExpr, env: &mut Env) -> Result<ScriptExpr, NotCanonical> {
    Ok(match e {
        E::Var(n) => match env.iter().rev().find(|(k, _)| k == n) {
            Some((_, Some(v))) => v.clone(),
            _ => e.clone(),
        },
        E::Let { name, value, body } => {
            let v = inline_lets(value, env)?;
            env.push((name.clone(), Some(v)));
            let b = inline_lets(body, env);
            env.pop();
            b?
        }
        E::Map { len, var, body } => {
            let len = inline_lets(len, env)?;
            for (_, sub) in env.iter() {
                let mut fv = BTreeSet::new();
                if let Some(s) = sub {
                    free_vars(s, &mut Vec::new(), &mut fv);
                }
                if fv.contains(var) {
                    return reject(format!("inlining would capture variable `{var}`"));
                }
            }
            env.push((var.clone(), None));
            let b = inline_lets(body, env);
            env.pop();
            E::Map {
                len: Box::new(len),
                var: var.clone(),
                body: Box::new(b?),
            }
        }
        _ => {
            let kids = e
                .children()
                .into_iter()
                .map(|c| inline_lets(c, env))
                .collect::<Result<Vec<_>, _>>()?;
            rebuild(e, kids)
        }
    })
}

/// Same node with its children (in `children()` order) replaced.
fn rebuild(e: &ScriptExpr, kids: Vec<ScriptExpr>) -> ScriptExpr {
    let mut it = kids.into_iter();
    let mut next = || Box::new(it.next().expect("child count"));
    match e {
        E::Lit(_) | E::CtxRef(_) | E::Var(_) => e.clone(),
        E::Field(_, n) => E::Field(next(), n.clone()),
        E::ScriptOf(_) => E::ScriptOf(next()),
        E::Size(_) => E::Size(next()),
        E::Not(_) => E::Not(next()),
        E::Index(..) => E::Index(next(), next()),
        E::Concat(..) => E::Concat(next(), next()),
        E::Arith(op, ..) => E::Arith(*op, next(), next()),
        E::Cmp(op, ..) => E::Cmp(*op, next(), next()),
        E::Bool(op, ..) => E::Bool(*op, next(), next()),
        E::PowMod(..) => E::PowMod(next(), next(), next()),
        E::If(..) => E::If(next(), next(), next()),
        E::Map { var, .. } => E::Map {
            len: next(),
            var: var.clone(),
            body: next(),
        },
        E::Let { name, .. } => E::Let {
            name: name.clone(),
            value: next(),
            body: next(),
        },
        E::CopyEq { overrides, .. } => E::CopyEq {
            lhs: next(),
            rhs: next(),
            overrides: overrides.iter().map(|(n, _)| (n.clone(), *next())).collect(),
        },
        E::Synth { fields, .. } => E::Synth {
            script: next(),
            fields: fields.iter().map(|(n, _)| (n.clone(), *next())).collect(),
        },
    }
}

// ---------------------------------------------------------------------------
// if lifting

enum Tree {
    Leaf(ScriptExpr),
    Branch(ScriptExpr, Box<Tree>, Box<Tree>),
}

type Path = Vec<Condition>;

impl Tree {
    /// Substitutes `f(leaf)` for every leaf, dropping subtrees whose
    /// condition is already decided on `path`.
    fn bind(&self, path: &mut Path, f: &dyn Fn(ScriptExpr, &mut Path) -> Tree) -> Tree {
        match self {
            Tree::Leaf(x) => f(x.clone(), path),
            Tree::Branch(c, a, b) => {
                if let Some(known) = path.iter().find(|k| k.expr == *c) {
                    return if known.holds { a.bind(path, f) } else { b.bind(path, f) };
                }
                let mut sides = [(true, a), (false, b)].map(|(holds, t)| {
                    path.push(Condition { expr: c.clone(), holds });
                    let r = t.bind(path, f);
                    path.pop();
                    r
                });
                let [t, e] = std::mem::replace(&mut sides, [Tree::Leaf(E::lit(true)), Tree::Leaf(E::lit(true))]);
                Tree::Branch(c.clone(), Box::new(t), Box::new(e))
            }
        }
    }

    fn collect(&self, path: &mut Path, out: &mut Vec<(Path, ScriptExpr)>) {
        match self {
            Tree::Leaf(x) => out.push((path.clone(), x.clone())),
            Tree::Branch(c, a, b) => {
                if let Some(known) = path.iter().find(|k| k.expr == *c) {
                    let t = if known.holds { a } else { b };
                    return t.collect(path, out);
                }
                for (holds, t) in [(true, a), (false, b)] {
                    path.push(Condition { expr: c.clone(), holds });
                    t.collect(path, out);
                    path.pop();
                }
            }
        }
    }
}

fn lift(e: &ScriptExpr) -> Tree {
    match e {
        E::If(c, a, b) => Tree::Branch((**c).clone(), Box::new(lift(a)), Box::new(lift(b))),
        // the body runs once per index; its conditions may depend on the index
        E::Map { len, var, body } => {
            let body = (**body).clone();
            let var = var.clone();
            lift(len).bind(&mut Vec::new(), &move |len, _| {
                Tree::Leaf(E::Map {
                    len: Box::new(len),
                    var: var.clone(),
                    body: Box::new(body.clone()),
                })
            })
        }
        _ => {
            let kids: Vec<Tree> = e.children().into_iter().map(lift).collect();
            if kids.iter().all(|k| matches!(k, Tree::Leaf(_))) {
                return Tree::Leaf(e.clone());
            }
            sequence(&kids, Vec::new(), &mut Vec::new(), &|xs| rebuild(e, xs))
        }
    }
}

fn sequence(trees: &[Tree], acc: Vec<ScriptExpr>, path: &mut Path, k: &dyn Fn(Vec<ScriptExpr>) -> ScriptExpr) -> Tree {
    match trees.split_first() {
        None => Tree::Leaf(k(acc)),
        Some((first, rest)) => first.bind(path, &|leaf, path| {
            let mut acc = acc.clone();
            acc.push(leaf);
            sequence(rest, acc, path, k)
        }),
    }
}

// ---------------------------------------------------------------------------
// simplification under branch facts

#[derive(Default)]
struct Facts {
    in_size: Option<usize>,
}

impl Facts {
    fn from_path(path: &Path) -> Self {
        let mut facts = Facts::default();
        for c in path.iter().filter(|c| c.holds) {
            for conj in conjuncts(&c.expr) {
                if let E::Cmp(CmpOp::Eq, a, b) = &conj {
                    for (x, y) in [(a, b), (b, a)] {
                        if matches!(&**x, E::Size(s) if **s == E::inputs()) {
                            if let Some(k) = lit_usize(y) {
                                facts.in_size = Some(k);
                            }
                        }
                    }
                }
            }
        }
        facts
    }
}

fn lit_usize(e: &ScriptExpr) -> Option<usize> {
    match e {
        E::Lit(Value::Int(i)) => i.to_usize(),
        _ => None,
    }
}

/// Parts of a `++` chain, left to right.
fn concat_parts(e: &ScriptExpr) -> Vec<&ScriptExpr> {
    match e {
        E::Concat(a, b) => {
            let mut v = concat_parts(a);
            v.extend(concat_parts(b));
            v
        }
        _ => vec![e],
    }
}

/// Statically known length of a concatenation part.
fn part_len(e: &ScriptExpr, facts: &Facts) -> Option<usize> {
    match e {
        E::Synth { .. } => Some(1),
        E::CtxRef(Ctx::Inputs) => facts.in_size,
        _ => None,
    }
}

fn simplify(e: &ScriptExpr, facts: &Facts) -> ScriptExpr {
    // map bodies are left alone; their variable is not a constant
    if let E::Map { len, var, body } = e {
        return E::Map {
            len: Box::new(simplify(len, facts)),
            var: var.clone(),
            body: body.clone(),
        };
    }
    let kids = e.children().into_iter().map(|c| simplify(c, facts)).collect();
    let e = rebuild(e, kids);
    match &e {
        E::Size(base) => {
            let parts = concat_parts(base);
            let lens: Option<Vec<usize>> = parts.iter().map(|p| part_len(p, facts)).collect();
            match lens {
                Some(l) if parts.len() > 1 || matches!(**base, E::CtxRef(_)) => E::lit(l.iter().sum::<usize>() as i64),
                _ => e,
            }
        }
        E::Index(base, idx) => {
            let (Some(mut k), true) = (lit_usize(idx), matches!(**base, E::Concat(..))) else {
                return e;
            };
            let parts = concat_parts(base);
            for (i, part) in parts.iter().enumerate() {
                match part_len(part, facts) {
                    Some(n) if k < n => {
                        return match part {
                            E::Synth { .. } => (*part).clone(),
                            _ => (*part).clone().at_lit(k as i64),
                        }
                    }
                    Some(n) => k -= n,
                    None if i + 1 == parts.len() => return (*part).clone().at_lit(k as i64),
                    None => return e,
                }
            }
            e
        }
        E::Field(base, name) => match &**base {
            E::Synth { fields, .. } => fields
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| v.clone())
                .unwrap_or(e),
            _ => e,
        },
        E::ScriptOf(base) => match &**base {
            E::Synth { script, .. } => (**script).clone(),
            _ => e,
        },
        E::Arith(op, a, b) => match (&**a, &**b) {
            (E::Lit(Value::Int(x)), E::Lit(Value::Int(y))) => match op {
                ArithOp::Add => E::Lit(Value::Int(x + y)),
                ArithOp::Sub => E::Lit(Value::Int(x - y)),
                ArithOp::Mod if y.is_positive() => E::Lit(Value::Int(x.mod_floor(y))),
                ArithOp::Mod => e,
            },
            _ => e,
        },
        E::Cmp(op, a, b) => match (op, &**a, &**b) {
            (CmpOp::Eq, E::Lit(x), E::Lit(y)) => E::lit(x == y),
            (CmpOp::Lt, E::Lit(Value::Int(x)), E::Lit(Value::Int(y))) => E::lit(x < y),
            _ => e,
        },
        E::Not(a) => match &**a {
            E::Lit(Value::Bool(b)) => E::lit(!b),
            _ => e,
        },
        E::Bool(op, a, b) => match (op, &**a, &**b) {
            (BoolOp::And, E::Lit(Value::Bool(true)), x) | (BoolOp::And, x, E::Lit(Value::Bool(true))) => x.clone(),
            (BoolOp::Or, E::Lit(Value::Bool(false)), x) | (BoolOp::Or, x, E::Lit(Value::Bool(false))) => x.clone(),
            _ => e,
        },
        _ => e,
    }
}

// ---------------------------------------------------------------------------
// classification

/// Flattens `&`, pushes `!` through `|` and drops literal `true`.
fn conjuncts(e: &ScriptExpr) -> Vec<ScriptExpr> {
    match e {
        E::Bool(BoolOp::And, a, b) => {
            let mut v = conjuncts(a);
            v.extend(conjuncts(b));
            v
        }
        E::Not(inner) => match &**inner {
            E::Bool(BoolOp::Or, a, b) => {
                let mut v = conjuncts(&E::not((**a).clone()));
                v.extend(conjuncts(&E::not((**b).clone())));
                v
            }
            E::Not(x) => conjuncts(x),
            E::Lit(Value::Bool(false)) => vec![],
            _ => vec![e.clone()],
        },
        E::Lit(Value::Bool(true)) => vec![],
        _ => vec![e.clone()],
    }
}

fn out_index(e: &ScriptExpr) -> Option<usize> {
    match e {
        E::Index(base, idx) if **base == E::outputs() => lit_usize(idx),
        _ => None,
    }
}

fn out_target(e: &ScriptExpr) -> Option<(usize, OutTarget)> {
    match e {
        E::Field(base, name) => out_index(base).map(|i| (i, OutTarget::Field(name.clone()))),
        E::ScriptOf(base) => out_index(base).map(|i| (i, OutTarget::Script)),
        _ => None,
    }
}

fn in_field(e: &ScriptExpr) -> Option<(usize, String)> {
    match e {
        E::Field(base, name) => match &**base {
            E::Index(b, idx) if **b == E::inputs() => lit_usize(idx).map(|k| (k, name.clone())),
            _ => None,
        },
        _ => None,
    }
}

/// Largest `k` in `in[k]` if every input access uses a literal index and
/// neither `self`, `out` nor free variables occur.
fn lookup_source(e: &ScriptExpr) -> Result<Option<usize>, ()> {
    match e {
        E::Index(base, idx) if **base == E::inputs() => match lit_usize(idx) {
            Some(k) => Ok(Some(k)),
            None => Err(()),
        },
        E::CtxRef(_) | E::Var(_) => Err(()),
        _ => {
            let mut max = None;
            for c in e.children() {
                if let Some(k) = lookup_source(c)? {
                    max = max.max(Some(k));
                }
            }
            Ok(max)
        }
    }
}

fn is_out_size(e: &ScriptExpr) -> bool {
    matches!(e, E::Size(b) if **b == E::outputs())
}

fn classify(c: ScriptExpr, branch: &mut CanonicalBranch) -> Result<(), NotCanonical> {
    let reads_out = |e: &ScriptExpr| e.mentions(Ctx::Outputs);

    // bare flags: out[i].f, !out[i].f, in[k].f, !in[k].f
    let (atom, polarity) = match &c {
        E::Not(x) => (&**x, false),
        x => (x, true),
    };
    if let Some((output, target @ OutTarget::Field(_))) = out_target(atom) {
        branch.out_rules.push(OutRule {
            output,
            target,
            expr: E::lit(polarity),
        });
        return Ok(());
    }
    if let Some((input, field)) = in_field(atom) {
        if input >= 1 && !has_lookup(branch, input, &field) {
            branch.lookup_rules.push(LookupRule {
                input,
                field,
                expr: E::lit(polarity),
            });
            return Ok(());
        }
    }

    match &c {
        E::Cmp(CmpOp::Eq, a, b) => {
            for (lhs, rhs) in [(a, b), (b, a)] {
                if let Some((output, target)) = out_target(lhs) {
                    if !reads_out(rhs) {
                        branch.out_rules.push(OutRule {
                            output,
                            target,
                            expr: (**rhs).clone(),
                        });
                        return Ok(());
                    }
                }
            }
            for (lhs, rhs) in [(a, b), (b, a)] {
                if let Some((input, field)) = in_field(lhs) {
                    let ok = match lookup_source(rhs) {
                        Ok(Some(j)) => j < input,
                        Ok(None) => true,
                        Err(()) => false,
                    };
                    if input >= 1 && ok && !has_lookup(branch, input, &field) {
                        branch.lookup_rules.push(LookupRule {
                            input,
                            field,
                            expr: (**rhs).clone(),
                        });
                        return Ok(());
                    }
                }
            }
            let size_check = (is_out_size(a) && !reads_out(b)) || (is_out_size(b) && !reads_out(a));
            if !reads_out(&c) || size_check {
                branch.residual.push(c);
                return Ok(());
            }
            reject(format!(
                "conjunct `{c}` constrains an output field through an expression; \
                 no side is a bare output field"
            ))
        }
        E::CopyEq { lhs, rhs, overrides } => match (out_index(lhs), out_index(rhs)) {
            (Some(output), Some(source)) if output != source && overrides.iter().all(|(_, e)| !reads_out(e)) => {
                branch.copy_rules.push(CopyRule {
                    output,
                    source,
                    overrides: overrides.clone(),
                });
                Ok(())
            }
            _ if !reads_out(&c) => {
                branch.residual.push(c);
                Ok(())
            }
            _ => reject(format!("copy check `{c}` does not relate two distinct outputs")),
        },
        _ if !reads_out(&c) => {
            branch.residual.push(c);
            Ok(())
        }
        _ => reject(format!("conjunct `{c}` reads outputs but is not an assignment")),
    }
}

fn has_lookup(branch: &CanonicalBranch, input: usize, field: &str) -> bool {
    branch.lookup_rules.iter().any(|r| r.input == input && r.field == field)
}
