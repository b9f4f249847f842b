//! Turns canonical-form scripts into transactions: starting from a seed
//! input, find the remaining inputs through lookup rules, compute outputs
//! through assignment rules, then validate the result.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::ledger::{validate_transaction, ApplyError, Invalid, Ledger, LedgerConfig, OutputRef, Transaction, UtxoSet};
use crate::script::canonical::{CanonicalBranch, Condition, OutTarget};
use crate::script::{
    analyze_canonical, evaluate_with, Ctx, EvalContext, EvalError, Output, Payload, Script, ScriptExpr, Value,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{reason}")]
pub struct NotBuildable {
    pub reason: String,
}

fn not_buildable<T>(reason: impl Into<String>) -> Result<T, NotBuildable> {
    Err(NotBuildable { reason: reason.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputPlan {
    Assign {
        script: ScriptExpr,
        fields: Vec<(String, ScriptExpr)>,
    },
    Copy {
        source: usize,
        overrides: Vec<(String, ScriptExpr)>,
    },
}

/// How to build a transaction when the branch's guard holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchPlan {
    pub guard: Vec<Condition>,
    pub input_count: usize,
    /// `keys[k - 1]` are the lookup keys of input `k`.
    pub keys: Vec<Vec<(String, ScriptExpr)>>,
    pub outputs: Vec<OutputPlan>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildRules {
    pub plans: Vec<BranchPlan>,
}

impl BuildRules {
    pub fn lookup_inputs(&self) -> usize {
        self.plans.iter().map(|p| p.keys.len()).max().unwrap_or(0)
    }
}

/// Requires the script to be in canonical form, every output of every
/// branch to be fully determined, and every lookup key to be indexed.
pub fn derive_rules(script: &ScriptExpr, indexed: &[String]) -> Result<BuildRules, NotBuildable> {
    let form = analyze_canonical(script).or_else(|e| not_buildable(format!("not canonical: {e}")))?;
    let plans = form
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| {
            plan_branch(b, indexed).map_err(|e| NotBuildable {
                reason: format!("branch {i}: {e}"),
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(BuildRules { plans })
}

type Assignments = Vec<(String, ScriptExpr)>;

/// Literal indices `k` of every `in[k]` in `e`.
fn literal_inputs(e: &ScriptExpr, acc: &mut BTreeSet<usize>) {
    if let ScriptExpr::Index(base, idx) = e {
        if let (ScriptExpr::CtxRef(Ctx::Inputs), ScriptExpr::Lit(Value::Int(k))) = (base.as_ref(), idx.as_ref()) {
            if let Ok(k) = usize::try_from(k) {
                acc.insert(k);
            }
        }
    }
    for c in e.children() {
        literal_inputs(c, acc);
    }
}

fn plan_branch(b: &CanonicalBranch, indexed: &[String]) -> Result<BranchPlan, NotBuildable> {
    let max_lookup = b.lookup_rules.iter().map(|r| r.input).max().unwrap_or(0);
    let input_count = b.input_count_hint().unwrap_or(max_lookup + 1);
    if input_count == 0 || max_lookup >= input_count {
        return not_buildable(format!(
            "lookups reach in[{max_lookup}] but the branch has {input_count} inputs"
        ));
    }
    let mut keys = vec![Vec::new(); input_count - 1];
    for r in &b.lookup_rules {
        if !indexed.contains(&r.field) {
            return not_buildable(format!("lookup key `{}` of in[{}] is not indexed", r.field, r.input));
        }
        keys[r.input - 1].push((r.field.clone(), r.expr.clone()));
    }
    if let Some(k) = keys.iter().position(Vec::is_empty) {
        return not_buildable(format!("no lookup rule finds in[{}]", k + 1));
    }
    let rule_exprs = b
        .out_rules
        .iter()
        .map(|r| &r.expr)
        .chain(b.lookup_rules.iter().map(|r| &r.expr))
        .chain(b.copy_rules.iter().flat_map(|r| r.overrides.iter().map(|(_, e)| e)));
    let mut read = BTreeSet::new();
    for e in rule_exprs {
        literal_inputs(e, &mut read);
    }
    if let Some(&k) = read.iter().find(|&&k| k >= input_count) {
        return not_buildable(format!("rules read in[{k}] but the branch has {input_count} inputs"));
    }

    let count = b
        .out_rules
        .iter()
        .map(|r| r.output)
        .chain(b.copy_rules.iter().map(|r| r.output))
        .max()
        .map_or(0, |m| m + 1);
    let mut scripts: Vec<Option<ScriptExpr>> = vec![None; count];
    let mut fields: Vec<Vec<(String, ScriptExpr)>> = vec![Vec::new(); count];
    let mut copies: Vec<Option<(usize, Assignments)>> = vec![None; count];
    for r in &b.out_rules {
        match &r.target {
            OutTarget::Script if scripts[r.output].is_some() => {
                return not_buildable(format!("out[{}].script has two rules", r.output))
            }
            OutTarget::Script => scripts[r.output] = Some(r.expr.clone()),
            OutTarget::Field(f) if fields[r.output].iter().any(|(g, _)| g == f) => {
                return not_buildable(format!("out[{}].{f} has two rules", r.output))
            }
            OutTarget::Field(f) => fields[r.output].push((f.clone(), r.expr.clone())),
        }
    }
    for r in &b.copy_rules {
        if copies[r.output].is_some() || scripts[r.output].is_some() || !fields[r.output].is_empty() {
            return not_buildable(format!("out[{}] is both copied and assigned", r.output));
        }
        copies[r.output] = Some((r.source, r.overrides.clone()));
    }
    let mut outputs = Vec::with_capacity(count);
    for i in 0..count {
        outputs.push(match (&copies[i], &scripts[i]) {
            (Some((source, overrides)), _) => {
                if *source >= count || copies[*source].is_some() {
                    return not_buildable(format!("out[{i}] copies out[{source}], which is not assigned directly"));
                }
                OutputPlan::Copy {
                    source: *source,
                    overrides: overrides.clone(),
                }
            }
            (None, Some(script)) => OutputPlan::Assign {
                script: script.clone(),
                fields: std::mem::take(&mut fields[i]),
            },
            (None, None) => return not_buildable(format!("no rule determines out[{i}].script")),
        });
    }
    Ok(BranchPlan {
        guard: b.guard.clone(),
        input_count,
        keys,
        outputs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CannotBuild {
    #[error("seed {0} is not unspent")]
    MissingSeed(OutputRef),
    #[error("seed does not carry the script being built")]
    SeedScriptMismatch,
    #[error("script cannot drive a builder: {0}")]
    NotBuildable(NotBuildable),
    #[error("no branch of the script applies to this seed")]
    NoBranch,
    #[error("rule for {what} failed: {err}")]
    RuleError { what: String, err: EvalError },
    #[error("no unspent output matches the lookup for in[{input}]")]
    LookupMiss { input: usize },
    #[error("{count} different outputs match the lookup for in[{input}]")]
    LookupAmbiguous { input: usize, count: usize },
    #[error("an output with the same index key was already created")]
    AlreadyBuilt,
    #[error("built transaction is invalid: {0}")]
    ConsistencyCheckFailed(Invalid),
}

fn eval_rule(
    e: &ScriptExpr,
    inputs: &[Output],
    cfg: &LedgerConfig,
    what: impl Fn() -> String,
) -> Result<Value, CannotBuild> {
    let ctx = EvalContext::new(inputs, &[], 0).expect("seed present");
    evaluate_with(e, &ctx, &cfg.eval_limits())
        .map(|(v, _)| v)
        .map_err(|err| CannotBuild::RuleError { what: what(), err })
}

/// Outputs matching the lookup, collapsing content-identical matches to
/// the lowest ref. Already chosen inputs are excluded.
fn find_input(
    utxo: &UtxoSet,
    constraints: &[(String, Value)],
    taken: &[OutputRef],
    input: usize,
) -> Result<OutputRef, CannotBuild> {
    let found: Vec<OutputRef> = utxo
        .lookup(constraints)
        .expect("keys are indexed")
        .into_iter()
        .filter(|r| !taken.contains(r))
        .collect();
    let Some(first) = found.first() else {
        return Err(CannotBuild::LookupMiss { input });
    };
    let content = utxo.get(first);
    let distinct = found.iter().filter(|r| utxo.get(r) != content).count();
    if distinct > 0 {
        return Err(CannotBuild::LookupAmbiguous {
            input,
            count: distinct + 1,
        });
    }
    Ok(*first)
}

fn build_with_plan(
    utxo: &UtxoSet,
    plan: &BranchPlan,
    seed: OutputRef,
    cfg: &LedgerConfig,
) -> Result<Transaction, CannotBuild> {
    let mut refs = vec![seed];
    let mut inputs = vec![utxo.get(&seed).expect("seed checked").clone()];
    for (k, keys) in plan.keys.iter().enumerate() {
        let input = k + 1;
        let constraints = keys
            .iter()
            .map(|(f, e)| Ok((f.clone(), eval_rule(e, &inputs, cfg, || format!("in[{input}].{f}"))?)))
            .collect::<Result<Vec<_>, CannotBuild>>()?;
        let r = find_input(utxo, &constraints, &refs, input)?;
        inputs.push(utxo.get(&r).expect("looked up").clone());
        refs.push(r);
    }

    let mut outputs: Vec<Option<Output>> = vec![None; plan.outputs.len()];
    for (i, p) in plan.outputs.iter().enumerate() {
        if let OutputPlan::Assign { script, fields } = p {
            let script = match eval_rule(script, &inputs, cfg, || format!("out[{i}].script"))? {
                Value::Script(s) => s,
                other => {
                    return Err(CannotBuild::RuleError {
                        what: format!("out[{i}].script"),
                        err: EvalError::Type {
                            expected: "script",
                            found: other.type_name(),
                        },
                    })
                }
            };
            let mut payload = Payload::new();
            for (f, e) in fields {
                payload.set(f.clone(), eval_rule(e, &inputs, cfg, || format!("out[{i}].{f}"))?);
            }
            outputs[i] = Some(Output::new(script, payload));
        }
    }
    for (i, p) in plan.outputs.iter().enumerate() {
        if let OutputPlan::Copy { source, overrides } = p {
            let mut o = outputs[*source].clone().expect("sources are assigned");
            for (f, e) in overrides {
                o.payload
                    .set(f.clone(), eval_rule(e, &inputs, cfg, || format!("out[{i}].{f}"))?);
            }
            outputs[i] = Some(o);
        }
    }
    let outputs: Vec<Output> = outputs.into_iter().map(|o| o.expect("every output planned")).collect();

    for o in &outputs {
        let key = utxo.key_of(o);
        if !key.is_empty() && utxo.was_created(&key) {
            return Err(CannotBuild::AlreadyBuilt);
        }
    }
    let tx = Transaction::spend(refs, outputs);
    validate_transaction(&tx, utxo, cfg).map_err(CannotBuild::ConsistencyCheckFailed)?;
    Ok(tx)
}

fn guard_selects(plan: &BranchPlan, seed: &Output, cfg: &LedgerConfig) -> bool {
    // only in[0] is known yet; the guard may also test in.size
    let padded = vec![seed.clone(); plan.input_count];
    let ctx = EvalContext::new(&padded, &[], 0).expect("non-empty");
    let branch = CanonicalBranch {
        guard: plan.guard.clone(),
        ..Default::default()
    };
    branch.selected(&ctx, &cfg.eval_limits()) == Some(true)
}

/// Tries each branch whose guard admits the seed, in script order, and
/// returns the first transaction that validates. On failure, reports the
/// reason from the first admitted branch.
pub fn build_next(
    utxo: &UtxoSet,
    rules: &BuildRules,
    script: &Script,
    seed: OutputRef,
    cfg: &LedgerConfig,
) -> Result<Transaction, CannotBuild> {
    let seed_out = utxo.get(&seed).ok_or(CannotBuild::MissingSeed(seed))?;
    if seed_out.script != *script {
        return Err(CannotBuild::SeedScriptMismatch);
    }
    let mut first_err = None;
    for plan in rules.plans.iter().filter(|p| guard_selects(p, seed_out, cfg)) {
        match build_with_plan(utxo, plan, seed, cfg) {
            Ok(tx) => return Ok(tx),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or(CannotBuild::NoBranch))
}

/// Caches derived rules per script.
#[derive(Debug, Default)]
pub struct Builder {
    rules: HashMap<Script, Result<BuildRules, NotBuildable>>,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rules_for(&mut self, script: &Script, utxo: &UtxoSet) -> &Result<BuildRules, NotBuildable> {
        self.rules
            .entry(script.clone())
            .or_insert_with(|| derive_rules(script.expr(), utxo.indexed_fields()))
    }

    /// `build_next` with the seed's own script.
    pub fn build_next(
        &mut self,
        utxo: &UtxoSet,
        seed: OutputRef,
        cfg: &LedgerConfig,
    ) -> Result<Transaction, CannotBuild> {
        let script = utxo.get(&seed).ok_or(CannotBuild::MissingSeed(seed))?.script.clone();
        let rules = self
            .rules_for(&script, utxo)
            .clone()
            .map_err(CannotBuild::NotBuildable)?;
        build_next(utxo, &rules, &script, seed, cfg)
    }

    /// One pass over the outputs unspent at the start, in `(txId, index)`
    /// order. Each built transaction is applied before the next seed is
    /// tried; seeds that fail are skipped.
    pub fn sweep(&mut self, ledger: &mut Ledger) -> Result<Vec<Transaction>, ApplyError> {
        self.sweep_seeds(ledger, ledger.utxo().refs())
    }

    /// Like `sweep`, over an explicit seed order.
    pub fn sweep_seeds(&mut self, ledger: &mut Ledger, seeds: Vec<OutputRef>) -> Result<Vec<Transaction>, ApplyError> {
        let mut built = Vec::new();
        for seed in seeds {
            if !ledger.utxo().contains(&seed) {
                continue;
            }
            if let Ok(tx) = self.build_next(ledger.utxo(), seed, &ledger.config) {
                ledger.submit(tx.clone())?;
                built.push(tx);
            }
        }
        Ok(built)
    }
}
