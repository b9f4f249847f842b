use std::collections::HashSet;

use thiserror::Error;

use super::tx::{sha256, DigestFn, Transaction};
use super::utxo::UtxoSet;
use crate::script::codec::payload_bytes;
use crate::script::{
    evaluate_with, EvalContext, EvalError, EvalLimits, Output, Value, DEFAULT_COST_LIMIT, DEFAULT_MAX_WIDTH,
};

pub const DEFAULT_BLOCK_BUDGET: u64 = 1_000_000;
pub const DEFAULT_MAX_SCRIPT_BYTES: usize = 16 * 1024;
pub const DEFAULT_MAX_PAYLOAD_BYTES: usize = 4 * 1024;

#[derive(Debug, Clone)]
pub struct LedgerConfig {
    pub cost_limit_per_input: u64,
    pub max_width: usize,
    pub block_budget: u64,
    pub max_script_bytes: usize,
    pub max_payload_bytes: usize,
    pub indexed_fields: Vec<String>,
    pub digest: DigestFn,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        LedgerConfig {
            cost_limit_per_input: DEFAULT_COST_LIMIT,
            max_width: DEFAULT_MAX_WIDTH,
            block_budget: DEFAULT_BLOCK_BUDGET,
            max_script_bytes: DEFAULT_MAX_SCRIPT_BYTES,
            max_payload_bytes: DEFAULT_MAX_PAYLOAD_BYTES,
            indexed_fields: Vec::new(),
            digest: sha256,
        }
    }
}

impl LedgerConfig {
    pub fn eval_limits(&self) -> EvalLimits {
        EvalLimits {
            cost_limit: self.cost_limit_per_input,
            max_width: self.max_width,
        }
    }

    pub fn empty_utxo(&self) -> UtxoSet {
        UtxoSet::new(self.indexed_fields.iter().cloned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Invalid {
    #[error("input {0} does not resolve to an unspent output")]
    MissingInput(usize),
    #[error("input {0} repeats an earlier input")]
    DuplicateInput(usize),
    #[error("script of input {0} evaluated to false")]
    ScriptFalse(usize),
    #[error("script of input {0} failed: {1}")]
    ScriptError(usize, EvalError),
    #[error("script of input {0} exceeded the cost limit of {1} units")]
    CostExceeded(usize, u64),
    #[error("non-genesis transaction has no inputs")]
    NoInputs,
    #[error("genesis transaction has inputs")]
    GenesisWithInputs,
    #[error("output {index} exceeds a size cap: {what}")]
    OversizedOutput { index: usize, what: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valid {
    pub total_cost: u64,
    pub per_input: Vec<u64>,
}

fn check_output(i: usize, o: &Output, cfg: &LedgerConfig) -> Result<(), Invalid> {
    let oversized = |what: String| Err(Invalid::OversizedOutput { index: i, what });
    if o.script.bytes().len() > cfg.max_script_bytes {
        return oversized(format!("script is {} bytes", o.script.bytes().len()));
    }
    let p = payload_bytes(&o.payload).len();
    if p > cfg.max_payload_bytes {
        return oversized(format!("payload is {p} bytes"));
    }
    for (name, v) in o.payload.iter() {
        if let Value::Bits(b) = v {
            if b.len() > cfg.max_width {
                return oversized(format!("field `{name}` has {} bits", b.len()));
            }
        }
    }
    Ok(())
}

/// Checks structure and size caps, resolves every input and runs each
/// input's script with that input as `self`. Genesis transactions skip the
/// scripts.
pub fn validate_transaction(tx: &Transaction, utxo: &UtxoSet, cfg: &LedgerConfig) -> Result<Valid, Invalid> {
    for (i, o) in tx.outputs.iter().enumerate() {
        check_output(i, o, cfg)?;
    }
    if tx.is_genesis {
        return if tx.inputs.is_empty() {
            Ok(Valid {
                total_cost: 0,
                per_input: Vec::new(),
            })
        } else {
            Err(Invalid::GenesisWithInputs)
        };
    }
    if tx.inputs.is_empty() {
        return Err(Invalid::NoInputs);
    }
    let mut seen = HashSet::new();
    let mut resolved = Vec::with_capacity(tx.inputs.len());
    for (i, r) in tx.inputs.iter().enumerate() {
        if !seen.insert(*r) {
            return Err(Invalid::DuplicateInput(i));
        }
        resolved.push(utxo.get(r).ok_or(Invalid::MissingInput(i))?.clone());
    }
    let limits = cfg.eval_limits();
    let mut per_input = Vec::with_capacity(resolved.len());
    for i in 0..resolved.len() {
        let ctx = EvalContext::new(&resolved, &tx.outputs, i).expect("index in range");
        match evaluate_with(resolved[i].script.expr(), &ctx, &limits) {
            Ok((Value::Bool(true), receipt)) => per_input.push(receipt.total),
            Ok(_) => return Err(Invalid::ScriptFalse(i)),
            Err(EvalError::CostLimitExceeded { limit }) => return Err(Invalid::CostExceeded(i, limit)),
            Err(e) => return Err(Invalid::ScriptError(i, e)),
        }
    }
    Ok(Valid {
        total_cost: per_input.iter().sum(),
        per_input,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::tx::OutputRef;
    use crate::script::{parse, Payload, Script};

    fn out(src: &str, v: i64) -> Output {
        Output::new(Script::new(parse(src).unwrap()), Payload::new().with("v", v))
    }

    fn setup(src: &str) -> (UtxoSet, OutputRef) {
        let mut u = UtxoSet::new(["v"]);
        let g = Transaction::genesis(vec![out(src, 1)]);
        let r = OutputRef::new(g.id(), 0);
        u.insert(r, g.outputs[0].clone());
        (u, r)
    }

    #[test]
    fn scripts_gate_spending() {
        let cfg = LedgerConfig::default();
        let (u, r) = setup("out[0].v = self.v + 1");
        let ok = Transaction::spend(vec![r], vec![out("true", 2)]);
        assert!(validate_transaction(&ok, &u, &cfg).unwrap().total_cost > 0);
        let bad = Transaction::spend(vec![r], vec![out("true", 3)]);
        assert_eq!(validate_transaction(&bad, &u, &cfg), Err(Invalid::ScriptFalse(0)));
        let none = Transaction::spend(vec![r], vec![]);
        assert!(matches!(
            validate_transaction(&none, &u, &cfg),
            Err(Invalid::ScriptError(0, EvalError::IndexOutOfBounds { .. }))
        ));
    }

    #[test]
    fn structural_rejections() {
        let cfg = LedgerConfig::default();
        let (u, r) = setup("true");
        let missing = OutputRef::new(r.tx_id, 9);
        let t = Transaction::spend(vec![missing], vec![]);
        assert_eq!(validate_transaction(&t, &u, &cfg), Err(Invalid::MissingInput(0)));
        let t = Transaction::spend(vec![r, r], vec![]);
        assert_eq!(validate_transaction(&t, &u, &cfg), Err(Invalid::DuplicateInput(1)));
        let t = Transaction::spend(vec![], vec![]);
        assert_eq!(validate_transaction(&t, &u, &cfg), Err(Invalid::NoInputs));
        let mut g = Transaction::genesis(vec![]);
        g.inputs.push(r);
        assert_eq!(validate_transaction(&g, &u, &cfg), Err(Invalid::GenesisWithInputs));
    }

    #[test]
    fn cost_cap_and_size_caps() {
        let cfg = LedgerConfig {
            cost_limit_per_input: 3,
            max_payload_bytes: 8,
            ..Default::default()
        };
        let (u, r) = setup("1 + 1 + 1 = 3");
        let t = Transaction::spend(vec![r], vec![]);
        assert_eq!(validate_transaction(&t, &u, &cfg), Err(Invalid::CostExceeded(0, 3)));
        let big = Transaction::genesis(vec![out("true", 1).clone()]);
        let mut o = big.outputs[0].clone();
        o.payload.set("w", Value::int(1 << 40));
        let t = Transaction::genesis(vec![o]);
        assert!(matches!(
            validate_transaction(&t, &u, &cfg),
            Err(Invalid::OversizedOutput { index: 0, .. })
        ));
    }
}
