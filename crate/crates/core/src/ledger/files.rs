//! Chain files (JSON Lines, one transaction per line) and UTXO snapshots.
//!
//! A chain line looks like
//!
//! ```text
//! {"txId":"<hex>","block":0,"isGenesis":true,"inputs":[{"txId":"<hex>","index":0}],
//!  "outputs":[{"script":"<base64>","scriptText":"...","payload":{"val":{"bool":true}}}]}
//! ```
//!
//! Payload values are tagged: `{"bool":b}`, `{"int":"<decimal>"}`,
//! `{"bits":"0101"}` or `{"script":"<base64>"}`. Script bytes round-trip
//! exactly; `scriptText` is informative and ignored on load.

use std::str::FromStr;

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine;
use num_bigint::BigInt;
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use super::chain::{Block, ChainLog, LoggedTx};
use super::tx::{OutputRef, Transaction, TxId};
use super::utxo::UtxoSet;
use crate::script::{BitString, Output, Payload, Script, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FileError {
    pub line: usize,
    pub message: String,
}

type Res<T> = Result<T, String>;

pub fn value_to_json(v: &Value) -> Json {
    match v {
        Value::Bool(b) => json!({ "bool": b }),
        Value::Int(i) => json!({ "int": i.to_string() }),
        Value::Bits(b) => json!({ "bits": b.to_text() }),
        Value::Script(s) => json!({ "script": B64.encode(s.bytes()) }),
    }
}

pub fn value_from_json(j: &Json) -> Res<Value> {
    let obj = j
        .as_object()
        .filter(|o| o.len() == 1)
        .ok_or("value must be a one-key object")?;
    let (tag, inner) = obj.iter().next().expect("one entry");
    let text = || inner.as_str().ok_or_else(|| format!("`{tag}` value must be a string"));
    match tag.as_str() {
        "bool" => inner
            .as_bool()
            .map(Value::Bool)
            .ok_or_else(|| "`bool` value must be a boolean".into()),
        "int" => BigInt::from_str(text()?).map(Value::Int).map_err(|e| e.to_string()),
        "bits" => {
            let t = text()?;
            let ok = t.chars().all(|c| c == '0' || c == '1');
            ok.then(|| BitString::parse(t))
                .flatten()
                .map(Value::Bits)
                .ok_or_else(|| format!("bad bit string `{t}`"))
        }
        "script" => script_from_b64(text()?).map(Value::Script),
        other => Err(format!("unknown value tag `{other}`")),
    }
}

fn script_from_b64(s: &str) -> Res<Script> {
    let bytes = B64.decode(s).map_err(|e| format!("bad base64: {e}"))?;
    Script::from_bytes(&bytes).map_err(|e| format!("bad script bytes: {e}"))
}

pub fn output_to_json(o: &Output) -> Json {
    let payload: Map<String, Json> = o
        .payload
        .iter()
        .map(|(k, v)| (k.to_string(), value_to_json(v)))
        .collect();
    json!({
        "script": B64.encode(o.script.bytes()),
        "scriptText": o.script.expr().to_string(),
        "payload": payload,
    })
}

pub fn output_from_json(j: &Json) -> Res<Output> {
    let script = j
        .get("script")
        .and_then(Json::as_str)
        .ok_or("output needs a `script` string")?;
    let payload = j
        .get("payload")
        .and_then(Json::as_object)
        .ok_or("output needs a `payload` object")?;
    let fields = payload
        .iter()
        .map(|(k, v)| Ok((k.clone(), value_from_json(v).map_err(|e| format!("field `{k}`: {e}"))?)))
        .collect::<Res<Payload>>()?;
    Ok(Output::new(script_from_b64(script)?, fields))
}

fn ref_from_json(j: &Json) -> Res<OutputRef> {
    let id = j.get("txId").and_then(Json::as_str).ok_or("input needs `txId`")?;
    let index = j
        .get("index")
        .and_then(Json::as_u64)
        .and_then(|i| u32::try_from(i).ok())
        .ok_or("input needs an integer `index`")?;
    Ok(OutputRef::new(id.parse()?, index))
}

pub fn tx_to_json(entry: &LoggedTx, block: usize) -> Json {
    let inputs: Vec<Json> = entry
        .tx
        .inputs
        .iter()
        .map(|r| json!({ "txId": r.tx_id.to_string(), "index": r.index }))
        .collect();
    let outputs: Vec<Json> = entry.tx.outputs.iter().map(output_to_json).collect();
    json!({
        "txId": entry.id.to_string(),
        "block": block,
        "isGenesis": entry.tx.is_genesis,
        "inputs": inputs,
        "outputs": outputs,
    })
}

fn tx_from_json(j: &Json) -> Res<(usize, TxId, Transaction)> {
    let id: TxId = j.get("txId").and_then(Json::as_str).ok_or("missing `txId`")?.parse()?;
    let block = j.get("block").and_then(Json::as_u64).ok_or("missing `block`")? as usize;
    let is_genesis = j
        .get("isGenesis")
        .and_then(Json::as_bool)
        .ok_or("missing `isGenesis`")?;
    let list = |k: &str| {
        j.get(k)
            .and_then(Json::as_array)
            .ok_or_else(|| format!("missing `{k}` array"))
    };
    let inputs = list("inputs")?.iter().map(ref_from_json).collect::<Res<Vec<_>>>()?;
    let outputs = list("outputs")?
        .iter()
        .enumerate()
        .map(|(i, o)| output_from_json(o).map_err(|e| format!("output {i}: {e}")))
        .collect::<Res<Vec<_>>>()?;
    Ok((
        block,
        id,
        Transaction {
            inputs,
            outputs,
            is_genesis,
        },
    ))
}

pub fn chain_to_jsonl(log: &ChainLog) -> String {
    let mut s = String::new();
    for (b, block) in log.blocks.iter().enumerate() {
        for entry in &block.transactions {
            s.push_str(&tx_to_json(entry, b).to_string());
            s.push('\n');
        }
    }
    s
}

/// Parses a chain file. Block numbers must start at 0 and never decrease;
/// every block gets `block_budget`. Costs are left at zero for replay.
pub fn chain_from_jsonl(text: &str, block_budget: u64) -> Result<ChainLog, FileError> {
    let mut log = ChainLog::default();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| FileError { line: n + 1, message };
        let j: Json = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        let (block, id, tx) = tx_from_json(&j).map_err(err)?;
        if block + 1 < log.blocks.len() || block > log.blocks.len() {
            return Err(err(format!("block {block} out of sequence")));
        }
        if block == log.blocks.len() {
            log.blocks.push(Block::new(block_budget));
        }
        log.blocks[block].transactions.push(LoggedTx {
            id,
            tx,
            cost: 0,
            per_input: Vec::new(),
        });
    }
    Ok(log)
}

pub fn utxo_to_json(utxo: &UtxoSet) -> Json {
    let map: Map<String, Json> = utxo.iter().map(|(r, o)| (r.to_string(), output_to_json(o))).collect();
    Json::Object(map)
}

pub fn utxo_from_json(j: &Json, indexed_fields: &[String]) -> Result<UtxoSet, String> {
    let obj = j.as_object().ok_or("snapshot must be a JSON object")?;
    let mut u = UtxoSet::new(indexed_fields.iter().cloned());
    for (k, v) in obj {
        let r: OutputRef = k.parse()?;
        u.insert(r, output_from_json(v).map_err(|e| format!("{k}: {e}"))?);
    }
    Ok(u)
}
