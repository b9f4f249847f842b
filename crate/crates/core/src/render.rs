//! Rebuilding automaton rows from a chain and drawing them.
//!
//! Rows are drawn top-down, `#` for 1 and `.` for 0. Grid rows are
//! right-aligned to the widest row, with spaces where a row has no cells.

use std::collections::BTreeMap;

use crate::ledger::ChainLog;
use crate::rule110::GridRow;
use crate::script::{BitString, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Layer,
    Grid,
}

impl Mode {
    /// Payload fields the UTXO set should index for this mode.
    pub fn indexed_fields(self) -> Vec<String> {
        match self {
            Mode::Layer => Vec::new(),
            Mode::Grid => ["x", "n", "mid"].map(String::from).to_vec(),
        }
    }
}

/// Infers the mode from the first output in the log.
pub fn detect_mode(log: &ChainLog) -> Option<Mode> {
    let first = log.transactions().flat_map(|t| t.tx.outputs.iter()).next()?;
    if first.payload.contains("layer") {
        Some(Mode::Layer)
    } else if first.payload.contains("val") {
        Some(Mode::Grid)
    } else {
        None
    }
}

/// `out[0].layer` of every transaction, in log order.
pub fn layer_rows(log: &ChainLog) -> Result<Vec<BitString>, String> {
    log.transactions()
        .enumerate()
        .map(
            |(i, t)| match t.tx.outputs.first().and_then(|o| o.payload.get("layer")) {
                Some(Value::Bits(b)) => Ok(b.clone()),
                _ => Err(format!("transaction {i} has no layer in out[0]")),
            },
        )
        .collect()
}

fn cell(payload: &crate::script::Payload) -> Option<(i64, i64, bool)> {
    let int = |f: &str| payload.get(f)?.as_int()?.try_into().ok();
    Some((int("x")?, int("n")?, payload.get("val")?.as_bool()?))
}

/// Groups cell outputs by row (`n`) and checks each row covers `n..=0`
/// exactly once with consistent values.
pub fn grid_rows(log: &ChainLog) -> Result<Vec<GridRow>, String> {
    let mut rows: BTreeMap<i64, BTreeMap<i64, bool>> = BTreeMap::new();
    for (i, t) in log.transactions().enumerate() {
        for o in &t.tx.outputs {
            let (x, n, val) = cell(&o.payload).ok_or_else(|| format!("transaction {i} has a malformed cell"))?;
            if let Some(old) = rows.entry(n).or_default().insert(x, val) {
                if old != val {
                    return Err(format!("cell x={x}, n={n} has conflicting values"));
                }
            }
        }
    }
    let top = rows.keys().next_back().copied();
    rows.into_iter()
        .rev()
        .map(|(n, cells)| {
            let cols: Vec<i64> = cells.keys().copied().collect();
            if cols != (n..=0).collect::<Vec<_>>() {
                return Err(format!("row n={n} does not cover columns {n}..=0"));
            }
            Ok(GridRow {
                row_index: (top.expect("non-empty") - n) as usize,
                n,
                bits: cells.into_values().collect(),
            })
        })
        .collect()
}

pub fn ascii(rows: &[Vec<bool>]) -> String {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut s = String::new();
    for r in rows {
        s.push_str(&" ".repeat(width - r.len()));
        s.extend(r.iter().map(|&b| if b { '#' } else { '.' }));
        s.push('\n');
    }
    s
}

/// Plain PBM (P1); short rows are right-aligned and padded with 0.
pub fn pbm(rows: &[Vec<bool>]) -> String {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut s = format!("P1\n{width} {}\n", rows.len());
    for r in rows {
        let line: Vec<&str> = std::iter::repeat_n(false, width - r.len())
            .chain(r.iter().copied())
            .map(|b| if b { "1" } else { "0" })
            .collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

pub fn layer_bits(rows: &[BitString]) -> Vec<Vec<bool>> {
    rows.iter().map(|r| r.bits().to_vec()).collect()
}

pub fn grid_bits(rows: &[GridRow]) -> Vec<Vec<bool>> {
    rows.iter().map(|r| r.bits.clone()).collect()
}
