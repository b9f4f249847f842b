use std::sync::OnceLock;

use thiserror::Error;

use super::GridRow;
use crate::ledger::Transaction;
use crate::script::{parse, BitString, Output, Payload, Script, ScriptExpr, Value};

/// Layer mode: one output holds a whole row and the next transaction must
/// carry the evolved row under the same script.
pub const LAYER_SCRIPT_SOURCE: &str = r#"// one Rule 110 step over the whole layer, wrapping at the ends
let w = self.layer.size in
out[0].layer = map(w, i ->
    let l = self.layer[(i - 1) mod w] in
    let c = self.layer[i] in
    let r = self.layer[(i + 1) mod w] in
    (l & c & r) ^ (c & r) ^ c ^ r)
& self.script = out[0].script
"#;

/// Grid mode: each output is one cell. A transaction spends the left, middle
/// and right cells of the previous row (middle copy flagged `mid`) and emits
/// three copies of the new cell. Cells beyond the edges of the previous row
/// are zeros synthesized in place.
pub const BIT_SCRIPT_SOURCE: &str = r#"let realIn =
  // leftmost cell of the next row: two zeros on the left
  if in.size = 1 & in[0].x = in[0].n & !in[0].mid then
    synth(in[0].script, val <- false, x <- in[0].n - 2, n <- in[0].n, mid <- false)
      ++ synth(in[0].script, val <- false, x <- in[0].n - 1, n <- in[0].n, mid <- true)
      ++ in
  // a single-cell row: zeros on both sides
  elif in.size = 1 & in[0].x = 0 & in[0].n = 0 & in[0].mid then
    synth(in[0].script, val <- false, x <- -1, n <- 0, mid <- false)
      ++ in
      ++ synth(in[0].script, val <- false, x <- 1, n <- 0, mid <- false)
  // next to leftmost: one zero on the left
  elif in.size = 2 & in[0].x = in[0].n & in[0].mid then
    synth(in[0].script, val <- false, x <- in[0].n - 1, n <- in[0].n, mid <- false) ++ in
  // rightmost: one zero on the right
  elif in.size = 2 & in[0].x = -1 & !in[0].mid then
    in ++ synth(in[0].script, val <- false, x <- 1, n <- in[0].n, mid <- false)
  else in
in
let l = realIn[0] in
let c = realIn[1] in
let r = realIn[2] in
out[0].val = ((l.val & c.val & r.val) ^ (c.val & r.val) ^ c.val ^ r.val)
& c.x = l.x + 1 & r.x = c.x + 1
& c.n = l.n & r.n = l.n
& c.mid & !(l.mid | r.mid)
& out[0].x = c.x & out[0].n = l.n - 1
& realIn.size = 3 & out.size = 3
& !out[0].mid
& out[0].script = in[0].script
& copyEq(out[1], out[0], mid <- true)
& copyEq(out[2], out[0], mid <- false)
"#;

/// Payload fields of a grid cell, in order.
pub const CELL_FIELDS: [&str; 4] = ["val", "x", "n", "mid"];

pub fn build_layer_script() -> ScriptExpr {
    parse(LAYER_SCRIPT_SOURCE).expect("built-in layer script parses")
}

pub fn build_bit_script() -> ScriptExpr {
    parse(BIT_SCRIPT_SOURCE).expect("built-in bit script parses")
}

pub fn layer_script() -> Script {
    static S: OnceLock<Script> = OnceLock::new();
    S.get_or_init(|| Script::new(build_layer_script())).clone()
}

pub fn bit_script() -> Script {
    static S: OnceLock<Script> = OnceLock::new();
    S.get_or_init(|| Script::new(build_bit_script())).clone()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenesisError {
    #[error("layer width {width} is outside 1..={max}")]
    WidthExceeded { width: usize, max: usize },
}

pub fn genesis_layer(layer: &BitString, max_width: usize) -> Result<Transaction, GenesisError> {
    if layer.is_empty() || layer.len() > max_width {
        return Err(GenesisError::WidthExceeded {
            width: layer.len(),
            max: max_width,
        });
    }
    let payload = Payload::new().with("layer", layer.clone());
    Ok(Transaction::genesis(vec![Output::new(layer_script(), payload)]))
}

pub(crate) fn cell_payload(val: bool, x: i64, n: i64, mid: bool) -> Payload {
    Payload::new()
        .with("val", val)
        .with("x", x)
        .with("n", n)
        .with("mid", Value::Bool(mid))
}

/// Three copies per cell, left to right, flagged `mid` = (false, true, false).
pub fn genesis_grid(row: &GridRow) -> Transaction {
    let script = bit_script();
    let outputs = (row.n..=0)
        .flat_map(|x| {
            let val = row.at(x);
            [false, true, false].map(|mid| Output::new(script.clone(), cell_payload(val, x, row.n, mid)))
        })
        .collect();
    Transaction::genesis(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::{Ledger, LedgerConfig, OutputRef};
    use crate::rule110::{calc_bit, evolve_cyclic};
    use crate::script::{evaluate, EvalContext, DEFAULT_COST_LIMIT, DEFAULT_MAX_WIDTH};

    fn bits(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    fn layer_ok(input: &str, output: &BitString, script: Script) -> bool {
        let ins = [Output::new(layer_script(), Payload::new().with("layer", bits(input)))];
        let outs = [Output::new(script, Payload::new().with("layer", output.clone()))];
        let ctx = EvalContext::new(&ins, &outs, 0).unwrap();
        matches!(
            evaluate(&build_layer_script(), &ctx, DEFAULT_COST_LIMIT),
            Ok((Value::Bool(true), _))
        )
    }

    #[test]
    fn layer_script_accepts_exactly_the_next_row() {
        let input = "0110100110111";
        let next = evolve_cyclic(&bits(input), 1).pop().unwrap();
        assert!(layer_ok(input, &next, layer_script()));
        for i in 0..next.len() {
            assert!(!layer_ok(input, &next.flipped(i), layer_script()), "bit {i}");
        }
        let other = Script::new(parse(&LAYER_SCRIPT_SOURCE.replace("i + 1", "1 + i")).unwrap());
        assert!(!layer_ok(input, &next, other));
    }

    #[test]
    fn layer_script_fits_the_default_limit_at_full_width() {
        let input = "1".repeat(DEFAULT_MAX_WIDTH);
        let next = evolve_cyclic(&bits(&input), 1).pop().unwrap();
        assert!(layer_ok(&input, &next, layer_script()));
    }

    #[test]
    fn scripts_are_distinct() {
        assert_ne!(layer_script().bytes(), bit_script().bytes());
        assert_eq!(Script::new(build_bit_script()), bit_script());
    }

    #[test]
    fn genesis_shapes() {
        assert!(genesis_layer(&bits("1"), 8).is_ok());
        assert!(genesis_layer(&BitString::zeros(8), 8).is_ok());
        assert!(genesis_layer(&BitString::zeros(9), 8).is_err());
        assert!(genesis_layer(&BitString::zeros(0), 8).is_err());
        let g = genesis_grid(&GridRow::initial(&bits("1")));
        assert_eq!(g.outputs.len(), 3);
        let mids = g
            .outputs
            .iter()
            .filter(|o| o.payload.get("mid") == Some(&Value::Bool(true)))
            .count();
        assert_eq!(mids, 1);
        let g = genesis_grid(&GridRow::initial(&bits("101")));
        assert_eq!(g.outputs.len(), 9);
        assert!(g.outputs.iter().all(|o| o.script == bit_script()));
    }

    /// A hand-built middle-of-row transaction over a 3-cell row.
    fn grid_fixture() -> (Ledger, Vec<OutputRef>, Transaction) {
        let row = GridRow::initial(&bits("110"));
        let mut l = Ledger::new(LedgerConfig::default());
        let g = l.apply(genesis_grid(&row)).unwrap();
        let r = |i: u32| OutputRef::new(g.id, i);
        // cells x = -2, -1, 0 sit at outputs 0..3, 3..6, 6..9
        let ins = vec![r(0), r(4), r(6)];
        let val = calc_bit(true, true, false);
        let outs = [false, true, false]
            .map(|mid| Output::new(bit_script(), cell_payload(val, -1, -3, mid)))
            .to_vec();
        (l, ins.clone(), Transaction::spend(ins, outs))
    }

    #[test]
    fn middle_cell_transaction() {
        let (l, ins, tx) = grid_fixture();
        assert!(l.validate(&tx).is_ok(), "{:?}", l.validate(&tx));
        let mut swapped = tx.clone();
        swapped.inputs = vec![ins[1], ins[0], ins[2]];
        assert!(l.validate(&swapped).is_err());
    }

    #[test]
    fn leftmost_transaction() {
        let row = GridRow::initial(&bits("110"));
        let mut l = Ledger::new(LedgerConfig::default());
        let g = l.apply(genesis_grid(&row)).unwrap();
        let outs = [false, true, false]
            .map(|mid| Output::new(bit_script(), cell_payload(calc_bit(false, false, true), -3, -3, mid)))
            .to_vec();
        let tx = Transaction::spend(vec![OutputRef::new(g.id, 0)], outs);
        assert!(l.validate(&tx).is_ok(), "{:?}", l.validate(&tx));
    }
}
