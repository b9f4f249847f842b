use std::sync::OnceLock;

use proptest::prelude::*;

use utxo110::driver::{run, RunConfig};
use utxo110::render::Mode;
use utxo110::rule110::{build_bit_script, build_layer_script};
use utxo110::script::{
    analyze_canonical, decode_script, encode_script, evaluate_with, parse, ArithOp, BitString, BoolOp, CanonicalForm,
    CmpOp, EvalContext, EvalLimits, Output, Payload, Script, ScriptExpr as E, Value,
};

const VARS: [&str; 4] = ["a", "b", "i", "w"];
const FIELDS: [&str; 5] = ["x", "n", "val", "mid", "layer"];

fn lit() -> impl Strategy<Value = E> {
    prop_oneof![
        any::<bool>().prop_map(E::lit),
        (-40i64..40).prop_map(E::lit),
        prop::collection::vec(any::<bool>(), 0..6).prop_map(|b| E::lit(BitString::new(b))),
        Just(E::Lit(Value::Script(Script::new(E::lit(true))))),
    ]
}

fn leaf() -> impl Strategy<Value = E> {
    prop_oneof![
        3 => lit(),
        1 => prop_oneof![Just(E::self_()), Just(E::inputs()), Just(E::outputs())],
        2 => prop::sample::select(&VARS[..]).prop_map(E::var),
    ]
}

fn name(set: &'static [&'static str]) -> impl Strategy<Value = String> {
    prop::sample::select(set).prop_map(String::from)
}

fn assignments(e: BoxedStrategy<E>) -> impl Strategy<Value = Vec<(String, E)>> {
    prop::collection::btree_map(name(&FIELDS), e, 0..3).prop_map(|m| m.into_iter().collect())
}

fn expr() -> impl Strategy<Value = E> {
    leaf().prop_recursive(5, 48, 4, |e| {
        let b = || e.clone().prop_map(Box::new);
        prop_oneof![
            (b(), name(&FIELDS)).prop_map(|(x, f)| E::Field(x, f)),
            b().prop_map(E::ScriptOf),
            b().prop_map(E::Size),
            b().prop_map(E::Not),
            (b(), b()).prop_map(|(x, i)| E::Index(x, i)),
            (
                prop::sample::select(vec![ArithOp::Add, ArithOp::Sub, ArithOp::Mod]),
                b(),
                b()
            )
                .prop_map(|(op, x, y)| E::Arith(op, x, y)),
            (prop::sample::select(vec![CmpOp::Eq, CmpOp::Lt]), b(), b()).prop_map(|(op, x, y)| E::Cmp(op, x, y)),
            (
                prop::sample::select(vec![BoolOp::And, BoolOp::Or, BoolOp::Xor]),
                b(),
                b()
            )
                .prop_map(|(op, x, y)| E::Bool(op, x, y)),
            (b(), b(), b()).prop_map(|(x, y, z)| E::PowMod(x, y, z)),
            (b(), b(), b()).prop_map(|(x, y, z)| E::If(x, y, z)),
            (b(), b()).prop_map(|(x, y)| E::Concat(x, y)),
            (b(), name(&VARS), b()).prop_map(|(len, var, body)| E::Map { len, var, body }),
            (name(&VARS), b(), b()).prop_map(|(name, value, body)| E::Let { name, value, body }),
            (b(), b(), assignments(e.clone().boxed())).prop_map(|(lhs, rhs, overrides)| E::CopyEq {
                lhs,
                rhs,
                overrides
            }),
            (b(), assignments(e.clone().boxed())).prop_map(|(script, fields)| E::Synth { script, fields }),
        ]
    })
}

fn cell(val: bool, x: i64, n: i64, mid: bool) -> Payload {
    Payload::new()
        .with("val", val)
        .with("x", x)
        .with("n", n)
        .with("mid", mid)
}

fn fixed_context() -> (Vec<Output>, Vec<Output>) {
    let s = Script::new(build_bit_script());
    let ins = vec![
        Output::new(s.clone(), cell(true, -2, -2, false)),
        Output::new(
            s.clone(),
            cell(false, -1, -2, true).with("layer", BitString::parse("0110").unwrap()),
        ),
    ];
    let outs = vec![Output::new(s, cell(true, -1, -3, false))];
    (ins, outs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        prop_assert_eq!(parse(&text).map_err(|err| format!("{err} in {text}")), Ok(e));
    }

    #[test]
    fn codec_round_trips(e in expr()) {
        let bytes = encode_script(&e);
        prop_assert_eq!(decode_script(&bytes), Ok(e));
    }

    #[test]
    fn decoder_accepts_only_canonical_bytes(e in expr(), at in any::<prop::sample::Index>(), byte in any::<u8>()) {
        let mut bytes = encode_script(&e);
        let i = at.index(bytes.len());
        bytes[i] = byte;
        if let Ok(d) = decode_script(&bytes) {
            prop_assert_eq!(encode_script(&d), bytes);
        }
    }

    #[test]
    fn truncated_bytes_never_decode(e in expr(), at in any::<prop::sample::Index>()) {
        let bytes = encode_script(&e);
        let cut = at.index(bytes.len());
        prop_assert!(decode_script(&bytes[..cut]).is_err());
    }

    #[test]
    fn weight_grows_with_every_superterm(e in expr()) {
        let kids = e.children();
        prop_assert_eq!(e.static_weight(), 1 + kids.iter().map(|k| k.static_weight()).sum::<u64>());
        for k in kids {
            prop_assert!(k.static_weight() < e.static_weight());
        }
    }

    #[test]
    fn evaluation_is_deterministic(e in expr(), self_index in 0usize..2) {
        let (ins, outs) = fixed_context();
        let ctx = EvalContext::new(&ins, &outs, self_index).unwrap();
        let limits = EvalLimits { cost_limit: 2_000, max_width: 64 };
        let first = evaluate_with(&e, &ctx, &limits);
        prop_assert_eq!(&first, &evaluate_with(&e, &ctx, &limits));
        if let Ok((_, receipt)) = first {
            prop_assert!(receipt.total <= limits.cost_limit);
        }
    }
}

// Canonical forms agree with the scripts they come from on well-typed
// contexts near real transactions.

struct Sample {
    ins: Vec<Output>,
    outs: Vec<Output>,
}

fn samples(mode: Mode) -> &'static [Sample] {
    static GRID: OnceLock<Vec<Sample>> = OnceLock::new();
    static LAYER: OnceLock<Vec<Sample>> = OnceLock::new();
    let (cell, init, steps) = match mode {
        Mode::Grid => (&GRID, "1101", 4),
        Mode::Layer => (&LAYER, "0110", 3),
    };
    cell.get_or_init(|| {
        let l = run(&RunConfig::new(mode, BitString::parse(init).unwrap(), steps)).unwrap();
        let mut created = std::collections::HashMap::new();
        let mut out = Vec::new();
        for t in l.log().transactions() {
            if !t.tx.is_genesis {
                let ins = t.tx.inputs.iter().map(|r| created[r]).cloned().collect();
                out.push(Sample {
                    ins,
                    outs: t.tx.outputs.clone(),
                });
            }
            for (i, o) in t.tx.outputs.iter().enumerate() {
                created.insert(utxo110::ledger::OutputRef::new(t.id, i as u32), o);
            }
        }
        out
    })
}

#[derive(Debug, Clone)]
enum Edit {
    Field {
        output: bool,
        at: prop::sample::Index,
        field: prop::sample::Index,
        delta: i64,
    },
    Drop {
        output: bool,
        at: prop::sample::Index,
    },
    Swap {
        a: prop::sample::Index,
        b: prop::sample::Index,
    },
    Script {
        at: prop::sample::Index,
    },
}

fn edit() -> impl Strategy<Value = Edit> {
    prop_oneof![
        4 => (any::<bool>(), any::<prop::sample::Index>(), any::<prop::sample::Index>(), -2i64..=2)
            .prop_map(|(output, at, field, delta)| Edit::Field { output, at, field, delta }),
        1 => (any::<bool>(), any::<prop::sample::Index>()).prop_map(|(output, at)| Edit::Drop { output, at }),
        1 => (any::<prop::sample::Index>(), any::<prop::sample::Index>()).prop_map(|(a, b)| Edit::Swap { a, b }),
        1 => any::<prop::sample::Index>().prop_map(|at| Edit::Script { at }),
    ]
}

fn apply_edit(s: &mut Sample, e: &Edit) {
    match e {
        Edit::Field {
            output,
            at,
            field,
            delta,
        } => {
            let v = if *output { &mut s.outs } else { &mut s.ins };
            if v.is_empty() {
                return;
            }
            let k = at.index(v.len());
            let o = &mut v[k];
            let names: Vec<String> = o.payload.iter().map(|(k, _)| k.to_string()).collect();
            let f = &names[field.index(names.len())];
            let new = match o.payload.get(f).unwrap() {
                Value::Bool(b) => Value::Bool(*b ^ (*delta != 0)),
                Value::Int(i) => Value::Int(i + *delta),
                Value::Bits(b) if !b.is_empty() => Value::Bits(b.flipped(delta.unsigned_abs() as usize % b.len())),
                other => other.clone(),
            };
            o.payload.set(f.clone(), new);
        }
        Edit::Drop { output, at } => {
            let v = if *output { &mut s.outs } else { &mut s.ins };
            if v.len() > 1 {
                let k = at.index(v.len());
                v.remove(k);
            }
        }
        Edit::Swap { a, b } => {
            let n = s.ins.len();
            s.ins.swap(a.index(n), b.index(n));
        }
        Edit::Script { at } => {
            let n = s.outs.len();
            s.outs[at.index(n)].script = Script::new(E::lit(true));
        }
    }
}

fn agree(form: &CanonicalForm, script: &E, s: &Sample) -> Result<(), TestCaseError> {
    let limits = EvalLimits::default();
    let ctx = EvalContext::new(&s.ins, &s.outs, 0).unwrap();
    let direct = matches!(evaluate_with(script, &ctx, &limits), Ok((Value::Bool(true), _)));
    prop_assert_eq!(form.holds(&ctx, &limits), direct);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bit_form_is_sound(pick in any::<prop::sample::Index>(), edits in prop::collection::vec(edit(), 0..3)) {
        let script = build_bit_script();
        let form = analyze_canonical(&script).unwrap();
        let all = samples(Mode::Grid);
        let base = &all[pick.index(all.len())];
        let mut s = Sample { ins: base.ins.clone(), outs: base.outs.clone() };
        for e in &edits {
            apply_edit(&mut s, e);
        }
        agree(&form, &script, &s)?;
    }

    #[test]
    fn layer_form_is_sound(pick in any::<prop::sample::Index>(), edits in prop::collection::vec(edit(), 0..3)) {
        let script = build_layer_script();
        let form = analyze_canonical(&script).unwrap();
        let all = samples(Mode::Layer);
        let base = &all[pick.index(all.len())];
        let mut s = Sample { ins: base.ins.clone(), outs: base.outs.clone() };
        for e in &edits {
            apply_edit(&mut s, e);
        }
        agree(&form, &script, &s)?;
    }
}

#[test]
fn unedited_samples_hold() {
    for (mode, script) in [(Mode::Grid, build_bit_script()), (Mode::Layer, build_layer_script())] {
        let form = analyze_canonical(&script).unwrap();
        for s in samples(mode) {
            let ctx = EvalContext::new(&s.ins, &s.outs, 0).unwrap();
            assert!(form.holds(&ctx, &EvalLimits::default()));
        }
    }
}
