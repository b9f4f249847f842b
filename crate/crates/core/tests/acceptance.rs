//! Acceptance checks. Runs without the libtest harness and prints one
//! PASS/FAIL line per criterion; exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use utxo110::builder::Builder;
use utxo110::driver::{run, RunConfig};
use utxo110::ledger::files::chain_to_jsonl;
use utxo110::ledger::{sha256, verify_chain, Ledger, OutputRef, UtxoSet};
use utxo110::render::{grid_rows, layer_rows, Mode};
use utxo110::rule110::{
    build_bit_script, build_layer_script, calc_bit, evolve_cyclic, evolve_grid, genesis_grid, GridRow,
};
use utxo110::script::{analyze_canonical, evaluate, parse, BitString, EvalContext, Output, Payload, Script, Value};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_bits(rng: &mut ChaCha8Rng, width: usize) -> BitString {
    BitString::new((0..width).map(|_| rng.gen()).collect())
}

fn int(o: &Output, f: &str) -> i64 {
    o.payload
        .get(f)
        .and_then(Value::as_int)
        .and_then(|i| i64::try_from(i).ok())
        .expect("int field")
}

fn flag(o: &Output, f: &str) -> bool {
    o.payload.get(f).and_then(Value::as_bool).expect("bool field")
}

// 1 ---------------------------------------------------------------------------

fn transition() -> Check {
    let start = Instant::now();
    let mut table = 0u8;
    for nb in (0..8u8).rev() {
        table = table << 1 | u8::from(calc_bit(nb & 4 != 0, nb & 2 != 0, nb & 1 != 0));
    }
    let took = start.elapsed();
    ensure(table == 0b0110_1110, || format!("table is {table:08b}"))?;
    ensure(took < Duration::from_millis(1), || format!("took {took:?}"))?;
    Ok(format!("table 01101110 in {took:?}"))
}

// 2 and 4 ---------------------------------------------------------------------

struct LayerRun {
    ledger: Ledger,
    initial: BitString,
}

fn layer_runs() -> Result<Vec<LayerRun>, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    (0..50)
        .map(|_| {
            let width = rng.gen_range(4..=32);
            let initial = random_bits(&mut rng, width);
            let ledger = run(&RunConfig::new(Mode::Layer, initial.clone(), 100)).map_err(|e| e.to_string())?;
            Ok(LayerRun { ledger, initial })
        })
        .collect()
}

fn layer_chain(runs: &[LayerRun], took: Duration) -> Check {
    for (i, r) in runs.iter().enumerate() {
        let cfg = &r.ledger.config;
        verify_chain(r.ledger.log(), &cfg.empty_utxo(), cfg).map_err(|e| format!("run {i}: {e}"))?;
        ensure(r.ledger.log().len() == 101, || {
            format!("run {i}: {} txs", r.ledger.log().len())
        })?;
        let rows = layer_rows(r.ledger.log())?;
        ensure(rows == evolve_cyclic(&r.initial, 100), || {
            format!("run {i}: rows differ from oracle")
        })?;
    }
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("50 chains x 100 steps match, {took:?}"))
}

fn self_reproduction(runs: &[LayerRun]) -> Check {
    let mut scripts = BTreeSet::new();
    for r in runs {
        for t in r.ledger.log().transactions() {
            scripts.insert(t.tx.outputs[0].script.bytes().to_vec());
        }
    }
    ensure(scripts.len() == 1, || {
        format!("{} distinct out[0] scripts", scripts.len())
    })?;
    Ok("one script across 5050 transactions".into())
}

// 3, 5, 9 ---------------------------------------------------------------------

fn grid_initials() -> Vec<BitString> {
    let mut rng = ChaCha8Rng::seed_from_u64(2018);
    let mut v = vec![BitString::parse("1").unwrap()];
    for _ in 0..3 {
        let w = rng.gen_range(1..=8);
        v.push(random_bits(&mut rng, w));
    }
    v
}

struct GridRun {
    ledger: Ledger,
    initial: BitString,
}

fn grid_runs() -> Result<Vec<GridRun>, String> {
    grid_initials()
        .into_iter()
        .map(|initial| {
            let ledger = run(&RunConfig::new(Mode::Grid, initial.clone(), 16))
                .map_err(|e| format!("{}: {e}", initial.to_text()))?;
            Ok(GridRun { ledger, initial })
        })
        .collect()
}

fn grid_chain(runs: &[GridRun], took: Duration) -> Check {
    let mut txs = 0;
    for GridRun {
        ledger: l,
        initial: init,
    } in runs
    {
        let cfg = &l.config;
        verify_chain(l.log(), &cfg.empty_utxo(), cfg).map_err(|e| e.to_string())?;
        let rows = grid_rows(l.log())?;
        let oracle = evolve_grid(&GridRow::initial(init), 16);
        ensure(rows == oracle, || {
            format!("{}: rows differ from oracle", init.to_text())
        })?;
        for t in l.log().transactions().filter(|t| !t.tx.is_genesis) {
            ensure(t.tx.outputs.len() == 3, || "transaction without three outputs".into())?;
            if branch(&t.tx.outputs[0]) == "middle" {
                ensure(t.tx.inputs.len() == 3, || {
                    format!("non-boundary cell spends {}", t.tx.inputs.len())
                })?;
            }
            txs += 1;
        }
    }
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("4 grids x 16 rows match, {txs} cell transactions, {took:?}"))
}

/// Which case of the cell script produced this output.
fn branch(o: &Output) -> &'static str {
    let (x, n) = (int(o, "x"), int(o, "n"));
    match () {
        _ if x == n => "leftmost",
        _ if x == n + 1 => "next to leftmost",
        _ if x == 0 => "rightmost",
        _ => "middle",
    }
}

/// Per-input costs of the transactions producing row `row` (genesis is row 0),
/// grouped by branch.
fn row_costs(run: &GridRun, row: i64) -> BTreeMap<&'static str, BTreeSet<u64>> {
    let n = 1 - run.initial.len() as i64 - row;
    let mut m: BTreeMap<&'static str, BTreeSet<u64>> = BTreeMap::new();
    for t in run.ledger.log().transactions() {
        if !t.tx.is_genesis && int(&t.tx.outputs[0], "n") == n {
            m.entry(branch(&t.tx.outputs[0])).or_default().extend(&t.per_input);
        }
    }
    m
}

fn bounded_validation(grids: &[GridRun]) -> Check {
    // grid: every branch costs the same on row 2 as on row 16
    let mut seen: BTreeMap<&'static str, BTreeSet<u64>> = BTreeMap::new();
    for g in grids {
        let (row2, row16) = (row_costs(g, 2), row_costs(g, 16));
        for (b, costs) in &row2 {
            ensure(row16.get(b) == Some(costs), || {
                format!(
                    "{}: {b} costs {costs:?} on row 2, {:?} on row 16",
                    g.initial.to_text(),
                    row16.get(b)
                )
            })?;
        }
        for (b, costs) in row2.into_iter().chain(row16) {
            seen.entry(b).or_default().extend(costs);
        }
    }
    ensure(seen.len() == 4, || format!("branches seen: {:?}", seen.keys()))?;
    for (b, costs) in &seen {
        ensure(costs.len() == 1, || format!("{b} has costs {costs:?}"))?;
    }
    let grid: Vec<String> = seen
        .iter()
        .map(|(b, c)| format!("{b} {}", c.first().unwrap()))
        .collect();

    // layer: fit cost = a + b * width over widths 4..=32
    let pts: Vec<(f64, f64)> = (4..=32)
        .map(|w| {
            let l = run(&RunConfig::new(Mode::Layer, BitString::zeros(w), 1)).expect("layer run");
            let step = l.log().transactions().last().expect("step");
            (w as f64, step.per_input[0] as f64)
        })
        .collect();
    let m = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / m,
        pts.iter().map(|p| p.1).sum::<f64>() / m,
    );
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|(_, y)| (y - my).powi(2)).sum();
    let r2 = 1.0 - ss_res / ss_tot;
    ensure(r2 > 0.99, || format!("R^2 = {r2}"))?;
    Ok(format!(
        "grid costs [{}], layer cost = {intercept:.1} + {slope:.2} w (R^2 = {r2:.6})",
        grid.join(", ")
    ))
}

fn consumption() -> Check {
    let init = BitString::parse("1").unwrap();
    let mut ledger = Ledger::new(RunConfig::new(Mode::Grid, init.clone(), 0).ledger_config());
    ledger
        .apply(genesis_grid(&GridRow::initial(&init)))
        .map_err(|e| e.to_string())?;
    let mut builder = Builder::new();
    for row in 1..=16i64 {
        builder.sweep(&mut ledger).map_err(|e| e.to_string())?;
        let prev_n = 1 - row;
        let left: Vec<&Output> = ledger
            .utxo()
            .iter()
            .map(|(_, o)| o)
            .filter(|o| int(o, "n") == prev_n)
            .collect();
        ensure(left.len() == 1, || {
            format!("row {row}: {} outputs of the previous row unspent", left.len())
        })?;
        ensure(int(left[0], "x") == 0 && !flag(left[0], "mid"), || {
            format!("row {row}: wrong leftover")
        })?;
    }
    Ok("one x = 0 copy left per row for 16 rows".into())
}

// 6 ---------------------------------------------------------------------------

fn tamper() -> Check {
    // all three neighbours are 1, so flipping any input bit changes the result
    let init = BitString::parse("11111").unwrap();
    let mut ledger = Ledger::new(RunConfig::new(Mode::Grid, init.clone(), 0).ledger_config());
    let g = ledger
        .apply(genesis_grid(&GridRow::initial(&init)))
        .map_err(|e| e.to_string())?;
    // cells x = -4..=0 at outputs 3k..3k+3; seed is the left copy of x = -3
    let seed = OutputRef::new(g.id, 3);
    let tx = Builder::new()
        .build_next(ledger.utxo(), seed, &ledger.config)
        .map_err(|e| e.to_string())?;
    ensure(tx.inputs.len() == 3, || {
        "fixture is not a non-boundary transaction".into()
    })?;
    ledger.validate(&tx).map_err(|e| format!("fixture invalid: {e}"))?;

    let mutate = |v: &Value| match v {
        Value::Bool(b) => Value::Bool(!b),
        Value::Int(i) => Value::Int(i + BigInt::from(1)),
        other => other.clone(),
    };
    let mut total = 0;
    let mut rejected = 0;
    for (k, r) in tx.inputs.iter().enumerate() {
        for f in ["val", "x", "n", "mid"] {
            let mut utxo: UtxoSet = ledger.utxo().clone();
            let mut o = utxo.get(r).expect("input").clone();
            o.payload.set(f, mutate(o.payload.get(f).expect("field")));
            utxo.insert(*r, o);
            total += 1;
            if utxo110::ledger::validate_transaction(&tx, &utxo, &ledger.config).is_err() {
                rejected += 1;
            } else {
                eprintln!("  accepted: in[{k}].{f} mutated");
            }
        }
    }
    let input_mutations = total;
    for j in 0..tx.outputs.len() {
        for f in ["val", "x", "n", "mid"] {
            let mut bad = tx.clone();
            let v = mutate(bad.outputs[j].payload.get(f).expect("field"));
            bad.outputs[j].payload.set(f, v);
            total += 1;
            if ledger.validate(&bad).is_err() {
                rejected += 1;
            } else {
                eprintln!("  accepted: out[{j}].{f} mutated");
            }
        }
        let mut bad = tx.clone();
        bad.outputs[j].script = Script::new(parse("true").unwrap());
        total += 1;
        if ledger.validate(&bad).is_err() {
            rejected += 1;
        }
    }
    ensure(input_mutations == 12, || format!("{input_mutations} input mutations"))?;
    ensure(rejected == total, || format!("{rejected}/{total} rejected"))?;
    Ok(format!("{rejected}/{total} mutations rejected"))
}

// 7 ---------------------------------------------------------------------------

fn closure_and_determinism() -> Check {
    let init = BitString::parse("1011").unwrap();
    let cfg = RunConfig::new(Mode::Grid, init.clone(), 0).ledger_config();
    let mut ledger = Ledger::new(cfg);
    ledger
        .apply(genesis_grid(&GridRow::initial(&init)))
        .map_err(|e| e.to_string())?;
    let mut builder = Builder::new();
    let mut checked = 0;
    for _ in 0..8 {
        for seed in ledger.utxo().refs() {
            if !ledger.utxo().contains(&seed) {
                continue;
            }
            if let Ok(tx) = builder.build_next(ledger.utxo(), seed, &ledger.config) {
                ledger
                    .validate(&tx)
                    .map_err(|e| format!("builder emitted an invalid transaction: {e}"))?;
                ledger.submit(tx).map_err(|e| e.to_string())?;
                checked += 1;
            }
        }
    }
    ensure(checked > 0, || "nothing built".into())?;

    let digest = |mode: Mode, bits: &str| -> Result<[u8; 32], String> {
        let l = run(&RunConfig::new(mode, BitString::parse(bits).unwrap(), 12)).map_err(|e| e.to_string())?;
        Ok(sha256(chain_to_jsonl(l.log()).as_bytes()))
    };
    for (mode, bits) in [(Mode::Grid, "1101"), (Mode::Layer, "0110100110")] {
        ensure(digest(mode, bits)? == digest(mode, bits)?, || {
            format!("{mode:?} runs differ")
        })?;
    }
    Ok(format!(
        "{checked} built transactions valid, repeated runs byte-identical"
    ))
}

// 8 ---------------------------------------------------------------------------

fn analyzer() -> Check {
    let layer = analyze_canonical(&build_layer_script()).map_err(|e| format!("layer: {e}"))?;
    let bit = analyze_canonical(&build_bit_script()).map_err(|e| format!("bit: {e}"))?;
    let dlog = parse("5 pow out[0].x mod 23 = 13").unwrap();
    ensure(analyze_canonical(&dlog).is_err(), || "discrete log accepted".into())?;

    // brute force over [0, 22): the only exponent is 14
    let solutions: Vec<u32> = (0..22)
        .filter(|&x| BigInt::from(5).modpow(&BigInt::from(x), &BigInt::from(23)) == BigInt::from(13))
        .collect();
    ensure(solutions == vec![14], || format!("brute force found {solutions:?}"))?;
    let check = |x: i64| {
        let ins = [Output::new(Script::new(dlog.clone()), Payload::new())];
        let outs = [Output::new(Script::new(dlog.clone()), Payload::new().with("x", x))];
        let ctx = EvalContext::new(&ins, &outs, 0).unwrap();
        evaluate(&dlog, &ctx, 10_000).map(|(v, _)| v)
    };
    ensure(check(14) == Ok(Value::Bool(true)), || "x = 14 rejected".into())?;
    ensure(
        (0..22).filter(|&x| x != 14).all(|x| check(x) == Ok(Value::Bool(false))),
        || "other x accepted".into(),
    )?;
    Ok(format!(
        "layer: {} branch, bit: {} branches, discrete log rejected, 5^14 mod 23 = 13",
        layer.branches.len(),
        bit.branches.len()
    ))
}

fn main() {
    let start = Instant::now();
    let runs = layer_runs();
    let layer_took = start.elapsed();
    let start = Instant::now();
    let grids = grid_runs();
    let grid_took = start.elapsed();

    let results: Vec<(&str, Check)> = vec![
        ("1 transition correctness", transition()),
        (
            "2 layer chain matches oracle",
            runs.as_ref()
                .map_err(Clone::clone)
                .and_then(|r| layer_chain(r, layer_took)),
        ),
        (
            "3 grid chain matches oracle",
            grids
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|g| grid_chain(g, grid_took)),
        ),
        (
            "4 self-reproduction",
            runs.as_ref().map_err(Clone::clone).and_then(|r| self_reproduction(r)),
        ),
        (
            "5 bounded validation",
            grids.as_ref().map_err(Clone::clone).and_then(|g| bounded_validation(g)),
        ),
        ("6 tamper suite", tamper()),
        ("7 builder closure and determinism", closure_and_determinism()),
        ("8 canonical-form analyzer", analyzer()),
        ("9 grid consumption", consumption()),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
