use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use utxo110::builder::derive_rules;
use utxo110::driver::{ledger_config, run, RunConfig};
use utxo110::ledger::files::{chain_from_jsonl, chain_to_jsonl};
use utxo110::ledger::{verify_chain, ChainLog, DEFAULT_BLOCK_BUDGET};
use utxo110::render::{self, detect_mode, grid_bits, grid_rows, layer_bits, layer_rows};
use utxo110::rule110::{build_bit_script, build_layer_script};
use utxo110::script::{analyze_canonical, parse, BitString, ScriptExpr, DEFAULT_COST_LIMIT};

#[derive(Parser)]
#[command(
    name = "utxo110",
    version,
    about = "Rule 110 on a UTXO ledger with loop-free guarding scripts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Layer,
    Grid,
}

impl From<Mode> for render::Mode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Layer => render::Mode::Layer,
            Mode::Grid => render::Mode::Grid,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Pbm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Layer,
    Bit,
}

#[derive(clap::Args)]
struct Limits {
    /// Largest bit string a payload or `map` may hold.
    #[arg(long, env = "RULE110_MAX_WIDTH", default_value_t = 256)]
    max_width: usize,
    /// Cost units each input script may spend.
    #[arg(long, default_value_t = DEFAULT_COST_LIMIT)]
    cost_limit: u64,
    /// Cost units per block.
    #[arg(long, default_value_t = DEFAULT_BLOCK_BUDGET)]
    block_budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Create a genesis row and advance it by sweeps.
    Run {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Initial row as 0/1 or ./# characters.
        #[arg(long)]
        initial: String,
        #[arg(long, default_value_t = 16)]
        steps: usize,
        #[command(flatten)]
        limits: Limits,
        /// Where to write the chain (JSON Lines).
        #[arg(long)]
        chain: Option<PathBuf>,
        /// Where to write a rendering of the rows.
        #[arg(long)]
        render: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
    },
    /// Replay a chain file from an empty ledger.
    Verify {
        chain: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Verify a chain file and draw its rows.
    Render {
        chain: PathBuf,
        /// Output file; stdout when absent.
        #[arg(long)]
        render: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "ascii")]
        format: Format,
        #[command(flatten)]
        limits: Limits,
    },
    /// Print the canonical form of a script and whether a builder can drive it.
    Analyze {
        #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
        script: Option<PathBuf>,
        #[arg(long, value_enum)]
        builtin: Option<Builtin>,
        /// Fields the UTXO set indexes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "x,n,mid")]
        index: Vec<String>,
    },
}

enum Failure {
    Domain(String),
    Usage(String),
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            mode,
            initial,
            steps,
            limits,
            chain,
            render,
            format,
        } => cmd_run(
            mode,
            &initial,
            steps,
            &limits,
            chain.as_deref(),
            render.as_deref(),
            format,
        ),
        Command::Verify { chain, limits } => {
            cmd_verify(&chain, &limits).map(|(_, _, summary)| println!("ok: {summary}"))
        }
        Command::Render {
            chain,
            render,
            format,
            limits,
        } => cmd_render(&chain, render.as_deref(), format, &limits),
        Command::Analyze { script, builtin, index } => cmd_analyze(script.as_deref(), builtin, &index),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn draw(log: &ChainLog, mode: render::Mode, format: Format) -> Result<String, Failure> {
    let rows = match mode {
        render::Mode::Layer => layer_rows(log).map(|r| layer_bits(&r)),
        render::Mode::Grid => grid_rows(log).map(|r| grid_bits(&r)),
    }
    .map_err(Failure::Domain)?;
    Ok(match format {
        Format::Ascii => render::ascii(&rows),
        Format::Pbm => render::pbm(&rows),
    })
}

fn cmd_run(
    mode: Mode,
    initial: &str,
    steps: usize,
    limits: &Limits,
    chain: Option<&Path>,
    render_to: Option<&Path>,
    format: Format,
) -> Outcome {
    let bits = BitString::parse(initial)
        .filter(|b| !b.is_empty())
        .ok_or_else(|| Failure::Usage(format!("initial row `{initial}` is not a pattern of 0/1 or ./#")))?;
    if bits.len() > limits.max_width {
        return Err(Failure::Usage(format!(
            "initial row has {} cells, more than --max-width {}",
            bits.len(),
            limits.max_width
        )));
    }
    let cfg = RunConfig {
        max_width: limits.max_width,
        cost_limit_per_input: limits.cost_limit,
        block_budget: limits.block_budget,
        ..RunConfig::new(mode.into(), bits, steps)
    };
    let ledger = run(&cfg).map_err(|e| Failure::Domain(e.to_string()))?;
    let log = ledger.log();
    if let Some(path) = chain {
        write(path, &chain_to_jsonl(log))?;
    }
    if let Some(path) = render_to {
        write(path, &draw(log, cfg.mode, format)?)?;
    }
    println!(
        "transactions: {}, blocks: {}, total cost: {}, unspent outputs: {}",
        log.len(),
        log.blocks.iter().filter(|b| !b.transactions.is_empty()).count(),
        log.total_cost(),
        ledger.utxo().len()
    );
    Ok(())
}

fn cmd_verify(chain: &Path, limits: &Limits) -> Result<(ChainLog, render::Mode, String), Failure> {
    let log = chain_from_jsonl(&read(chain)?, limits.block_budget)
        .map_err(|e| Failure::Usage(format!("{}: {e}", chain.display())))?;
    let mode = detect_mode(&log).unwrap_or(render::Mode::Layer);
    let cfg = ledger_config(mode, limits.max_width, limits.cost_limit, limits.block_budget);
    let ledger = verify_chain(&log, &cfg.empty_utxo(), &cfg).map_err(|e| Failure::Domain(e.to_string()))?;
    let summary = format!(
        "{} transactions, total cost {}, {} unspent outputs",
        ledger.log().len(),
        ledger.log().total_cost(),
        ledger.utxo().len()
    );
    Ok((log, mode, summary))
}

fn cmd_render(chain: &Path, render_to: Option<&Path>, format: Format, limits: &Limits) -> Outcome {
    let (log, mode, _) = cmd_verify(chain, limits)?;
    let text = draw(&log, mode, format)?;
    match render_to {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_analyze(path: Option<&Path>, builtin: Option<Builtin>, index: &[String]) -> Outcome {
    let script: ScriptExpr = match (path, builtin) {
        (_, Some(Builtin::Layer)) => build_layer_script(),
        (_, Some(Builtin::Bit)) => build_bit_script(),
        (Some(p), None) => parse(&read(p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?,
        (None, None) => return Err(Failure::Usage("no script given".into())),
    };
    match analyze_canonical(&script) {
        Err(e) => println!("not canonical: {e}"),
        Ok(form) => {
            print!("{form}");
            match derive_rules(&script, index) {
                Ok(rules) => println!("buildable: {} plan(s)", rules.plans.len()),
                Err(e) => println!("not buildable: {e}"),
            }
        }
    }
    Ok(())
}
