//! Runs the automaton on a fresh ledger: genesis, then one sweep per step.

use thiserror::Error;

use crate::builder::Builder;
use crate::ledger::{ApplyError, Ledger, LedgerConfig, DEFAULT_BLOCK_BUDGET};
use crate::render::Mode;
use crate::rule110::{genesis_grid, genesis_layer, GenesisError, GridRow};
use crate::script::{BitString, DEFAULT_COST_LIMIT, DEFAULT_MAX_WIDTH};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mode: Mode,
    pub initial: BitString,
    pub steps: usize,
    pub max_width: usize,
    pub cost_limit_per_input: u64,
    pub block_budget: u64,
}

impl RunConfig {
    pub fn new(mode: Mode, initial: BitString, steps: usize) -> Self {
        RunConfig {
            mode,
            initial,
            steps,
            max_width: DEFAULT_MAX_WIDTH,
            cost_limit_per_input: DEFAULT_COST_LIMIT,
            block_budget: DEFAULT_BLOCK_BUDGET,
        }
    }

    pub fn ledger_config(&self) -> LedgerConfig {
        ledger_config(self.mode, self.max_width, self.cost_limit_per_input, self.block_budget)
    }
}

pub fn ledger_config(mode: Mode, max_width: usize, cost_limit: u64, block_budget: u64) -> LedgerConfig {
    LedgerConfig {
        cost_limit_per_input: cost_limit,
        max_width,
        block_budget,
        indexed_fields: mode.indexed_fields(),
        ..LedgerConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Genesis(#[from] GenesisError),
    #[error("empty initial row")]
    EmptyInitial,
    #[error(transparent)]
    Apply(#[from] ApplyError),
    #[error("step {step} built {built} transactions, expected {expected}")]
    Stalled { step: usize, built: usize, expected: usize },
}

pub fn run(cfg: &RunConfig) -> Result<Ledger, RunError> {
    let mut ledger = Ledger::new(cfg.ledger_config());
    let mut width = cfg.initial.len();
    let genesis = match cfg.mode {
        Mode::Layer => genesis_layer(&cfg.initial, cfg.max_width)?,
        Mode::Grid if width == 0 => return Err(RunError::EmptyInitial),
        Mode::Grid => genesis_grid(&GridRow::initial(&cfg.initial)),
    };
    ledger.apply(genesis)?;
    ledger.seal_block();
    let mut builder = Builder::new();
    for step in 1..=cfg.steps {
        let built = builder.sweep(&mut ledger)?.len();
        let expected = match cfg.mode {
            Mode::Layer => 1,
            Mode::Grid => width + 1,
        };
        if built != expected {
            return Err(RunError::Stalled { step, built, expected });
        }
        width += usize::from(cfg.mode == Mode::Grid);
    }
    Ok(ledger)
}
