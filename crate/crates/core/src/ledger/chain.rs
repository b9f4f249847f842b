use thiserror::Error;

use super::tx::{OutputRef, Transaction, TxId};
use super::utxo::UtxoSet;
use super::validate::{validate_transaction, Invalid, LedgerConfig, Valid};

/// A transaction as recorded in the log. `id` is the identifier the log
/// claims; replay checks it against the recomputed digest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoggedTx {
    pub id: TxId,
    pub tx: Transaction,
    pub cost: u64,
    /// Cost of each input's script; empty when loaded from a file.
    pub per_input: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub transactions: Vec<LoggedTx>,
    pub cost_budget: u64,
    pub cost_used: u64,
}

impl Block {
    pub fn new(cost_budget: u64) -> Self {
        Block {
            transactions: Vec::new(),
            cost_budget,
            cost_used: 0,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.cost_budget - self.cost_used
    }
}

/// Append-only list of blocks.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainLog {
    pub blocks: Vec<Block>,
}

impl ChainLog {
    pub fn transactions(&self) -> impl Iterator<Item = &LoggedTx> {
        self.blocks.iter().flat_map(|b| b.transactions.iter())
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.transactions.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_cost(&self) -> u64 {
        self.blocks.iter().map(|b| b.cost_used).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error(transparent)]
    Invalid(#[from] Invalid),
    #[error("transaction costs {cost} units but the block has {remaining} left")]
    BlockBudgetExceeded { cost: u64, remaining: u64 },
    #[error("genesis transactions are only allowed in the initial block")]
    LateGenesis,
    #[error("recorded id {recorded} does not match computed id {computed}")]
    IdMismatch { recorded: TxId, computed: TxId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Applied {
    pub id: TxId,
    pub cost: u64,
}

/// UTXO state plus the log that produced it.
#[derive(Debug, Clone)]
pub struct Ledger {
    pub config: LedgerConfig,
    utxo: UtxoSet,
    log: ChainLog,
}

impl Ledger {
    pub fn new(config: LedgerConfig) -> Self {
        Self::with_utxo(config.empty_utxo(), config)
    }

    pub fn with_utxo(utxo: UtxoSet, config: LedgerConfig) -> Self {
        let log = ChainLog {
            blocks: vec![Block::new(config.block_budget)],
        };
        Ledger { config, utxo, log }
    }

    pub fn utxo(&self) -> &UtxoSet {
        &self.utxo
    }

    pub fn log(&self) -> &ChainLog {
        &self.log
    }

    pub fn into_parts(self) -> (UtxoSet, ChainLog) {
        (self.utxo, self.log)
    }

    pub fn validate(&self, tx: &Transaction) -> Result<Valid, Invalid> {
        validate_transaction(tx, &self.utxo, &self.config)
    }

    /// Closes the current block and opens an empty one.
    pub fn seal_block(&mut self) {
        if self.current().transactions.is_empty() {
            return;
        }
        self.log.blocks.push(Block::new(self.config.block_budget));
    }

    fn current(&self) -> &Block {
        self.log.blocks.last().expect("log always has an open block")
    }

    /// Validates `tx` and, if it fits the open block, applies it. On error
    /// nothing changes.
    pub fn apply(&mut self, tx: Transaction) -> Result<Applied, ApplyError> {
        let id = tx.id_with(self.config.digest);
        self.apply_recorded(id, tx)
    }

    fn apply_recorded(&mut self, id: TxId, tx: Transaction) -> Result<Applied, ApplyError> {
        if tx.is_genesis && self.log.blocks.len() > 1 {
            return Err(ApplyError::LateGenesis);
        }
        let valid = self.validate(&tx)?;
        let computed = tx.id_with(self.config.digest);
        if computed != id {
            return Err(ApplyError::IdMismatch { recorded: id, computed });
        }
        let remaining = self.current().remaining();
        if valid.total_cost > remaining {
            return Err(ApplyError::BlockBudgetExceeded {
                cost: valid.total_cost,
                remaining,
            });
        }
        for r in &tx.inputs {
            self.utxo.remove(r);
        }
        for (i, o) in tx.outputs.iter().enumerate() {
            self.utxo.insert(OutputRef::new(id, i as u32), o.clone());
        }
        let block = self.log.blocks.last_mut().expect("open block");
        block.cost_used += valid.total_cost;
        block.transactions.push(LoggedTx {
            id,
            tx,
            cost: valid.total_cost,
            per_input: valid.per_input,
        });
        Ok(Applied {
            id,
            cost: valid.total_cost,
        })
    }

    /// Like `apply`, but starts a new block when the open one is too full.
    pub fn submit(&mut self, tx: Transaction) -> Result<Applied, ApplyError> {
        match self.apply(tx.clone()) {
            Err(ApplyError::BlockBudgetExceeded { .. }) if !self.current().transactions.is_empty() => {
                self.seal_block();
                self.apply(tx)
            }
            r => r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("transaction {tx_index} failed: {reason}")]
pub struct FirstFailure {
    pub tx_index: usize,
    pub reason: ApplyError,
}

/// Replays `log` from `genesis` with the log's own block boundaries and
/// budgets. Returns the final state on success.
pub fn verify_chain(log: &ChainLog, genesis: &UtxoSet, config: &LedgerConfig) -> Result<Ledger, FirstFailure> {
    let mut ledger = Ledger::with_utxo(genesis.clone(), config.clone());
    ledger.log.blocks.clear();
    let mut tx_index = 0;
    for block in &log.blocks {
        ledger.log.blocks.push(Block::new(block.cost_budget));
        for entry in &block.transactions {
            ledger
                .apply_recorded(entry.id, entry.tx.clone())
                .map_err(|reason| FirstFailure { tx_index, reason })?;
            tx_index += 1;
        }
    }
    if ledger.log.blocks.is_empty() {
        ledger.log.blocks.push(Block::new(config.block_budget));
    }
    Ok(ledger)
}
