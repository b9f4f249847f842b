//! Transactions, the UTXO set, validation and the chain log.

pub mod chain;
pub mod files;
pub mod tx;
pub mod utxo;
pub mod validate;

pub use chain::{verify_chain, Applied, ApplyError, Block, ChainLog, FirstFailure, Ledger, LoggedTx};
pub use tx::{sha256, DigestFn, OutputRef, Transaction, TxId};
pub use utxo::{IndexKey, LookupError, UtxoSet};
pub use validate::{validate_transaction, Invalid, LedgerConfig, Valid, DEFAULT_BLOCK_BUDGET};
