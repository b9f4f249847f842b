//! A UTXO ledger whose outputs are guarded by loop-free scripts, and the
//! machinery to run Rule 110 across chains of transactions.

pub mod builder;
pub mod driver;
pub mod ledger;
pub mod render;
pub mod rule110;
pub mod script;
