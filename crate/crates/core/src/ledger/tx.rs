use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::script::codec::encode_payload;
use crate::script::Output;

/// Maps canonical transaction bytes to a 32-byte identifier.
pub type DigestFn = fn(&[u8]) -> [u8; 32];

pub fn sha256(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TxId(pub [u8; 32]);

impl fmt::Display for TxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for TxId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TxId({})", &hex::encode(self.0)[..12])
    }
}

impl FromStr for TxId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = hex::decode(s).map_err(|e| format!("bad txId `{s}`: {e}"))?;
        let arr: [u8; 32] = bytes.try_into().map_err(|_| format!("txId `{s}` is not 32 bytes"))?;
        Ok(TxId(arr))
    }
}

/// Points at output `index` of transaction `tx_id`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OutputRef {
    pub tx_id: TxId,
    pub index: u32,
}

impl OutputRef {
    pub fn new(tx_id: TxId, index: u32) -> Self {
        OutputRef { tx_id, index }
    }
}

impl fmt::Display for OutputRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.tx_id, self.index)
    }
}

impl FromStr for OutputRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (id, idx) = s.rsplit_once(':').ok_or_else(|| format!("bad output ref `{s}`"))?;
        let index = idx.parse().map_err(|_| format!("bad output index in `{s}`"))?;
        Ok(OutputRef::new(id.parse()?, index))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transaction {
    pub inputs: Vec<OutputRef>,
    pub outputs: Vec<Output>,
    pub is_genesis: bool,
}

impl Transaction {
    pub fn genesis(outputs: Vec<Output>) -> Self {
        Transaction {
            inputs: Vec::new(),
            outputs,
            is_genesis: true,
        }
    }

    pub fn spend(inputs: Vec<OutputRef>, outputs: Vec<Output>) -> Self {
        Transaction {
            inputs,
            outputs,
            is_genesis: false,
        }
    }

    /// Canonical byte form: genesis flag, then length-prefixed inputs and
    /// outputs. Counts and lengths are big-endian `u32`.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = vec![u8::from(self.is_genesis)];
        out.extend_from_slice(&(self.inputs.len() as u32).to_be_bytes());
        for r in &self.inputs {
            out.extend_from_slice(&r.tx_id.0);
            out.extend_from_slice(&r.index.to_be_bytes());
        }
        out.extend_from_slice(&(self.outputs.len() as u32).to_be_bytes());
        for o in &self.outputs {
            let script = o.script.bytes();
            out.extend_from_slice(&(script.len() as u32).to_be_bytes());
            out.extend_from_slice(script);
            encode_payload(&mut out, &o.payload);
        }
        out
    }

    pub fn id_with(&self, digest: DigestFn) -> TxId {
        TxId(digest(&self.canonical_bytes()))
    }

    pub fn id(&self) -> TxId {
        self.id_with(sha256)
    }
}
