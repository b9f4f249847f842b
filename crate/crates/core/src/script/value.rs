//! Runtime values, payloads and outputs shared by the VM and the ledger.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use super::ast::ScriptExpr;
use super::codec::{self, DecodeError};

/// Default cap on the length of any bit string produced or stored.
pub const DEFAULT_MAX_WIDTH: usize = 256;

/// A finite sequence of bits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    /// Parses `0`/`1` or `.`/`#` characters. Whitespace is ignored.
    pub fn parse(text: &str) -> Option<Self> {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' | '.' => Some(false),
                '1' | '#' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(BitString)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.0.get(index).copied()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    /// Same bits with the one at `index` inverted.
    pub fn flipped(&self, index: usize) -> Self {
        let mut bits = self.0.clone();
        bits[index] = !bits[index];
        BitString(bits)
    }

    pub fn to_text(&self) -> String {
        self.0.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bits\"{}\"", self.to_text())
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

struct ScriptInner {
    expr: ScriptExpr,
    bytes: Vec<u8>,
}

/// A guarding script together with its canonical byte form.
///
/// Equality, ordering and hashing are defined on the canonical bytes, so two
/// scripts are equal exactly when their serializations are.
#[derive(Clone)]
pub struct Script(Arc<ScriptInner>);

impl Script {
    pub fn new(expr: ScriptExpr) -> Self {
        let bytes = codec::encode_script(&expr);
        Script(Arc::new(ScriptInner { expr, bytes }))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        let expr = codec::decode_script(bytes)?;
        Ok(Script(Arc::new(ScriptInner {
            expr,
            bytes: bytes.to_vec(),
        })))
    }

    pub fn expr(&self) -> &ScriptExpr {
        &self.0.expr
    }

    pub fn bytes(&self) -> &[u8] {
        &self.0.bytes
    }
}

impl PartialEq for Script {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.bytes == other.0.bytes
    }
}

impl Eq for Script {}

impl std::hash::Hash for Script {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.bytes.hash(state)
    }
}

impl PartialOrd for Script {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Script {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.bytes.cmp(&other.0.bytes)
    }
}

impl fmt::Debug for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Script({} bytes)", self.0.bytes.len())
    }
}

/// A payload field value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
    Bits(BitString),
    Script(Script),
}

impl Value {
    pub fn int(v: i64) -> Self {
        Value::Int(BigInt::from(v))
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Bits(_) => "bits",
            Value::Script(_) => "script",
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    pub fn as_bits(&self) -> Option<&BitString> {
        match self {
            Value::Bits(b) => Some(b),
            _ => None,
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::int(v)
    }
}

impl From<BitString> for Value {
    fn from(b: BitString) -> Self {
        Value::Bits(b)
    }
}

/// Ordered field record carried by an output.
///
/// Field order is fixed by first insertion and is part of the output's
/// identity: two payloads with the same fields in a different order differ.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Payload(Vec<(String, Value)>);

impl Payload {
    pub fn new() -> Self {
        Payload(Vec::new())
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    /// Overwrites an existing field in place or appends a new one.
    pub fn set(&mut self, name: impl Into<String>, value: Value) {
        let name = name.into();
        match self.0.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = value,
            None => self.0.push((name, value)),
        }
    }

    pub fn with(mut self, name: impl Into<String>, value: impl Into<Value>) -> Self {
        self.set(name, value.into());
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.get(name).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.0.iter().map(|(n, v)| (n.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, Value)> for Payload {
    fn from_iter<I: IntoIterator<Item = (String, Value)>>(iter: I) -> Self {
        let mut p = Payload::new();
        for (n, v) in iter {
            p.set(n, v);
        }
        p
    }
}

/// Guarding script plus payload.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Output {
    pub script: Script,
    pub payload: Payload,
}

impl Output {
    pub fn new(script: Script, payload: Payload) -> Self {
        Output { script, payload }
    }
}
