use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use super::tx::OutputRef;
use crate::script::{Output, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("field `{0}` is not indexed")]
    UnindexedField(String),
}

/// The values of the indexed fields present in a payload, in index order.
pub type IndexKey = Vec<(String, Value)>;

/// Unspent outputs with a secondary index over selected payload fields.
#[derive(Clone, Debug, Default)]
pub struct UtxoSet {
    outputs: BTreeMap<OutputRef, Output>,
    indexed: Vec<String>,
    index: BTreeMap<(String, Value), BTreeSet<OutputRef>>,
    // keys of every output ever inserted, spent or not
    created: HashSet<IndexKey>,
}

impl UtxoSet {
    pub fn new<S: Into<String>>(indexed_fields: impl IntoIterator<Item = S>) -> Self {
        UtxoSet {
            indexed: indexed_fields.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn indexed_fields(&self) -> &[String] {
        &self.indexed
    }

    pub fn is_indexed(&self, field: &str) -> bool {
        self.indexed.iter().any(|f| f == field)
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn get(&self, r: &OutputRef) -> Option<&Output> {
        self.outputs.get(r)
    }

    pub fn contains(&self, r: &OutputRef) -> bool {
        self.outputs.contains_key(r)
    }

    /// Entries in `(txId, index)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&OutputRef, &Output)> {
        self.outputs.iter()
    }

    pub fn refs(&self) -> Vec<OutputRef> {
        self.outputs.keys().copied().collect()
    }

    pub fn key_of(&self, output: &Output) -> IndexKey {
        self.indexed
            .iter()
            .filter_map(|f| output.payload.get(f).map(|v| (f.clone(), v.clone())))
            .collect()
    }

    /// Whether an output with this index key was ever inserted.
    pub fn was_created(&self, key: &IndexKey) -> bool {
        self.created.contains(key)
    }

    pub fn insert(&mut self, r: OutputRef, output: Output) {
        if let Some(old) = self.outputs.remove(&r) {
            self.unindex(&r, &old);
        }
        for (f, v) in self.key_of(&output) {
            self.index.entry((f, v)).or_default().insert(r);
        }
        let key = self.key_of(&output);
        if !key.is_empty() {
            self.created.insert(key);
        }
        self.outputs.insert(r, output);
    }

    pub fn remove(&mut self, r: &OutputRef) -> Option<Output> {
        let out = self.outputs.remove(r)?;
        self.unindex(r, &out);
        Some(out)
    }

    fn unindex(&mut self, r: &OutputRef, output: &Output) {
        for kv in self.key_of(output) {
            if let Some(set) = self.index.get_mut(&kv) {
                set.remove(r);
                if set.is_empty() {
                    self.index.remove(&kv);
                }
            }
        }
    }

    /// Refs whose payloads match every `(field, value)` constraint, in
    /// `(txId, index)` order. No constraints matches every unspent output.
    pub fn lookup(&self, constraints: &[(String, Value)]) -> Result<Vec<OutputRef>, LookupError> {
        for (f, _) in constraints {
            if !self.is_indexed(f) {
                return Err(LookupError::UnindexedField(f.clone()));
            }
        }
        let Some((first, rest)) = constraints.split_first() else {
            return Ok(self.refs());
        };
        let empty = BTreeSet::new();
        let get = |kv: &(String, Value)| self.index.get(kv).unwrap_or(&empty);
        Ok(get(first)
            .iter()
            .filter(|r| rest.iter().all(|kv| get(kv).contains(r)))
            .copied()
            .collect())
    }
}
