//! Rule 110: the transition, two independent evolution oracles, and the
//! validator scripts that make a chain of transactions evolve the automaton.

mod scripts;

pub use scripts::{
    bit_script, build_bit_script, build_layer_script, genesis_grid, genesis_layer, layer_script, GenesisError,
    BIT_SCRIPT_SOURCE, CELL_FIELDS, LAYER_SCRIPT_SOURCE,
};

use crate::script::BitString;

pub fn calc_bit(l: bool, c: bool, r: bool) -> bool {
    (l & c & r) ^ (c & r) ^ c ^ r
}

fn step_cyclic(row: &[bool]) -> Vec<bool> {
    let w = row.len();
    (0..w)
        .map(|i| calc_bit(row[(i + w - 1) % w], row[i], row[(i + 1) % w]))
        .collect()
}

/// Rows `0..=steps` of the wrapping automaton; row 0 is `layer` itself.
pub fn evolve_cyclic(layer: &BitString, steps: usize) -> Vec<BitString> {
    let mut rows = vec![layer.clone()];
    for _ in 0..steps {
        let next = step_cyclic(rows.last().expect("non-empty").bits());
        rows.push(BitString::new(next));
    }
    rows
}

/// A row of the growing grid: bits for columns `n..=0`, leftmost first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridRow {
    pub row_index: usize,
    pub n: i64,
    pub bits: Vec<bool>,
}

impl GridRow {
    /// The row whose rightmost column sits at x = 0.
    pub fn initial(bits: &BitString) -> Self {
        GridRow {
            row_index: 0,
            n: 1 - bits.len() as i64,
            bits: bits.bits().to_vec(),
        }
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    /// Bit at column `x`; zero outside `n..=0`.
    pub fn at(&self, x: i64) -> bool {
        if x < self.n || x > 0 {
            return false;
        }
        self.bits[(x - self.n) as usize]
    }

    pub fn to_text(&self) -> String {
        BitString::new(self.bits.clone()).to_text()
    }
}

/// Rows `0..=steps` of the grid that grows one column to the left per step
/// over a zero background, with the right edge pinned at x = 0.
pub fn evolve_grid(initial: &GridRow, steps: usize) -> Vec<GridRow> {
    let mut rows = vec![initial.clone()];
    for _ in 0..steps {
        let prev = rows.last().expect("non-empty");
        let n = prev.n - 1;
        let bits = (n..=0)
            .map(|x| calc_bit(prev.at(x - 1), prev.at(x), prev.at(x + 1)))
            .collect();
        rows.push(GridRow {
            row_index: prev.row_index + 1,
            n,
            bits,
        });
    }
    rows
}
