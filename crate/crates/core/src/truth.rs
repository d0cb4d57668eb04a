//! 16-entry truth tables of 4-input Boolean functions.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Output column of a function `f(A, B, C, D)`.
///
/// Input index `k = 8·A + 4·B + 2·C + D`; bit `k` of the id is the output
/// for input `k`, so the id is `Σ f(k)·2^k`. `A` is the most significant
/// input bit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TruthTable(u16);

impl TruthTable {
    pub const FALSE: TruthTable = TruthTable(0);
    pub const TRUE: TruthTable = TruthTable(u16::MAX);

    pub const fn from_id(id: u16) -> Self {
        TruthTable(id)
    }

    /// Decimal representation of the function.
    pub const fn id(self) -> u16 {
        self.0
    }

    pub fn from_fn(mut f: impl FnMut(u8) -> bool) -> Self {
        let mut bits = 0u16;
        for k in 0..16u8 {
            if f(k) {
                bits |= 1 << k;
            }
        }
        TruthTable(bits)
    }

    /// Builds a table from 16 output bits ordered by input index.
    pub fn from_bits(bits: [bool; 16]) -> Self {
        Self::from_fn(|k| bits[k as usize])
    }

    /// Output for input index `k` (`0..16`).
    pub fn output(self, k: u8) -> bool {
        debug_assert!(k < 16);
        self.0 >> k & 1 == 1
    }

    pub fn eval(self, a: bool, b: bool, c: bool, d: bool) -> bool {
        self.output(input_index(a, b, c, d))
    }

    pub fn minterms(self) -> impl Iterator<Item = u8> {
        (0..16u8).filter(move |&k| self.output(k))
    }

    pub fn count_ones(self) -> u32 {
        self.0.count_ones()
    }

    /// Constant FALSE or constant TRUE.
    pub fn is_trivial(self) -> bool {
        self == Self::FALSE || self == Self::TRUE
    }

    pub fn complement(self) -> Self {
        TruthTable(!self.0)
    }
}

/// `8·A + 4·B + 2·C + D`.
pub fn input_index(a: bool, b: bool, c: bool, d: bool) -> u8 {
    (a as u8) << 3 | (b as u8) << 2 | (c as u8) << 1 | d as u8
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable({} = {:#018b})", self.0, self.0)
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
