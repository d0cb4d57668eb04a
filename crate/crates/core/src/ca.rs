//! One-dimensional binary cellular automata driven by 4-input functions.
//!
//! Cell `i` updates as `x_i' = f(x_{i-2}, x_{i-1}, x_{i+1}, x_{i+2})` with
//! `A, B, C, D` bound to those neighbours in that order; the cell's own state
//! is not an input. Cells outside `0..width` are held at 0.
//!
//! Rows are packed 64 cells per `u64`, cell `i` at bit `i % 64` of word
//! `i / 64`. Bits past `width` are always zero.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::truth::TruthTable;

pub const MIN_WIDTH: usize = 5;
pub const DEFAULT_WIDTH: usize = 500;
pub const DEFAULT_STEPS: usize = 500;
pub const DEFAULT_DENSITY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CaError {
    #[error("width too small: {0} (minimum {MIN_WIDTH})")]
    WidthTooSmall(usize),
    #[error("probability must lie in [0, 1], got {0}")]
    BadProbability(f64),
}

/// A truth table read as an automaton rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CaRule {
    table: TruthTable,
}

impl CaRule {
    pub fn table(self) -> TruthTable {
        self.table
    }

    /// Next state for the neighbourhood `(x_{i-2}, x_{i-1}, x_{i+1}, x_{i+2})`.
    pub fn apply(self, l2: bool, l1: bool, r1: bool, r2: bool) -> bool {
        self.table.eval(l2, l1, r1, r2)
    }

    /// Word-parallel evaluation on bit-sliced neighbour words.
    #[inline]
    fn apply_words(self, a: u64, b: u64, c: u64, d: u64) -> u64 {
        // Sum of minterms over whichever of f and !f has fewer.
        let id = self.table.id();
        let invert = id.count_ones() > 8;
        let bits = if invert { !id } else { id };
        let mut out = 0u64;
        let mut rest = bits;
        while rest != 0 {
            let k = rest.trailing_zeros();
            rest &= rest - 1;
            let pick = |bit: u32, w: u64| if k >> bit & 1 == 1 { w } else { !w };
            out |= pick(3, a) & pick(2, b) & pick(1, c) & pick(0, d);
        }
        if invert {
            !out
        } else {
            out
        }
    }
}

pub fn rule_from_function(tt: TruthTable) -> CaRule {
    CaRule { table: tt }
}

/// One row of cells.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Config {
    width: usize,
    words: Vec<u64>,
}

impl Config {
    pub fn zeros(width: usize) -> Result<Self, CaError> {
        if width < MIN_WIDTH {
            return Err(CaError::WidthTooSmall(width));
        }
        Ok(Config { width, words: vec![0; width.div_ceil(64)] })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self, CaError> {
        let mut c = Config::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            c.set(i, b);
        }
        Ok(c)
    }

    /// Parses a string of `0` and `1`; other characters are ignored.
    pub fn from_str01(s: &str) -> Result<Self, CaError> {
        let bits: Vec<bool> = s.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }).collect();
        Self::from_bits(&bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        assert!(i < self.width);
        let m = 1u64 << (i % 64);
        if v {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(|i| self.get(i))
    }

    /// `Some(v)` when every cell equals `v`.
    pub fn homogeneous(&self) -> Option<bool> {
        match self.count_ones() {
            0 => Some(false),
            n if n == self.width => Some(true),
            _ => None,
        }
    }

    /// Number of cells that differ from `other` (same width).
    pub fn hamming(&self, other: &Config) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }

    fn tail_mask(&self) -> u64 {
        match self.width % 64 {
            0 => u64::MAX,
            r => (1u64 << r) - 1,
        }
    }
}

impl std::fmt::Debug for Config {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = self.bits().map(|b| if b { '1' } else { '0' }).collect();
        write!(f, "Config({s})")
    }
}

/// Each cell is 1 with probability `p`, independently. Deterministic given
/// the seed (ChaCha8 seeded from the 64-bit value).
pub fn random_config(width: usize, p: f64, seed: u64) -> Result<Config, CaError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CaError::BadProbability(p));
    }
    let mut c = Config::zeros(width)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..width {
        if rng.gen_bool(p) {
            c.set(i, true);
        }
    }
    Ok(c)
}

/// One synchronous update, 64 cells per word operation.
pub fn step(config: &Config, rule: CaRule) -> Config {
    let w = &config.words;
    let n = w.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let x = w[j];
        let prev = if j > 0 { w[j - 1] } else { 0 };
        let next = if j + 1 < n { w[j + 1] } else { 0 };
        let l2 = x << 2 | prev >> 62;
        let l1 = x << 1 | prev >> 63;
        let r1 = x >> 1 | next << 63;
        let r2 = x >> 2 | next << 62;
        out.push(rule.apply_words(l2, l1, r1, r2));
    }
    let mask = config.tail_mask();
    if let Some(last) = out.last_mut() {
        *last &= mask;
    }
    Config { width: config.width, words: out }
}

/// Cell-by-cell update, kept as the oracle for [`step`].
pub fn step_reference(config: &Config, rule: CaRule) -> Config {
    let n = config.width as isize;
    let at = |i: isize| (0..n).contains(&i) && config.get(i as usize);
    let mut out = Config::zeros(config.width).expect("width already validated");
    for i in 0..n {
        out.set(i as usize, rule.apply(at(i - 2), at(i - 1), at(i + 1), at(i + 2)));
    }
    out
}

/// Space-time diagram: row 0 is the initial configuration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SpaceTime {
    rows: Vec<Config>,
}

impl SpaceTime {
    pub fn from_rows(rows: Vec<Config>) -> Self {
        assert!(!rows.is_empty(), "space-time needs at least one row");
        assert!(rows.iter().all(|r| r.width == rows[0].width), "ragged space-time");
        SpaceTime { rows }
    }

    pub fn rows(&self) -> &[Config] {
        &self.rows
    }

    pub fn width(&self) -> usize {
        self.rows[0].width
    }

    /// Number of rows, `steps + 1`.
    pub fn height(&self) -> usize {
        self.rows.len()
    }

    pub fn last(&self) -> &Config {
        self.rows.last().expect("non-empty")
    }

    pub fn get(&self, t: usize, i: usize) -> bool {
        self.rows[t].get(i)
    }

    /// Cells in row-major order.
    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        self.rows.iter().flat_map(Config::bits)
    }

    /// Mean fraction of cells flipping per step over the second half of the
    /// run; 0 for a single row.
    pub fn activity(&self) -> f64 {
        let h = self.rows.len();
        if h < 2 {
            return 0.0;
        }
        let from = (h - 1) / 2;
        let pairs = &self.rows[from..];
        let flips: usize = pairs.windows(2).map(|w| w[0].hamming(&w[1])).sum();
        flips as f64 / ((pairs.len() - 1) * self.width()) as f64
    }

    /// Binary PGM (P5): one byte per cell, state 1 black (0), state 0 white
    /// (255).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width(), self.height()).into_bytes();
        out.extend(self.bits().map(|b| if b { 0u8 } else { 255u8 }));
        out
    }

    /// Rows as `0`/`1` text, one line per time step.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            for b in r.bits() {
                s.push(if b { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }
}

/// Runs `steps` updates; the result has `steps + 1` rows.
pub fn evolve(init: &Config, rule: CaRule, steps: usize) -> SpaceTime {
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(init.clone());
    for _ in 0..steps {
        let next = step(rows.last().unwrap(), rule);
        rows.push(next);
    }
    SpaceTime { rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttractorKind {
    FixedPoint,
    Cycle,
    NoneWithinHorizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttractorInfo {
    pub kind: AttractorKind,
    /// Index of the first row on the attractor.
    pub transient_length: usize,
    /// 1 for fixed points, 0 when no attractor was found.
    pub period: usize,
    /// Cell value when the attractor is a homogeneous fixed point.
    pub homogeneous_value: Option<bool>,
}

/// Finds the first row equal to an earlier one. Rows are bucketed by hash
/// and confirmed by full comparison.
pub fn detect_attractor(st: &SpaceTime) -> AttractorInfo {
    let mut seen: HashMap<u64, Vec<usize>> = HashMap::new();
    for (t, row) in st.rows.iter().enumerate() {
        let mut h = DefaultHasher::new();
        row.words.hash(&mut h);
        let bucket = seen.entry(h.finish()).or_default();
        if let Some(&s) = bucket.iter().find(|&&s| st.rows[s] == *row) {
            let period = t - s;
            let kind = if period == 1 { AttractorKind::FixedPoint } else { AttractorKind::Cycle };
            let homogeneous_value = if period == 1 { row.homogeneous() } else { None };
            return AttractorInfo { kind, transient_length: s, period, homogeneous_value };
        }
        bucket.push(t);
    }
    AttractorInfo {
        kind: AttractorKind::NoneWithinHorizon,
        transient_length: st.rows.len(),
        period: 0,
        homogeneous_value: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sop::parse_sop;

    fn rule(s: &str) -> CaRule {
        rule_from_function(parse_sop(s).unwrap().to_truth_table())
    }

    #[test]
    fn f5_rule_matches_neighbour_formula() {
        let r = rule("~AB + C~D + ~AD");
        for k in 0..16u8 {
            let (l2, l1, r1, r2) = (k & 8 != 0, k & 4 != 0, k & 2 != 0, k & 1 != 0);
            let expect = (!l2 && l1) || (r1 && !r2) || (!l2 && r2);
            assert_eq!(r.apply(l2, l1, r1, r2), expect);
        }
    }

    #[test]
    fn constant_rules() {
        let zero = rule_from_function(TruthTable::FALSE);
        let one = rule_from_function(TruthTable::TRUE);
        let c = random_config(37, 0.5, 1).unwrap();
        assert_eq!(step(&c, zero).count_ones(), 0);
        assert_eq!(step(&c, one).count_ones(), 37);
    }

    #[test]
    fn random_config_extremes_and_errors() {
        assert_eq!(random_config(100, 0.0, 3).unwrap().count_ones(), 0);
        assert_eq!(random_config(100, 1.0, 3).unwrap().count_ones(), 100);
        assert_eq!(random_config(4, 0.5, 3), Err(CaError::WidthTooSmall(4)));
        assert_eq!(random_config(10, 1.5, 3), Err(CaError::BadProbability(1.5)));
        assert_eq!(random_config(130, 0.5, 8).unwrap(), random_config(130, 0.5, 8).unwrap());
    }

    #[test]
    fn zero_row_under_f6_and_nand() {
        let z = Config::zeros(500).unwrap();
        assert_eq!(step(&z, rule("A~BCD")).count_ones(), 0);
        assert_eq!(step(&z, rule("~A + ~B + ~C + ~D")).count_ones(), 500);
    }

    #[test]
    fn single_cell_dies_under_f6() {
        let mut c = Config::zeros(21).unwrap();
        c.set(10, true);
        assert_eq!(step(&c, rule("A~BCD")).count_ones(), 0);
    }

    #[test]
    fn boundary_cells_see_zeros() {
        // OR rule: cell 0 sees (0, 0, x1, x2).
        let c = Config::from_str01("10000").unwrap();
        let next = step(&c, rule("A + B + C + D"));
        assert_eq!(format!("{next:?}"), "Config(01100)");
        assert_eq!(next, step_reference(&c, rule("A + B + C + D")));
    }

    #[test]
    fn word_boundary_crossing() {
        for width in [63, 64, 65, 127, 128, 129] {
            let c = random_config(width, 0.5, width as u64).unwrap();
            for id in [0x6996u16, 0x1234, 0xfffe, 0x8001] {
                let r = rule_from_function(TruthTable::from_id(id));
                assert_eq!(step(&c, r), step_reference(&c, r), "width {width} id {id}");
            }
        }
    }

    #[test]
    fn evolve_zero_steps_is_initial_row() {
        let c = random_config(10, 0.5, 2).unwrap();
        let st = evolve(&c, rule("A"), 0);
        assert_eq!(st.height(), 1);
        assert_eq!(st.rows()[0], c);
    }

    #[test]
    fn attractor_examples() {
        let c = random_config(50, 0.5, 4).unwrap();
        let info = detect_attractor(&evolve(&c, rule_from_function(TruthTable::TRUE), 10));
        assert_eq!(info.kind, AttractorKind::FixedPoint);
        assert_eq!(info.homogeneous_value, Some(true));
        assert!(info.transient_length <= 1);

        let a = Config::from_str01("10101").unwrap();
        let b = Config::from_str01("01010").unwrap();
        let st = SpaceTime::from_rows(vec![Config::from_str01("11111").unwrap(), a.clone(), b.clone(), a, b]);
        let info = detect_attractor(&st);
        assert_eq!((info.kind, info.transient_length, info.period), (AttractorKind::Cycle, 1, 2));
        assert_eq!(info.homogeneous_value, None);

        let st = SpaceTime::from_rows(vec![Config::from_str01("11100").unwrap(), Config::from_str01("01100").unwrap()]);
        assert_eq!(detect_attractor(&st).kind, AttractorKind::NoneWithinHorizon);
    }

    #[test]
    fn pgm_layout() {
        let st = SpaceTime::from_rows(vec![Config::from_str01("10000").unwrap()]);
        let pgm = st.to_pgm();
        assert!(pgm.starts_with(b"P5\n5 1\n255\n"));
        assert_eq!(&pgm[pgm.len() - 5..], &[0, 255, 255, 255, 255]);
    }

    #[test]
    fn activity_of_static_and_blinking_rows() {
        let a = Config::from_str01("11111").unwrap();
        let b = Config::from_str01("00000").unwrap();
        assert_eq!(SpaceTime::from_rows(vec![a.clone(), a.clone(), a.clone()]).activity(), 0.0);
        assert_eq!(SpaceTime::from_rows(vec![a.clone(), b.clone(), a]).activity(), 1.0);
    }
}
