//! Complexity of space-time diagrams: deflated PNG size, LZ76 phrase count,
//! a Wolfram-style class, and the count/complexity correlation.

use std::io::Write;

use flate2::write::ZlibEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ca::{detect_attractor, AttractorInfo, AttractorKind, SpaceTime};
use crate::num::Sample;

/// zlib level used for IDAT. Part of the image format contract: changing it
/// changes every PNG size and golden file.
pub const PNG_DEFLATE_LEVEL: u32 = 9;

/// Longest cycle still counted as class II. Periodic rules at width 500
/// settle into cycles of up to 60 steps.
pub const DEFAULT_MAX_PERIOD: usize = 64;

/// Minimum normalized LZ76 for class III/IV.
pub const DEFAULT_LZ_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexityError {
    #[error("LZ76 of an empty sequence is undefined")]
    EmptyInput,
    #[error("correlation needs at least 2 points, got {0}")]
    TooFewPoints(usize),
}

/// 8-bit grayscale PNG of the diagram, state 1 black. No interlace, no
/// ancillary chunks, filter type None on every scanline, a single IDAT
/// compressed at [`PNG_DEFLATE_LEVEL`].
pub fn render_png(st: &SpaceTime) -> Vec<u8> {
    render_png_with_level(st, PNG_DEFLATE_LEVEL)
}

/// [`render_png`] with an explicit zlib level (0..=9).
pub fn render_png_with_level(st: &SpaceTime, level: u32) -> Vec<u8> {
    let (w, h) = (st.width(), st.height());
    let mut raw = Vec::with_capacity((w + 1) * h);
    for row in st.rows() {
        raw.push(0u8);
        raw.extend(row.bits().map(|b| if b { 0u8 } else { 255u8 }));
    }
    let mut z = ZlibEncoder::new(Vec::new(), Compression::new(level.min(9)));
    z.write_all(&raw).expect("in-memory write");
    let idat = z.finish().expect("in-memory write");

    let mut ihdr = Vec::with_capacity(13);
    ihdr.extend((w as u32).to_be_bytes());
    ihdr.extend((h as u32).to_be_bytes());
    ihdr.extend([8, 0, 0, 0, 0]);

    let mut out = b"\x89PNG\r\n\x1a\n".to_vec();
    write_chunk(&mut out, b"IHDR", &ihdr);
    write_chunk(&mut out, b"IDAT", &idat);
    write_chunk(&mut out, b"IEND", &[]);
    out
}

fn write_chunk(out: &mut Vec<u8>, kind: &[u8; 4], data: &[u8]) {
    out.extend((data.len() as u32).to_be_bytes());
    let mut crc = crc32fast::Hasher::new();
    crc.update(kind);
    crc.update(data);
    out.extend(kind);
    out.extend(data);
    out.extend(crc.finalize().to_be_bytes());
}

/// Size in bytes of [`render_png`]'s output.
pub fn lz_png_size(st: &SpaceTime) -> usize {
    render_png(st).len()
}

/// Number of phrases in the LZ76 (exhaustive history) parsing of `bits`.
///
/// Each phrase is the shortest extension of the current position that cannot
/// be copied from a start point earlier in the sequence (overlap allowed);
/// an unfinished phrase at the end counts. Linear time: a suffix automaton of
/// the whole sequence records, for every state, the earliest end position of
/// its substrings, and a phrase grows while that end lies before the
/// phrase's own last symbol.
pub fn lz76(bits: &[bool]) -> Result<usize, ComplexityError> {
    if bits.is_empty() {
        return Err(ComplexityError::EmptyInput);
    }
    let sam = SuffixAutomaton::build(bits);
    let n = bits.len();
    let mut phrases = 0;
    let mut i = 0;
    while i < n {
        let mut state = 0usize;
        let mut m = 0usize;
        // extend while bits[i..i+m+1] occurs starting before i
        while i + m < n {
            let next = sam.next[state][bits[i + m] as usize];
            if next == NONE || sam.first_end[next as usize] >= i + m {
                break;
            }
            state = next as usize;
            m += 1;
        }
        phrases += 1;
        i += m + 1;
    }
    Ok(phrases)
}

/// LZ76 phrases divided by `n / log2(n)`; the raw count when `n < 2`.
pub fn normalized_lz76(factors: usize, n: usize) -> f64 {
    if n < 2 {
        return factors as f64;
    }
    let n = n as f64;
    factors as f64 / (n / n.log2())
}

const NONE: u32 = u32::MAX;

struct SuffixAutomaton {
    next: Vec<[u32; 2]>,
    link: Vec<u32>,
    len: Vec<usize>,
    /// Smallest end index of any occurrence of the state's substrings.
    first_end: Vec<usize>,
}

impl SuffixAutomaton {
    fn build(s: &[bool]) -> Self {
        let cap = 2 * s.len() + 1;
        let mut a = SuffixAutomaton {
            next: Vec::with_capacity(cap),
            link: Vec::with_capacity(cap),
            len: Vec::with_capacity(cap),
            first_end: Vec::with_capacity(cap),
        };
        a.push([NONE; 2], NONE, 0, 0);
        let mut last = 0u32;
        for (pos, &b) in s.iter().enumerate() {
            let c = b as usize;
            let cur = a.push([NONE; 2], NONE, a.len[last as usize] + 1, pos);
            let mut p = last;
            while p != NONE && a.next[p as usize][c] == NONE {
                a.next[p as usize][c] = cur;
                p = a.link[p as usize];
            }
            if p == NONE {
                a.link[cur as usize] = 0;
            } else {
                let q = a.next[p as usize][c];
                if a.len[p as usize] + 1 == a.len[q as usize] {
                    a.link[cur as usize] = q;
                } else {
                    let clone = a.push(a.next[q as usize], a.link[q as usize], a.len[p as usize] + 1, a.first_end[q as usize]);
                    while p != NONE && a.next[p as usize][c] == q {
                        a.next[p as usize][c] = clone;
                        p = a.link[p as usize];
                    }
                    a.link[q as usize] = clone;
                    a.link[cur as usize] = clone;
                }
            }
            last = cur;
        }
        a
    }

    fn push(&mut self, next: [u32; 2], link: u32, len: usize, first_end: usize) -> u32 {
        self.next.push(next);
        self.link.push(link);
        self.len.push(len);
        self.first_end.push(first_end);
        (self.next.len() - 1) as u32
    }
}

/// Wolfram-style behaviour class. III and IV are not separated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WolframClass {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
    #[serde(rename = "III_IV")]
    IIIOrIV,
    #[serde(rename = "unclassified")]
    Unclassified,
}

impl std::fmt::Display for WolframClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            WolframClass::I => "I",
            WolframClass::II => "II",
            WolframClass::IIIOrIV => "III_IV",
            WolframClass::Unclassified => "unclassified",
        })
    }
}

impl std::str::FromStr for WolframClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" => Ok(WolframClass::I),
            "II" => Ok(WolframClass::II),
            "III_IV" => Ok(WolframClass::IIIOrIV),
            "unclassified" => Ok(WolframClass::Unclassified),
            other => Err(format!("unknown class {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    /// Longest cycle period still counted as class II.
    pub max_period: usize,
    /// Minimum normalized LZ76 for class III/IV.
    pub lz_floor: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig { max_period: DEFAULT_MAX_PERIOD, lz_floor: DEFAULT_LZ_FLOOR }
    }
}

/// Class I: homogeneous fixed point. Class II: any other fixed point, or a
/// cycle of period at most `max_period`. Class III/IV: no such attractor
/// and normalized LZ76 above `lz_floor`. Anything else is unclassified.
///
/// `activity` is carried for reporting; the decision does not depend on it.
pub fn classify_wolfram(attractor: &AttractorInfo, normalized_lz76: f64, _activity: f64, cfg: &ClassifierConfig) -> WolframClass {
    match attractor.kind {
        AttractorKind::FixedPoint if attractor.homogeneous_value.is_some() => WolframClass::I,
        AttractorKind::FixedPoint => WolframClass::II,
        AttractorKind::Cycle if attractor.period <= cfg.max_period => WolframClass::II,
        _ if normalized_lz76 > cfg.lz_floor => WolframClass::IIIOrIV,
        _ => WolframClass::Unclassified,
    }
}

/// Per-run complexity summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityReport {
    pub function_id: u16,
    pub seed: u64,
    pub width: usize,
    pub steps: usize,
    pub png_bytes: usize,
    pub lz76_factors: usize,
    pub normalized_lz76: f64,
    pub activity: f64,
    pub attractor: AttractorInfo,
    pub wolfram_class: WolframClass,
}

/// Computes every metric for one space-time diagram.
pub fn analyze(st: &SpaceTime, function_id: u16, seed: u64, cfg: &ClassifierConfig) -> ComplexityReport {
    analyze_with_level(st, function_id, seed, cfg, PNG_DEFLATE_LEVEL)
}

/// [`analyze`] with an explicit PNG compression level.
pub fn analyze_with_level(st: &SpaceTime, function_id: u16, seed: u64, cfg: &ClassifierConfig, png_level: u32) -> ComplexityReport {
    let bits: Vec<bool> = st.bits().collect();
    let lz76_factors = lz76(&bits).expect("space-time is non-empty");
    let normalized = normalized_lz76(lz76_factors, bits.len());
    let attractor = detect_attractor(st);
    let activity = st.activity();
    ComplexityReport {
        function_id,
        seed,
        width: st.width(),
        steps: st.height() - 1,
        png_bytes: render_png_with_level(st, png_level).len(),
        lz76_factors,
        normalized_lz76: normalized,
        activity,
        attractor,
        wolfram_class: classify_wolfram(&attractor, normalized, activity, cfg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult<T: Sample> {
    pub pearson_r: T,
    pub n_points: usize,
    /// Set when either variable is constant; `pearson_r` is then 0.
    pub degenerate: bool,
}

/// Pearson correlation of `(x, y)` pairs.
pub fn correlation<T: Sample>(points: &[(T, T)]) -> Result<CorrelationResult<T>, ComplexityError> {
    let n = points.len();
    if n < 2 {
        return Err(ComplexityError::TooFewPoints(n));
    }
    let nt = T::from_usize(n).unwrap();
    let mx = points.iter().fold(T::zero(), |a, p| a + p.0) / nt;
    let my = points.iter().fold(T::zero(), |a, p| a + p.1) / nt;
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Ok(CorrelationResult { pearson_r: T::zero(), n_points: n, degenerate: true });
    }
    let r = sxy / (sxx * syy).sqrt();
    Ok(CorrelationResult { pearson_r: r.max(-T::one()).min(T::one()), n_points: n, degenerate: false })
}
