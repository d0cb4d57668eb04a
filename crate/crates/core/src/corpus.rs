//! Reference function sets: the sixteen most frequent mined functions with
//! their counts, and the list of all distinct mined functions.

use std::sync::OnceLock;

use crate::sop::{normalize_latex, parse_raw_terms, parse_sop, term_from_raw, ParseError, ProductTerm, RawTerm, SopExpr};
use crate::truth::TruthTable;

/// Distinct non-constant functions, one LaTeX row per line.
pub const SUPPLEMENTARY_LATEX: &str = include_str!("../data/supplementary.tex");
/// The same list in the ASCII grammar, followed by `FALSE` and `TRUE`.
pub const SUPPLEMENTARY_SOP: &str = include_str!("../data/supplementary.sop");

/// `(label, count, LaTeX form)` for the sixteen most frequent non-trivial
/// functions.
pub const TOP16_SOURCE: [(&str, usize, &str); 16] = [
    ("F1", 145, r"$\overline{A}+\overline{B}+\overline{C}+\overline{D}$ ({\sc nand})"),
    ("F2", 83, r"$A\overline{B}+A\overline{C}+A\overline{D}+\overline{A}B+B\overline{C}+B\overline{D}+\overline{A}C+\overline{B}C+C\overline{D}+\overline{A}D+\overline{B}D+\overline{C}D$"),
    ("F3", 81, r"$AC\overline{D}+\overline{A}B\overline{C}+\overline{A}\overline{B}C+\overline{A}\overline{B}D$"),
    ("F4", 59, r"$A\overline{C}+A\overline{D}+\overline{A}C+C\overline{D}+\overline{A}D+\overline{B}D+\overline{C}D$"),
    ("F5", 55, r"$\overline{A}B+C\overline{D}+\overline{A}D$"),
    ("F6", 53, r"$A\overline{B}CD$"),
    ("F7", 47, r"$B\overline{D}+C\overline{D}+\overline{A}D+\overline{B}\overline{C}D$"),
    ("F8", 46, r"$AB\overline{C}\overline{D}$"),
    ("F9", 46, r"$A+B+C+D$ ({\sc or})"),
    ("F10", 40, r"$A\overline{B}+A\overline{D}+\overline{A}B+B\overline{D}+\overline{A}D+\overline{B}D+\overline{C}D$"),
    ("F11", 37, r"$A\overline{B}\overline{C}\overline{D}$"),
    ("F12", 37, r"$A\overline{D}+\overline{A}B+B\overline{C}+\overline{A}D+\overline{B}CD$"),
    ("F13", 37, r"$A\overline{B}+A\overline{C}+A\overline{D}+\overline{A}D+\overline{B}D+\overline{C}D\overline{A}BC+BC\overline{D}$"),
    ("F14", 32, r"$A\overline{D}+\overline{A}B+B\overline{D}+\overline{A}C+C\overline{D}+\overline{A}D+A\overline{B}\overline{C}+\overline{B}\overline{C}D$"),
    ("F15", 29, r"$\overline{C}+A\overline{B}+A\overline{D}+\overline{A}B+B\overline{D}\overline{A}D+\overline{B}D$"),
    ("F16", 28, r"$\overline{A}B+\overline{A}C+\overline{B}D+BC\overline{D}+A\overline{B}\overline{C}$"),
];

/// Reported totals for the constants and the single-gate functions.
pub const FALSE_COUNT: usize = 238;
pub const TRUE_COUNT: usize = 237;
pub const NAND_COUNT: usize = 145;
pub const OR_COUNT: usize = 46;
pub const AND_COUNT: usize = 8;

/// Labels of the functions whose complexity is near zero and which are left
/// out of the count-versus-complexity scatter.
pub const NEAR_ZERO_COMPLEXITY: [&str; 4] = ["F1", "F6", "F8", "F9"];

/// One of the sixteen most frequent functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopFunction {
    pub label: &'static str,
    pub count: usize,
    pub source: &'static str,
    /// Readings of the row. A well-formed row has exactly one. A row whose
    /// term repeats a variable (a missing `+`) has one reading per valid
    /// split of that term, preferred reading first.
    pub readings: Vec<SopExpr>,
}

impl TopFunction {
    /// True when the row needed a split to parse.
    pub fn flagged(&self) -> bool {
        self.readings.len() > 1
    }

    pub fn expr(&self) -> &SopExpr {
        &self.readings[0]
    }

    pub fn table(&self) -> TruthTable {
        self.expr().to_truth_table()
    }

    /// Shown in the count-versus-complexity scatter.
    pub fn displayed(&self) -> bool {
        !NEAR_ZERO_COMPLEXITY.contains(&self.label)
    }
}

/// The sixteen functions, parsed once.
pub fn top16() -> &'static [TopFunction] {
    static CELL: OnceLock<Vec<TopFunction>> = OnceLock::new();
    CELL.get_or_init(|| {
        TOP16_SOURCE
            .iter()
            .map(|&(label, count, source)| TopFunction {
                label,
                count,
                source,
                readings: readings(&normalize_latex(source)).unwrap_or_else(|e| panic!("{label}: {e}")),
            })
            .collect()
    })
}

/// Looks up a function by label (`"F13"`).
pub fn top_function(label: &str) -> Option<&'static TopFunction> {
    top16().iter().find(|f| f.label.eq_ignore_ascii_case(label))
}

/// Parses a row, splitting at most one run-on term into two.
///
/// For a term with a repeated variable every split point leaving two
/// duplicate-free halves is a reading. The preferred reading is the first
/// such split whose second half starts with a complemented literal (a
/// missing `+` before an overline), falling back to the first valid split.
pub fn readings(text: &str) -> Result<Vec<SopExpr>, ParseError> {
    if let Ok(e) = parse_sop(text) {
        return Ok(vec![e]);
    }
    let raw = parse_raw_terms(text)?;
    let mut bad = raw.iter().enumerate().filter(|(_, t)| term_from_raw(t).is_err());
    let (bad_idx, bad_term) = bad.next().expect("parse failed on a term");
    if bad.next().is_some() {
        // more than one run-on term is reported, not guessed
        return Err(term_from_raw(bad_term).unwrap_err());
    }
    let others: Vec<ProductTerm> = raw
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != bad_idx)
        .map(|(_, t)| term_from_raw(t))
        .collect::<Result<_, _>>()?;

    let lits = &bad_term.literals;
    let mut splits: Vec<(bool, SopExpr)> = Vec::new();
    for at in 1..lits.len() {
        let left = RawTerm { literals: lits[..at].to_vec(), position: bad_term.position };
        let right = RawTerm { literals: lits[at..].to_vec(), position: bad_term.position };
        if let (Ok(l), Ok(r)) = (term_from_raw(&left), term_from_raw(&right)) {
            let expr = SopExpr::from_terms(others.iter().copied().chain([l, r]));
            splits.push((lits[at].negated, expr));
        }
    }
    if splits.is_empty() {
        return Err(term_from_raw(bad_term).unwrap_err());
    }
    let preferred = splits.iter().position(|(neg, _)| *neg).unwrap_or(0);
    let first = splits.remove(preferred).1;
    Ok(std::iter::once(first).chain(splits.into_iter().map(|s| s.1)).collect())
}

/// A corpus line that failed to parse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFailure {
    pub line: usize,
    pub text: String,
    pub error: ParseError,
}

/// Parses one expression per non-blank line. Successes keep their 1-based
/// line numbers.
pub fn parse_corpus(text: &str) -> (Vec<(usize, SopExpr)>, Vec<CorpusFailure>) {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_sop(line) {
            Ok(e) => ok.push((i + 1, e)),
            Err(error) => failed.push(CorpusFailure { line: i + 1, text: line.to_string(), error }),
        }
    }
    (ok, failed)
}

/// Converts LaTeX rows to the ASCII grammar, one output line per input line.
pub fn latex_to_ascii(latex: &str) -> String {
    latex
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| normalize_latex(l) + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minimize::minimize;

    #[test]
    fn well_formed_rows_have_one_reading() {
        for f in top16() {
            if f.label != "F13" && f.label != "F15" {
                assert!(!f.flagged(), "{}", f.label);
            }
        }
        assert_eq!(top_function("F1").unwrap().table().id(), 32767);
        assert_eq!(top_function("F9").unwrap().table().id(), 65534);
        assert_eq!(top_function("F6").unwrap().table().id(), 2048);
        assert_eq!(top_function("f5").unwrap().expr().to_string(), "C~D + ~AB + ~AD");
    }

    #[test]
    fn run_on_rows_are_flagged_with_readings() {
        let f13 = top_function("F13").unwrap();
        assert!(f13.flagged());
        assert_eq!(f13.readings.len(), 4);
        assert!(f13.expr().terms().any(|t| t.to_string() == "~ABC"));
        assert!(f13.expr().terms().any(|t| t.to_string() == "~CD"));

        let f15 = top_function("F15").unwrap();
        assert_eq!(f15.readings.len(), 2);
        assert!(f15.expr().terms().any(|t| t.to_string() == "B~D"));
        assert!(f15.expr().terms().any(|t| t.to_string() == "~AD"));
    }

    #[test]
    fn sixteen_distinct_functions() {
        let mut ids: Vec<u16> = top16().iter().map(|f| f.table().id()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 16);
    }

    #[test]
    fn table_forms_are_minimal_for_single_gates() {
        for label in ["F1", "F6", "F8", "F9", "F11"] {
            let f = top_function(label).unwrap();
            assert_eq!(&minimize(f.table()), f.expr(), "{label}");
        }
    }

    #[test]
    fn malformed_rows_are_reported() {
        assert!(readings("AA + BB").is_err());
        assert!(readings("A~A").is_ok());
        assert!(readings("AAA").is_err());
    }
}
