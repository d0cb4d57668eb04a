//! Sum-of-products expressions over the variables `A`, `B`, `C`, `D`.
//!
//! ASCII grammar accepted by [`parse_sop`] (whitespace is insignificant):
//!
//! ```text
//! expr   := 'TRUE' | 'FALSE' | term ('+' term)*
//! term   := '(' factor+ ')' | factor+
//! factor := ['~'] var
//! var    := 'A' | 'B' | 'C' | 'D'
//! ```
//!
//! LaTeX sources (`\overline{A}B + C\overline{D}`) go through
//! [`normalize_latex`] first.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::truth::TruthTable;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    A,
    B,
    C,
    D,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::A, Var::B, Var::C, Var::D];

    /// Weight of the variable in the input index `8A + 4B + 2C + D`.
    pub const fn bit(self) -> u8 {
        match self {
            Var::A => 8,
            Var::B => 4,
            Var::C => 2,
            Var::D => 1,
        }
    }

    pub const fn letter(self) -> char {
        match self {
            Var::A => 'A',
            Var::B => 'B',
            Var::C => 'C',
            Var::D => 'D',
        }
    }

    pub fn from_letter(c: char) -> Option<Var> {
        match c {
            'A' => Some(Var::A),
            'B' => Some(Var::B),
            'C' => Some(Var::C),
            'D' => Some(Var::D),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    pub var: Var,
    pub negated: bool,
}

impl Literal {
    pub const fn pos(var: Var) -> Self {
        Literal { var, negated: false }
    }

    pub const fn neg(var: Var) -> Self {
        Literal { var, negated: true }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~{}", self.var.letter())
        } else {
            write!(f, "{}", self.var.letter())
        }
    }
}

/// Conjunction of literals, stored as a cube: `mask` selects the variables
/// present (input-index bit weights), `value` their required values.
///
/// Never empty, and each variable appears at most once.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ProductTerm {
    mask: u8,
    value: u8,
}

impl ProductTerm {
    /// Builds a term from literals. Returns `None` for an empty list or when
    /// a variable repeats.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Option<Self> {
        let mut mask = 0u8;
        let mut value = 0u8;
        for lit in literals {
            let b = lit.var.bit();
            if mask & b != 0 {
                return None;
            }
            mask |= b;
            if !lit.negated {
                value |= b;
            }
        }
        (mask != 0).then_some(ProductTerm { mask, value })
    }

    /// Cube with the given care mask and values; `None` when `mask` is zero
    /// or has bits outside the four inputs.
    pub fn from_cube(mask: u8, value: u8) -> Option<Self> {
        (mask != 0 && mask & !0xF == 0).then_some(ProductTerm { mask, value: value & mask })
    }

    /// The single-minterm term for input index `k`.
    pub fn minterm(k: u8) -> Self {
        ProductTerm { mask: 0xF, value: k & 0xF }
    }

    pub fn mask(self) -> u8 {
        self.mask
    }

    pub fn value(self) -> u8 {
        self.value
    }

    /// Literals in `A, B, C, D` order.
    pub fn literals(self) -> impl Iterator<Item = Literal> {
        Var::ALL.into_iter().filter(move |v| self.mask & v.bit() != 0).map(move |v| Literal {
            var: v,
            negated: self.value & v.bit() == 0,
        })
    }

    pub fn literal_count(self) -> u32 {
        self.mask.count_ones()
    }

    /// True when the term is satisfied by input index `k`.
    pub fn covers(self, k: u8) -> bool {
        k & self.mask == self.value
    }

    pub fn truth_table(self) -> TruthTable {
        TruthTable::from_fn(|k| self.covers(k))
    }
}

impl fmt::Display for ProductTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for lit in self.literals() {
            write!(f, "{lit}")?;
        }
        Ok(())
    }
}

// Terms order by their rendered text, so canonical output sorts as strings.
impl Ord for ProductTerm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.to_string().cmp(&other.to_string())
    }
}

impl PartialOrd for ProductTerm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// OR of product terms, or one of the two constants.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum SopExpr {
    Const(bool),
    Sum(BTreeSet<ProductTerm>),
}

impl SopExpr {
    pub const FALSE: SopExpr = SopExpr::Const(false);
    pub const TRUE: SopExpr = SopExpr::Const(true);

    /// Sum of the given terms; an empty iterator gives `FALSE`.
    pub fn from_terms(terms: impl IntoIterator<Item = ProductTerm>) -> Self {
        let set: BTreeSet<_> = terms.into_iter().collect();
        if set.is_empty() {
            SopExpr::FALSE
        } else {
            SopExpr::Sum(set)
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ProductTerm> + '_ {
        match self {
            SopExpr::Const(_) => None,
            SopExpr::Sum(t) => Some(t.iter().copied()),
        }
        .into_iter()
        .flatten()
    }

    pub fn term_count(&self) -> usize {
        match self {
            SopExpr::Const(_) => 0,
            SopExpr::Sum(t) => t.len(),
        }
    }

    pub fn literal_count(&self) -> u32 {
        self.terms().map(ProductTerm::literal_count).sum()
    }

    pub fn constant(&self) -> Option<bool> {
        match self {
            SopExpr::Const(v) => Some(*v),
            SopExpr::Sum(_) => None,
        }
    }

    /// Value at input index `k = 8A + 4B + 2C + D`.
    pub fn eval(&self, k: u8) -> bool {
        match self {
            SopExpr::Const(v) => *v,
            SopExpr::Sum(terms) => terms.iter().any(|t| t.covers(k)),
        }
    }

    pub fn eval_vars(&self, a: bool, b: bool, c: bool, d: bool) -> bool {
        self.eval(crate::truth::input_index(a, b, c, d))
    }

    pub fn to_truth_table(&self) -> TruthTable {
        TruthTable::from_fn(|k| self.eval(k))
    }
}

impl fmt::Display for SopExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SopExpr::Const(true) => f.write_str("TRUE"),
            SopExpr::Const(false) => f.write_str("FALSE"),
            SopExpr::Sum(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for SopExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sop(s)
    }
}

/// Parse failure; `position` is a character offset into the parsed text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("unknown symbol {symbol:?} at position {position}")]
    UnknownSymbol { symbol: char, position: usize },
    #[error("empty term at position {position}")]
    EmptyTerm { position: usize },
    #[error("variable {var} appears twice in the term starting at position {position}")]
    DuplicateVariable { var: char, position: usize },
    #[error("unbalanced parenthesis at position {position}")]
    Unbalanced { position: usize },
    #[error("constant {text} must stand alone (position {position})")]
    MisplacedConstant { text: &'static str, position: usize },
}

/// A term as written: literals in source order plus the term's start
/// position. Duplicates are not rejected at this level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawTerm {
    pub literals: Vec<Literal>,
    pub position: usize,
}

/// Tokenizes and groups literals into terms without validating them.
/// Constants are reported as [`ParseError::MisplacedConstant`]; callers that
/// accept constants check for them first.
pub fn parse_raw_terms(text: &str) -> Result<Vec<RawTerm>, ParseError> {
    let chars: Vec<(usize, char)> =
        text.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut terms = Vec::new();
    let mut i = 0;
    loop {
        let start = chars.get(i).map_or(text.chars().count(), |c| c.0);
        let mut literals = Vec::new();
        let paren = matches!(chars.get(i), Some((_, '(')));
        if paren {
            i += 1;
        }
        while let Some(&(pos, c)) = chars.get(i) {
            match c {
                '~' => {
                    let Some(&(vpos, vc)) = chars.get(i + 1) else {
                        return Err(ParseError::EmptyTerm { position: pos });
                    };
                    let var = Var::from_letter(vc)
                        .ok_or(ParseError::UnknownSymbol { symbol: vc, position: vpos })?;
                    literals.push(Literal::neg(var));
                    i += 2;
                }
                'A'..='D' => {
                    literals.push(Literal::pos(Var::from_letter(c).unwrap()));
                    i += 1;
                }
                '+' | ')' => break,
                'T' | 'F' if is_constant_at(&chars, i).is_some() => {
                    return Err(ParseError::MisplacedConstant {
                        text: is_constant_at(&chars, i).unwrap(),
                        position: pos,
                    })
                }
                _ => return Err(ParseError::UnknownSymbol { symbol: c, position: pos }),
            }
        }
        if paren {
            match chars.get(i) {
                Some((_, ')')) => i += 1,
                Some(&(pos, _)) => return Err(ParseError::Unbalanced { position: pos }),
                None => return Err(ParseError::Unbalanced { position: start }),
            }
        } else if let Some(&(pos, ')')) = chars.get(i) {
            return Err(ParseError::Unbalanced { position: pos });
        }
        if literals.is_empty() {
            return Err(ParseError::EmptyTerm { position: start });
        }
        terms.push(RawTerm { literals, position: start });
        match chars.get(i) {
            None => break,
            Some((_, '+')) => {
                i += 1;
                if i == chars.len() {
                    return Err(ParseError::EmptyTerm { position: text.chars().count() });
                }
            }
            Some(&(pos, c)) => return Err(ParseError::UnknownSymbol { symbol: c, position: pos }),
        }
    }
    Ok(terms)
}

fn is_constant_at(chars: &[(usize, char)], i: usize) -> Option<&'static str> {
    ["TRUE", "FALSE"].into_iter().find(|word| {
        word.chars().enumerate().all(|(j, wc)| chars.get(i + j).is_some_and(|&(_, c)| c == wc))
    })
}

/// Validates a raw term: rejects repeated variables.
pub fn term_from_raw(raw: &RawTerm) -> Result<ProductTerm, ParseError> {
    let mut seen = 0u8;
    for lit in &raw.literals {
        if seen & lit.var.bit() != 0 {
            return Err(ParseError::DuplicateVariable {
                var: lit.var.letter(),
                position: raw.position,
            });
        }
        seen |= lit.var.bit();
    }
    ProductTerm::new(raw.literals.iter().copied())
        .ok_or(ParseError::EmptyTerm { position: raw.position })
}

/// Parses the ASCII grammar described in the module docs.
pub fn parse_sop(text: &str) -> Result<SopExpr, ParseError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    match compact.as_str() {
        "" => return Err(ParseError::Empty),
        "TRUE" => return Ok(SopExpr::TRUE),
        "FALSE" => return Ok(SopExpr::FALSE),
        _ => {}
    }
    let raw = parse_raw_terms(text)?;
    let terms = raw.iter().map(term_from_raw).collect::<Result<Vec<_>, _>>()?;
    Ok(SopExpr::from_terms(terms))
}

/// Rewrites LaTeX notation into the ASCII grammar: `\overline{X}` and
/// `\bar{X}` become `~X`; math delimiters, line breaks, spacing macros and
/// `({\sc ...})` annotations are dropped. Anything else is left for the
/// parser to reject.
pub fn normalize_latex(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '$' | '~' => i += 1,
            '(' if starts_with(&chars, i, "({\\sc") => {
                // annotation such as ({\sc nand})
                let close = chars[i..].iter().position(|&c| c == ')').map_or(chars.len(), |p| i + p + 1);
                i = close;
            }
            '\\' => {
                let name_len = chars[i + 1..].iter().take_while(|c| c.is_ascii_alphabetic()).count();
                let name: String = chars[i + 1..i + 1 + name_len].iter().collect();
                match name.as_str() {
                    "overline" | "bar" => {
                        let mut j = i + 1 + name_len;
                        while j < chars.len() && chars[j].is_whitespace() {
                            j += 1;
                        }
                        if chars.get(j) == Some(&'{') {
                            let close = chars[j..].iter().position(|&c| c == '}').map(|p| j + p);
                            match close {
                                Some(close) => {
                                    let inner: String = chars[j + 1..close].iter().collect();
                                    out.push('~');
                                    out.push_str(inner.trim());
                                    i = close + 1;
                                }
                                None => {
                                    out.push('\\');
                                    i += 1;
                                }
                            }
                        } else if let Some(&v) = chars.get(j) {
                            out.push('~');
                            out.push(v);
                            i = j + 1;
                        } else {
                            i = j;
                        }
                    }
                    "quad" | "qquad" | "noindent" => i += 1 + name_len,
                    "" => match chars.get(i + 1) {
                        Some(',' | ';' | ':' | '!' | ' ') => i += 2,
                        Some('\\') => {
                            out.push(' ');
                            i += 2;
                        }
                        _ => {
                            out.push('\\');
                            i += 1;
                        }
                    },
                    _ => {
                        out.push('\\');
                        i += 1;
                    }
                }
            }
            _ => {
                out.push(c);
                i += 1;
            }
        }
    }
    out.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn starts_with(chars: &[char], i: usize, pat: &str) -> bool {
    pat.chars().enumerate().all(|(j, p)| chars.get(i + j) == Some(&p))
}
