//! Exact two-level minimization: Quine–McCluskey prime generation followed
//! by Petrick's method over the remaining cover chart.
//!
//! Cost order: fewest terms, then fewest literals, then the sorted list of
//! term strings compared lexicographically.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::sop::{ProductTerm, SopExpr};
use crate::truth::TruthTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinimizeError {
    #[error("constant FALSE has no implicants")]
    ConstantFalse,
}

/// Result of prime-implicant generation. The tautology has a single prime
/// with no literals, which [`ProductTerm`] cannot represent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeImplicants {
    Tautology,
    Terms(BTreeSet<ProductTerm>),
}

/// All maximal implicants of `tt`.
pub fn prime_implicants(tt: TruthTable) -> Result<PrimeImplicants, MinimizeError> {
    if tt == TruthTable::FALSE {
        return Err(MinimizeError::ConstantFalse);
    }
    if tt == TruthTable::TRUE {
        return Ok(PrimeImplicants::Tautology);
    }
    Ok(PrimeImplicants::Terms(
        qm_primes(tt)
            .into_iter()
            .map(|(mask, value)| ProductTerm::from_cube(mask, value).expect("non-empty cube"))
            .collect(),
    ))
}

/// Quine–McCluskey merging on `(care mask, value)` cubes. A cube that never
/// merges with a neighbour at its level is prime.
fn qm_primes(tt: TruthTable) -> Vec<(u8, u8)> {
    let mut level: Vec<(u8, u8)> = tt.minterms().map(|k| (0xF, k)).collect();
    let mut primes = Vec::new();
    while !level.is_empty() {
        let mut merged = vec![false; level.len()];
        let mut next: Vec<(u8, u8)> = Vec::new();
        for i in 0..level.len() {
            for j in i + 1..level.len() {
                let (mi, vi) = level[i];
                let (mj, vj) = level[j];
                if mi != mj {
                    continue;
                }
                let diff = vi ^ vj;
                if diff.count_ones() == 1 {
                    merged[i] = true;
                    merged[j] = true;
                    let cube = (mi & !diff, vi & !diff);
                    if !next.contains(&cube) {
                        next.push(cube);
                    }
                }
            }
        }
        primes.extend(level.iter().zip(&merged).filter(|(_, &m)| !m).map(|(c, _)| *c));
        level = next;
    }
    primes
}

/// Exact minimal sum-of-products for `tt`.
pub fn minimize(tt: TruthTable) -> SopExpr {
    if tt == TruthTable::FALSE {
        return SopExpr::FALSE;
    }
    if tt == TruthTable::TRUE {
        return SopExpr::TRUE;
    }
    let primes: Vec<ProductTerm> = match prime_implicants(tt) {
        Ok(PrimeImplicants::Terms(t)) => t.into_iter().collect(),
        _ => unreachable!("constants handled above"),
    };
    let names: Vec<String> = primes.iter().map(ProductTerm::to_string).collect();

    // Chart: for each minterm, the set of primes covering it (bitset over primes).
    let chart: Vec<u64> = tt
        .minterms()
        .map(|k| {
            primes
                .iter()
                .enumerate()
                .filter(|(_, p)| p.covers(k))
                .fold(0u64, |acc, (i, _)| acc | 1 << i)
        })
        .collect();

    let essential = chart.iter().filter(|c| c.count_ones() == 1).fold(0u64, |a, c| a | c);
    let remaining: Vec<u64> = chart.into_iter().filter(|c| c & essential == 0).collect();

    let choice = essential | petrick(&remaining, |set| cover_cost(set, &primes, &names));
    SopExpr::from_terms(bits(choice).map(|i| primes[i]))
}

type Cost = (u32, u32, Vec<String>);

fn cover_cost(set: u64, primes: &[ProductTerm], names: &[String]) -> Cost {
    let mut text: Vec<String> = bits(set).map(|i| names[i].clone()).collect();
    text.sort();
    let literals = bits(set).map(|i| primes[i].literal_count()).sum();
    (set.count_ones(), literals, text)
}

/// Multiplies out the product of sums `clauses` (each a bitset of primes),
/// absorbing supersets as it goes, and returns the cheapest product.
fn petrick(clauses: &[u64], cost: impl Fn(u64) -> Cost) -> u64 {
    if clauses.is_empty() {
        return 0;
    }
    let mut products: Vec<u64> = vec![0];
    for &clause in clauses {
        let mut next: Vec<u64> = Vec::new();
        for &p in &products {
            if p & clause != 0 {
                next.push(p);
                continue;
            }
            for i in bits(clause) {
                next.push(p | 1 << i);
            }
        }
        next.sort_unstable_by_key(|s| (s.count_ones(), *s));
        next.dedup();
        products = absorb(next);
    }
    products.into_iter().min_by_key(|&s| cost(s)).expect("at least one cover")
}

/// Drops every set that is a strict superset of another. Input is sorted by
/// popcount, so a set can only be absorbed by one earlier in the list.
fn absorb(sorted: Vec<u64>) -> Vec<u64> {
    let mut kept: Vec<u64> = Vec::with_capacity(sorted.len());
    for s in sorted {
        if !kept.iter().any(|&k| k & s == k) {
            kept.push(s);
        }
    }
    kept
}

fn bits(set: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| set >> i & 1 == 1)
}

/// Key identifying the function an expression computes: its id followed by
/// the canonical minimal SOP, e.g. `32767:~A + ~B + ~C + ~D`. Two
/// expressions denote the same function iff their keys are equal.
pub fn canonicalize(expr: &SopExpr) -> String {
    let tt = expr.to_truth_table();
    format!("{}:{}", tt.id(), minimize(tt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sop::parse_sop;

    fn min_str(id: u16) -> String {
        minimize(TruthTable::from_id(id)).to_string()
    }

    #[test]
    fn gate_forms() {
        assert_eq!(min_str(32767), "~A + ~B + ~C + ~D");
        assert_eq!(min_str(65534), "A + B + C + D");
        assert_eq!(min_str(32768), "ABCD");
        assert_eq!(min_str(2048), "A~BCD");
        assert_eq!(min_str(0), "FALSE");
        assert_eq!(min_str(65535), "TRUE");
    }

    #[test]
    fn primes_examples() {
        assert_eq!(prime_implicants(TruthTable::FALSE), Err(MinimizeError::ConstantFalse));
        assert_eq!(prime_implicants(TruthTable::TRUE), Ok(PrimeImplicants::Tautology));
        let and = prime_implicants(TruthTable::from_id(32768)).unwrap();
        assert_eq!(and, PrimeImplicants::Terms([ProductTerm::minterm(15)].into()));
        let PrimeImplicants::Terms(nand) = prime_implicants(TruthTable::from_id(32767)).unwrap() else {
            panic!()
        };
        let text: Vec<String> = nand.iter().map(|t| t.to_string()).collect();
        assert_eq!(text, ["~A", "~B", "~C", "~D"]);
    }

    #[test]
    fn xor_needs_all_minterms() {
        // 4-input parity has no adjacent minterms.
        let parity = TruthTable::from_fn(|k| k.count_ones() % 2 == 1);
        let m = minimize(parity);
        assert_eq!(m.term_count(), 8);
        assert_eq!(m.to_truth_table(), parity);
    }

    #[test]
    fn literal_count_breaks_term_ties() {
        // ~AB + ~AD + C~D: three terms either way; the chosen cover must
        // not carry an extra literal.
        let f5 = parse_sop("~AB + C~D + ~AD").unwrap();
        let m = minimize(f5.to_truth_table());
        assert_eq!(m.term_count(), 3);
        assert_eq!(m.literal_count(), 6);
    }

    #[test]
    fn canonical_keys() {
        let k = |s: &str| canonicalize(&parse_sop(s).unwrap());
        assert_eq!(k("~AB + C~D"), k("C~D + ~AB"));
        assert_eq!(k("A"), k("A~B + AB"));
        assert_eq!(k("A"), "65280:A");
        assert_ne!(k("A~BCD"), k("AB~C~D"));
    }
}
