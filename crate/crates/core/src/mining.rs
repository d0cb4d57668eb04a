//! Truth tables from peak reports, function distributions and state graphs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::minimize::minimize;
use crate::num::Sample;
use crate::signal::{detect_peaks, segment_states, IngestError, PeakOptions, PeakReport, Recording, Schema, ThresholdBand, CHANNELS, STATES};
use crate::truth::TruthTable;

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("expected 16 peak reports, got {0}")]
    WrongReportCount(usize),
    #[error("threshold index {index} out of range (run has {available})")]
    ThresholdIndex { index: usize, available: usize },
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// Bit `k` is set iff state `k` had at least one peak.
pub fn extract_table<T: Sample>(reports: &[PeakReport<T>]) -> Result<TruthTable, MiningError> {
    if reports.len() != STATES {
        return Err(MiningError::WrongReportCount(reports.len()));
    }
    Ok(TruthTable::from_fn(|k| reports[k as usize].count >= 1))
}

/// Tables for one repeat, indexed by (channel, threshold index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiningResult {
    pub repeat_index: usize,
    thresholds: usize,
    tables: Vec<TruthTable>,
}

impl MiningResult {
    /// `tables[c]` lists channel `c`'s tables in threshold order.
    pub fn from_tables(repeat_index: usize, tables: [Vec<TruthTable>; CHANNELS]) -> Self {
        let thresholds = tables[0].len();
        assert!(tables.iter().all(|t| t.len() == thresholds), "ragged mining result");
        MiningResult { repeat_index, thresholds, tables: tables.into_iter().flatten().collect() }
    }

    pub fn table(&self, channel: usize, threshold: usize) -> TruthTable {
        self.tables[channel * self.thresholds + threshold]
    }

    pub fn thresholds(&self) -> usize {
        self.thresholds
    }

    /// Number of tables (channels × thresholds).
    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// `(channel, threshold, table)` for every cell.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, TruthTable)> + '_ {
        self.tables.iter().enumerate().map(|(i, &t)| (i / self.thresholds, i % self.thresholds, t))
    }
}

/// Segments a recording and extracts one table per (channel, band).
pub fn mine<T: Sample>(
    rec: &Recording<T>,
    bands: &[ThresholdBand<T>],
    schema: &Schema,
    opts: &PeakOptions,
    repeat_index: usize,
) -> Result<MiningResult, MiningError> {
    let windows = segment_states(rec, schema)?;
    let tables = std::array::from_fn(|c| {
        bands
            .iter()
            .map(|&band| {
                let reports: Vec<_> = windows.iter().map(|w| detect_peaks(w, c, band, opts)).collect();
                extract_table(&reports).expect("16 windows")
            })
            .collect()
    });
    Ok(MiningResult::from_tables(repeat_index, tables))
}

/// Where a table came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub repeat: usize,
    pub channel: usize,
    pub threshold: usize,
}

/// Occurrence counts of function ids with the cells each came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FunctionDistribution {
    provenance: BTreeMap<u16, Vec<Cell>>,
}

impl FunctionDistribution {
    pub fn add(&mut self, tt: TruthTable, cell: Cell) {
        self.provenance.entry(tt.id()).or_default().push(cell);
    }

    /// Associative merge.
    pub fn merge(&mut self, other: FunctionDistribution) {
        for (id, cells) in other.provenance {
            self.provenance.entry(id).or_default().extend(cells);
        }
    }

    pub fn count(&self, id: u16) -> usize {
        self.provenance.get(&id).map_or(0, Vec::len)
    }

    pub fn provenance(&self, id: u16) -> &[Cell] {
        self.provenance.get(&id).map_or(&[], Vec::as_slice)
    }

    /// `(id, count)` in ascending id order.
    pub fn counts(&self) -> impl Iterator<Item = (u16, usize)> + '_ {
        self.provenance.iter().map(|(&id, c)| (id, c.len()))
    }

    pub fn total(&self) -> usize {
        self.provenance.values().map(Vec::len).sum()
    }

    pub fn distinct(&self) -> usize {
        self.provenance.len()
    }

    pub fn is_empty(&self) -> bool {
        self.provenance.is_empty()
    }

    /// Number of tables that are constant FALSE or TRUE.
    pub fn trivial_total(&self) -> usize {
        self.count(0) + self.count(u16::MAX)
    }

    pub fn non_trivial_total(&self) -> usize {
        self.total() - self.trivial_total()
    }

    /// The `k` most frequent ids, ties broken by ascending id.
    pub fn top_k(&self, k: usize, include_trivial: bool) -> Vec<(u16, usize)> {
        let mut v: Vec<(u16, usize)> = self
            .counts()
            .filter(|&(id, _)| include_trivial || !TruthTable::from_id(id).is_trivial())
            .collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v.truncate(k);
        v
    }

    /// CSV `id,count,canonical_sop`, ascending id.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,count,canonical_sop\n");
        for (id, n) in self.counts() {
            writeln!(out, "{id},{n},{}", minimize(TruthTable::from_id(id))).unwrap();
        }
        out
    }

    /// CSV `id,count` for plotting.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("id,count\n");
        for (id, n) in self.counts() {
            writeln!(out, "{id},{n}").unwrap();
        }
        out
    }
}

/// Aggregates every (repeat, channel, threshold) table.
pub fn tally<'a>(results: impl IntoIterator<Item = &'a MiningResult>) -> FunctionDistribution {
    let mut dist = FunctionDistribution::default();
    for r in results {
        for (channel, threshold, tt) in r.cells() {
            dist.add(tt, Cell { repeat: r.repeat_index, channel, threshold });
        }
    }
    dist
}

/// Graph over 7-bit output strings for one (repeat, threshold) run.
/// Nodes are distinct strings in order of first appearance; edges follow the
/// input count 0000 → 0001 → ... → 1111 without wrapping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateGraph {
    pub nodes: Vec<String>,
    /// `(from node, to node, input transition label)`.
    pub edges: Vec<(usize, usize, String)>,
}

impl StateGraph {
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{}\" {{\n", name.replace('"', "\\\""));
        for (i, n) in self.nodes.iter().enumerate() {
            writeln!(out, "  n{i} [label=\"{n}\"];").unwrap();
        }
        for (a, b, label) in &self.edges {
            writeln!(out, "  n{a} -> n{b} [label=\"{label}\"];").unwrap();
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_state_graph(result: &MiningResult, threshold: usize) -> Result<StateGraph, MiningError> {
    if threshold >= result.thresholds() {
        return Err(MiningError::ThresholdIndex { index: threshold, available: result.thresholds() });
    }
    let states: Vec<String> = (0..STATES as u8)
        .map(|k| (0..CHANNELS).map(|c| if result.table(c, threshold).output(k) { '1' } else { '0' }).collect())
        .collect();
    let mut nodes: Vec<String> = Vec::new();
    let ids: Vec<usize> = states
        .iter()
        .map(|s| match nodes.iter().position(|n| n == s) {
            Some(i) => i,
            None => {
                nodes.push(s.clone());
                nodes.len() - 1
            }
        })
        .collect();
    let edges = (0..STATES - 1)
        .map(|k| (ids[k], ids[k + 1], format!("{:04b}->{:04b}", k, k + 1)))
        .collect();
    Ok(StateGraph { nodes, edges })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(count: usize) -> PeakReport<f64> {
        PeakReport { count, locations: vec![0; count], max_excursion: if count > 0 { 50.0 } else { 0.0 } }
    }

    #[test]
    fn extract_examples() {
        assert_eq!(extract_table(&vec![report(0); 16]).unwrap().id(), 0);
        assert_eq!(extract_table(&vec![report(2); 16]).unwrap().id(), 65535);
        let mut r = vec![report(1); 16];
        r[15] = report(0);
        let tt = extract_table(&r).unwrap();
        assert_eq!(tt.id(), 32767);
        assert_eq!(minimize(tt).to_string(), "~A + ~B + ~C + ~D");
        assert!(matches!(extract_table(&r[..15]), Err(MiningError::WrongReportCount(15))));
    }

    fn result_with(tables: [TruthTable; CHANNELS], thresholds: usize) -> MiningResult {
        MiningResult::from_tables(0, std::array::from_fn(|c| vec![tables[c]; thresholds]))
    }

    #[test]
    fn all_zero_graph_is_one_node_with_self_loops() {
        let g = build_state_graph(&result_with([TruthTable::FALSE; CHANNELS], 32), 0).unwrap();
        assert_eq!(g.nodes, vec!["0000000".to_string()]);
        assert_eq!(g.edges.len(), 15);
        assert!(g.edges.iter().all(|(a, b, _)| *a == 0 && *b == 0));
        assert_eq!(g.edges[0].2, "0000->0001");
    }

    #[test]
    fn parity_channel_alternates_between_two_nodes() {
        let mut t = [TruthTable::FALSE; CHANNELS];
        t[0] = TruthTable::from_fn(|k| k % 2 == 1);
        let g = build_state_graph(&result_with(t, 32), 3).unwrap();
        assert_eq!(g.nodes, vec!["0000000".to_string(), "1000000".to_string()]);
        for (k, (a, b, _)) in g.edges.iter().enumerate() {
            assert_eq!((*a, *b), if k % 2 == 0 { (0, 1) } else { (1, 0) });
        }
        assert!(g.to_dot("r0_t3").contains("n0 -> n1 [label=\"0000->0001\"]"));
        assert!(build_state_graph(&result_with(t, 32), 32).is_err());
    }

    #[test]
    fn tally_counts_and_top_k() {
        let mut t = [TruthTable::FALSE; CHANNELS];
        t[0] = TruthTable::from_id(32767);
        t[1] = TruthTable::TRUE;
        let r = result_with(t, 32);
        let d = tally([&r, &r]);
        assert_eq!(d.total(), 448);
        assert!(d.counts().all(|(_, n)| n % 2 == 0));
        assert_eq!(d.count(0), 2 * 5 * 32);
        assert_eq!(d.trivial_total(), 2 * 6 * 32);
        assert_eq!(d.top_k(1, false), vec![(32767, 64)]);
        assert_eq!(d.top_k(2, true), vec![(0, 320), (32767, 64)]);
        assert_eq!(d.provenance(32767).len(), 64);
        assert!(d.to_csv().contains("32767,64,~A + ~B + ~C + ~D\n"));
        assert!(tally(std::iter::empty()).is_empty());
    }

    #[test]
    fn merge_is_tally_of_union() {
        let r1 = result_with([TruthTable::from_id(7); CHANNELS], 4);
        let mut r2 = result_with([TruthTable::from_id(9); CHANNELS], 4);
        r2.repeat_index = 1;
        let mut a = tally([&r1]);
        a.merge(tally([&r2]));
        assert_eq!(a, tally([&r1, &r2]));
    }
}
