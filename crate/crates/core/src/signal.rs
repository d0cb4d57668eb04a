//! Recording ingest, input-state segmentation and threshold-band peak
//! detection.
//!
//! A recording has seven data channels and one sync channel. The sync
//! channel carries one pulse per input-state change, so a complete session
//! has 15 pulses splitting the samples into 16 windows, one per input string
//! `0000`..`1111`.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{ConfigError, KeyValues};
use crate::num::{median, Sample};
use crate::truth::TruthTable;

pub const CHANNELS: usize = 7;
pub const STATES: usize = 16;
/// Number of sync pulses in a complete session.
pub const SYNC_PULSES: usize = STATES - 1;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("row {row}: {message}")]
    Csv { row: u64, message: String },
    #[error("sync channel missing (expected column {0:?})")]
    SyncMissing(String),
    #[error("data channel missing (expected column {0:?})")]
    ChannelMissing(String),
    #[error("row {row}, column {column:?}: non-numeric value {value:?}")]
    NonNumeric { row: u64, column: String, value: String },
    #[error("row {row}: expected {expected} fields, found {found}")]
    Ragged { row: u64, expected: usize, found: usize },
    #[error("recording has {0} samples; at least 16 are required")]
    TooShort(usize),
    #[error("channel lengths differ: {0:?}")]
    UnequalLengths(Vec<usize>),
    #[error("sample period must be positive, got {0}")]
    BadPeriod(f64),
    #[error("incomplete session: found {found} of 15 sync pulses{gap}")]
    IncompleteSession { found: usize, pulses: Vec<usize>, gap: String },
    #[error("extra sync pulses: found {found}, expected 15, at sample indices {indices:?}")]
    ExtraSyncPulses { found: usize, indices: Vec<usize> },
    #[error("peak amplitude ({peak}) must exceed noise amplitude ({noise}) and noise must be >= 0")]
    AmplitudeOrder { peak: f64, noise: f64 },
    #[error("samples per state must be at least 4, got {0}")]
    SamplesPerState(usize),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Voltage unit of a source file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Volts,
    Millivolts,
    Microvolts,
}

impl Units {
    /// Multiplier converting this unit to millivolts.
    pub fn to_millivolts(self) -> f64 {
        match self {
            Units::Volts => 1000.0,
            Units::Millivolts => 1.0,
            Units::Microvolts => 0.001,
        }
    }
}

impl std::str::FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "V" | "v" => Ok(Units::Volts),
            "mV" | "mv" => Ok(Units::Millivolts),
            "uV" | "uv" | "µV" => Ok(Units::Microvolts),
            other => Err(format!("unknown unit {other:?} (expected V, mV or uV)")),
        }
    }
}

/// Column mapping and acquisition constants for a recording file.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub units: Units,
    /// Used when the file has no time column.
    pub sample_period: f64,
    /// Nominal sync pulse height in millivolts.
    pub sync_amplitude: f64,
    /// Rising-edge level in millivolts; half the amplitude when unset.
    pub sync_threshold: Option<f64>,
    pub samples_per_state: usize,
    pub time_column: String,
    pub channel_columns: [String; CHANNELS],
    pub sync_column: String,
}

impl Default for Schema {
    fn default() -> Self {
        Schema {
            units: Units::Millivolts,
            sample_period: 1.0,
            sync_amplitude: 1000.0,
            sync_threshold: None,
            samples_per_state: 64,
            time_column: "t".into(),
            channel_columns: std::array::from_fn(|i| format!("ch{}", i + 1)),
            sync_column: "sync".into(),
        }
    }
}

impl Schema {
    pub const KEYS: &'static [&'static str] = &[
        "units",
        "sample_period",
        "sync_amplitude",
        "sync_threshold",
        "samples_per_state",
        "time_column",
        "channel_columns",
        "sync_column",
    ];

    /// Reads schema keys from a config; missing keys keep their defaults.
    /// `sync_amplitude` and `sync_threshold` are given in the file's units.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self, ConfigError> {
        let mut s = Schema::default();
        if let Some(u) = kv.get::<Units>("units")? {
            s.units = u;
        }
        let scale = s.units.to_millivolts();
        if let Some(p) = kv.get::<f64>("sample_period")? {
            s.sample_period = p;
        }
        if let Some(a) = kv.get::<f64>("sync_amplitude")? {
            s.sync_amplitude = a * scale;
        }
        if let Some(t) = kv.get::<f64>("sync_threshold")? {
            s.sync_threshold = Some(t * scale);
        }
        if let Some(n) = kv.get::<usize>("samples_per_state")? {
            s.samples_per_state = n;
        }
        if let Some(c) = kv.get_str("time_column") {
            s.time_column = c.to_string();
        }
        if let Some(c) = kv.get_str("sync_column") {
            s.sync_column = c.to_string();
        }
        if let Some(list) = kv.get_str("channel_columns") {
            let names: Vec<&str> = list.split(',').map(str::trim).collect();
            s.channel_columns = names.clone().try_into().map(|a: [&str; CHANNELS]| a.map(String::from)).map_err(|_| {
                ConfigError::Value {
                    key: "channel_columns".into(),
                    value: list.into(),
                    reason: format!("expected {CHANNELS} comma-separated names, got {}", names.len()),
                }
            })?;
        }
        Ok(s)
    }

    pub fn sync_level(&self) -> f64 {
        self.sync_threshold.unwrap_or(self.sync_amplitude / 2.0)
    }
}

/// Seven data channels plus the sync channel, all in millivolts.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording<T: Sample> {
    sample_period: T,
    channels: [Vec<T>; CHANNELS],
    sync: Vec<T>,
}

impl<T: Sample> Recording<T> {
    pub fn new(sample_period: T, channels: [Vec<T>; CHANNELS], sync: Vec<T>) -> Result<Self, IngestError> {
        if !(sample_period > T::zero()) {
            return Err(IngestError::BadPeriod(sample_period.as_f64()));
        }
        let lens: Vec<usize> = channels.iter().map(Vec::len).chain([sync.len()]).collect();
        if lens.iter().any(|&l| l != sync.len()) {
            return Err(IngestError::UnequalLengths(lens));
        }
        if sync.len() < STATES {
            return Err(IngestError::TooShort(sync.len()));
        }
        Ok(Recording { sample_period, channels, sync })
    }

    pub fn sample_period(&self) -> T {
        self.sample_period
    }

    pub fn channel(&self, c: usize) -> &[T] {
        &self.channels[c]
    }

    pub fn sync(&self) -> &[T] {
        &self.sync
    }

    pub fn len(&self) -> usize {
        self.sync.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sync.is_empty()
    }

    /// CSV text with header `t,ch1..ch7,sync` in millivolts.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,ch1,ch2,ch3,ch4,ch5,ch6,ch7,sync\n");
        for i in 0..self.len() {
            let t = T::from_usize(i).unwrap() * self.sample_period;
            write!(out, "{t}").unwrap();
            for ch in &self.channels {
                write!(out, ",{}", ch[i]).unwrap();
            }
            writeln!(out, ",{}", self.sync[i]).unwrap();
        }
        out
    }
}

/// Loads a recording from a CSV file; see [`parse_recording`].
pub fn load_recording<T: Sample>(path: &Path, schema: &Schema) -> Result<Recording<T>, IngestError> {
    let file = std::fs::File::open(path)
        .map_err(|source| IngestError::Io { path: path.display().to_string(), source })?;
    parse_recording(file, schema)
}

/// Parses CSV with a header row. The seven data columns and the sync column
/// are required, the time column is optional; other columns are ignored.
/// Values are converted from the schema's units to millivolts. Row numbers
/// in errors are 1-based file lines (the header is line 1).
pub fn parse_recording<T: Sample, R: Read>(reader: R, schema: &Schema) -> Result<Recording<T>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| IngestError::Csv { row: 1, message: e.to_string() })?
        .clone();
    let find = |name: &str| header.iter().position(|h| h == name);
    let mut data_idx = [0usize; CHANNELS];
    for (c, name) in schema.channel_columns.iter().enumerate() {
        data_idx[c] = find(name).ok_or_else(|| IngestError::ChannelMissing(name.clone()))?;
    }
    let sync_idx = find(&schema.sync_column).ok_or_else(|| IngestError::SyncMissing(schema.sync_column.clone()))?;
    let time_idx = find(&schema.time_column);

    let scale = T::lit(schema.units.to_millivolts());
    let mut channels: [Vec<T>; CHANNELS] = Default::default();
    let mut sync = Vec::new();
    let mut times = Vec::new();
    for (n, record) in rdr.records().enumerate() {
        let row = n as u64 + 2;
        let record = record.map_err(|e| IngestError::Csv { row, message: e.to_string() })?;
        if record.len() != header.len() {
            return Err(IngestError::Ragged { row, expected: header.len(), found: record.len() });
        }
        let cell = |idx: usize| -> Result<T, IngestError> {
            let text = &record[idx];
            text.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .and_then(T::from_f64)
                .ok_or_else(|| IngestError::NonNumeric {
                    row,
                    column: header[idx].to_string(),
                    value: text.to_string(),
                })
        };
        for c in 0..CHANNELS {
            channels[c].push(cell(data_idx[c])? * scale);
        }
        sync.push(cell(sync_idx)? * scale);
        if let Some(ti) = time_idx {
            times.push(cell(ti)?);
        }
    }
    let period = if times.len() >= 2 {
        times[1] - times[0]
    } else {
        T::lit(schema.sample_period)
    };
    Recording::new(period, channels, sync)
}

/// One input-state window: samples `start..end` of every channel.
#[derive(Debug, Clone, Copy)]
pub struct StateWindow<'a, T: Sample> {
    pub state_index: u8,
    pub start: usize,
    pub end: usize,
    channels: [&'a [T]; CHANNELS],
}

impl<'a, T: Sample> StateWindow<'a, T> {
    pub fn channel(&self, c: usize) -> &'a [T] {
        self.channels[c]
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    /// Input string of this state, `A` first, e.g. `"0101"`.
    pub fn label(&self) -> String {
        format!("{:04b}", self.state_index)
    }
}

/// Sample indices of rising edges through `level`. A new pulse needs at
/// least one sample at or below the level since the previous one.
pub fn sync_pulses<T: Sample>(sync: &[T], level: T) -> Vec<usize> {
    let mut out = Vec::new();
    let mut high = false;
    for (i, &v) in sync.iter().enumerate() {
        let above = v > level;
        if above && !high {
            out.push(i);
        }
        high = above;
    }
    out
}

/// Cuts a recording into the 16 input-state windows. Window `k` runs from
/// the `k`-th boundary to the next, where the boundaries are sample 0, the
/// 15 pulse positions, and the end of the recording.
pub fn segment_states<'a, T: Sample>(rec: &'a Recording<T>, schema: &Schema) -> Result<Vec<StateWindow<'a, T>>, IngestError> {
    let pulses = sync_pulses(&rec.sync, T::lit(schema.sync_level()));
    match pulses.len().cmp(&SYNC_PULSES) {
        std::cmp::Ordering::Less => {
            return Err(IngestError::IncompleteSession { found: pulses.len(), gap: describe_gap(&pulses, rec.len()), pulses })
        }
        std::cmp::Ordering::Greater => {
            return Err(IngestError::ExtraSyncPulses { found: pulses.len(), indices: pulses })
        }
        std::cmp::Ordering::Equal => {}
    }
    let bounds: Vec<usize> = std::iter::once(0).chain(pulses).chain([rec.len()]).collect();
    Ok(bounds
        .windows(2)
        .enumerate()
        .map(|(k, w)| StateWindow {
            state_index: k as u8,
            start: w[0],
            end: w[1],
            channels: std::array::from_fn(|c| &rec.channels[c][w[0]..w[1]]),
        })
        .collect())
}

/// Names the widest stretch between consecutive boundaries, which is where
/// a pulse is most likely missing.
fn describe_gap(pulses: &[usize], len: usize) -> String {
    if pulses.is_empty() {
        return String::new();
    }
    let bounds: Vec<usize> = std::iter::once(0).chain(pulses.iter().copied()).chain([len]).collect();
    let (a, b) = bounds
        .windows(2)
        .map(|w| (w[0], w[1]))
        .max_by_key(|(a, b)| (b - a, std::cmp::Reverse(*a)))
        .unwrap();
    format!("; widest gap between samples {a} and {b}")
}

/// Symmetric band of half-width `theta` millivolts around the baseline.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ThresholdBand<T: Sample> {
    theta: T,
}

impl<T: Sample> ThresholdBand<T> {
    /// `None` unless `theta > 0`.
    pub fn new(theta: T) -> Option<Self> {
        (theta > T::zero()).then_some(ThresholdBand { theta })
    }

    pub fn theta(self) -> T {
        self.theta
    }
}

/// The 32 bands 20, 25, ..., 175 mV.
pub fn threshold_sweep<T: Sample>() -> Vec<ThresholdBand<T>> {
    (0..32).map(|i| ThresholdBand { theta: T::lit(20.0 + 5.0 * i as f64) }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Baseline {
    /// Per-window median.
    #[default]
    Median,
    /// Band centred on 0 mV.
    Zero,
}

impl std::str::FromStr for Baseline {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "median" => Ok(Baseline::Median),
            "zero" => Ok(Baseline::Zero),
            other => Err(format!("unknown baseline {other:?} (expected median or zero)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeakOptions {
    pub baseline: Baseline,
    /// Shortest out-of-band run counted as a peak, in samples.
    pub min_width: usize,
}

impl Default for PeakOptions {
    fn default() -> Self {
        PeakOptions { baseline: Baseline::Median, min_width: 1 }
    }
}

impl PeakOptions {
    pub const KEYS: &'static [&'static str] = &["baseline", "min_peak_width"];

    pub fn from_key_values(kv: &KeyValues) -> Result<Self, ConfigError> {
        let mut o = PeakOptions::default();
        if let Some(b) = kv.get::<Baseline>("baseline")? {
            o.baseline = b;
        }
        if let Some(w) = kv.get::<usize>("min_peak_width")? {
            o.min_width = w.max(1);
        }
        Ok(o)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakReport<T: Sample> {
    pub count: usize,
    /// First sample of each peak, relative to the window start.
    pub locations: Vec<usize>,
    /// Largest |v - baseline| over all peak samples; zero without peaks.
    pub max_excursion: T,
}

/// Counts maximal runs of samples with `|v - baseline| > theta` in one
/// channel of a window. Polarity is ignored.
pub fn detect_peaks<T: Sample>(window: &StateWindow<'_, T>, channel: usize, band: ThresholdBand<T>, opts: &PeakOptions) -> PeakReport<T> {
    detect_peaks_in(window.channel(channel), band, opts)
}

/// [`detect_peaks`] on a bare sample slice.
pub fn detect_peaks_in<T: Sample>(samples: &[T], band: ThresholdBand<T>, opts: &PeakOptions) -> PeakReport<T> {
    assert!(!samples.is_empty(), "peak detection on an empty window");
    let baseline = match opts.baseline {
        Baseline::Median => median(samples),
        Baseline::Zero => T::zero(),
    };
    let mut locations = Vec::new();
    let mut max_excursion = T::zero();
    let mut run_start: Option<usize> = None;
    let mut run_max = T::zero();
    for (i, &v) in samples.iter().chain([&T::nan()]).enumerate() {
        let dev = (v - baseline).abs();
        if dev > band.theta {
            if run_start.is_none() {
                run_start = Some(i);
                run_max = T::zero();
            }
            run_max = run_max.max(dev);
        } else if let Some(s) = run_start.take() {
            if i - s >= opts.min_width {
                locations.push(s);
                max_excursion = max_excursion.max(run_max);
            }
        }
    }
    PeakReport { count: locations.len(), locations, max_excursion }
}

/// Parameters for [`synthesize_recording`].
#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub peak_amplitude: f64,
    pub noise_amplitude: f64,
    pub samples_per_state: usize,
    pub sync_amplitude: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams { peak_amplitude: 100.0, noise_amplitude: 0.0, samples_per_state: 64, sync_amplitude: 1000.0, seed: 0 }
    }
}

/// Builds a recording whose channel `c` carries a spike in window `k` iff
/// bit `k` of `tables[c]` is set. Spikes are three samples wide
/// (half, full, half amplitude) centred in the window, with random sign.
/// Noise is uniform in `±noise_amplitude`. Sync is a one-sample pulse at the
/// start of windows 1..15. Deterministic given the seed.
pub fn synthesize_recording<T: Sample>(tables: &[TruthTable; CHANNELS], params: &SynthParams) -> Result<Recording<T>, IngestError> {
    let SynthParams { peak_amplitude, noise_amplitude, samples_per_state: sps, sync_amplitude, seed } = *params;
    if !(peak_amplitude > noise_amplitude && noise_amplitude >= 0.0) {
        return Err(IngestError::AmplitudeOrder { peak: peak_amplitude, noise: noise_amplitude });
    }
    if sps < 4 {
        return Err(IngestError::SamplesPerState(sps));
    }
    let len = STATES * sps;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channels: [Vec<T>; CHANNELS] = std::array::from_fn(|c| {
        let mut v: Vec<f64> = (0..len)
            .map(|_| if noise_amplitude > 0.0 { rng.gen_range(-noise_amplitude..=noise_amplitude) } else { 0.0 })
            .collect();
        for k in 0..STATES {
            if tables[c].output(k as u8) {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let mid = k * sps + sps / 2;
                v[mid - 1] += sign * peak_amplitude / 2.0;
                v[mid] += sign * peak_amplitude;
                v[mid + 1] += sign * peak_amplitude / 2.0;
            }
        }
        v.into_iter().map(T::lit).collect()
    });
    let sync: Vec<T> = (0..len)
        .map(|i| if i > 0 && i % sps == 0 { T::lit(sync_amplitude) } else { T::zero() })
        .collect();
    Recording::new(T::one(), channels, sync)
}
