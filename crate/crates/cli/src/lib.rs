//! `logic-mining` command line: synthesize recordings, mine truth tables,
//! minimize functions, simulate automata and join the results into
//! plot-ready reports.
//!
//! Output layout (all under `--out`):
//!
//! ```text
//! synth:    repeat_00.csv ... repeat_NN.csv, injected.csv
//! mine:     distribution.csv, histogram.csv, tables.csv, summary.txt,
//!           graphs/r00_t00.dot ...
//! simulate: f<id>_s<seed>.png, f<id>_s<seed>.json, [f<id>_s<seed>.pgm]
//! report:   scatter.csv, [histogram.csv], summary.txt
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use logic_mining::ca::{evolve, random_config, rule_from_function, DEFAULT_DENSITY, DEFAULT_STEPS, DEFAULT_WIDTH};
use logic_mining::complexity::{analyze_with_level, correlation, render_png_with_level, ClassifierConfig, ComplexityReport, WolframClass, DEFAULT_LZ_FLOOR, DEFAULT_MAX_PERIOD, PNG_DEFLATE_LEVEL};
use logic_mining::config::{ConfigError, KeyValues};
use logic_mining::corpus::{top16, top_function};
use logic_mining::minimize::minimize;
use logic_mining::mining::{build_state_graph, mine, tally, MiningResult};
use logic_mining::signal::{load_recording, synthesize_recording, threshold_sweep, PeakOptions, Schema, SynthParams, ThresholdBand, CHANNELS};
use logic_mining::sop::{normalize_latex, parse_sop};
use logic_mining::{Recording, TruthTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed inputs. Exit code 1.
    #[error("{0}")]
    Input(String),
    /// A pipeline invariant failed. Exit code 2.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Input(e.to_string())
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Input(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "logic-mining", version, about = "Mine, minimize and simulate 4-input Boolean functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write synthetic recordings with known truth tables.
    Synth(SynthArgs),
    /// Extract truth tables, the function distribution and state graphs from recordings.
    Mine(MineArgs),
    /// Print the canonical minimal SOP for each id or expression line.
    Minimize(MinimizeArgs),
    /// Evolve the automaton of one function and report its complexity.
    Simulate(SimulateArgs),
    /// Join function counts with complexity reports into plot-ready CSVs.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Number of repeats (one CSV each).
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    /// Seven comma-separated truth-table ids, one per channel. Random per repeat when omitted.
    #[arg(long, value_delimiter = ',')]
    pub tables: Option<Vec<u16>>,
    /// Spike height in mV.
    #[arg(long, default_value_t = 100.0)]
    pub peak: f64,
    /// Uniform noise half-width in mV.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Samples per input state (3600 for 1 h at 1 Hz).
    #[arg(long, default_value_t = 64)]
    pub samples_per_state: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// key = value file; its values override flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// Recording CSV files, one per repeat, in repeat order.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated band half-widths in mV [default: 20,25,...,175].
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    /// Band centre: per-window `median` or `zero`.
    #[arg(long, default_value = "median")]
    pub baseline: String,
    /// Shortest out-of-band run counted as a peak, in samples.
    #[arg(long, default_value_t = 1)]
    pub min_peak_width: usize,
    /// Rows in the summary's frequency tables.
    #[arg(long, default_value_t = 16)]
    pub top_k: usize,
    /// key = value file (units, sync_amplitude, column names, ...); overrides flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    /// Input file; standard input when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Prefix each output line with the function id.
    #[arg(long)]
    pub with_id: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Truth-table id, SOP expression, or a top-16 label such as F13.
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value_t = DEFAULT_WIDTH)]
    pub width: usize,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    pub steps: usize,
    /// Probability of a 1 in the initial row.
    #[arg(long, default_value_t = DEFAULT_DENSITY)]
    pub p: f64,
    /// Seeds; repeat the flag or separate with commas.
    #[arg(long = "seed", value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write binary PGM images.
    #[arg(long)]
    pub pgm: bool,
    /// Longest cycle counted as class II.
    #[arg(long, default_value_t = DEFAULT_MAX_PERIOD)]
    pub max_period: usize,
    /// Minimum normalized LZ76 for class III/IV.
    #[arg(long, default_value_t = DEFAULT_LZ_FLOOR)]
    pub lz_floor: f64,
    /// zlib level of the PNG images (changes sizes).
    #[arg(long, default_value_t = PNG_DEFLATE_LEVEL)]
    pub png_level: u32,
    /// key = value file (width, steps, p, seeds, max_period, lz_floor, png_level); overrides flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Distribution CSV written by `mine` (id,count,...).
    #[arg(long, conflicts_with = "table1")]
    pub distribution: Option<PathBuf>,
    /// Use the built-in top-16 counts, omitting the near-zero-complexity F1, F6, F8, F9.
    #[arg(long)]
    pub table1: bool,
    /// Complexity JSON files or directories containing them.
    #[arg(long, required = true, num_args = 1..)]
    pub complexity: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Mine(a) => cmd_mine(a),
        Command::Minimize(a) => {
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            let failures = match &a.input {
                Some(p) => {
                    let f = std::fs::File::open(p).map_err(io_err(p))?;
                    cmd_minimize(std::io::BufReader::new(f), &mut out, a.with_id)?
                }
                None => cmd_minimize(std::io::stdin().lock(), &mut out, a.with_id)?,
            };
            report_failures(&failures)
        }
        Command::Simulate(a) => cmd_simulate(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn report_failures(failures: &[String]) -> Result<()> {
    for f in failures {
        eprintln!("{f}");
    }
    match failures.len() {
        0 => Ok(()),
        n => Err(CliError::Input(format!("{n} input item(s) failed"))),
    }
}

fn load_config(path: Option<&Path>, allowed: &[&str]) -> Result<KeyValues> {
    let Some(p) = path else { return Ok(KeyValues::default()) };
    let kv = KeyValues::load(p)?;
    kv.check_keys(allowed)?;
    Ok(kv)
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, bytes).map_err(io_err(path))
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(io_err(path))
}

pub fn cmd_synth(mut a: SynthArgs) -> Result<()> {
    let kv = load_config(a.config.as_deref(), &["peak", "noise", "samples_per_state", "seed", "repeats", "sync_amplitude"])?;
    a.peak = kv.get("peak")?.unwrap_or(a.peak);
    a.noise = kv.get("noise")?.unwrap_or(a.noise);
    a.samples_per_state = kv.get("samples_per_state")?.unwrap_or(a.samples_per_state);
    a.seed = kv.get("seed")?.unwrap_or(a.seed);
    a.repeats = kv.get("repeats")?.unwrap_or(a.repeats);
    let sync_amplitude = kv.get("sync_amplitude")?.unwrap_or(Schema::default().sync_amplitude);

    let fixed: Option<[TruthTable; CHANNELS]> = match &a.tables {
        Some(ids) => Some(
            ids.iter()
                .map(|&id| TruthTable::from_id(id))
                .collect::<Vec<_>>()
                .try_into()
                .map_err(|v: Vec<_>| CliError::Input(format!("--tables needs {CHANNELS} ids, got {}", v.len())))?,
        ),
        None => None,
    };
    create_dir(&a.out)?;
    let mut table_rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut injected = String::from("repeat,channel,id\n");
    for r in 0..a.repeats {
        let tables = fixed.unwrap_or_else(|| std::array::from_fn(|_| TruthTable::from_id(table_rng.gen())));
        let params = SynthParams {
            peak_amplitude: a.peak,
            noise_amplitude: a.noise,
            samples_per_state: a.samples_per_state,
            sync_amplitude,
            seed: a.seed.wrapping_add(r as u64),
        };
        let rec: Recording = synthesize_recording(&tables, &params).map_err(|e| CliError::Input(e.to_string()))?;
        write_file(&a.out.join(format!("repeat_{r:02}.csv")), rec.to_csv())?;
        for (c, t) in tables.iter().enumerate() {
            writeln!(injected, "{r},{},{}", c + 1, t.id()).unwrap();
        }
    }
    write_file(&a.out.join("injected.csv"), injected)
}

fn parse_thresholds(values: &[f64]) -> Result<Vec<ThresholdBand<f64>>> {
    let bands: Vec<_> = values
        .iter()
        .map(|&v| ThresholdBand::new(v).ok_or_else(|| CliError::Input(format!("threshold {v} must be positive"))))
        .collect::<Result<_>>()?;
    if bands.is_empty() || bands.windows(2).any(|w| w[0].theta() >= w[1].theta()) {
        return Err(CliError::Input("thresholds must be non-empty and strictly ascending".into()));
    }
    Ok(bands)
}

/// Counts from a mining run, for tests and the summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MineSummary {
    pub recordings: usize,
    pub failed: usize,
    pub tables: usize,
    pub graphs: usize,
}

pub fn cmd_mine(a: MineArgs) -> Result<()> {
    let (summary, failures) = mine_files(&a)?;
    eprintln!(
        "mined {} recording(s): {} truth tables, {} state graphs",
        summary.recordings - summary.failed,
        summary.tables,
        summary.graphs
    );
    report_failures(&failures)
}

/// Runs `mine`, writing every output for the files that loaded. Returns the
/// summary and one message per failed file.
pub fn mine_files(a: &MineArgs) -> Result<(MineSummary, Vec<String>)> {
    let mut allowed: Vec<&str> = Schema::KEYS.to_vec();
    allowed.extend(PeakOptions::KEYS);
    allowed.push("thresholds");
    let kv = load_config(a.config.as_deref(), &allowed)?;
    let schema = Schema::from_key_values(&kv)?;
    let mut opts = PeakOptions {
        baseline: a.baseline.parse().map_err(CliError::Input)?,
        min_width: a.min_peak_width.max(1),
    };
    let file_opts = PeakOptions::from_key_values(&kv)?;
    if kv.get_str("baseline").is_some() {
        opts.baseline = file_opts.baseline;
    }
    if kv.get_str("min_peak_width").is_some() {
        opts.min_width = file_opts.min_width;
    }
    let thresholds: Option<Vec<f64>> = match kv.get_str("thresholds") {
        Some(list) => Some(
            list.split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::Input(format!("thresholds: {e}"))))
                .collect::<Result<_>>()?,
        ),
        None => a.thresholds.clone(),
    };
    let bands = match thresholds {
        Some(v) => parse_thresholds(&v)?,
        None => threshold_sweep(),
    };

    let mut results: Vec<MiningResult> = Vec::new();
    let mut failures = Vec::new();
    for (repeat, path) in a.inputs.iter().enumerate() {
        let mined = load_recording::<f64>(path, &schema)
            .map_err(|e| e.to_string())
            .and_then(|rec| mine(&rec, &bands, &schema, &opts, repeat).map_err(|e| e.to_string()));
        match mined {
            Ok(r) => {
                if r.len() != CHANNELS * bands.len() {
                    return Err(CliError::Internal(format!("{} tables for repeat {repeat}", r.len())));
                }
                results.push(r)
            }
            Err(e) => failures.push(format!("{}: {e}", path.display())),
        }
    }

    create_dir(&a.out)?;
    let graphs_dir = a.out.join("graphs");
    create_dir(&graphs_dir)?;
    let dist = tally(&results);
    write_file(&a.out.join("distribution.csv"), dist.to_csv())?;
    write_file(&a.out.join("histogram.csv"), dist.histogram_csv())?;

    let mut tables_csv = String::from("repeat,channel,threshold_mv,id\n");
    let mut graphs = 0;
    for r in &results {
        for (c, t, tt) in r.cells() {
            writeln!(tables_csv, "{},{},{},{}", r.repeat_index, c + 1, bands[t].theta(), tt.id()).unwrap();
        }
        for t in 0..bands.len() {
            let g = build_state_graph(r, t).map_err(|e| CliError::Internal(e.to_string()))?;
            if g.edges.len() != 15 {
                return Err(CliError::Internal(format!("state graph with {} edges", g.edges.len())));
            }
            let name = format!("r{:02}_t{:02}", r.repeat_index, t);
            write_file(&graphs_dir.join(format!("{name}.dot")), g.to_dot(&name))?;
            graphs += 1;
        }
    }
    write_file(&a.out.join("tables.csv"), tables_csv)?;

    let summary = MineSummary { recordings: a.inputs.len(), failed: failures.len(), tables: dist.total(), graphs };
    let mut text = String::new();
    writeln!(text, "recordings: {} (failed: {})", summary.recordings, summary.failed).unwrap();
    writeln!(text, "thresholds: {} ({} to {} mV)", bands.len(), bands[0].theta(), bands[bands.len() - 1].theta()).unwrap();
    writeln!(text, "truth tables: {}", summary.tables).unwrap();
    writeln!(text, "state graphs: {}", summary.graphs).unwrap();
    writeln!(text, "distinct functions: {}", dist.distinct()).unwrap();
    writeln!(text, "trivial tables: {} (FALSE {}, TRUE {})", dist.trivial_total(), dist.count(0), dist.count(u16::MAX)).unwrap();
    writeln!(text, "non-trivial tables: {}", dist.non_trivial_total()).unwrap();
    for (title, include_trivial) in [("most frequent functions", true), ("most frequent non-trivial functions", false)] {
        writeln!(text, "\n{title}:\ncount\tid\tfunction").unwrap();
        for (id, n) in dist.top_k(a.top_k, include_trivial) {
            writeln!(text, "{n}\t{id}\t{}", minimize(TruthTable::from_id(id))).unwrap();
        }
    }
    for f in &failures {
        writeln!(text, "failed: {f}").unwrap();
    }
    write_file(&a.out.join("summary.txt"), text)?;
    Ok((summary, failures))
}

/// Minimizes each non-blank line (an id in 0..=65535 or an expression, LaTeX
/// accepted) and writes one canonical SOP per line. Returns the per-line
/// failures; successful lines are still written.
pub fn cmd_minimize(input: impl BufRead, out: &mut impl std::io::Write, with_id: bool) -> Result<Vec<String>> {
    let mut failures = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| CliError::Input(format!("line {}: {e}", n + 1)))?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let tt = match parse_function(text) {
            Ok(tt) => tt,
            Err(e) => {
                failures.push(format!("line {}: {e}", n + 1));
                continue;
            }
        };
        let sop = minimize(tt);
        if sop.to_truth_table() != tt {
            return Err(CliError::Internal(format!("minimized form of {} differs", tt.id())));
        }
        let written = if with_id { writeln!(out, "{}\t{sop}", tt.id()) } else { writeln!(out, "{sop}") };
        written.map_err(|e| CliError::Input(format!("write: {e}")))?;
    }
    Ok(failures)
}

/// Accepts a decimal id, a top-16 label (`F1`..`F16`), or an SOP expression
/// in ASCII or LaTeX notation.
pub fn parse_function(text: &str) -> Result<TruthTable, String> {
    let text = text.trim();
    if !text.is_empty() && text.chars().all(|c| c.is_ascii_digit()) {
        return text.parse::<u16>().map(TruthTable::from_id).map_err(|_| format!("id {text} is outside 0..=65535"));
    }
    if let Some(f) = top_function(text) {
        return Ok(f.table());
    }
    let normalized = if text.contains('\\') || text.contains('$') { normalize_latex(text) } else { text.to_string() };
    parse_sop(&normalized).map(|e| e.to_truth_table()).map_err(|e| e.to_string())
}

pub fn cmd_simulate(mut a: SimulateArgs) -> Result<()> {
    let kv = load_config(a.config.as_deref(), &["width", "steps", "p", "seeds", "max_period", "lz_floor", "png_level"])?;
    a.width = kv.get("width")?.unwrap_or(a.width);
    a.steps = kv.get("steps")?.unwrap_or(a.steps);
    a.p = kv.get("p")?.unwrap_or(a.p);
    a.max_period = kv.get("max_period")?.unwrap_or(a.max_period);
    a.lz_floor = kv.get("lz_floor")?.unwrap_or(a.lz_floor);
    a.png_level = kv.get("png_level")?.unwrap_or(a.png_level);
    if let Some(list) = kv.get_str("seeds") {
        a.seeds = list
            .split(',')
            .map(|s| s.trim().parse::<u64>().map_err(|e| CliError::Input(format!("seeds: {e}"))))
            .collect::<Result<_>>()?;
    }
    if a.seeds.is_empty() {
        return Err(CliError::Input("at least one seed is required".into()));
    }
    let tt = parse_function(&a.function).map_err(|e| CliError::Input(format!("invalid function {:?}: {e}", a.function)))?;
    let rule = rule_from_function(tt);
    let cfg = ClassifierConfig { max_period: a.max_period, lz_floor: a.lz_floor };
    // validate before creating anything on disk
    random_config(a.width, a.p, 0).map_err(|e| CliError::Input(e.to_string()))?;
    create_dir(&a.out)?;
    for &seed in &a.seeds {
        let init = random_config(a.width, a.p, seed).map_err(|e| CliError::Input(e.to_string()))?;
        let st = evolve(&init, rule, a.steps);
        let report = analyze_with_level(&st, tt.id(), seed, &cfg, a.png_level);
        let stem = format!("f{}_s{}", tt.id(), seed);
        write_file(&a.out.join(format!("{stem}.png")), render_png_with_level(&st, a.png_level))?;
        if a.pgm {
            write_file(&a.out.join(format!("{stem}.pgm")), st.to_pgm())?;
        }
        let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Internal(e.to_string()))?;
        write_file(&a.out.join(format!("{stem}.json")), json + "\n")?;
        println!(
            "{stem}: class {} png {} B lz76 {} ({:.4}) attractor {:?} period {}",
            report.wolfram_class, report.png_bytes, report.lz76_factors, report.normalized_lz76, report.attractor.kind, report.attractor.period
        );
    }
    Ok(())
}

fn collect_reports(paths: &[PathBuf]) -> Result<Vec<ComplexityReport>> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(io_err(p))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(p.clone());
        }
    }
    files
        .iter()
        .map(|f| {
            let text = std::fs::read_to_string(f).map_err(io_err(f))?;
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", f.display())))
        })
        .collect()
}

fn read_distribution(path: &Path) -> Result<BTreeMap<u16, usize>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let mut counts = BTreeMap::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let parse = |f: Option<&str>| f.and_then(|s| s.trim().parse::<u64>().ok());
        match (parse(fields.next()), parse(fields.next())) {
            (Some(id), Some(count)) if id <= u16::MAX as u64 => {
                counts.insert(id as u16, count as usize);
            }
            _ => return Err(CliError::Input(format!("{} line {}: expected id,count", path.display(), n + 1))),
        }
    }
    Ok(counts)
}

/// One joined point of the count-versus-complexity scatter.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRow {
    pub id: u16,
    pub count: usize,
    pub png_bytes: f64,
    pub lz76: f64,
    pub class: WolframClass,
}

/// Averages reports per function id; the class is the most common one
/// (ties go to the lower class).
pub fn aggregate(reports: &[ComplexityReport]) -> BTreeMap<u16, (f64, f64, WolframClass)> {
    let mut groups: BTreeMap<u16, Vec<&ComplexityReport>> = BTreeMap::new();
    for r in reports {
        groups.entry(r.function_id).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(id, rs)| {
            let n = rs.len() as f64;
            let png = rs.iter().map(|r| r.png_bytes as f64).sum::<f64>() / n;
            let lz = rs.iter().map(|r| r.lz76_factors as f64).sum::<f64>() / n;
            let order = [WolframClass::I, WolframClass::II, WolframClass::IIIOrIV, WolframClass::Unclassified];
            let class = order
                .into_iter()
                .max_by_key(|c| (rs.iter().filter(|r| r.wolfram_class == *c).count(), std::cmp::Reverse(order.iter().position(|o| o == c))))
                .unwrap();
            (id, (png, lz, class))
        })
        .collect()
}

pub fn cmd_report(a: ReportArgs) -> Result<()> {
    let reports = collect_reports(&a.complexity)?;
    let (counts, histogram) = if a.table1 {
        let counts: BTreeMap<u16, usize> = top16().iter().filter(|f| f.displayed()).map(|f| (f.table().id(), f.count)).collect();
        (counts, None)
    } else {
        let path = a.distribution.as_ref().ok_or_else(|| CliError::Input("either --distribution or --table1 is required".into()))?;
        let counts = read_distribution(path)?;
        let mut hist = String::from("id,count\n");
        for (id, n) in &counts {
            writeln!(hist, "{id},{n}").unwrap();
        }
        (counts, Some(hist))
    };
    let agg = aggregate(&reports);
    let rows: Vec<ScatterRow> = agg
        .iter()
        .filter_map(|(&id, &(png_bytes, lz76, class))| counts.get(&id).map(|&count| ScatterRow { id, count, png_bytes, lz76, class }))
        .collect();
    let mut mismatches: Vec<String> = agg.keys().filter(|id| !counts.contains_key(id)).map(|id| format!("{id}: complexity without count")).collect();
    if a.table1 {
        mismatches.extend(counts.keys().filter(|id| !agg.contains_key(id)).map(|id| format!("{id}: count without complexity")));
    }
    if rows.is_empty() {
        for m in &mismatches {
            eprintln!("join mismatch: {m}");
        }
        return Err(CliError::Input("nothing to join".into()));
    }
    create_dir(&a.out)?;
    let mut scatter = String::from("id,count,png_bytes,lz76,class\n");
    for r in &rows {
        writeln!(scatter, "{},{},{},{},{}", r.id, r.count, r.png_bytes, r.lz76, r.class).unwrap();
    }
    write_file(&a.out.join("scatter.csv"), scatter)?;
    if let Some(h) = histogram {
        write_file(&a.out.join("histogram.csv"), h)?;
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.count as f64, r.lz76)).collect();
    let corr = correlation(&points).map_err(|_| CliError::Input("correlation: ≥ 2 points required".into()))?;
    let mut text = String::new();
    writeln!(text, "points: {}", corr.n_points).unwrap();
    writeln!(text, "pearson_r(count, lz76): {:.6}", corr.pearson_r).unwrap();
    if corr.degenerate {
        writeln!(text, "degenerate: one variable is constant").unwrap();
    }
    for m in &mismatches {
        writeln!(text, "join mismatch: {m}").unwrap();
    }
    write_file(&a.out.join("summary.txt"), text)?;
    std::io::stdout().write_all(format!("pearson r = {:.4} over {} points\n", corr.pearson_r, corr.n_points).as_bytes()).ok();
    Ok(())
}
