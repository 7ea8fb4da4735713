//! Command-line front end. [`run`] parses arguments, dispatches, and maps
//! outcomes to exit codes: 0 success, 1 a check failed (or nothing was
//! found), 2 usage or input errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{self, BoundConfig, BoundReport, GammaMode, Shape};
use crate::combnet::{self, classify, NetworkParams};
use crate::ffield::FieldSpec;
use crate::formats;
use crate::grassmann::{self, DEFAULT_NODE_LIMIT};
use crate::rankmetric::covering_code_from_lifted_mrd;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: PathBuf,
        source: formats::FormatError,
    },
    #[error(transparent)]
    Network(#[from] combnet::NetworkError),
    #[error(transparent)]
    Code(#[from] grassmann::CodeError),
    #[error(transparent)]
    RankMetric(#[from] crate::rankmetric::RankMetricError),
    #[error(transparent)]
    Field(#[from] crate::ffield::FieldError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(name = "gencomb", version, about = "Linear solutions and bounds for generalized combination networks")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a network as TRIVIAL, NONTRIVIAL or UNSOLVABLE
    Classify(NetArgs),
    /// Build the lifted-MRD covering code
    Construct(ConstructArgs),
    /// Check a code file or a solution file
    Verify(VerifyArgs),
    /// Random search for a (q,t)-linear solution
    Search(SearchArgs),
    /// Send messages through a solution and decode at every receiver
    Simulate(SimulateArgs),
    /// Smallest field size with a scalar solution
    Qs(AlphabetArgs),
    /// Smallest q^t with a vector solution
    Qv(AlphabetArgs),
    /// Evaluate bounds, optionally over a parameter sweep
    Bounds(BoundsArgs),
    /// Gap lower bounds as a function of r
    Gap(GapArgs),
    /// Exhaustive maximum covering code size
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NetArgs {
    /// JSON file with h, r, alpha, ell, epsilon (overrides the flags)
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub h: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub alpha: Option<usize>,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub eps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub delta: usize,
    #[arg(long)]
    pub alpha: usize,
    #[arg(long)]
    pub q: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct VerifyTarget {
    #[arg(long)]
    pub code: Option<PathBuf>,
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub target: VerifyTarget,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub solution: PathBuf,
    /// Message symbols, h*t comma-separated values (message-major)
    #[arg(long, value_delimiter = ',', conflicts_with = "rounds")]
    pub messages: Option<Vec<u32>>,
    /// Number of random message sets
    #[arg(long)]
    pub rounds: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AlphabetArgs {
    #[command(flatten)]
    pub net: NetArgs,
    /// Largest q (for qs) or q^t (for qv) to try
    #[arg(long, default_value_t = 16)]
    pub cap: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    pub node_limit: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GammaArg {
    Rounded,
    Exact,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub h: u64,
    #[arg(long)]
    pub ell: u64,
    #[arg(long, default_value_t = 0)]
    pub eps: u64,
    #[arg(long)]
    pub alpha: u64,
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    #[arg(long, default_value_t = 1)]
    pub t: u64,
    #[arg(long, default_value_t = 1)]
    pub r: u64,
    /// `var=lo..hi` or `var=a,b,c` over h, ell, eps, alpha, q, t or r; repeatable
    #[arg(long)]
    pub sweep: Vec<String>,
    /// Only report bounds with these names
    #[arg(long = "bound")]
    pub bound: Vec<String>,
    #[arg(long, value_enum, default_value_t = GammaArg::Rounded)]
    pub gamma: GammaArg,
    /// Keep the +1 in the local-lemma bound
    #[arg(long)]
    pub plus_one: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub h: u64,
    #[arg(long)]
    pub ell: u64,
    #[arg(long, default_value_t = 0)]
    pub eps: u64,
    #[arg(long)]
    pub alpha: u64,
    #[arg(long, conflicts_with_all = ["r_range", "log2_r_range"])]
    pub r: Option<u64>,
    /// `lo..hi`, every integer r
    #[arg(long)]
    pub r_range: Option<String>,
    /// `lo..hi`, r = 2^k for each k
    #[arg(long, conflicts_with = "r_range")]
    pub log2_r_range: Option<String>,
    #[arg(long, value_enum, default_value_t = GammaArg::Rounded)]
    pub gamma: GammaArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub delta: usize,
    #[arg(long)]
    pub alpha: usize,
    #[arg(long)]
    pub q: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    pub node_limit: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Column-oriented table with a metadata header, written as CSV (metadata
/// as leading `#` lines) or as JSON `{meta, columns, rows}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub meta: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(meta: BTreeMap<String, String>, columns: &[&str]) -> Self {
        Self {
            meta,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

pub fn emit_table(table: &Table, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(table).expect("strings serialize") + "\n"),
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in &table.meta {
                out.push_str(&format!("# {k}: {v}\n"));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            out.push_str(&String::from_utf8(bytes).expect("csv of utf-8 is utf-8"));
            Ok(out)
        }
    }
}

/// Reads a CSV table written by [`emit_table`].
pub fn parse_csv_table(text: &str) -> Result<Table, CliError> {
    let mut meta = BTreeMap::new();
    let mut body = String::new();
    for line in text.lines() {
        match line.strip_prefix("# ") {
            Some(m) => {
                let (k, v) = m.split_once(": ").unwrap_or((m, ""));
                meta.insert(k.to_string(), v.to_string());
            }
            None => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<_, _>>()?;
    Ok(Table { meta, columns, rows })
}

fn base_meta(command: &str) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("tool".into(), format!("gencomb {VERSION}"));
    m.insert("command".into(), command.into());
    m
}

fn header_lines(meta: &BTreeMap<String, String>) -> Vec<String> {
    meta.iter().map(|(k, v)| format!("{k}: {v}")).collect()
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_output(out: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn format_err(path: &Path) -> impl FnOnce(formats::FormatError) -> CliError + '_ {
    move |source| CliError::Format {
        path: path.to_path_buf(),
        source,
    }
}

fn field(q: u64) -> Result<FieldSpec, CliError> {
    Ok(FieldSpec::from_order(q)?)
}

impl NetArgs {
    fn resolve(&self) -> Result<NetworkParams, CliError> {
        if let Some(path) = &self.params {
            return formats::parse_params_json(&read_file(path)?).map_err(format_err(path));
        }
        let missing = |name: &str| CliError::Usage(format!("--{name} is required without --params"));
        let p = NetworkParams::new(
            self.h.ok_or_else(|| missing("h"))?,
            self.r.ok_or_else(|| missing("r"))?,
            self.alpha.ok_or_else(|| missing("alpha"))?,
            self.ell.ok_or_else(|| missing("ell"))?,
            self.eps,
        )?;
        Ok(p)
    }
}

fn params_meta(meta: &mut BTreeMap<String, String>, p: &NetworkParams) {
    meta.insert("params".into(), formats::params_to_json(p));
}

/// Parses `lo..hi` (inclusive) or `a,b,c`.
pub fn parse_values(spec: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad range `{spec}`; use lo..hi or a,b,c"));
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        return Ok((lo..=hi).collect());
    }
    spec.split(',').map(|v| v.trim().parse().map_err(|_| bad())).collect()
}

const SWEEP_VARS: [&str; 7] = ["h", "ell", "eps", "alpha", "q", "t", "r"];

fn parse_sweep(spec: &str) -> Result<(usize, Vec<u64>), CliError> {
    let (var, values) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("bad sweep `{spec}`; use var=lo..hi")))?;
    let idx = SWEEP_VARS
        .iter()
        .position(|v| *v == var.trim())
        .ok_or_else(|| CliError::Usage(format!("cannot sweep `{var}`; choose one of {SWEEP_VARS:?}")))?;
    Ok((idx, parse_values(values)?))
}

fn bound_config(gamma: GammaArg, plus_one: bool) -> BoundConfig {
    BoundConfig {
        gamma: match gamma {
            GammaArg::Rounded => GammaMode::Rounded,
            GammaArg::Exact => GammaMode::Exact,
        },
        local_lemma_plus_one: plus_one,
    }
}

fn extras_string(report: &BoundReport) -> String {
    report
        .extras
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn bounds_table(args: &BoundsArgs) -> Result<Table, CliError> {
    let cfg = bound_config(args.gamma, args.plus_one);
    let mut meta = base_meta("bounds");
    meta.insert(
        "params".into(),
        format!(
            "h={} ell={} eps={} alpha={} q={} t={} r={}",
            args.h, args.ell, args.eps, args.alpha, args.q, args.t, args.r
        ),
    );
    meta.insert("gamma".into(), format!("{:?}", cfg.gamma).to_lowercase());
    meta.insert("plus_one".into(), cfg.local_lemma_plus_one.to_string());
    if !args.sweep.is_empty() {
        meta.insert("sweep".into(), args.sweep.join(" "));
    }

    // Cartesian product of sweeps, first sweep varying slowest.
    let mut points = vec![[args.h, args.ell, args.eps, args.alpha, args.q, args.t, args.r]];
    for spec in &args.sweep {
        let (idx, values) = parse_sweep(spec)?;
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut p = p;
                    p[idx] = v;
                    p
                })
            })
            .collect();
    }

    let mut table = Table::new(
        meta,
        &["h", "ell", "eps", "alpha", "q", "t", "r", "bound", "value", "exact", "valid", "assumptions", "extras"],
    );
    for p in points {
        let [h, ell, eps, alpha, q, t, r] = p;
        if h == 0 || ell == 0 || alpha < 2 || q < 2 || t == 0 {
            return Err(CliError::Usage(format!(
                "need h, ell, t >= 1, alpha >= 2, q >= 2 (got h={h} ell={ell} alpha={alpha} q={q} t={t})"
            )));
        }
        let shape = Shape::new(h, ell, eps, alpha);
        for report in bounds::all_bounds(&shape, q, t, r, &cfg) {
            if !args.bound.is_empty() && !args.bound.iter().any(|b| b == report.name) {
                continue;
            }
            let mut row: Vec<String> = p.iter().map(u64::to_string).collect();
            row.extend([
                report.name.to_string(),
                report.value.to_string(),
                report.value.exact_string(),
                report.valid.to_string(),
                report.assumptions_string(),
                extras_string(&report),
            ]);
            table.rows.push(row);
        }
    }
    Ok(table)
}

pub fn gap_table(args: &GapArgs) -> Result<Table, CliError> {
    let cfg = bound_config(args.gamma, false);
    let rs: Vec<u64> = match (&args.r, &args.r_range, &args.log2_r_range) {
        (Some(r), _, _) => vec![*r],
        (None, Some(range), _) => parse_values(range)?,
        (None, None, Some(range)) => parse_values(range)?
            .into_iter()
            .map(|k| {
                1u64.checked_shl(k as u32)
                    .filter(|_| k < 64)
                    .ok_or_else(|| CliError::Usage(format!("2^{k} does not fit in 64 bits")))
            })
            .collect::<Result<_, _>>()?,
        (None, None, None) => {
            return Err(CliError::Usage("one of --r, --r-range, --log2-r-range is required".into()))
        }
    };
    if args.h == 0 || args.ell == 0 || args.alpha < 2 {
        return Err(CliError::Usage("need h, ell >= 1 and alpha >= 2".into()));
    }
    let mut meta = base_meta("gap");
    meta.insert(
        "params".into(),
        format!("h={} ell={} eps={} alpha={}", args.h, args.ell, args.eps, args.alpha),
    );
    meta.insert("gamma".into(), format!("{:?}", cfg.gamma).to_lowercase());
    let mut table = Table::new(
        meta,
        &["r", "gap_search", "blocklength", "gap_search_valid", "gap_closed_form", "gap_closed_form_valid"],
    );
    let shape = Shape::new(args.h, args.ell, args.eps, args.alpha);
    for r in rs {
        let search = bounds::gap_lower_bound(&shape, r, &cfg);
        let closed = bounds::gap_lower_bound_closed_form(&shape, r, &cfg);
        let t = search
            .extras
            .first()
            .map(|(_, v)| v.to_string())
            .unwrap_or_default();
        table.rows.push(vec![
            r.to_string(),
            search.value.to_string(),
            t,
            search.valid.to_string(),
            closed.value.to_string(),
            closed.valid.to_string(),
        ]);
    }
    Ok(table)
}

fn cmd_classify(args: &NetArgs) -> Result<i32, CliError> {
    let p = args.resolve()?;
    let class = classify(&p);
    println!("{}", serde_json::to_string(&class).expect("enum serializes").trim_matches('"'));
    Ok(0)
}

fn cmd_construct(args: &ConstructArgs) -> Result<i32, CliError> {
    let f = field(args.q)?;
    let code = covering_code_from_lifted_mrd(&f, args.n, args.k, args.delta, args.alpha)?;
    let mut meta = base_meta("construct");
    meta.insert(
        "params".into(),
        format!("n={} k={} delta={} alpha={} q={}", args.n, args.k, args.delta, args.alpha, args.q),
    );
    meta.insert("modulus".into(), f.modulus_string());
    write_output(&args.out, &formats::write_code(&code, &header_lines(&meta)))?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    if let Some(path) = &args.target.code {
        let code = formats::parse_code(&read_file(path)?).map_err(format_err(path))?;
        let check = grassmann::is_covering_code(&code)?;
        match check.witness {
            None => println!("valid: {} codewords, every {} span >= {}", code.len(), code.alpha(), code.required_dim()),
            Some(w) if !check.covering => println!(
                "invalid: codewords {:?} span {} < {}",
                w.indices,
                w.achieved_dim,
                code.required_dim()
            ),
            Some(w) => println!(
                "valid: {} codewords, weakest set {:?} spans {}",
                code.len(),
                w.indices,
                w.achieved_dim
            ),
        }
        return Ok(if check.covering { 0 } else { 1 });
    }
    let path = args.target.solution.as_ref().expect("clap requires one target");
    let sol = formats::parse_solution(&read_file(path)?).map_err(format_err(path))?;
    let check = combnet::verify_solution(&sol)?;
    match &check.witness {
        None => println!("valid: every receiver reaches rank {}", sol.required_rank()),
        Some(rx) => println!("invalid: receiver {rx:?} has rank below {}", sol.required_rank()),
    }
    Ok(if check.valid { 0 } else { 1 })
}

fn cmd_search(args: &SearchArgs) -> Result<i32, CliError> {
    let p = args.net.resolve()?;
    let f = field(args.q)?;
    let outcome = combnet::random_solution_search(&p, &f, args.t, args.trials, args.seed)?;
    let mut meta = base_meta("search");
    params_meta(&mut meta, &p);
    meta.insert("q".into(), args.q.to_string());
    meta.insert("t".into(), args.t.to_string());
    meta.insert("trials".into(), args.trials.to_string());
    meta.insert("seed".into(), args.seed.to_string());
    match (&outcome.solution, outcome.trial) {
        (Some(sol), Some(trial)) => {
            meta.insert("found_at_trial".into(), trial.to_string());
            write_output(&args.out, &formats::write_solution(sol, &header_lines(&meta)))?;
            if args.out.output.is_some() {
                println!("found at trial {trial}");
            }
            Ok(0)
        }
        _ => {
            println!("no solution in {} trials (seed {})", args.trials, args.seed);
            Ok(1)
        }
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<i32, CliError> {
    let sol = formats::parse_solution(&read_file(&args.solution)?).map_err(format_err(&args.solution))?;
    let (h, t, q) = (sol.params().h, sol.t(), sol.field().q());
    let message_sets: Vec<Vec<Vec<u32>>> = match &args.messages {
        Some(flat) => {
            if flat.len() != h * t {
                return Err(CliError::Usage(format!("--messages needs {} values", h * t)));
            }
            vec![flat.chunks(t).map(<[u32]>::to_vec).collect()]
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            (0..args.rounds.unwrap_or(1))
                .map(|_| (0..h).map(|_| (0..t).map(|_| rng.random_range(0..q)).collect()).collect())
                .collect()
        }
    };
    let mut meta = base_meta("simulate");
    params_meta(&mut meta, sol.params());
    meta.insert("q".into(), q.to_string());
    meta.insert("t".into(), t.to_string());
    meta.insert("seed".into(), args.seed.to_string());
    let mut table = Table::new(meta, &["round", "receiver", "sent", "decoded", "ok"]);
    let mut all_ok = true;
    let show = |m: &[Vec<u32>]| {
        m.iter()
            .map(|v| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("|")
    };
    for (round, messages) in message_sets.iter().enumerate() {
        match combnet::simulate(&sol, messages) {
            Ok(outputs) => {
                for o in outputs {
                    let ok = &o.messages == messages;
                    all_ok &= ok;
                    table.rows.push(vec![
                        round.to_string(),
                        format!("{:?}", o.receiver),
                        show(messages),
                        show(&o.messages),
                        ok.to_string(),
                    ]);
                }
            }
            Err(combnet::NetworkError::Decode { receiver, source }) => {
                all_ok = false;
                table.rows.push(vec![
                    round.to_string(),
                    format!("{receiver:?}"),
                    show(messages),
                    format!("undecodable: {source}"),
                    "false".into(),
                ]);
            }
            Err(e) => return Err(e.into()),
        }
    }
    write_output(&args.out, &emit_table(&table, Format::Csv)?)?;
    Ok(if all_ok { 0 } else { 1 })
}

fn cmd_alphabet(args: &AlphabetArgs, vector: bool) -> Result<i32, CliError> {
    let p = args.net.resolve()?;
    let result = if vector {
        combnet::compute_qv(&p, args.cap, args.node_limit)?
    } else {
        combnet::compute_qs(&p, args.cap, args.node_limit)?
    };
    let mut meta = base_meta(if vector { "qv" } else { "qs" });
    params_meta(&mut meta, &p);
    meta.insert("cap".into(), args.cap.to_string());
    meta.insert("node_limit".into(), args.node_limit.to_string());
    let mut table = Table::new(meta, &["value", "q", "t", "exact", "trivial"]);
    let (q, t) = result
        .witness
        .map(|(q, t)| (q.to_string(), t.to_string()))
        .unwrap_or_default();
    table.rows.push(vec![
        result.value.map(|v| v.to_string()).unwrap_or_else(|| "NA".into()),
        q,
        t,
        result.exact.to_string(),
        result.trivial.to_string(),
    ]);
    print!("{}", emit_table(&table, Format::Csv)?);
    Ok(if result.value.is_some() { 0 } else { 1 })
}

fn cmd_oracle(args: &OracleArgs) -> Result<i32, CliError> {
    let f = field(args.q)?;
    let result = grassmann::max_covering_code_bruteforce(args.n, args.k, args.delta, args.alpha, &f, args.node_limit)?;
    let mut meta = base_meta("oracle");
    meta.insert(
        "params".into(),
        format!(
            "n={} k={} delta={} alpha={} q={} node_limit={}",
            args.n, args.k, args.delta, args.alpha, args.q, args.node_limit
        ),
    );
    let mut table = Table::new(meta.clone(), &["size", "exact", "nodes"]);
    table
        .rows
        .push(vec![result.size.to_string(), result.exact.to_string(), result.nodes.to_string()]);
    print!("{}", emit_table(&table, Format::Csv)?);
    if let Some(path) = &args.out.output {
        let text = formats::write_code(&result.code, &header_lines(&meta));
        fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(0)
}

fn dispatch(command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Classify(a) => cmd_classify(a),
        Command::Construct(a) => cmd_construct(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Search(a) => cmd_search(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Qs(a) => cmd_alphabet(a, false),
        Command::Qv(a) => cmd_alphabet(a, true),
        Command::Bounds(a) => {
            write_output(&a.out, &emit_table(&bounds_table(a)?, a.format)?)?;
            Ok(0)
        }
        Command::Gap(a) => {
            write_output(&a.out, &emit_table(&gap_table(a)?, a.format)?)?;
            Ok(0)
        }
        Command::Oracle(a) => cmd_oracle(a),
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let go = || match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    match cli.workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(go),
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        },
        None => go(),
    }
}
