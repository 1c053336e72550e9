//! Command-line front end.
//!
//! `prc-bounds run` computes bounds over a rate grid and writes CSV or JSON;
//! `prc-bounds cache-inspect` lists cached matrices. A run can also be
//! described by a flat `key = value` file (`--config`), with command-line
//! flags taking precedence over file entries.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::baa;
use crate::bounds::reference::{compare, load_reference_csv, Comparison};
use crate::bounds::{sweep, BlockSpec, BoundKind, BoundReport, SolverOptions, SweepRequest, SweepResult};
use crate::channel::cache::{inspect, CacheEntry, MatrixCache};
use crate::channel::DEFAULT_MEMORY_BUDGET;
use crate::error::{Error, Result};

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "PRC_CACHE_DIR";
const DEFAULT_CACHE_DIR: &str = "prc-cache";

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 16] = [
    "lambda",
    "L",
    "Rbar",
    "Rm",
    "bound_kind",
    "Ps",
    "P_B1",
    "f_lo",
    "f_hi",
    "value",
    "value_clamped",
    "H_S",
    "H_V",
    "converged",
    "cached",
    "wall_s",
];

/// Exit status: every point succeeded.
pub const EXIT_OK: i32 = 0;
/// Exit status: bad configuration.
pub const EXIT_CONFIG: i32 = 1;
/// Exit status: some points failed (failures are in the output).
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "prc-bounds", version, about = "Capacity bounds for the Poisson-repeat channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute bounds over a grid of rates.
    Run(RunArgs),
    /// List cached transition matrices.
    CacheInspect {
        #[arg(long, env = CACHE_DIR_ENV, default_value = DEFAULT_CACHE_DIR)]
        cache_dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` file; keys are the long flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated rates.
    #[arg(long, conflicts_with = "lambda_range")]
    pub lambda: Option<String>,
    /// Inclusive range `start:stop:step`.
    #[arg(long)]
    pub lambda_range: Option<String>,
    /// Block spec `L,Rm` or `L,Rbar,Rm`; repeatable.
    #[arg(long = "spec")]
    pub specs: Vec<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Subset of upper9,upper15,lower23.
    #[arg(long)]
    pub bounds: Option<String>,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Disable the on-disk matrix cache.
    #[arg(long)]
    pub no_cache: bool,
    /// Per-matrix memory budget, e.g. `8G`, `512M` or plain bytes.
    #[arg(long)]
    pub mem_budget: Option<String>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// CSV with columns lambda,value,source for comparison.
    #[arg(long)]
    pub reference_csv: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub lambda_grid: Vec<f64>,
    pub specs: Vec<BlockSpec>,
    pub epsilon: f64,
    pub bounds: Vec<BoundKind>,
    pub cache_dir: Option<PathBuf>,
    pub memory_budget: u64,
    pub parallelism: usize,
    pub max_iters: usize,
    pub reference_csv: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Parses `8G`, `8GiB`, `512M`, `64k` or plain bytes (binary multiples).
pub fn parse_memory(s: &str) -> Result<u64> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let stripped = lower
        .strip_suffix("ib")
        .or_else(|| lower.strip_suffix('b'))
        .unwrap_or(&lower);
    let (digits, shift) = match stripped.chars().last() {
        Some('k') => (&stripped[..stripped.len() - 1], 10),
        Some('m') => (&stripped[..stripped.len() - 1], 20),
        Some('g') => (&stripped[..stripped.len() - 1], 30),
        Some('t') => (&stripped[..stripped.len() - 1], 40),
        _ => (stripped, 0),
    };
    let n: u64 = digits
        .trim()
        .parse()
        .map_err(|_| config_err(format!("bad memory size {s:?}")))?;
    n.checked_shl(shift)
        .filter(|v| v >> shift == n)
        .ok_or_else(|| config_err(format!("memory size {s:?} overflows")))
}

/// Rounds to 12 significant digits so grid points print cleanly.
fn round12(x: f64) -> f64 {
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn parse_lambda_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| config_err(format!("bad rate {p:?}")))
        })
        .collect()
}

/// Inclusive `start:stop:step` grid.
pub fn parse_lambda_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| config_err(format!("bad range {s:?}")))?;
    let [start, stop, step] = parts[..] else {
        return Err(config_err(format!("range {s:?} must be start:stop:step")));
    };
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(config_err(format!("range {s:?} is empty or has a nonpositive step")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| round12(start + k as f64 * step)).collect())
}

/// `key = value` pairs, in file order; `#` starts a comment.
fn parse_config_file(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            config_err(format!("{}:{}: expected key = value", path.display(), n + 1))
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl RunConfig {
    /// Merges the optional config file with the flags (flags win).
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let mut lambda = None;
        let mut lambda_range = None;
        let mut specs: Vec<String> = Vec::new();
        let mut epsilon = None;
        let mut bounds = None;
        let mut cache_dir = None;
        let mut no_cache = false;
        let mut mem_budget = None;
        let mut jobs = None;
        let mut max_iters = None;
        let mut reference_csv = None;
        let mut out = None;
        let mut format = None;

        if let Some(path) = &args.config {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            for (k, v) in parse_config_file(&text, path)? {
                let num = |v: &str| -> Result<usize> {
                    v.parse().map_err(|_| config_err(format!("{k}: bad integer {v:?}")))
                };
                match k.as_str() {
                    "lambda" => lambda = Some(v),
                    "lambda-range" => lambda_range = Some(v),
                    "spec" => specs.push(v),
                    "epsilon" => {
                        epsilon = Some(v.parse::<f64>().map_err(|_| config_err(format!("epsilon: bad number {v:?}")))?)
                    }
                    "bounds" => bounds = Some(v),
                    "cache-dir" => cache_dir = Some(PathBuf::from(v)),
                    "no-cache" => no_cache = matches!(v.as_str(), "true" | "1" | "yes"),
                    "mem-budget" => mem_budget = Some(v),
                    "jobs" => jobs = Some(num(&v)?),
                    "max-iters" => max_iters = Some(num(&v)?),
                    "reference-csv" => reference_csv = Some(PathBuf::from(v)),
                    "out" => out = Some(PathBuf::from(v)),
                    "format" => {
                        format = Some(Format::from_str(&v, true).map_err(|_| config_err(format!("format: unknown {v:?}")))?)
                    }
                    other => return Err(config_err(format!("unknown config key {other:?}"))),
                }
            }
        }

        if args.lambda.is_some() || args.lambda_range.is_some() {
            lambda = args.lambda.clone();
            lambda_range = args.lambda_range.clone();
        }
        if !args.specs.is_empty() {
            specs = args.specs.clone();
        }
        epsilon = args.epsilon.or(epsilon);
        bounds = args.bounds.clone().or(bounds);
        cache_dir = args.cache_dir.clone().or(cache_dir);
        no_cache |= args.no_cache;
        mem_budget = args.mem_budget.clone().or(mem_budget);
        jobs = args.jobs.or(jobs);
        max_iters = args.max_iters.or(max_iters);
        reference_csv = args.reference_csv.clone().or(reference_csv);
        out = args.out.clone().or(out);
        format = args.format.or(format);

        let lambda_grid = match (lambda, lambda_range) {
            (Some(_), Some(_)) => return Err(config_err("give either lambda or lambda-range, not both")),
            (Some(l), None) => parse_lambda_list(&l)?,
            (None, Some(r)) => parse_lambda_range(&r)?,
            (None, None) => return Err(config_err("no rates given (lambda or lambda-range)")),
        };
        if lambda_grid.is_empty() {
            return Err(config_err("rate grid is empty"));
        }
        if let Some(bad) = lambda_grid.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(config_err(format!("rates must be finite and nonnegative, got {bad}")));
        }
        if specs.is_empty() {
            return Err(config_err("no block spec given (spec = L,Rbar,Rm)"));
        }
        let specs = specs
            .iter()
            .map(|s| s.parse::<BlockSpec>())
            .collect::<Result<Vec<_>>>()?;
        let epsilon = epsilon.unwrap_or(baa::DEFAULT_EPSILON);
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(config_err(format!("epsilon must be positive, got {epsilon}")));
        }
        let bounds = match bounds {
            Some(b) => b
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(str::parse)
                .collect::<Result<Vec<BoundKind>>>()?,
            None => vec![BoundKind::LengthUpper, BoundKind::CappedUpper],
        };
        if bounds.is_empty() {
            return Err(config_err("no bound kinds selected"));
        }
        let cache_dir = if no_cache {
            None
        } else {
            Some(cache_dir.unwrap_or_else(|| {
                std::env::var_os(CACHE_DIR_ENV)
                    .map(PathBuf::from)
                    .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR))
            }))
        };
        let memory_budget = match mem_budget {
            Some(m) => parse_memory(&m)?,
            None => DEFAULT_MEMORY_BUDGET,
        };
        let parallelism = jobs.unwrap_or(1);
        if parallelism == 0 {
            return Err(config_err("jobs must be positive"));
        }
        Ok(RunConfig {
            lambda_grid,
            specs,
            epsilon,
            bounds,
            cache_dir,
            memory_budget,
            parallelism,
            max_iters: max_iters.unwrap_or(baa::DEFAULT_MAX_ITERS),
            reference_csv,
            output: out,
            format: format.unwrap_or(Format::Csv),
        })
    }
}


fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x}")
    }
}

/// One output line; CSV and JSON carry the same fields.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRow {
    pub lambda: f64,
    #[serde(rename = "L")]
    pub block_len: u32,
    #[serde(rename = "Rbar")]
    pub per_bit_cap: Option<u32>,
    #[serde(rename = "Rm")]
    pub max_output_len: u32,
    pub bound_kind: String,
    #[serde(rename = "Ps")]
    pub p_s: f64,
    #[serde(rename = "P_B1")]
    pub p_b1: f64,
    pub f_lo: f64,
    pub f_hi: f64,
    pub value: f64,
    pub value_clamped: f64,
    #[serde(rename = "H_S")]
    pub h_s: f64,
    #[serde(rename = "H_V")]
    pub h_v: f64,
    /// `true`, `false`, or `error` for failed points.
    pub converged: String,
    pub cached: bool,
    pub wall_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl OutputRow {
    fn from_report(r: &BoundReport, kind: &str) -> Self {
        Self {
            lambda: r.lambda,
            block_len: r.block.block_len,
            per_bit_cap: r.block.per_bit_cap,
            max_output_len: r.block.max_output_len,
            bound_kind: kind.to_string(),
            p_s: r.p_s,
            p_b1: r.p_b1,
            f_lo: r.f_lo,
            f_hi: r.f_hi,
            value: r.value,
            value_clamped: r.value_clamped,
            h_s: r.h_s,
            h_v: r.h_v,
            converged: match (&r.error, r.converged) {
                (Some(_), _) => "error".into(),
                (None, c) => c.to_string(),
            },
            cached: r.cached,
            wall_s: r.wall_time,
            error: r.error.clone(),
        }
    }

    fn csv_record(&self) -> [String; 16] {
        [
            num(self.lambda),
            self.block_len.to_string(),
            self.per_bit_cap.map(|c| c.to_string()).unwrap_or_default(),
            self.max_output_len.to_string(),
            self.bound_kind.clone(),
            num(self.p_s),
            num(self.p_b1),
            num(self.f_lo),
            num(self.f_hi),
            num(self.value),
            num(self.value_clamped),
            num(self.h_s),
            num(self.h_v),
            self.converged.clone(),
            self.cached.to_string(),
            format!("{:.3}", self.wall_s),
        ]
    }
}

/// Output rows in their final order: for each rate, its reports followed by
/// its envelope row.
pub fn output_rows(result: &SweepResult, grid: &[f64]) -> Vec<OutputRow> {
    let mut rows = Vec::new();
    let mut seen: Vec<u64> = Vec::new();
    for &lambda in grid {
        if seen.contains(&lambda.to_bits()) {
            continue;
        }
        seen.push(lambda.to_bits());
        let here = result
            .reports
            .iter()
            .filter(|r| r.lambda.to_bits() == lambda.to_bits());
        rows.extend(here.map(|r| OutputRow::from_report(r, r.kind.as_str())));
        if let Some(env) = result
            .envelope
            .iter()
            .find(|e| e.lambda.to_bits() == lambda.to_bits())
        {
            let best = result
                .reports
                .iter()
                .find(|r| {
                    r.lambda.to_bits() == lambda.to_bits() && r.block == env.block && r.kind == env.kind
                })
                .expect("envelope comes from a report");
            rows.push(OutputRow::from_report(best, "envelope"));
        }
    }
    rows
}

pub fn write_csv<W: std::io::Write>(rows: &[OutputRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::InvalidParameter(format!("csv output: {e}"));
    wtr.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        wtr.write_record(row.csv_record()).map_err(io)?;
    }
    wtr.flush()
        .map_err(|e| Error::InvalidParameter(format!("csv output: {e}")))
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    records: &'a [OutputRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<&'a [Comparison]>,
}

fn write_comparison_csv(path: &Path, cmp: &[Comparison]) -> Result<()> {
    let mut text = String::from("lambda,source,computed,reference,improvement_pct\n");
    for c in cmp {
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            num(c.lambda),
            c.source,
            num(c.computed),
            num(c.reference),
            num(c.improvement_pct)
        );
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Path of the comparison file written next to `out`.
pub fn comparison_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".compare.csv");
    out.with_file_name(name)
}

/// Outcome of [`run`].
#[derive(Debug)]
pub struct RunOutcome {
    pub result: SweepResult,
    pub comparison: Option<Vec<Comparison>>,
    pub exit_code: i32,
}

/// Executes a resolved configuration and writes its outputs.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let cache = match &config.cache_dir {
        Some(dir) => Some(MatrixCache::new(dir)?),
        None => None,
    };
    let references = match &config.reference_csv {
        Some(p) => Some(load_reference_csv(p)?),
        None => None,
    };
    let request = SweepRequest {
        grid: config.lambda_grid.clone(),
        blocks: config.specs.clone(),
        kinds: config.bounds.clone(),
        options: SolverOptions {
            epsilon: config.epsilon,
            max_iters: config.max_iters,
            memory_budget: config.memory_budget,
            ..SolverOptions::default()
        },
        jobs: config.parallelism,
        cache,
    };
    let result = sweep(&request)?;
    let rows = output_rows(&result, &config.lambda_grid);
    let comparison = references.map(|refs| compare(&result.envelope, &refs));

    let mut buf = Vec::new();
    match config.format {
        Format::Csv => write_csv(&rows, &mut buf)?,
        Format::Json => {
            let doc = JsonOutput {
                records: &rows,
                comparison: comparison.as_deref(),
            };
            serde_json::to_writer_pretty(&mut buf, &doc)
                .map_err(|e| Error::InvalidParameter(format!("json output: {e}")))?;
            buf.push(b'\n');
        }
    }
    match &config.output {
        Some(path) => {
            fs::write(path, &buf).map_err(|e| Error::io(path, e))?;
            if let (Some(cmp), Format::Csv) = (&comparison, config.format) {
                write_comparison_csv(&comparison_path(path), cmp)?;
            }
        }
        None => {
            std::io::stdout()
                .write_all(&buf)
                .map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    for r in result.reports.iter().filter(|r| !r.is_ok()) {
        eprintln!(
            "failed: lambda={} spec={} {}: {}",
            r.lambda,
            r.block,
            r.kind,
            r.error.as_deref().unwrap_or_default()
        );
    }
    if let Some(cmp) = &comparison {
        for c in cmp {
            eprintln!(
                "lambda={} {}: computed {:.6} vs reference {:.6} ({:+.2}% improvement)",
                c.lambda, c.source, c.computed, c.reference, c.improvement_pct
            );
        }
    }
    let exit_code = if result.all_ok() { EXIT_OK } else { EXIT_PARTIAL };
    Ok(RunOutcome {
        result,
        comparison,
        exit_code,
    })
}

/// Cache listing as printable lines, one per file.
pub fn cache_inspect(dir: &Path) -> Result<Vec<CacheEntry>> {
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        ));
    }
    inspect(dir)
}

pub fn format_listing(entries: &[CacheEntry]) -> String {
    let mut s = String::from("file\tlambda\tL\tRbar\tRm\tconditioned\tinputs\toutputs\tbytes\tvalid\n");
    for e in entries {
        let name = e.path.file_name().unwrap_or_default().to_string_lossy();
        match &e.header {
            Some(h) => {
                let _ = write!(
                    s,
                    "{name}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    h.spec.lambda,
                    h.spec.block_len,
                    h.spec.per_bit_cap.map(|c| c.to_string()).unwrap_or_else(|| "-".into()),
                    h.spec.max_output_len,
                    h.spec.conditioned,
                    h.num_inputs(),
                    h.output_count,
                    e.file_size,
                    e.valid
                );
            }
            None => {
                let _ = write!(s, "{name}\t-\t-\t-\t-\t-\t-\t-\t{}\t{}", e.file_size, e.valid);
            }
        }
        if let Some(p) = &e.problem {
            let _ = write!(s, "\t# {p}");
        }
        s.push('\n');
    }
    s
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match cli.command {
        Command::Run(args) => {
            let config = match RunConfig::resolve(&args) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_CONFIG;
                }
            };
            match run(&config) {
                Ok(outcome) => outcome.exit_code,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
            }
        }
        Command::CacheInspect { cache_dir } => match cache_inspect(&cache_dir) {
            Ok(entries) => {
                print!("{}", format_listing(&entries));
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_sizes() {
        assert_eq!(parse_memory("8G").unwrap(), 8 << 30);
        assert_eq!(parse_memory("8GiB").unwrap(), 8 << 30);
        assert_eq!(parse_memory("512m").unwrap(), 512 << 20);
        assert_eq!(parse_memory("1024").unwrap(), 1024);
        assert!(parse_memory("lots").is_err());
        assert!(parse_memory("99999999999T").is_err());
    }

    #[test]
    fn lambda_grids() {
        assert_eq!(parse_lambda_list("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert_eq!(parse_lambda_range("0.1:0.5:0.1").unwrap(), vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(parse_lambda_range("1:1:0.5").unwrap(), vec![1.0]);
        assert!(parse_lambda_range("1:0:0.5").is_err());
        assert!(parse_lambda_range("0:1:0").is_err());
        assert!(parse_lambda_range("0:1").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(
            &path,
            "# experiment\nlambda = 0.5, 1.0\nspec = 3,2,8\nspec = 2,6\nepsilon = 0.01\nbounds = upper15,lower23\njobs = 2\n",
        )
        .unwrap();
        let mut args = RunArgs {
            config: Some(path),
            no_cache: true,
            ..RunArgs::default()
        };
        let c = RunConfig::resolve(&args).unwrap();
        assert_eq!(c.lambda_grid, vec![0.5, 1.0]);
        assert_eq!(c.specs.len(), 2);
        assert_eq!(c.epsilon, 0.01);
        assert_eq!(c.parallelism, 2);
        assert_eq!(c.bounds, vec![BoundKind::CappedUpper, BoundKind::SideInfoLower]);
        assert_eq!(c.cache_dir, None);

        args.epsilon = Some(0.002);
        args.lambda_range = Some("0:1:0.5".into());
        args.specs = vec!["4,10".into()];
        let c = RunConfig::resolve(&args).unwrap();
        assert_eq!(c.epsilon, 0.002);
        assert_eq!(c.lambda_grid, vec![0.0, 0.5, 1.0]);
        assert_eq!(c.specs, vec![BlockSpec::new(4, None, 10)]);
    }

    #[test]
    fn invalid_configs() {
        let base = || RunArgs {
            lambda: Some("0.5".into()),
            specs: vec!["2,4".into()],
            no_cache: true,
            ..RunArgs::default()
        };
        assert!(RunConfig::resolve(&base()).is_ok());
        let mut a = base();
        a.lambda = Some("-1".into());
        assert!(RunConfig::resolve(&a).is_err());
        let mut a = base();
        a.epsilon = Some(0.0);
        assert!(RunConfig::resolve(&a).is_err());
        let mut a = base();
        a.specs.clear();
        assert!(RunConfig::resolve(&a).is_err());
        let mut a = base();
        a.bounds = Some("upper9,upper99".into());
        assert!(RunConfig::resolve(&a).is_err());
        let mut a = base();
        a.lambda = None;
        assert!(RunConfig::resolve(&a).is_err());
    }

    #[test]
    fn csv_header_is_stable() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "lambda,L,Rbar,Rm,bound_kind,Ps,P_B1,f_lo,f_hi,value,value_clamped,H_S,H_V,converged,cached,wall_s\n"
        );
    }

    #[test]
    fn comparison_file_name() {
        assert_eq!(
            comparison_path(Path::new("/tmp/out/fig.csv")),
            PathBuf::from("/tmp/out/fig.compare.csv")
        );
    }
}
