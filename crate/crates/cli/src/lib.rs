//! Command-line surface: validate, decide, report, bench, simulate.
//!
//! Exit codes: 0 success, 1 no feasible configuration, 2 validation or
//! usage error, 3 IO error.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use adaptauth::decision::{rank_cmp, DEFAULT_TOLERANCE, DEFAULT_TOP_K};
use adaptauth::model::{has_errors, RootCategory};
use adaptauth::runtime::{log_to_csv, log_to_jsonl};
use adaptauth::{
    assess, decide, enumerate_configs, parse_context, parse_model, parse_scenario_stream, validate_model,
    AuthConfiguration, ContextState, DecideOptions, DecisionError, DecisionResult, Engine, ModelSpec, ParseError,
};
use clap::builder::TypedValueParser;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod report;

use report::{build_report, write_report_csv};

#[derive(Parser, Debug)]
#[command(name = "adaptauth", version, about = "Context-aware authentication method selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a model document and print its diagnostics.
    Validate { model: PathBuf },
    /// Rank the feasible configurations for one context.
    Decide {
        model: PathBuf,
        context: PathBuf,
        #[arg(long, value_enum, default_value_t = EngineArg::Exhaustive)]
        engine: EngineArg,
        #[arg(long = "top", default_value_t = DEFAULT_TOP_K, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
        top_k: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Per-goal satisfaction, risk and utility of a comparison set of
    /// credential choices across every `*.ctx.json` in a directory (CSV).
    Report {
        model: PathBuf,
        scenarios_dir: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Credential tuple such as `PlateLicense+Fingerprint`; repeatable.
        /// Defaults to the model's `meta.comparison`.
        #[arg(long = "compare")]
        compare: Vec<String>,
    },
    /// Time repeated decisions with both engines.
    Bench {
        model: PathBuf,
        context: PathBuf,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
        runs: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Replay a JSONL scenario stream through the decision loop.
    Simulate {
        model: PathBuf,
        stream: PathBuf,
        /// Starting context; all factors inactive when omitted.
        #[arg(long)]
        initial: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = EngineArg::Exhaustive)]
        engine: EngineArg,
        #[arg(long, value_enum, default_value_t = LogFormat::Jsonl)]
        format: LogFormat,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum EngineArg {
    Exhaustive,
    Search,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Exhaustive => Engine::Exhaustive,
            EngineArg::Search => Engine::Search,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum LogFormat {
    Jsonl,
    Csv,
}

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: std::io::Error },
    Parse { path: PathBuf, source: ParseError },
    Usage(String),
    Decision(DecisionError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Decision(DecisionError::ConfigSpaceEmpty) => 1,
            CliError::Decision(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Parse { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Decision(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<ModelSpec> {
    parse_model(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_context(path: &Path, model: &ModelSpec) -> Result<ContextState> {
    parse_context(&read(path)?, model).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(path: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: PathBuf::from(path),
        source,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { model } => cmd_validate(&model, out),
        Command::Decide {
            model,
            context,
            engine,
            top_k,
            format,
            tolerance,
        } => {
            let opts = DecideOptions {
                engine: engine.into(),
                top_k,
                tolerance,
            };
            cmd_decide(&model, &context, &opts, format, out)
        }
        Command::Report {
            model,
            scenarios_dir,
            out: out_path,
            compare,
        } => cmd_report(&model, &scenarios_dir, out_path.as_deref(), &compare, out),
        Command::Bench {
            model,
            context,
            runs,
            format,
        } => cmd_bench(&model, &context, runs, format, out),
        Command::Simulate {
            model,
            stream,
            initial,
            engine,
            format,
        } => cmd_simulate(&model, &stream, initial.as_deref(), engine.into(), format, out, err),
    }
}

pub fn cmd_validate(model_path: &Path, out: &mut dyn Write) -> Result<i32> {
    let bytes = read(model_path)?;
    // Schema-level failures surface as errors; otherwise list every diagnostic.
    match parse_model(&bytes) {
        Ok(model) => {
            let diags = validate_model(&model);
            for d in &diags {
                writeln!(out, "{d}").map_err(io_err("stdout"))?;
            }
            writeln!(
                out,
                "{}: ok ({} goals, {} context factors, {} attacks, {} features, {} edges)",
                model_path.display(),
                model.goals.len(),
                model.context_factors.len(),
                model.attacks.len(),
                model.features.len(),
                model.edges.len()
            )
            .map_err(io_err("stdout"))?;
            Ok(if has_errors(&diags) { 2 } else { 0 })
        }
        Err(ParseError::Semantic(diags)) => {
            for d in &diags {
                writeln!(out, "{d}").map_err(io_err("stdout"))?;
            }
            Ok(2)
        }
        Err(source) => Err(CliError::Parse {
            path: model_path.to_path_buf(),
            source,
        }),
    }
}

#[derive(Serialize)]
struct RankedRow<'a> {
    rank: usize,
    credentials: String,
    configuration: String,
    two_factor: bool,
    utility: f64,
    security: f64,
    usability: f64,
    performance: f64,
    total_risk: f64,
    satisfactions: &'a std::collections::BTreeMap<String, f64>,
    priorities: &'a std::collections::BTreeMap<String, f64>,
    likelihoods: &'a std::collections::BTreeMap<String, f64>,
    partial_risks: &'a std::collections::BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct DecisionJson<'a> {
    engine: &'static str,
    chosen: String,
    configs_evaluated: usize,
    iterations: usize,
    elapsed_ms: f64,
    ranked: Vec<RankedRow<'a>>,
}

fn ranked_rows(result: &DecisionResult) -> Vec<RankedRow<'_>> {
    result
        .ranked
        .iter()
        .enumerate()
        .map(|(i, (c, a))| RankedRow {
            rank: i + 1,
            credentials: c.credential_label(),
            configuration: c.to_string(),
            two_factor: c.two_factor(),
            utility: a.utility,
            security: a.security,
            usability: a.usability,
            performance: a.performance,
            total_risk: a.risk.total_risk,
            satisfactions: &a.goal.satisfactions,
            priorities: &a.goal.priorities,
            likelihoods: &a.risk.likelihoods,
            partial_risks: &a.risk.partial_risks,
        })
        .collect()
}

pub fn write_decision(result: &DecisionResult, format: Format, out: &mut dyn Write) -> Result<()> {
    let w = io_err("stdout");
    match format {
        Format::Table => {
            writeln!(
                out,
                "engine: {}  evaluated: {}  iterations: {}  elapsed: {:.3} ms",
                result.engine.as_str(),
                result.stats.configs_evaluated,
                result.stats.iterations,
                result.stats.elapsed.as_secs_f64() * 1e3
            )
            .map_err(&w)?;
            writeln!(
                out,
                "{:>4}  {:>7}  {:>8}  {:>9}  {:>11}  {:>10}  configuration",
                "rank", "utility", "security", "usability", "performance", "total_risk"
            )
            .map_err(&w)?;
            for r in ranked_rows(result) {
                writeln!(
                    out,
                    "{:>4}  {:>7.4}  {:>8.4}  {:>9.4}  {:>11.4}  {:>10.4}  {}",
                    r.rank, r.utility, r.security, r.usability, r.performance, r.total_risk, r.configuration
                )
                .map_err(&w)?;
            }
        }
        Format::Csv => {
            let mut csv = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            let to_usage = |e: csv::Error| CliError::Usage(e.to_string());
            csv.write_record([
                "rank",
                "credentials",
                "configuration",
                "utility",
                "security",
                "usability",
                "performance",
                "total_risk",
            ])
            .map_err(to_usage)?;
            for r in ranked_rows(result) {
                csv.write_record([
                    r.rank.to_string(),
                    r.credentials,
                    r.configuration,
                    format!("{:.4}", r.utility),
                    format!("{:.4}", r.security),
                    format!("{:.4}", r.usability),
                    format!("{:.4}", r.performance),
                    format!("{:.4}", r.total_risk),
                ])
                .map_err(to_usage)?;
            }
            let bytes = csv.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            out.write_all(&bytes).map_err(&w)?;
        }
        Format::Json => {
            let doc = DecisionJson {
                engine: result.engine.as_str(),
                chosen: result.chosen.to_string(),
                configs_evaluated: result.stats.configs_evaluated,
                iterations: result.stats.iterations,
                elapsed_ms: result.stats.elapsed.as_secs_f64() * 1e3,
                ranked: ranked_rows(result),
            };
            let s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(out, "{s}").map_err(&w)?;
        }
    }
    Ok(())
}

pub fn cmd_decide(
    model_path: &Path,
    context_path: &Path,
    opts: &DecideOptions,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32> {
    let model = load_model(model_path)?;
    let ctx = load_context(context_path, &model)?;
    let result = decide(&model, &ctx, opts).map_err(CliError::Decision)?;
    write_decision(&result, format, out)?;
    Ok(0)
}

/// Scenario context files (`*.ctx.json`) in a directory, sorted by name.
pub fn scenario_files(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = std::fs::read_dir(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if let Some(stem) = name.strip_suffix(".ctx.json") {
            files.push((stem.to_string(), entry.path()));
        }
    }
    files.sort();
    Ok(files)
}

pub fn cmd_report(
    model_path: &Path,
    scenarios_dir: &Path,
    out_path: Option<&Path>,
    compare: &[String],
    out: &mut dyn Write,
) -> Result<i32> {
    let model = load_model(model_path)?;
    let scenarios = scenario_files(scenarios_dir)?;
    if scenarios.is_empty() {
        return Err(CliError::Usage(format!(
            "no *.ctx.json scenarios in {}",
            scenarios_dir.display()
        )));
    }
    let mut contexts = Vec::new();
    for (name, path) in &scenarios {
        contexts.push((name.clone(), load_context(path, &model)?));
    }
    let comparison: Vec<Vec<String>> = if compare.is_empty() {
        model.comparison.clone()
    } else {
        compare
            .iter()
            .map(|c| c.split('+').map(|s| s.trim().to_string()).collect())
            .collect()
    };
    if comparison.is_empty() {
        return Err(CliError::Usage(
            "no comparison set: pass --compare or set meta.comparison in the model".into(),
        ));
    }
    for tuple in &comparison {
        if let Some(bad) = tuple.iter().find(|id| !model.feature(id).is_some_and(|f| f.is_credential())) {
            return Err(CliError::Usage(format!("`{bad}` is not a credential feature")));
        }
    }

    let rows = build_report(&model, &contexts, &comparison);
    let bytes = write_report_csv(&model, &rows).map_err(|e| CliError::Usage(e.to_string()))?;
    match out_path {
        Some(p) => std::fs::write(p, &bytes).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        })?,
        None => out.write_all(&bytes).map_err(io_err("stdout"))?,
    }
    Ok(0)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchStats {
    pub engine: &'static str,
    pub runs: usize,
    pub time_min_ms: f64,
    pub time_avg_ms: f64,
    pub time_max_ms: f64,
    /// Resident-set high-water mark of the process after the runs, when the
    /// platform reports one.
    pub peak_memory_mb: Option<f64>,
    pub configs_evaluated: usize,
    pub chosen: String,
}

fn peak_memory_mb() -> Option<f64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

/// Times `runs` decisions per engine.
pub fn bench(model: &ModelSpec, ctx: &ContextState, runs: usize) -> std::result::Result<Vec<BenchStats>, DecisionError> {
    let mut out = Vec::new();
    for engine in [Engine::Exhaustive, Engine::Search] {
        let opts = DecideOptions {
            engine,
            ..DecideOptions::default()
        };
        let mut times = Vec::with_capacity(runs);
        let mut last = None;
        for _ in 0..runs {
            let t = Instant::now();
            let r = decide(model, ctx, &opts)?;
            times.push(t.elapsed().as_secs_f64() * 1e3);
            last = Some(r);
        }
        let last = last.expect("runs >= 1");
        let min = times.iter().copied().fold(f64::INFINITY, f64::min);
        let max = times.iter().copied().fold(0.0, f64::max);
        let avg = times.iter().sum::<f64>() / times.len() as f64;
        out.push(BenchStats {
            engine: engine.as_str(),
            runs,
            time_min_ms: min,
            // Summation rounding can push the mean an ulp outside [min, max].
            time_avg_ms: avg.clamp(min, max),
            time_max_ms: max,
            peak_memory_mb: peak_memory_mb(),
            configs_evaluated: last.stats.configs_evaluated,
            chosen: last.chosen.credential_label(),
        });
    }
    Ok(out)
}

pub fn cmd_bench(model_path: &Path, context_path: &Path, runs: usize, format: Format, out: &mut dyn Write) -> Result<i32> {
    if runs == 0 {
        return Err(CliError::Usage("runs must be at least 1".into()));
    }
    let model = load_model(model_path)?;
    let ctx = load_context(context_path, &model)?;
    let stats = bench(&model, &ctx, runs).map_err(CliError::Decision)?;
    let w = io_err("stdout");
    match format {
        Format::Table => {
            writeln!(
                out,
                "{:<10}  {:>5}  {:>11}  {:>11}  {:>11}  {:>11}  {:>9}  chosen",
                "engine", "runs", "time_min_ms", "time_avg_ms", "time_max_ms", "peak_mem_mb", "evaluated"
            )
            .map_err(&w)?;
            for s in &stats {
                let mem = s.peak_memory_mb.map(|m| format!("{m:.2}")).unwrap_or_else(|| "n/a".into());
                writeln!(
                    out,
                    "{:<10}  {:>5}  {:>11.3}  {:>11.3}  {:>11.3}  {:>11}  {:>9}  {}",
                    s.engine, s.runs, s.time_min_ms, s.time_avg_ms, s.time_max_ms, mem, s.configs_evaluated, s.chosen
                )
                .map_err(&w)?;
            }
        }
        Format::Csv => {
            writeln!(
                out,
                "engine,runs,time_min_ms,time_avg_ms,time_max_ms,peak_memory_mb,configs_evaluated,chosen"
            )
            .map_err(&w)?;
            for s in &stats {
                let mem = s.peak_memory_mb.map(|m| format!("{m:.2}")).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{:.3},{:.3},{:.3},{},{},{}",
                    s.engine, s.runs, s.time_min_ms, s.time_avg_ms, s.time_max_ms, mem, s.configs_evaluated, s.chosen
                )
                .map_err(&w)?;
            }
        }
        Format::Json => {
            let s = serde_json::to_string_pretty(&stats).map_err(|e| CliError::Usage(e.to_string()))?;
            writeln!(out, "{s}").map_err(&w)?;
        }
    }
    Ok(0)
}

pub fn cmd_simulate(
    model_path: &Path,
    stream_path: &Path,
    initial: Option<&Path>,
    engine: Engine,
    format: LogFormat,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let model = load_model(model_path)?;
    let stream = parse_scenario_stream(&read(stream_path)?, &model).map_err(|source| CliError::Parse {
        path: stream_path.to_path_buf(),
        source,
    })?;
    let ctx = match initial {
        Some(p) => load_context(p, &model)?,
        None => ContextState::inactive(&model),
    };
    let opts = DecideOptions {
        engine,
        ..DecideOptions::default()
    };
    let log = adaptauth::runtime::run(&model, ctx, &stream, opts);
    let text = match format {
        LogFormat::Jsonl => log_to_jsonl(&log),
        LogFormat::Csv => log_to_csv(&log),
    };
    out.write_all(text.as_bytes()).map_err(io_err("stdout"))?;
    if log.iter().any(|e| e.error.is_some()) {
        let _ = writeln!(err, "warning: some events left no feasible configuration");
    }
    Ok(0)
}

/// Best configuration using exactly `credentials` under `ctx`, if feasible.
pub fn best_with_credentials(
    model: &ModelSpec,
    ctx: &ContextState,
    credentials: &[String],
) -> Option<(AuthConfiguration, adaptauth::Assessment)> {
    let mut wanted = credentials.to_vec();
    wanted.sort();
    let configs = enumerate_configs(ctx, model).ok()?;
    configs
        .into_iter()
        .filter(|c| c.credentials == wanted)
        .filter_map(|c| assess(model, ctx, &c).ok().map(|a| (c, a)))
        .min_by(|a, b| rank_cmp((&a.0, &a.1), (&b.0, &b.1)))
}

pub(crate) fn root_values(a: &adaptauth::Assessment) -> [(RootCategory, f64); 3] {
    [
        (RootCategory::Security, a.security),
        (RootCategory::Usability, a.usability),
        (RootCategory::Performance, a.performance),
    ]
}
