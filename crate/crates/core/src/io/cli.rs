//! The `fairdiv` command line.
//!
//! Exit codes: 0 success, 1 file system error, 2 parse, validation or usage
//! error, 3 an oracle refuted a result, 4 a solver safety budget was exceeded.
//! Every failure also writes one JSON error object to stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use super::{
    generate, parse_allocation, parse_instance, serialize_instance, serialize_result, Family, InstanceFile, IoError,
    ResultFile, RunStats, SCHEMA_VERSION,
};
use crate::config::Caps;
use crate::model::rational::parse_fraction;
use crate::model::{Allocation, Instance, MarketOutcome, Rational, TraceLog};
use crate::oracles::{
    check_ef1, check_eq1, check_fpo_lp_capped, check_mbb_certificate, check_pef1, check_po_bruteforce_capped,
    Objective, Score, Verdict,
};
use crate::pls::{local_search, EpsilonScheme, PlsError};
use crate::solver::{solve_ef1_fpo, solve_eq1_fpo, SolverError};
use crate::structured::{achievable_utilities, solve_constant_n_ef1_po, solve_constant_nk, Route, StructuredError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "fairdiv",
    version,
    about = "Fair and Pareto-optimal allocation of indivisible goods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and write a result file.
    Solve(SolveArgs),
    /// Check an allocation against an instance with selected oracles.
    Check(CheckArgs),
    /// Generate instances.
    Gen(GenArgs),
    /// Solve a corpus and print a summary table.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fairness {
    Ef1,
    Eq1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Market,
    ConstantN,
    ConstantNk,
    Pls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckLevel {
    /// Certificate and fairness checks only.
    Cheap,
    /// Adds the exact fPO LP within the LP cap.
    Auto,
    /// Adds brute-force PO within the enumeration cap.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    /// Maximum Nash welfare.
    Mnw,
    Leximin,
    /// First allocation that is fair and fPO.
    Fair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleName {
    Ef1,
    Eq1,
    Pef1,
    FpoCertificate,
    FpoLp,
    PoBruteforce,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Instance file, or `-` for stdin.
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "ef1")]
    fairness: Fairness,
    #[arg(long, value_enum, default_value = "market")]
    method: Method,
    #[arg(long, value_enum, default_value = "fair")]
    objective: ObjectiveArg,
    /// Grid parameter for `pls`: `test`, `strict`, or a fraction `p/q`.
    #[arg(long, default_value = "test")]
    epsilon: String,
    #[arg(long, value_enum, default_value = "auto")]
    check: CheckLevel,
    /// Result file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the event trace of a market run here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    instance: PathBuf,
    allocation: PathBuf,
    /// Oracles to run; defaults to every applicable one within caps.
    #[arg(long, value_enum, value_delimiter = ',')]
    oracles: Vec<OracleName>,
    /// Slack for the pEF1 check.
    #[arg(long, default_value = "0")]
    epsilon: String,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// random, binary, kary(K), positive or identical.
    #[arg(long)]
    family: String,
    #[arg(long)]
    agents: usize,
    #[arg(long)]
    goods: usize,
    #[arg(long, default_value_t = 10)]
    vmax: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of instances; seeds run from `seed` upward.
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Single output file; stdout when neither this nor `--out-dir` is given.
    #[arg(long, conflicts_with = "out_dir")]
    out: Option<PathBuf>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Instance files or directories of `*.json` files.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// Directory for per-instance results and `summary.tsv`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "ef1")]
    fairness: Fairness,
    #[arg(long, value_enum, default_value = "market")]
    method: Method,
    #[arg(long, default_value = "test")]
    epsilon: String,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

/// A failure with its exit code and JSON rendering.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
    pub detail: serde_json::Value,
}

impl CliError {
    fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            kind,
            message: message.into(),
            detail: serde_json::Value::Null,
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        CliError::new(EXIT_USAGE, "usage", message)
    }

    fn file(path: &Path, err: std::io::Error) -> Self {
        let mut e = CliError::new(EXIT_IO, "io", format!("{}: {err}", path.display()));
        e.detail = json!({ "path": path.display().to_string() });
        e
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut obj = json!({
            "error": self.kind,
            "exitCode": self.code,
            "message": self.message,
        });
        if let serde_json::Value::Object(extra) = &self.detail {
            for (k, v) in extra {
                obj[k] = v.clone();
            }
        }
        obj
    }
}

impl From<IoError> for CliError {
    fn from(err: IoError) -> Self {
        let mut e = CliError::new(EXIT_USAGE, "parse", err.to_string());
        match &err {
            IoError::Parse(p) => {
                e.detail = json!({ "line": p.line, "column": p.column, "field": p.field });
            }
            IoError::Invalid(_) => e.kind = "validation",
            IoError::InvalidParams(_) => e.kind = "invalidParams",
        }
        e
    }
}

impl From<SolverError> for CliError {
    fn from(err: SolverError) -> Self {
        match err {
            SolverError::IterationBudgetExceeded { .. } => {
                CliError::new(EXIT_BUDGET, "budgetExceeded", err.to_string())
            }
            SolverError::NotPositiveInstance => CliError::usage(err.to_string()),
            SolverError::NoFiniteFactor { .. } => CliError::new(EXIT_REFUTED, "solverDefect", err.to_string()),
        }
    }
}

impl From<StructuredError> for CliError {
    fn from(err: StructuredError) -> Self {
        match err {
            StructuredError::CapExceeded { .. } => CliError::new(EXIT_BUDGET, "capExceeded", err.to_string()),
            StructuredError::NotFound => CliError::new(EXIT_REFUTED, "notFound", err.to_string()),
            StructuredError::DegeneracyUnresolved { .. } => {
                CliError::new(EXIT_BUDGET, "degeneracyUnresolved", err.to_string())
            }
        }
    }
}

impl From<PlsError> for CliError {
    fn from(err: PlsError) -> Self {
        match err {
            PlsError::Stalled { .. } => CliError::new(EXIT_REFUTED, "solverDefect", err.to_string()),
            _ => CliError::new(EXIT_BUDGET, "budgetExceeded", err.to_string()),
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return EXIT_OK;
            }
            let e = CliError::usage(err.to_string().trim_end());
            eprintln!("{}", e.to_json());
            return e.code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Check(args) => cmd_check(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.code
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| CliError::file(path, e))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::file(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::file(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `test`, `strict` or a fraction `p/q` into a grid scheme.
pub fn epsilon_scheme(instance: &Instance, text: &str) -> Result<EpsilonScheme, CliError> {
    match text {
        "test" => Ok(EpsilonScheme::test_mode(instance)),
        "strict" => Ok(EpsilonScheme::strict(instance)),
        other => {
            let eps = parse_fraction(other).map_err(|e| CliError::usage(format!("--epsilon: {e}")))?;
            if eps <= Rational::from_integer(0.into()) {
                return Err(CliError::usage("--epsilon must be positive"));
            }
            Ok(EpsilonScheme::with_epsilon(instance, eps))
        }
    }
}

/// Everything `solve` needs besides the instance.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub fairness: Fairness,
    pub method: Method,
    pub objective: ObjectiveArg,
    pub epsilon: String,
    pub check: CheckLevel,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            fairness: Fairness::Ef1,
            method: Method::Market,
            objective: ObjectiveArg::Fair,
            epsilon: "test".into(),
            check: CheckLevel::Auto,
        }
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Market => "market",
        Method::ConstantN => "constant-n",
        Method::ConstantNk => "constant-nk",
        Method::Pls => "pls",
    }
}

fn fairness_name(fairness: Fairness) -> &'static str {
    match fairness {
        Fairness::Ef1 => "ef1",
        Fairness::Eq1 => "eq1",
    }
}

/// Runs the chosen solver and every check the level allows. The result
/// carries prices only for market runs, whose prices are a certificate.
pub fn solve_instance(
    instance: &Instance,
    name: Option<String>,
    opts: &SolveOptions,
) -> Result<(ResultFile, Option<TraceLog>), CliError> {
    let caps = Caps::global();
    let start = Instant::now();
    let mut stats = RunStats::default();
    let mut checks = BTreeMap::new();
    let mut trace = None;
    let mut outcome: Option<MarketOutcome> = None;
    let allocation: Allocation = match (opts.method, opts.fairness) {
        (Method::Market, Fairness::Ef1) | (Method::Market, Fairness::Eq1) => {
            let run = match opts.fairness {
                Fairness::Ef1 => solve_ef1_fpo(instance)?,
                Fairness::Eq1 => solve_eq1_fpo(instance)?,
            };
            stats.transfers = run.trace.transfers() as u64;
            stats.price_rises = run.trace.price_rises() as u64;
            stats.event_bound = Some(run.event_bound);
            stats.utility_count = run.utility_counts.iter().copied().max();
            trace = Some(run.trace);
            outcome = Some(run.outcome.clone());
            run.outcome.allocation
        }
        (Method::ConstantN, Fairness::Ef1) => {
            let res = solve_constant_n_ef1_po(instance)?;
            stats.route = Some(
                match res.route {
                    Route::Market => "market",
                    Route::BruteForce => "bruteforce",
                }
                .into(),
            );
            if let Some(po) = res.po {
                checks.insert("po-bruteforce".to_string(), po);
            }
            res.allocation
        }
        (Method::ConstantN, Fairness::Eq1) => {
            return Err(CliError::usage("constant-n supports --fairness ef1 only"));
        }
        (Method::ConstantNk, fairness) => {
            let fair = |a: &Allocation| {
                let fair = match fairness {
                    Fairness::Ef1 => check_ef1(instance, a).holds(),
                    Fairness::Eq1 => check_eq1(instance, a).holds(),
                };
                fair && check_fpo_lp_capped(instance, a, caps.lp_variables).is_ok_and(|v| v.holds())
            };
            let objective = match opts.objective {
                ObjectiveArg::Mnw => Objective::MaxNash,
                ObjectiveArg::Leximin => Objective::Leximin,
                ObjectiveArg::Fair => Objective::Predicate(&fair),
            };
            let best = solve_constant_nk(instance, objective)?;
            stats.objective = Some(match best.score {
                Score::Nash(s) => format!("mnw:{}", s.product(instance.agents())),
                Score::Leximin(key) => format!("leximin:{key:?}"),
                Score::Satisfied => "fair".to_string(),
            });
            best.allocation
        }
        (Method::Pls, Fairness::Ef1) => {
            let scheme = epsilon_scheme(instance, &opts.epsilon)?;
            let res = local_search(instance, &scheme)?;
            stats.transfers = res.stats.transfers;
            stats.price_rises = res.stats.price_rises;
            stats.walk_steps = Some(res.stats.steps);
            res.configuration.allocation
        }
        (Method::Pls, Fairness::Eq1) => {
            return Err(CliError::usage("pls supports --fairness ef1 only"));
        }
    };

    let fairness_verdict = match opts.fairness {
        Fairness::Ef1 => check_ef1(instance, &allocation),
        Fairness::Eq1 => check_eq1(instance, &allocation),
    };
    checks.insert(fairness_name(opts.fairness).to_string(), fairness_verdict);
    if let Some(o) = &outcome {
        checks.insert("fpo-certificate".to_string(), check_mbb_certificate(instance, o));
        if opts.fairness == Fairness::Ef1 {
            checks.insert("pef1".to_string(), check_pef1(o, &Rational::from_integer(0.into())));
        }
    }
    run_efficiency_checks(instance, &allocation, opts.check, caps, &mut checks);

    stats.wall_time_ms = start.elapsed().as_millis() as u64;
    let mut result = ResultFile {
        schema_version: SCHEMA_VERSION,
        instance: name,
        fairness: fairness_name(opts.fairness).into(),
        method: method_name(opts.method).into(),
        bundles: allocation.bundles().to_vec(),
        prices: None,
        checks,
        stats,
    };
    if let Some(o) = &outcome {
        result.set_prices(&o.prices);
    }
    Ok((result, trace))
}

fn run_efficiency_checks(
    instance: &Instance,
    allocation: &Allocation,
    level: CheckLevel,
    caps: &Caps,
    checks: &mut BTreeMap<String, Verdict>,
) {
    if level == CheckLevel::Cheap {
        return;
    }
    if let Ok(v) = check_fpo_lp_capped(instance, allocation, caps.lp_variables) {
        checks.insert("fpo-lp".to_string(), v);
    }
    if level == CheckLevel::Full && !checks.contains_key("po-bruteforce") {
        if let Ok(v) = check_po_bruteforce_capped(instance, allocation, caps.enumeration) {
            checks.insert("po-bruteforce".to_string(), v);
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<i32, CliError> {
    let text = read_text(&args.instance)?;
    let (instance, file) = parse_instance(&text)?;
    if args.trace.is_some() && args.method != Method::Market {
        return Err(CliError::usage("--trace requires --method market"));
    }
    let opts = SolveOptions {
        fairness: args.fairness,
        method: args.method,
        objective: args.objective,
        epsilon: args.epsilon,
        check: args.check,
    };
    let name = file.name.clone().or_else(|| file_stem(&args.instance));
    let (result, trace) = solve_instance(&instance, name, &opts)?;
    if let (Some(path), Some(trace)) = (&args.trace, &trace) {
        let text = serde_json::to_string_pretty(trace).expect("trace serializes") + "\n";
        write_text(path, &text)?;
    }
    emit(args.out.as_deref(), &serialize_result(&result))?;
    Ok(if result.all_hold() { EXIT_OK } else { EXIT_REFUTED })
}

fn file_stem(path: &Path) -> Option<String> {
    if path.as_os_str() == "-" {
        return None;
    }
    path.file_stem().map(|s| s.to_string_lossy().into_owned())
}

#[derive(Debug, serde::Serialize)]
#[serde(rename_all = "camelCase")]
struct CheckReport {
    schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<String>,
    checks: BTreeMap<String, Verdict>,
    /// Oracles requested but skipped, with the reason.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    skipped: BTreeMap<String, String>,
}

fn cmd_check(args: CheckArgs) -> Result<i32, CliError> {
    let caps = Caps::global();
    let (instance, file) = parse_instance(&read_text(&args.instance)?)?;
    let (allocation, outcome) = parse_allocation(&read_text(&args.allocation)?, instance.goods())?;
    allocation.check_dimensions(&instance).map_err(IoError::from)?;
    let epsilon = parse_fraction(&args.epsilon).map_err(|e| CliError::usage(format!("--epsilon: {e}")))?;
    let explicit = !args.oracles.is_empty();
    let oracles = if explicit {
        args.oracles.clone()
    } else {
        vec![
            OracleName::Ef1,
            OracleName::Eq1,
            OracleName::Pef1,
            OracleName::FpoCertificate,
            OracleName::FpoLp,
            OracleName::PoBruteforce,
        ]
    };
    let mut checks = BTreeMap::new();
    let mut skipped = BTreeMap::new();
    for oracle in oracles {
        let (key, verdict) = match oracle {
            OracleName::Ef1 => ("ef1", Ok(check_ef1(&instance, &allocation))),
            OracleName::Eq1 => ("eq1", Ok(check_eq1(&instance, &allocation))),
            OracleName::Pef1 => (
                "pef1",
                outcome
                    .as_ref()
                    .map(|o| check_pef1(o, &epsilon))
                    .ok_or("no prices given".to_string()),
            ),
            OracleName::FpoCertificate => (
                "fpo-certificate",
                outcome
                    .as_ref()
                    .map(|o| check_mbb_certificate(&instance, o))
                    .ok_or("no prices given".to_string()),
            ),
            OracleName::FpoLp => (
                "fpo-lp",
                check_fpo_lp_capped(&instance, &allocation, caps.lp_variables).map_err(|e| e.to_string()),
            ),
            OracleName::PoBruteforce => (
                "po-bruteforce",
                check_po_bruteforce_capped(&instance, &allocation, caps.enumeration).map_err(|e| e.to_string()),
            ),
        };
        match verdict {
            Ok(v) => {
                checks.insert(key.to_string(), v);
            }
            Err(reason) if explicit => {
                let mut e = CliError::usage(format!("{key}: {reason}"));
                e.kind = "oracleUnavailable";
                return Err(e);
            }
            Err(reason) => {
                skipped.insert(key.to_string(), reason);
            }
        }
    }
    let all_hold = checks.values().all(Verdict::holds);
    let report = CheckReport {
        schema_version: SCHEMA_VERSION,
        instance: file.name.clone().or_else(|| file_stem(&args.instance)),
        checks,
        skipped,
    };
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    Ok(if all_hold { EXIT_OK } else { EXIT_REFUTED })
}

fn instance_name(family: Family, n: usize, m: usize, vmax: u64, seed: u64) -> String {
    let fam: String = family
        .to_string()
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect();
    format!("{fam}-n{n}-m{m}-v{vmax}-s{seed}")
}

fn cmd_gen(args: GenArgs) -> Result<i32, CliError> {
    let family: Family = args
        .family
        .parse()
        .map_err(|e: String| CliError::from(IoError::InvalidParams(e)))?;
    if args.count == 0 {
        return Err(CliError::usage("--count must be positive"));
    }
    if args.count > 1 && args.out_dir.is_none() {
        return Err(CliError::usage("--count above 1 requires --out-dir"));
    }
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))?;
    }
    for k in 0..args.count {
        let seed = args.seed.wrapping_add(k);
        let instance = generate(family, args.agents, args.goods, args.vmax, seed)?;
        let name = instance_name(family, args.agents, args.goods, args.vmax, seed);
        let mut file = InstanceFile::from_instance(&instance);
        file.name = Some(name.clone());
        file.family = Some(family.to_string());
        file.seed = Some(seed);
        let text = serialize_instance(&file);
        match &args.out_dir {
            Some(dir) => write_text(&dir.join(format!("{name}.json")), &text)?,
            None => emit(args.out.as_deref(), &text)?,
        }
    }
    Ok(EXIT_OK)
}

/// One line of the bench summary.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub name: String,
    pub agents: usize,
    pub goods: usize,
    pub vmax: u64,
    /// Largest per-agent count of achievable utilities, if enumerable.
    pub utilities: Option<usize>,
    pub events: u64,
    pub transfers: u64,
    pub price_rises: u64,
    /// `ok`, `refuted`, or the kind of error.
    pub status: String,
    pub code: i32,
}

pub const BENCH_HEADER: &str = "name\tn\tm\tvmax\tU\tevents\ttransfers\tpriceRises\tstatus";

impl BenchRow {
    pub fn to_tsv(&self) -> String {
        let u = self.utilities.map_or("-".to_string(), |u| u.to_string());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.name,
            self.agents,
            self.goods,
            self.vmax,
            u,
            self.events,
            self.transfers,
            self.price_rises,
            self.status
        )
    }
}

fn collect_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for path in paths {
        if path.is_dir() {
            let entries = fs::read_dir(path).map_err(|e| CliError::file(path, e))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json") && p.is_file())
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    Ok(files)
}

fn bench_one(path: &Path, opts: &SolveOptions, out_dir: Option<&Path>) -> BenchRow {
    let mut row = BenchRow {
        name: file_stem(path).unwrap_or_default(),
        agents: 0,
        goods: 0,
        vmax: 0,
        utilities: None,
        events: 0,
        transfers: 0,
        price_rises: 0,
        status: String::new(),
        code: EXIT_OK,
    };
    let parsed = read_text(path).and_then(|t| parse_instance(&t).map_err(CliError::from));
    let (instance, file) = match parsed {
        Ok(p) => p,
        Err(e) => {
            row.status = e.kind.to_string();
            row.code = e.code;
            return row;
        }
    };
    if let Some(name) = &file.name {
        row.name = name.clone();
    }
    row.agents = instance.agents();
    row.goods = instance.goods();
    row.vmax = instance.vmax();
    row.utilities = achievable_utilities(&instance, 1 << 20).ok().map(|t| t.max_count());
    match solve_instance(&instance, Some(row.name.clone()), opts) {
        Ok((result, _)) => {
            row.transfers = result.stats.transfers;
            row.price_rises = result.stats.price_rises;
            row.events = result.stats.walk_steps.unwrap_or(row.transfers + row.price_rises);
            let ok = result.all_hold();
            row.status = if ok { "ok" } else { "refuted" }.into();
            row.code = if ok { EXIT_OK } else { EXIT_REFUTED };
            if let Some(dir) = out_dir {
                if let Err(e) = write_text(
                    &dir.join(format!("{}.result.json", row.name)),
                    &serialize_result(&result),
                ) {
                    row.status = e.kind.to_string();
                    row.code = e.code;
                }
            }
        }
        Err(e) => {
            row.status = e.kind.to_string();
            row.code = e.code;
        }
    }
    row
}

/// Solves every input on a worker pool; rows come back sorted by name.
pub fn run_bench(
    files: &[PathBuf],
    opts: &SolveOptions,
    out_dir: Option<&Path>,
    jobs: usize,
) -> Result<Vec<BenchRow>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::new(EXIT_IO, "threadPool", e.to_string()))?;
    let mut rows: Vec<BenchRow> = pool.install(|| files.par_iter().map(|p| bench_one(p, opts, out_dir)).collect());
    rows.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(rows)
}

fn cmd_bench(args: BenchArgs) -> Result<i32, CliError> {
    let files = collect_inputs(&args.paths)?;
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))?;
    }
    let opts = SolveOptions {
        fairness: args.fairness,
        method: args.method,
        objective: ObjectiveArg::Fair,
        epsilon: args.epsilon,
        check: CheckLevel::Full,
    };
    let rows = run_bench(&files, &opts, args.out_dir.as_deref(), args.jobs)?;
    let mut table = String::from(BENCH_HEADER);
    table.push('\n');
    for row in &rows {
        table.push_str(&row.to_tsv());
        table.push('\n');
    }
    print!("{table}");
    if let Some(dir) = &args.out_dir {
        write_text(&dir.join("summary.tsv"), &table)?;
    }
    let worst = [EXIT_BUDGET, EXIT_REFUTED, EXIT_USAGE, EXIT_IO]
        .into_iter()
        .find(|c| rows.iter().any(|r| r.code == *c));
    Ok(worst.unwrap_or(EXIT_OK))
}
