//! Command-line front end. Every report embeds a manifest of the run's
//! parameters; timing lives in a separate `wall_time_ms` field.
//!
//! Exit codes: 0 success, 1 unsat (or no good assignment), 2 verification
//! failure, 3 bad input, 4 search budget exhausted.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::connected::{check_indistinguishability, run_connected_aware, ConnectedRunConfig};
use crate::derand::{
    certify_good_f, claimed_size, derandomize, find_normal_form, search_good_f, DerandConfig, DerandError, FamilySource,
    NormalFormOutcome, RandTime, SearchConfig, Verdict,
};
use crate::graph::{enumerate_instances, id_range, read_instances, Graph, InputInstance, InstanceFamilySpec};
use crate::label::{Alphabet, Label};
use crate::problem::{problem_by_name, verify, ProblemSpec, VerificationResult, Witness};
use crate::programs::{FirstBit, GeometricCount, GreedyMis, IdParity, LubyMis, OwnDegree, RandomColor};
use crate::sim::{
    compute_success_exact, estimate_success_mc, run_normal_form, run_randomized, BitFree, NormalFormTable,
    RandomAssignment,
};

pub const OUT_DIR_ENV: &str = "LDERAND_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "lderand", version, about = "LOCAL model workbench: families, normal-form tables, derandomization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Write every instance of a family as JSON lines.
    Enumerate(EnumerateArgs),
    /// Search a valid normal-form table for a problem over a family.
    Derandomize(DerandomizeArgs),
    /// Failure probabilities of a randomized program and the union-bound certificate.
    Certify(CertifyArgs),
    /// Run a table on a family and verify every output.
    Verify(VerifyArgs),
    /// Run a program on one instance.
    Simulate(SimulateArgs),
    /// Run the connected-graph variant on one instance.
    ConnectedRun(ConnectedArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
struct FamilyArgs {
    /// Number of nodes.
    #[arg(long)]
    n: Option<usize>,
    /// Identifier exponent: ids come from 1..=n^c.
    #[arg(long, default_value_t = 1)]
    c: u32,
    /// Comma-separated input labels.
    #[arg(long, default_value = "x")]
    input_alphabet: String,
    #[arg(long)]
    max_degree: Option<usize>,
    /// Read the family from a JSON-lines instance dump instead.
    #[arg(long, conflicts_with = "n")]
    family: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
struct OutputArgs {
    /// Report path; defaults to `<dir>/<subcommand>.json` where `<dir>` comes
    /// from the output-directory variable or the working directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
struct EnumerateArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct DerandomizeArgs {
    /// mis, coloring:K, leader, or a problem file.
    #[arg(long)]
    problem: String,
    #[command(flatten)]
    family: FamilyArgs,
    /// Table radius.
    #[arg(long = "T")]
    radius: usize,
    /// Maximum number of label trials in the search.
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long)]
    time_limit_secs: Option<u64>,
    /// Randomized running time to evaluate at the claimed size:
    /// const:K, log2, loglog2 or log2^2.
    #[arg(long)]
    t_rand: Option<String>,
    /// Where to write the table; defaults next to the report.
    #[arg(long)]
    table_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    Exact,
    Mc,
}

#[derive(Debug, Args, Serialize)]
struct CertifyArgs {
    #[arg(long)]
    problem: String,
    /// first-bit, random-color:K, luby:BITS, geometric:CAP, greedy-mis,
    /// id-parity or own-degree:MAX.
    #[arg(long)]
    program: String,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Bits per node (exact mode and assignment search).
    #[arg(long)]
    bits: Option<usize>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also search for the first good assignment ids -> {0,1}^bits.
    #[arg(long)]
    search: bool,
    /// Largest assignment space the search may scan.
    #[arg(long, default_value_t = 1 << 20)]
    candidate_budget: u64,
    /// Node count the program is told: lifted (2^(n^2)), actual, or a number.
    #[arg(long, default_value = "lifted")]
    claimed_n: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    table: PathBuf,
    #[arg(long)]
    problem: String,
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    /// A program name as for `certify`, or table:PATH.
    #[arg(long)]
    program: String,
    /// path:N, cycle:N, complete:N, star:N, empty:N, or a JSON-lines file
    /// (first instance).
    #[arg(long)]
    graph: String,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long, default_value = "actual")]
    claimed_n: String,
    /// Required for programs that read random bits.
    #[arg(long)]
    seed: Option<u64>,
    /// Include per-round message counts.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args, Serialize)]
struct ConnectedArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    graph: String,
    /// Normal-form table; without one, a table of radius --T is searched
    /// over the input instance.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long = "T")]
    radius: Option<usize>,
    /// Also check that the node with this identifier cannot tell the input
    /// from an extension to this many nodes.
    #[arg(long, requires = "indistinguishable_id")]
    extend_to: Option<usize>,
    #[arg(long)]
    indistinguishable_id: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// A failed run with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub report: Option<PathBuf>,
}

fn bad(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 3,
        message: e.to_string(),
        report: None,
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        bad(format!("{e:#}"))
    }
}

type CliResult = Result<Outcome, Failure>;

struct Outcome {
    code: i32,
    summary: String,
    report: PathBuf,
}

/// Parses `args` (program name first), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok(o) => {
            println!("{}", o.summary);
            println!("report: {}", o.report.display());
            o.code
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            if let Some(r) = f.report {
                eprintln!("report: {}", r.display());
            }
            f.code
        }
    }
}

fn dispatch(command: &Command) -> CliResult {
    let workers = match command {
        Command::Enumerate(a) => a.output.workers,
        Command::Derandomize(a) => a.output.workers,
        Command::Certify(a) => a.output.workers,
        Command::Verify(a) => a.output.workers,
        Command::Simulate(a) => a.output.workers,
        Command::ConnectedRun(a) => a.output.workers,
    };
    let go = || match command {
        Command::Enumerate(a) => cmd_enumerate(a, command),
        Command::Derandomize(a) => cmd_derandomize(a, command),
        Command::Certify(a) => cmd_certify(a, command),
        Command::Verify(a) => cmd_verify(a, command),
        Command::Simulate(a) => cmd_simulate(a, command),
        Command::ConnectedRun(a) => cmd_connected(a, command),
    };
    match workers {
        Some(0) => Err(bad("--workers must be at least 1")),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(bad)?
            .install(go),
        None => go(),
    }
}

fn subcommand_name(command: &Command) -> &'static str {
    match command {
        Command::Enumerate(_) => "enumerate",
        Command::Derandomize(_) => "derandomize",
        Command::Certify(_) => "certify",
        Command::Verify(_) => "verify",
        Command::Simulate(_) => "simulate",
        Command::ConnectedRun(_) => "connected-run",
    }
}

fn manifest(command: &Command) -> Value {
    let args = serde_json::to_value(command).expect("arguments serialize");
    let params = args.as_object().and_then(|o| o.values().next().cloned()).unwrap_or(Value::Null);
    json!({
        "subcommand": subcommand_name(command),
        "tool_version": env!("CARGO_PKG_VERSION"),
        "parameters": params,
    })
}

fn default_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn report_path(output: &OutputArgs, command: &Command, ext: &str) -> PathBuf {
    output
        .out
        .clone()
        .unwrap_or_else(|| default_dir().join(format!("{}.{ext}", subcommand_name(command))))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_report(path: &Path, command: &Command, body: Value, elapsed: Duration) -> Result<(), Failure> {
    let mut report = json!({ "manifest": manifest(command) });
    if let (Some(obj), Value::Object(body)) = (report.as_object_mut(), body) {
        obj.extend(body);
        obj.insert("wall_time_ms".into(), json!(elapsed.as_millis() as u64));
    }
    write_file(path, &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))
}

fn family_spec(args: &FamilyArgs) -> Result<InstanceFamilySpec, Failure> {
    let n = args.n.ok_or_else(|| bad("either --n or --family is required"))?;
    let names: Vec<&str> = args.input_alphabet.split(',').map(str::trim).collect();
    let alphabet = Alphabet::parse_list(&names).map_err(bad)?;
    let mut spec = InstanceFamilySpec::new(n, args.c, alphabet);
    spec.max_degree = args.max_degree;
    spec.validate().map_err(bad)?;
    Ok(spec)
}

fn load_family(args: &FamilyArgs) -> Result<(Vec<InputInstance>, usize), Failure> {
    match &args.family {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let fam = read_instances(&text).map_err(bad)?;
            let n = fam.iter().map(InputInstance::node_count).max().ok_or_else(|| bad("empty family file"))?;
            Ok((fam, n))
        }
        None => {
            let spec = family_spec(args)?;
            Ok((enumerate_instances(&spec).map_err(bad)?.collect(), spec.n))
        }
    }
}

fn claimed(arg: &str, n: usize) -> Result<BigUint, Failure> {
    match arg {
        "lifted" => Ok(claimed_size(n)),
        "actual" => Ok(BigUint::from(n)),
        s => s.parse().map_err(|_| bad(format!("--claimed-n: expected lifted, actual or a number, got {s:?}"))),
    }
}

fn problem(name: &str) -> Result<ProblemSpec, Failure> {
    problem_by_name(name).map_err(bad)
}

fn parse_graph(spec: &str) -> Result<InputInstance, Failure> {
    let fixed = |kind: &str, n: usize| -> Result<Graph, Failure> {
        if n == 0 {
            return Err(bad("graph needs at least one node"));
        }
        Ok(match kind {
            "path" => Graph::path(n),
            "cycle" if n >= 3 => Graph::cycle(n),
            "complete" => Graph::complete(n),
            "star" => Graph::star(n),
            "empty" => Graph::empty(n),
            _ => return Err(bad(format!("unknown graph {spec:?}"))),
        })
    };
    if let Some((kind, n)) = spec.split_once(':') {
        if let Ok(n) = n.parse::<usize>() {
            return Ok(InputInstance::with_sequential_ids(fixed(kind, n)?, crate::label::label("x")));
        }
    }
    let text = fs::read_to_string(spec).with_context(|| format!("reading graph {spec}"))?;
    read_instances(&text)
        .map_err(bad)?
        .into_iter()
        .next()
        .ok_or_else(|| bad("instance file is empty"))
}

fn load_table(path: &Path) -> Result<NormalFormTable, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    NormalFormTable::from_json(&text).map_err(bad)
}

enum ProgramChoice {
    FirstBit,
    RandomColor(usize),
    Luby(usize),
    Geometric(usize),
    GreedyMis,
    IdParity,
    OwnDegree(usize),
    Table(NormalFormTable),
}

impl ProgramChoice {
    fn parse(s: &str) -> Result<Self, Failure> {
        let (head, arg) = s.split_once(':').unwrap_or((s, ""));
        let num = || arg.parse::<usize>().map_err(|_| bad(format!("program {s:?} needs a numeric argument")));
        Ok(match head {
            "first-bit" => ProgramChoice::FirstBit,
            "random-color" => ProgramChoice::RandomColor(num()?.max(1)),
            "luby" => {
                let b = num()?;
                if b > 64 {
                    return Err(bad("luby priorities are at most 64 bits"));
                }
                ProgramChoice::Luby(b)
            }
            "geometric" => ProgramChoice::Geometric(num()?),
            "greedy-mis" => ProgramChoice::GreedyMis,
            "id-parity" => ProgramChoice::IdParity,
            "own-degree" => ProgramChoice::OwnDegree(num()?),
            "table" => ProgramChoice::Table(load_table(Path::new(arg))?),
            _ => return Err(bad(format!("unknown program {s:?}"))),
        })
    }

    fn reads_bits(&self) -> bool {
        matches!(
            self,
            ProgramChoice::FirstBit | ProgramChoice::RandomColor(_) | ProgramChoice::Luby(_) | ProgramChoice::Geometric(_)
        )
    }
}

/// Binds `$p` to the chosen program and evaluates `$body`.
macro_rules! with_program {
    ($choice:expr, $alphabet:expr, |$p:ident| $body:expr) => {
        match $choice {
            ProgramChoice::FirstBit => {
                let $p = match $alphabet {
                    Some(a) if a.len() >= 2 => FirstBit::new(a.clone()),
                    _ => FirstBit::binary(),
                };
                $body
            }
            ProgramChoice::RandomColor(k) => {
                let $p = RandomColor::new(*k);
                $body
            }
            ProgramChoice::Luby(b) => {
                let $p = LubyMis::new(*b);
                $body
            }
            ProgramChoice::Geometric(c) => {
                let $p = GeometricCount::new(*c);
                $body
            }
            ProgramChoice::GreedyMis => {
                let $p = BitFree(GreedyMis::new());
                $body
            }
            ProgramChoice::IdParity => {
                let $p = BitFree(IdParity::new());
                $body
            }
            ProgramChoice::OwnDegree(m) => {
                let $p = BitFree(OwnDegree::new(*m));
                $body
            }
            ProgramChoice::Table(t) => {
                let $p = BitFree(t.as_program());
                $body
            }
        }
    };
}

fn cmd_enumerate(args: &EnumerateArgs, command: &Command) -> CliResult {
    if args.family.family.is_some() {
        return Err(bad("enumerate takes --n, not --family"));
    }
    let spec = family_spec(&args.family)?;
    let path = report_path(&args.output, command, "jsonl");
    let mut text = String::new();
    let mut count = 0usize;
    for inst in enumerate_instances(&spec).map_err(bad)? {
        text.push_str(&inst.to_json_line());
        text.push('\n');
        count += 1;
    }
    write_file(&path, &text)?;
    Ok(Outcome {
        code: 0,
        summary: format!("{count} instances"),
        report: path,
    })
}

fn cmd_derandomize(args: &DerandomizeArgs, command: &Command) -> CliResult {
    let start = Instant::now();
    let problem = problem(&args.problem)?;
    if args.family.family.is_some() {
        return Err(bad("derandomize enumerates its family; use --n"));
    }
    let spec = family_spec(&args.family)?;
    let rand_time = args.t_rand.as_deref().map(str::parse::<RandTime>).transpose().map_err(bad)?;
    let config = DerandConfig {
        problem,
        family: spec,
        radius: args.radius,
        node_budget: args.node_budget,
        time_limit: args.time_limit_secs.map(Duration::from_secs),
        workers: None,
        rand_time,
    };
    let path = report_path(&args.output, command, "json");
    let (report, table) = match derandomize(&config) {
        Ok(r) => r,
        Err(DerandError::TableInvalid { instance, dump }) => {
            let body = json!({ "verdict": "verification-failure", "instance": instance, "witness": dump });
            write_report(&path, command, body, start.elapsed())?;
            return Err(Failure {
                code: 2,
                message: format!("table fails on instance {instance}"),
                report: Some(path),
            });
        }
        Err(e) => return Err(bad(e)),
    };
    let mut body = serde_json::to_value(&report).expect("report serializes");
    if let Some(t) = &table {
        let table_path = args
            .table_out
            .clone()
            .unwrap_or_else(|| path.with_file_name("table.json"));
        write_file(&table_path, &(t.to_json() + "\n"))?;
        body["table_path"] = json!(table_path.display().to_string());
    }
    write_report(&path, command, body, start.elapsed())?;
    let (code, word) = match report.verdict {
        Verdict::Found => (0, "found"),
        Verdict::Unsat => (1, "unsat"),
        Verdict::BudgetExhausted => (4, "budget exhausted"),
    };
    Ok(Outcome {
        code,
        summary: format!(
            "{word}: {}/{} verified, {} realized views",
            report.verified,
            report.family_size,
            report.search.realized_balls
        ),
        report: path,
    })
}

fn cmd_certify(args: &CertifyArgs, command: &Command) -> CliResult {
    let start = Instant::now();
    let problem = problem(&args.problem)?;
    let choice = ProgramChoice::parse(&args.program)?;
    let (family, n) = load_family(&args.family)?;
    let claimed_n = claimed(&args.claimed_n, n)?;
    let path = report_path(&args.output, command, "json");
    let mut body = json!({ "family_size": family.len(), "claimed_n": claimed_n.to_string() });
    let mut code = 0;
    let alphabet = Some(problem.output_alphabet());
    match args.mode {
        Mode::Exact => {
            let bits = args.bits.ok_or_else(|| bad("--mode exact needs --bits"))?;
            body["bits"] = json!(bits);
            let probs = with_program!(&choice, alphabet, |p| compute_success_exact(&p, &problem, &family, bits, &claimed_n))
                .map_err(bad)?;
            let cert = certify_good_f(&probs, &family, &claimed_n).map_err(bad)?;
            body["certificate"] = serde_json::to_value(&cert).expect("certificate serializes");
        }
        Mode::Mc => {
            let trials = args.trials.ok_or_else(|| bad("--mode mc needs --trials"))?;
            let seed = args.seed.ok_or_else(|| bad("--mode mc needs --seed"))?;
            let est = with_program!(&choice, alphabet, |p| estimate_success_mc(
                &p, &problem, &family, trials, seed, &claimed_n
            ))
            .map_err(bad)?;
            let total: f64 = est.iter().map(|e| e.estimate).sum();
            body["estimates"] = serde_json::to_value(&est).expect("estimates serialize");
            body["estimate_sum"] = json!(total);
        }
    }
    if args.search {
        let bits = args.bits.ok_or_else(|| bad("--search needs --bits"))?;
        let c = family.iter().map(InputInstance::c).max().unwrap_or(1);
        let ids: Vec<u64> = (1..=id_range(n, c).map_err(bad)?).collect();
        let found = with_program!(&choice, alphabet, |p| search_good_f(
            &p,
            &problem,
            &family,
            bits,
            &ids,
            &claimed_n,
            args.candidate_budget
        ));
        let found = found.map_err(bad)?;
        if found.found.is_none() {
            code = 1;
        }
        body["search"] = serde_json::to_value(&found).expect("search serializes");
    }
    write_report(&path, command, body.clone(), start.elapsed())?;
    let summary = match body.get("certificate") {
        Some(c) => format!("union bound {} (verdict {})", c["sum"], c["verdict"]),
        None => format!("estimated failure sum {}", body["estimate_sum"]),
    };
    Ok(Outcome {
        code,
        summary,
        report: path,
    })
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::Node { id, outputs, view, .. } => json!({
            "node_id": id,
            "view": crate::graph::canonicalize(view).as_str(),
            "outputs": outputs.iter().map(Label::as_str).collect::<Vec<_>>(),
        }),
        Witness::Component { index, nodes } => json!({ "component": index, "nodes": nodes }),
    }
}

fn cmd_verify(args: &VerifyArgs, command: &Command) -> CliResult {
    let start = Instant::now();
    let problem = problem(&args.problem)?;
    let table = load_table(&args.table)?;
    let (family, _) = load_family(&args.family)?;
    let path = report_path(&args.output, command, "json");
    let mut passed = 0usize;
    let mut failure = None;
    for (i, inst) in family.iter().enumerate() {
        let verdict = match run_normal_form(&table, inst) {
            Ok(out) => match verify(&problem, inst, &out).map_err(bad)? {
                VerificationResult::Valid => None,
                VerificationResult::Invalid(w) => Some(witness_json(&w)),
            },
            Err(e) => Some(json!({ "error": e.to_string() })),
        };
        match verdict {
            None => passed += 1,
            Some(w) if failure.is_none() => {
                failure = Some(json!({ "instance": i, "dump": inst.to_json_line(), "witness": w }));
            }
            Some(_) => {}
        }
    }
    let body = json!({
        "family_size": family.len(),
        "passed": passed,
        "first_failure": failure,
    });
    write_report(&path, command, body, start.elapsed())?;
    let summary = format!("{passed}/{} verified", family.len());
    if passed < family.len() {
        return Err(Failure {
            code: 2,
            message: summary,
            report: Some(path),
        });
    }
    Ok(Outcome {
        code: 0,
        summary,
        report: path,
    })
}

fn cmd_simulate(args: &SimulateArgs, command: &Command) -> CliResult {
    let start = Instant::now();
    let choice = ProgramChoice::parse(&args.program)?;
    let instance = parse_graph(&args.graph)?;
    let problem = args.problem.as_deref().map(problem).transpose()?;
    let claimed_n = claimed(&args.claimed_n, instance.node_count())?;
    let streams = match (choice.reads_bits(), args.seed) {
        (true, None) => return Err(bad("randomized programs need --seed")),
        (_, Some(s)) => RandomAssignment::Seeded(s),
        (false, None) => RandomAssignment::Explicit(Default::default()),
    };
    let alphabet = problem.as_ref().map(ProblemSpec::output_alphabet);
    let run = with_program!(&choice, alphabet, |p| run_randomized(&p, &instance, &claimed_n, &streams)).map_err(bad)?;
    let path = report_path(&args.output, command, "json");
    let mut body = json!({
        "instance": instance.to_json_line(),
        "rounds": run.rounds,
        "outputs": run
            .outputs
            .by_id(&instance)
            .into_iter()
            .map(|(id, l)| json!([id, l.as_str()]))
            .collect::<Vec<_>>(),
    });
    if args.trace {
        body["trace"] = json!(run.trace);
    }
    let mut code = 0;
    if let Some(p) = &problem {
        let v = verify(p, &instance, &run.outputs).map_err(bad)?;
        body["valid"] = json!(v.is_valid());
        if let Some(w) = v.witness() {
            body["witness"] = witness_json(w);
            code = 2;
        }
    }
    write_report(&path, command, body, start.elapsed())?;
    let summary = format!("halted after {} rounds", run.rounds);
    if code != 0 {
        return Err(Failure {
            code,
            message: format!("{summary}; output invalid"),
            report: Some(path),
        });
    }
    Ok(Outcome {
        code,
        summary,
        report: path,
    })
}

fn cmd_connected(args: &ConnectedArgs, command: &Command) -> CliResult {
    let start = Instant::now();
    let problem = problem(&args.problem)?;
    let instance = parse_graph(&args.graph)?;
    let table = match (&args.table, args.radius) {
        (Some(path), _) => load_table(path)?,
        (None, Some(radius)) => {
            let search = SearchConfig::new(problem.clone(), FamilySource::Instances(vec![instance.clone()]), radius);
            match find_normal_form(&search).map_err(bad)? {
                NormalFormOutcome::Found { table, .. } => table,
                NormalFormOutcome::Unsat { .. } => {
                    return Err(Failure {
                        code: 1,
                        message: "no table of that radius solves the instance".into(),
                        report: None,
                    })
                }
                NormalFormOutcome::BudgetExhausted { .. } => {
                    return Err(Failure {
                        code: 4,
                        message: "table search budget exhausted".into(),
                        report: None,
                    })
                }
            }
        }
        (None, None) => return Err(bad("connected-run needs --table or --T")),
    };
    let config = ConnectedRunConfig::new(problem.clone(), table).map_err(bad)?;
    let run = run_connected_aware(&config, &instance).map_err(bad)?;
    let valid = verify(&problem, &instance, &run.outputs).map_err(bad)?;
    let t = config.exploration_radius();
    let mut body = json!({
        "instance": instance.to_json_line(),
        "t": t,
        "T": config.table().radius(),
        "path": run.path,
        "covering_id": run.covering_id,
        "rounds": run.rounds,
        "round_limit": 2 * t + config.table().radius(),
        "outputs": run
            .outputs
            .by_id(&instance)
            .into_iter()
            .map(|(id, l)| json!([id, l.as_str()]))
            .collect::<Vec<_>>(),
        "valid": valid.is_valid(),
    });
    if let (Some(target), Some(id)) = (args.extend_to, args.indistinguishable_id) {
        let v = instance.node_with_id(id).ok_or_else(|| bad(format!("no node with id {id}")))?;
        let fill = instance.input(v).clone();
        let check = check_indistinguishability(&instance, v, t, config.table(), target, &fill).map_err(bad)?;
        body["indistinguishable"] = json!({
            "keys_equal": check.keys_equal,
            "outputs_equal": check.outputs_equal,
            "extended": check.extended.to_json_line(),
        });
    }
    let path = report_path(&args.output, command, "json");
    write_report(&path, command, body, start.elapsed())?;
    let summary = format!("{} path, {} rounds", serde_json::to_value(run.path).unwrap().as_str().unwrap(), run.rounds);
    if !valid.is_valid() {
        return Err(Failure {
            code: 2,
            message: format!("{summary}; output invalid"),
            report: Some(path),
        });
    }
    Ok(Outcome {
        code: 0,
        summary,
        report: path,
    })
}
