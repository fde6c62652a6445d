//! `orw`: bound tables, the lower-bound construction, the clause replay, and
//! small Ramsey and coloring utilities.
//!
//! Exit codes: 0 pass, 1 mathematical failure, 2 usage or resource error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use orw_core::bounds::{compute_bounds, BoundsRow};
use orw_core::coloring::{
    decide_blue_closed_3, decide_red_closed_omega_plus_n, verify_certificate, ColoringError, CopyCertificate,
    QuotientColoring,
};
use orw_core::lower::{self, LowerError, LowerReport};
use orw_core::ordinal::{parse, OrdinalError};
use orw_core::ramsey::{self, RamseyError, RamseyRecord, RamseyTable};
use orw_core::upper::{self, DecideOptions, Heuristic, Mode, Schema, Status, UpperError};

#[derive(Parser)]
#[command(name = "orw", version, about = "Closed ordinal Ramsey numbers R^cl(w+n, 3)")]
struct Cli {
    /// Print reports as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Ramsey table (defaults to $ORW_TABLE, then the shipped table).
    #[arg(long, global = true, value_name = "FILE")]
    table: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate lower and upper bounds.
    Bounds {
        #[arg(long, default_value_t = 8)]
        nmax: u32,
    },
    /// The lower-bound construction G_n.
    #[command(subcommand)]
    Lower(LowerCmd),
    /// Clause replay of the upper bounds.
    #[command(subcommand)]
    Upper(UpperCmd),
    /// Classical R(n,3) witnesses.
    #[command(subcommand)]
    Ramsey(RamseyCmd),
    /// Ordinal utilities.
    #[command(subcommand)]
    Ordinal(OrdinalCmd),
    /// Quotient coloring utilities.
    #[command(subcommand)]
    Coloring(ColoringCmd),
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(short = 'n')]
    n: u32,
    /// Witness graph for R(n,3) (required for n >= 6).
    #[arg(long, value_name = "FILE")]
    witness: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LowerCmd {
    /// Build G_n, check it, and run the positive control.
    Verify(WitnessArgs),
    /// Write G_n as Graphviz DOT.
    Dot {
        #[command(flatten)]
        w: WitnessArgs,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KMode {
    Ramsey,
    Square,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Vsids,
    Fixed,
}

#[derive(Args)]
struct SolveArgs {
    /// Decision budget.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    #[arg(long, value_enum, default_value_t = HeuristicArg::Vsids)]
    heuristic: HeuristicArg,
    /// Generate C8 lazily above this many instances.
    #[arg(long, default_value_t = 2_000_000)]
    c8_eager_limit: u64,
}

impl SolveArgs {
    fn options(&self) -> DecideOptions {
        let heuristic = match self.heuristic {
            HeuristicArg::Vsids => Heuristic::Vsids,
            HeuristicArg::Fixed => Heuristic::Fixed,
        };
        DecideOptions { solver: upper::SolverConfig { budget: self.budget, heuristic }, c8_eager_limit: self.c8_eager_limit }
    }
}

#[derive(Subcommand)]
enum UpperCmd {
    /// Instantiate with K from the chosen theorem and decide.
    Replay {
        #[arg(short = 'n')]
        n: u32,
        #[arg(long = "k", value_enum)]
        k: KMode,
        /// Witness for R(2n-3,3).
        #[arg(long, value_name = "FILE")]
        witness: Option<PathBuf>,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Decide the catalogue for explicit n and K, optionally dropping schemas.
    Decide {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'K')]
        big_k: u32,
        /// Schemas to leave out, e.g. C8.
        #[arg(long, value_delimiter = ',')]
        drop: Vec<Schema>,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Write the clause system as DIMACS plus a JSON sidecar (FILE.json).
    Dimacs {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'K')]
        big_k: u32,
        #[arg(short, long, value_name = "FILE")]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum RamseyCmd {
    /// Exact R(n,3) by exhaustive search (n <= 4).
    Compute {
        #[arg(short = 'n')]
        n: u32,
    },
    /// Check a witness file.
    Verify {
        #[arg(short = 'n')]
        n: u32,
        #[arg(long, value_name = "FILE")]
        witness: PathBuf,
    },
    /// Print a shipped witness (3 <= n <= 5).
    Builtin {
        #[arg(short = 'n')]
        n: u32,
    },
}

#[derive(Subcommand)]
enum OrdinalCmd {
    /// Parse and print in Cantor normal form.
    Eval { expr: String },
}

#[derive(Subcommand)]
enum ColoringCmd {
    /// Search for a blue 3 and a red closed w+n.
    Decide {
        file: PathBuf,
        #[arg(short = 'n')]
        n: u64,
    },
    /// Check a certificate against a coloring.
    Check {
        file: PathBuf,
        #[arg(long, value_name = "FILE")]
        cert: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Ramsey(#[from] RamseyError),
    #[error(transparent)]
    Lower(#[from] LowerError),
    #[error(transparent)]
    Upper(#[from] UpperError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

/// Exit status of a subcommand that ran to completion.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Pass,
    Fail,
    Resource,
}

impl Verdict {
    fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Resource => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn load_table(flag: Option<&Path>) -> Result<RamseyTable, CliError> {
    let env = std::env::var_os("ORW_TABLE").map(PathBuf::from);
    let table = match flag.map(Path::to_path_buf).or(env) {
        Some(p) => RamseyTable::load(&p)?,
        None => RamseyTable::external_default(),
    };
    Ok(table.with_computed(4)?)
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{}", text());
    }
}

fn witness_record(n: u32, path: Option<&Path>, table: &RamseyTable) -> Result<RamseyRecord, CliError> {
    Ok(match path {
        Some(p) => RamseyRecord::load(n, p)?,
        None => table.witness_record(n)?,
    })
}

fn bounds_text(rows: &[BoundsRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!("n = {}\n", r.n));
        out.push_str(&format!("  lower         {}\n", r.lower));
        out.push_str(&format!("  upper ramsey  {}\n", r.upper_ramsey));
        out.push_str(&format!("  upper square  {}\n", r.upper_square));
        out.push_str(&format!("  upper prior   {}\n", r.upper_prior));
        out.push_str(&format!("  square < ramsey: {}\n", r.square_better));
        let used: Vec<String> = r
            .ramsey_values_used
            .iter()
            .map(|(m, u)| format!("R({m},3)={} [{}]", u.value, format!("{:?}", u.provenance).to_lowercase()))
            .collect();
        out.push_str(&format!("  uses {}\n", used.join(", ")));
    }
    out
}

fn lower_text(r: &LowerReport, control: &lower::Stage) -> String {
    let mut out = format!("G_{}: gamma = {}, bound R^cl(w+{},3) >= {}\n", r.n, r.gamma, r.n, r.bound);
    for s in &r.stages {
        out.push_str(&format!("  {:<18} {}\n", s.name, if s.pass { "pass" } else { "FAIL" }));
    }
    out.push_str(&format!("  control (n-1)      {}\n", if control.pass { "found" } else { "MISSING" }));
    out
}

fn run(cli: Cli) -> Result<Verdict, CliError> {
    let json = cli.json;
    let table_flag = cli.table.as_deref();
    match cli.cmd {
        Command::Bounds { nmax } => {
            let table = load_table(table_flag)?;
            let rows = compute_bounds(nmax, &table)?;
            emit(json, &rows, || bounds_text(&rows));
            Ok(Verdict::from_pass(rows.iter().all(BoundsRow::is_consistent)))
        }
        Command::Lower(LowerCmd::Verify(w)) => {
            let table = load_table(table_flag)?;
            let rec = witness_record(w.n, w.witness.as_deref(), &table)?;
            let report = lower::verify_lower_bound(w.n, &rec)?;
            let control = lower::positive_control(w.n, &rec)?;
            let out = json!({ "report": report, "control": control });
            emit(json, &out, || lower_text(&report, &control));
            Ok(Verdict::from_pass(report.pass && control.pass))
        }
        Command::Lower(LowerCmd::Dot { w, output }) => {
            let table = load_table(table_flag)?;
            let rec = ramsey::relabel_red_prefix(&witness_record(w.n, w.witness.as_deref(), &table)?)?;
            let g = lower::build_gn(lower::build_partition(w.n, &rec)?)?;
            let dot = lower::to_dot(&g);
            match output {
                Some(p) => write(&p, &dot)?,
                None => print!("{dot}"),
            }
            Ok(Verdict::Pass)
        }
        Command::Upper(UpperCmd::Replay { n, k, witness, solve }) => {
            let table = load_table(table_flag)?;
            let mode = match k {
                KMode::Ramsey => Mode::RamseyK,
                KMode::Square => Mode::SquareK,
            };
            let rec = match witness {
                Some(p) => Some(RamseyRecord::load(2 * n - 3, p)?),
                None => None,
            };
            let report = upper::replay_theorem(n, mode, &table, rec.as_ref(), solve.options())?;
            emit(json, &report, || {
                let mut s = format!(
                    "n = {}, K = {}, gamma = {}: {:?} ({} decisions, {} conflicts)\n",
                    report.n, report.k, report.gamma, report.main.status, report.main.stats.decisions, report.main.stats.conflicts
                );
                if let Some(t) = &report.main.trace {
                    s.push_str(&format!("  trace: {} derived, {} resolutions, verified = {}, sha256 {}\n", t.derived, t.resolutions, t.verified, t.digest));
                }
                s.push_str(&format!("  without C4, C10: {:?}\n", report.without_redundant));
                if let Some(r) = &report.ramsey {
                    s.push_str(&format!("  R({},3) = {} [{:?}]\n", r.n, r.value, r.provenance));
                }
                s
            });
            Ok(match report.main.status {
                Status::BudgetExceeded => Verdict::Resource,
                _ => Verdict::from_pass(report.pass),
            })
        }
        Command::Upper(UpperCmd::Decide { n, big_k, drop, solve }) => {
            let report = upper::decide_catalogue(n, big_k, &drop, solve.options())?;
            emit(json, &report, || {
                let mut s = format!("n = {n}, K = {big_k}: {:?}\n", report.status);
                if let Some(m) = &report.model {
                    s.push_str(&format!("  {} blue tilde variables; singleton block all red: {}\n", m.blue.len(), m.l_block_red));
                    for b in &m.blue {
                        s.push_str(&format!("    {b}\n"));
                    }
                }
                s
            });
            Ok(match report.status {
                Status::Unsat => Verdict::from_pass(report.trace.as_ref().is_some_and(|t| t.verified)),
                Status::Sat => Verdict::Fail,
                Status::BudgetExceeded => Verdict::Resource,
            })
        }
        Command::Upper(UpperCmd::Dimacs { n, big_k, output }) => {
            let sys = upper::instantiate_clauses(n, big_k).map_err(UpperError::from)?;
            write(&output, &upper::to_dimacs(&sys))?;
            let mut side = output.clone().into_os_string();
            side.push(".json");
            write(Path::new(&side), &serde_json::to_string_pretty(&upper::sidecar(&sys)).expect("sidecar serializes"))?;
            let out = json!({ "variables": sys.space.len(), "clauses": sys.clauses.len(), "per_schema": sys.counts() });
            emit(json, &out, || format!("{} variables, {} clauses\n", sys.space.len(), sys.clauses.len()));
            Ok(Verdict::Pass)
        }
        Command::Ramsey(RamseyCmd::Compute { n }) => {
            let rec = ramsey::brute_force_ramsey(n)?;
            let out = json!({ "n": n, "value": rec.value(), "witness": rec.to_json() });
            emit(json, &out, || format!("R({n},3) = {}\n", rec.value()));
            Ok(Verdict::Pass)
        }
        Command::Ramsey(RamseyCmd::Verify { n, witness }) => {
            let file: ramsey::WitnessFile =
                serde_json::from_str(&read(&witness)?).map_err(|e| CliError::Usage(format!("{}: {e}", witness.display())))?;
            let g = ramsey::WitnessGraph::try_from(file)?;
            let result = ramsey::verify_witness(&g, n);
            let out = json!({ "n": n, "order": g.order(), "valid": result.is_ok(), "failure": result.as_ref().err() });
            emit(json, &out, || match &result {
                Ok(()) => format!("valid: R({n},3) >= {}\n", g.order() + 1),
                Err(f) => format!("invalid: {f}\n"),
            });
            Ok(Verdict::from_pass(result.is_ok()))
        }
        Command::Ramsey(RamseyCmd::Builtin { n }) => {
            let rec = ramsey::builtin(n)?;
            println!("{}", serde_json::to_string_pretty(&rec.to_json()).expect("witness serializes"));
            Ok(Verdict::Pass)
        }
        Command::Ordinal(OrdinalCmd::Eval { expr }) => {
            let o = parse(&expr)?;
            let out = json!({ "value": o.to_string(), "cb_rank": o.cb_rank(), "l_count": o.l_count() });
            emit(json, &out, || format!("{o}\n"));
            Ok(Verdict::Pass)
        }
        Command::Coloring(ColoringCmd::Decide { file, n }) => {
            let c = QuotientColoring::from_json_str(&read(&file)?)?;
            let blue = decide_blue_closed_3(&c);
            let red = decide_red_closed_omega_plus_n(&c, n);
            let out = json!({ "blue_3": blue, "red_omega_plus_n": red });
            emit(json, &out, || {
                let show = |x: &Option<CopyCertificate>| match x {
                    Some(cert) => serde_json::to_string(cert).expect("certificate serializes"),
                    None => "none".into(),
                };
                format!("blue 3: {}\nred closed w+{n}: {}\n", show(&blue), show(&red))
            });
            Ok(Verdict::from_pass(blue.is_none() && red.is_none()))
        }
        Command::Coloring(ColoringCmd::Check { file, cert, depth }) => {
            let c = QuotientColoring::from_json_str(&read(&file)?)?;
            let cert: CopyCertificate =
                serde_json::from_str(&read(&cert)?).map_err(|e| CliError::Usage(format!("certificate: {e}")))?;
            let result = verify_certificate(&c, &cert, depth);
            let out = json!({ "valid": result.is_ok(), "reason": result.as_ref().err() });
            emit(json, &out, || match &result {
                Ok(()) => "valid\n".into(),
                Err(e) => format!("invalid: {e}\n"),
            });
            Ok(Verdict::from_pass(result.is_ok()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(v) => ExitCode::from(v.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
