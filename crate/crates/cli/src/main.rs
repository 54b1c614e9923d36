use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use spinor_invariants::catalog::lookup;
use spinor_invariants::enumeration::{enumerate_pairings, x_assignment_classes, XEquivalence};
use spinor_invariants::examples::{find_example, EXAMPLES};
use spinor_invariants::report::{run_suite, Report, RunConfig, Suite};
use spinor_invariants::rng::RNG_ALGORITHM;
use spinor_invariants::{evaluate, InvariantDescriptor, MultiSpinorState};

#[derive(Parser)]
#[command(name = "spinv", version, about = "Lorentz-invariant polynomials of multi-party Dirac spinor states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Random states per check (suite default when omitted).
    #[arg(long, global = true)]
    states: Option<usize>,
    #[arg(long, global = true, default_value_t = 1e-8)]
    rank_threshold: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Equivalence {
    FirstPair,
    Automorphism,
}

#[derive(Subcommand)]
enum Command {
    /// List pairing patterns and tag assignments for n parties at a degree.
    Enumerate {
        #[arg(long)]
        parties: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        counts_only: bool,
        /// Include patterns that factor over a split of the copies.
        #[arg(long)]
        include_disconnected: bool,
        #[arg(long, value_enum, default_value_t = Equivalence::FirstPair)]
        equivalence: Equivalence,
    },
    /// Evaluate catalog polynomials or descriptor files on a state.
    Evaluate {
        /// Catalog names such as I_3a or H_b.
        names: Vec<String>,
        /// JSON file with one descriptor or a list of descriptors.
        #[arg(long)]
        descriptor: Option<PathBuf>,
        /// JSON state file.
        #[arg(long, conflicts_with = "example")]
        state: Option<PathBuf>,
        /// Name of a packaged example state.
        #[arg(long)]
        example: Option<String>,
    },
    /// Run a verification suite and report claimed against computed values.
    Reproduce {
        #[arg(value_parser = parse_suite)]
        report: Suite,
    },
    /// List packaged example states.
    Examples,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Suite::EACH.iter().chain([&Suite::All]).map(|x| x.name()).collect();
        format!("unknown report `{s}`; expected one of {}", names.join(", "))
    })
}

enum Failure {
    Usage(String),
    Checks,
}

impl<E: std::fmt::Display> From<E> for Failure
where
    E: Into<spinor_invariants::Error>,
{
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Enumerate { parties, degree, counts_only, include_disconnected, equivalence } => {
            cmd_enumerate(c, *parties, *degree, *counts_only, *include_disconnected, *equivalence)
        }
        Command::Evaluate { names, descriptor, state, example } => {
            cmd_evaluate(c, names, descriptor.as_deref(), state.as_deref(), example.as_deref())
        }
        Command::Reproduce { report } => cmd_reproduce(c, *report),
        Command::Examples => {
            let rows: Vec<Value> = EXAMPLES
                .iter()
                .map(|e| json!({ "name": e.name, "n_parties": e.n_parties(), "kets": e.kets }))
                .collect();
            emit(c, &json!(rows), &rows_text(&rows, &["name", "n_parties", "kets"]))
        }
    }
}

fn emit(c: &Common, value: &Value, text: &str) -> Result<(), Failure> {
    let body = match c.format {
        Format::Json => serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))? + "\n",
        Format::Csv | Format::Text => text.to_string(),
    };
    match &c.out {
        Some(path) => fs::write(path, body).map_err(|e| usage(format!("{}: {e}", path.display()))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| usage(e.to_string())),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn rows_text(rows: &[Value], columns: &[&str]) -> String {
    let mut out = columns.join("\t") + "\n";
    for r in rows {
        let cells: Vec<String> = columns.iter().map(|k| cell(&r[*k])).collect();
        out += &(cells.join("\t") + "\n");
    }
    out
}

fn rows_csv(rows: &[Value], columns: &[&str]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).map_err(|e| usage(e.to_string()))?;
    for r in rows {
        w.write_record(columns.iter().map(|k| cell(&r[*k]))).map_err(|e| usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| usage(e.to_string()))
}

fn tabular(c: &Common, rows: &[Value], columns: &[&str]) -> Result<String, Failure> {
    match c.format {
        Format::Csv => rows_csv(rows, columns),
        _ => Ok(rows_text(rows, columns)),
    }
}

fn cmd_enumerate(
    c: &Common,
    parties: usize,
    degree: usize,
    counts_only: bool,
    include_disconnected: bool,
    equivalence: Equivalence,
) -> Result<(), Failure> {
    if parties == 0 || degree == 0 || !degree.is_multiple_of(2) {
        return Err(usage("--parties must be positive and --degree even and positive"));
    }
    let eq = match equivalence {
        Equivalence::FirstPair => XEquivalence::FirstPairExchange,
        Equivalence::Automorphism => XEquivalence::Automorphism,
    };
    let patterns = enumerate_pairings(parties, degree, !include_disconnected)?;
    let mut pattern_rows = Vec::new();
    let mut descriptor_rows = Vec::new();
    let mut total = 0;
    for (k, p) in patterns.iter().enumerate() {
        let classes = x_assignment_classes(&p.pattern, eq)?;
        total += classes.len();
        pattern_rows.push(json!({ "pattern": k, "connected": p.connected, "x_assignments": classes.len() }));
        if !counts_only {
            for (j, class) in classes.into_iter().enumerate() {
                let name = format!("P{k}X{j}");
                descriptor_rows.push(json!({
                    "name": name,
                    "pattern": k,
                    "identically_zero": class.identically_zero,
                    "class_size": class.class_size,
                    "descriptor": class.descriptor.with_name(name.clone()),
                }));
            }
        }
    }
    let mut value = json!({
        "n_parties": parties,
        "degree": degree,
        "equivalence": match equivalence { Equivalence::FirstPair => "first_pair", Equivalence::Automorphism => "automorphism" },
        "patterns": patterns.len(),
        "total": total,
        "per_pattern": pattern_rows,
    });
    if !counts_only {
        value["descriptors"] = json!(descriptor_rows);
    }
    let text = if counts_only || c.format == Format::Text {
        let mut t = format!("{} patterns / {} total\n", patterns.len(), total);
        t += &tabular(c, &pattern_rows, &["pattern", "connected", "x_assignments"])?;
        if !counts_only {
            t += &tabular(c, &descriptor_rows, &["name", "pattern", "identically_zero", "class_size"])?;
        }
        t
    } else {
        tabular(c, &descriptor_rows, &["name", "pattern", "identically_zero", "class_size", "descriptor"])?
    };
    emit(c, &value, &text)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_descriptors(path: &Path) -> Result<Vec<InvariantDescriptor>, Failure> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let list = match value {
        Value::Array(items) => items,
        single => vec![single],
    };
    list.into_iter()
        .map(|v| {
            let d: InvariantDescriptor =
                serde_json::from_value(v).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            d.validate().map_err(|e| usage(format!("{}: {e}", path.display())))?;
            Ok(d)
        })
        .collect()
}

#[derive(Serialize)]
struct Evaluation {
    name: String,
    re: f64,
    im: f64,
    magnitude: f64,
}

fn cmd_evaluate(
    c: &Common,
    names: &[String],
    descriptor: Option<&Path>,
    state: Option<&Path>,
    example: Option<&str>,
) -> Result<(), Failure> {
    let psi = match (state, example) {
        (Some(path), _) => MultiSpinorState::from_json(&read(path)?)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
        (None, Some(name)) => find_example(name).ok_or_else(|| usage(format!("unknown example `{name}`")))?.state()?,
        (None, None) => return Err(usage("give --state FILE or --example NAME")),
    };
    let mut descs: Vec<InvariantDescriptor> = names.iter().map(|n| lookup(n)).collect::<Result<_, _>>()?;
    if let Some(path) = descriptor {
        descs.extend(load_descriptors(path)?);
    }
    if descs.is_empty() {
        return Err(usage("give at least one catalog name or --descriptor FILE"));
    }
    let results: Vec<Evaluation> = descs
        .iter()
        .map(|d| {
            let v = evaluate(d, &psi)?;
            Ok(Evaluation { name: d.label(), re: v.re, im: v.im, magnitude: v.norm() })
        })
        .collect::<Result<_, spinor_invariants::Error>>()?;
    let rows: Vec<Value> = results.iter().map(|r| json!(r)).collect();
    let text = tabular(c, &rows, &["name", "re", "im", "magnitude"])?;
    emit(c, &json!({ "n_parties": psi.n_parties(), "values": results }), &text)
}

fn report_rows(report: &Report) -> Vec<Value> {
    report
        .checks
        .iter()
        .map(|r| {
            json!({
                "suite": r.suite,
                "check": r.check,
                "seed": r.seed,
                "threshold": r.threshold,
                "claimed": r.claimed,
                "result": r.result,
                "verdict": if r.pass { "PASS" } else { "FAIL" },
            })
        })
        .collect()
}

fn report_text(report: &Report) -> String {
    let mut out = format!(
        "report {}  seed {}  tol {:e}  rank threshold {:e}  rng {}\n",
        report.report, report.config.seed, report.config.tol, report.config.rank_threshold, RNG_ALGORITHM
    );
    for r in &report.checks {
        out += &format!(
            "{}  [{}] {}\n    claimed:  {}\n    computed: {}\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.check,
            cell(&r.claimed),
            cell(&r.result)
        );
    }
    out += &format!("{} checks, {} failed\n", report.checks.len(), report.n_failed());
    out
}

fn cmd_reproduce(c: &Common, suite: Suite) -> Result<(), Failure> {
    if c.states == Some(0) {
        return Err(usage("--states must be positive"));
    }
    let cfg = RunConfig { seed: c.seed, n_states: c.states, rank_threshold: c.rank_threshold, tol: c.tol };
    let report = run_suite(suite, &cfg)?;
    let text = match c.format {
        Format::Csv => rows_csv(&report_rows(&report), &["suite", "check", "seed", "threshold", "claimed", "result", "verdict"])?,
        _ => report_text(&report),
    };
    let value = serde_json::to_value(&report).map_err(|e| usage(e.to_string()))?;
    emit(c, &value, &text)?;
    if report.pass {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}
