//! `modiag`: batch verification of the modified diagonal calculus.
//!
//! Every run prints one JSON report (or a CSV table). Exit code 0 means verified, 1 means an
//! exact mismatch was found, 2 means the command line or its parameters were invalid.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use modiag::blowup::{verify_blowup, BlowupContext};
use modiag::bundle::{
    top_bound_check, verify_bundle_coefficients, verify_fibration_curve, verify_fibration_surface, FibrationCase,
    SegreConvention,
};
use modiag::diagonal::{verify_sommalt, verify_stability};
use modiag::double_cover::{solve_double_cover, verify_outcome, DoubleCoverOutcome, PhiTable};
use modiag::exact::binom::binom;
use modiag::exact::poly::{combcomb_check, IntPolynomial};
use modiag::exact::rational::format_rational;
use modiag::homology::torsion_decision;
use modiag::product::{verify_kunneth, ProductContext};

#[derive(Parser)]
#[command(name = "modiag", version, about = "Exact verification of modified diagonal identities")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Omit `elapsed_ms` so that reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one of the verification suites.
    #[command(subcommand)]
    Verify(Verify),
    /// Coordinate table and linear solve for the double-cover problem.
    #[command(subcommand)]
    Doublecover(Doublecover),
    /// Decide homological triviality of Gamma^m from degree bookkeeping.
    Homology {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Pascal's rule and the alternating binomial sums for polynomials of low degree.
    Combinatorics {
        #[arg(long)]
        max_n: u32,
    },
    /// Vanishing of the product coefficients for Gamma^m(X) and Gamma^n(Y).
    Product(OrderPair),
    /// Blow-up coefficient identity.
    Blowup {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        e: usize,
    },
    /// Gamma^{m+s} normalizes to zero under Gamma^m = 0.
    Stability {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: usize,
    },
    /// Top-H bounds and the bundle coefficient closed forms.
    Bundle {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        defect: usize,
    },
    /// Vanishing for projective bundles over a curve or a surface.
    BundleVanishing {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: usize,
        #[arg(long = "case", value_enum)]
        case: CaseArg,
    },
    /// Marked alternating sum lies in the marked Gamma^m relations.
    Sommalt {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ambient: usize,
    },
}

#[derive(Args)]
struct OrderPair {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand)]
enum Doublecover {
    /// Coordinates of every Phi_nu(Xi_m) in the symmetrized basis.
    Table {
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Solve for a combination of the Phi_nu(Xi_m) equal to Gamma^{2m-1}.
    Solve {
        #[arg(long)]
        m: usize,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Curve,
    SurfaceGamma,
    SurfacePoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Verified,
    Failed,
    Infeasible,
    UsageError,
}

impl Status {
    fn exit_code(self) -> u8 {
        match self {
            Status::Verified | Status::Infeasible => 0,
            Status::Failed => 1,
            Status::UsageError => 2,
        }
    }

    fn from_holds(holds: bool) -> Self {
        if holds {
            Status::Verified
        } else {
            Status::Failed
        }
    }
}

#[derive(Serialize)]
struct Report {
    command: String,
    params: BTreeMap<String, String>,
    status: Status,
    details: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

/// A bad parameter value, as opposed to a mathematical outcome.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

struct Outcome {
    command: String,
    params: BTreeMap<String, String>,
    status: Status,
    details: Value,
    /// Raw text to print instead of the JSON report.
    raw: Option<String>,
    out: Option<PathBuf>,
}

impl Outcome {
    fn report(command: &str, params: BTreeMap<String, String>, status: Status, details: Value) -> Self {
        Self {
            command: command.to_string(),
            params,
            status,
            details,
            raw: None,
            out: None,
        }
    }
}

fn combinatorics(max_n: u32) -> Result<(bool, Value)> {
    let bound = max_n as i64;
    let mut pascal_failures = Vec::new();
    for u in -bound..=bound {
        for k in 1..=bound.max(1) {
            let lhs = binom(u, k);
            let rhs = binom(u - 1, k) + binom(u - 1, k - 1);
            if lhs != rhs {
                pascal_failures.push(json!({"u": u, "k": k, "lhs": lhs.to_string(), "rhs": rhs.to_string()}));
            }
        }
    }
    let mut combcomb_failures = Vec::new();
    let mut checks = 0;
    for n in 1..=max_n {
        for deg in 0..n as usize {
            checks += 1;
            if !combcomb_check(n, &IntPolynomial::monomial(deg))? {
                combcomb_failures.push(json!({"n": n, "degree": deg}));
            }
        }
    }
    let holds = pascal_failures.is_empty() && combcomb_failures.is_empty();
    Ok((
        holds,
        json!({
            "pascal_range": bound,
            "pascal_failures": pascal_failures,
            "combcomb_checks": checks,
            "combcomb_failures": combcomb_failures,
        }),
    ))
}

fn table_csv(table: &PhiTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["class".to_string()];
    header.extend(table.columns.iter().map(|c| c.to_string()));
    w.write_record(&header)?;
    for (key, row) in table.rows.iter().zip(&table.entries) {
        let mut rec = vec![key.to_string()];
        rec.extend(row.iter().map(format_rational));
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow!("{e}"))?)?)
}

fn run(command: Command) -> Result<Outcome> {
    Ok(match command {
        Command::Verify(v) => match v {
            Verify::Combinatorics { max_n } => {
                let (holds, details) = combinatorics(max_n)?;
                Outcome::report(
                    "verify combinatorics",
                    params(&[("max_n", max_n.to_string())]),
                    Status::from_holds(holds),
                    details,
                )
            }
            Verify::Product(OrderPair { m, n }) => {
                let ctx = ProductContext::new(m, n).map_err(usage)?;
                let rep = verify_kunneth(&ctx);
                Outcome::report(
                    "verify product",
                    params(&[("m", m.to_string()), ("n", n.to_string())]),
                    Status::from_holds(rep.holds),
                    serde_json::to_value(&rep)?,
                )
            }
            Verify::Blowup { n, e } => {
                let ctx = BlowupContext::new(n, e).map_err(usage)?;
                let rep = verify_blowup(&ctx);
                Outcome::report(
                    "verify blowup",
                    params(&[("n", n.to_string()), ("e", e.to_string())]),
                    Status::from_holds(rep.holds),
                    serde_json::to_value(&rep)?,
                )
            }
            Verify::Stability { m, s } => {
                let rep = verify_stability(m, s).map_err(usage)?;
                Outcome::report(
                    "verify stability",
                    params(&[("m", m.to_string()), ("s", s.to_string())]),
                    Status::from_holds(rep.holds),
                    serde_json::to_value(&rep)?,
                )
            }
            Verify::Bundle { m, r, defect } => {
                if m < 2 || r < 1 || !(1..=2).contains(&defect) {
                    return Err(usage(format!(
                        "need m >= 2, r >= 1 and defect 1 or 2 (got m={m}, r={r}, defect={defect})"
                    )));
                }
                let top = top_bound_check(m, r, defect);
                let coefficients: Vec<_> = (0..=2)
                    .map(|dim_y| verify_bundle_coefficients(m, r, dim_y, SegreConvention::InverseChern))
                    .collect();
                let holds = top.bound_holds
                    && top.equality_characterization_holds
                    && coefficients.iter().all(|c| c.holds);
                Outcome::report(
                    "verify bundle",
                    params(&[("m", m.to_string()), ("r", r.to_string()), ("defect", defect.to_string())]),
                    Status::from_holds(holds),
                    json!({"top_bound": top, "coefficients": coefficients}),
                )
            }
            Verify::BundleVanishing { m, r, case } => {
                let (name, rep) = match case {
                    CaseArg::Curve => ("curve", verify_fibration_curve(m, r)),
                    CaseArg::SurfaceGamma => {
                        ("surface-gamma", verify_fibration_surface(m, r, FibrationCase::SurfaceGammaMMinus1))
                    }
                    CaseArg::SurfacePoint => {
                        ("surface-point", verify_fibration_surface(m, r, FibrationCase::SurfacePointMultiple))
                    }
                };
                let rep = rep.map_err(usage)?;
                Outcome::report(
                    "verify bundle-vanishing",
                    params(&[("m", m.to_string()), ("r", r.to_string()), ("case", name.to_string())]),
                    Status::from_holds(rep.holds),
                    serde_json::to_value(&rep)?,
                )
            }
            Verify::Sommalt { m, ambient } => {
                let rep = verify_sommalt(m, ambient).map_err(usage)?;
                Outcome::report(
                    "verify sommalt",
                    params(&[("m", m.to_string()), ("ambient", ambient.to_string())]),
                    Status::from_holds(rep.membership.is_solution()),
                    serde_json::to_value(&rep)?,
                )
            }
        },
        Command::Doublecover(Doublecover::Table { m, format }) => {
            if m < 2 {
                return Err(usage(format!("need m >= 2, got {m}")));
            }
            let table = PhiTable::build(m)?;
            let mut out = Outcome::report(
                "doublecover table",
                params(&[("m", m.to_string())]),
                Status::Verified,
                serde_json::to_value(&table)?,
            );
            if let Format::Csv = format {
                out.raw = Some(table_csv(&table)?);
            }
            out
        }
        Command::Doublecover(Doublecover::Solve { m, out }) => {
            if m < 2 {
                return Err(usage(format!("need m >= 2, got {m}")));
            }
            let outcome = solve_double_cover(m)?;
            let checked = verify_outcome(m, &outcome)?;
            let status = match (&outcome, checked) {
                (_, false) => Status::Failed,
                (DoubleCoverOutcome::Solution(_), true) => Status::Verified,
                (DoubleCoverOutcome::Infeasible { .. }, true) => Status::Infeasible,
            };
            let mut details = serde_json::to_value(&outcome)?;
            details["independent_check"] = json!(checked);
            let mut rep = Outcome::report("doublecover solve", params(&[("m", m.to_string())]), status, details);
            rep.out = out;
            rep
        }
        Command::Homology { m, n, d } => {
            let dec = torsion_decision(m, n, d).map_err(usage)?;
            Outcome::report(
                "homology",
                params(&[("m", m.to_string()), ("n", n.to_string()), ("d", d.to_string())]),
                Status::Verified,
                serde_json::to_value(&dec)?,
            )
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.jobs {
        if k == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    match run(cli.command).and_then(|o| emit(o, start, cli.no_timing)) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("usage error: {e}");
            ExitCode::from(Status::UsageError.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(o: Outcome, start: Instant, no_timing: bool) -> Result<u8> {
    let code = o.status.exit_code();
    if let Some(raw) = o.raw {
        write_stdout(&raw)?;
        return Ok(code);
    }
    let report = Report {
        command: o.command,
        params: o.params,
        status: o.status,
        details: o.details,
        elapsed_ms: (!no_timing).then(|| start.elapsed().as_millis()),
    };
    let text = serde_json::to_string_pretty(&report)?;
    if let Some(path) = o.out {
        std::fs::write(&path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
    }
    write_stdout(&format!("{text}\n"))?;
    Ok(code)
}

/// A closed pipe on stdout (e.g. `| head`) is not an error.
fn write_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}
