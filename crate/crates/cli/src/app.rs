use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kappa_core::chowq::{partitions, QuotientSpace};
use kappa_core::env::{Env, Fault};
use kappa_core::exactlin::rank;
use kappa_core::setcomb::{character_fixed_points, enumerate_kappa_index, Permutation};
use kappa_core::strata::{enumerate_trees, Kind, ENUMERATION_MAX_N};
use kappa_core::verify::{all_passed, env_pairing_matrix, env_phi_matrix, quotient_trace, Check, CheckReport, DEFAULT_N_MAX};
use kappa_core::Error;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::io;
use crate::runner::run_parallel;
use crate::shared::SharedEnv;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "kappa", version, about = "Exact set-partition quotients, kappa index sets and their pairing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads for cell-parallel work (0 = one per core).
    #[arg(long, global = true, env = "KAPPA_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Inject a fault, e.g. `relation-sign:6:1:0:2` or
    /// `pairing:1,2|3|4|5:1,3,4,5`. Repeatable.
    #[arg(long = "fault", global = true)]
    pub faults: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Pairing,
    Phi,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct CellArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub d: i32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// dim Q_{d,n} and |K^d_n| for every cell up to n-max.
    Dims {
        #[arg(long)]
        n_max: usize,
    },
    /// The pairing matrix on quotient coordinates.
    PairingMatrix(CellArgs),
    /// The matrix of phi on quotient coordinates.
    PhiMatrix(CellArgs),
    /// Either matrix, chosen with --matrix.
    Matrix {
        #[command(flatten)]
        cell: CellArgs,
        #[arg(long, value_enum)]
        matrix: Which,
    },
    /// Relation generators of R_{d,n} and their rank.
    Relations(CellArgs),
    /// Character value of Q_{d,n} at a permutation.
    Character {
        #[command(flatten)]
        cell: CellArgs,
        /// One-line notation, e.g. "2,1,3,4".
        #[arg(long)]
        perm: String,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
        /// Restrict to these checks. Repeatable.
        #[arg(long, value_parser = parse_check)]
        only: Vec<Check>,
    },
    /// Count Type I / Type II stable trees with n legs and dimension d.
    Strata {
        #[command(flatten)]
        cell: CellArgs,
        /// Also list the trees (json only).
        #[arg(long)]
        trees: bool,
    },
}

fn parse_check(s: &str) -> Result<Check, String> {
    Check::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
        format!("unknown check {s:?}; expected one of {}", names.join(", "))
    })
}

/// A failure to carry out a command, as opposed to a failing check.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for Invalid {
    fn from(e: Error) -> Self {
        Invalid(e.to_string())
    }
}

pub struct Output {
    pub text: String,
    pub code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: EXIT_OK }
    }
}

/// Parses `argv` (including the program name) and runs the command,
/// writing to stdout/stderr. Returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(out) => match emit(&cli, &out.text) {
            Ok(()) => out.code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Invalid> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Invalid(e.to_string()))
        }
    }
}

pub fn faults(cli: &Cli) -> Result<Vec<Fault>, Invalid> {
    cli.faults
        .iter()
        .map(|s| {
            let f: Fault = s.parse()?;
            f.validate()?;
            Ok(f)
        })
        .collect()
}

/// Runs the command and renders its output without touching stdout.
pub fn execute(cli: &Cli) -> Result<Output, Invalid> {
    let env = SharedEnv::new(faults(cli)?);
    let fmt = cli.format;
    match &cli.command {
        Command::Dims { n_max } => dims(&env, *n_max, cli.threads, fmt),
        Command::PairingMatrix(c) => matrix(&env, *c, Which::Pairing, fmt),
        Command::PhiMatrix(c) => matrix(&env, *c, Which::Phi, fmt),
        Command::Matrix { cell, matrix: which } => matrix(&env, *cell, *which, fmt),
        Command::Relations(c) => relations(&env, *c, fmt),
        Command::Character { cell, perm } => character(&env, *cell, perm, fmt),
        Command::Verify { n_max, only } => verify(&env, *n_max, only, cli.threads, fmt),
        Command::Strata { cell, trees } => strata(*cell, *trees, fmt),
    }
}

fn json_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn quotient(env: &SharedEnv, c: CellArgs) -> Result<std::sync::Arc<QuotientSpace>, Invalid> {
    Ok(env.quotient(c.n, c.d)?)
}

fn dims(env: &SharedEnv, n_max: usize, threads: usize, fmt: Format) -> Result<Output, Invalid> {
    if !(4..=kappa_core::verify::MAX_VERIFY_N).contains(&n_max) {
        return Err(Invalid(format!("--n-max must lie in 4..={}", kappa_core::verify::MAX_VERIFY_N)));
    }
    let cells: Vec<(usize, i32)> = (4..=n_max).flat_map(|n| (1..=n as i32 - 3).map(move |d| (n, d))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Invalid(e.to_string()))?;
    let rows = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, d)| {
                let q = env.quotient(n, d)?;
                Ok((n, d, q.dim(), enumerate_kappa_index(n, d)?.len(), q.num_partitions(), q.rank_relations()))
            })
            .collect::<Result<Vec<_>, Error>>()
    })?;
    let text = match fmt {
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .map(|&(n, d, dim, k, p, r)| {
                    json!({"n": n, "d": d, "dim": dim, "kappa_index_size": k, "num_partitions": p, "rank_relations": r})
                })
                .collect(),
        )),
        Format::Csv | Format::Table => {
            let headers: Vec<String> =
                ["n", "d", "dim", "kappa_index_size", "num_partitions", "rank_relations"].map(String::from).to_vec();
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|&(n, d, dim, k, p, r)| {
                    vec![n.to_string(), d.to_string(), dim.to_string(), k.to_string(), p.to_string(), r.to_string()]
                })
                .collect();
            if fmt == Format::Csv {
                io::csv_string(&[vec![headers], body].concat())
            } else {
                io::table(&headers, &body)
            }
        }
    };
    Ok(Output::ok(text))
}

fn matrix(env: &SharedEnv, c: CellArgs, which: Which, fmt: Format) -> Result<Output, Invalid> {
    let q = quotient(env, c)?;
    let m = match which {
        Which::Pairing => env_pairing_matrix(env, &q)?,
        Which::Phi => env_phi_matrix(env, &q)?,
    };
    let row_labels: Vec<String> = q.basis().iter().map(|p| p.to_string()).collect();
    let text = match fmt {
        Format::Json => {
            let mut v = io::matrix_json(c.n, c.d, &row_labels, &m);
            v["rank"] = json!(rank(&m));
            json_text(&v)
        }
        Format::Csv => io::matrix_csv(&row_labels, &m),
        Format::Table => io::matrix_table(&row_labels, &m),
    };
    Ok(Output::ok(text))
}

fn relations(env: &SharedEnv, c: CellArgs, fmt: Format) -> Result<Output, Invalid> {
    let q = quotient(env, c)?;
    let gens = if c.d <= c.n as i32 - 4 { env.relation_generators(c.n, c.d)? } else { Vec::new() };
    let text = match fmt {
        Format::Json => json_text(&json!({
            "n": c.n,
            "d": c.d,
            "dim": q.dim(),
            "num_partitions": q.num_partitions(),
            "rank_relations": q.rank_relations(),
            "generators": gens.iter().map(|g| io::sum_json(g.sum())).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let mut lines = vec![["generator", "label", "coefficient"].map(String::from).to_vec()];
            for (i, g) in gens.iter().enumerate() {
                for (l, x) in g.sum().iter() {
                    lines.push(vec![i.to_string(), l.to_string(), x.to_string()]);
                }
            }
            io::csv_string(&lines)
        }
        Format::Table => {
            let mut s = format!(
                "generators: {}\nrank: {}\npartitions: {}\ndim: {}\n",
                gens.len(),
                q.rank_relations(),
                q.num_partitions(),
                q.dim()
            );
            for g in &gens {
                s += &format!("{}\n", g.sum());
            }
            s
        }
    };
    Ok(Output::ok(text))
}

fn character(env: &SharedEnv, c: CellArgs, perm: &str, fmt: Format) -> Result<Output, Invalid> {
    let g = Permutation::parse(perm)?;
    if g.degree() != c.n {
        return Err(Invalid(format!("permutation has degree {}, expected {}", g.degree(), c.n)));
    }
    let q = quotient(env, c)?;
    let value = character_fixed_points(c.n, c.d, &g)?;
    let trace = quotient_trace(&q, &g)?;
    let text = match fmt {
        Format::Json => json_text(&json!({
            "n": c.n, "d": c.d, "perm": g.to_string(), "value": value, "trace": trace.to_string(),
        })),
        Format::Csv => io::csv_string(&[
            ["n", "d", "perm", "value", "trace"].map(String::from).to_vec(),
            vec![c.n.to_string(), c.d.to_string(), g.to_string(), value.to_string(), trace.to_string()],
        ]),
        Format::Table => format!("{value}\n"),
    };
    Ok(Output::ok(text))
}

fn verify(env: &SharedEnv, n_max: usize, only: &[Check], threads: usize, fmt: Format) -> Result<Output, Invalid> {
    let checks: Vec<Check> = if only.is_empty() {
        Check::ALL.to_vec()
    } else {
        Check::ALL.into_iter().filter(|c| only.contains(c)).collect()
    };
    let reports = run_parallel(env, &checks, n_max, threads)?;
    let code = if all_passed(&reports) { EXIT_OK } else { EXIT_FAIL };
    let text = match fmt {
        Format::Json => reports.iter().map(|r| io::report_json(r).to_string() + "\n").collect(),
        Format::Csv => {
            let mut lines = vec![["check", "params", "status", "vacuous", "witness"].map(String::from).to_vec()];
            for r in &reports {
                lines.push(vec![
                    r.check.name().to_string(),
                    r.params.to_string(),
                    io::status_str(r.status).to_string(),
                    r.vacuous.to_string(),
                    io::report_json(r)["witness"].to_string(),
                ]);
            }
            io::csv_string(&lines)
        }
        Format::Table => summary_table(&checks, &reports),
    };
    Ok(Output { text, code })
}

/// One line per check, then the witness of every failing cell.
pub fn summary_table(checks: &[Check], reports: &[CheckReport]) -> String {
    let headers: Vec<String> = ["check", "cells", "pass", "fail", "vacuous"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for &c in checks {
        let mine: Vec<&CheckReport> = reports.iter().filter(|r| r.check == c).collect();
        let pass = mine.iter().filter(|r| r.passed()).count();
        let vacuous = mine.iter().filter(|r| r.vacuous).count();
        rows.push(vec![
            c.name().to_string(),
            mine.len().to_string(),
            pass.to_string(),
            (mine.len() - pass).to_string(),
            vacuous.to_string(),
        ]);
    }
    let mut out = io::table(&headers, &rows);
    for r in reports.iter().filter(|r| !r.passed()) {
        out += &format!("FAIL {} {}: {}\n", r.check, r.params, io::report_json(r)["witness"]);
    }
    out += if all_passed(reports) { "all checks passed\n" } else { "some checks failed\n" };
    out
}

fn strata(c: CellArgs, list: bool, fmt: Format) -> Result<Output, Invalid> {
    if !(3..=ENUMERATION_MAX_N).contains(&c.n) || c.d < 0 || c.d > c.n as i32 - 3 {
        return Err(Invalid(format!("strata needs 3 <= n <= {ENUMERATION_MAX_N} and 0 <= d <= n-3")));
    }
    let trees = enumerate_trees(c.n, c.d as usize)?;
    let count = |k: Kind| trees.iter().filter(|t| t.classify() == k).count();
    let (type_i, type_ii, points) = (count(Kind::TypeI), count(Kind::TypeII), count(Kind::Point));
    // Type I classes realize every (d+3)-block partition
    let partitions_count = if c.d >= 1 { partitions(c.n, c.d)?.len() } else { 0 };
    let text = match fmt {
        Format::Json => {
            let mut v = json!({
                "n": c.n, "d": c.d, "trees": trees.len(), "type_i": type_i, "type_ii": type_ii, "points": points,
                "partitions": partitions_count,
            });
            if list {
                v["tree_list"] = trees
                    .iter()
                    .map(|t| {
                        let mut j = io::tree_json(t);
                        j["kind"] = json!(format!("{:?}", t.classify()));
                        j
                    })
                    .collect();
            }
            json_text(&v)
        }
        Format::Csv => io::csv_string(&[
            ["n", "d", "trees", "type_i", "type_ii", "points"].map(String::from).to_vec(),
            [c.n, c.d as usize, trees.len(), type_i, type_ii, points].map(|x| x.to_string()).to_vec(),
        ]),
        Format::Table => io::table(
            &["n", "d", "trees", "type_i", "type_ii", "points"].map(String::from),
            &[[c.n, c.d as usize, trees.len(), type_i, type_ii, points].map(|x| x.to_string()).to_vec()],
        ),
    };
    Ok(Output::ok(text))
}
