//! Command-line front end: load and check algebras, maps and modules, run
//! the bounded-degree solvers, and emit deterministic reports.
//!
//! Exit codes: 0 when every check passed (solve commands exit 0 regardless
//! of the dimension found), 1 when a check failed, 2 on parse, schema or
//! symbolic-parameter errors.  Set `CONFKERNEL_THREADS` to cap internal
//! parallelism.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use confkernel::algebra::Parity;
use confkernel::catalog::{self, ParamValue, Params};
use confkernel::error::Error;
use confkernel::report::{Report, SolveSummary};
use confkernel::{bider, maps, modules, poly, solver, Rational};

#[derive(Parser)]
#[command(name = "confkernel", version, about = "Exact-arithmetic kernel for finite Lie conformal superalgebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify axioms of an algebra, map, bilinear map or module.
    Check {
        #[command(subcommand)]
        target: CheckTarget,
    },
    /// Enumerate a bounded-degree solution space.
    Solve {
        #[command(subcommand)]
        kind: SolveKind,
    },
    /// Inspect the built-in catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Re-render a saved JSON report.
    Report {
        /// Path to a report produced with `--output`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List built-in algebras and module families.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Even => Parity::Even,
            ParityArg::Odd => Parity::Odd,
        }
    }
}

/// Shared output options.
#[derive(Args)]
struct OutputOpts {
    /// Rendering printed to stdout.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also write the JSON report to this file.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Shared algebra-selection options.
#[derive(Args)]
struct AlgebraOpts {
    /// Built-in catalog key.
    #[arg(long)]
    algebra: String,
    /// Parameter assignment `name=p/q`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// Shorthand for `--param alpha=VALUE`.
    #[arg(long)]
    alpha: Option<String>,
    /// Shorthand for `--param beta=VALUE`.
    #[arg(long)]
    beta: Option<String>,
    /// Shorthand for `--param gamma=VALUE`.
    #[arg(long)]
    gamma: Option<String>,
    /// Shorthand for `--param tau=VALUE`.
    #[arg(long)]
    tau: Option<String>,
}

#[derive(Subcommand)]
enum CheckTarget {
    /// Skew-symmetry, Jacobi and parity closure of a bracket table.
    Algebra {
        #[arg(long, conflicts_with = "file")]
        builtin: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        /// Leave all unassigned parameters symbolic.
        #[arg(long)]
        symbolic: bool,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Conformal linear map from file: derivation or automorphism axioms.
    Map {
        #[arg(long)]
        file: PathBuf,
        #[command(flatten)]
        alg: AlgebraOpts,
        /// Check the homomorphism/automorphism axioms instead of Leibniz.
        #[arg(long)]
        automorphism: bool,
        /// Leave all unassigned algebra parameters symbolic.
        #[arg(long)]
        symbolic: bool,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Conformal bilinear map from file: biderivation axioms.
    Bimap {
        #[arg(long)]
        file: PathBuf,
        #[command(flatten)]
        alg: AlgebraOpts,
        /// Leave all unassigned algebra parameters symbolic.
        #[arg(long)]
        symbolic: bool,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Module compatibility axiom of a built-in family or module file.
    Module {
        #[arg(long, conflicts_with = "file")]
        builtin: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[command(flatten)]
        out: OutputOpts,
    },
}

#[derive(Subcommand)]
enum SolveKind {
    /// Conformal derivations of bounded degree, split inner/outer.
    Derivations {
        #[command(flatten)]
        alg: AlgebraOpts,
        #[arg(long, value_enum)]
        parity: ParityArg,
        /// Degree bound in the ∂ direction (and in λ unless overridden).
        #[arg(long)]
        bound: u32,
        #[arg(long = "bound-lam")]
        bound_lam: Option<u32>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Conformal biderivations of bounded degree.
    Biderivations {
        #[command(flatten)]
        alg: AlgebraOpts,
        #[arg(long)]
        bound: u32,
        #[arg(long = "bound-lam")]
        bound_lam: Option<u32>,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// The key functional equation in three constants a, b, c.
    Keyeq {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        bound: u32,
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Rank-(1+1) odd module actions over a rank-(2+1) algebra.
    Modules {
        #[command(flatten)]
        alg: AlgebraOpts,
        /// Even weight on the first basis vector.
        #[arg(long)]
        delta0: String,
        /// Even weight on the second basis vector.
        #[arg(long)]
        delta1: String,
        /// Translation constant of the even action.
        #[arg(long)]
        a: String,
        /// Scalar by which the second even generator acts.
        #[arg(long)]
        b: String,
        #[arg(long)]
        bound: u32,
        #[command(flatten)]
        out: OutputOpts,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("CONFKERNEL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli.command) {
        Ok(code) => {
            eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
            code
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Catalog { action: CatalogAction::List } => {
            print!("{}", render_catalog());
            Ok(ExitCode::SUCCESS)
        }
        Command::Report { input, format } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Error::io(input.display().to_string(), e))?;
            let report = Report::from_json(&text)?;
            emit(&report, format, None)?;
            Ok(exit_for(&report))
        }
        Command::Check { target } => run_check(target),
        Command::Solve { kind } => run_solve(kind),
    }
}

fn render_catalog() -> String {
    let mut out = String::from("built-in algebras:\n");
    for entry in catalog::list() {
        out.push_str(&format!("  {}", entry.key));
        if !entry.aliases.is_empty() {
            out.push_str(&format!(" (aliases: {})", entry.aliases.join(", ")));
        }
        if !entry.params.is_empty() {
            let names: Vec<String> = entry
                .params
                .iter()
                .map(|(n, nz, d)| {
                    let mut s = n.clone();
                    if *nz {
                        s.push_str(" (nonzero)");
                    }
                    if let Some(d) = d {
                        s.push_str(&format!(" [default {d}]"));
                    }
                    s
                })
                .collect();
            out.push_str(&format!(" — params: {}", names.join(", ")));
        }
        out.push_str(&format!("\n      {}\n", entry.description));
    }
    out.push_str("built-in module families:\n");
    for fam in modules::families() {
        out.push_str(&format!(
            "  {} over {} — params: {}\n      {}\n",
            fam.key,
            fam.algebra,
            fam.params.join(", "),
            fam.description
        ));
    }
    out
}

/// Parse repeated `name=p/q` assignments into catalog parameters.
fn parse_params(pairs: &[String]) -> Result<Params, Error> {
    let mut params = Params::new();
    for pair in pairs {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::Schema(format!("`--param {pair}` is not of the form name=p/q")))?;
        params.insert(name.trim().to_string(), ParamValue::Rational(parse_rational(value)?));
    }
    Ok(params)
}

fn parse_rational(text: &str) -> Result<Rational, Error> {
    poly::rational(text.trim())
        .ok_or_else(|| Error::Schema(format!("`{}` is not a rational p/q", text.trim())))
}

/// Resolve an `AlgebraOpts` block into a built algebra plus echoed params.
fn build_algebra(opts: &AlgebraOpts, symbolic: bool) -> Result<(confkernel::algebra::LcsAlgebra, Params), Error> {
    let mut params = parse_params(&opts.params)?;
    for (name, flag) in [
        ("alpha", &opts.alpha),
        ("beta", &opts.beta),
        ("gamma", &opts.gamma),
        ("tau", &opts.tau),
    ] {
        if let Some(value) = flag {
            params.insert(name.to_string(), ParamValue::Rational(parse_rational(value)?));
        }
    }
    if symbolic {
        mark_symbolic(&opts.algebra, &mut params)?;
    }
    let alg = catalog::build_algebra(&opts.algebra, &params)?;
    Ok((alg, params))
}

/// Mark every schema parameter without an explicit value as symbolic.
fn mark_symbolic(key: &str, params: &mut Params) -> Result<(), Error> {
    let entry = catalog::list()
        .into_iter()
        .find(|e| e.key == key || e.aliases.contains(&key))
        .ok_or_else(|| Error::UnknownKey(key.into()))?;
    for (name, _, _) in &entry.params {
        params.entry(name.clone()).or_insert(ParamValue::Symbolic);
    }
    Ok(())
}

fn echo_params(report: &mut Report, params: &Params) {
    for (name, value) in params {
        match value {
            ParamValue::Rational(r) => report.add_param(name, r.to_string()),
            ParamValue::Symbolic => report.add_param(name, name.clone()),
        }
    }
}

fn command_echo() -> String {
    std::env::args().skip(1).collect::<Vec<_>>().join(" ")
}

fn emit(report: &Report, format: Format, output: Option<&PathBuf>) -> Result<(), Error> {
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
    if let Some(path) = output {
        std::fs::write(path, report.to_json())
            .map_err(|e| Error::io(path.display().to_string(), e))?;
    }
    Ok(())
}

fn exit_for(report: &Report) -> ExitCode {
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn finish(mut report: Report, out: &OutputOpts, started: Instant) -> Result<ExitCode, Error> {
    report.elapsed = Some(started.elapsed());
    emit(&report, out.format, out.output.as_ref())?;
    Ok(exit_for(&report))
}

fn run_check(target: CheckTarget) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let mut report = Report::new(command_echo());
    match target {
        CheckTarget::Algebra { builtin, file, params, symbolic, out } => {
            let params = parse_params(&params)?;
            let alg = match (&builtin, &file) {
                (Some(key), None) => {
                    let mut params = params.clone();
                    if symbolic {
                        mark_symbolic(key, &mut params)?;
                    }
                    let alg = catalog::build_algebra(key, &params)?;
                    echo_params(&mut report, &params);
                    alg
                }
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::io(path.display().to_string(), e))?;
                    report.add_input("algebra", text.as_bytes());
                    catalog::from_text(&text, &path.display().to_string())?
                }
                _ => return Err(Error::Schema("give exactly one of --builtin or --file".into())),
            };
            if builtin.is_some() {
                report.add_input("algebra", catalog::to_text(&alg).as_bytes());
            }
            report.push_checks(alg.check_all()?);
            finish(report, &out, started)
        }
        CheckTarget::Map { file, alg, automorphism, symbolic, out } => {
            let (algebra, params) = build_algebra(&alg, symbolic)?;
            echo_params(&mut report, &params);
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::io(file.display().to_string(), e))?;
            report.add_input("map", text.as_bytes());
            if automorphism {
                let sigma = maps::partial_endo_from_text(&text, &file.display().to_string(), &algebra)?;
                report.push_check(maps::is_automorphism(&sigma, &algebra)?);
            } else {
                let d = maps::conformal_end_from_text(&text, &file.display().to_string(), &algebra)?;
                report.push_check(maps::is_derivation(&algebra, &d)?);
            }
            finish(report, &out, started)
        }
        CheckTarget::Bimap { file, alg, symbolic, out } => {
            let (algebra, params) = build_algebra(&alg, symbolic)?;
            echo_params(&mut report, &params);
            let text = std::fs::read_to_string(&file)
                .map_err(|e| Error::io(file.display().to_string(), e))?;
            report.add_input("bimap", text.as_bytes());
            let phi = bider::from_text(&text, &file.display().to_string(), &algebra)?;
            report.push_checks(bider::is_biderivation(&algebra, &phi)?);
            finish(report, &out, started)
        }
        CheckTarget::Module { builtin, file, params, out } => {
            let params = parse_params(&params)?;
            let module = match (builtin, file) {
                (Some(key), None) => modules::build_module(&key, &params)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::io(path.display().to_string(), e))?;
                    report.add_input("module", text.as_bytes());
                    modules::from_text(&text, &path.display().to_string())?
                }
                _ => return Err(Error::Schema("give exactly one of --builtin or --file".into())),
            };
            echo_params(&mut report, &params);
            report.add_input("module", modules::to_text(&module).as_bytes());
            report.push_check(modules::is_module(&module)?);
            finish(report, &out, started)
        }
    }
}

fn run_solve(kind: SolveKind) -> Result<ExitCode, Error> {
    let started = Instant::now();
    let mut report = Report::new(command_echo());
    match kind {
        SolveKind::Derivations { alg, parity, bound, bound_lam, out } => {
            let (algebra, params) = build_algebra(&alg, false)?;
            echo_params(&mut report, &params);
            report.add_input("algebra", catalog::to_text(&algebra).as_bytes());
            let bl = bound_lam.unwrap_or(bound);
            let space = solver::solve_derivations(&algebra, parity.into(), bound, bl)?;
            report.set_solve(SolveSummary::from_derivations(
                &algebra,
                &[("deg_del", bound), ("deg_lam", bl)],
                &space,
            ));
            finish(report, &out, started)
        }
        SolveKind::Biderivations { alg, bound, bound_lam, out } => {
            let (algebra, params) = build_algebra(&alg, false)?;
            echo_params(&mut report, &params);
            report.add_input("algebra", catalog::to_text(&algebra).as_bytes());
            let bl = bound_lam.unwrap_or(bound);
            let space = solver::solve_biderivations(&algebra, bound, bl)?;
            report.set_solve(SolveSummary::from_biderivations(
                &algebra,
                &[("deg_del", bound), ("deg_lam", bl)],
                &space,
            ));
            finish(report, &out, started)
        }
        SolveKind::Keyeq { a, b, c, bound, out } => {
            let (a, b, c) = (parse_rational(&a)?, parse_rational(&b)?, parse_rational(&c)?);
            report.add_param("a", a.to_string());
            report.add_param("b", b.to_string());
            report.add_param("c", c.to_string());
            let sol = solver::solve_keyeq(&a, &b, &c, bound)?;
            report.set_solve(SolveSummary::from_basis("keyeq", &[("deg", bound)], &sol));
            finish(report, &out, started)
        }
        SolveKind::Modules { alg, delta0, delta1, a, b, bound, out } => {
            let (algebra, params) = build_algebra(&alg, false)?;
            echo_params(&mut report, &params);
            report.add_input("algebra", catalog::to_text(&algebra).as_bytes());
            let (d0, d1) = (parse_rational(&delta0)?, parse_rational(&delta1)?);
            let (a, b) = (parse_rational(&a)?, parse_rational(&b)?);
            report.add_param("delta0", d0.to_string());
            report.add_param("delta1", d1.to_string());
            report.add_param("a", a.to_string());
            report.add_param("b", b.to_string());
            let found = modules::discover_rank11(&algebra, &d0, &d1, &a, &b, bound)?;
            report.set_solve(SolveSummary::from_basis(
                "modules",
                &[("deg", bound)],
                &found.basis,
            ));
            finish(report, &out, started)
        }
    }
}
