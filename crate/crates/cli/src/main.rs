use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use realpos::algebra::{self, GenMode};
use realpos::gen::{self, AlgebraKind};
use realpos::interp::{self, InterpOptions, Interpolant, NEAR_EPS};
use realpos::powers::{self, Method};
use realpos::projections::{self, ProjMethod};
use realpos::tol::PSD_SLACK;
use realpos::{cones, transforms, ComplexMatrix, Tolerances};
use realpos_cli::input::{self, AlgebraInput, InterpProblem, MatrixInput};
use realpos_cli::suites::{self, RunConfig, SUITES};
use realpos_cli::{CliError, CliResult, EXIT_FAILED, EXIT_OK};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "realpos", version, about = "Real-positive cones, fractional powers and interpolation in matrix algebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Equality tolerance; the PSD slack is raised to match when smaller.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON result here instead of standard output.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Write tabular output (numerical range, per-case suite margins) here as CSV.
    #[arg(long, global = true)]
    csv_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Cone memberships, sector angle and c-constant of a matrix.
    Check {
        matrix: PathBuf,
        /// Also decide strict real positivity in this algebra.
        #[arg(long)]
        algebra: Option<String>,
        /// Exit with status 1 unless this predicate holds.
        #[arg(long, value_enum)]
        require: Option<Predicate>,
    },
    /// Cayley transform, F-transform or its inverse.
    Transform {
        matrix: PathBuf,
        #[arg(long, value_enum)]
        op: TransformOp,
    },
    /// Principal power `x^alpha` of an accretive matrix.
    Power {
        matrix: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = PowerMethod::Auto)]
        method: PowerMethod,
        /// Quadrature nodes, or series terms.
        #[arg(long, default_value_t = 128)]
        nodes: usize,
    },
    /// Support or peak projection.
    Project {
        matrix: PathBuf,
        #[arg(long, value_enum)]
        kind: ProjKind,
        #[arg(long, value_enum, default_value_t = ProjChoice::Both)]
        method: ProjChoice,
    },
    /// Support function and boundary points of the numerical range.
    Range {
        matrix: PathBuf,
        #[arg(long, default_value_t = 720)]
        grid: usize,
    },
    /// Build and inspect operator algebras.
    #[command(subcommand)]
    Algebra(AlgebraCommand),
    /// Seeded random test inputs.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Solve an interpolation problem.
    Interp {
        #[arg(long, value_enum)]
        theorem: Theorem,
        #[arg(long)]
        problem: PathBuf,
    },
    /// Run verification suites.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum AlgebraCommand {
    /// Algebra generated by matrices.
    Generate {
        #[arg(required = true)]
        matrices: Vec<PathBuf>,
        #[arg(long)]
        cstar: bool,
        #[arg(long)]
        unital: bool,
    },
    /// Largest approximately unital subalgebra.
    #[command(name = "a-h")]
    AH {
        algebra: String,
        #[arg(long, default_value_t = 64)]
        directions: usize,
    },
    /// `M_k(A)`.
    Amplify {
        algebra: String,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random accretive matrix.
    Accretive {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        singular: bool,
    },
    /// Random element of ½𝔉.
    HalfF {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        norm_one: bool,
    },
    /// Canned algebra of the given kind.
    Algebra {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "upper")]
        kind: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    suites: Vec<String>,
    #[arg(long, conflicts_with = "suites")]
    all: bool,
    #[arg(long)]
    list: bool,
    #[arg(long)]
    cases: Option<usize>,
    /// Dimension range as `LO..HI` or a single `N`.
    #[arg(long, value_parser = parse_sizes)]
    sizes: Option<(usize, usize)>,
    #[arg(long)]
    dump_dir: Option<PathBuf>,
    /// Rerun the single case with this seed (from a failure report).
    #[arg(long)]
    replay: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Predicate {
    Accretive,
    F,
    HalfF,
    C,
    Sectorial,
    StrictlyRealPositive,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformOp {
    Cayley,
    F,
    Finv,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum PowerMethod {
    Auto,
    Spectral,
    Balakrishnan,
    Series,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjKind {
    Support,
    Peak,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProjChoice {
    Iterative,
    Oracle,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum Theorem {
    Dominate,
    Decompose,
    Np,
    Urysohn,
    StrictUrysohn,
    Peak,
    Tietze,
}

fn parse_sizes(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
    match s.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi.trim_start_matches('='))?)),
        None => parse(s).map(|n| (n, n)),
    }
}

fn tolerances(g: &Global) -> CliResult<Tolerances> {
    let d = Tolerances::default();
    match g.tol {
        None => Ok(d),
        Some(t) => Ok(Tolerances::new(t, d.psd_slack.max(t).max(PSD_SLACK), d.iter_tol, d.max_iter)?),
    }
}

fn emit<T: Serialize>(g: &Global, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    match &g.json_out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn write_csv(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn check(g: &Global, tol: &Tolerances, path: &Path, algebra: Option<&str>, require: Option<Predicate>) -> CliResult<i32> {
    let x = input::read_matrix(path)?;
    let report = cones::cone_report(&x, tol);
    let f = cones::f_membership(&x, tol);
    let srp = match algebra {
        Some(spec) => Some(cones::is_strictly_real_positive(&input::algebra_arg(spec)?, &x, tol)?),
        None => None,
    };
    let holds = match require {
        None => None,
        Some(Predicate::Accretive) => Some(cones::is_accretive(&x, tol).holds),
        Some(Predicate::F) => Some(f.in_f),
        Some(Predicate::HalfF) => Some(f.in_half_f),
        Some(Predicate::C) => Some(report.c_constant.is_some()),
        Some(Predicate::Sectorial) => Some(report.sector_angle.is_some_and(|a| a < std::f64::consts::FRAC_PI_2)),
        Some(Predicate::StrictlyRealPositive) => Some(
            srp.ok_or_else(|| CliError::Input("--require strictly-real-positive needs --algebra".into()))?,
        ),
    };
    emit(
        g,
        &json!({
            "n": x.n(),
            "report": report,
            "in_f": f.in_f,
            "in_half_f": f.in_half_f,
            "strictly_real_positive": srp,
            "required": holds,
        }),
    )?;
    Ok(if holds == Some(false) { EXIT_FAILED } else { EXIT_OK })
}

fn power(g: &Global, tol: &Tolerances, path: &Path, alpha: f64, method: PowerMethod, nodes: usize) -> CliResult<()> {
    let x = input::read_matrix(path)?;
    let r = match method {
        PowerMethod::Auto => powers::power(&x, alpha, tol)?,
        PowerMethod::Spectral => powers::power_spectral(&x, alpha, tol)?,
        PowerMethod::Balakrishnan => powers::power_balakrishnan(&x, alpha, nodes, tol)?,
        PowerMethod::Series => {
            let m = (1.0 / alpha).round();
            if !(m >= 1.0 && (1.0 / m - alpha).abs() < 1e-12) {
                return Err(CliError::Input(format!("the series computes 1/m-th roots; alpha = {alpha} is not of that form")));
            }
            powers::root_series(&x, m as u32, nodes, tol)?
        }
    };
    debug_assert!(method != PowerMethod::Series || r.method == Method::Series);
    emit(g, &r)
}

fn project(g: &Global, tol: &Tolerances, path: &Path, kind: ProjKind, method: ProjChoice) -> CliResult<()> {
    let x = input::read_matrix(path)?;
    let method = match method {
        ProjChoice::Iterative => ProjMethod::Iterative,
        ProjChoice::Oracle => ProjMethod::Oracle,
        ProjChoice::Both => ProjMethod::Both,
    };
    let r = match kind {
        ProjKind::Support => projections::support_projection(&x, method, tol)?,
        ProjKind::Peak => projections::peak_projection(&x, method, tol)?,
    };
    emit(g, &r)
}

fn range(g: &Global, path: &Path, grid: usize) -> CliResult<()> {
    let x = input::read_matrix(path)?;
    let r = cones::numerical_range(&x, grid)?;
    let mut csv = String::from("theta,support,boundary_re,boundary_im\n");
    for ((t, h), z) in r.thetas.iter().zip(&r.support).zip(&r.boundary) {
        csv.push_str(&format!("{t:.17e},{h:.17e},{:.17e},{:.17e}\n", z.re, z.im));
    }
    write_csv(g.csv_out.as_deref(), &csv)?;
    if g.json_out.is_some() {
        emit(g, &r)?;
    }
    Ok(())
}

fn algebra_cmd(g: &Global, tol: &Tolerances, cmd: &AlgebraCommand) -> CliResult<()> {
    match cmd {
        AlgebraCommand::Generate { matrices, cstar, unital } => {
            let gens = matrices
                .iter()
                .map(|p| input::read_json::<MatrixInput>(p))
                .collect::<CliResult<Vec<_>>>()?;
            let a = AlgebraInput::Generated {
                generators: gens,
                mode: Some(if *cstar { GenMode::Cstar } else { GenMode::Algebra }),
                with_identity: *unital,
            }
            .into_algebra()?;
            emit(g, &json!({ "dim": a.dim(), "algebra": a }))
        }
        AlgebraCommand::AH { algebra, directions } => {
            let a = input::algebra_arg(algebra)?;
            let r = algebra::a_h(&a, *directions, g.seed, tol);
            emit(g, &json!({ "dim": r.algebra.dim(), "report": r }))
        }
        AlgebraCommand::Amplify { algebra, k } => {
            let a = input::algebra_arg(algebra)?;
            let m = algebra::amplify(&a, *k)?;
            input::check_dim(m.ambient_dim)?;
            emit(g, &json!({ "dim": m.dim(), "algebra": m }))
        }
    }
}

fn gen_cmd(g: &Global, cmd: &GenCommand) -> CliResult<()> {
    let mut rng = gen::rng(g.seed, 0);
    match cmd {
        GenCommand::Accretive { n, singular } => {
            input::check_dim(*n)?;
            let x = if *singular {
                gen::gen_accretive_singular(*n, &mut rng)?
            } else {
                gen::gen_accretive(*n, &mut rng)?
            };
            emit(g, &x)
        }
        GenCommand::HalfF { n, norm_one } => {
            input::check_dim(*n)?;
            let x = if *norm_one {
                gen::gen_half_f_norm_one(*n, &mut rng)?
            } else {
                gen::gen_half_f(*n, &mut rng)?
            };
            emit(g, &x)
        }
        GenCommand::Algebra { n, kind } => {
            input::check_dim(*n)?;
            let kind: AlgebraKind = kind.parse()?;
            emit(g, &gen::gen_algebra(kind, *n, &mut rng)?)
        }
    }
}

fn interp_cmd(g: &Global, tol: &Tolerances, theorem: Theorem, path: &Path) -> CliResult<i32> {
    let problem: InterpProblem = input::read_json(path)?;
    let a = problem.algebra.clone().into_algebra()?;
    let n = a.ambient_dim;
    let m = |field: &Option<MatrixInput>, name: &str| InterpProblem::matrix(field, name, n);
    let opts = InterpOptions {
        seed: problem.seed.unwrap_or(g.seed),
        tol: *tol,
        ..InterpOptions::default()
    };
    let near = problem.near_eps.unwrap_or(NEAR_EPS);
    let out: realpos::Result<Interpolant> = match theorem {
        Theorem::Dominate => interp::dominate(&a, &m(&problem.b, "b")?, near, &opts),
        Theorem::Decompose => interp::decompose(&a, &m(&problem.b, "b")?, &opts),
        Theorem::Np => interp::interp_np(&a, &m(&problem.c, "c")?, near, &opts),
        Theorem::Urysohn => {
            let eps = problem
                .eps
                .ok_or_else(|| CliError::Input("problem is missing 'eps'".into()))?;
            interp::urysohn_interpolate(&a, &m(&problem.q, "q")?, &m(&problem.u, "u")?, eps, near, &opts)
        }
        Theorem::StrictUrysohn => interp::strict_urysohn(&a, &m(&problem.q, "q")?, &m(&problem.p, "p")?, &opts),
        Theorem::Peak => interp::peak_interpolate(&a, &m(&problem.q, "q")?, &m(&problem.b, "b")?, &opts),
        Theorem::Tietze => interp::tietze_lift(&a, &m(&problem.q, "q")?, &m(&problem.b, "b")?, &problem.region()?, &opts),
    };
    let r = match out {
        Err(realpos::Error::NoConvergence(msg)) => {
            emit(g, &json!({ "verdict": "unconverged", "message": msg }))?;
            return Ok(EXIT_FAILED);
        }
        other => other?,
    };
    emit(
        g,
        &json!({
            "value": r.value,
            "second": r.second,
            "checks": r.checks,
            "verdict": r.verdict,
            "iterations": r.iterations,
            "attempts": r.attempts,
        }),
    )?;
    Ok(if r.is_feasible() { EXIT_OK } else { EXIT_FAILED })
}

fn verify(g: &Global, tol: &Tolerances, args: &VerifyArgs) -> CliResult<i32> {
    if args.list {
        let list: Vec<Value> = SUITES
            .iter()
            .map(|s| json!({ "name": s.name, "about": s.about, "cases": s.cases, "sizes": s.sizes }))
            .collect();
        emit(g, &list)?;
        return Ok(EXIT_OK);
    }
    let names: Vec<String> = if args.all {
        SUITES.iter().map(|s| s.name.to_string()).collect()
    } else if args.suites.is_empty() {
        return Err(CliError::Input("name suites to run, or pass --all or --list".into()));
    } else {
        args.suites.clone()
    };
    if args.replay.is_some() && names.len() != 1 {
        return Err(CliError::Input("--replay needs exactly one suite".into()));
    }
    for name in &names {
        suites::find_suite(name)?;
    }
    let cfg = RunConfig {
        seed: g.seed,
        sizes: args.sizes,
        cases: args.cases,
        tol: *tol,
        dump_dir: args.dump_dir.clone(),
        replay: args.replay,
    };
    let mut reports = Vec::with_capacity(names.len());
    for name in &names {
        let r = suites::run_suite(name, &cfg)?;
        eprintln!("{}", r.summary());
        reports.push(r);
    }
    let passed = reports.iter().all(|r| r.passed);
    if let Some(path) = &g.csv_out {
        std::fs::write(path, suites::margins_csv(&reports))?;
    }
    emit(g, &json!({ "passed": passed, "suites": reports }))?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn run(cli: &Cli) -> CliResult<i32> {
    let g = &cli.global;
    let tol = tolerances(g)?;
    match &cli.command {
        Command::Check { matrix, algebra, require } => check(g, &tol, matrix, algebra.as_deref(), *require),
        Command::Transform { matrix, op } => {
            let x = input::read_matrix(matrix)?;
            let y: ComplexMatrix = match op {
                TransformOp::Cayley => transforms::cayley(&x)?,
                TransformOp::F => transforms::f_transform(&x)?,
                TransformOp::Finv => transforms::f_inverse(&x)?,
            };
            emit(g, &y)?;
            Ok(EXIT_OK)
        }
        Command::Power { matrix, alpha, method, nodes } => power(g, &tol, matrix, *alpha, *method, *nodes).map(|_| EXIT_OK),
        Command::Project { matrix, kind, method } => project(g, &tol, matrix, *kind, *method).map(|_| EXIT_OK),
        Command::Range { matrix, grid } => range(g, matrix, *grid).map(|_| EXIT_OK),
        Command::Algebra(cmd) => algebra_cmd(g, &tol, cmd).map(|_| EXIT_OK),
        Command::Gen(cmd) => gen_cmd(g, cmd).map(|_| EXIT_OK),
        Command::Interp { theorem, problem } => interp_cmd(g, &tol, *theorem, problem),
        Command::Verify(args) => verify(g, &tol, args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
