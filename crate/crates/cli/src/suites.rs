//! Verification suites.
//!
//! A suite runs seeded random cases, checks each against explicit tolerances
//! and collects the failures. Case `k` of a run with seed `s` draws from
//! [`case_seed`]`(s, k)`, so any failing case can be replayed on its own.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_8};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use realpos::algebra::{self, GenMode, MatrixAlgebra};
use realpos::interp::instances;
use realpos::interp::{
    self, EngineOptions, FeasibilityProblem, InterpOptions, Interpolant, LinMap, Spectral, SpectralKind,
    SolverVerdict, NEAR_EPS, SOLVER_TOL,
};
use realpos::powers;
use realpos::projections::{self, ProjMethod};
use realpos::transforms;
use realpos::{cones, gen, linalg, ComplexMatrix, Tolerances};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

/// One checked quantity of a case; `slack ≥ 0` (or `> 0` when strict) passes.
#[derive(Clone, Debug, Serialize)]
pub struct Probe {
    pub name: String,
    pub slack: f64,
    pub strict: bool,
}

impl Probe {
    pub fn le(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, bound - value, false)
    }

    pub fn lt(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, bound - value, true)
    }

    pub fn ge(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value - bound, false)
    }

    pub fn gt(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self::new(name, value - bound, true)
    }

    /// A yes/no probe; when it holds it does not bound the case margin.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, if ok { f64::INFINITY } else { -1.0 }, false)
    }

    fn new(name: impl Into<String>, slack: f64, strict: bool) -> Self {
        // NaN slack fails
        let slack = if slack.is_nan() { f64::NEG_INFINITY } else { slack };
        Self {
            name: name.into(),
            slack,
            strict,
        }
    }

    pub fn passes(&self) -> bool {
        if self.strict {
            self.slack > 0.0
        } else {
            self.slack >= 0.0
        }
    }
}

/// What a case hands back: its probes and a dump of the instance.
pub struct Outcome {
    pub probes: Vec<Probe>,
    pub instance: Value,
}

type CaseFn = fn(&mut Case) -> CliResult<Outcome>;

/// Inputs of one case.
pub struct Case {
    pub index: usize,
    pub seed: u64,
    pub n: usize,
    pub tol: Tolerances,
    pub rng: ChaCha8Rng,
}

pub struct SuiteDef {
    pub name: &'static str,
    pub about: &'static str,
    pub cases: usize,
    /// Default dimension range.
    pub sizes: (usize, usize),
    /// Hard cap on the dimension, whatever the requested sizes.
    pub max_n: usize,
    /// Fraction of cases allowed to fail with the suite still passing.
    pub max_failure_rate: f64,
    run: CaseFn,
}

macro_rules! suite {
    ($name:literal, $about:literal, $cases:expr, $sizes:expr, $max_n:expr, $rate:expr, $run:expr) => {
        SuiteDef {
            name: $name,
            about: $about,
            cases: $cases,
            sizes: $sizes,
            max_n: $max_n,
            max_failure_rate: $rate,
            run: $run,
        }
    };
}

pub static SUITES: &[SuiteDef] = &[
    suite!("f-bijection", "F-transform maps accretive matrices onto strict contractions in half-F and back", 300, (2, 8), 16, 0.0, f_bijection),
    suite!("root-laws", "semigroup, scaling, oa-membership and continuity of principal powers", 200, (2, 8), 16, 0.0, root_laws),
    suite!("method-agreement", "spectral, quadrature and series powers agree", 200, (2, 8), 16, 0.0, method_agreement),
    suite!("sector-bound", "x*x ≤ ‖Re x‖ sec²ρ (x + x*) for sectorial x", 200, (2, 8), 16, 0.0, sector_bound),
    suite!("support", "iterative support projections match the kernel oracle", 200, (2, 8), 16, 0.0, support),
    suite!("peak", "iterative peak projections match the eigenspace oracle", 200, (2, 8), 16, 0.0, peak),
    suite!("root-monotonicity", "Re(x^{1/n}) increases for x in half-F and after rescaling", 200, (2, 8), 16, 0.0, root_monotonicity),
    suite!("lemerdy", "the matrix [[1,i],[i,0]] breaks root monotonicity", 1, (2, 2), 2, 0.0, lemerdy),
    suite!("a-h", "largest approximately unital subalgebra of the worked algebras and its amplifications", 3, (2, 2), 2, 0.0, a_h),
    suite!("oa-unital", "algebras generated by accretive elements are unital", 100, (2, 8), 16, 0.0, oa_unital),
    suite!("interp-dominate", "positive b is dominated by a nearly positive a in half-F", 50, (2, 6), 6, 0.05, interp_dominate),
    suite!("interp-decompose", "b = x - y with x, y in half-F", 50, (2, 6), 6, 0.05, interp_decompose),
    suite!("interp-np", "a in half-F with |1 - a|² ≤ 1 - c", 50, (2, 6), 6, 0.05, interp_np),
    suite!("interp-urysohn", "Urysohn interpolation between q and u", 50, (2, 6), 6, 0.05, interp_urysohn),
    suite!("interp-strict-urysohn", "x with peak q and support p", 50, (2, 6), 6, 0.05, interp_strict),
    suite!("interp-peak", "g in half-F agreeing with b on a peak projection", 50, (2, 6), 6, 0.05, interp_peak),
    suite!("interp-tietze", "contractive lift with numerical range in a polygon", 50, (2, 6), 6, 0.05, interp_tietze),
    suite!("vav", "(v a v*)^r = v a^r v*", 100, (2, 8), 16, 0.0, vav),
    suite!("kernel", "kernels of Re x, x and s(x) agree for sectorial x", 200, (2, 8), 16, 0.0, kernel),
    suite!("srp-roots", "roots of strictly real positive elements stay strictly real positive", 50, (2, 6), 6, 0.0, srp_roots),
    suite!("i-not-in-c", "skew-Hermitian matrices are accretive but outside the c cone", 50, (1, 8), 16, 0.0, i_not_in_c),
    suite!("dominate-norm-bound", "domination at norm one pins a to the identity on the top eigenvector of b", 50, (2, 6), 6, 0.0, dominate_norm_bound),
];

pub fn find_suite(name: &str) -> CliResult<&'static SuiteDef> {
    SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| CliError::UnknownSuite(name.to_string()))
}

/// SplitMix64 finalizer of `seed + (case + 1)·γ`.
pub fn case_seed(seed: u64, case: usize) -> u64 {
    let mut z = seed.wrapping_add((case as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub seed: u64,
    pub sizes: Option<(usize, usize)>,
    pub cases: Option<usize>,
    pub tol: Tolerances,
    /// Failing instances are written here; inlined in the report otherwise.
    pub dump_dir: Option<PathBuf>,
    /// Run the single case with this seed instead of a seeded batch.
    pub replay: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub case: usize,
    pub seed: u64,
    pub n: usize,
    pub margin: f64,
    pub failed: Vec<String>,
    pub dump: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToleranceReport {
    pub eq_tol: f64,
    pub psd_slack: f64,
    pub iter_tol: f64,
    pub max_iter: usize,
    pub solver_tol: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub about: String,
    pub seed: u64,
    pub sizes: (usize, usize),
    pub cases: usize,
    pub failures: Vec<Failure>,
    pub allowed_failures: usize,
    pub passed: bool,
    /// Smallest quantitative slack over all cases; `None` when every probe
    /// was a yes/no check.
    pub worst_margin: Option<f64>,
    pub tolerances: ToleranceReport,
    pub wall_time_s: f64,
    /// Per-case margins, for CSV output.
    #[serde(skip)]
    pub case_margins: Vec<CaseMargin>,
}

#[derive(Clone, Debug)]
pub struct CaseMargin {
    pub case: usize,
    pub seed: u64,
    pub n: usize,
    pub margin: f64,
    pub passed: bool,
}

impl SuiteReport {
    /// One line for terminals and test logs.
    pub fn summary(&self) -> String {
        format!(
            "{:<22} {}  cases {:>3}  failures {:>2} (allowed {})  worst margin {}  {:.2}s",
            self.suite,
            if self.passed { "PASS" } else { "FAIL" },
            self.cases,
            self.failures.len(),
            self.allowed_failures,
            self.worst_margin.map_or("n/a".into(), |m| format!("{m:+.3e}")),
            self.wall_time_s
        )
    }
}

struct CaseRecord {
    index: usize,
    seed: u64,
    n: usize,
    margin: f64,
    failed: Vec<String>,
    instance: Value,
}

fn run_case(def: &SuiteDef, index: usize, seed: u64, sizes: (usize, usize), tol: Tolerances) -> CaseRecord {
    let mut rng = gen::rng(seed, 0);
    let n = rng.random_range(sizes.0..=sizes.1);
    let mut case = Case {
        index,
        seed,
        n,
        tol,
        rng,
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (def.run)(&mut case)));
    let (probes, instance) = match result {
        Ok(Ok(o)) => (o.probes, o.instance),
        Ok(Err(e)) => (vec![Probe::holds(format!("error: {e}"), false)], Value::Null),
        Err(_) => (vec![Probe::holds("panic", false)], Value::Null),
    };
    let margin = probes.iter().map(|p| p.slack).fold(f64::INFINITY, f64::min);
    CaseRecord {
        index,
        seed,
        n,
        margin,
        failed: probes.iter().filter(|p| !p.passes()).map(|p| p.name.clone()).collect(),
        instance,
    }
}

fn write_dump(dir: &Path, suite: &str, rec: &CaseRecord) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{suite}-{:016x}.json", rec.seed));
    let body = json!({ "suite": suite, "case": rec.index, "seed": rec.seed, "n": rec.n, "instance": rec.instance });
    std::fs::write(&path, serde_json::to_string_pretty(&body)?)?;
    Ok(path)
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> CliResult<SuiteReport> {
    let def = find_suite(name)?;
    cfg.tol.validate()?;
    let (lo, hi) = cfg.sizes.unwrap_or(def.sizes);
    if lo == 0 || lo > hi {
        return Err(CliError::Input(format!("invalid size range {lo}..{hi}")));
    }
    let hi = hi.min(def.max_n);
    crate::input::check_dim(hi)?;
    let sizes = (lo.min(hi), hi);
    let seeds: Vec<u64> = match cfg.replay {
        Some(s) => vec![s],
        None => (0..cfg.cases.unwrap_or(def.cases)).map(|k| case_seed(cfg.seed, k)).collect(),
    };
    let start = Instant::now();
    let records: Vec<CaseRecord> = seeds
        .par_iter()
        .enumerate()
        .map(|(k, &s)| run_case(def, k, s, sizes, cfg.tol))
        .collect();
    let wall_time_s = start.elapsed().as_secs_f64();

    let mut failures = Vec::new();
    for rec in records.iter().filter(|r| !r.failed.is_empty()) {
        let (dump, instance) = match &cfg.dump_dir {
            Some(dir) => (Some(write_dump(dir, def.name, rec)?), None),
            None => (None, Some(rec.instance.clone())),
        };
        failures.push(Failure {
            case: rec.index,
            seed: rec.seed,
            n: rec.n,
            margin: rec.margin,
            failed: rec.failed.clone(),
            dump,
            instance,
        });
    }
    let cases = records.len();
    let allowed_failures = (def.max_failure_rate * cases as f64).floor() as usize;
    Ok(SuiteReport {
        suite: def.name.to_string(),
        about: def.about.to_string(),
        seed: cfg.seed,
        sizes,
        cases,
        passed: failures.len() <= allowed_failures,
        failures,
        allowed_failures,
        worst_margin: Some(records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)).filter(|m| m.is_finite()),
        tolerances: ToleranceReport {
            eq_tol: cfg.tol.eq_tol,
            psd_slack: cfg.tol.psd_slack,
            iter_tol: cfg.tol.iter_tol,
            max_iter: cfg.tol.max_iter,
            solver_tol: SOLVER_TOL,
        },
        wall_time_s,
        case_margins: records
            .iter()
            .map(|r| CaseMargin {
                case: r.index,
                seed: r.seed,
                n: r.n,
                margin: r.margin,
                passed: r.failed.is_empty(),
            })
            .collect(),
    })
}

/// `suite,case,seed,n,margin,passed` rows for a set of reports.
pub fn margins_csv(reports: &[SuiteReport]) -> String {
    let mut out = String::from("suite,case,seed,n,margin,passed\n");
    for r in reports {
        for m in &r.case_margins {
            out.push_str(&format!("{},{},{},{},{:e},{}\n", r.suite, m.case, m.seed, m.n, m.margin, m.passed));
        }
    }
    out
}

fn pick<T: Copy>(options: &[T], k: usize) -> T {
    options[k % options.len()]
}

/// Accretive with `λmin(Re x) ≥ floor`.
fn coercive(x: ComplexMatrix, floor: f64) -> ComplexMatrix {
    let lift = (floor - linalg::min_real_eig(&x)).max(0.0);
    let n = x.n();
    &x + &ComplexMatrix::identity(n).scale_re(lift)
}

/// `W (y ⊕ 0) W*` with `y` sectorial of half-angle `rho` and rank below `n`.
fn singular_sectorial(n: usize, rho: f64, rng: &mut ChaCha8Rng) -> CliResult<ComplexMatrix> {
    if n == 1 {
        return Ok(ComplexMatrix::zeros(1));
    }
    let rank = rng.random_range(1..n);
    let y = gen::gen_sectorial(rank, rho, rng)?;
    let w = gen::unitary(n, rng);
    Ok(&w * &ComplexMatrix::direct_sum(&y, &ComplexMatrix::zeros(n - rank)) * w.adjoint())
}

fn f_bijection(c: &mut Case) -> CliResult<Outcome> {
    let x = gen::gen_accretive(c.n, &mut c.rng)?;
    let t = transforms::f_transform(&x)?;
    let m = cones::f_membership(&t, &c.tol);
    let back = transforms::f_inverse(&t)?;
    let y = gen::gen_half_f(c.n, &mut c.rng)?;
    let z = transforms::f_inverse(&y)?;
    Ok(Outcome {
        probes: vec![
            Probe::ge("F(x) in half-F", m.half_f_gap, -c.tol.psd_slack),
            Probe::lt("‖F(x)‖ < 1", t.op_norm(), 1.0),
            Probe::le("roundtrip", back.dist(&x), 1e-8 * (1.0 + x.op_norm())),
            Probe::ge("inverse accretive", linalg::min_real_eig(&z), -1e-7),
        ],
        instance: json!({ "x": x, "t": y }),
    })
}

fn root_laws(c: &mut Case) -> CliResult<Outcome> {
    let tol = &c.tol;
    let x = gen::gen_accretive(c.n, &mut c.rng)?;
    let mut probes = Vec::new();
    let a = powers::power(&x, 0.3, tol)?.value;
    let b = powers::power(&x, 0.7, tol)?.value;
    probes.push(Probe::le("x^0.3 x^0.7 = x", (&a * &b).dist(&x), 1e-6));
    let alpha: f64 = c.rng.random_range(0.05..2.5);
    let base = powers::power(&x, alpha, tol)?.value;
    for s in [0.5, 2.0, 10.0] {
        let lhs = powers::power(&x.scale_re(s), alpha, tol)?.value;
        probes.push(Probe::le(format!("scaling c = {s}"), lhs.dist(&base.scale_re(s.powf(alpha))), 1e-8));
    }
    let oa = algebra::oa(&x);
    for (label, e) in [("1/2", 0.5), ("1/3", 1.0 / 3.0), ("3/2", 1.5)] {
        let y = powers::power(&x, e, tol)?.value;
        probes.push(Probe::le(format!("x^{label} in oa(x)"), oa.residual(&y), 1e-6));
    }
    let beta: f64 = c.rng.random_range(0.1..2.0);
    let at = powers::power(&x, beta, tol)?.value;
    let diffs: Vec<f64> = (1..=4)
        .map(|k| powers::power(&x, beta + 10f64.powi(-k), tol).map(|p| p.value.dist(&at)))
        .collect::<realpos::Result<_>>()?;
    let growth = diffs.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    probes.push(Probe::lt("continuity differences decrease", growth, 0.0));
    Ok(Outcome {
        probes,
        instance: json!({ "x": x, "alpha": alpha, "beta": beta, "differences": diffs }),
    })
}

fn method_agreement(c: &mut Case) -> CliResult<Outcome> {
    let tol = &c.tol;
    let r = pick(&[0.25, 0.5, 0.75], c.index);
    let x = coercive(gen::gen_accretive(c.n, &mut c.rng)?, 0.05);
    let s = powers::power_spectral(&x, r, tol)?.value;
    let q = powers::power_balakrishnan(&x, r, 128, tol)?.value;
    let m = 2 + (c.index % 3) as u32;
    let f = gen::gen_f(c.n, &mut c.rng)?;
    let series = powers::root_series(&f, m, 200, tol)?;
    let exact = powers::power(&f, 1.0 / m as f64, tol)?;
    Ok(Outcome {
        probes: vec![
            Probe::le("spectral vs quadrature", s.dist(&q), 1e-6 * x.op_norm().powf(r)),
            Probe::le(
                "series vs spectral",
                series.value.dist(&exact.value),
                series.est_error + exact.est_error + 1e-9,
            ),
        ],
        instance: json!({ "x": x, "r": r, "f": f, "root": m }),
    })
}

fn sector_bound(c: &mut Case) -> CliResult<Outcome> {
    let rho = pick(&[FRAC_PI_8, FRAC_PI_4, FRAC_PI_3], c.index);
    let x = gen::gen_sectorial(c.n, rho, &mut c.rng)?;
    let sec2 = 1.0 / rho.cos().powi(2);
    let lhs = (&x + &x.adjoint()).scale_re(x.real_part().op_norm() * sec2);
    let gap = linalg::min_real_eig(&(&lhs - &(&x.adjoint() * &x)));
    Ok(Outcome {
        probes: vec![Probe::ge("sec²ρ bound", gap, -1e-6 * x.op_norm().powi(2))],
        instance: json!({ "x": x, "rho": rho }),
    })
}

fn support(c: &mut Case) -> CliResult<Outcome> {
    let x = if c.index.is_multiple_of(2) {
        gen::gen_accretive(c.n, &mut c.rng)?
    } else {
        gen::gen_accretive_singular(c.n, &mut c.rng)?
    };
    let it = projections::support_projection(&x, ProjMethod::Iterative, &c.tol)?.proj;
    let oracle = projections::support_oracle(&x);
    Ok(Outcome {
        probes: vec![
            Probe::le("iterative vs oracle", it.dist(&oracle), 1e-6),
            Probe::le("px = x", (&it * &x).dist(&x), 1e-7),
            Probe::le("xp = x", (&x * &it).dist(&x), 1e-7),
        ],
        instance: json!({ "x": x }),
    })
}

fn peak(c: &mut Case) -> CliResult<Outcome> {
    let x = gen::gen_half_f_norm_one(c.n, &mut c.rng)?;
    let u = projections::peak_projection(&x, ProjMethod::Iterative, &c.tol)?.proj;
    let oracle = projections::peak_oracle(&x);
    let root = powers::power(&x, 0.5, &c.tol)?.value;
    let u_root = projections::peak_projection(&root, ProjMethod::Iterative, &c.tol)?.proj;
    Ok(Outcome {
        probes: vec![
            Probe::le("iterative vs oracle", u.dist(&oracle), 1e-6),
            Probe::holds("x peaks at u(x)", projections::is_peak_for(&x, &u, &c.tol)?),
            Probe::le("u(x^1/2) = u(x)", u_root.dist(&u), 1e-6),
        ],
        instance: json!({ "x": x }),
    })
}

fn root_monotonicity(c: &mut Case) -> CliResult<Outcome> {
    let x = gen::gen_half_f(c.n, &mut c.rng)?;
    let margins = powers::root_monotonicity_report(&x, 8, &c.tol)?;
    let y = gen::gen_accretive(c.n, &mut c.rng)?;
    let rescaled = powers::rescaled_root_check(&y, &c.tol)?;
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        probes: vec![
            Probe::ge("half-F roots increase", min(&margins), -1e-7),
            Probe::holds("(y/c)^1/2 in half-F", rescaled.in_half_f),
            Probe::ge("rescaled roots increase", min(&rescaled.margins), -1e-7),
        ],
        instance: json!({ "x": x, "y": y }),
    })
}

fn lemerdy(c: &mut Case) -> CliResult<Outcome> {
    let tol = &c.tol;
    let x = cones::le_merdy();
    let acc = cones::is_accretive(&x, tol);
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let root = powers::power(&x, 0.5, tol)?.value;
    let margins = powers::root_monotonicity_report(&x, 8, tol)?;
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let angle = cones::sector_angle(&x, tol).unwrap_or(f64::NAN);
    Ok(Outcome {
        probes: vec![
            Probe::holds("accretive", acc.holds),
            Probe::le("margin 0", acc.margin.abs(), tol.eq_tol),
            Probe::le("‖x‖ golden ratio", (x.op_norm() - golden).abs(), 1e-9),
            Probe::gt("‖x^1/2‖ > 1", root.op_norm(), 1.0 + 1e-3),
            Probe::holds("no c certificate", cones::c_certificate(&x, tol).is_none()),
            Probe::le("sector angle π/2", (angle - FRAC_PI_2).abs(), 1e-6),
            Probe::le("monotonicity fails", worst, -1e-3),
        ],
        instance: json!({ "x": x, "root_norm": root.op_norm(), "margins": margins }),
    })
}

fn a_h(c: &mut Case) -> CliResult<Outcome> {
    let e = |i, j| ComplexMatrix::unit(2, i, j);
    let (a, expected, q) = match c.index % 3 {
        0 => (
            MatrixAlgebra::upper_triangular(2),
            MatrixAlgebra::upper_triangular(2),
            ComplexMatrix::identity(2),
        ),
        1 => (
            MatrixAlgebra::from_span(2, &[e(0, 1)], "span{E12}")?,
            MatrixAlgebra::zero(2),
            ComplexMatrix::zeros(2),
        ),
        _ => (
            MatrixAlgebra::from_span(2, &[e(0, 0), e(0, 1)], "span{E11,E12}")?,
            MatrixAlgebra::from_span(2, &[e(0, 0)], "span{E11}")?,
            e(0, 0),
        ),
    };
    let rep = algebra::a_h(&a, 64, c.seed, &c.tol);
    let mut probes = vec![
        Probe::le("q", rep.q.dist(&q), c.tol.eq_tol),
        Probe::le("A_H", rep.algebra.mutual_residual(&expected), c.tol.eq_tol),
        Probe::holds("dim A_H", rep.algebra.dim() == expected.dim()),
    ];
    for k in [2, 3] {
        let lhs = algebra::a_h(&algebra::amplify(&a, k)?, 64, c.seed, &c.tol).algebra;
        let rhs = algebra::amplify(&rep.algebra, k)?;
        probes.push(Probe::le(format!("M_{k}(A)_H = M_{k}(A_H)"), lhs.mutual_residual(&rhs), 1e-6));
        probes.push(Probe::holds(format!("dim M_{k}(A)_H"), lhs.dim() == rhs.dim()));
    }
    Ok(Outcome {
        probes,
        instance: json!({ "algebra": a.label }),
    })
}

fn oa_unital(c: &mut Case) -> CliResult<Outcome> {
    let n = c.n;
    let gens: Vec<ComplexMatrix> = match c.index % 4 {
        0 => vec![gen::gen_accretive(n, &mut c.rng)?],
        1 => vec![gen::gen_accretive(n, &mut c.rng)?, gen::gen_accretive(n, &mut c.rng)?],
        2 => vec![gen::gen_accretive_singular(n, &mut c.rng)?],
        _ => vec![gen::gen_accretive(n, &mut c.rng)?, gen::gen_accretive_singular(n, &mut c.rng)?],
    };
    let a = algebra::generate_algebra(&gens, GenMode::Algebra, false)?;
    let unit = algebra::identity_of(&a, &c.tol);
    let mut probes = vec![Probe::holds("identity exists", unit.is_some() || a.dim() == 0)];
    if let Some(e) = &unit {
        probes.push(Probe::le("identity is a projection", linalg::projection_defect(e), 1e-8));
    }
    Ok(Outcome {
        probes,
        instance: json!({ "generators": gens }),
    })
}

fn interp_opts(c: &Case) -> InterpOptions {
    InterpOptions {
        seed: c.seed,
        tol: c.tol,
        ..InterpOptions::default()
    }
}

fn interp_probes(out: realpos::Result<Interpolant>) -> CliResult<(Vec<Probe>, Value)> {
    match out {
        Ok(r) => {
            let mut probes: Vec<Probe> = r
                .checks
                .iter()
                .map(|ch| {
                    let slack = ch.bound - ch.value;
                    if ch.holds {
                        Probe::new(ch.name.clone(), slack.max(0.0), false)
                    } else {
                        Probe::new(ch.name.clone(), slack.min(0.0), true)
                    }
                })
                .collect();
            probes.push(Probe::holds("verdict feasible", r.is_feasible()));
            Ok((probes, json!({ "value": r.value, "second": r.second, "checks": r.checks })))
        }
        Err(realpos::Error::NoConvergence(msg)) => Ok((vec![Probe::holds(format!("unconverged: {msg}"), false)], Value::Null)),
        Err(e) => Err(e.into()),
    }
}

fn with_problem(probes: CliResult<(Vec<Probe>, Value)>, problem: Value) -> CliResult<Outcome> {
    let (probes, solution) = probes?;
    Ok(Outcome {
        probes,
        instance: json!({ "problem": problem, "solution": solution }),
    })
}

fn interp_dominate(c: &mut Case) -> CliResult<Outcome> {
    let inst = instances::dominate_instance(c.n, &mut c.rng)?;
    let out = interp::dominate(&inst.algebra, &inst.b, NEAR_EPS, &interp_opts(c));
    with_problem(interp_probes(out), json!({ "algebra": inst.algebra, "b": inst.b }))
}

fn interp_decompose(c: &mut Case) -> CliResult<Outcome> {
    let inst = instances::decompose_instance(c.n, &mut c.rng)?;
    let out = interp::decompose(&inst.algebra, &inst.b, &interp_opts(c));
    with_problem(interp_probes(out), json!({ "algebra": inst.algebra, "b": inst.b }))
}

fn interp_np(c: &mut Case) -> CliResult<Outcome> {
    let inst = instances::np_instance(c.n, &mut c.rng)?;
    let out = interp::interp_np(&inst.algebra, &inst.c, NEAR_EPS, &interp_opts(c));
    with_problem(interp_probes(out), json!({ "algebra": inst.algebra, "c": inst.c }))
}

fn interp_urysohn(c: &mut Case) -> CliResult<Outcome> {
    let inst = instances::urysohn_instance(c.n, &mut c.rng)?;
    let out = interp::urysohn_interpolate(&inst.algebra, &inst.q, &inst.u, 0.1, NEAR_EPS, &interp_opts(c));
    with_problem(interp_probes(out), json!({ "algebra": inst.algebra, "q": inst.q, "u": inst.u, "eps": 0.1 }))
}

fn interp_strict(c: &mut Case) -> CliResult<Outcome> {
    let inst = instances::strict_instance(c.n, &mut c.rng)?;
    let out = interp::strict_urysohn(&inst.algebra, &inst.q, &inst.p, &interp_opts(c));
    with_problem(interp_probes(out), json!({ "algebra": inst.algebra, "q": inst.q, "p": inst.p }))
}

fn interp_peak(c: &mut Case) -> CliResult<Outcome> {
    let inst = instances::peak_instance(c.n, &mut c.rng)?;
    let out = interp::peak_interpolate(&inst.algebra, &inst.q, &inst.b, &interp_opts(c));
    with_problem(interp_probes(out), json!({ "algebra": inst.algebra, "q": inst.q, "b": inst.b }))
}

fn interp_tietze(c: &mut Case) -> CliResult<Outcome> {
    let inst = instances::tietze_instance(c.n, &mut c.rng)?;
    let out = interp::tietze_lift(&inst.algebra, &inst.q, &inst.b, &inst.region, &interp_opts(c));
    with_problem(
        interp_probes(out),
        json!({ "algebra": inst.algebra, "q": inst.q, "b": inst.b, "E": inst.region }),
    )
}

fn vav(c: &mut Case) -> CliResult<Outcome> {
    let r = pick(&[0.25, 0.5, 0.75, 2.0], c.index / 2);
    let (a, v) = if c.index.is_multiple_of(2) {
        (gen::gen_accretive(c.n, &mut c.rng)?, gen::unitary(c.n, &mut c.rng))
    } else {
        let a = gen::gen_accretive_singular(c.n, &mut c.rng)?;
        let s = projections::support_oracle(&a);
        (a, s)
    };
    let residual = powers::vav_identity_check(&a, &v, r, &c.tol)?;
    Ok(Outcome {
        probes: vec![Probe::le("(vav*)^r = v a^r v*", residual, 1e-7)],
        instance: json!({ "a": a, "v": v, "r": r }),
    })
}

/// Unit vectors `v` with `⟨h v, v⟩ ≤ cut`: eigenvectors of `h` at the
/// bottom of its spectrum, and one random combination of them.
fn near_kernel(h: &ComplexMatrix, cut: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<realpos::C64>> {
    let eig = linalg::herm_eig(h);
    let mut vs: Vec<Vec<realpos::C64>> = (0..h.n()).filter(|&k| eig.values[k] <= cut).map(|k| eig.vector(k)).collect();
    if vs.len() >= 2 {
        let mut mix = vec![realpos::c(0.0, 0.0); h.n()];
        for v in &vs {
            let w = gen::complex_normal(rng);
            for (m, vi) in mix.iter_mut().zip(v) {
                *m += w * vi;
            }
        }
        vs.push(linalg::normalize(&mix));
    }
    vs.retain(|v| linalg::vdot(v, &h.matvec(v)).re <= cut);
    vs
}

fn kernel(c: &mut Case) -> CliResult<Outcome> {
    let rho = c.rng.random_range(0.05..FRAC_PI_2 - 0.02);
    let x = singular_sectorial(c.n, rho, &mut c.rng)?;
    let s = projections::support_projection(&x, ProjMethod::Iterative, &c.tol)?.proj;
    let h = &x + &x.adjoint();
    let kv = near_kernel(&h, 1e-12, &mut c.rng);
    let worst = |vs: &[Vec<realpos::C64>], m: &ComplexMatrix| {
        vs.iter().map(|v| linalg::vec_norm(&m.matvec(v))).fold(0.0, f64::max)
    };
    let mut probes = vec![
        Probe::holds("sector angle below π/2 - 0.01", cones::sector_angle(&x, &c.tol).is_some_and(|a| a < FRAC_PI_2 - 0.01)),
        Probe::le("ker Re x ⊆ ker x", worst(&kv, &x), 1e-5),
        Probe::le("ker Re x ⊆ ker s(x)", worst(&kv, &s), 1e-5),
    ];
    for m in [2u32, 3, 4] {
        let root = powers::power(&x, 1.0 / m as f64, &c.tol)?.value;
        let rv = near_kernel(&(&root + &root.adjoint()), 1e-12, &mut c.rng);
        probes.push(Probe::le(format!("ker Re x^1/{m} ⊆ ker s(x)"), worst(&rv, &s), 1e-5));
    }
    Ok(Outcome {
        probes,
        instance: json!({ "x": x, "rho": rho, "kernel_vectors": kv.len() }),
    })
}

fn srp_roots(c: &mut Case) -> CliResult<Outcome> {
    let (a, x) = if c.index.is_multiple_of(2) {
        let a = instances::unital_algebra(c.n, &mut c.rng)?;
        let m = a.random_element(&mut c.rng);
        (a, coercive(m, 0.05))
    } else {
        let rho = c.rng.random_range(0.05..1.4);
        let x = singular_sectorial(c.n, rho, &mut c.rng)?;
        (algebra::oa(&x), x)
    };
    let mut probes = vec![Probe::holds("x strictly real positive", cones::is_strictly_real_positive(&a, &x, &c.tol)?)];
    for m in [2u32, 3, 4] {
        let root = powers::power(&x, 1.0 / m as f64, &c.tol)?.value;
        probes.push(Probe::holds(
            format!("x^1/{m} strictly real positive"),
            cones::is_strictly_real_positive(&a, &root, &c.tol)?,
        ));
    }
    Ok(Outcome {
        probes,
        instance: json!({ "algebra": a, "x": x }),
    })
}

fn i_not_in_c(c: &mut Case) -> CliResult<Outcome> {
    let i = realpos::c(0.0, 1.0);
    let x = if c.index.is_multiple_of(2) {
        ComplexMatrix::identity(c.n).scale(i * c.rng.random_range(0.1..2.0))
    } else {
        let h = gen::hermitian(c.n, &mut c.rng);
        h.scale(i * (c.rng.random_range(0.1..2.0) / h.op_norm()))
    };
    let acc = cones::is_accretive(&x, &c.tol);
    Ok(Outcome {
        probes: vec![
            Probe::holds("accretive", acc.holds),
            Probe::holds("no c certificate", cones::c_certificate(&x, &c.tol).is_none()),
            Probe::holds("outside F", !cones::f_membership(&x, &c.tol).in_f),
        ],
        instance: json!({ "x": x }),
    })
}

/// `{x ∈ T_n : x_nn = 0}`, the kernel of the character `x ↦ x_nn` on the
/// upper triangular matrices.
fn character_kernel(n: usize) -> CliResult<MatrixAlgebra> {
    let units: Vec<ComplexMatrix> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !(i == n - 1 && j == n - 1))
        .map(|(i, j)| ComplexMatrix::unit(n, i, j))
        .collect();
    Ok(MatrixAlgebra::from_span(n, &units, format!("ker(x -> x_{n}{n})"))?)
}

/// Unital half: for `‖b‖ = 1 − δ` with top eigenvector `v` and any `a` with
/// `b ≤ Re a`, `‖a‖ ≤ 1`, `‖av − v‖² ≤ 2δ`, so domination pins `a` to the
/// identity on `v` as `δ → 0`. Nonunital half: on the character kernel
/// `(Re a)_nn = 0`, so no `a` dominates a `b` with `b_nn > 0`.
fn dominate_norm_bound(c: &mut Case) -> CliResult<Outcome> {
    if c.index.is_multiple_of(2) {
        let a = instances::unital_algebra(c.n, &mut c.rng)?;
        let env = algebra::cstar_envelope(&a);
        let k = env.random_element(&mut c.rng);
        let p = &k * &k.adjoint();
        let p = p.scale_re(1.0 / p.op_norm());
        let eig = linalg::herm_eig(&p);
        let v = eig.vector(a.ambient_dim - 1);
        // the feasible set thins to width δ, so the solver gets more room
        let boundary_opts = InterpOptions {
            retries: 6,
            engine: EngineOptions {
                max_rounds: 6,
                iters_per_round: 80_000,
                stall_iters: 80_000,
                ..EngineOptions::default()
            },
            ..interp_opts(c)
        };
        let mut probes = Vec::new();
        let mut pinned = Vec::new();
        for delta in [1e-1, 1e-2, 1e-3] {
            let b = p.scale_re(1.0 - delta);
            let out = interp::dominate(&a, &b, NEAR_EPS, &boundary_opts)?;
            let av = out.value.matvec(&v);
            let miss = linalg::vec_norm(&av.iter().zip(&v).map(|(x, y)| x - y).collect::<Vec<_>>());
            for ch in &out.checks {
                probes.push(Probe::le(format!("{} at δ = {delta}", ch.name), ch.value, ch.bound));
            }
            probes.push(Probe::le(format!("‖av − v‖ ≤ √(2δ) at δ = {delta}"), miss, (2.0 * delta).sqrt() + SOLVER_TOL));
            pinned.push(miss);
        }
        Ok(Outcome {
            probes,
            instance: json!({ "algebra": a, "b": p, "misses": pinned }),
        })
    } else {
        let n = c.n.max(2);
        let a = character_kernel(n)?;
        let mut v = gen::unit_vector(n, &mut c.rng);
        v[n - 1] = realpos::c(1.0, 0.0);
        let v = linalg::normalize(&v);
        let b = ComplexMatrix::outer(&v, &v).scale_re(c.rng.random_range(0.2..0.9));
        let certificate = b[(n - 1, n - 1)].re - a.basis.iter().map(|e| e[(n - 1, n - 1)].norm()).fold(0.0, f64::max);
        let problem = FeasibilityProblem {
            algebra: a.clone(),
            equalities: vec![],
            spectral: vec![
                Spectral::new("Re a - b", SpectralKind::Floor { map: LinMap::identity(n), shift: -&b }),
                Spectral::new(
                    "‖a‖ ≤ 1",
                    SpectralKind::NormCap {
                        map: LinMap::identity(n),
                        offset: ComplexMatrix::zeros(n),
                        cap: 1.0,
                    },
                ),
            ],
        };
        let opts = EngineOptions {
            max_rounds: 1,
            iters_per_round: 500,
            ..EngineOptions::default()
        };
        let sol = interp::engine::solve_with(&problem, c.seed, &opts)?;
        Ok(Outcome {
            probes: vec![
                Probe::gt("b_nn exceeds every (Re a)_nn", certificate, 0.0),
                Probe::holds("solver finds no dominating a", sol.verdict == SolverVerdict::Unconverged),
                Probe::gt("residual stays away from zero", sol.max_residual(), SOLVER_TOL),
            ],
            instance: json!({ "algebra": a.label, "b": b, "residual": sol.max_residual() }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(matches!(run_suite("unknown", &RunConfig::default()), Err(CliError::UnknownSuite(_))));
    }

    #[test]
    fn names_are_unique() {
        let mut names: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), SUITES.len());
    }

    #[test]
    fn case_seeds_differ() {
        assert_ne!(case_seed(0, 0), case_seed(0, 1));
        assert_ne!(case_seed(0, 0), case_seed(1, 0));
        assert_eq!(case_seed(5, 3), case_seed(5, 3));
    }

    #[test]
    fn probes_compare_with_slack() {
        assert!(Probe::le("x", 1.0, 1.0).passes());
        assert!(!Probe::lt("x", 1.0, 1.0).passes());
        assert!(Probe::ge("x", 0.0, -1.0).passes());
        assert!(!Probe::le("x", f64::NAN, 1.0).passes());
    }

    #[test]
    fn lemerdy_reproduces() {
        let r = run_suite("lemerdy", &RunConfig::default()).unwrap();
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn counterexample_suites_reproduce() {
        let cfg = RunConfig {
            cases: Some(6),
            ..RunConfig::default()
        };
        for name in ["i-not-in-c", "dominate-norm-bound"] {
            let r = run_suite(name, &cfg).unwrap();
            assert!(r.passed, "{name}: {:?}", r.failures);
        }
    }

    #[test]
    fn replay_runs_one_case() {
        let cfg = RunConfig {
            replay: Some(case_seed(3, 7)),
            ..RunConfig::default()
        };
        assert_eq!(run_suite("f-bijection", &cfg).unwrap().cases, 1);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = RunConfig {
            seed: 11,
            cases: Some(6),
            ..RunConfig::default()
        };
        let strip = |r: SuiteReport| {
            let mut v = serde_json::to_value(r).unwrap();
            v["wall_time_s"] = Value::Null;
            v.to_string()
        };
        let a = strip(run_suite("support", &cfg).unwrap());
        let b = strip(run_suite("support", &cfg).unwrap());
        assert_eq!(a, b);
    }
}
