//! Interpolating elements for the domination, decomposition, Urysohn, peak
//! interpolation and Tietze statements.
//!
//! Each solver encodes its statement as a [`FeasibilityProblem`], solves it
//! with retries, then re-checks the returned element against the original,
//! uncompressed conditions. Spectral constraints are compressed to the part
//! of the space that the equalities leave free, so the encoded problems have
//! interior points whenever the statement does.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::engine::{
    self, EngineOptions, Equality, FeasibilityProblem, FeasibilitySolution, LinMap, SolverVerdict, Spectral,
    SpectralKind,
};
use super::region::{range_of, ConvexRegion};
use crate::algebra::{self, MatrixAlgebra};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{c, ComplexMatrix, C64, ONE};
use crate::projections::{self, ProjMethod, ProjStatus};
use crate::tol::Tolerances;

/// Default bound on `‖Im a‖` for the nearly positive outputs.
pub const NEAR_EPS: f64 = 1e-2;
/// Agreement required between computed and prescribed projections.
pub const PROJECTION_CHECK: f64 = 1e-5;

#[derive(Clone, Debug)]
pub struct InterpOptions {
    pub seed: u64,
    /// Extra solves with fresh seeds after an unconverged one.
    pub retries: usize,
    pub solver_tol: f64,
    pub engine: EngineOptions,
    pub tol: Tolerances,
    /// Try the closed form before solving, where one exists.
    pub fast_path: bool,
}

impl Default for InterpOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            retries: 3,
            solver_tol: engine::SOLVER_TOL,
            engine: EngineOptions::default(),
            tol: Tolerances::default(),
            fast_path: true,
        }
    }
}

/// Post-verification of one condition: `value ≤ bound`, or `value < bound`
/// for strict inequalities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

impl Check {
    fn le(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            holds: value <= bound,
        }
    }

    fn lt(name: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound,
            holds: value < bound,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Interpolant {
    pub value: ComplexMatrix,
    /// The second summand `y` of a decomposition.
    pub second: Option<ComplexMatrix>,
    pub checks: Vec<Check>,
    /// Feasible iff every check holds.
    pub verdict: SolverVerdict,
    pub iterations: usize,
    /// Solves performed; zero when a closed form was accepted.
    pub attempts: usize,
    pub solver_residuals: Vec<engine::Residual>,
}

impl Interpolant {
    pub fn is_feasible(&self) -> bool {
        self.verdict == SolverVerdict::Feasible
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest amount by which any check exceeds its bound (0 when all hold).
    pub fn worst_excess(&self) -> f64 {
        self.checks.iter().map(|c| (c.value - c.bound).max(0.0)).fold(0.0, f64::max)
    }
}

fn assemble(value: ComplexMatrix, second: Option<ComplexMatrix>, checks: Vec<Check>, sol: Option<&FeasibilitySolution>, attempts: usize) -> Interpolant {
    let verdict = if checks.iter().all(|c| c.holds) {
        SolverVerdict::Feasible
    } else {
        SolverVerdict::Unconverged
    };
    Interpolant {
        value,
        second,
        checks,
        verdict,
        iterations: sol.map_or(0, |s| s.iterations),
        attempts,
        solver_residuals: sol.map(|s| s.residuals.clone()).unwrap_or_default(),
    }
}

fn solve_retrying(p: &FeasibilityProblem, opts: &InterpOptions) -> Result<(FeasibilitySolution, usize)> {
    let mut engine_opts = opts.engine;
    engine_opts.solver_tol = opts.solver_tol;
    let mut best: Option<FeasibilitySolution> = None;
    let mut total = 0;
    for k in 0..=opts.retries {
        let seed = opts.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(k as u64));
        let mut sol = engine::solve_with(p, seed, &engine_opts)?;
        total += sol.iterations;
        if sol.verdict == SolverVerdict::Feasible {
            sol.iterations = total;
            return Ok((sol, k + 1));
        }
        if best.as_ref().is_none_or(|b| sol.max_residual() < b.max_residual()) {
            best = Some(sol);
        }
    }
    let mut sol = best.expect("at least one attempt");
    sol.iterations = total;
    Ok((sol, opts.retries + 1))
}

/// Orthonormal basis of the span of the ranges and coranges of `L b R` over
/// the basis of `A`. Outside it every `L a R` vanishes.
pub fn active_basis(a: &MatrixAlgebra, l: &ComplexMatrix, r: &ComplexMatrix) -> Vec<Vec<C64>> {
    let n = a.ambient_dim;
    let mut m = ComplexMatrix::zeros(n);
    for b in &a.basis {
        let x = l * b * r;
        m += &(&x * &x.adjoint());
        m += &(&x.adjoint() * &x);
    }
    let eig = linalg::herm_eig(&m);
    let top = eig.max();
    if top <= 0.0 {
        return Vec::new();
    }
    (0..n)
        .filter(|&k| eig.values[k] > 1e-10 * top)
        .map(|k| eig.vector(k))
        .collect()
}

fn id(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n)
}

fn half_f(n: usize, basis: &[Vec<C64>]) -> Option<Spectral> {
    (!basis.is_empty()).then(|| {
        Spectral::new(
            "half-F",
            SpectralKind::NormCap {
                map: LinMap::identity(n).scaled(c(-2.0, 0.0)),
                offset: id(n),
                cap: 1.0,
            },
        )
        .on(basis.to_vec())
    })
}

/// `Re(e^{±iφ} a) ⪰ 0`, which keeps `W(a)` in the sector of half-angle
/// `π/2 − φ`; with `‖a‖ ≤ cap` this bounds `‖Im a‖` by `eps`.
fn sector(n: usize, basis: &[Vec<C64>], eps: f64, cap: f64) -> Vec<Spectral> {
    if basis.is_empty() {
        return Vec::new();
    }
    let phi = FRAC_PI_2 - (eps / cap).min(1.0).asin();
    [1.0, -1.0]
        .into_iter()
        .map(|s| {
            Spectral::new(
                if s > 0.0 { "sector+" } else { "sector-" },
                SpectralKind::Floor {
                    map: LinMap::identity(n).scaled(C64::from_polar(1.0, s * phi)),
                    shift: ComplexMatrix::zeros(n),
                },
            )
            .on(basis.to_vec())
        })
        .collect()
}

fn eq(name: &str, map: LinMap, target: ComplexMatrix) -> Equality {
    Equality {
        name: name.into(),
        map,
        target,
    }
}

/// `a p = t` and `p a = t`.
fn corner_equalities(n: usize, p: &ComplexMatrix, t: &ComplexMatrix, left: &str, right: &str) -> Vec<Equality> {
    vec![
        eq(left, LinMap::sandwich(&id(n), p, ONE), t.clone()),
        eq(right, LinMap::sandwich(p, &id(n), ONE), t.clone()),
    ]
}

fn half_f_gap(x: &ComplexMatrix) -> f64 {
    (&id(x.n()) - &x.scale_re(2.0)).op_norm() - 1.0
}

fn require_unital(a: &MatrixAlgebra, tol: &Tolerances) -> Result<ComplexMatrix> {
    algebra::identity_of(a, tol).ok_or_else(|| Error::pre("the algebra must be unital"))
}

fn require_member(a: &MatrixAlgebra, x: &ComplexMatrix, what: &str, tol: &Tolerances) -> Result<()> {
    x.same_dim(&ComplexMatrix::zeros(a.ambient_dim))?;
    let (inside, r) = a.contains(x, tol);
    if !inside {
        return Err(Error::pre(format!("{what} is not in the algebra (residual {r:e})")));
    }
    Ok(())
}

fn require_projection(x: &ComplexMatrix, what: &str, tol: &Tolerances) -> Result<()> {
    let d = linalg::projection_defect(x);
    if d > tol.eq_tol.max(projections::PROJ_TOL) {
        return Err(Error::pre(format!("{what} is not a projection (defect {d:e})")));
    }
    Ok(())
}

fn require_positive_in_envelope(a: &MatrixAlgebra, b: &ComplexMatrix, what: &str, tol: &Tolerances) -> Result<()> {
    b.same_dim(&ComplexMatrix::zeros(a.ambient_dim))?;
    if b.hermitian_defect() > tol.eq_tol {
        return Err(Error::pre(format!("{what} is not Hermitian")));
    }
    if linalg::min_real_eig(b) < -tol.psd_slack {
        return Err(Error::pre(format!("{what} is not positive semidefinite")));
    }
    if b.op_norm() >= 1.0 - tol.eq_tol {
        return Err(Error::pre(format!("{what} must have norm below one")));
    }
    let env = algebra::cstar_envelope(a);
    let (inside, r) = env.contains(b, tol);
    if !inside {
        return Err(Error::pre(format!(
            "{what} is not in the generated C*-algebra (residual {r:e})"
        )));
    }
    Ok(())
}

fn common_checks(a: &MatrixAlgebra, x: &ComplexMatrix, tol: f64) -> Vec<Check> {
    vec![
        Check::le("membership", a.residual(x), tol),
        Check::le("half-F", half_f_gap(x), tol),
    ]
}

/// `a ∈ ½𝔉_A`, nearly positive (`‖Im a‖ < eps`), with `b ≼ a`.
pub fn dominate(a: &MatrixAlgebra, b: &ComplexMatrix, eps: f64, opts: &InterpOptions) -> Result<Interpolant> {
    let tol = &opts.tol;
    require_unital(a, tol)?;
    require_positive_in_envelope(a, b, "b", tol)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let n = a.ambient_dim;
    let basis = active_basis(a, &id(n), &id(n));
    let mut spectral: Vec<Spectral> = half_f(n, &basis).into_iter().collect();
    spectral.push(
        Spectral::new(
            "Re a - b",
            SpectralKind::Floor {
                map: LinMap::identity(n),
                shift: -b,
            },
        )
        .on(basis.clone()),
    );
    spectral.extend(sector(n, &basis, 0.9 * eps, 1.0));
    let problem = FeasibilityProblem {
        algebra: a.clone(),
        equalities: vec![],
        spectral,
    };
    let (sol, attempts) = solve_retrying(&problem, opts)?;
    let x = sol.value.clone();
    let mut checks = common_checks(a, &x, opts.solver_tol);
    checks.push(Check::le("Re a - b", -linalg::min_real_eig(&(&x - b)), opts.solver_tol));
    checks.push(Check::lt("Im a", x.imag_part().op_norm(), eps));
    Ok(assemble(x, None, checks, Some(&sol), attempts))
}

/// `b = x − y` with `x, y ∈ ½𝔉_A`.
pub fn decompose(a: &MatrixAlgebra, b: &ComplexMatrix, opts: &InterpOptions) -> Result<Interpolant> {
    let tol = &opts.tol;
    require_unital(a, tol)?;
    require_member(a, b, "b", tol)?;
    if b.op_norm() >= 1.0 - tol.eq_tol {
        return Err(Error::pre("b must have norm below one"));
    }
    let n = a.ambient_dim;
    let zero = ComplexMatrix::zeros(n);
    let doubled: Vec<ComplexMatrix> = a
        .basis
        .iter()
        .map(|e| ComplexMatrix::direct_sum(e, &zero))
        .chain(a.basis.iter().map(|e| ComplexMatrix::direct_sum(&zero, e)))
        .collect();
    let sum = MatrixAlgebra::spanned(2 * n, &doubled, format!("{}+{}", a.label, a.label));
    // S (x ⊕ y) S* − P₂ (x ⊕ y) P₂ = 0 ⊕ (x − y)
    let shift = ComplexMatrix::block2(&zero, &zero, &id(n), &zero);
    let p2 = ComplexMatrix::direct_sum(&zero, &id(n));
    let map = LinMap::new(vec![(shift.clone(), shift.adjoint()), (p2.scale_re(-1.0), p2)]);
    let target = ComplexMatrix::direct_sum(&zero, b);
    let basis = active_basis(&sum, &id(2 * n), &id(2 * n));
    let problem = FeasibilityProblem {
        algebra: sum,
        equalities: vec![eq("x - y = b", map, target)],
        spectral: half_f(2 * n, &basis).into_iter().collect(),
    };
    let (sol, attempts) = solve_retrying(&problem, opts)?;
    let block = |i: usize| ComplexMatrix::from_fn(n, |r, s| sol.value[(i * n + r, i * n + s)]);
    let (x, y) = (block(0), block(1));
    let t = opts.solver_tol;
    let checks = vec![
        Check::le("membership x", a.residual(&x), t),
        Check::le("membership y", a.residual(&y), t),
        Check::le("half-F x", half_f_gap(&x), t),
        Check::le("half-F y", half_f_gap(&y), t),
        Check::le("x - y = b", (&x - &y).dist(b), t),
    ];
    Ok(assemble(x, Some(y), checks, Some(&sol), attempts))
}

/// `a ∈ ½𝔉_A`, nearly positive, with `|1 − a|² ⪯ 1 − c`.
pub fn interp_np(a: &MatrixAlgebra, cc: &ComplexMatrix, near_eps: f64, opts: &InterpOptions) -> Result<Interpolant> {
    let tol = &opts.tol;
    require_unital(a, tol)?;
    require_positive_in_envelope(a, cc, "c", tol)?;
    let n = a.ambient_dim;
    let basis = active_basis(a, &id(n), &id(n));
    let mut spectral: Vec<Spectral> = half_f(n, &basis).into_iter().collect();
    spectral.extend(sector(n, &basis, 0.9 * near_eps, 1.0));
    if !basis.is_empty() {
        spectral.push(
            Spectral::new(
                "|1-a|^2 <= 1-c",
                SpectralKind::Schur {
                    map: LinMap::identity(n).scaled(c(-1.0, 0.0)),
                    offset: id(n),
                    s1: &id(n) - cc,
                    s2: id(n),
                },
            )
            .on(basis),
        );
    }
    let problem = FeasibilityProblem {
        algebra: a.clone(),
        equalities: vec![],
        spectral,
    };
    let (sol, attempts) = solve_retrying(&problem, opts)?;
    let x = sol.value.clone();
    let mut checks = common_checks(a, &x, opts.solver_tol);
    checks.push(Check::lt("Im a", x.imag_part().op_norm(), near_eps));
    checks.push(Check::le("|1-a|^2 <= 1-c", -np_block_margin(&x, cc), opts.solver_tol));
    Ok(assemble(x, None, checks, Some(&sol), attempts))
}

/// `λmin [[I − c, (I − a)*], [I − a, I]]`.
pub fn np_block_margin(x: &ComplexMatrix, cc: &ComplexMatrix) -> f64 {
    let n = x.n();
    let d = &id(n) - x;
    linalg::min_real_eig(&ComplexMatrix::block2(&(&id(n) - cc), &d.adjoint(), &d, &id(n)))
}

/// Which form of the Urysohn statement was solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UrysohnMode {
    /// `u ∈ A`: `au = ua = a`.
    Inner,
    /// `u ∉ A`: `‖a(I − u)‖, ‖(I − u)a‖ < ε`.
    Ambient,
}

pub fn urysohn_mode(a: &MatrixAlgebra, u: &ComplexMatrix, tol: &Tolerances) -> UrysohnMode {
    if a.contains(u, tol).0 {
        UrysohnMode::Inner
    } else {
        UrysohnMode::Ambient
    }
}

/// `a ∈ ½𝔉_A` with `aq = qa = q`, supported under `u` (exactly when `u ∈ A`,
/// up to `eps` otherwise), and `‖Im a‖ < near_eps`.
pub fn urysohn_interpolate(
    a: &MatrixAlgebra,
    q: &ComplexMatrix,
    u: &ComplexMatrix,
    eps: f64,
    near_eps: f64,
    opts: &InterpOptions,
) -> Result<Interpolant> {
    let tol = &opts.tol;
    require_projection(q, "q", tol)?;
    require_member(a, q, "q", tol)?;
    u.same_dim(q)?;
    require_projection(u, "u", tol)?;
    if linalg::min_real_eig(&(u - q)) < -tol.psd_slack {
        return Err(Error::pre("q must lie under u"));
    }
    if !(eps > 0.0 && near_eps > 0.0) {
        return Err(Error::InvalidInput("eps and near_eps must be positive".into()));
    }
    let n = a.ambient_dim;
    let mode = urysohn_mode(a, u, tol);
    let mut equalities = corner_equalities(n, q, q, "aq = q", "qa = q");
    let off_u = &id(n) - u;
    let free = match mode {
        UrysohnMode::Inner => {
            let mut sub_a = LinMap::sandwich(&id(n), u, ONE);
            sub_a.terms.push((id(n).scale_re(-1.0), id(n)));
            let mut sub_b = LinMap::sandwich(u, &id(n), ONE);
            sub_b.terms.push((id(n).scale_re(-1.0), id(n)));
            let zero = ComplexMatrix::zeros(n);
            equalities.push(eq("au = a", sub_a, zero.clone()));
            equalities.push(eq("ua = a", sub_b, zero));
            u - q
        }
        UrysohnMode::Ambient => &id(n) - q,
    };
    let basis = active_basis(a, &free, &free);
    let mut spectral: Vec<Spectral> = half_f(n, &basis).into_iter().collect();
    spectral.extend(sector(n, &basis, 0.9 * near_eps, 1.0));
    if mode == UrysohnMode::Ambient {
        let zero = ComplexMatrix::zeros(n);
        for (name, map) in [
            ("a(I-u)", LinMap::sandwich(&id(n), &off_u, ONE)),
            ("(I-u)a", LinMap::sandwich(&off_u, &id(n), ONE)),
        ] {
            spectral.push(Spectral::new(
                name,
                SpectralKind::NormCap {
                    map,
                    offset: zero.clone(),
                    cap: 0.9 * eps,
                },
            ));
        }
    }
    let problem = FeasibilityProblem {
        algebra: a.clone(),
        equalities,
        spectral,
    };
    let (sol, attempts) = solve_retrying(&problem, opts)?;
    let x = sol.value.clone();
    let t = opts.solver_tol;
    let mut checks = common_checks(a, &x, t);
    checks.push(Check::le("aq = q", (&x * q).dist(q), t));
    checks.push(Check::le("qa = q", (q * &x).dist(q), t));
    match mode {
        UrysohnMode::Inner => {
            checks.push(Check::le("au = a", (&x * u).dist(&x), t));
            checks.push(Check::le("ua = a", (u * &x).dist(&x), t));
        }
        UrysohnMode::Ambient => {
            checks.push(Check::lt("a(I-u)", (&x * &off_u).op_norm(), eps));
            checks.push(Check::lt("(I-u)a", (&off_u * &x).op_norm(), eps));
        }
    }
    checks.push(Check::lt("Im a", x.imag_part().op_norm(), near_eps));
    Ok(assemble(x, None, checks, Some(&sol), attempts))
}

fn projection_check(name: &str, computed: Result<ComplexMatrix>, target: &ComplexMatrix) -> Check {
    let d = computed.map_or(f64::INFINITY, |p| p.dist(target));
    Check::le(name, d, PROJECTION_CHECK)
}

fn peak_of(x: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let r = projections::peak_projection(x, ProjMethod::Iterative, tol)?;
    match r.status {
        ProjStatus::Diverged => Err(Error::NoConvergence("peak iteration diverged".into())),
        _ => Ok(r.proj),
    }
}

fn support_of(x: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    if x.op_norm() <= tol.eq_tol {
        return Ok(ComplexMatrix::zeros(x.n()));
    }
    match projections::support_projection(x, ProjMethod::Iterative, tol) {
        Ok(r) => Ok(r.proj),
        Err(_) => Ok(projections::support_oracle(x)),
    }
}

fn strict_checks(a: &MatrixAlgebra, x: &ComplexMatrix, q: &ComplexMatrix, p: &ComplexMatrix, opts: &InterpOptions) -> Vec<Check> {
    let t = opts.solver_tol;
    let tol = &opts.tol;
    let mut checks = common_checks(a, x, t);
    checks.push(Check::le("xq = q", (x * q).dist(q), t));
    checks.push(Check::le("qx = q", (q * x).dist(q), t));
    checks.push(Check::le("xp = x", (x * p).dist(x), t));
    checks.push(Check::le("px = x", (p * x).dist(x), t));
    checks.push(projection_check("u(x) = q", peak_of(x, tol), q));
    checks.push(projection_check("s(x) = p", support_of(x, tol), p));
    let gap = x * &(&id(x.n()) - x);
    checks.push(projection_check("s(x(I-x)) = p - q", support_of(&gap, tol), &(p - q)));
    checks
}

/// `x ∈ ½𝔉_A` peaking at `q` with support `p`.
pub fn strict_urysohn(a: &MatrixAlgebra, q: &ComplexMatrix, p: &ComplexMatrix, opts: &InterpOptions) -> Result<Interpolant> {
    let tol = &opts.tol;
    require_projection(q, "q", tol)?;
    require_projection(p, "p", tol)?;
    require_member(a, q, "q", tol)?;
    require_member(a, p, "p", tol)?;
    if linalg::min_real_eig(&(p - q)) < -tol.psd_slack {
        return Err(Error::pre("q must lie under p"));
    }
    let n = a.ambient_dim;
    let free = p - q;
    if opts.fast_path && (p * q).dist(&(q * p)) <= tol.eq_tol {
        // commuting pair: x = q + ½(p − q)
        let x = q + &free.scale_re(0.5);
        let checks = strict_checks(a, &x, q, p, opts);
        if checks.iter().all(|c| c.holds) {
            return Ok(assemble(x, None, checks, None, 0));
        }
    }
    let basis = active_basis(a, &free, &free);
    let mut equalities = corner_equalities(n, q, q, "xq = q", "qx = q");
    let zero = ComplexMatrix::zeros(n);
    let mut right = LinMap::sandwich(&id(n), p, ONE);
    right.terms.push((id(n).scale_re(-1.0), id(n)));
    let mut left = LinMap::sandwich(p, &id(n), ONE);
    left.terms.push((id(n).scale_re(-1.0), id(n)));
    equalities.push(eq("xp = x", right, zero.clone()));
    equalities.push(eq("px = x", left, zero.clone()));
    let mut last = None;
    let mut attempts = 0;
    for k in 0..=opts.retries {
        let margin = 0.25 * 0.5f64.powi(k as i32);
        let mut spectral: Vec<Spectral> = half_f(n, &basis).into_iter().collect();
        if !basis.is_empty() {
            spectral.push(
                Spectral::new(
                    "|x - q| on p - q",
                    SpectralKind::NormCap {
                        map: LinMap::identity(n),
                        offset: zero.clone(),
                        cap: 1.0 - margin,
                    },
                )
                .on(basis.clone()),
            );
            spectral.push(
                Spectral::new(
                    "Re x on p - q",
                    SpectralKind::Floor {
                        map: LinMap::identity(n),
                        shift: free.scale_re(-margin),
                    },
                )
                .on(basis.clone()),
            );
        }
        let problem = FeasibilityProblem {
            algebra: a.clone(),
            equalities: equalities.clone(),
            spectral,
        };
        let sub = InterpOptions {
            seed: opts.seed.wrapping_add(1 + k as u64),
            retries: 0,
            ..opts.clone()
        };
        let (sol, used) = solve_retrying(&problem, &sub)?;
        attempts += used;
        let checks = strict_checks(a, &sol.value, q, p, opts);
        let out = assemble(sol.value.clone(), None, checks, Some(&sol), attempts);
        if out.is_feasible() {
            return Ok(out);
        }
        last = Some(out);
    }
    let out = last.expect("at least one attempt");
    Err(Error::NoConvergence(format!(
        "verification failed after {} attempts (worst excess {:e})",
        out.attempts,
        out.worst_excess()
    )))
}

fn require_peak_data(a: &MatrixAlgebra, q: &ComplexMatrix, b: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    require_projection(q, "q", tol)?;
    require_member(a, b, "b", tol)?;
    let bq = b * q;
    if bq.dist(&(q * b)) > tol.eq_tol {
        return Err(Error::pre("b must commute with q"));
    }
    if bq.op_norm() > 1.0 + tol.eq_tol {
        return Err(Error::pre("bq must be a contraction"));
    }
    Ok(())
}

fn peak_problem(a: &MatrixAlgebra, q: &ComplexMatrix, b: &ComplexMatrix) -> (Vec<Equality>, Vec<Vec<C64>>) {
    let n = a.ambient_dim;
    let bq = b * q;
    let free = &id(n) - q;
    (
        corner_equalities(n, q, &bq, "gq = bq", "qg = bq"),
        active_basis(a, &free, &free),
    )
}

fn peak_checks(g: &ComplexMatrix, q: &ComplexMatrix, b: &ComplexMatrix, t: f64) -> Vec<Check> {
    let bq = b * q;
    vec![
        Check::le("gq = bq", (g * q).dist(&bq), t),
        Check::le("qg = bq", (q * g).dist(&bq), t),
    ]
}

/// `g ∈ ½𝔉_A` with `gq = qg = bq`.
pub fn peak_interpolate(a: &MatrixAlgebra, q: &ComplexMatrix, b: &ComplexMatrix, opts: &InterpOptions) -> Result<Interpolant> {
    let tol = &opts.tol;
    require_peak_data(a, q, b, tol)?;
    let n = a.ambient_dim;
    if (&(&id(n) - &b.scale_re(2.0)) * q).op_norm() > 1.0 + tol.eq_tol {
        return Err(Error::pre("(I - 2b)q must be a contraction"));
    }
    let (equalities, basis) = peak_problem(a, q, b);
    let problem = FeasibilityProblem {
        algebra: a.clone(),
        equalities,
        spectral: half_f(n, &basis).into_iter().collect(),
    };
    let (sol, attempts) = solve_retrying(&problem, opts)?;
    let g = sol.value.clone();
    let mut checks = common_checks(a, &g, opts.solver_tol);
    checks.extend(peak_checks(&g, q, b, opts.solver_tol));
    Ok(assemble(g, None, checks, Some(&sol), attempts))
}

/// Where numerical ranges are measured: the range of the unit of `A`, or
/// the whole space when `A` has none.
fn state_space(a: &MatrixAlgebra, tol: &Tolerances) -> Vec<Vec<C64>> {
    match algebra::identity_of(a, tol) {
        Some(e) => range_of(&e),
        None => range_of(&id(a.ambient_dim)),
    }
}

/// Contraction `g ∈ A` with `gq = qg = bq` and numerical range in `E`.
pub fn tietze_lift(
    a: &MatrixAlgebra,
    q: &ComplexMatrix,
    b: &ComplexMatrix,
    region: &ConvexRegion,
    opts: &InterpOptions,
) -> Result<Interpolant> {
    let tol = &opts.tol;
    require_peak_data(a, q, b, tol)?;
    let n = a.ambient_dim;
    let unital = algebra::identity_of(a, tol).is_some();
    if !unital && !region.contains(C64::new(0.0, 0.0), 0.0) {
        return Err(Error::InvalidInput("the region must contain 0 for a nonunital algebra".into()));
    }
    let corner = range_of(q);
    if region.compressed_margin(b, &corner) < -tol.psd_slack {
        return Err(Error::pre("numerical range of qbq is not inside the region"));
    }
    let (equalities, basis) = peak_problem(a, q, b);
    let mut spectral = Vec::new();
    if !basis.is_empty() {
        spectral.push(
            Spectral::new(
                "contraction",
                SpectralKind::NormCap {
                    map: LinMap::identity(n),
                    offset: ComplexMatrix::zeros(n),
                    cap: 1.0,
                },
            )
            .on(basis.clone()),
        );
        for (k, hp) in region.half_planes().iter().enumerate() {
            spectral.push(
                Spectral::new(
                    format!("half-plane {k}"),
                    SpectralKind::Floor {
                        map: LinMap::identity(n).scaled(-C64::from_polar(1.0, -hp.theta)),
                        shift: id(n).scale_re(hp.h),
                    },
                )
                .on(basis.clone()),
            );
        }
    }
    let problem = FeasibilityProblem {
        algebra: a.clone(),
        equalities,
        spectral,
    };
    let (sol, attempts) = solve_retrying(&problem, opts)?;
    let g = sol.value.clone();
    let t = opts.solver_tol;
    let mut checks = vec![
        Check::le("membership", a.residual(&g), t),
        Check::le("contraction", g.op_norm() - 1.0, t),
    ];
    checks.extend(peak_checks(&g, q, b, t));
    let states = state_space(a, tol);
    checks.push(Check::le("range in E", -region.compressed_margin(&g, &states), t));
    Ok(assemble(g, None, checks, Some(&sol), attempts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ZERO;

    fn opts() -> InterpOptions {
        InterpOptions::default()
    }

    fn e(n: usize, i: usize, j: usize) -> ComplexMatrix {
        ComplexMatrix::unit(n, i, j)
    }

    #[test]
    fn dominate_corner_algebra() {
        let a = MatrixAlgebra::from_span(2, &[e(2, 0, 0)], "E11").unwrap();
        let b = e(2, 0, 0).scale_re(0.5);
        let r = dominate(&a, &b, 1e-2, &opts()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
        // the witness ¾E11 satisfies the same checks
        let w = e(2, 0, 0).scale_re(0.75);
        assert!(half_f_gap(&w).abs() < 1e-15);
        assert!((linalg::min_real_eig(&(&w - &b))).abs() < 1e-15);
    }

    #[test]
    fn dominate_rejects_large_b() {
        let a = MatrixAlgebra::full(2);
        let b = id(2);
        assert!(matches!(dominate(&a, &b, 1e-2, &opts()), Err(Error::Precondition(_))));
    }

    #[test]
    fn decompose_examples() {
        let a = MatrixAlgebra::full(2);
        let r = decompose(&a, &ComplexMatrix::zeros(2), &opts()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
        let half = id(2).scale_re(0.5);
        let r = decompose(&a, &half, &opts()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
        let y = r.second.unwrap();
        assert!((&r.value - &y).dist(&half) < 1e-6);
    }

    #[test]
    fn np_scalar_witness() {
        let a = MatrixAlgebra::full(2);
        let cc = id(2).scale_re(0.5);
        let w = id(2).scale_re(1.0 - 0.5f64.sqrt());
        assert!(np_block_margin(&w, &cc).abs() < 1e-12);
        let r = interp_np(&a, &cc, NEAR_EPS, &opts()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
    }

    #[test]
    fn np_diagonal() {
        let a = MatrixAlgebra::diagonal(3);
        let cc = ComplexMatrix::diag_real(&[0.1, 0.5, 0.8]);
        let r = interp_np(&a, &cc, NEAR_EPS, &opts()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
    }

    #[test]
    fn urysohn_upper_triangular() {
        let a = MatrixAlgebra::upper_triangular(2);
        let q = e(2, 0, 0);
        let r = urysohn_interpolate(&a, &q, &id(2), 0.1, NEAR_EPS, &opts()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
        assert!(r.value[(0, 1)].norm() < 1e-6);
        assert!((r.value[(0, 0)] - ONE).norm() < 1e-6);
    }

    #[test]
    fn urysohn_trivial_cases() {
        let a = MatrixAlgebra::full(3);
        let zero = ComplexMatrix::zeros(3);
        let u = e(3, 0, 0) + e(3, 1, 1);
        let r = urysohn_interpolate(&a, &zero, &u, 0.1, NEAR_EPS, &opts()).unwrap();
        assert!(r.is_feasible());
        let r = urysohn_interpolate(&a, &id(3), &id(3), 0.1, NEAR_EPS, &opts()).unwrap();
        assert!(r.is_feasible());
        assert!(r.value.dist(&id(3)) < 1e-9);
    }

    #[test]
    fn urysohn_ambient_u() {
        let a = MatrixAlgebra::upper_triangular(3);
        let q = e(3, 0, 0);
        let s = 0.5f64.sqrt();
        let w = vec![ZERO, c(s, 0.0), c(s, 0.0)];
        let u = &q + &ComplexMatrix::outer(&w, &w);
        assert_eq!(urysohn_mode(&a, &u, &Tolerances::default()), UrysohnMode::Ambient);
        let r = urysohn_interpolate(&a, &q, &u, 0.1, NEAR_EPS, &opts()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
    }

    #[test]
    fn urysohn_rejects_unordered() {
        let a = MatrixAlgebra::diagonal(2);
        let r = urysohn_interpolate(&a, &e(2, 0, 0), &e(2, 1, 1), 0.1, NEAR_EPS, &opts());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn strict_urysohn_diagonal() {
        let a = MatrixAlgebra::diagonal(3);
        let q = e(3, 0, 0);
        let p = &q + &e(3, 1, 1);
        let r = strict_urysohn(&a, &q, &p, &opts()).unwrap();
        assert!(r.is_feasible());
        assert_eq!(r.attempts, 0);
        assert!(r.value.dist(&ComplexMatrix::diag_real(&[1.0, 0.5, 0.0])) < 1e-15);
    }

    #[test]
    fn strict_urysohn_solver_path() {
        let a = MatrixAlgebra::upper_triangular(3);
        let q = e(3, 0, 0);
        let p = &q + &e(3, 1, 1);
        let o = InterpOptions {
            fast_path: false,
            ..opts()
        };
        let r = strict_urysohn(&a, &q, &p, &o).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
        assert!(r.attempts >= 1);
    }

    #[test]
    fn strict_urysohn_degenerate() {
        let a = MatrixAlgebra::diagonal(2);
        let q = e(2, 0, 0);
        let r = strict_urysohn(&a, &q, &q, &opts()).unwrap();
        assert!(r.value.dist(&q) < 1e-15);
        let zero = ComplexMatrix::zeros(2);
        let r = strict_urysohn(&a, &zero, &zero, &opts()).unwrap();
        assert!(r.value.max_abs() == 0.0);
    }

    #[test]
    fn peak_interpolate_examples() {
        let a = MatrixAlgebra::full(2);
        let q = e(2, 0, 0);
        let b = ComplexMatrix::diag_real(&[0.5, 5.0]);
        let r = peak_interpolate(&a, &q, &b, &opts()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
        assert!((r.value[(0, 0)] - c(0.5, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn tietze_square() {
        let a = MatrixAlgebra::full(2);
        let q = e(2, 0, 0);
        let b = ComplexMatrix::diag(&[c(0.5, 0.0), c(0.0, 3.0)]);
        let region = ConvexRegion::rectangle(0.0, 1.0, -0.25, 0.25).unwrap();
        let r = tietze_lift(&a, &q, &b, &region, &opts()).unwrap();
        assert!(r.is_feasible(), "{:?}", r.checks);
        let w = id(2).scale_re(0.5);
        assert!(region.range_margin(&w) >= 0.0);
    }

    #[test]
    fn tietze_requires_zero_for_nonunital() {
        let a = MatrixAlgebra::from_span(2, &[e(2, 0, 1)], "E12").unwrap();
        let q = ComplexMatrix::zeros(2);
        let b = ComplexMatrix::zeros(2);
        let region = ConvexRegion::rectangle(0.5, 1.0, -0.25, 0.25).unwrap();
        assert!(matches!(tietze_lift(&a, &q, &b, &region, &opts()), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn active_basis_of_unital_corner() {
        let a = MatrixAlgebra::from_span(3, &[e(3, 0, 0), e(3, 0, 1), e(3, 1, 1)], "corner").unwrap();
        let basis = active_basis(&a, &id(3), &id(3));
        assert_eq!(basis.len(), 2);
        let p = linalg::projection_onto(&basis, 3);
        assert!(p.dist(&(e(3, 0, 0) + e(3, 1, 1))) < 1e-12);
    }
}
