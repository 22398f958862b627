//! Convex spectral feasibility by alternating projections.
//!
//! The unknown `a` ranges over an algebra, written in real coordinates
//! `c ∈ ℝ^{2d}` over its basis. Linear equalities are eliminated up front,
//! `c = c₀ + N z`. Each spectral constraint gets a lifted slot `Y_j`, and the
//! iteration alternates between the affine set `{Y_j = M_j(z)}`, reached by
//! least squares in `z`, and the product of the cones, reached by eigenvalue
//! or singular-value clipping with Dykstra corrections.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::MatrixAlgebra;
use crate::error::{Error, Result};
use crate::gen;
use crate::linalg;
use crate::matrix::{c, ComplexMatrix, C64, ZERO};

/// Default acceptance threshold on every reported residual.
pub const SOLVER_TOL: f64 = 1e-6;

/// `a ↦ Σ P_i a Q_i`.
#[derive(Clone, Debug)]
pub struct LinMap {
    pub terms: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl LinMap {
    pub fn new(terms: Vec<(ComplexMatrix, ComplexMatrix)>) -> Self {
        Self { terms }
    }

    pub fn identity(n: usize) -> Self {
        let id = ComplexMatrix::identity(n);
        Self::new(vec![(id.clone(), id)])
    }

    /// `a ↦ z P a Q`.
    pub fn sandwich(p: &ComplexMatrix, q: &ComplexMatrix, z: C64) -> Self {
        Self::new(vec![(p.scale(z), q.clone())])
    }

    pub fn scaled(&self, z: C64) -> Self {
        Self::new(self.terms.iter().map(|(p, q)| (p.scale(z), q.clone())).collect())
    }

    pub fn apply(&self, a: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(a.n());
        for (p, q) in &self.terms {
            out += &(p * a * q);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Equality {
    pub name: String,
    pub map: LinMap,
    pub target: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub enum SpectralKind {
    /// `(L(a) + L(a)*)/2 + S ⪰ 0`.
    Floor { map: LinMap, shift: ComplexMatrix },
    /// `‖L(a) + W‖ ≤ cap`.
    NormCap { map: LinMap, offset: ComplexMatrix, cap: f64 },
    /// `[[S₁, X*], [X, S₂]] ⪰ 0` with `X = L(a) + W`.
    Schur {
        map: LinMap,
        offset: ComplexMatrix,
        s1: ComplexMatrix,
        s2: ComplexMatrix,
    },
}

/// A spectral constraint, optionally compressed to the span of orthonormal
/// vectors `U` (`U* M U`, or `(U ⊕ U)* M (U ⊕ U)` for Schur blocks).
#[derive(Clone, Debug)]
pub struct Spectral {
    pub name: String,
    pub kind: SpectralKind,
    pub compress: Option<Vec<Vec<C64>>>,
}

impl Spectral {
    pub fn new(name: impl Into<String>, kind: SpectralKind) -> Self {
        Self {
            name: name.into(),
            kind,
            compress: None,
        }
    }

    pub fn on(mut self, basis: Vec<Vec<C64>>) -> Self {
        self.compress = Some(basis);
        self
    }

    fn is_hermitian_slot(&self) -> bool {
        !matches!(self.kind, SpectralKind::NormCap { .. })
    }

    /// The (uncompressed) matrix whose cone membership is required.
    fn raw(&self, a: &ComplexMatrix) -> ComplexMatrix {
        match &self.kind {
            SpectralKind::Floor { map, shift } => map.apply(a).real_part() + shift,
            SpectralKind::NormCap { map, offset, .. } => map.apply(a) + offset,
            SpectralKind::Schur { map, offset, s1, s2 } => {
                let x = map.apply(a) + offset;
                ComplexMatrix::block2(s1, &x.adjoint(), &x, s2)
            }
        }
    }

    /// Slot value: raw matrix, compressed. `None` if the compression is empty.
    fn slot(&self, a: &ComplexMatrix) -> Option<ComplexMatrix> {
        let m = self.raw(a);
        match &self.compress {
            None => Some(m),
            Some(u) if matches!(self.kind, SpectralKind::Schur { .. }) => {
                let n = a.n();
                let doubled: Vec<Vec<C64>> = u
                    .iter()
                    .map(|v| v.iter().copied().chain(std::iter::repeat_n(ZERO, n)).collect())
                    .chain(u.iter().map(|v| std::iter::repeat_n(ZERO, n).chain(v.iter().copied()).collect()))
                    .collect();
                m.compress(&doubled)
            }
            Some(u) => m.compress(u),
        }
    }

    /// Amount by which `a` violates the constraint.
    pub fn violation(&self, a: &ComplexMatrix) -> f64 {
        let Some(y) = self.slot(a) else { return 0.0 };
        self.slot_violation(&y)
    }

    fn slot_violation(&self, y: &ComplexMatrix) -> f64 {
        match &self.kind {
            SpectralKind::NormCap { cap, .. } => (y.op_norm() - cap).max(0.0),
            _ => (-linalg::min_real_eig(y)).max(0.0),
        }
    }

    /// Nearest point of the cone shrunk by `margin`.
    fn project(&self, y: &ComplexMatrix, margin: f64) -> ComplexMatrix {
        match &self.kind {
            SpectralKind::NormCap { cap, .. } => {
                let limit = (cap - margin).max(0.0);
                let s = linalg::svd(y);
                if s.values[0] <= limit {
                    return y.clone();
                }
                let k = y.n();
                let mut out = ComplexMatrix::zeros(k);
                for (i, sigma) in s.values.iter().enumerate() {
                    let sig = sigma.min(limit);
                    if sig == 0.0 {
                        continue;
                    }
                    out += &ComplexMatrix::outer(&s.u[i], &s.v[i]).scale_re(sig);
                }
                out
            }
            _ => {
                let e = linalg::herm_eig(y);
                if e.min() >= margin {
                    return y.real_part();
                }
                e.apply(|l| l.max(margin))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct FeasibilityProblem {
    pub algebra: MatrixAlgebra,
    pub equalities: Vec<Equality>,
    pub spectral: Vec<Spectral>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverVerdict {
    Feasible,
    Unconverged,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibilitySolution {
    pub value: ComplexMatrix,
    pub residuals: Vec<Residual>,
    pub verdict: SolverVerdict,
    pub iterations: usize,
    pub restarts: usize,
}

impl FeasibilitySolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.value).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EngineOptions {
    pub max_rounds: usize,
    pub iters_per_round: usize,
    /// Smallest shrink applied to the cones; early rounds use larger ones so
    /// the limit point is strictly inside.
    pub margin: f64,
    /// Iteration stops once every violation is below this.
    pub stop_tol: f64,
    pub solver_tol: f64,
    /// A round ends after this many iterations without halving the violation.
    pub stall_iters: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            max_rounds: 4,
            iters_per_round: 4000,
            margin: 1e-7,
            stop_tol: 1e-10,
            solver_tol: SOLVER_TOL,
            stall_iters: 1500,
        }
    }
}

/// Hermitian `k × k` as `k²` reals, isometric for the Frobenius norm.
fn vec_herm(m: &ComplexMatrix, out: &mut Vec<f64>) {
    let k = m.n();
    let r2 = std::f64::consts::SQRT_2;
    for i in 0..k {
        out.push(m[(i, i)].re);
        for j in i + 1..k {
            let z = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            out.push(r2 * z.re);
            out.push(r2 * z.im);
        }
    }
}

fn unvec_herm(v: &[f64], k: usize) -> ComplexMatrix {
    let r2 = std::f64::consts::SQRT_2;
    let mut m = ComplexMatrix::zeros(k);
    let mut idx = 0;
    for i in 0..k {
        m[(i, i)] = c(v[idx], 0.0);
        idx += 1;
        for j in i + 1..k {
            let z = c(v[idx] / r2, v[idx + 1] / r2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            idx += 2;
        }
    }
    m
}

fn vec_gen(m: &ComplexMatrix, out: &mut Vec<f64>) {
    for z in m.as_slice() {
        out.push(z.re);
        out.push(z.im);
    }
}

fn unvec_gen(v: &[f64], k: usize) -> ComplexMatrix {
    let data = v.chunks(2).map(|p| c(p[0], p[1])).collect();
    ComplexMatrix::new(k, data).expect("finite slot")
}

/// Real dense matrix, row-major.
#[derive(Clone, Debug)]
struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Dense {
    fn from_columns(cols: &[Vec<f64>], rows: usize) -> Self {
        let nc = cols.len();
        let mut data = vec![0.0; rows * nc];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..rows {
                data[i * nc + j] = col[i];
            }
        }
        Self { rows, cols: nc, data }
    }

    fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn t_mul_vec_add(&self, y: &[f64], out: &mut [f64]) {
        for i in 0..self.rows {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (o, a) in out.iter_mut().zip(row) {
                *o += a * yi;
            }
        }
    }

    /// `self · B` for `B` given as `cols × k` row-major.
    fn mul(&self, b: &[f64], k: usize) -> Dense {
        let mut data = vec![0.0; self.rows * k];
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == 0.0 {
                    continue;
                }
                for j in 0..k {
                    data[i * k + j] += a * b[l * k + j];
                }
            }
        }
        Dense { rows: self.rows, cols: k, data }
    }
}

/// One-sided Jacobi SVD of a real matrix given by columns. Returns singular
/// values, right singular vectors (columns of a `p × p` orthogonal matrix)
/// and the rotated columns `A V`.
fn real_svd(mut cols: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let p = cols.len();
    let mut v: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..p).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _ in 0..60 {
        let mut rotated = false;
        for i in 0..p {
            for j in i + 1..p {
                let alpha: f64 = cols[i].iter().map(|x| x * x).sum();
                let beta: f64 = cols[j].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[i].iter().zip(&cols[j]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for k in 0..cols[i].len() {
                    let x = cols[i][k];
                    let y = cols[j][k];
                    cols[i][k] = cs * x - sn * y;
                    cols[j][k] = sn * x + cs * y;
                }
                for k in 0..p {
                    let x = v[i][k];
                    let y = v[j][k];
                    v[i][k] = cs * x - sn * y;
                    v[j][k] = sn * x + cs * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    (sigma, v, cols)
}

/// Cholesky factor of a symmetric positive definite matrix (row-major).
fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(Error::NoConvergence("normal matrix is not positive definite".into()));
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

/// Algebra element from real coordinates.
fn element(alg: &MatrixAlgebra, coords: &[f64]) -> ComplexMatrix {
    let cplx: Vec<C64> = coords.chunks(2).map(|p| c(p[0], p[1])).collect();
    alg.from_coords(&cplx)
}

struct Slot {
    k: usize,
    hermitian: bool,
    /// Linear part in `z` coordinates.
    g: Dense,
    /// Value at `z = 0`.
    g0: Vec<f64>,
}

impl Slot {
    fn unvec(&self, v: &[f64]) -> ComplexMatrix {
        if self.hermitian {
            unvec_herm(v, self.k)
        } else {
            unvec_gen(v, self.k)
        }
    }

    fn vec(&self, m: &ComplexMatrix) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.g0.len());
        if self.hermitian {
            vec_herm(m, &mut out);
        } else {
            vec_gen(m, &mut out);
        }
        out
    }
}

fn validate(p: &FeasibilityProblem) -> Result<()> {
    let n = p.algebra.ambient_dim;
    if p.equalities.is_empty() && p.spectral.is_empty() {
        return Err(Error::InvalidInput("a feasibility problem needs at least one constraint".into()));
    }
    let check = |m: &ComplexMatrix, what: &str| -> Result<()> {
        if m.n() != n {
            return Err(Error::InvalidInput(format!(
                "{what}: matrix of size {} in a problem of size {n}",
                m.n()
            )));
        }
        Ok(())
    };
    let check_map = |l: &LinMap, what: &str| -> Result<()> {
        for (a, b) in &l.terms {
            check(a, what)?;
            check(b, what)?;
        }
        Ok(())
    };
    for e in &p.equalities {
        check_map(&e.map, &e.name)?;
        check(&e.target, &e.name)?;
    }
    for s in &p.spectral {
        match &s.kind {
            SpectralKind::Floor { map, shift } => {
                check_map(map, &s.name)?;
                check(shift, &s.name)?;
            }
            SpectralKind::NormCap { map, offset, cap } => {
                check_map(map, &s.name)?;
                check(offset, &s.name)?;
                if !(*cap >= 0.0) {
                    return Err(Error::InvalidInput(format!("{}: negative norm cap", s.name)));
                }
            }
            SpectralKind::Schur { map, offset, s1, s2 } => {
                check_map(map, &s.name)?;
                for m in [offset, s1, s2] {
                    check(m, &s.name)?;
                }
            }
        }
        if let Some(u) = &s.compress {
            if u.iter().any(|v| v.len() != n) {
                return Err(Error::InvalidInput(format!("{}: compression vectors of wrong length", s.name)));
            }
        }
    }
    Ok(())
}

/// Residual table for a candidate `a`: operator-norm equality residuals and
/// spectral violations.
pub fn residuals(p: &FeasibilityProblem, a: &ComplexMatrix) -> Vec<Residual> {
    let mut out: Vec<Residual> = p
        .equalities
        .iter()
        .map(|e| Residual {
            name: e.name.clone(),
            value: e.map.apply(a).dist(&e.target),
        })
        .collect();
    out.extend(p.spectral.iter().map(|s| Residual {
        name: s.name.clone(),
        value: s.violation(a),
    }));
    out.push(Residual {
        name: "membership".into(),
        value: p.algebra.residual(a),
    });
    out
}

fn finish(p: &FeasibilityProblem, a: ComplexMatrix, iterations: usize, restarts: usize, tol: f64) -> FeasibilitySolution {
    let residuals = residuals(p, &a);
    let verdict = if residuals.iter().all(|r| r.value <= tol) {
        SolverVerdict::Feasible
    } else {
        SolverVerdict::Unconverged
    };
    FeasibilitySolution {
        value: a,
        residuals,
        verdict,
        iterations,
        restarts,
    }
}

pub fn solve_feasibility(p: &FeasibilityProblem, seed: u64, max_rounds: usize) -> Result<FeasibilitySolution> {
    let opts = EngineOptions {
        max_rounds,
        ..EngineOptions::default()
    };
    solve_with(p, seed, &opts)
}

pub fn solve_with(p: &FeasibilityProblem, seed: u64, opts: &EngineOptions) -> Result<FeasibilitySolution> {
    validate(p)?;
    let alg = &p.algebra;
    let n = alg.ambient_dim;
    let dim = 2 * alg.dim();
    if dim == 0 {
        return Ok(finish(p, ComplexMatrix::zeros(n), 0, 0, opts.solver_tol));
    }
    let zero = ComplexMatrix::zeros(n);
    let directions: Vec<ComplexMatrix> = alg
        .basis
        .iter()
        .flat_map(|b| [b.clone(), b.scale(c(0.0, 1.0))])
        .collect();

    // equality elimination: c = c0 + N z
    let (c0, null) = if p.equalities.is_empty() {
        let null: Vec<Vec<f64>> = (0..dim)
            .map(|j| (0..dim).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        (vec![0.0; dim], null)
    } else {
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); dim];
        let mut rhs = Vec::new();
        for e in &p.equalities {
            vec_gen(&(&e.target - &e.map.apply(&zero)), &mut rhs);
            for (j, d) in directions.iter().enumerate() {
                vec_gen(&e.map.apply(d), &mut cols[j]);
            }
        }
        let (sigma, v, av) = real_svd(cols);
        let smax = sigma.iter().copied().fold(0.0, f64::max);
        let cut = 1e-10 * smax.max(1e-300);
        let mut c0 = vec![0.0; dim];
        let mut null = Vec::new();
        for k in 0..dim {
            if sigma[k] <= cut {
                null.push(v[k].clone());
            } else {
                let coef = av[k].iter().zip(&rhs).map(|(a, b)| a * b).sum::<f64>() / (sigma[k] * sigma[k]);
                for (ci, vi) in c0.iter_mut().zip(&v[k]) {
                    *ci += coef * vi;
                }
            }
        }
        (c0, null)
    };
    let base = element(alg, &c0);
    let eq_res = p
        .equalities
        .iter()
        .map(|e| e.map.apply(&base).dist(&e.target))
        .fold(0.0, f64::max);
    if eq_res > opts.stop_tol.max(1e-9) * (1.0 + base.op_norm()) || p.spectral.is_empty() || null.is_empty() {
        return Ok(finish(p, base, 1, 0, opts.solver_tol));
    }
    let q = null.len();
    let null_rm: Vec<f64> = (0..dim).flat_map(|i| null.iter().map(move |v| v[i])).collect();

    // lifted slots
    let mut slots: Vec<(usize, Slot)> = Vec::new();
    for (idx, s) in p.spectral.iter().enumerate() {
        let Some(y0) = s.slot(&base) else { continue };
        let k = y0.n();
        let hermitian = s.is_hermitian_slot();
        let proto = Slot {
            k,
            hermitian,
            g: Dense { rows: 0, cols: 0, data: Vec::new() },
            g0: Vec::new(),
        };
        let g0 = proto.vec(&y0);
        let rows = g0.len();
        let y_zero = s.slot(&zero).expect("same compression");
        let v_zero = proto.vec(&y_zero);
        let cols: Vec<Vec<f64>> = directions
            .iter()
            .map(|d| {
                let y = s.slot(d).expect("same compression");
                proto.vec(&y).iter().zip(&v_zero).map(|(a, b)| a - b).collect()
            })
            .collect();
        let g_full = Dense::from_columns(&cols, rows);
        let g = g_full.mul(&null_rm, q);
        slots.push((idx, Slot { k, hermitian, g, g0 }));
    }
    if slots.is_empty() {
        return Ok(finish(p, base, 1, 0, opts.solver_tol));
    }

    // normal matrix w I + Σ GᵀG
    let mut normal = vec![0.0; q * q];
    for (_, s) in &slots {
        for r in 0..s.g.rows {
            let row = &s.g.data[r * q..(r + 1) * q];
            for i in 0..q {
                if row[i] == 0.0 {
                    continue;
                }
                for j in 0..q {
                    normal[i * q + j] += row[i] * row[j];
                }
            }
        }
    }
    let diag_max = (0..q).map(|i| normal[i * q + i]).fold(0.0, f64::max).max(1.0);
    let w = 1e-6 * diag_max;
    for i in 0..q {
        normal[i * q + i] += w;
    }
    let chol = cholesky(&normal, q)?;

    let to_matrix = |z: &[f64]| -> ComplexMatrix {
        let mut cc = c0.clone();
        for (j, v) in null.iter().enumerate() {
            for (ci, vi) in cc.iter_mut().zip(v) {
                *ci += z[j] * vi;
            }
        }
        element(alg, &cc)
    };
    let violation_of = |ys: &[Vec<f64>]| -> f64 {
        slots
            .iter()
            .zip(ys)
            .map(|((idx, s), y)| p.spectral[*idx].slot_violation(&s.unvec(y)))
            .fold(0.0, f64::max)
    };

    let mut rng = gen::rng(seed, 0x5eed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut total = 0;
    let mut rounds_used = 0;
    for round in 0..opts.max_rounds.max(1) {
        rounds_used = round;
        // start deep inside the cones, then relax towards the boundary
        let margin = (1e-3 * 0.01f64.powi(round as i32)).max(opts.margin);
        // round 1 refines the best point at the smaller margin, later rounds restart
        let mut z: Vec<f64> = match (round, &best) {
            (0, _) => vec![0.0; q],
            (1, Some((_, zb))) => zb.clone(),
            _ => (0..q).map(|_| rng.sample::<f64, _>(StandardNormal)).collect(),
        };
        let mut ys: Vec<Vec<f64>> = slots
            .iter()
            .map(|(_, s)| s.g.mul_vec(&z).iter().zip(&s.g0).map(|(a, b)| a + b).collect())
            .collect();
        let mut incs: Vec<Vec<f64>> = slots.iter().map(|(_, s)| vec![0.0; s.g0.len()]).collect();
        let mut round_best = f64::INFINITY;
        let mut last_gain = 0;
        for it in 0..opts.iters_per_round {
            total += 1;
            if it % 5 == 0 {
                let v = violation_of(&ys);
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, z.clone()));
                }
                if v <= opts.stop_tol {
                    return Ok(finish(p, to_matrix(&z), total, round, opts.solver_tol));
                }
                if v < 0.5 * round_best {
                    round_best = v;
                    last_gain = it;
                } else if it - last_gain > opts.stall_iters {
                    break;
                }
            }
            let mut rhs: Vec<f64> = z.iter().map(|zi| w * zi).collect();
            for (((idx, s), y), inc) in slots.iter().zip(&ys).zip(incs.iter_mut()) {
                let t: Vec<f64> = y.iter().zip(inc.iter()).map(|(a, b)| a + b).collect();
                let proj = s.vec(&p.spectral[*idx].project(&s.unvec(&t), margin));
                for ((ii, ti), pi) in inc.iter_mut().zip(&t).zip(&proj) {
                    *ii = ti - pi;
                }
                let shifted: Vec<f64> = proj.iter().zip(&s.g0).map(|(a, b)| a - b).collect();
                s.g.t_mul_vec_add(&shifted, &mut rhs);
            }
            z = cholesky_solve(&chol, q, &rhs);
            for ((_, s), y) in slots.iter().zip(ys.iter_mut()) {
                *y = s.g.mul_vec(&z).iter().zip(&s.g0).map(|(a, b)| a + b).collect();
            }
        }
    }
    let (_, z) = best.expect("at least one iteration");
    Ok(finish(p, to_matrix(&z), total, rounds_used, opts.solver_tol))
}
