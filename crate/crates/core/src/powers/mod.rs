//! Principal fractional powers of accretive matrices.
//!
//! Three independent routes: the eigendecomposition (`spectral`), the
//! resolvent integral `x^r = (sin rπ/π)∫₀^∞ t^{r−1}(t + x)⁻¹x dt` by
//! Gauss–Jacobi quadrature (`balakrishnan`), and the binomial series for
//! `n`-th roots of elements of `𝔉` (`series`).

pub mod schur;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen;
use crate::linalg;
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::projections;
use crate::quadrature;
use crate::tol::Tolerances;

/// Eigenvector condition numbers above this are treated as defective.
pub const COND_CAP: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spectral,
    Balakrishnan,
    Series,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerResult {
    pub value: ComplexMatrix,
    pub method: Method,
    pub est_error: f64,
    pub nodes_or_terms: usize,
    /// False only when the quadrature declines to certify its estimate.
    pub certified: bool,
}

fn require_accretive(x: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    let m = linalg::min_real_eig(x);
    if m < -tol.psd_slack {
        return Err(Error::pre(format!("input is not accretive (λmin(Re x) = {m:e})")));
    }
    Ok(m)
}

/// `λ^α` on the principal branch.
fn principal_pow(z: C64, alpha: f64) -> C64 {
    if z == ZERO {
        ZERO
    } else {
        C64::from_polar(z.norm().powf(alpha), z.arg() * alpha)
    }
}

/// `V diag(λ^α) V⁻¹` from the Schur-based eigendecomposition.
pub fn power_spectral(x: &ComplexMatrix, alpha: f64, tol: &Tolerances) -> Result<PowerResult> {
    require_accretive(x, tol)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("exponent must be positive, got {alpha}")));
    }
    let e = schur::eig(x)?;
    if e.cond > COND_CAP {
        return Err(Error::Defective { cond: e.cond });
    }
    let zero_cut = 1e-12 * x.op_norm();
    let powered: Vec<C64> = e
        .values
        .iter()
        .map(|&l| if l.norm() <= zero_cut { ZERO } else { principal_pow(l, alpha) })
        .collect();
    let inv = linalg::inverse(&e.vectors)?;
    let value = &e.vectors * &ComplexMatrix::diag(&powered) * &inv;
    let recon = &e.vectors * &ComplexMatrix::diag(&e.values) * &inv;
    let est_error = recon.dist(x) * alpha.max(1.0) + f64::EPSILON * e.cond * value.op_norm();
    Ok(PowerResult {
        value,
        method: Method::Spectral,
        est_error,
        nodes_or_terms: x.n(),
        certified: true,
    })
}

fn balakrishnan_sum(x: &ComplexMatrix, r: f64, nodes: usize) -> Result<ComplexMatrix> {
    // t = u/(1−u), u = (1+s)/2 turns the integral into
    // ∫_{−1}^{1} (1−s)^{−r}(1+s)^{r−1} (uI + (1−u)x)⁻¹ x ds
    let rule = quadrature::gauss_jacobi(nodes, -r, r - 1.0)?;
    let norm = (r * PI).sin() / PI;
    let n = x.n();
    let id = ComplexMatrix::identity(n);
    let mut acc = ComplexMatrix::zeros(n);
    for (s, w) in rule.nodes.iter().zip(&rule.weights) {
        let u = 0.5 * (1.0 + s);
        let m = id.scale_re(u) + x.scale_re(1.0 - u);
        acc += &linalg::solve(&m, x)?.scale_re(w * norm);
    }
    Ok(acc)
}

/// Gauss–Jacobi quadrature of the resolvent integral; `est_error` compares
/// against the rule with half as many nodes.
pub fn power_balakrishnan(
    x: &ComplexMatrix,
    r: f64,
    nodes: usize,
    tol: &Tolerances,
) -> Result<PowerResult> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!("exponent must lie in (0, 1), got {r}")));
    }
    if nodes < 16 {
        return Err(Error::InvalidInput(format!("at least 16 nodes are required, got {nodes}")));
    }
    let margin = require_accretive(x, tol)?;
    if x.op_norm() == 0.0 {
        return Ok(PowerResult {
            value: x.clone(),
            method: Method::Balakrishnan,
            est_error: 0.0,
            nodes_or_terms: nodes,
            certified: true,
        });
    }
    let value = balakrishnan_sum(x, r, nodes)?;
    let coarse = balakrishnan_sum(x, r, nodes / 2)?;
    let est_error = value.dist(&coarse);
    let certified = !(margin <= tol.psd_slack && est_error > 1e-6);
    if !certified {
        log::warn!("balakrishnan: x is near the imaginary axis and the estimate {est_error:e} exceeds 1e-6");
    }
    Ok(PowerResult {
        value,
        method: Method::Balakrishnan,
        est_error,
        nodes_or_terms: nodes,
        certified,
    })
}

/// `binom(1/n, k)` for `k = 0..=terms`.
fn binomials(inv_n: f64, terms: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(terms + 1);
    let mut b = 1.0;
    out.push(b);
    for k in 1..=terms {
        b *= (inv_n - (k - 1) as f64) / k as f64;
        out.push(b);
    }
    out
}

/// `x^{1/n} = Σ_k binom(1/n, k)(−1)^k (I − x)^k`, truncated after `terms`.
/// `est_error` is the tail `Σ_{k>terms} |binom(1/n, k)|`.
pub fn root_series(x: &ComplexMatrix, n: u32, terms: usize, tol: &Tolerances) -> Result<PowerResult> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("root order must be at least 2, got {n}")));
    }
    let id = ComplexMatrix::identity(x.n());
    let d = &id - x;
    let dn = d.op_norm();
    if dn > 1.0 + tol.eq_tol {
        return Err(Error::pre(format!("‖I − x‖ = {dn} exceeds 1; x is not in 𝔉")));
    }
    let coef = binomials(1.0 / n as f64, terms);
    let mut acc = id.clone();
    let mut p = id;
    let mut sign = 1.0;
    for c in coef.iter().skip(1) {
        p = &p * &d;
        sign = -sign;
        acc += &p.scale_re(sign * c);
    }
    // Σ_{k≥1} |binom(1/n, k)| = 1, all k ≥ 1 terms having the same sign
    let head: f64 = coef.iter().skip(1).map(|c| c.abs()).sum();
    Ok(PowerResult {
        value: acc,
        method: Method::Series,
        est_error: (1.0 - head).max(0.0),
        nodes_or_terms: terms,
        certified: true,
    })
}

/// `x^α = x^m x^r` with `m = ⌊α⌋`, the fractional part spectrally, falling
/// back to quadrature when the eigenvectors are ill-conditioned.
pub fn power(x: &ComplexMatrix, alpha: f64, tol: &Tolerances) -> Result<PowerResult> {
    require_accretive(x, tol)?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("exponent must be positive, got {alpha}")));
    }
    let m = alpha.floor();
    let r = alpha - m;
    let whole = x.powi(m as u32);
    if r <= 1e-15 {
        return Ok(PowerResult {
            value: whole,
            method: Method::Spectral,
            est_error: 0.0,
            nodes_or_terms: 0,
            certified: true,
        });
    }
    let frac = match power_spectral(x, r, tol) {
        Err(Error::Defective { cond }) => {
            log::debug!("power: eigenvector condition {cond:e}, switching to quadrature");
            power_balakrishnan(x, r, 128, tol)?
        }
        other => other?,
    };
    Ok(PowerResult {
        value: &whole * &frac.value,
        est_error: frac.est_error * whole.op_norm().max(1.0),
        ..frac
    })
}

/// `‖(v a v*)^r − v a^r v*‖`.
pub fn vav_identity_check(a: &ComplexMatrix, v: &ComplexMatrix, r: f64, tol: &Tolerances) -> Result<f64> {
    require_accretive(a, tol)?;
    let is_int = r >= 1.0 && r.fract() == 0.0;
    if !(is_int || (r > 0.0 && r < 1.0)) {
        return Err(Error::InvalidInput(format!("r must lie in (0, 1) or be a positive integer, got {r}")));
    }
    let s = projections::support_oracle(a);
    let vv = &v.adjoint() * v;
    if vv.dist(&s) > 1e-7 {
        return Err(Error::pre(format!(
            "v*v differs from the support projection of a by {:e}",
            vv.dist(&s)
        )));
    }
    let vav = v * a * v.adjoint();
    let (lhs, ar) = if is_int {
        (vav.powi(r as u32), a.powi(r as u32))
    } else {
        (power(&vav, r, tol)?.value, power(a, r, tol)?.value)
    };
    Ok(lhs.dist(&(v * &ar * v.adjoint())))
}

/// `m_n = λmin(Re(x^{1/(n+1)}) − Re(x^{1/n}))` for `n = 1..N−1`.
pub fn root_monotonicity_report(x: &ComplexMatrix, big_n: usize, tol: &Tolerances) -> Result<Vec<f64>> {
    if big_n > 12 {
        return Err(Error::InvalidInput(format!("N must be at most 12, got {big_n}")));
    }
    require_accretive(x, tol)?;
    let roots: Vec<ComplexMatrix> = (1..=big_n)
        .map(|n| power(x, 1.0 / n as f64, tol).map(|p| p.value))
        .collect::<Result<_>>()?;
    Ok(roots
        .windows(2)
        .map(|w| linalg::min_real_eig(&(&w[1] - &w[0])))
        .collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RescaledRoots {
    /// `c = (2‖Re(x^{1/2})‖)²`.
    pub c: f64,
    /// `1 − ‖I − 2(x/c)^{1/2}‖`.
    pub half_f_gap: f64,
    pub in_half_f: bool,
    /// `λmin(Re((x/c)^{1/(m+1)}) − Re((x/c)^{1/m}))` for `m = 2..7`.
    pub margins: Vec<f64>,
}

pub fn rescaled_root_check(x: &ComplexMatrix, tol: &Tolerances) -> Result<RescaledRoots> {
    require_accretive(x, tol)?;
    if x.op_norm() == 0.0 {
        return Err(Error::pre("x must be nonzero"));
    }
    let root = power(x, 0.5, tol)?.value;
    let c = (2.0 * root.real_part().op_norm()).powi(2);
    let y = x.scale_re(1.0 / c);
    let roots: Vec<ComplexMatrix> = (2..=8)
        .map(|m| power(&y, 1.0 / m as f64, tol).map(|p| p.value))
        .collect::<Result<_>>()?;
    let half_f_gap = 1.0 - (ComplexMatrix::identity(x.n()) - roots[0].scale_re(2.0)).op_norm();
    Ok(RescaledRoots {
        c,
        half_f_gap,
        in_half_f: half_f_gap >= -tol.psd_slack,
        margins: roots
            .windows(2)
            .map(|w| linalg::min_real_eig(&(&w[1] - &w[0])))
            .collect(),
    })
}

/// Empirical constant in `‖(a^α − b^α)ζ‖ ≤ K‖(a − b)ζ‖^α` over random unit
/// vectors `ζ`, for commuting accretive `a`, `b`.
pub fn holder_check(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    alpha: f64,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("α must lie in (0, 1), got {alpha}")));
    }
    a.same_dim(b)?;
    let comm = a.commutator(b).op_norm();
    if comm > 1e-8 {
        return Err(Error::pre(format!("inputs do not commute (‖ab − ba‖ = {comm:e})")));
    }
    let pa = power(a, alpha, tol)?.value;
    let pb = power(b, alpha, tol)?.value;
    let diff = a - b;
    let pdiff = &pa - &pb;
    let mut rng = gen::rng(seed, 0);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let z = gen::unit_vector(a.n(), &mut rng);
        let den = linalg::vec_norm(&diff.matvec(&z));
        if den <= 1e-8 {
            continue;
        }
        best = best.max(linalg::vec_norm(&pdiff.matvec(&z)) / den.powf(alpha));
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DiskOrder {
    /// `min_θ Re((g − f)(e^{iθ}))` over 4096 boundary samples.
    pub premise_margin: f64,
    /// `λmin(Re(g(I − x) − f(I − x)))`.
    pub conclusion_margin: f64,
    /// `premise_margin < 0` or `conclusion_margin ≥ −psd_slack`.
    pub holds: bool,
}

fn poly_eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
}

fn poly_eval_matrix(coeffs: &[C64], m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.n();
    coeffs.iter().rev().fold(ComplexMatrix::zeros(n), |acc, c| {
        &acc * m + ComplexMatrix::scalar(n, *c)
    })
}

/// For polynomials `f`, `g` with `Re f ≤ Re g` on the unit circle, checks
/// `f(I − x) ≼ g(I − x)` for `x ∈ 𝔉`.
pub fn disk_order_check(f: &[C64], g: &[C64], x: &ComplexMatrix, tol: &Tolerances) -> Result<DiskOrder> {
    let d = ComplexMatrix::identity(x.n()) - x;
    let dn = d.op_norm();
    if dn > 1.0 + tol.eq_tol {
        return Err(Error::pre(format!("‖I − x‖ = {dn} exceeds 1; x is not in 𝔉")));
    }
    let samples = 4096;
    let premise_margin = (0..samples)
        .map(|k| {
            let z = C64::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64);
            (poly_eval(g, z) - poly_eval(f, z)).re
        })
        .fold(f64::INFINITY, f64::min);
    let conclusion_margin =
        linalg::min_real_eig(&(poly_eval_matrix(g, &d) - poly_eval_matrix(f, &d)));
    Ok(DiskOrder {
        premise_margin,
        conclusion_margin,
        holds: premise_margin < 0.0 || conclusion_margin >= -tol.psd_slack,
    })
}
