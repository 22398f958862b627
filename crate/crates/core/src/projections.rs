//! Support and peak projections, the projection lattice, and hereditary
//! subalgebras generated by accretive elements.

use serde::{Deserialize, Serialize};

use crate::algebra::MatrixAlgebra;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::powers::{self, schur, COND_CAP};
use crate::tol::Tolerances;

/// Relative singular-value cut for kernel decisions in the oracles.
pub const KERNEL_TOL: f64 = 1e-10;
/// Largest `‖P² − P‖`, `‖P − P*‖` accepted as a projection.
pub const PROJ_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjMethod {
    Iterative,
    Oracle,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjStatus {
    Converged,
    Diverged,
    Zero,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub proj: ComplexMatrix,
    pub method: ProjMethod,
    pub iterations: usize,
    /// `‖iterative − oracle‖` when both ran.
    pub oracle_residual: Option<f64>,
    pub status: ProjStatus,
    /// `‖y² − y‖` after each iteration.
    pub trace: Vec<f64>,
}

fn require_projection(p: &ComplexMatrix) -> Result<()> {
    let d = linalg::projection_defect(p);
    if d > PROJ_TOL {
        return Err(Error::NotProjection { residual: d });
    }
    Ok(())
}

/// Orthogonal projection onto `ker(x)^⊥`.
pub fn support_oracle(x: &ComplexMatrix) -> ComplexMatrix {
    let s = linalg::svd(x);
    linalg::projection_onto(&s.corange(KERNEL_TOL), x.n())
}

/// Orthogonal projection onto `ker(x − I)`.
pub fn peak_oracle(x: &ComplexMatrix) -> ComplexMatrix {
    let d = x - &ComplexMatrix::identity(x.n());
    let s = linalg::svd(&d);
    // relative to ‖x‖: for x ≈ I the singular values of x − I are all noise
    let cut = KERNEL_TOL * s.values[0].max(x.op_norm());
    let basis: Vec<Vec<C64>> = s
        .values
        .iter()
        .zip(&s.v)
        .filter(|(v, _)| **v <= cut)
        .map(|(_, v)| v.clone())
        .collect();
    linalg::projection_onto(&basis, x.n())
}

/// `x^{2^{−k}}` for `k = 1, 2, …` until `‖y² − y‖ ≤ iter_tol`, then the
/// nearest projection. The roots share one eigendecomposition; when the
/// eigenvectors are too ill-conditioned, square roots are taken one at a time.
fn support_iterative(x: &ComplexMatrix, tol: &Tolerances) -> Result<(ComplexMatrix, usize, Vec<f64>, bool)> {
    let norm = x.op_norm();
    let mut trace = Vec::new();
    let zero_cut = 1e-12 * norm;
    let e = schur::eig(x)?;
    let limit = tol.max_iter.min(200);
    if e.cond <= COND_CAP {
        let inv = linalg::inverse(&e.vectors)?;
        let mut y = x.clone();
        for k in 1..=limit {
            let expo = 0.5f64.powi(k as i32);
            let d: Vec<C64> = e
                .values
                .iter()
                .map(|&l| {
                    if l.norm() <= zero_cut {
                        ZERO
                    } else {
                        C64::from_polar(l.norm().powf(expo), l.arg() * expo)
                    }
                })
                .collect();
            y = &e.vectors * &ComplexMatrix::diag(&d) * &inv;
            let defect = (&y * &y - &y).op_norm();
            trace.push(defect);
            if defect <= tol.iter_tol {
                return Ok((linalg::round_to_projection(&y), k, trace, true));
            }
        }
        return Ok((linalg::round_to_projection(&y), limit, trace, false));
    }
    let mut y = x.clone();
    for k in 1..=limit {
        y = powers::power(&y, 0.5, tol)?.value;
        let defect = (&y * &y - &y).op_norm();
        trace.push(defect);
        if defect <= tol.iter_tol {
            return Ok((linalg::round_to_projection(&y), k, trace, true));
        }
    }
    Ok((linalg::round_to_projection(&y), limit, trace, false))
}

/// `s(x)`, the limit of `x^{1/n}`.
pub fn support_projection(x: &ComplexMatrix, method: ProjMethod, tol: &Tolerances) -> Result<ProjectionResult> {
    let m = linalg::min_real_eig(x);
    if m < -tol.psd_slack {
        return Err(Error::pre(format!("support projection needs an accretive input (λmin(Re x) = {m:e})")));
    }
    let n = x.n();
    if x.op_norm() == 0.0 {
        return Ok(ProjectionResult {
            proj: ComplexMatrix::zeros(n),
            method,
            iterations: 0,
            oracle_residual: (method == ProjMethod::Both).then_some(0.0),
            status: ProjStatus::Zero,
            trace: Vec::new(),
        });
    }
    if method == ProjMethod::Oracle {
        return Ok(ProjectionResult {
            proj: support_oracle(x),
            method,
            iterations: 0,
            oracle_residual: None,
            status: ProjStatus::Converged,
            trace: Vec::new(),
        });
    }
    let (proj, iterations, trace, ok) = support_iterative(x, tol)?;
    let oracle_residual = (method == ProjMethod::Both).then(|| proj.dist(&support_oracle(x)));
    Ok(ProjectionResult {
        proj,
        method,
        iterations,
        oracle_residual,
        status: if ok { ProjStatus::Converged } else { ProjStatus::Diverged },
        trace,
    })
}

/// `u(x) = lim x^n` by repeated squaring. A limit `y` of the squarings that
/// `x` does not fix (`xy ≠ y`, as for `x = −I`) means the full power
/// sequence has no limit.
pub fn peak_projection(x: &ComplexMatrix, method: ProjMethod, tol: &Tolerances) -> Result<ProjectionResult> {
    let norm = x.op_norm();
    if norm > 1.0 + tol.eq_tol {
        return Err(Error::pre(format!("peak projection needs a contraction (‖x‖ = {norm})")));
    }
    let n = x.n();
    let oracle = || -> Result<ComplexMatrix> {
        let gap = 1.0 - (ComplexMatrix::identity(n) - x.scale_re(2.0)).op_norm();
        if gap < -tol.psd_slack {
            return Err(Error::pre("the eigenspace oracle needs an element of ½𝔉"));
        }
        Ok(peak_oracle(x))
    };
    if method == ProjMethod::Oracle {
        let proj = oracle()?;
        let status = if proj.frobenius_norm() == 0.0 { ProjStatus::Zero } else { ProjStatus::Converged };
        return Ok(ProjectionResult {
            proj,
            method,
            iterations: 0,
            oracle_residual: None,
            status,
            trace: Vec::new(),
        });
    }
    let mut y = x.clone();
    let mut trace = Vec::new();
    let mut status = ProjStatus::Diverged;
    let mut proj = ComplexMatrix::zeros(n);
    let mut iterations = 0;
    for k in 1..=tol.max_iter {
        iterations = k;
        y = &y * &y;
        let ynorm = y.op_norm();
        if ynorm < 1e-8 {
            status = ProjStatus::Zero;
            trace.push(0.0);
            break;
        }
        if !ynorm.is_finite() || ynorm > 1e3 {
            break;
        }
        let defect = (&y * &y - &y).op_norm();
        trace.push(defect);
        if defect <= tol.iter_tol {
            if (x * &y - &y).op_norm() <= 1e-8 {
                status = ProjStatus::Converged;
                proj = linalg::round_to_projection(&y);
            }
            break;
        }
    }
    let oracle_residual = match method {
        ProjMethod::Both => Some(proj.dist(&oracle()?)),
        _ => None,
    };
    Ok(ProjectionResult {
        proj,
        method,
        iterations,
        oracle_residual,
        status,
        trace,
    })
}

/// Whether `x` peaks at `q`: every state vanishing on `q` gives `x*x` value
/// below one, i.e. `λmax((I − q)x*x(I − q)) < 1`.
pub fn is_peak_for(x: &ComplexMatrix, q: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    x.same_dim(q)?;
    let norm = x.op_norm();
    if norm > 1.0 + tol.eq_tol {
        return Err(Error::pre(format!("x must be a contraction (‖x‖ = {norm})")));
    }
    require_projection(q)?;
    let r = (q * x - q).op_norm();
    if r > tol.eq_tol {
        return Err(Error::pre(format!("q x must equal q (residual {r:e})")));
    }
    let perp = ComplexMatrix::identity(x.n()) - q;
    let m = &perp * &x.adjoint() * x * &perp;
    Ok(linalg::max_real_eig(&m) < 1.0 - tol.psd_slack)
}

/// `p ∨ q = s(p + q)`.
pub fn join(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<ComplexMatrix> {
    p.same_dim(q)?;
    require_projection(p)?;
    require_projection(q)?;
    Ok(support_oracle(&(p + q)))
}

/// `p ∧ q = I − ((I − p) ∨ (I − q))`.
pub fn meet(p: &ComplexMatrix, q: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(p.n());
    Ok(&id - &join(&(&id - p), &(&id - q))?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HsaIdeal {
    /// `xAx`.
    pub hsa: MatrixAlgebra,
    /// `xA + ℂx`.
    pub ideal: MatrixAlgebra,
    /// Largest residual of `d a d'` outside `D` over basis triples.
    pub hereditary_residual: f64,
    /// `max ‖s(x)d − d‖, ‖d s(x) − d‖` over the basis of `D`.
    pub support_residual: f64,
}

/// Hereditary subalgebra `xAx` and right ideal `xA` generated by `x`.
pub fn hsa_and_ideal(a: &MatrixAlgebra, x: &ComplexMatrix, tol: &Tolerances) -> Result<HsaIdeal> {
    let (inside, r) = a.contains(x, tol);
    if !inside {
        return Err(Error::pre(format!("x is not in the algebra (residual {r:e})")));
    }
    let m = linalg::min_real_eig(x);
    if m < -tol.psd_slack {
        return Err(Error::pre(format!("x is not accretive (λmin(Re x) = {m:e})")));
    }
    let n = a.ambient_dim;
    let d_elems: Vec<ComplexMatrix> = a.basis.iter().map(|b| x * b * x).collect();
    let mut j_elems: Vec<ComplexMatrix> = a.basis.iter().map(|b| x * b).collect();
    j_elems.push(x.clone());
    let hsa = MatrixAlgebra::spanned(n, &d_elems, "xAx");
    let ideal = MatrixAlgebra::spanned(n, &j_elems, "xA");
    let mut hereditary_residual: f64 = 0.0;
    for d1 in &hsa.basis {
        for b in &a.basis {
            let left = d1 * b;
            for d2 in &hsa.basis {
                hereditary_residual = hereditary_residual.max(hsa.residual(&(&left * d2)));
            }
        }
    }
    let s = support_oracle(x);
    let support_residual = hsa
        .basis
        .iter()
        .map(|d| (&s * d - d).op_norm().max((d * &s - d).op_norm()))
        .fold(0.0, f64::max);
    Ok(HsaIdeal {
        hsa,
        ideal,
        hereditary_residual,
        support_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::matrix::{c, I, ONE};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn support_examples() {
        let t = tol();
        let x = ComplexMatrix::diag(&[ZERO, ONE, I]);
        let r = support_projection(&x, ProjMethod::Both, &t).unwrap();
        let expect = ComplexMatrix::diag_real(&[0.0, 1.0, 1.0]);
        assert!(r.proj.dist(&expect) < 1e-12);
        assert!(r.oracle_residual.unwrap() < 1e-12);
        assert_eq!(r.status, ProjStatus::Converged);
        let z = support_projection(&ComplexMatrix::zeros(2), ProjMethod::Iterative, &t).unwrap();
        assert_eq!(z.proj, ComplexMatrix::zeros(2));
        let id = support_projection(&ComplexMatrix::identity(2), ProjMethod::Iterative, &t).unwrap();
        assert!(id.proj.dist(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(support_projection(&ComplexMatrix::scalar(2, c(-1.0, 0.0)), ProjMethod::Oracle, &t).is_err());
    }

    #[test]
    fn peak_examples() {
        let t = tol();
        let r = peak_projection(&ComplexMatrix::diag_real(&[1.0, 0.5]), ProjMethod::Both, &t).unwrap();
        assert!(r.proj.dist(&ComplexMatrix::diag_real(&[1.0, 0.0])) < 1e-12);
        assert!(r.oracle_residual.unwrap() < 1e-12);
        let small = ComplexMatrix::scalar(2, c(0.0, 0.999));
        let r = peak_projection(&small, ProjMethod::Iterative, &t).unwrap();
        assert_eq!(r.status, ProjStatus::Zero);
        let r = peak_projection(&ComplexMatrix::scalar(2, c(-1.0, 0.0)), ProjMethod::Iterative, &t).unwrap();
        assert_eq!(r.status, ProjStatus::Diverged);
    }

    #[test]
    fn peak_of_random_norm_one_half_f() {
        let t = tol();
        for s in 0..10 {
            let x = gen::gen_half_f_norm_one(4, &mut gen::rng(s, 0)).unwrap();
            let r = peak_projection(&x, ProjMethod::Both, &t).unwrap();
            assert_eq!(r.status, ProjStatus::Converged);
            assert!(r.oracle_residual.unwrap() < 1e-6, "seed {s}");
        }
    }

    #[test]
    fn is_peak_examples() {
        let t = tol();
        let q = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert!(is_peak_for(&ComplexMatrix::diag_real(&[1.0, 0.5]), &q, &t).unwrap());
        assert!(!is_peak_for(&ComplexMatrix::identity(2), &q, &t).unwrap());
    }

    #[test]
    fn lattice_examples() {
        let p = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let q = ComplexMatrix::diag_real(&[0.0, 1.0]);
        assert!(join(&p, &q).unwrap().dist(&ComplexMatrix::identity(2)) < 1e-14);
        let h = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        assert!(join(&p, &h).unwrap().dist(&ComplexMatrix::identity(2)) < 1e-12);
        assert!(join(&p, &p).unwrap().dist(&p) < 1e-14);
        assert!(meet(&p, &h).unwrap().frobenius_norm() < 1e-12);
        assert!(matches!(join(&p, &ComplexMatrix::identity(2).scale_re(2.0)), Err(Error::NotProjection { .. })));
    }

    #[test]
    fn hsa_examples() {
        let t = tol();
        let e11 = ComplexMatrix::unit(2, 0, 0);
        let r = hsa_and_ideal(&MatrixAlgebra::full(2), &e11, &t).unwrap();
        assert_eq!((r.hsa.dim(), r.ideal.dim()), (1, 2));
        assert!(r.ideal.residual(&ComplexMatrix::unit(2, 0, 1)) < 1e-14);
        let e22 = ComplexMatrix::unit(2, 1, 1);
        let r = hsa_and_ideal(&MatrixAlgebra::upper_triangular(2), &e22, &t).unwrap();
        assert_eq!((r.hsa.dim(), r.ideal.dim()), (1, 1));
        let up = MatrixAlgebra::upper_triangular(3);
        let r = hsa_and_ideal(&up, &ComplexMatrix::identity(3), &t).unwrap();
        assert_eq!((r.hsa.dim(), r.ideal.dim()), (6, 6));
        assert!(r.hereditary_residual < 1e-12 && r.support_residual < 1e-12);
    }
}
