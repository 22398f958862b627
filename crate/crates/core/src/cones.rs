//! Positivity cones with numeric certificates.
//!
//! The unitization is always realized by adjoining the ambient identity, so
//! `𝔉` membership of `x` is `‖I − x‖ ≤ 1` regardless of which algebra `x` is
//! viewed in.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::algebra::{self, MatrixAlgebra};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{c, ComplexMatrix, C64};
use crate::tol::{Tolerances, Verdict};

/// Relative bound on `‖x v‖` for a kernel vector `v` of `x + x*` to count as
/// a kernel vector of `x` in [`c_certificate`].
pub const KERNEL_COMPAT: f64 = 1e-6;
/// Relative threshold used by the sector-angle bisection.
pub const SECTOR_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub accretive_margin: f64,
    pub norm: f64,
    pub f_gap: f64,
    pub half_f_gap: f64,
    pub c_constant: Option<f64>,
    pub sector_angle: Option<f64>,
    pub im_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FMembership {
    pub in_f: bool,
    pub in_half_f: bool,
    /// `1 − ‖I − x‖`.
    pub f_gap: f64,
    /// `1 − ‖I − 2x‖`.
    pub half_f_gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearPositive {
    pub accretive: bool,
    pub im_norm: f64,
    pub within_eps: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericalRange {
    pub thetas: Vec<f64>,
    /// `h(θ) = λmax(Re(e^{−iθ} x))`.
    pub support: Vec<f64>,
    /// `⟨x v_θ, v_θ⟩` at a top eigenvector `v_θ`.
    pub boundary: Vec<C64>,
}

pub fn is_accretive(x: &ComplexMatrix, tol: &Tolerances) -> Verdict {
    tol.nonneg(linalg::min_real_eig(x))
}

pub fn f_membership(x: &ComplexMatrix, tol: &Tolerances) -> FMembership {
    let id = ComplexMatrix::identity(x.n());
    let f_gap = 1.0 - (&id - x).op_norm();
    let half_f_gap = 1.0 - (&id - &x.scale_re(2.0)).op_norm();
    FMembership {
        in_f: f_gap >= -tol.psd_slack,
        in_half_f: half_f_gap >= -tol.psd_slack,
        f_gap,
        half_f_gap,
    }
}

/// Smallest `C ≥ 0` with `x*x ⪯ C(x + x*)`, or `None` when the kernel of
/// `x + x*` is not contained in the kernel of `x`.
pub fn c_certificate(x: &ComplexMatrix, tol: &Tolerances) -> Option<f64> {
    let norm = x.op_norm();
    if norm == 0.0 {
        return Some(0.0);
    }
    let h = x + &x.adjoint();
    let eig = linalg::herm_eig(&h);
    let kernel_cut = tol.psd_slack * norm;
    if eig.min() < -kernel_cut {
        return None;
    }
    let mut range = Vec::new();
    for k in 0..x.n() {
        let v = eig.vector(k);
        if eig.values[k] <= kernel_cut {
            if linalg::vec_norm(&x.matvec(&v)) > KERNEL_COMPAT * norm {
                return None;
            }
        } else {
            range.push(k);
        }
    }
    if range.is_empty() {
        return Some(0.0);
    }
    // h^{†/2} restricted to the range of h
    let n = x.n();
    let inv_sqrt = ComplexMatrix::from_fn(n, |i, j| {
        range
            .iter()
            .map(|&k| eig.vectors[(i, k)] * eig.vectors[(j, k)].conj() / eig.values[k].sqrt())
            .sum()
    });
    let xx = &x.adjoint() * x;
    let cst = linalg::max_real_eig(&(&inv_sqrt * &xx * &inv_sqrt)).max(0.0);
    let check = linalg::min_real_eig(&(h.scale_re(cst) - &xx));
    if check < -tol.psd_slack * norm.max(1.0).powi(2) {
        log::debug!("c_certificate: post-check failed with margin {check:e}");
        return None;
    }
    Some(cst)
}

fn rotated_real_min(x: &ComplexMatrix, phi: f64) -> f64 {
    let up = linalg::min_real_eig(&x.scale(C64::from_polar(1.0, phi)));
    let down = linalg::min_real_eig(&x.scale(C64::from_polar(1.0, -phi)));
    up.min(down)
}

/// Smallest `ρ ∈ [0, π/2]` such that the numerical range lies in the sector
/// `|arg z| ≤ ρ`, or `None` for a non-accretive `x`.
///
/// The bisection decides each rotated half-plane test at `1e-13 · ‖x‖`
/// rather than at `psd_slack`, since a slack of that size moves the angle of
/// a boundary-touching range by about its square root.
pub fn sector_angle(x: &ComplexMatrix, tol: &Tolerances) -> Option<f64> {
    let norm = x.op_norm();
    if norm == 0.0 {
        return Some(0.0);
    }
    let margin = linalg::min_real_eig(x);
    if margin < -tol.psd_slack {
        return None;
    }
    let thresh = -SECTOR_TOL * norm;
    if margin < thresh {
        return Some(FRAC_PI_2);
    }
    if rotated_real_min(x, FRAC_PI_2) >= thresh {
        return Some(0.0);
    }
    // feasible(ρ) ⇔ both half-planes rotated by π/2 − ρ contain W(x)
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if rotated_real_min(x, FRAC_PI_2 - mid) >= thresh {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

pub fn near_positive_report(x: &ComplexMatrix, eps: f64, tol: &Tolerances) -> NearPositive {
    let accretive = is_accretive(x, tol).holds;
    let im_norm = x.imag_part().op_norm();
    NearPositive {
        accretive,
        im_norm,
        within_eps: accretive && im_norm < eps,
    }
}

/// `h(θ) = λmax(Re(e^{−iθ} x))`, the support function of `W(x)`.
pub fn support_function(x: &ComplexMatrix, theta: f64) -> f64 {
    linalg::max_real_eig(&x.scale(C64::from_polar(1.0, -theta)))
}

pub fn numerical_range(x: &ComplexMatrix, grid_size: usize) -> Result<NumericalRange> {
    if grid_size < 8 {
        return Err(Error::InvalidInput(format!(
            "numerical range grid must have at least 8 points, got {grid_size}"
        )));
    }
    let mut out = NumericalRange {
        thetas: Vec::with_capacity(grid_size),
        support: Vec::with_capacity(grid_size),
        boundary: Vec::with_capacity(grid_size),
    };
    for k in 0..grid_size {
        let theta = 2.0 * PI * k as f64 / grid_size as f64;
        let eig = linalg::herm_eig(&x.scale(C64::from_polar(1.0, -theta)));
        let v = eig.vector(x.n() - 1);
        out.thetas.push(theta);
        out.support.push(eig.max());
        out.boundary.push(linalg::vdot(&v, &x.matvec(&v)));
    }
    Ok(out)
}

/// `Re x` is invertible on the range of the unit of `C*(A)`.
pub fn is_strictly_real_positive(a: &MatrixAlgebra, x: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    let (inside, r) = a.contains(x, tol);
    if !inside {
        return Err(Error::pre(format!("element is not in the algebra (residual {r:e})")));
    }
    if algebra::identity_of(a, tol).is_none() {
        return Err(Error::pre(
            "strict real positivity is only decided for unital algebras",
        ));
    }
    let b = algebra::cstar_envelope(a);
    let e = algebra::identity_of(&b, tol)
        .ok_or_else(|| Error::pre("C*-envelope has no unit"))?;
    if !is_accretive(x, tol).holds {
        return Ok(false);
    }
    let range = linalg::projection_range(&linalg::round_to_projection(&e));
    let compressed = x
        .real_part()
        .compress(&range)
        .ok_or_else(|| Error::pre("unit of the C*-envelope is zero"))?;
    Ok(linalg::min_real_eig(&compressed) > tol.psd_slack)
}

pub fn cone_report(x: &ComplexMatrix, tol: &Tolerances) -> ConeReport {
    let f = f_membership(x, tol);
    ConeReport {
        accretive_margin: linalg::min_real_eig(x),
        norm: x.op_norm(),
        f_gap: f.f_gap,
        half_f_gap: f.half_f_gap,
        c_constant: c_certificate(x, tol),
        sector_angle: sector_angle(x, tol),
        im_norm: x.imag_part().op_norm(),
    }
}

/// The Le Merdy matrix `[[1, i], [i, 0]]`: accretive with norm above one,
/// outside `𝔠`, with non-monotone roots.
pub fn le_merdy() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
        .expect("2x2 literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{I, ONE};
    use std::f64::consts::FRAC_PI_4;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn accretive_examples() {
        let t = tol();
        assert_eq!(is_accretive(&ComplexMatrix::identity(2), &t), Verdict { holds: true, margin: 1.0 });
        let neg = is_accretive(&ComplexMatrix::identity(2).scale_re(-1.0), &t);
        assert!(!neg.holds && neg.margin == -1.0);
        assert_eq!(is_accretive(&le_merdy(), &t), Verdict { holds: true, margin: 0.0 });
    }

    #[test]
    fn f_membership_examples() {
        let t = tol();
        let m = f_membership(&ComplexMatrix::scalar(2, c(0.5, 0.0)), &t);
        assert!(m.in_half_f && m.half_f_gap == 1.0);
        let m = f_membership(&ComplexMatrix::scalar(2, I), &t);
        assert!(!m.in_f);
        assert!((m.f_gap - (1.0 - 2f64.sqrt())).abs() < 1e-15);
        let m = f_membership(&ComplexMatrix::diag_real(&[1.0, 0.0]), &t);
        assert!(m.in_half_f && m.half_f_gap == 0.0);
    }

    #[test]
    fn c_certificate_examples() {
        let t = tol();
        assert!((c_certificate(&ComplexMatrix::identity(2), &t).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(c_certificate(&ComplexMatrix::scalar(2, I), &t), None);
        assert_eq!(c_certificate(&le_merdy(), &t), None);
        assert_eq!(c_certificate(&ComplexMatrix::zeros(2), &t), Some(0.0));
    }

    #[test]
    fn c_certificate_of_projection_with_kernel() {
        // diag(1, 0): x*x = diag(1,0) ⪯ C·diag(2,0) at C = ½
        let c = c_certificate(&ComplexMatrix::diag_real(&[1.0, 0.0]), &tol()).unwrap();
        assert!((c - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sector_angle_examples() {
        let t = tol();
        let d = ComplexMatrix::diag(&[ONE, C64::from_polar(1.0, FRAC_PI_4)]);
        assert!((sector_angle(&d, &t).unwrap() - FRAC_PI_4).abs() < 1e-9);
        assert_eq!(sector_angle(&ComplexMatrix::identity(3), &t), Some(0.0));
        assert!((sector_angle(&le_merdy(), &t).unwrap() - FRAC_PI_2).abs() < 1e-6);
        assert_eq!(sector_angle(&ComplexMatrix::identity(2).scale_re(-1.0), &t), None);
        assert_eq!(sector_angle(&ComplexMatrix::zeros(2), &t), Some(0.0));
    }

    #[test]
    fn near_positive_examples() {
        let t = tol();
        let r = near_positive_report(&ComplexMatrix::diag_real(&[1.0, 0.5]), 1e-12, &t);
        assert!(r.accretive && r.im_norm == 0.0 && r.within_eps);
        let r = near_positive_report(&ComplexMatrix::scalar(2, I), 0.5, &t);
        assert!(r.accretive && r.im_norm == 1.0 && !r.within_eps);
    }

    #[test]
    fn numerical_range_examples() {
        let w = numerical_range(&ComplexMatrix::identity(2), 16).unwrap();
        for (th, h) in w.thetas.iter().zip(&w.support) {
            assert!((h - th.cos()).abs() < 1e-14);
        }
        let w = numerical_range(&ComplexMatrix::diag(&[ONE, I]), 16).unwrap();
        assert!((w.support[0] - 1.0).abs() < 1e-14);
        assert!((w.support[4] - 1.0).abs() < 1e-14);
        let jordan = ComplexMatrix::unit(2, 0, 1);
        let w = numerical_range(&jordan, 720).unwrap();
        assert!(w.support.iter().all(|h| (h - 0.5).abs() < 1e-12));
        assert!(numerical_range(&jordan, 4).is_err());
    }

    #[test]
    fn strictly_real_positive_examples() {
        let t = tol();
        let m2 = MatrixAlgebra::full(2);
        assert!(is_strictly_real_positive(&m2, &ComplexMatrix::identity(2), &t).unwrap());
        assert!(!is_strictly_real_positive(&m2, &ComplexMatrix::diag(&[ONE, I]), &t).unwrap());
        let e11 = ComplexMatrix::unit(2, 0, 0);
        let a = MatrixAlgebra::from_span(2, &[e11.clone()], "E11").unwrap();
        assert!(is_strictly_real_positive(&a, &e11.scale(c(1.0, 1.0)), &t).unwrap());
        let nil = MatrixAlgebra::from_span(2, &[ComplexMatrix::unit(2, 0, 1)], "E12").unwrap();
        assert!(is_strictly_real_positive(&nil, &ComplexMatrix::zeros(2), &t).is_err());
    }
}
