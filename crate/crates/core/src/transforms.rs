//! Cayley and `𝔉` transforms.
//!
//! `𝔉(x) = x(x + I)⁻¹ = ½(I + κ(x))` maps accretive matrices bijectively onto
//! the elements of `½𝔉` with norm below one; `T ↦ T(I − T)⁻¹` inverts it.

use crate::error::Result;
use crate::linalg;
use crate::matrix::ComplexMatrix;
use crate::tol::{EQ_TOL, PSD_SLACK};

fn warn_unless_accretive(x: &ComplexMatrix, what: &str) {
    let m = linalg::min_real_eig(x);
    if m < -PSD_SLACK {
        log::warn!("{what}: input is not accretive (λmin(Re x) = {m:e})");
    }
}

/// `κ(x) = (x − I)(x + I)⁻¹`.
pub fn cayley(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    warn_unless_accretive(x, "cayley");
    let id = ComplexMatrix::identity(x.n());
    // x − I and (x + I)⁻¹ commute
    linalg::solve(&(x + &id), &(x - &id))
}

/// `𝔉(x) = x(x + I)⁻¹`.
pub fn f_transform(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    warn_unless_accretive(x, "f_transform");
    let id = ComplexMatrix::identity(x.n());
    linalg::solve(&(x + &id), x)
}

/// `𝔉(x)` through the Cayley transform, `½(I + κ(x))`.
pub fn f_transform_via_cayley(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(x.n());
    Ok((&id + &cayley(x)?).scale_re(0.5))
}

/// `T(I − T)⁻¹`. Outside `½𝔉 ∩ {‖T‖ < 1}` the result is still computed but
/// need not be accretive; a warning is logged.
pub fn f_inverse(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(t.n());
    let norm = t.op_norm();
    if norm >= 1.0 - EQ_TOL {
        log::warn!("f_inverse: ‖T‖ = {norm} is not below 1");
    }
    let half_f_gap = 1.0 - (&id - &t.scale_re(2.0)).op_norm();
    if half_f_gap < -PSD_SLACK {
        log::warn!("f_inverse: T is outside ½𝔉 (gap {half_f_gap:e}); result may not be accretive");
    }
    linalg::solve(&(&id - t), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, I};

    fn scalar(n: usize, re: f64, im: f64) -> ComplexMatrix {
        ComplexMatrix::scalar(n, c(re, im))
    }

    #[test]
    fn cayley_examples() {
        assert!(cayley(&ComplexMatrix::identity(2)).unwrap().max_abs() < 1e-15);
        assert!(cayley(&ComplexMatrix::zeros(2))
            .unwrap()
            .dist(&scalar(2, -1.0, 0.0))
            < 1e-15);
        assert!(cayley(&scalar(2, 0.0, 1.0)).unwrap().dist(&scalar(2, 0.0, 1.0)) < 1e-15);
    }

    #[test]
    fn f_transform_examples() {
        assert!(f_transform(&ComplexMatrix::zeros(3)).unwrap().max_abs() == 0.0);
        let half = f_transform(&ComplexMatrix::identity(2)).unwrap();
        assert!(half.dist(&scalar(2, 0.5, 0.0)) < 1e-15);
        let t = f_transform(&ComplexMatrix::scalar(2, I)).unwrap();
        assert!(t.dist(&scalar(2, 0.5, 0.5)) < 1e-15);
        assert!((t.op_norm() - 0.5f64.sqrt()).abs() < 1e-15);
        let gap = (ComplexMatrix::identity(2) - t.scale_re(2.0)).op_norm();
        assert!((gap - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_formulas_agree() {
        let x = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), I], vec![I, c(0.0, 0.0)]]).unwrap();
        let a = f_transform(&x).unwrap();
        let b = f_transform_via_cayley(&x).unwrap();
        assert!(a.dist(&b) < 1e-14);
    }

    #[test]
    fn f_inverse_examples() {
        assert!(f_inverse(&ComplexMatrix::zeros(2)).unwrap().max_abs() == 0.0);
        let x = f_inverse(&scalar(2, 0.5, 0.0)).unwrap();
        assert!(x.dist(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn f_inverse_of_identity_is_singular() {
        assert!(f_inverse(&ComplexMatrix::identity(2)).is_err());
    }
}
