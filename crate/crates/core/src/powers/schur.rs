//! Complex Schur form and eigenvectors of a general square matrix.
//!
//! Householder reduction to Hessenberg form, then Wilkinson-shifted QR
//! sweeps with Givens rotations. Eigenvectors come from back substitution
//! on the triangular factor.

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};

/// `x = Q T Q*` with `T` upper triangular and `Q` unitary.
pub struct Schur {
    pub t: ComplexMatrix,
    pub q: ComplexMatrix,
}

/// Eigenvalues with unit-norm eigenvectors in the columns of `vectors`.
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: ComplexMatrix,
    /// 2-norm condition number of `vectors`.
    pub cond: f64,
}

fn hessenberg(x: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = x.n();
    let mut h = x.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let col: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = linalg::vec_norm(&col);
        if alpha == 0.0 {
            continue;
        }
        let phase = if col[0].norm() > 0.0 { col[0] / col[0].norm() } else { ONE };
        let mut v = col;
        v[0] += phase * alpha;
        let vn = linalg::vec_norm(&v);
        if vn == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H <- (I - 2vv*) H (I - 2vv*) on the trailing block, Q <- Q (I - 2vv*)
        for j in 0..n {
            let s: C64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * s * 2.0;
            }
        }
        for i in 0..n {
            let s: C64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= s * v[j].conj() * 2.0;
            }
            let s: C64 = (0..v.len()).map(|j| q[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                q[(i, k + 1 + j)] -= s * v[j].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let (l1, l2) = (half_tr + root, half_tr - root);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

pub fn schur(x: &ComplexMatrix) -> Result<Schur> {
    let n = x.n();
    let (mut h, mut q) = hessenberg(x);
    let scale = x.frobenius_norm().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0;
    let mut total = 0;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let sub = h[(l, l - 1)].norm();
            let diag = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if sub <= eps * diag || sub <= eps * eps * scale {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > 100 * n.max(10) {
            return Err(Error::NoConvergence("shifted QR iteration".into()));
        }
        let mu = if iter % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + h[(hi, hi - 1)].norm() * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        for k in l..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (ONE, ZERO) } else { (a / r, b / r) };
            for j in k..n {
                let x0 = h[(k, j)];
                let x1 = h[(k + 1, j)];
                h[(k, j)] = c.conj() * x0 + s.conj() * x1;
                h[(k + 1, j)] = -s * x0 + c * x1;
            }
            rots.push((c, s));
        }
        for (idx, (c, s)) in rots.into_iter().enumerate() {
            let k = l + idx;
            let rows = (k + 2).min(hi + 1);
            for i in 0..rows {
                let x0 = h[(i, k)];
                let x1 = h[(i, k + 1)];
                h[(i, k)] = x0 * c + x1 * s;
                h[(i, k + 1)] = -x0 * s.conj() + x1 * c.conj();
            }
            for i in 0..n {
                let x0 = q[(i, k)];
                let x1 = q[(i, k + 1)];
                q[(i, k)] = x0 * c + x1 * s;
                q[(i, k + 1)] = -x0 * s.conj() + x1 * c.conj();
            }
        }
        for k in l..=hi {
            h[(k, k)] += mu;
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t: h, q })
}

/// Eigendecomposition through the Schur form. Nearly equal eigenvalues whose
/// coupling vanishes are treated as one semisimple eigenvalue.
pub fn eig(x: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = x.n();
    let Schur { t, q } = schur(x)?;
    let tnorm = t.frobenius_norm().max(f64::MIN_POSITIVE);
    let sep = 1e-14 * tnorm;
    let mut y_cols = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![ZERO; n];
        y[k] = ONE;
        for i in (0..k).rev() {
            let num: C64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let ynorm = linalg::vec_norm(&y[i + 1..=k]);
            let mut denom = t[(i, i)] - lambda;
            if denom.norm() < sep {
                if num.norm() <= 1e-12 * tnorm * ynorm {
                    y[i] = ZERO;
                    continue;
                }
                denom = C64::new(sep, 0.0);
            }
            y[i] = -num / denom;
        }
        y_cols.push(y);
    }
    let y = ComplexMatrix::from_columns(&y_cols);
    let v = &q * &y;
    let cols: Vec<Vec<C64>> = (0..n).map(|j| linalg::normalize(&v.column(j))).collect();
    let vectors = ComplexMatrix::from_columns(&cols);
    let sv = linalg::singular_values(&vectors);
    let smin = sv[n - 1];
    let cond = if smin > 0.0 { sv[0] / smin } else { f64::INFINITY };
    Ok(EigenDecomposition {
        values: (0..n).map(|k| t[(k, k)]).collect(),
        vectors,
        cond,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::matrix::{c, I};

    #[test]
    fn schur_reconstructs() {
        for s in 0..20 {
            let x = gen::gaussian(6, &mut gen::rng(s, 0));
            let Schur { t, q } = schur(&x).unwrap();
            assert!((&q * &t * q.adjoint()).dist(&x) < 1e-12 * x.op_norm());
            assert!((&q.adjoint() * &q).dist(&ComplexMatrix::identity(6)) < 1e-13);
        }
    }

    #[test]
    fn equal_modulus_eigenvalues() {
        // eigenvalues e^{±iπ/3}
        let x = ComplexMatrix::from_rows(&[vec![ONE, I], vec![I, ZERO]]).unwrap();
        let e = eig(&x).unwrap();
        let mut args: Vec<f64> = e.values.iter().map(|z| z.arg()).collect();
        args.sort_by(f64::total_cmp);
        let third = std::f64::consts::FRAC_PI_3;
        assert!((args[0] + third).abs() < 1e-14 && (args[1] - third).abs() < 1e-14);
        for (k, l) in e.values.iter().enumerate() {
            let v = e.vectors.column(k);
            let r: Vec<C64> = x.matvec(&v).iter().zip(&v).map(|(a, b)| a - b * l).collect();
            assert!(linalg::vec_norm(&r) < 1e-14);
        }
    }

    #[test]
    fn repeated_eigenvalues_are_semisimple() {
        let w = gen::unitary(4, &mut gen::rng(1, 0));
        let d = ComplexMatrix::diag(&[ONE, ONE, c(2.0, 1.0), c(2.0, 1.0)]);
        let x = &w * &d * w.adjoint();
        let e = eig(&x).unwrap();
        assert!(e.cond < 1e3, "cond {}", e.cond);
    }

    #[test]
    fn jordan_block_is_flagged() {
        let j = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!(eig(&j).unwrap().cond > 1e8);
    }
}
