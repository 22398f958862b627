//! Dense kernels: Hermitian eigendecomposition by cyclic Jacobi rotations,
//! singular values by one-sided Jacobi, LU solves with partial pivoting.

use crate::error::{Error, Result};
use crate::matrix::{c, ComplexMatrix, C64, ONE, ZERO};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order, eigenvectors as the columns of a unitary.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEig {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// `V f(Λ) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k])
                .sum()
        })
    }
}

/// Jacobi rotation parameters `(c, s)` annihilating the off-diagonal entry of
/// the 2x2 Hermitian `[[app, |apq|], [|apq|, aqq]]`.
fn rotation(app: f64, aqq: f64, abs_pq: f64) -> (f64, f64) {
    let tau = (aqq - app) / (2.0 * abs_pq);
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else {
        let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
        sign / (tau.abs() + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    (cs, t * cs)
}

/// Eigendecomposition of the Hermitian part `(H + H*)/2`.
pub fn herm_eig(h: &ComplexMatrix) -> HermEig {
    let n = h.n();
    let hs = h.real_part();
    let mut a: Vec<C64> = hs.as_slice().to_vec();
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = ONE;
        a[i * n + i].im = 0.0;
    }
    let total: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let abs = apq.norm();
                if abs == 0.0 || abs < 1e-300 {
                    continue;
                }
                let (cs, sn) = rotation(a[p * n + p].re, a[q * n + q].re, abs);
                let e = apq / abs;
                let se = e * sn;
                let sec = e.conj() * sn;
                // A <- A G with G[:,p] = c e_p - s conj(e) e_q, G[:,q] = s e e_p + c e_q
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * cs - akq * sec;
                    a[k * n + q] = akp * se + akq * cs;
                }
                // A <- G* A
                for l in 0..n {
                    let apl = a[p * n + l];
                    let aql = a[q * n + l];
                    a[p * n + l] = apl * cs - aql * se;
                    a[q * n + l] = apl * sec + aql * cs;
                }
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;
                a[p * n + p].im = 0.0;
                a[q * n + q].im = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * cs - vkq * sec;
                    v[k * n + q] = vkp * se + vkq * cs;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&k| a[k * n + k].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[i * n + order[j]]);
    HermEig { values, vectors }
}

/// `λmin((M + M*)/2)`.
pub fn min_real_eig(m: &ComplexMatrix) -> f64 {
    herm_eig(m).min()
}

/// `λmax((M + M*)/2)`.
pub fn max_real_eig(m: &ComplexMatrix) -> f64 {
    herm_eig(m).max()
}

/// Thin singular value decomposition `M = U Σ V*`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub values: Vec<f64>,
    /// Left singular vectors (columns); zero columns for zero singular values.
    pub u: Vec<Vec<C64>>,
    /// Right singular vectors (columns), always a full orthonormal basis.
    pub v: Vec<Vec<C64>>,
}

impl Svd {
    /// Right singular vectors with `σ ≤ rel · σmax` (an orthonormal kernel basis).
    pub fn kernel(&self, rel: f64) -> Vec<Vec<C64>> {
        let cut = rel * self.values.first().copied().unwrap_or(0.0);
        self.values
            .iter()
            .zip(&self.v)
            .filter(|(s, _)| **s <= cut)
            .map(|(_, v)| v.clone())
            .collect()
    }

    /// Right singular vectors with `σ > rel · σmax`, spanning `ker(M)^⊥`.
    pub fn corange(&self, rel: f64) -> Vec<Vec<C64>> {
        let cut = rel * self.values.first().copied().unwrap_or(0.0);
        self.values
            .iter()
            .zip(&self.v)
            .filter(|(s, _)| **s > cut)
            .map(|(_, v)| v.clone())
            .collect()
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm2(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// One-sided (Hestenes) Jacobi SVD. Small singular values are computed to
/// high relative accuracy, which kernel decisions rely on.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let n = m.n();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect())
        .collect();
    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = cols[p].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let beta = cols[q].iter().map(|z| z.norm_sqr()).sum::<f64>();
                let gamma = dot(&cols[p], &cols[q]);
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (cs, sn) = rotation(alpha, beta, g);
                let e = gamma / g;
                let se = e * sn;
                let sec = e.conj() * sn;
                for k in 0..n {
                    let xp = cols[p][k];
                    let xq = cols[q][k];
                    cols[p][k] = xp * cs - xq * sec;
                    cols[q][k] = xp * se + xq * cs;
                    let vp = v[p][k];
                    let vq = v[q][k];
                    v[p][k] = vp * cs - vq * sec;
                    v[q][k] = vp * se + vq * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut triples: Vec<(f64, Vec<C64>, Vec<C64>)> = cols
        .into_iter()
        .zip(v)
        .map(|(col, vj)| {
            let s = norm2(&col);
            let u = if s > 0.0 {
                col.iter().map(|z| z / s).collect()
            } else {
                vec![ZERO; n]
            };
            (s, u, vj)
        })
        .collect();
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out = Svd {
        values: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
    };
    for (s, u, vj) in triples {
        out.values.push(s);
        out.u.push(u);
        out.v.push(vj);
    }
    out
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    svd(m).values
}

/// Largest singular value, `sqrt(λmax(M*M))`.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m)[0]
}

/// LU factorization `P M = L U` with partial pivoting.
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails when a pivot falls below `1e-13 · ‖M‖_F`, reporting its index.
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let n = m.n();
        let mut lu = m.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = m.frobenius_norm();
        let floor = 1e-13 * scale;
        for k in 0..n {
            let (piv, mag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if mag <= floor || mag == 0.0 {
                return Err(Error::Singular {
                    pivot: k,
                    magnitude: mag,
                });
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                if f != ZERO {
                    for j in k + 1..n {
                        let u = lu[k * n + j];
                        lu[i * n + j] -= f * u;
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }

    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let cols: Vec<Vec<C64>> = (0..self.n).map(|j| self.solve_vec(&b.column(j))).collect();
        ComplexMatrix::from_columns(&cols)
    }
}

/// `X` with `M X = B`.
pub fn solve(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.same_dim(b)?;
    Ok(Lu::new(m)?.solve(b))
}

/// Like [`solve`], also returning the residual `‖M X − B‖`.
pub fn solve_with_residual(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let x = solve(m, b)?;
    let r = (m * &x - b).op_norm();
    Ok((x, r))
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(m, &ComplexMatrix::identity(m.n()))
}

/// Minimum-norm solution of `G c = h` for Hermitian positive semidefinite
/// `G`, discarding eigenvalues below `rel_cut · λmax`.
pub fn herm_pinv_solve(g: &ComplexMatrix, h: &[C64], rel_cut: f64) -> Vec<C64> {
    let e = herm_eig(g);
    let cut = rel_cut * e.max().max(0.0);
    let n = g.n();
    let mut out = vec![ZERO; n];
    for k in 0..n {
        let l = e.values[k];
        if l <= cut || l <= 0.0 {
            continue;
        }
        let v = e.vector(k);
        let coef = dot(&v, h) / l;
        for (o, vi) in out.iter_mut().zip(&v) {
            *o += vi * coef;
        }
    }
    out
}

/// Orthogonal projection onto the span of orthonormal vectors.
pub fn projection_onto(basis: &[Vec<C64>], n: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(n);
    for v in basis {
        p += &ComplexMatrix::outer(v, v);
    }
    p
}

/// Nearest orthogonal projection to an (approximately) Hermitian matrix:
/// eigenvalues of the Hermitian part are snapped to {0, 1} at threshold ½.
pub fn round_to_projection(m: &ComplexMatrix) -> ComplexMatrix {
    herm_eig(m).apply(|l| if l > 0.5 { 1.0 } else { 0.0 })
}

/// `max(‖P² − P‖, ‖P − P*‖)`.
pub fn projection_defect(p: &ComplexMatrix) -> f64 {
    (p * p - p).op_norm().max(p.hermitian_defect())
}

/// Orthonormal basis of the range of an orthogonal projection.
pub fn projection_range(p: &ComplexMatrix) -> Vec<Vec<C64>> {
    let e = herm_eig(p);
    (0..p.n())
        .filter(|&k| e.values[k] > 0.5)
        .map(|k| e.vector(k))
        .collect()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    norm2(v)
}

pub fn normalize(v: &[C64]) -> Vec<C64> {
    let s = norm2(v);
    v.iter().map(|z| z / s).collect()
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    dot(a, b)
}

#[allow(dead_code)]
pub(crate) fn real(x: f64) -> C64 {
    c(x, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::I;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    #[test]
    fn herm_eig_examples() {
        let e = herm_eig(&ComplexMatrix::diag_real(&[3.0, 1.0]));
        assert_eq!(e.values, vec![1.0, 3.0]);

        let e = herm_eig(&ComplexMatrix::identity(2));
        assert_eq!(e.values, vec![1.0, 1.0]);
        assert_eq!(e.vectors, ComplexMatrix::identity(2));

        let e = herm_eig(&pauli_x());
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn herm_eig_complex_entries() {
        // [[2, i], [-i, 1]] has eigenvalues (3 ± √5)/2.
        let h = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), I], vec![-I, ONE]]).unwrap();
        let e = herm_eig(&h);
        let s5 = 5f64.sqrt();
        assert!((e.values[0] - (3.0 - s5) / 2.0).abs() < 1e-14);
        assert!((e.values[1] - (3.0 + s5) / 2.0).abs() < 1e-14);
        let recon = e.apply(|l| l);
        assert!(recon.dist(&h) < 1e-14);
    }

    #[test]
    fn op_norm_examples() {
        assert!((op_norm(&ComplexMatrix::identity(3)) - 1.0).abs() < 1e-15);
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!((op_norm(&m) - 2.0).abs() < 1e-15);
        let lm = ComplexMatrix::from_rows(&[vec![ONE, I], vec![I, ZERO]]).unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((op_norm(&lm) - golden).abs() < 1e-14);
    }

    #[test]
    fn solve_examples() {
        let b = ComplexMatrix::from_rows(&[vec![ONE, I], vec![c(2.0, 1.0), ZERO]]).unwrap();
        assert_eq!(solve(&ComplexMatrix::identity(2), &b).unwrap(), b);
        let half = solve(
            &ComplexMatrix::scalar(2, c(2.0, 0.0)),
            &ComplexMatrix::identity(2),
        )
        .unwrap();
        assert_eq!(half, ComplexMatrix::scalar(2, c(0.5, 0.0)));
        let x = solve(
            &ComplexMatrix::diag_real(&[1.0, 2.0]),
            &ComplexMatrix::identity(2),
        )
        .unwrap();
        assert_eq!(x, ComplexMatrix::diag_real(&[1.0, 0.5]));
    }

    #[test]
    fn singular_solve_reports_pivot() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        match solve(&m, &ComplexMatrix::identity(2)) {
            Err(Error::Singular { pivot, .. }) => assert_eq!(pivot, 1),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn min_real_eig_examples() {
        assert_eq!(min_real_eig(&ComplexMatrix::identity(2)), 1.0);
        assert_eq!(min_real_eig(&ComplexMatrix::scalar(2, I)), 0.0);
        let lm = ComplexMatrix::from_rows(&[vec![ONE, I], vec![I, ZERO]]).unwrap();
        assert_eq!(min_real_eig(&lm), 0.0);
    }

    #[test]
    fn svd_kernel_of_rank_one() {
        let m = ComplexMatrix::outer(&[ONE, I], &[ONE, ONE]);
        let s = svd(&m);
        assert!((s.values[0] - 2.0).abs() < 1e-14);
        assert!(s.values[1] < 1e-15);
        let k = s.kernel(1e-10);
        assert_eq!(k.len(), 1);
        assert!(vec_norm(&m.matvec(&k[0])) < 1e-14);
    }
}
