//! Gauss–Jacobi quadrature by the Golub–Welsch eigenvalue method.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes on `[−1, 1]` (ascending) and weights for `∫ (1−s)^a (1+s)^b f(s) ds`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// `∫_{−1}^{1} (1−s)^a (1+s)^b ds`.
fn jacobi_moment(a: f64, b: f64) -> f64 {
    if (a + b + 1.0).abs() < 1e-14 {
        // Γ(1 − z)Γ(z) = π / sin(πz) with z = b + 1
        return PI / (PI * (b + 1.0)).sin();
    }
    let ln = (a + b + 1.0) * 2f64.ln() + libm::lgamma(a + 1.0) + libm::lgamma(b + 1.0)
        - libm::lgamma(a + b + 2.0);
    ln.exp()
}

/// Three-term recurrence coefficients of the monic Jacobi polynomials.
fn recurrence(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let ab = a + b;
    alpha.push((b - a) / (ab + 2.0));
    for k in 1..n {
        let k = k as f64;
        let s = 2.0 * k + ab;
        alpha.push((b * b - a * a) / (s * (s + 2.0)));
    }
    // beta[k-1] holds β_k, k = 1..n-1
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let bk = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        beta.push(bk);
    }
    (alpha, beta)
}

/// Eigenvalues of the symmetric tridiagonal matrix `(d, e)` together with the
/// first components of its normalized eigenvectors (implicit QL).
fn tridiagonal_ql(mut d: Vec<f64>, e_in: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut e: Vec<f64> = e_in.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence("tridiagonal QL".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

/// `n`-point Gauss–Jacobi rule for weight `(1−s)^a (1+s)^b`, `a, b > −1`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<GaussRule> {
    if n == 0 || a <= -1.0 || b <= -1.0 {
        return Err(Error::InvalidInput(format!(
            "Gauss–Jacobi needs n ≥ 1 and exponents above −1 (n = {n}, a = {a}, b = {b})"
        )));
    }
    let (alpha, beta) = recurrence(n, a, b);
    let off: Vec<f64> = beta.iter().map(|v| v.sqrt()).collect();
    let (nodes, first) = tridiagonal_ql(alpha, &off)?;
    let mu0 = jacobi_moment(a, b);
    let mut pairs: Vec<(f64, f64)> = nodes
        .into_iter()
        .zip(first)
        .map(|(x, v)| (x, mu0 * v * v))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}
