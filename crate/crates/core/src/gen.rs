//! Seeded random instances.
//!
//! Every random draw in the crate comes from [`rng`], a ChaCha stream keyed by
//! `(seed, stream)`, so a test case is reproducible from those two numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{self, MatrixAlgebra};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{c, ComplexMatrix, C64};
use crate::transforms;

/// Largest dimension the generators accept.
pub const GEN_MAX_DIM: usize = 16;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if n > GEN_MAX_DIM {
        return Err(Error::SizeCap {
            size: n,
            cap: GEN_MAX_DIM,
        });
    }
    Ok(())
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Entries i.i.d. standard complex Gaussian.
pub fn gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| complex_normal(rng))
}

pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    linalg::normalize(&v)
}

pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    gaussian(n, rng).real_part()
}

/// Wishart-style positive semidefinite `G G* / n`.
pub fn psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian(n, rng);
    (&g * &g.adjoint()).scale_re(1.0 / n as f64).real_part()
}

/// Haar-ish unitary from Gram–Schmidt on a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian(n, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let coef = linalg::vdot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= qi * coef;
                }
            }
        }
        cols.push(linalg::normalize(&v));
    }
    ComplexMatrix::from_columns(&cols)
}

/// `H + iK` with `H` Wishart, `K` Hermitian, rescaled to a norm in `[½, 2]`.
pub fn gen_accretive<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_size(n)?;
    let h = psd(n, rng);
    let k = hermitian(n, rng);
    let x = &h + &k.scale(c(0.0, 1.0));
    let target = rng.random_range(0.5..=2.0);
    Ok(x.scale_re(target / x.op_norm()))
}

/// Accretive with a kernel of dimension at least one: `W (a ⊕ 0) W*` with
/// `W` unitary.
pub fn gen_accretive_singular<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_size(n)?;
    if n == 1 {
        return Ok(ComplexMatrix::zeros(1));
    }
    let rank = rng.random_range(1..n);
    let a = gen_accretive(rank, rng)?;
    let core = ComplexMatrix::direct_sum(&a, &ComplexMatrix::zeros(n - rank));
    let w = unitary(n, rng);
    Ok(&w * &core * w.adjoint())
}

/// `𝔉(x)` of a random accretive `x`: an element of `½𝔉` with norm below one.
pub fn gen_half_f<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    transforms::f_transform(&gen_accretive(n, rng)?)
}

/// Norm-one element of `½𝔉`: `W (I_k ⊕ T) W*` with `T = 𝔉(accretive)` and
/// `W` unitary. Eigenvalue 1 of an element of `½𝔉` always splits off
/// orthogonally like this.
pub fn gen_half_f_norm_one<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_size(n)?;
    let k = rng.random_range(1..=n);
    let id = ComplexMatrix::identity(k);
    let core = if k == n {
        id
    } else {
        ComplexMatrix::direct_sum(&id, &gen_half_f(n - k, rng)?)
    };
    let w = unitary(n, rng);
    Ok(&w * &core * w.adjoint())
}

/// `I − C` for a random contraction `C`: an element of `𝔉`.
pub fn gen_f<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<ComplexMatrix> {
    check_size(n)?;
    let g = gaussian(n, rng);
    let r = rng.random_range(0.2..=1.0);
    Ok(ComplexMatrix::identity(n) - g.scale_re(r / g.op_norm()))
}

/// `h^{1/2}(I + i c)h^{1/2}` with `h ⪰ 0` and `‖c‖ ≤ tan ρ`: numerical range
/// inside the sector of half-angle `ρ`.
pub fn gen_sectorial<R: Rng + ?Sized>(n: usize, rho: f64, rng: &mut R) -> Result<ComplexMatrix> {
    check_size(n)?;
    let h = psd(n, rng);
    let root = linalg::herm_eig(&h).apply(|l| l.max(0.0).sqrt());
    let k = hermitian(n, rng);
    let scale = rho.tan() * rng.random_range(0.3..=1.0) / k.op_norm();
    let inner = ComplexMatrix::identity(n) + k.scale(c(0.0, scale));
    Ok(&root * &inner * &root)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraKind {
    Full,
    Diag,
    Upper,
    BlockUpper,
    /// `oa(x)` of a random accretive `x`.
    Oa,
}

impl std::str::FromStr for AlgebraKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "full" => Self::Full,
            "diag" => Self::Diag,
            "upper" => Self::Upper,
            "blockupper" => Self::BlockUpper,
            "oa" => Self::Oa,
            _ => return Err(Error::InvalidInput(format!("unknown algebra kind '{s}'"))),
        })
    }
}

pub fn gen_algebra<R: Rng + ?Sized>(kind: AlgebraKind, n: usize, rng: &mut R) -> Result<MatrixAlgebra> {
    check_size(n)?;
    Ok(match kind {
        AlgebraKind::Full => MatrixAlgebra::full(n),
        AlgebraKind::Diag => MatrixAlgebra::diagonal(n),
        AlgebraKind::Upper => MatrixAlgebra::upper_triangular(n),
        AlgebraKind::BlockUpper => {
            if n < 2 {
                MatrixAlgebra::full(n)
            } else {
                let n1 = rng.random_range(1..n);
                MatrixAlgebra::block_upper(n1, n - n1)
            }
        }
        AlgebraKind::Oa => algebra::oa(&gen_accretive(n, rng)?),
    })
}
