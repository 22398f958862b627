//! Random theorem instances whose preconditions hold by construction.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::region::ConvexRegion;
use crate::algebra::{self, MatrixAlgebra};
use crate::error::Result;
use crate::gen::{self, AlgebraKind};
use crate::linalg;
use crate::matrix::{ComplexMatrix, C64};

/// Unital test algebra: diagonal, upper triangular or block upper
/// triangular, `2 ≤ n ≤ max_n`.
pub fn unital_algebra<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Result<MatrixAlgebra> {
    let kinds = [AlgebraKind::Diag, AlgebraKind::Upper, AlgebraKind::BlockUpper];
    let kind = *kinds.choose(rng).expect("nonempty");
    let n = rng.random_range(2..=max_n.max(2));
    gen::gen_algebra(kind, n, rng)
}

/// Nested spectral projections `q ≤ p` of a random self-adjoint element of
/// `A`; both lie in `A`.
pub fn nested_projections<R: Rng + ?Sized>(a: &MatrixAlgebra, rng: &mut R) -> (ComplexMatrix, ComplexMatrix) {
    let sa = algebra::self_adjoint_part(a);
    let h = sa.random_element(rng).real_part();
    let eig = linalg::herm_eig(&h);
    let n = a.ambient_dim;
    // ascending eigenvalues; q takes the top block, p a larger top block
    let p_from = rng.random_range(0..n);
    let q_from = rng.random_range(p_from..=n);
    let proj = |from: usize| {
        let vecs: Vec<Vec<C64>> = (from..n).map(|k| eig.vector(k)).collect();
        linalg::projection_onto(&vecs, n)
    };
    (proj(q_from), proj(p_from))
}

/// Projection onto a random subspace of the range of `I − q`, of dimension
/// at least one when that range is nonzero.
fn ambient_extension<R: Rng + ?Sized>(q: &ComplexMatrix, rng: &mut R) -> ComplexMatrix {
    let n = q.n();
    let comp = &ComplexMatrix::identity(n) - q;
    let range = linalg::projection_range(&linalg::round_to_projection(&comp));
    if range.is_empty() {
        return ComplexMatrix::zeros(n);
    }
    let k = rng.random_range(1..=range.len());
    let w = gen::unitary(range.len(), rng);
    let vecs: Vec<Vec<C64>> = (0..k)
        .map(|j| {
            let mut v = vec![C64::new(0.0, 0.0); n];
            for (i, r) in range.iter().enumerate() {
                for (vi, ri) in v.iter_mut().zip(r) {
                    *vi += ri * w[(i, j)];
                }
            }
            v
        })
        .collect();
    linalg::projection_onto(&vecs, n)
}

fn scaled_to<R: Rng + ?Sized>(x: ComplexMatrix, lo: f64, hi: f64, rng: &mut R) -> ComplexMatrix {
    let norm = x.op_norm();
    if norm <= 1e-12 {
        return ComplexMatrix::zeros(x.n());
    }
    x.scale_re(rng.random_range(lo..hi) / norm)
}

/// Positive element of `C*(A)` with norm in `[lo, hi)`.
pub fn positive_in_envelope<R: Rng + ?Sized>(a: &MatrixAlgebra, lo: f64, hi: f64, rng: &mut R) -> ComplexMatrix {
    let env = algebra::cstar_envelope(a);
    let k = env.random_element(rng);
    scaled_to(&k * &k.adjoint(), lo, hi, rng)
}

pub struct DominateInstance {
    pub algebra: MatrixAlgebra,
    pub b: ComplexMatrix,
}

pub fn dominate_instance<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Result<DominateInstance> {
    let algebra = unital_algebra(max_n, rng)?;
    let b = positive_in_envelope(&algebra, 0.2, 0.95, rng);
    Ok(DominateInstance { algebra, b })
}

pub struct DecomposeInstance {
    pub algebra: MatrixAlgebra,
    pub b: ComplexMatrix,
}

pub fn decompose_instance<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Result<DecomposeInstance> {
    let algebra = unital_algebra(max_n, rng)?;
    let b = scaled_to(algebra.random_element(rng), 0.2, 0.95, rng);
    Ok(DecomposeInstance { algebra, b })
}

pub struct NpInstance {
    pub algebra: MatrixAlgebra,
    pub c: ComplexMatrix,
}

pub fn np_instance<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Result<NpInstance> {
    let algebra = unital_algebra(max_n, rng)?;
    let c = positive_in_envelope(&algebra, 0.1, 0.9, rng);
    Ok(NpInstance { algebra, c })
}

pub struct UrysohnInstance {
    pub algebra: MatrixAlgebra,
    pub q: ComplexMatrix,
    pub u: ComplexMatrix,
}

/// Half the instances take `u ∈ A`, the rest a generic ambient `u ≥ q`.
pub fn urysohn_instance<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Result<UrysohnInstance> {
    let algebra = unital_algebra(max_n, rng)?;
    let (q, p) = nested_projections(&algebra, rng);
    let u = if rng.random_bool(0.5) {
        p
    } else {
        &q + &ambient_extension(&q, rng)
    };
    Ok(UrysohnInstance { algebra, q, u })
}

pub struct StrictInstance {
    pub algebra: MatrixAlgebra,
    pub q: ComplexMatrix,
    pub p: ComplexMatrix,
}

pub fn strict_instance<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Result<StrictInstance> {
    let algebra = unital_algebra(max_n, rng)?;
    let (q, p) = nested_projections(&algebra, rng);
    Ok(StrictInstance { algebra, q, p })
}

pub struct PeakInstance {
    pub algebra: MatrixAlgebra,
    pub q: ComplexMatrix,
    pub b: ComplexMatrix,
}

/// `b = qbq + (I − q) b₂ (I − q)` with `qbq = c q + s w` for a contraction
/// `w ∈ qAq`.
fn corner_element<R: Rng + ?Sized>(
    a: &MatrixAlgebra,
    q: &ComplexMatrix,
    center: C64,
    radius: f64,
    rng: &mut R,
) -> ComplexMatrix {
    let n = a.ambient_dim;
    let comp = &ComplexMatrix::identity(n) - q;
    let w = q * &a.random_element(rng) * q;
    let w_norm = w.op_norm();
    let w = if w_norm > 0.0 { w.scale_re(radius / w_norm) } else { w };
    let rest = &comp * &a.random_element(rng) * &comp;
    let rest = scaled_to(rest, 0.5, 3.0, rng);
    &(&q.scale(center) + &w) + &rest
}

pub fn peak_instance<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Result<PeakInstance> {
    let algebra = unital_algebra(max_n, rng)?;
    let (q, _) = nested_projections(&algebra, rng);
    // qbq = ½(q + w) keeps ‖bq‖ ≤ 1 and ‖(I − 2b)q‖ ≤ 1
    let radius = rng.random_range(0.1..0.5);
    let b = corner_element(&algebra, &q, C64::new(0.5, 0.0), radius, rng);
    Ok(PeakInstance { algebra, q, b })
}

pub struct TietzeInstance {
    pub algebra: MatrixAlgebra,
    pub q: ComplexMatrix,
    pub b: ComplexMatrix,
    pub region: ConvexRegion,
}

pub fn tietze_instance<R: Rng + ?Sized>(max_n: usize, rng: &mut R) -> Result<TietzeInstance> {
    let algebra = unital_algebra(max_n, rng)?;
    let (q, _) = nested_projections(&algebra, rng);
    let center = C64::from_polar(rng.random_range(0.0..0.4), rng.random_range(0.0..std::f64::consts::TAU));
    let radius = rng.random_range(0.2..0.5);
    let sides = rng.random_range(3..=8);
    let region = ConvexRegion::regular(center, radius, sides, rng.random_range(0.0..1.0))?;
    let inner = 0.8 * radius * (std::f64::consts::PI / sides as f64).cos();
    let b = corner_element(&algebra, &q, center, inner, rng);
    Ok(TietzeInstance { algebra, q, b, region })
}
