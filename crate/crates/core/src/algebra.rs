//! Finite-dimensional operator algebras `A ⊆ M_n`.
//!
//! An algebra is stored as a basis that is orthonormal for the trace inner
//! product `⟨X, Y⟩ = tr(Y* X)`. Constructions close spans under products by
//! sweeping over basis pairs until the dimension stabilizes.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen;
use crate::linalg;
use crate::matrix::{c, ComplexMatrix, C64, ZERO};
use crate::tol::Tolerances;

/// Relative threshold below which a Gram–Schmidt remainder counts as zero.
pub const RANK_TOL: f64 = 1e-10;
/// Largest ambient dimension `amplify` will build.
pub const AMPLIFY_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GenMode {
    Algebra,
    Cstar,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixAlgebra {
    pub ambient_dim: usize,
    pub basis: Vec<ComplexMatrix>,
    pub contains_identity: bool,
    pub label: String,
}

/// Modified Gram–Schmidt with a second orthogonalization pass. Returns false
/// when `m` is already in the span.
fn push_orthonormal(basis: &mut Vec<ComplexMatrix>, m: &ComplexMatrix) -> bool {
    let norm0 = m.frobenius_norm();
    if norm0 == 0.0 {
        return false;
    }
    let mut v = m.clone();
    for _ in 0..2 {
        for b in basis.iter() {
            let coef = v.inner(b);
            if coef != ZERO {
                v -= &b.scale(coef);
            }
        }
    }
    let r = v.frobenius_norm();
    if r <= RANK_TOL * norm0 {
        return false;
    }
    basis.push(v.scale_re(1.0 / r));
    true
}

fn orthonormalize(ms: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let mut basis = Vec::new();
    for m in ms {
        push_orthonormal(&mut basis, m);
    }
    basis
}

/// Extend an orthonormal basis until the span is closed under products.
fn close_under_products(mut basis: Vec<ComplexMatrix>) -> Vec<ComplexMatrix> {
    let mut done = 0;
    while done < basis.len() {
        let start = basis.len();
        let mut fresh = Vec::new();
        for i in 0..start {
            for j in 0..start {
                if i < done && j < done {
                    continue;
                }
                fresh.push(&basis[i] * &basis[j]);
            }
        }
        for m in &fresh {
            push_orthonormal(&mut basis, m);
        }
        done = start;
    }
    basis
}

impl MatrixAlgebra {
    /// Algebra spanned by `elements`. The span must already be closed under
    /// products; use [`generate_algebra`] otherwise.
    pub fn from_span(n: usize, elements: &[ComplexMatrix], label: impl Into<String>) -> Result<Self> {
        for m in elements {
            m.check_dim(n);
        }
        let basis = orthonormalize(elements);
        let mut alg = Self {
            ambient_dim: n,
            basis,
            contains_identity: false,
            label: label.into(),
        };
        let defect = alg.closure_defect();
        if defect > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "span is not closed under multiplication (residual {defect:e})"
            )));
        }
        alg.refresh_identity_flag();
        Ok(alg)
    }

    /// Span of `elements` with no closure check.
    pub fn spanned(n: usize, elements: &[ComplexMatrix], label: impl Into<String>) -> Self {
        let mut alg = Self {
            ambient_dim: n,
            basis: orthonormalize(elements),
            contains_identity: false,
            label: label.into(),
        };
        alg.refresh_identity_flag();
        alg
    }

    pub fn zero(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: Vec::new(),
            contains_identity: false,
            label: "zero".into(),
        }
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..n)
            .flat_map(|i| (0..n).map(move |j| ComplexMatrix::unit(n, i, j)))
            .collect();
        Self {
            ambient_dim: n,
            basis,
            contains_identity: true,
            label: format!("full:{n}"),
        }
    }

    pub fn diagonal(n: usize) -> Self {
        Self {
            ambient_dim: n,
            basis: (0..n).map(|i| ComplexMatrix::unit(n, i, i)).collect(),
            contains_identity: true,
            label: format!("diag:{n}"),
        }
    }

    pub fn upper_triangular(n: usize) -> Self {
        let basis = (0..n)
            .flat_map(|i| (i..n).map(move |j| ComplexMatrix::unit(n, i, j)))
            .collect();
        Self {
            ambient_dim: n,
            basis,
            contains_identity: true,
            label: format!("upper:{n}"),
        }
    }

    /// `[[M_{n1}, M_{n1×n2}], [0, M_{n2}]]`.
    pub fn block_upper(n1: usize, n2: usize) -> Self {
        let n = n1 + n2;
        let block = |i: usize| if i < n1 { 0 } else { 1 };
        let basis = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| block(i) <= block(j))
            .map(|(i, j)| ComplexMatrix::unit(n, i, j))
            .collect();
        Self {
            ambient_dim: n,
            basis,
            contains_identity: true,
            label: format!("blockupper:{n1},{n2}"),
        }
    }

    /// Parse a canned algebra name: `full:n`, `upper:n`, `diag:n`,
    /// `blockupper:n1,n2` or `span:n:E11,E12,...` (1-based matrix units).
    pub fn parse_canned(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unrecognized algebra '{spec}'"));
        let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
        let num = |s: &str| -> Result<usize> {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(bad)
        };
        match kind {
            "full" => Ok(Self::full(num(rest)?)),
            "upper" => Ok(Self::upper_triangular(num(rest)?)),
            "diag" => Ok(Self::diagonal(num(rest)?)),
            "blockupper" => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Ok(Self::block_upper(num(a)?, num(b)?))
            }
            "span" => {
                let (n, units) = rest.split_once(':').ok_or_else(bad)?;
                let n = num(n)?;
                let mut elems = Vec::new();
                for u in units.split(',') {
                    let u = u.trim();
                    let digits = u.strip_prefix('E').ok_or_else(bad)?;
                    let (i, j) = if digits.len() == 2 {
                        (num(&digits[..1])?, num(&digits[1..])?)
                    } else {
                        let (i, j) = digits.split_once('_').ok_or_else(bad)?;
                        (num(i)?, num(j)?)
                    };
                    if i > n || j > n {
                        return Err(bad());
                    }
                    elems.push(ComplexMatrix::unit(n, i - 1, j - 1));
                }
                Self::from_span(n, &elems, spec)
            }
            _ => Err(bad()),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates `⟨M, b_i⟩` of the orthogonal projection onto the span.
    pub fn coords(&self, m: &ComplexMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| m.inner(b)).collect()
    }

    pub fn from_coords(&self, coords: &[C64]) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.ambient_dim);
        for (b, z) in self.basis.iter().zip(coords) {
            out += &b.scale(*z);
        }
        out
    }

    /// Orthogonal projection onto the span (Frobenius-nearest element).
    pub fn project(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.from_coords(&self.coords(m))
    }

    /// `‖M − P_A(M)‖`.
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        m.dist(&self.project(m))
    }

    /// Membership up to `eq_tol · max(1, ‖M‖)`.
    pub fn contains(&self, m: &ComplexMatrix, tol: &Tolerances) -> (bool, f64) {
        m.check_dim(self.ambient_dim);
        let r = self.residual(m);
        (r <= tol.eq_tol * m.op_norm().max(1.0), r)
    }

    /// Largest residual of a basis product after projection onto the span.
    pub fn closure_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.residual(&(a * b)));
            }
        }
        worst
    }

    /// Max of `‖G − I‖` over the Gram matrix entries.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b) - target).norm());
            }
        }
        worst
    }

    fn refresh_identity_flag(&mut self) {
        let id = ComplexMatrix::identity(self.ambient_dim);
        self.contains_identity = self.dim() > 0 && self.residual(&id) <= 1e-9;
    }

    /// Largest `‖P_B(M) − M‖` over the basis of `other`, both directions.
    pub fn mutual_residual(&self, other: &MatrixAlgebra) -> f64 {
        let a = other
            .basis
            .iter()
            .map(|b| self.residual(b))
            .fold(0.0, f64::max);
        let b = self
            .basis
            .iter()
            .map(|b| other.residual(b))
            .fold(0.0, f64::max);
        a.max(b)
    }

    /// `{a* : a ∈ A}`.
    pub fn adjoint_algebra(&self) -> MatrixAlgebra {
        MatrixAlgebra {
            ambient_dim: self.ambient_dim,
            basis: self.basis.iter().map(|b| b.adjoint()).collect(),
            contains_identity: self.contains_identity,
            label: format!("{}*", self.label),
        }
    }

    /// A random element with standard complex Gaussian coordinates.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        let coords: Vec<C64> = (0..self.dim())
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        self.from_coords(&coords)
    }
}

/// Span-closure of words in the generators (and their adjoints in `Cstar`
/// mode, and `I` when requested).
pub fn generate_algebra(
    generators: &[ComplexMatrix],
    mode: GenMode,
    with_identity: bool,
) -> Result<MatrixAlgebra> {
    let n = generators
        .first()
        .map(|g| g.n())
        .ok_or_else(|| Error::InvalidInput("at least one generator is required".into()))?;
    for g in generators {
        if g.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.n(),
            });
        }
    }
    let mut seeds: Vec<ComplexMatrix> = Vec::new();
    if with_identity {
        seeds.push(ComplexMatrix::identity(n));
    }
    for g in generators {
        seeds.push(g.clone());
        if mode == GenMode::Cstar {
            seeds.push(g.adjoint());
        }
    }
    let basis = close_under_products(orthonormalize(&seeds));
    let mut alg = MatrixAlgebra {
        ambient_dim: n,
        basis,
        contains_identity: false,
        label: match mode {
            GenMode::Algebra => "oa".into(),
            GenMode::Cstar => "cstar".into(),
        },
    };
    alg.refresh_identity_flag();
    Ok(alg)
}

/// `oa(x)`: the algebra generated by `x`, without adjoining the identity.
pub fn oa(x: &ComplexMatrix) -> MatrixAlgebra {
    generate_algebra(std::slice::from_ref(x), GenMode::Algebra, false)
        .expect("one generator is always well formed")
}

/// The C*-algebra generated by `A`.
pub fn cstar_envelope(a: &MatrixAlgebra) -> MatrixAlgebra {
    if a.dim() == 0 {
        return MatrixAlgebra::zero(a.ambient_dim);
    }
    generate_algebra(&a.basis, GenMode::Cstar, false).expect("basis is dimensionally consistent")
}

/// Solve `Σ c_k b_k b_j = b_j` and `Σ c_k b_j b_k = b_j` over `A`'s
/// coordinates in the least-squares sense; return the solution if it is an
/// identity for `A` within `eq_tol`.
pub fn identity_of(a: &MatrixAlgebra, tol: &Tolerances) -> Option<ComplexMatrix> {
    let d = a.dim();
    if d == 0 {
        return None;
    }
    // columns of the stacked system, one per unknown
    let cols: Vec<Vec<ComplexMatrix>> = a
        .basis
        .iter()
        .map(|bk| {
            a.basis
                .iter()
                .flat_map(|bj| [bk * bj, bj * bk])
                .collect()
        })
        .collect();
    let rhs: Vec<ComplexMatrix> = a.basis.iter().flat_map(|bj| [bj.clone(), bj.clone()]).collect();
    let gram = ComplexMatrix::from_fn(d, |k, l| {
        cols[l]
            .iter()
            .zip(&cols[k])
            .map(|(x, y)| x.inner(y))
            .sum()
    });
    let h: Vec<C64> = (0..d)
        .map(|k| rhs.iter().zip(&cols[k]).map(|(r, x)| r.inner(x)).sum())
        .collect();
    let coords = linalg::herm_pinv_solve(&gram, &h, 1e-12);
    let e = a.from_coords(&coords);
    let worst = a
        .basis
        .iter()
        .map(|b| (&e * b - b).op_norm().max((b * &e - b).op_norm()))
        .fold(0.0, f64::max);
    (worst <= tol.eq_tol).then_some(e)
}

/// `A + ℂ I`, re-orthonormalized.
pub fn unitize(a: &MatrixAlgebra) -> MatrixAlgebra {
    let n = a.ambient_dim;
    let mut basis = a.basis.clone();
    push_orthonormal(&mut basis, &ComplexMatrix::identity(n));
    MatrixAlgebra {
        ambient_dim: n,
        basis,
        contains_identity: true,
        label: if a.contains_identity {
            a.label.clone()
        } else {
            format!("{}+CI", a.label)
        },
    }
}

/// `A ∩ A*`, the largest self-adjoint subalgebra of `A`.
pub fn self_adjoint_part(a: &MatrixAlgebra) -> MatrixAlgebra {
    let n = a.ambient_dim;
    let d = a.dim();
    if d == 0 {
        return MatrixAlgebra::zero(n);
    }
    let star = a.adjoint_algebra();
    // Gram matrix of the components of the basis orthogonal to A*; its kernel
    // is the set of coordinates whose element also lies in A*.
    let perp: Vec<ComplexMatrix> = a.basis.iter().map(|b| b - &star.project(b)).collect();
    let gram = ComplexMatrix::from_fn(d, |k, l| perp[l].inner(&perp[k]));
    let eig = linalg::herm_eig(&gram);
    let elems: Vec<ComplexMatrix> = (0..d)
        .filter(|&k| eig.values[k] <= 1e-14)
        .map(|k| a.from_coords(&eig.vector(k)))
        .collect();
    let mut out = MatrixAlgebra {
        ambient_dim: n,
        basis: orthonormalize(&elems),
        contains_identity: false,
        label: format!("{}∩{}*", a.label, a.label),
    };
    out.refresh_identity_flag();
    out
}

/// How far the accretive-element search confirmed the computed `q`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AhReport {
    pub algebra: MatrixAlgebra,
    pub q: ComplexMatrix,
    /// Number of nonzero accretive elements found by the sampling search.
    pub samples_found: usize,
    /// Largest `max(‖qa − a‖, ‖aq − a‖) / ‖a‖` over accretive samples.
    pub identity_residual: f64,
    /// Largest `dist(a, A_H) / ‖a‖` over accretive samples.
    pub membership_residual: f64,
    /// True when sampling found nothing and `A` has no nonzero projection.
    pub sampling_failed: bool,
}

/// `q` is the unit of the finite-dimensional C*-algebra `A ∩ A*`; every
/// projection of `A` lives there, so `q` is the largest one, and
/// `A_H = qAq`. Accretive elements found by projected subgradient ascent
/// of `λmin(a + a*)` are used to cross-check that `q` is a unit for them.
pub fn a_h(a: &MatrixAlgebra, directions: usize, seed: u64, tol: &Tolerances) -> AhReport {
    let n = a.ambient_dim;
    let sa = self_adjoint_part(a);
    let q = identity_of(&sa, tol)
        .map(|e| linalg::round_to_projection(&e))
        .unwrap_or_else(|| ComplexMatrix::zeros(n));
    let compressed: Vec<ComplexMatrix> = a.basis.iter().map(|b| &q * b * &q).collect();
    let mut algebra = MatrixAlgebra {
        ambient_dim: n,
        basis: orthonormalize(&compressed),
        contains_identity: false,
        label: format!("{}_H", a.label),
    };
    algebra.refresh_identity_flag();

    let samples = sample_accretive(a, directions, 500, seed, tol);
    let mut identity_residual: f64 = 0.0;
    let mut membership_residual: f64 = 0.0;
    for s in &samples {
        let norm = s.op_norm();
        let r = (&q * s - s).op_norm().max((s * &q - s).op_norm());
        identity_residual = identity_residual.max(r / norm);
        membership_residual = membership_residual.max(algebra.residual(s) / norm);
    }
    let sampling_failed = samples.is_empty() && q.frobenius_norm() == 0.0;
    if sampling_failed {
        log::warn!(
            "a_h: no nonzero accretive element found in '{}' and it contains no projection",
            a.label
        );
    }
    AhReport {
        algebra,
        q,
        samples_found: samples.len(),
        identity_residual,
        membership_residual,
        sampling_failed,
    }
}

/// Maximize `λmin(a + a*)` over the unit ball of `A`'s coordinates by
/// projected subgradient ascent from random directions, keeping the nonzero
/// accretive end points.
pub fn sample_accretive(
    a: &MatrixAlgebra,
    directions: usize,
    steps: usize,
    seed: u64,
    tol: &Tolerances,
) -> Vec<ComplexMatrix> {
    let d = a.dim();
    if d == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for dir in 0..directions {
        let mut rng = gen::rng(seed, dir as u64);
        let mut coords: Vec<C64> = (0..d)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        normalize_ball(&mut coords);
        let mut best = (f64::NEG_INFINITY, coords.clone());
        for step in 0..steps {
            let x = a.from_coords(&coords);
            let eig = linalg::herm_eig(&x);
            let val = eig.min();
            if val > best.0 {
                best = (val, coords.clone());
            }
            let v = eig.vector(0);
            let eta = 0.5 / (1.0 + step as f64).sqrt();
            for (k, b) in a.basis.iter().enumerate() {
                let w = linalg::vdot(&v, &b.matvec(&v));
                coords[k] += w.conj() * eta;
            }
            normalize_ball(&mut coords);
        }
        let x = a.from_coords(&best.1);
        // λmin is over Re x = (x + x*)/2, which has the same sign
        if best.0 >= -tol.psd_slack && x.op_norm() > 1e-6 {
            out.push(x);
        }
    }
    out
}

fn normalize_ball(coords: &mut [C64]) {
    let r = coords.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if r > 1.0 {
        for z in coords.iter_mut() {
            *z /= r;
        }
    }
}

/// `M_k(A) ⊆ M_{kn}`: block matrices with entries in `A`.
pub fn amplify(a: &MatrixAlgebra, k: usize) -> Result<MatrixAlgebra> {
    let n = a.ambient_dim * k;
    if k == 0 {
        return Err(Error::InvalidInput("amplification order must be positive".into()));
    }
    if n > AMPLIFY_CAP {
        return Err(Error::SizeCap {
            size: n,
            cap: AMPLIFY_CAP,
        });
    }
    let basis = (0..k)
        .flat_map(|i| (0..k).map(move |j| ComplexMatrix::unit(k, i, j)))
        .flat_map(|e| a.basis.iter().map(move |b| ComplexMatrix::kron(&e, b)))
        .collect();
    Ok(MatrixAlgebra {
        ambient_dim: n,
        basis,
        contains_identity: a.contains_identity,
        label: format!("M{k}({})", a.label),
    })
}
