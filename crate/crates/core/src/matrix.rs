//! Dense square complex matrices.
//!
//! [`ComplexMatrix`] is the operand of every other module. Entries are stored
//! row-major and are guaranteed finite.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Build from row-major entries. Fails on a length that is not `n²` or on
    /// non-finite values.
    pub fn new(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                row: k / n,
                col: k % n,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: r.len(),
                });
            }
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| c(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "dimension must be positive");
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, ONE)
    }

    pub fn scalar(n: usize, z: C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, z) in d.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn diag_real(d: &[f64]) -> Self {
        Self::diag(&d.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    /// Matrix unit `E_ij` (zero-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = ONE;
        m
    }

    /// Rank-one `u v*`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len());
        Self::from_fn(u.len(), |i, j| u[i] * v[j].conj())
    }

    /// Build from column vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let n = cols.len();
        Self::from_fn(n, |i, j| cols[j][i])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// `Re x = (x + x*) / 2`.
    pub fn real_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `Im x = (x − x*) / 2i`, so that `x = Re x + i Im x`.
    pub fn imag_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| {
            (self[(i, j)] - self[(j, i)].conj()) * c(0.0, -0.5)
        })
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn scale_re(&self, t: f64) -> Self {
        self.scale(c(t, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Trace inner product `⟨self, other⟩ = tr(other* self)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.check_same(other);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator (spectral) norm, the largest singular value.
    pub fn op_norm(&self) -> f64 {
        linalg::op_norm(self)
    }

    /// `‖self − other‖` in operator norm.
    pub fn dist(&self, other: &Self) -> f64 {
        (self - other).op_norm()
    }

    /// `‖self − self*‖`.
    pub fn hermitian_defect(&self) -> f64 {
        self.dist(&self.adjoint())
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::identity(self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = &out * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Block matrix `[[a, b], [c, d]]` with equal square blocks.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        let n = a.n;
        for m in [b, c, d] {
            m.check_dim(n);
        }
        Self::from_fn(2 * n, |i, j| {
            let blk = match (i < n, j < n) {
                (true, true) => a,
                (true, false) => b,
                (false, true) => c,
                (false, false) => d,
            };
            blk[(i % n, j % n)]
        })
    }

    pub fn direct_sum(a: &Self, b: &Self) -> Self {
        let (n, m) = (a.n, b.n);
        Self::from_fn(n + m, |i, j| match (i < n, j < n) {
            (true, true) => a[(i, j)],
            (false, false) => b[(i - n, j - n)],
            _ => ZERO,
        })
    }

    /// Kronecker product `a ⊗ b`.
    pub fn kron(a: &Self, b: &Self) -> Self {
        let (n, m) = (a.n, b.n);
        Self::from_fn(n * m, |i, j| a[(i / m, j / m)] * b[(i % m, j % m)])
    }

    /// Compression `U* self U` onto the span of orthonormal columns `u`.
    pub fn compress(&self, u: &[Vec<C64>]) -> Option<Self> {
        if u.is_empty() {
            return None;
        }
        let k = u.len();
        let mu: Vec<Vec<C64>> = u.iter().map(|v| self.matvec(v)).collect();
        Some(Self::from_fn(k, |i, j| {
            u[i].iter().zip(&mu[j]).map(|(a, b)| a.conj() * b).sum()
        }))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn check_dim(&self, n: usize) {
        assert_eq!(self.n, n, "dimension mismatch");
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.n, other.n, "dimension mismatch");
    }

    pub fn same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  [")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, " {:+.6}{:+.6}i", z.re, z.im)?;
            }
            writeln!(f, " ]")?;
        }
        Ok(())
    }
}

macro_rules! elementwise {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                self.check_same(rhs);
                ComplexMatrix {
                    n: self.n,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                (&self).$method(rhs)
            }
        }
        impl $tr<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                self.$method(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.check_same(rhs);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        self.check_same(rhs);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_re(-1.0)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        (&self).neg()
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same(rhs);
        let n = self.n;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let rk = &rhs.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(rk) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix { n, data: out }
    }
}

impl Mul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        &self * rhs
    }
}

impl Mul<ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        self * &rhs
    }
}

/// Wire format: `{"n": int, "entries": [[re, im], ...]}`, row-major.
#[derive(Serialize, Deserialize)]
struct MatrixWire {
    n: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            n: self.n,
            entries: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = MatrixWire::deserialize(d)?;
        let data = w.entries.iter().map(|[re, im]| c(*re, *im)).collect();
        ComplexMatrix::new(w.n, data).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(matches!(
            ComplexMatrix::new(2, vec![ONE; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite { row: 0, col: 0 })
        ));
        assert!(matches!(
            ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ONE]]),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn real_and_imaginary_parts_recombine() {
        let x = ComplexMatrix::from_rows(&[vec![ONE, I], vec![I, ZERO]]).unwrap();
        let back = x.real_part() + x.imag_part().scale(I);
        assert!(back.dist(&x) < 1e-15);
        assert_eq!(x.real_part(), ComplexMatrix::diag_real(&[1.0, 0.0]));
    }

    #[test]
    fn kron_and_blocks() {
        let e12 = ComplexMatrix::unit(2, 0, 1);
        let k = ComplexMatrix::kron(&ComplexMatrix::identity(2), &e12);
        assert_eq!(k[(0, 1)], ONE);
        assert_eq!(k[(2, 3)], ONE);
        assert_eq!(k.frobenius_norm(), 2f64.sqrt());
        let b = ComplexMatrix::block2(&e12, &e12, &e12, &e12);
        assert_eq!(b.n(), 4);
        assert_eq!(b[(2, 3)], ONE);
    }

    #[test]
    fn json_wire_format() {
        let m = ComplexMatrix::from_rows(&[vec![ONE, I], vec![c(0.5, -2.0), ZERO]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"n":2,"entries":[[1.0,0.0],[0.0,1.0],[0.5,-2.0],[0.0,0.0]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<ComplexMatrix>(r#"{"n":2,"entries":[[1,0]]}"#).is_err());
    }

    #[test]
    fn integer_powers() {
        let x = ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ZERO, ONE]]).unwrap();
        assert_eq!(x.powi(5)[(0, 1)], c(5.0, 0.0));
        assert_eq!(x.powi(0), ComplexMatrix::identity(2));
    }
}
