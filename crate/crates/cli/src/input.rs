//! JSON inputs: matrices, algebras and interpolation problems.

use std::io::Read;
use std::path::Path;

use realpos::algebra::{self, GenMode, MatrixAlgebra};
use realpos::interp::ConvexRegion;
use realpos::{c, ComplexMatrix, C64};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// Dimension cap for every matrix the CLI accepts.
pub const DEFAULT_MAX_DIM: usize = 16;

/// `REALPOS_MAX_DIM`, or the default when unset.
pub fn max_dim() -> CliResult<usize> {
    match std::env::var("REALPOS_MAX_DIM") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("REALPOS_MAX_DIM must be a positive integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}

pub fn check_dim(n: usize) -> CliResult<()> {
    let cap = max_dim()?;
    if n > cap {
        return Err(CliError::Input(format!("dimension {n} exceeds the cap {cap} (REALPOS_MAX_DIM)")));
    }
    Ok(())
}

/// Reads a file, or standard input for `-`.
pub fn read_text(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<&Entry> for C64 {
    fn from(e: &Entry) -> Self {
        match *e {
            Entry::Real(re) => c(re, 0.0),
            Entry::Complex([re, im]) => c(re, im),
        }
    }
}

/// A matrix as `{"n", "entries"}` or as rows whose entries are numbers or
/// `[re, im]` pairs.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Wire(ComplexMatrix),
    Rows(Vec<Vec<Entry>>),
}

impl MatrixInput {
    pub fn into_matrix(self) -> CliResult<ComplexMatrix> {
        let m = match self {
            MatrixInput::Wire(m) => m,
            MatrixInput::Rows(rows) => {
                let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(C64::from).collect()).collect();
                ComplexMatrix::from_rows(&rows)?
            }
        };
        check_dim(m.n())?;
        if !m.is_finite() {
            return Err(CliError::Input("matrix has non-finite entries".into()));
        }
        Ok(m)
    }
}

pub fn read_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    read_json::<MatrixInput>(path)?.into_matrix()
}

/// An algebra: a canned name such as `upper:3`, `diag:4`, `blockupper:1,2`
/// or `span:2:E11,E12`; generators; a spanning set; or a serialized algebra.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum AlgebraInput {
    Canned(String),
    Generated {
        generators: Vec<MatrixInput>,
        #[serde(default)]
        mode: Option<GenMode>,
        #[serde(default, alias = "unital")]
        with_identity: bool,
    },
    Spanned {
        ambient: usize,
        basis: Vec<MatrixInput>,
        #[serde(default)]
        label: Option<String>,
    },
    Explicit(MatrixAlgebra),
}

impl AlgebraInput {
    pub fn into_algebra(self) -> CliResult<MatrixAlgebra> {
        let matrices = |ms: Vec<MatrixInput>| ms.into_iter().map(MatrixInput::into_matrix).collect::<CliResult<Vec<_>>>();
        let a = match self {
            AlgebraInput::Canned(s) => MatrixAlgebra::parse_canned(&s)?,
            AlgebraInput::Generated {
                generators,
                mode,
                with_identity,
            } => algebra::generate_algebra(&matrices(generators)?, mode.unwrap_or(GenMode::Algebra), with_identity)?,
            AlgebraInput::Spanned { ambient, basis, label } => {
                check_dim(ambient)?;
                let basis = matrices(basis)?;
                if let Some(m) = basis.iter().find(|m| m.n() != ambient) {
                    return Err(CliError::Input(format!("basis element is {}x{0}, ambient is {ambient}", m.n())));
                }
                MatrixAlgebra::from_span(ambient, &basis, label.unwrap_or_else(|| "span".into()))?
            }
            AlgebraInput::Explicit(a) => a,
        };
        check_dim(a.ambient_dim)?;
        if a.closure_defect() > 1e-8 || a.orthonormality_defect() > 1e-8 {
            return Err(CliError::Input(format!("'{}' is not an orthonormal basis of an algebra", a.label)));
        }
        Ok(a)
    }
}

/// Reads `SPEC` as a canned algebra name, or as a path to algebra JSON when
/// no canned name matches.
pub fn algebra_arg(spec: &str) -> CliResult<MatrixAlgebra> {
    match MatrixAlgebra::parse_canned(spec) {
        Ok(a) => {
            check_dim(a.ambient_dim)?;
            Ok(a)
        }
        Err(_) if Path::new(spec).exists() || spec == "-" => read_json::<AlgebraInput>(Path::new(spec))?.into_algebra(),
        Err(e) => Err(e.into()),
    }
}

/// Input of the `interp` subcommand.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpProblem {
    pub algebra: AlgebraInput,
    pub q: Option<MatrixInput>,
    pub u: Option<MatrixInput>,
    pub p: Option<MatrixInput>,
    pub b: Option<MatrixInput>,
    pub c: Option<MatrixInput>,
    /// Vertices of the region `E`, as `[re, im]` pairs.
    #[serde(alias = "E", alias = "vertices")]
    pub region: Option<Vec<[f64; 2]>>,
    pub eps: Option<f64>,
    pub near_eps: Option<f64>,
    pub seed: Option<u64>,
}

impl InterpProblem {
    pub fn matrix(field: &Option<MatrixInput>, name: &str, n: usize) -> CliResult<ComplexMatrix> {
        let m = field
            .clone()
            .ok_or_else(|| CliError::Input(format!("problem is missing '{name}'")))?
            .into_matrix()?;
        if m.n() != n {
            return Err(CliError::Input(format!("'{name}' is {}x{0}, the algebra acts on dimension {n}", m.n())));
        }
        Ok(m)
    }

    pub fn region(&self) -> CliResult<ConvexRegion> {
        let v = self
            .region
            .as_ref()
            .ok_or_else(|| CliError::Input("problem is missing the region 'E'".into()))?;
        Ok(ConvexRegion::polygon(v.iter().map(|&[re, im]| c(re, im)).collect())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_with_mixed_entries() {
        let m: MatrixInput = serde_json::from_str("[[1, [0, 1]], [[0, 1], 0]]").unwrap();
        let m = m.into_matrix().unwrap();
        assert_eq!(m[(0, 1)], c(0.0, 1.0));
        assert_eq!(m[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn wire_format() {
        let m: MatrixInput = serde_json::from_str(r#"{"n": 1, "entries": [[2, -1]]}"#).unwrap();
        assert_eq!(m.into_matrix().unwrap()[(0, 0)], c(2.0, -1.0));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let m: MatrixInput = serde_json::from_str("[[1, 2], [3]]").unwrap();
        assert!(m.into_matrix().is_err());
    }

    #[test]
    fn algebra_forms() {
        let a: AlgebraInput = serde_json::from_str(r#""upper:2""#).unwrap();
        assert_eq!(a.into_algebra().unwrap().dim(), 3);
        let a: AlgebraInput = serde_json::from_str(r#"{"generators": [[[0, 1], [0, 0]]], "with_identity": true}"#).unwrap();
        assert_eq!(a.into_algebra().unwrap().dim(), 2);
        let a: AlgebraInput =
            serde_json::from_str(r#"{"generators": [[[0, 1], [0, 0]]], "mode": "cstar"}"#).unwrap();
        assert_eq!(a.into_algebra().unwrap().dim(), 4);
        let a: AlgebraInput = serde_json::from_str(r#"{"ambient": 2, "basis": [[[1, 0], [0, 0]], [[0, 1], [0, 0]]]}"#).unwrap();
        assert_eq!(a.into_algebra().unwrap().dim(), 2);
        let a: AlgebraInput = serde_json::from_str(r#"{"ambient": 2, "basis": [[[0, 1], [0, 0]], [[0, 0], [1, 0]]]}"#).unwrap();
        assert!(a.into_algebra().is_err());
        let upper = MatrixAlgebra::upper_triangular(2);
        let a: AlgebraInput = serde_json::from_str(&serde_json::to_string(&upper).unwrap()).unwrap();
        assert_eq!(a.into_algebra().unwrap().dim(), 3);
    }

    #[test]
    fn problem_region_alias() {
        let p: InterpProblem =
            serde_json::from_str(r#"{"algebra": "diag:2", "E": [[0, 0], [1, 0], [0, 1]]}"#).unwrap();
        assert_eq!(p.region().unwrap().vertices().len(), 3);
    }
}
