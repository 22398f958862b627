use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::{cones, linalg};

/// Edge `{z : Re(e^{−iθ} z) ≤ h}` of a polygon, `θ` the outward normal angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub theta: f64,
    pub h: f64,
}

impl HalfPlane {
    pub fn slack(&self, z: C64) -> f64 {
        self.h - (z * C64::from_polar(1.0, -self.theta)).re
    }
}

/// Compact convex polygon with nonempty interior.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawRegion", into = "RawRegion")]
pub struct ConvexRegion {
    vertices: Vec<C64>,
    half_planes: Vec<HalfPlane>,
}

#[derive(Serialize, Deserialize)]
struct RawRegion {
    vertices: Vec<C64>,
}

impl TryFrom<RawRegion> for ConvexRegion {
    type Error = Error;

    fn try_from(r: RawRegion) -> Result<Self> {
        ConvexRegion::polygon(r.vertices)
    }
}

impl From<ConvexRegion> for RawRegion {
    fn from(r: ConvexRegion) -> Self {
        RawRegion { vertices: r.vertices }
    }
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

impl ConvexRegion {
    /// Vertices in either orientation; stored counterclockwise.
    pub fn polygon(mut vertices: Vec<C64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidInput("a region needs at least three vertices".into()));
        }
        if vertices.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("region vertices must be finite".into()));
        }
        let m = vertices.len();
        let area2: f64 = (0..m).map(|k| cross(vertices[k], vertices[(k + 1) % m])).sum();
        let scale = vertices.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        if area2.abs() <= 1e-12 * scale * scale {
            return Err(Error::InvalidInput("region is degenerate (collinear vertices)".into()));
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        let mut half_planes = Vec::with_capacity(m);
        for k in 0..m {
            let (a, b, next) = (vertices[k], vertices[(k + 1) % m], vertices[(k + 2) % m]);
            let edge = b - a;
            if edge.norm() == 0.0 {
                return Err(Error::InvalidInput("region has repeated vertices".into()));
            }
            if cross(edge, next - b) < -1e-12 * scale * scale {
                return Err(Error::InvalidInput("region is not convex".into()));
            }
            let normal = C64::new(edge.im, -edge.re) / edge.norm();
            let theta = normal.arg();
            half_planes.push(HalfPlane {
                theta,
                h: (a * normal.conj()).re,
            });
        }
        Ok(Self { vertices, half_planes })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Self::polygon(vec![
            C64::new(x0, y0),
            C64::new(x1, y0),
            C64::new(x1, y1),
            C64::new(x0, y1),
        ])
    }

    /// Regular polygon inscribed in the circle of the given center and radius.
    pub fn regular(center: C64, radius: f64, sides: usize, phase: f64) -> Result<Self> {
        let step = 2.0 * std::f64::consts::PI / sides as f64;
        Self::polygon(
            (0..sides)
                .map(|k| center + C64::from_polar(radius, phase + step * k as f64))
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[C64] {
        &self.vertices
    }

    pub fn half_planes(&self) -> &[HalfPlane] {
        &self.half_planes
    }

    pub fn contains(&self, z: C64, slack: f64) -> bool {
        self.half_planes.iter().all(|hp| hp.slack(z) >= -slack)
    }

    /// Smallest `h_k − λmax(Re(e^{−iθ_k} x))`; nonnegative iff `W(x) ⊆ E`.
    pub fn range_margin(&self, x: &ComplexMatrix) -> f64 {
        self.half_planes
            .iter()
            .map(|hp| hp.h - cones::support_function(x, hp.theta))
            .fold(f64::INFINITY, f64::min)
    }

    /// As [`Self::range_margin`] for the compression of `x` to the given
    /// orthonormal vectors; `+∞` when there are none.
    pub fn compressed_margin(&self, x: &ComplexMatrix, basis: &[Vec<C64>]) -> f64 {
        match x.compress(basis) {
            Some(y) => self.range_margin(&y),
            None => f64::INFINITY,
        }
    }

    /// Radius of the largest disk around `z` inside the region.
    pub fn depth(&self, z: C64) -> f64 {
        self.half_planes
            .iter()
            .map(|hp| hp.slack(z))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Range of a projection as orthonormal vectors.
pub(crate) fn range_of(p: &ComplexMatrix) -> Vec<Vec<C64>> {
    linalg::projection_range(&linalg::round_to_projection(p))
}
