//! Finite-dimensional normed-space primitives.
//!
//! Points live in ℝ^d with a selectable norm. The convex domains here are
//! the sets `K` the iteration runs on; [`ConvexDomain::project`] is the
//! metric projection used as the nonexpansive retraction `P: E → K`. Under
//! the euclidean norm it is nonexpansive for every domain kind and sunny for
//! intervals and boxes; under other norms the same coordinatewise/radial map
//! is used and certification reports how it behaves.

use std::fmt;
use std::ops::Index;

use crate::error::{invalid, Error, Result};

/// A point of the ambient space. Always non-empty with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("vector must have dimension at least 1"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(invalid(format!(
                "coordinate {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Vector(coords))
    }

    /// One-dimensional point.
    pub fn scalar(x: f64) -> Result<Self> {
        Vector::new(vec![x])
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Vector::new(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        lincomb(1.0, self, -1.0, other)
    }

    pub(crate) fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.dim(),
            });
        }
        Ok(())
    }

    /// Builds a vector without the finiteness check. Callers guarantee the
    /// invariant (e.g. clamping an already-valid vector).
    fn from_raw(coords: Vec<f64>) -> Vector {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Vector(coords)
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Coordinates joined by `;`, each in shortest round-trip form.
impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{c:?}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum NormSpec {
    #[default]
    Euclidean,
    PNorm(f64),
    Max,
}

impl NormSpec {
    pub fn validate(self) -> Result<Self> {
        match self {
            NormSpec::PNorm(p) if !(p >= 1.0 && p.is_finite()) => {
                Err(invalid(format!("p-norm exponent must be ≥ 1, got {p}")))
            }
            _ => Ok(self),
        }
    }

    fn of_slice(self, v: &[f64]) -> f64 {
        match self {
            NormSpec::Euclidean => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            NormSpec::PNorm(1.0) => v.iter().map(|c| c.abs()).sum(),
            NormSpec::PNorm(p) => v.iter().map(|c| c.abs().powf(p)).sum::<f64>().powf(1.0 / p),
            NormSpec::Max => v.iter().fold(0.0, |m, c| m.max(c.abs())),
        }
    }

    /// ‖u − w‖.
    pub fn dist(self, u: &Vector, w: &Vector) -> Result<f64> {
        w.check_dim(u.dim())?;
        let diff: Vec<f64> = u.0.iter().zip(&w.0).map(|(a, b)| a - b).collect();
        Ok(self.of_slice(&diff))
    }
}

pub fn norm(v: &Vector, spec: NormSpec) -> Result<f64> {
    let spec = spec.validate()?;
    Ok(spec.of_slice(v.as_slice()))
}

/// `a·u + b·w`, coordinatewise.
pub fn lincomb(a: f64, u: &Vector, b: f64, w: &Vector) -> Result<Vector> {
    w.check_dim(u.dim())?;
    let coords: Vec<f64> = u.0.iter().zip(&w.0).map(|(x, y)| a * x + b * y).collect();
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("linear combination".into()));
    }
    Ok(Vector::from_raw(coords))
}

/// The closed convex set `K`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexDomain {
    Interval { lo: f64, hi: f64 },
    Box { lo: Vector, hi: Vector },
    Ball { center: Vector, radius: f64 },
}

impl ConvexDomain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!(
                "interval needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(ConvexDomain::Interval { lo, hi })
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Result<Self> {
        hi.check_dim(lo.dim())?;
        if let Some(i) = (0..lo.dim()).find(|&i| lo[i] >= hi[i]) {
            return Err(invalid(format!(
                "box needs lo < hi in every coordinate; coordinate {i} has {} ≥ {}",
                lo[i], hi[i]
            )));
        }
        Ok(ConvexDomain::Box { lo, hi })
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(ConvexDomain::Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexDomain::Interval { .. } => 1,
            ConvexDomain::Box { lo, .. } => lo.dim(),
            ConvexDomain::Ball { center, .. } => center.dim(),
        }
    }

    /// Metric projection onto the domain. Points already inside are
    /// returned unchanged, bit for bit.
    pub fn project(&self, v: &Vector) -> Result<Vector> {
        v.check_dim(self.dim())?;
        Ok(match self {
            ConvexDomain::Interval { lo, hi } => Vector::from_raw(vec![v[0].clamp(*lo, *hi)]),
            ConvexDomain::Box { lo, hi } => Vector::from_raw(
                v.0.iter()
                    .zip(lo.0.iter().zip(&hi.0))
                    .map(|(x, (l, h))| x.clamp(*l, *h))
                    .collect(),
            ),
            ConvexDomain::Ball { center, radius } => {
                let r = NormSpec::Euclidean.dist(v, center)?;
                // r == 0 falls in here too: the center is interior.
                if r <= *radius {
                    v.clone()
                } else {
                    Vector::from_raw(
                        v.0.iter()
                            .zip(&center.0)
                            .map(|(x, c)| c + (x - c) * radius / r)
                            .collect(),
                    )
                }
            }
        })
    }

    /// Distance from `v` to the domain, measured as ‖v − project(v)‖.
    pub fn distance(&self, v: &Vector, norm: NormSpec) -> Result<f64> {
        let p = self.project(v)?;
        norm.dist(v, &p)
    }

    /// True iff `v` lies in the domain enlarged by `tol` in the given norm.
    pub fn contains(&self, v: &Vector, tol: f64, norm: NormSpec) -> Result<bool> {
        if tol.is_nan() || tol < 0.0 {
            return Err(invalid(format!(
                "tolerance must be non-negative, got {tol}"
            )));
        }
        v.check_dim(self.dim())?;
        match self {
            ConvexDomain::Interval { lo, hi } if tol == 0.0 => Ok(v[0] >= *lo && v[0] <= *hi),
            ConvexDomain::Box { lo, hi } if tol == 0.0 => {
                Ok((0..v.dim()).all(|i| v[i] >= lo[i] && v[i] <= hi[i]))
            }
            _ => Ok(self.distance(v, norm)? <= tol),
        }
    }

    /// Axis-aligned bounding box as (lo, hi) coordinate vectors.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            ConvexDomain::Interval { lo, hi } => (vec![*lo], vec![*hi]),
            ConvexDomain::Box { lo, hi } => (lo.0.clone(), hi.0.clone()),
            ConvexDomain::Ball { center, radius } => (
                center.0.iter().map(|c| c - radius).collect(),
                center.0.iter().map(|c| c + radius).collect(),
            ),
        }
    }

    /// The bounding box scaled by `factor` about its midpoint. Used to draw
    /// exterior sample points that exercise a retraction.
    pub fn enlarged(&self, factor: f64) -> Result<ConvexDomain> {
        let (lo, hi) = self.bounding_box();
        let (nlo, nhi): (Vec<f64>, Vec<f64>) = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| {
                let mid = 0.5 * (l + h);
                let half = 0.5 * (h - l) * factor;
                (mid - half, mid + half)
            })
            .unzip();
        if nlo.len() == 1 && matches!(self, ConvexDomain::Interval { .. }) {
            ConvexDomain::interval(nlo[0], nhi[0])
        } else {
            ConvexDomain::boxed(Vector::new(nlo)?, Vector::new(nhi)?)
        }
    }

    pub fn center(&self) -> Vector {
        match self {
            ConvexDomain::Ball { center, .. } => center.clone(),
            _ => {
                let (lo, hi) = self.bounding_box();
                Vector::from_raw(lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect())
            }
        }
    }

    /// Diameter of the domain in the given norm.
    pub fn diameter(&self, norm: NormSpec) -> f64 {
        match self {
            ConvexDomain::Ball { radius, .. } => {
                // Two antipodal points along the first axis.
                let mut e = vec![0.0; self.dim()];
                e[0] = 2.0 * radius;
                norm.of_slice(&e)
            }
            _ => {
                let (lo, hi) = self.bounding_box();
                let d: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
                norm.of_slice(&d)
            }
        }
    }

    /// Whether `tx − x` points into the closure of the inward set of the
    /// domain at `x`. Interior points accept every direction.
    pub fn is_inward_at(&self, x: &Vector, tx: &Vector, tol: f64) -> Result<bool> {
        x.check_dim(self.dim())?;
        tx.check_dim(self.dim())?;
        Ok(match self {
            ConvexDomain::Interval { lo, hi } => {
                !((x[0] <= *lo && tx[0] < lo - tol) || (x[0] >= *hi && tx[0] > hi + tol))
            }
            ConvexDomain::Box { lo, hi } => (0..x.dim()).all(|i| {
                !((x[i] <= lo[i] && tx[i] < lo[i] - tol) || (x[i] >= hi[i] && tx[i] > hi[i] + tol))
            }),
            ConvexDomain::Ball { center, radius } => {
                let r = NormSpec::Euclidean.dist(x, center)?;
                if r < *radius {
                    true
                } else {
                    // Tangent cone at a boundary point: ⟨tx − x, x − c⟩ ≤ 0.
                    let dot: f64 = (0..x.dim())
                        .map(|i| (tx[i] - x[i]) * (x[i] - center[i]))
                        .sum();
                    dot <= tol * r
                }
            }
        })
    }
}
