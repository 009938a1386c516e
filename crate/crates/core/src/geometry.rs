//! Points, hyperplanes, polytopes and the margin semantics built on them.
//!
//! A polytope here is an ordered intersection of halfspaces `w·x + b >= 0`
//! with unit normals; membership and all margin queries reduce to the
//! minimum hyperplane value. The empty list is legal and denotes all of
//! space (min over the empty set is plus infinity).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Norm tolerance for constructed unit normals and unit-ball membership.
pub const NORM_TOL: f64 = 1e-9;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| x * c).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A point of the instance space (the unit ball) with a binary label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPoint {
    coords: Vec<f64>,
    label: i8,
}

impl LabeledPoint {
    pub fn new(coords: Vec<f64>, label: i8) -> Result<Self> {
        if label != 1 && label != -1 {
            return Err(Error::BadLabel(label));
        }
        let n = norm(&coords);
        if n > 1.0 + NORM_TOL {
            return Err(Error::OutsideUnitBall { norm: n });
        }
        Ok(Self { coords, label })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn label(&self) -> i8 {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// An affine hyperplane `w·x + b = 0` with unit normal.
///
/// Construction renormalizes, so `(c*w, c*b)` for any `c > 0` denotes the
/// same classifier with identical values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    #[serde(rename = "w")]
    normal: Vec<f64>,
    #[serde(rename = "b")]
    offset: f64,
}

impl Hyperplane {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if n < 1e-12 || !n.is_finite() {
            return Err(Error::ZeroNormal);
        }
        Ok(Self {
            normal: scale(&normal, 1.0 / n),
            offset: offset / n,
        })
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Signed value `w·x + b`; positive side at distance `>= gamma` is the
    /// gamma-positive side.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.value_unchecked(x))
    }

    pub(crate) fn value_unchecked(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) + self.offset
    }

    /// Same hyperplane moved outward by `s` (inward for negative `s`).
    pub fn shifted(&self, s: f64) -> Hyperplane {
        Hyperplane {
            normal: self.normal.clone(),
            offset: self.offset + s,
        }
    }
}

/// Region of a point relative to a polytope's gamma-margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginRegion {
    Inside,
    InnerMargin,
    OuterMargin,
    Outside,
}

/// Region of a point relative to a polytope's gamma-envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvelopeRegion {
    Inside,
    InnerEnvelope,
    OuterEnvelope,
    Outside,
}

/// Intersection of halfspaces; `t = 0` denotes all of space.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    halfspaces: Vec<Hyperplane>,
}

impl Polytope {
    pub fn new(dim: usize, halfspaces: Vec<Hyperplane>) -> Result<Self> {
        for h in &halfspaces {
            if h.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: h.dim(),
                });
            }
        }
        Ok(Self { dim, halfspaces })
    }

    /// The `t = 0` polytope: every point of the space is inside.
    pub fn all_space(dim: usize) -> Self {
        Self {
            dim,
            halfspaces: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[Hyperplane] {
        &self.halfspaces
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    /// Minimum hyperplane value at `x`; `x` is a member iff the result is
    /// nonnegative. Plus infinity for the empty intersection.
    pub fn min_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.min_value_unchecked(x))
    }

    pub(crate) fn min_value_unchecked(&self, x: &[f64]) -> f64 {
        self.halfspaces
            .iter()
            .map(|h| h.value_unchecked(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(self.min_value(x)? >= 0.0)
    }

    /// Classifies `x` into the four margin regions. Boundary values
    /// `min = ±gamma` count as margin.
    pub fn margin_region(&self, gamma: f64, x: &[f64]) -> Result<MarginRegion> {
        if gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        let m = self.min_value(x)?;
        Ok(if m > gamma {
            MarginRegion::Inside
        } else if m >= 0.0 {
            MarginRegion::InnerMargin
        } else if m >= -gamma {
            MarginRegion::OuterMargin
        } else {
            MarginRegion::Outside
        })
    }

    /// The gamma-fat concept: pairs landing strictly inside the margin band
    /// are labeled -1 irrespective of `y`; values at exactly `±gamma`
    /// classify by sign.
    pub fn fat_classify(&self, gamma: f64, x: &[f64], y: i8) -> Result<i8> {
        if gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if y != 1 && y != -1 {
            return Err(Error::BadLabel(y));
        }
        let m = self.min_value(x)?;
        if m.abs() < gamma {
            return Ok(-1);
        }
        let agrees = (m >= gamma && y == 1) || (m <= -gamma && y == -1);
        Ok(if agrees { 1 } else { -1 })
    }

    /// True iff every positive point has min-value `>= gamma` and every
    /// negative point `<= -gamma`. Vacuously true on the empty sample.
    pub fn is_consistent(&self, gamma: f64, sample: &[LabeledPoint]) -> Result<bool> {
        if gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "gamma must be nonnegative, got {gamma}"
            )));
        }
        for p in sample {
            let m = self.min_value(p.coords())?;
            let ok = if p.label() == 1 {
                m >= gamma
            } else {
                m <= -gamma
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `P^[+s]`: every bounding halfspace moved outward by `s` (inward for
    /// negative `s`). `min_value` shifts by exactly `s`.
    pub fn shift(&self, s: f64) -> Polytope {
        Polytope {
            dim: self.dim,
            halfspaces: self.halfspaces.iter().map(|h| h.shifted(s)).collect(),
        }
    }
}

/// Axis-aligned square `[-r, r]^2` as four halfspaces; shared by tests and
/// the geometry verification suites.
pub fn square(r: f64) -> Polytope {
    Polytope::new(
        2,
        vec![
            Hyperplane::new(vec![-1.0, 0.0], r).unwrap(),
            Hyperplane::new(vec![1.0, 0.0], r).unwrap(),
            Hyperplane::new(vec![0.0, -1.0], r).unwrap(),
            Hyperplane::new(vec![0.0, 1.0], r).unwrap(),
        ],
    )
    .unwrap()
}
