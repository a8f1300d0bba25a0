use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{Ellipsoid, Point};

/// Closed axis-parallel box `[min_1, max_1] × ⋯ × [min_d, max_d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignedBox {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl AlignedBox {
    pub fn new(min: Vec<f64>, max: Vec<f64>) -> Result<Self> {
        if min.len() != max.len() {
            return Err(Error::DimensionMismatch {
                expected: min.len(),
                got: max.len(),
            });
        }
        if min.is_empty() {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        if min.iter().zip(&max).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(invalid("box", "requires min < max in every coordinate"));
        }
        Ok(Self { min, max })
    }

    /// Box with the given center and side lengths.
    pub fn centered(center: &[f64], sides: &[f64]) -> Result<Self> {
        let min = center.iter().zip(sides).map(|(c, s)| c - s / 2.0).collect();
        let max = center.iter().zip(sides).map(|(c, s)| c + s / 2.0).collect();
        Self::new(min, max)
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn min(&self) -> &[f64] {
        &self.min
    }

    pub fn max(&self) -> &[f64] {
        &self.max
    }

    pub fn volume(&self) -> f64 {
        self.min.iter().zip(&self.max).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.iter()
            .zip(self.min.iter().zip(&self.max))
            .all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    /// Ellipsoid `center + diag(√d·half-sides)·B̄_1`, which contains the box.
    pub fn circumscribed_ellipsoid(&self) -> Ellipsoid {
        let d = self.dim();
        let scale = (d as f64).sqrt();
        let center = DVector::from_iterator(
            d,
            self.min.iter().zip(&self.max).map(|(a, b)| 0.5 * (a + b)),
        );
        let half = DVector::from_iterator(
            d,
            self.min.iter().zip(&self.max).map(|(a, b)| 0.5 * (b - a) * scale),
        );
        Ellipsoid::new(center, nalgebra::DMatrix::from_diagonal(&half))
            .expect("sides are positive")
    }

    /// Distance from the origin to the farthest corner.
    pub fn reach(&self) -> f64 {
        self.min
            .iter()
            .zip(&self.max)
            .map(|(a, b)| a.abs().max(b.abs()).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// A bounded closed convex query region.
#[derive(Clone, Copy, Debug)]
pub enum Region<'a> {
    Ellipsoid(&'a Ellipsoid),
    Box(&'a AlignedBox),
}

impl<'a> From<&'a Ellipsoid> for Region<'a> {
    fn from(e: &'a Ellipsoid) -> Self {
        Region::Ellipsoid(e)
    }
}

impl<'a> From<&'a AlignedBox> for Region<'a> {
    fn from(b: &'a AlignedBox) -> Self {
        Region::Box(b)
    }
}

impl Region<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Region::Ellipsoid(e) => e.dim(),
            Region::Box(b) => b.dim(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Region::Ellipsoid(e) => e.contains(p),
            Region::Box(b) => b.contains(p),
        }
    }

    pub fn reach(&self) -> f64 {
        match self {
            Region::Ellipsoid(e) => e.reach(),
            Region::Box(b) => b.reach(),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Region::Ellipsoid(e) => e.volume(),
            Region::Box(b) => b.volume(),
        }
    }

    /// An ellipsoid containing the region.
    pub fn enclosing_ellipsoid(&self) -> Ellipsoid {
        match self {
            Region::Ellipsoid(e) => (*e).clone(),
            Region::Box(b) => b.circumscribed_ellipsoid(),
        }
    }
}
