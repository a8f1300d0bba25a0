use nalgebra::DVector;

use super::{AlignedBox, Region};
use crate::error::{invalid, Result};
use crate::geometry::{lex_cmp, Ellipsoid, Point};

/// A point set that can be queried region by region.
pub trait PointSource: Sync {
    fn dim(&self) -> usize;

    /// Calls `visit` once for every point of the set in the closed region.
    fn for_each_in(&self, region: Region<'_>, visit: &mut dyn FnMut(Point)) -> Result<()>;

    /// Membership predicate of the set itself.
    fn contains_point(&self, p: &Point) -> bool;

    /// All points in the region, sorted lexicographically.
    fn points_in<'a>(&self, region: impl Into<Region<'a>>) -> Result<Vec<Point>>
    where
        Self: Sized,
    {
        let mut out = Vec::new();
        self.for_each_in(region.into(), &mut |p| out.push(p))?;
        out.sort_by(lex_cmp);
        Ok(out)
    }

    fn count_in<'a>(&self, region: impl Into<Region<'a>>) -> Result<usize>
    where
        Self: Sized,
    {
        let mut n = 0usize;
        self.for_each_in(region.into(), &mut |_| n += 1)?;
        Ok(n)
    }

    /// A point of the set inside `e` (the lexicographically smallest), or
    /// `None` when the set misses `e`.
    fn query(&self, e: &Ellipsoid) -> Result<Option<Point>>
    where
        Self: Sized,
    {
        Ok(self.points_in(e)?.into_iter().next())
    }
}

/// The dilation `λ·S` of a point set.
#[derive(Clone, Debug)]
pub struct Scaled<'s, S> {
    inner: &'s S,
    factor: f64,
}

impl<'s, S: PointSource> Scaled<'s, S> {
    pub fn new(inner: &'s S, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(invalid("factor", format!("must be positive, got {factor}")));
        }
        Ok(Self { inner, factor })
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

impl<S: PointSource> PointSource for Scaled<'_, S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn for_each_in(&self, region: Region<'_>, visit: &mut dyn FnMut(Point)) -> Result<()> {
        let inv = 1.0 / self.factor;
        let lambda = self.factor;
        let mut forward = |p: Point| {
            let q = p * lambda;
            if region.contains(&q) {
                visit(q);
            }
        };
        match region {
            Region::Ellipsoid(e) => {
                let pulled = Ellipsoid::new(e.center() * inv, e.shape() * inv)?;
                self.inner.for_each_in(Region::Ellipsoid(&pulled), &mut forward)
            }
            Region::Box(b) => {
                let pulled = AlignedBox::new(
                    b.min().iter().map(|x| x * inv).collect(),
                    b.max().iter().map(|x| x * inv).collect(),
                )?;
                self.inner.for_each_in(Region::Box(&pulled), &mut forward)
            }
        }
    }

    fn contains_point(&self, p: &Point) -> bool {
        let q: DVector<f64> = p / self.factor;
        self.inner.contains_point(&q)
    }
}
