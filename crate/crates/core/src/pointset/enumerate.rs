//! Enumeration of integer cells whose (possibly displaced) point can lie in
//! an ellipsoid.
//!
//! The ellipsoid is given in cell coordinates as `{y : ‖M(y − c)‖ ≤ 1}`. A
//! cell `z ∈ Z^d` carries one point `z + δ` with `δ ∈ [a, b]^d` unknown to the
//! enumerator. With `M = QR` the gauge splits into a sum of squares of
//! triangular terms, which are walked from the last coordinate to the first
//! (Fincke–Pohst). The displacement is handled by interval arithmetic, so the
//! visited set is a superset of the cells whose point lies inside; callers
//! check membership exactly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Extra room on the gauge budget so that boundary points are never lost to
/// rounding. Candidates are re-checked exactly by the caller.
const BUDGET_SLACK: f64 = 1e-9;

/// Upper limit on the number of candidate cells visited in one query.
pub const DEFAULT_CELL_BUDGET: u64 = 200_000_000;

pub(crate) struct CellWalk<'a> {
    r: DMatrix<f64>,
    center: &'a DVector<f64>,
    lo: f64,
    hi: f64,
    budget: u64,
    visited: u64,
    z: Vec<i64>,
}

impl<'a> CellWalk<'a> {
    /// `displacement = (a, b)` bounds each coordinate of `δ`.
    pub(crate) fn new(
        m: &DMatrix<f64>,
        center: &'a DVector<f64>,
        displacement: (f64, f64),
        budget: u64,
    ) -> Result<Self> {
        let d = m.nrows();
        let mut r = m.clone().qr().r();
        for i in 0..d {
            if r[(i, i)] < 0.0 {
                for j in i..d {
                    r[(i, j)] = -r[(i, j)];
                }
            }
            if !(r[(i, i)] > 0.0) || !r[(i, i)].is_finite() {
                return Err(Error::Singular("cell-coordinate ellipsoid"));
            }
        }
        Ok(Self {
            r,
            center,
            lo: displacement.0,
            hi: displacement.1,
            budget,
            visited: 0,
            z: vec![0; d],
        })
    }

    pub(crate) fn run(mut self, visit: &mut dyn FnMut(&[i64])) -> Result<()> {
        let d = self.z.len();
        self.level(d - 1, 0.0, visit)
    }

    fn level(&mut self, i: usize, used: f64, visit: &mut dyn FnMut(&[i64])) -> Result<()> {
        let d = self.z.len();
        let rem = 1.0 + BUDGET_SLACK - used;
        if rem < 0.0 {
            return Ok(());
        }
        let rad = rem.sqrt();
        let (mut s_lo, mut s_hi) = (0.0, 0.0);
        for j in i + 1..d {
            let y_lo = self.z[j] as f64 + self.lo - self.center[j];
            let y_hi = self.z[j] as f64 + self.hi - self.center[j];
            let rij = self.r[(i, j)];
            if rij >= 0.0 {
                s_lo += rij * y_lo;
                s_hi += rij * y_hi;
            } else {
                s_lo += rij * y_hi;
                s_hi += rij * y_lo;
            }
        }
        let rii = self.r[(i, i)];
        let y_min = (-rad - s_hi) / rii;
        let y_max = (rad - s_lo) / rii;
        let z_min = (y_min + self.center[i] - self.hi).ceil();
        let z_max = (y_max + self.center[i] - self.lo).floor();
        if !(z_min <= z_max) {
            return Ok(());
        }
        let span = z_max - z_min + 1.0;
        if !span.is_finite() || span > (self.budget - self.visited.min(self.budget)) as f64 {
            return Err(Error::EnumerationBudget { limit: self.budget });
        }
        for zi in (z_min as i64)..=(z_max as i64) {
            self.visited += 1;
            if self.visited > self.budget {
                return Err(Error::EnumerationBudget { limit: self.budget });
            }
            self.z[i] = zi;
            let y_lo = zi as f64 + self.lo - self.center[i];
            let y_hi = zi as f64 + self.hi - self.center[i];
            let t_lo = rii * y_lo + s_lo;
            let t_hi = rii * y_hi + s_hi;
            let min_sq = if t_lo <= 0.0 && t_hi >= 0.0 {
                0.0
            } else {
                (t_lo * t_lo).min(t_hi * t_hi)
            };
            if i == 0 {
                if used + min_sq <= 1.0 + BUDGET_SLACK {
                    visit(&self.z);
                }
            } else {
                self.level(i - 1, used + min_sq, visit)?;
            }
        }
        Ok(())
    }
}
