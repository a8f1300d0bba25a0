use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{Point, UnimodularAffine};
use crate::error::{invalid, Error, Result};

/// Relative slack of the closed membership test `‖A⁻¹(x − c)‖ ≤ 1`.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

/// Volume of the unit ball, `β_d = π^{d/2} / Γ(d/2 + 1)`, via the two-step
/// recurrence `β_d = β_{d-2}·2π/d`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::Dimension { min: 1, got: 0 });
    }
    let (mut beta, start) = if d % 2 == 0 { (1.0, 2) } else { (2.0, 3) };
    let mut k = start;
    while k <= d {
        beta *= 2.0 * PI / k as f64;
        k += 2;
    }
    Ok(beta)
}

/// A closed ellipsoid `center + shape·B̄_1` with nonsingular `shape`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawEllipsoid", into = "RawEllipsoid")]
pub struct Ellipsoid {
    center: Point,
    shape: DMatrix<f64>,
    inverse: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawEllipsoid {
    center: Vec<f64>,
    /// Row-major.
    shape: Vec<Vec<f64>>,
}

impl TryFrom<RawEllipsoid> for Ellipsoid {
    type Error = Error;

    fn try_from(raw: RawEllipsoid) -> Result<Self> {
        let d = raw.center.len();
        let shape = super::matrix_from_rows(&raw.shape, d)?;
        Ellipsoid::new(DVector::from_vec(raw.center), shape)
    }
}

impl From<Ellipsoid> for RawEllipsoid {
    fn from(e: Ellipsoid) -> Self {
        RawEllipsoid {
            center: e.center.iter().cloned().collect(),
            shape: super::matrix_rows(&e.shape),
        }
    }
}

impl Ellipsoid {
    pub fn new(center: Point, shape: DMatrix<f64>) -> Result<Self> {
        let d = center.len();
        if d == 0 {
            return Err(Error::Dimension { min: 1, got: 0 });
        }
        if shape.nrows() != d || shape.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: shape.nrows(),
            });
        }
        let det = shape.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Singular("ellipsoid shape"));
        }
        let inverse = shape
            .clone()
            .try_inverse()
            .ok_or(Error::Singular("ellipsoid shape"))?;
        Ok(Self {
            center,
            shape,
            inverse,
        })
    }

    /// Trusts the caller's `inverse`.
    fn with_inverse(center: Point, shape: DMatrix<f64>, inverse: DMatrix<f64>) -> Result<Self> {
        let mut e = Self::new(center, shape)?;
        e.inverse = inverse;
        Ok(e)
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", format!("must be positive, got {radius}")));
        }
        let d = center.len();
        Self::new(center, DMatrix::from_diagonal_element(d, d, radius))
    }

    pub fn centered_ball(d: usize, radius: f64) -> Result<Self> {
        Self::ball(DVector::zeros(d), radius)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn shape(&self) -> &DMatrix<f64> {
        &self.shape
    }

    pub fn inverse_shape(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()).expect("dim >= 1") * self.shape.determinant().abs()
    }

    /// `‖A⁻¹(x − c)‖`; the ellipsoid is the sublevel set `≤ 1`.
    pub fn gauge(&self, p: &Point) -> f64 {
        (&self.inverse * (p - &self.center)).norm()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.gauge(p) <= 1.0 + MEMBERSHIP_SLACK
    }

    /// Semi-axis lengths (singular values of the shape), descending.
    pub fn semi_axes(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self
            .shape
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.semi_axes()[0]
    }

    /// Half-width of the axis-aligned bounding box along each coordinate.
    pub fn bounding_half_widths(&self) -> Vec<f64> {
        self.shape.row_iter().map(|r| r.norm()).collect()
    }

    /// Largest distance from the origin to a point of the ellipsoid, bounded
    /// above by `‖c‖ + σ_max`.
    pub fn reach(&self) -> f64 {
        self.center.norm() + self.semi_axes()[0]
    }

    /// The same ellipsoid scaled about its center by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.center.clone(), &self.shape * factor).expect("nonzero factor")
    }

    /// The image under `x ↦ factor·x` (scaling about the origin).
    pub fn dilated(&self, factor: f64) -> Self {
        Self::new(&self.center * factor, &self.shape * factor).expect("nonzero factor")
    }

    /// Point of the boundary `c + A·u` for a unit vector `u`.
    pub fn boundary_point(&self, u: &Point) -> Point {
        &self.center + &self.shape * u
    }
}

/// The centered ellipsoid `E(r, x)` covering `B_r ∪ {x}`: semi-axis `‖x‖`
/// along `x` and `r` on the orthogonal complement, so that its volume is
/// `β_d r^{d-1} ‖x‖`.
pub fn stretch_cover(r: f64, x: &Point) -> Result<Ellipsoid> {
    let t = x.norm();
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("r", format!("must be positive, got {r}")));
    }
    if !(t > r) {
        return Err(Error::PointInsideBall { norm: t, radius: r });
    }
    let d = x.len();
    let u = x / t;
    let uut = &u * u.transpose();
    let shape = DMatrix::from_diagonal_element(d, d, r) + &uut * (t - r);
    // Closed-form inverse; a generic inverse loses digits when `t ≫ r` and
    // puts `x` measurably outside its own cover.
    let inverse = DMatrix::from_diagonal_element(d, d, 1.0 / r) + uut * (1.0 / t - 1.0 / r);
    Ellipsoid::with_inverse(DVector::zeros(d), shape, inverse)
}

/// A volume-preserving affine `g` with `g.E` the centered ball of radius
/// `(vol(E)/β_d)^{1/d}`. With the polar factorization `A = P·W`, the linear
/// part is `ρ·P⁻¹`, computed from the SVD `A = UΣVᵀ` as `ρ·UΣ⁻¹Uᵀ`.
pub fn normalize_to_ball(e: &Ellipsoid) -> Result<(UnimodularAffine, f64)> {
    let d = e.dim();
    let svd = e.shape().clone().svd(true, false);
    let u = svd.u.ok_or(Error::Singular("ellipsoid shape"))?;
    let sv = &svd.singular_values;
    if sv.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Singular("ellipsoid shape"));
    }
    let log_rho = sv.iter().map(|s| s.ln()).sum::<f64>() / d as f64;
    let rho = log_rho.exp();
    let inv_sigma = DMatrix::from_diagonal(&sv.map(|s| rho / s));
    let linear = &u * inv_sigma * u.transpose();
    let translation = -(&linear * e.center());
    let g = UnimodularAffine::new(linear, translation)?;
    Ok((g, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_ball_volumes() {
        assert_eq!(unit_ball_volume(1).unwrap(), 2.0);
        assert_relative_eq!(unit_ball_volume(2).unwrap(), PI, epsilon = 1e-15);
        assert_relative_eq!(unit_ball_volume(3).unwrap(), 4.0 * PI / 3.0, epsilon = 1e-15);
        assert_relative_eq!(unit_ball_volume(4).unwrap(), PI * PI / 2.0, epsilon = 1e-14);
        assert!(unit_ball_volume(0).is_err());
    }

    #[test]
    fn volumes() {
        let diag = |v: Vec<f64>| DMatrix::from_diagonal(&DVector::from_vec(v));
        let unit = Ellipsoid::centered_ball(2, 1.0).unwrap();
        assert_relative_eq!(unit.volume(), PI, epsilon = 1e-15);
        let squashed = Ellipsoid::new(DVector::zeros(2), diag(vec![2.0, 0.5])).unwrap();
        assert_relative_eq!(squashed.volume(), PI, epsilon = 1e-15);
        let long = Ellipsoid::new(DVector::zeros(3), diag(vec![3.0, 1.0, 1.0])).unwrap();
        assert_relative_eq!(long.volume(), 4.0 * PI, epsilon = 1e-14);
    }

    #[test]
    fn singular_shape_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(
            Ellipsoid::new(DVector::zeros(2), m),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn stretch_cover_planar_example() {
        let e = stretch_cover(0.25, &DVector::from_vec(vec![0.5, 0.0])).unwrap();
        assert!((e.shape() - DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 0.25])).amax() < 1e-15);
        assert_relative_eq!(e.volume(), PI / 8.0, epsilon = 1e-15);
    }

    #[test]
    fn stretch_cover_contains_ball_and_point() {
        let r = 0.3;
        let x = DVector::from_vec(vec![1.7, 0.0]);
        let e = stretch_cover(r, &x).unwrap();
        assert!(e.contains(&x));
        assert!(e.contains(&DVector::from_vec(vec![0.0, r])));
        assert!(!e.contains(&DVector::from_vec(vec![0.0, r * 1.001])));
    }

    #[test]
    fn stretch_cover_matches_rank_one_form() {
        let x = DVector::from_vec(vec![0.2, -0.9, 0.4]);
        let r = 0.1;
        let e = stretch_cover(r, &x).unwrap();
        let u = &x / x.norm();
        let expected = DMatrix::identity(3, 3) * r + (&u * u.transpose()) * (x.norm() - r);
        assert!((e.shape() - expected).amax() < 1e-14);
        let beta = unit_ball_volume(3).unwrap();
        assert_relative_eq!(e.volume(), beta * r * r * x.norm(), max_relative = 1e-12);
    }

    #[test]
    fn stretch_cover_rejects_point_in_ball() {
        let err = stretch_cover(1.0, &DVector::from_vec(vec![0.5, 0.5])).unwrap_err();
        assert!(matches!(err, Error::PointInsideBall { .. }));
    }

    #[test]
    fn normalize_centered_ball() {
        let e = Ellipsoid::ball(DVector::from_vec(vec![1.0, -3.0]), 2.0).unwrap();
        let (g, rho) = normalize_to_ball(&e).unwrap();
        assert_relative_eq!(rho, 2.0, epsilon = 1e-14);
        assert!((g.linear() - DMatrix::identity(2, 2)).amax() < 1e-14);
        assert!((g.translation_part() - DVector::from_vec(vec![-1.0, 3.0])).amax() < 1e-14);
    }

    #[test]
    fn normalize_stretch_cover_gives_next_radius() {
        for d in 2..=5 {
            let prev: f64 = 1.0 / 4096.0;
            let mut u = DVector::from_element(d, 1.0);
            u /= u.norm();
            let (g, rho) = normalize_to_ball(&stretch_cover(prev, &u).unwrap()).unwrap();
            let expected = prev.powf(1.0 - 1.0 / d as f64);
            assert_relative_eq!(rho, expected, max_relative = 1e-12);
            assert_relative_eq!(g.inverse_operator_norm(), 1.0 / expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn serde_round_trip() {
        let e = stretch_cover(0.2, &DVector::from_vec(vec![0.3, 0.4])).unwrap();
        let json = serde_json::to_string(&e).unwrap();
        let back: Ellipsoid = serde_json::from_str(&json).unwrap();
        assert_eq!(back.shape(), e.shape());
    }
}
