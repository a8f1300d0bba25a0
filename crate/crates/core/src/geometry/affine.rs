use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{spectral_norm, Ellipsoid, Point};
use crate::error::{invalid, Error, Result};

/// Allowed drift of `det(linear)` from one before the linear part is rescaled.
pub const DET_TOLERANCE: f64 = 1e-12;

/// An element of SL_d(R) ⋉ R^d acting by `x ↦ linear·x + translation`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAffine", into = "RawAffine")]
pub struct UnimodularAffine {
    linear: DMatrix<f64>,
    translation: DVector<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawAffine {
    /// Row-major.
    linear: Vec<Vec<f64>>,
    translation: Vec<f64>,
}

impl TryFrom<RawAffine> for UnimodularAffine {
    type Error = Error;

    fn try_from(raw: RawAffine) -> Result<Self> {
        let d = raw.translation.len();
        Self::new(
            super::matrix_from_rows(&raw.linear, d)?,
            DVector::from_vec(raw.translation),
        )
    }
}

impl From<UnimodularAffine> for RawAffine {
    fn from(g: UnimodularAffine) -> Self {
        RawAffine {
            linear: super::matrix_rows(&g.linear),
            translation: g.translation.iter().cloned().collect(),
        }
    }
}

impl UnimodularAffine {
    pub fn identity(d: usize) -> Self {
        Self {
            linear: DMatrix::identity(d, d),
            translation: DVector::zeros(d),
        }
    }

    /// Builds a map from a matrix with positive determinant. The linear part
    /// is rescaled by `det^(-1/d)`, so any positive determinant is accepted.
    pub fn new(linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let d = linear.nrows();
        if d == 0 || linear.ncols() != d {
            return Err(invalid("linear", "must be a non-empty square matrix"));
        }
        if translation.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: translation.len(),
            });
        }
        let mut g = Self {
            linear,
            translation,
        };
        g.renormalize()?;
        Ok(g)
    }

    pub fn from_linear(linear: DMatrix<f64>) -> Result<Self> {
        let d = linear.nrows();
        Self::new(linear, DVector::zeros(d))
    }

    pub fn translation(v: DVector<f64>) -> Self {
        Self {
            linear: DMatrix::identity(v.len(), v.len()),
            translation: v,
        }
    }

    /// The unipotent shear `u(a)`: `x_1 ↦ x_1 + Σ a_i x_i`, other coordinates
    /// fixed. `a` holds `(a_2, …, a_d)`.
    pub fn shear(a: &[f64]) -> Self {
        let d = a.len() + 1;
        let mut linear = DMatrix::identity(d, d);
        for (i, ai) in a.iter().enumerate() {
            linear[(0, i + 1)] = *ai;
        }
        Self {
            linear,
            translation: DVector::zeros(d),
        }
    }

    /// The diagonal flow `g_t = diag(e^{(d-1)t}, e^{-t}, …, e^{-t})`.
    pub fn diagonal_flow(d: usize, t: f64) -> Self {
        let mut diag = DVector::from_element(d, (-t).exp());
        diag[0] = ((d as f64 - 1.0) * t).exp();
        Self {
            linear: DMatrix::from_diagonal(&diag),
            translation: DVector::zeros(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn translation_part(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn apply(&self, p: &Point) -> Point {
        &self.linear * p + &self.translation
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let mut g = Self {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
        };
        // Products of unimodular matrices cannot reach det <= 0 unless the
        // inputs were already corrupt; keep the unchecked form in that case.
        let _ = g.renormalize();
        g
    }

    pub fn inverse(&self) -> Self {
        let inv = self
            .linear
            .clone()
            .try_inverse()
            .expect("unimodular matrices are invertible");
        let translation = -(&inv * &self.translation);
        let mut g = Self {
            linear: inv,
            translation,
        };
        let _ = g.renormalize();
        g
    }

    /// Image of an ellipsoid: `g.(c + A·B) = g(c) + L·A·B`.
    pub fn apply_ellipsoid(&self, e: &Ellipsoid) -> Ellipsoid {
        Ellipsoid::new(self.apply(e.center()), &self.linear * e.shape())
            .expect("image of a nonsingular ellipsoid is nonsingular")
    }

    /// Largest singular value of the linear part.
    pub fn operator_norm(&self) -> f64 {
        spectral_norm(&self.linear)
    }

    /// Operator norm of the inverse, i.e. `1 / σ_min(linear)`.
    pub fn inverse_operator_norm(&self) -> f64 {
        let sv = self.linear.clone().svd(false, false).singular_values;
        1.0 / sv.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn determinant(&self) -> f64 {
        self.linear.determinant()
    }

    fn renormalize(&mut self) -> Result<()> {
        let det = self.linear.determinant();
        if !(det > 0.0) || !det.is_finite() {
            return Err(invalid(
                "linear",
                format!("determinant must be positive and finite, got {det}"),
            ));
        }
        if (det - 1.0).abs() > det_noise_floor(&self.linear) {
            let d = self.linear.nrows() as f64;
            self.linear *= det.powf(-1.0 / d);
        }
        Ok(())
    }
}

/// Drift of the computed determinant that counts as real: `DET_TOLERANCE`,
/// or the rounding error of evaluating it (a multiple of machine epsilon
/// times the Hadamard product of the row norms) when that is larger.
fn det_noise_floor(m: &DMatrix<f64>) -> f64 {
    let hadamard: f64 = m.row_iter().map(|r| r.norm()).product();
    DET_TOLERANCE.max(4.0 * m.nrows() as f64 * f64::EPSILON * hadamard)
}

/// Rotation (det +1) taking `e_1` to the unit vector `u`: the Householder
/// reflection swapping `e_1` and `u`, with the last column negated to fix the
/// sign of the determinant.
pub fn rotation_to(u: &Point) -> DMatrix<f64> {
    let d = u.len();
    let mut e1 = DVector::zeros(d);
    e1[0] = 1.0;
    let v = &e1 - u;
    let vv = v.dot(&v);
    if vv < 1e-30 || d == 1 {
        return DMatrix::identity(d, d);
    }
    let mut h = DMatrix::identity(d, d) - (&v * v.transpose()) * (2.0 / vv);
    let mut last = h.column_mut(d - 1);
    last.neg_mut();
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn max_abs(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (a - b).amax()
    }

    #[test]
    fn shear_and_flow_one_parameter_identities() {
        let u = UnimodularAffine::shear(&[0.3, -1.2]);
        let v = UnimodularAffine::shear(&[1.1, 0.7]);
        let w = UnimodularAffine::shear(&[1.4, -0.5]);
        assert!((u.compose(&v).linear() - w.linear()).amax() < 1e-12);

        let g = UnimodularAffine::diagonal_flow(3, 0.4);
        let h = UnimodularAffine::diagonal_flow(3, -1.1);
        let gh = UnimodularAffine::diagonal_flow(3, -0.7);
        assert!((g.compose(&h).linear() - gh.linear()).amax() < 1e-12);
        assert_relative_eq!(g.determinant(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn shear_fixes_first_axis() {
        let u = UnimodularAffine::shear(&[2.0]);
        let p = DVector::from_vec(vec![3.5, 0.0]);
        assert_eq!(u.apply(&p), p);
    }

    #[test]
    fn new_renormalizes_and_rejects_negative_det() {
        let g = UnimodularAffine::from_linear(DMatrix::from_diagonal_element(2, 2, 3.0)).unwrap();
        assert_relative_eq!(g.determinant(), 1.0, epsilon = 1e-14);
        let flip = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert!(UnimodularAffine::from_linear(flip).is_err());
    }

    #[test]
    fn inverse_round_trips() {
        let lin = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 0.75]);
        let g = UnimodularAffine::new(lin, DVector::from_vec(vec![1.0, -2.0])).unwrap();
        let p = DVector::from_vec(vec![0.3, 4.0]);
        assert!(max_abs(&g.inverse().apply(&g.apply(&p)), &p) < 1e-12);
    }

    #[test]
    fn operator_norms() {
        let g = UnimodularAffine::from_linear(DMatrix::from_diagonal(&DVector::from_vec(vec![
            4.0, 0.25,
        ])))
        .unwrap();
        assert_relative_eq!(g.operator_norm(), 4.0, epsilon = 1e-14);
        assert_relative_eq!(g.inverse_operator_norm(), 4.0, epsilon = 1e-14);
        assert_relative_eq!(UnimodularAffine::identity(3).operator_norm(), 1.0);
    }

    #[test]
    fn rotation_to_is_proper_and_maps_e1() {
        for raw in [vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 0.0], vec![0.3, -0.4, 1.2], vec![1.0, 0.0, 0.0]] {
            let mut u = DVector::from_vec(raw);
            u /= u.norm();
            let r = rotation_to(&u);
            assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-12);
            assert!((r.column(0) - &u).amax() < 1e-12);
            assert!((r.transpose() * &r - DMatrix::identity(3, 3)).amax() < 1e-12);
        }
    }
}
