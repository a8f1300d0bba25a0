//! Ellipsoids, volume-preserving affine maps and the constructions built from
//! them: the covering ellipsoid of a ball plus a point, normalization of an
//! ellipsoid to a centered ball, and minimum-volume enclosing ellipsoids.

mod affine;
mod ellipsoid;
mod mvee;

pub use affine::{rotation_to, UnimodularAffine, DET_TOLERANCE};
pub use ellipsoid::{
    normalize_to_ball, stretch_cover, unit_ball_volume, Ellipsoid, MEMBERSHIP_SLACK,
};
pub use mvee::{mvee, MveeOptions, DEFAULT_MVEE_MAX_ITER, DEFAULT_MVEE_TOL};

use nalgebra::{DMatrix, DVector};

/// A point (or vector) of R^d.
pub type Point = DVector<f64>;

/// Largest singular value.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Lexicographic comparison of two points of equal dimension.
pub fn lex_cmp(a: &Point, b: &Point) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub(crate) fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().cloned().collect()).collect()
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>], d: usize) -> crate::Result<DMatrix<f64>> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(crate::error::invalid("matrix", format!("must be {d}×{d}")));
    }
    let flat: Vec<f64> = rows.iter().flatten().cloned().collect();
    Ok(DMatrix::from_row_slice(d, d, &flat))
}
