use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::geometry::UnimodularAffine;

/// Elements of `SL_d(R) ⋉ R^d`. The shear `u(a)`, the diagonal flow `g_t` and
/// translations are [`UnimodularAffine::shear`],
/// [`UnimodularAffine::diagonal_flow`] and [`UnimodularAffine::translation`].
pub type GroupElement = UnimodularAffine;

/// Orthogonal projection onto `span(e_2, …, e_k)`.
pub fn projection(d: usize, k: usize) -> Result<DMatrix<f64>> {
    if k < 1 || k > d {
        return Err(invalid("k", format!("must lie in 1..={d}, got {k}")));
    }
    let mut p = DMatrix::zeros(d, d);
    for i in 1..k {
        p[(i, i)] = 1.0;
    }
    Ok(p)
}

/// Uniformly distributed rotation: QR of a Gaussian matrix with the signs of
/// `R`'s diagonal moved into `Q`, then one column flipped if needed so that
/// `det = +1`.
pub fn random_rotation<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Log-eigenvalues uniform in `[-l, l]` conditioned on summing to zero
/// (rejection from the centered uniform sample).
pub fn random_log_diagonal<R: Rng + ?Sized>(d: usize, l: f64, rng: &mut R) -> DVector<f64> {
    if l <= 0.0 || d == 1 {
        return DVector::zeros(d);
    }
    loop {
        let mut v = DVector::from_fn(d, |_, _| rng.random_range(-l..=l));
        let mean = v.mean();
        v.add_scalar_mut(-mean);
        if v.iter().all(|x| x.abs() <= l) {
            return v;
        }
    }
}

/// `rotation ∘ diag(e^λ)` followed by a translation.
pub fn random_element<R: Rng + ?Sized>(
    d: usize,
    log_range: f64,
    translation: DVector<f64>,
    rng: &mut R,
) -> Result<GroupElement> {
    let rot = random_rotation(d, rng);
    let lambda = random_log_diagonal(d, log_range, rng);
    let linear = rot * DMatrix::from_diagonal(&lambda.map(f64::exp));
    UnimodularAffine::new(linear, translation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_parameter_identities() {
        let a = UnimodularAffine::shear(&[0.3, -1.0]);
        let b = UnimodularAffine::shear(&[0.2, 4.0]);
        let ab = UnimodularAffine::shear(&[0.5, 3.0]);
        assert!((a.compose(&b).linear() - ab.linear()).amax() < 1e-10);
        let gs = UnimodularAffine::diagonal_flow(3, 0.4);
        let gt = UnimodularAffine::diagonal_flow(3, -1.1);
        let gst = UnimodularAffine::diagonal_flow(3, -0.7);
        assert!((gs.compose(&gt).linear() - gst.linear()).amax() < 1e-10);
    }

    #[test]
    fn projections() {
        let p = projection(3, 3).unwrap();
        assert_eq!(p[(0, 0)], 0.0);
        assert_eq!(p[(2, 2)], 1.0);
        assert_eq!(projection(3, 1).unwrap(), DMatrix::zeros(3, 3));
        assert!(projection(3, 4).is_err());
    }

    #[test]
    fn random_elements_are_unimodular() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 2..=4 {
            let q = random_rotation(d, &mut rng);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
            assert!((q.transpose() * &q - DMatrix::identity(d, d)).amax() < 1e-12);
            let lam = random_log_diagonal(d, 3.0, &mut rng);
            assert!(lam.sum().abs() < 1e-12 && lam.amax() <= 3.0);
            let g = random_element(d, 3.0, DVector::zeros(d), &mut rng).unwrap();
            assert!((g.determinant() - 1.0).abs() < 1e-9);
        }
    }
}
