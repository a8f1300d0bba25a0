use crate::error::{Error, Result};
use crate::geometry::{Point, UnimodularAffine};
use crate::par::Exec;

use super::WindowedSet;

/// Absolute accuracy of [`cf_distance`].
pub const CF_TOLERANCE: f64 = 1e-9;

/// For each point: its norm and its distance to the nearest point of `other`
/// (`∞` when `other` is empty).
fn reach_profile(exec: Exec, from: &WindowedSet, other: &WindowedSet) -> Vec<(f64, f64)> {
    exec.map_slice(from.points(), |p: &Point| {
        let nearest = other
            .points()
            .iter()
            .map(|q| (p - q).norm())
            .fold(f64::INFINITY, f64::min);
        (p.norm(), nearest)
    })
}

/// Whether every point within `1/eps` of the origin has a partner within
/// `eps` (closed conditions). `eps = 0` demands exact equality.
fn satisfied(profile: &[(f64, f64)], eps: f64) -> bool {
    profile
        .iter()
        .all(|(norm, nearest)| *nearest <= eps || *norm * eps > 1.0)
}

/// Chabauty–Fell distance: the infimum of `ε ∈ (0, 1]` such that each set's
/// points in `B_{1/ε}` lie in the closed `ε`-neighborhood of the other,
/// capped at 1. Found by bisection; the returned value is within
/// [`CF_TOLERANCE`] above the infimum.
pub fn cf_distance(f1: &WindowedSet, f2: &WindowedSet) -> Result<f64> {
    cf_distance_with(Exec::default(), f1, f2)
}

pub fn cf_distance_with(exec: Exec, f1: &WindowedSet, f2: &WindowedSet) -> Result<f64> {
    if f1.dim() != f2.dim() {
        return Err(Error::DimensionMismatch {
            expected: f1.dim(),
            got: f2.dim(),
        });
    }
    let mut profile = reach_profile(exec, f1, f2);
    profile.extend(reach_profile(exec, f2, f1));
    if satisfied(&profile, 0.0) {
        return Ok(0.0);
    }
    if !satisfied(&profile, 1.0) {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > CF_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if satisfied(&profile, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let window = f1.window().min(f2.window());
    if 1.0 / hi > window {
        return Err(Error::WindowInsufficient {
            needed: 1.0 / hi,
            window,
        });
    }
    Ok(hi)
}

/// Pointwise image of `f` under `g`, clipped to the largest ball on which the
/// image is faithful: `g⁻¹(B_{R'}) ⊆ B_R` for `R' = (R − ‖L⁻¹t‖)/‖L⁻¹‖`.
pub fn act(g: &UnimodularAffine, f: &WindowedSet) -> Result<WindowedSet> {
    if g.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let inv = g.inverse();
    let shift = inv.translation_part().norm();
    let window = (f.window() - shift) / inv.operator_norm();
    if !(window > 0.0) {
        return Err(Error::WindowInsufficient {
            needed: shift,
            window: f.window(),
        });
    }
    let points = f.points().iter().map(|p| g.apply(p)).collect();
    WindowedSet::new(f.dim(), points, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn set(points: &[&[f64]], window: f64) -> WindowedSet {
        let d = points.first().map_or(2, |p| p.len());
        let pts = points.iter().map(|p| DVector::from_vec(p.to_vec())).collect();
        WindowedSet::new(d, pts, window).unwrap()
    }

    #[test]
    fn basic_values() {
        let origin = set(&[&[0.0, 0.0]], 100.0);
        let empty = WindowedSet::empty(2, 100.0).unwrap();
        assert_eq!(cf_distance(&origin, &origin).unwrap(), 0.0);
        assert_eq!(cf_distance(&origin, &empty).unwrap(), 1.0);
        assert_eq!(cf_distance(&empty, &empty).unwrap(), 0.0);
        for delta in [0.1, 0.5, 0.9] {
            let moved = set(&[&[delta, 0.0]], 100.0);
            let d = cf_distance(&origin, &moved).unwrap();
            assert!(d >= delta && d - delta <= CF_TOLERANCE, "{d} vs {delta}");
        }
    }

    #[test]
    fn far_points_are_ignored() {
        let a = set(&[&[0.0, 0.0], &[50.0, 0.0]], 100.0);
        let b = set(&[&[0.0, 0.0]], 100.0);
        let d = cf_distance(&a, &b).unwrap();
        assert!((d - 0.02).abs() <= CF_TOLERANCE);
    }

    #[test]
    fn small_window_is_reported() {
        let a = set(&[&[0.0, 0.0]], 5.0);
        let b = set(&[&[0.01, 0.0]], 5.0);
        assert!(matches!(cf_distance(&a, &b), Err(Error::WindowInsufficient { .. })));
    }

    #[test]
    fn act_translation_and_shear() {
        let f = set(&[&[1.0, 0.0], &[2.0, 1.0]], 10.0);
        let v = DVector::from_vec(vec![0.3, 0.4]);
        let moved = act(&UnimodularAffine::translation(v), &f).unwrap();
        assert!((moved.window() - 9.5).abs() < 1e-12);
        assert_eq!(moved.points()[0].as_slice(), &[1.3, 0.4]);
        let sheared = act(&UnimodularAffine::shear(&[0.5]), &f).unwrap();
        assert_eq!(sheared.points()[0].as_slice(), &[1.0, 0.0]);
        let empty = WindowedSet::empty(2, 10.0).unwrap();
        assert!(act(&UnimodularAffine::identity(2), &empty).unwrap().is_empty());
    }
}
