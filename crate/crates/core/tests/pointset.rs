use std::f64::consts::{PI, SQRT_2};

use danzer_core::geometry::{lex_cmp, Ellipsoid, Point};
use danzer_core::harness::lattice_line_ellipse;
use danzer_core::pointset::io::{read_points, write_points};
use danzer_core::pointset::{AlignedBox, NetOracle, NetSpec, PointSource, Scaled};
use danzer_core::Error;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_ellipsoid(d: usize, reach: f64, rng: &mut impl Rng) -> Ellipsoid {
    loop {
        let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)) * reach;
        let c = DVector::from_fn(d, |_, _| rng.random_range(-reach..reach));
        if let Ok(e) = Ellipsoid::new(c, a) {
            if e.volume() > 1e-3 {
                return e;
            }
        }
    }
}

/// All lattice points `B z + o` with `|z_i| ≤ k`.
fn brute_lattice(basis: &DMatrix<f64>, offset: &DVector<f64>, k: i64) -> Vec<Point> {
    let d = basis.nrows();
    let mut out = Vec::new();
    let mut z = vec![-k; d];
    loop {
        let v = DVector::from_iterator(d, z.iter().map(|x| *x as f64));
        out.push(basis * v + offset);
        let mut i = 0;
        loop {
            if i == d {
                return out;
            }
            z[i] += 1;
            if z[i] <= k {
                break;
            }
            z[i] = -k;
            i += 1;
        }
    }
}

#[test]
fn lattice_enumeration_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for d in [2, 3] {
        for _ in 0..20 {
            let basis: DMatrix<f64> = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)) * 0.6
                + DMatrix::identity(d, d) * 0.8;
            if basis.determinant().abs() < 0.2 {
                continue;
            }
            let offset = DVector::from_fn(d, |_, _| rng.random_range(-0.5..0.5));
            let net = NetOracle::lattice(basis.clone(), offset.clone()).unwrap();
            let e = random_ellipsoid(d, 2.0, &mut rng);
            let found = net.points_in(&e).unwrap();
            let all = brute_lattice(&basis, &offset, 25);
            for p in &all {
                let g = e.gauge(p);
                let listed = found.iter().any(|q| (q - p).norm() < 1e-9);
                if g < 1.0 - 1e-9 {
                    assert!(listed, "missed {p:?}");
                } else if g > 1.0 + 1e-9 {
                    assert!(!listed, "fabricated {p:?}");
                }
            }
            for q in &found {
                assert!(e.contains(q) && net.contains_point(q));
            }
        }
    }
}

#[test]
fn empty_answers_are_really_empty() {
    // The lattice 3·Z² misses small balls around the cell centers.
    let net = NetOracle::lattice(DMatrix::identity(2, 2) * 3.0, DVector::zeros(2)).unwrap();
    let e = Ellipsoid::ball(DVector::from_vec(vec![1.5, 1.5]), 1.0).unwrap();
    assert_eq!(net.query(&e).unwrap(), None);
    for p in brute_lattice(&(DMatrix::identity(2, 2) * 3.0), &DVector::zeros(2), 5) {
        assert!(!e.contains(&p));
    }
}

#[test]
fn long_thin_ellipse_along_a_lattice_line() {
    let net = NetOracle::integer_lattice(2);
    let e = lattice_line_ellipse(8.0, PI / 16.0).unwrap();
    let axes = e.semi_axes();
    assert!((axes[0] - 8.0).abs() < 1e-12);
    assert!((axes[1] - 1.0 / 128.0).abs() < 1e-15);
    assert!((e.volume() - PI / 16.0).abs() < 1e-14);
    let pts = net.points_in(&e).unwrap();
    assert_eq!(pts.len(), 17);
    assert!(pts.iter().all(|p| p[1] == 0.0));
}

#[test]
fn lattice_counts_follow_covolume() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for d in [2, 3] {
        let basis: DMatrix<f64> = DMatrix::from_fn(d, d, |_, _| rng.random_range(-0.3..0.3)) + DMatrix::identity(d, d);
        let det = basis.determinant().abs();
        let net = NetOracle::lattice(basis, DVector::zeros(d)).unwrap();
        let e = Ellipsoid::centered_ball(d, 12.0).unwrap();
        let expected = e.volume() / det;
        let got = net.count_in(&e).unwrap() as f64;
        assert!((got / expected - 1.0).abs() < 0.2, "d={d}: {got} vs {expected}");
    }
}

#[test]
fn ring_lattice_points_have_integer_norm_form() {
    let net = NetOracle::ring_lattice_z_sqrt2();
    let pts = net.points_in(&Ellipsoid::centered_ball(2, 100.0).unwrap()).unwrap();
    assert!(pts.len() > 1000);
    for p in pts {
        // p = (a + b√2, a − b√2)
        let a = (p[0] + p[1]) / 2.0;
        let b = (p[0] - p[1]) / (2.0 * SQRT_2);
        assert!((a - a.round()).abs() < 1e-9 && (b - b.round()).abs() < 1e-9);
        let norm = p[0] * p[1];
        assert!((norm - (a.round().powi(2) - 2.0 * b.round().powi(2))).abs() < 1e-6);
    }
}

#[test]
fn jittered_points_stay_in_their_cells() {
    let spacing = 0.3;
    let jitter = 0.4;
    let net = NetOracle::jittered_grid(2, spacing, jitter, 77).unwrap();
    let b = AlignedBox::new(vec![-3.0, -3.0], vec![3.0, 3.0]).unwrap();
    let pts = net.points_in(&b).unwrap();
    for p in &pts {
        for x in p.iter() {
            let cell = (x / spacing).floor();
            let offset = x / spacing - cell - 0.5;
            assert!(offset.abs() <= jitter + 1e-12);
        }
        assert!(net.contains_point(p));
    }
    // Each cell strictly inside the box contributes exactly one point.
    let inner = AlignedBox::new(vec![-2.4, -2.4], vec![2.4, 2.4]).unwrap();
    assert_eq!(net.count_in(&inner).unwrap(), 16 * 16);
}

#[test]
fn jittered_grid_covers_balls() {
    let spacing = 0.1;
    let net = NetOracle::jittered_grid(2, spacing, 0.4, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    // Any ball of radius (1/2 + jitter)·spacing·√2 holds a point.
    let r = 0.9 * spacing * SQRT_2;
    for _ in 0..500 {
        let c = DVector::from_fn(2, |_, _| rng.random_range(-5.0..5.0));
        let e = Ellipsoid::ball(c, r).unwrap();
        assert!(net.query(&e).unwrap().is_some());
    }
}

#[test]
fn ellipsoid_and_box_queries_agree() {
    let net = NetOracle::jittered_grid(3, 0.25, 0.3, 12).unwrap();
    let bbox = AlignedBox::new(vec![-2.0; 3], vec![2.0; 3]).unwrap();
    let all = net.points_in(&bbox).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let e = random_ellipsoid(3, 0.8, &mut rng);
        let want: Vec<Point> = all.iter().filter(|p| e.contains(p)).cloned().collect();
        assert_eq!(net.points_in(&e).unwrap(), want);
    }
}

#[test]
fn generation_is_deterministic() {
    let spec: NetSpec = serde_json::from_str(
        r#"{"kind": "jittered_grid", "dim": 2, "spacing": 0.05, "jitter": 0.4, "seed": 9}"#,
    )
    .unwrap();
    let a = NetOracle::from_spec(&spec).unwrap();
    let b = NetOracle::from_spec(&spec).unwrap();
    let e = Ellipsoid::centered_ball(2, 1.0).unwrap();
    assert_eq!(a.points_in(&e).unwrap(), b.points_in(&e).unwrap());
    let other = NetOracle::jittered_grid(2, 0.05, 0.4, 10).unwrap();
    assert_ne!(a.points_in(&e).unwrap(), other.points_in(&e).unwrap());
    let p1 = NetOracle::poisson(2, 50.0, 2.0, 5).unwrap();
    let p2 = NetOracle::poisson(2, 50.0, 2.0, 5).unwrap();
    assert_eq!(p1.points_in(&e).unwrap(), p2.points_in(&e).unwrap());
}

#[test]
fn window_is_enforced() {
    let net = NetOracle::integer_lattice(2).with_window(Some(5.0));
    assert!(net.count_in(&Ellipsoid::centered_ball(2, 4.0).unwrap()).is_ok());
    assert!(matches!(
        net.count_in(&Ellipsoid::centered_ball(2, 6.0).unwrap()),
        Err(Error::OutOfWindow { .. })
    ));
}

#[test]
fn explicit_list_round_trips_through_text() {
    let pts = vec![
        DVector::from_vec(vec![0.1, -0.2]),
        DVector::from_vec(vec![1.0 / 3.0, 2.5]),
    ];
    let mut buf = Vec::new();
    write_points(&mut buf, &pts).unwrap();
    let back = read_points(buf.as_slice()).unwrap();
    assert_eq!(back, pts);
    let net = NetOracle::explicit(2, back).unwrap();
    assert!(net.contains_point(&pts[1]));
    assert!(!net.contains_point(&DVector::from_vec(vec![0.1, 0.2])));
}

#[test]
fn scaled_source_dilates() {
    let net = NetOracle::integer_lattice(2);
    let scaled = Scaled::new(&net, 0.5).unwrap();
    let e = Ellipsoid::centered_ball(2, 0.6).unwrap();
    let mut pts = scaled.points_in(&e).unwrap();
    pts.sort_by(lex_cmp);
    assert_eq!(pts.len(), 5);
    assert!(scaled.contains_point(&DVector::from_vec(vec![0.5, -0.5])));
    assert!(!scaled.contains_point(&DVector::from_vec(vec![0.25, 0.0])));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn points_in_never_fabricates(seed in any::<u64>(), cx in -3.0f64..3.0, cy in -3.0f64..3.0, r in 0.05f64..1.5) {
        let net = NetOracle::jittered_grid(2, 0.2, 0.45, seed).unwrap();
        let e = Ellipsoid::ball(DVector::from_vec(vec![cx, cy]), r).unwrap();
        let pts = net.points_in(&e).unwrap();
        prop_assert_eq!(pts.len(), net.count_in(&e).unwrap());
        for p in &pts {
            prop_assert!(e.contains(p));
            prop_assert!(net.contains_point(p));
        }
        prop_assert_eq!(net.query(&e).unwrap(), pts.first().cloned());
    }
}
