use nalgebra::{DMatrix, DVector};

use super::trace::{to_vec, DirectionPolicy, GrowOptions, Outcome, StepRecord, WitnessTrace};
use super::{diameter_bound_ln, make_schedule};
use crate::error::{invalid, Error, Result};
use crate::geometry::{
    lex_cmp, normalize_to_ball, spectral_norm, stretch_cover, unit_ball_volume, Ellipsoid, Point,
    UnimodularAffine,
};
use crate::pointset::{PointSource, Scaled};
use crate::FORMAT_VERSION;

/// The golden angle `π(3 − √5)`.
pub const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

const CONTAINMENT_TOL: f64 = 1e-9;
const DISTINCT_TOL: f64 = 1e-9;
const NORM_TOL: f64 = 1e-6;

/// The dilation taking volume `s` to the volume of a ball of diameter 1/2.
pub fn working_scale(d: usize, s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(invalid("s", format!("must be positive, got {s}")));
    }
    Ok((unit_ball_volume(d)? / s).powf(1.0 / d as f64) / 4.0)
}

/// Unit vector for probe `k`, attempt `attempt`.
///
/// `inverse` is the linear part of the accumulated inverse map.
pub(crate) fn probe_direction(
    policy: DirectionPolicy,
    k: usize,
    attempt: usize,
    inverse: &DMatrix<f64>,
) -> Point {
    let d = inverse.nrows();
    match policy {
        DirectionPolicy::GoldenAngle => {
            let theta = GOLDEN_ANGLE * (k + attempt) as f64;
            let mut u = DVector::zeros(d);
            u[0] = theta.cos();
            u[1] = theta.sin();
            u
        }
        DirectionPolicy::MinStretch => {
            let svd = inverse.clone().svd(false, true);
            let v_t = svd.v_t.expect("requested");
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|a, b| svd.singular_values[*a].total_cmp(&svd.singular_values[*b]));
            let first = v_t.row(order[0]).transpose();
            let second = v_t.row(order[1]).transpose();
            let theta = GOLDEN_ANGLE * attempt as f64;
            first * theta.cos() + second * theta.sin()
        }
    }
}

/// The map fixing the orthogonal complement of `y` up to the dilation
/// `(‖y‖/ε)^{1/(d-1)}` and scaling `y` to length `ε`.
fn first_map(y: &Point, eps: f64) -> Result<UnimodularAffine> {
    let d = y.len();
    let t = y.norm();
    let u = y / t;
    let a = eps / t;
    let b = a.powf(-1.0 / (d as f64 - 1.0));
    let linear = DMatrix::identity(d, d) * b + &u * u.transpose() * (a - b);
    UnimodularAffine::from_linear(linear)
}

/// Grows a convex set of volume `s` holding `n` points of `source`, or finds
/// a region of volume `s` that `source` misses.
pub fn grow_witness<S: PointSource>(
    source: &S,
    s: f64,
    n: usize,
    opts: GrowOptions,
) -> Result<WitnessTrace> {
    let d = source.dim();
    let schedule = make_schedule(d, n)?;
    let log_diameter_bound = diameter_bound_ln(d, s, n)?;
    let scale = working_scale(d, s)?;
    let eps1 = schedule.eps(1);
    if !(eps1 > 1e-300) {
        return Err(Error::ScheduleRange(format!(
            "ε_1 = exp({:.6e}) is below double precision",
            schedule.log_eps(1)
        )));
    }
    let work = Scaled::new(source, scale)?;
    let mut trace = WitnessTrace {
        format_version: FORMAT_VERSION.to_string(),
        d,
        s,
        n,
        scale,
        options: opts,
        schedule: schedule.clone(),
        steps: Vec::with_capacity(n),
        accumulated: UnimodularAffine::identity(d),
        result_set: None,
        collected_points: Vec::new(),
        log_diameter: None,
        log_diameter_bound,
        outcome: Outcome::Gap {
            step: 1,
            certificate: Ellipsoid::centered_ball(d, 0.25 / scale)?,
        },
    };

    // Step 1.
    let probe = Ellipsoid::centered_ball(d, 0.5)?;
    let cands = work.points_in(&probe)?;
    let y1 = match opts.policy {
        DirectionPolicy::GoldenAngle => cands.into_iter().next(),
        DirectionPolicy::MinStretch => cands
            .into_iter()
            .min_by(|a, b| a.norm().total_cmp(&b.norm()).then_with(|| lex_cmp(a, b))),
    };
    let Some(y1) = y1 else {
        return Ok(trace);
    };
    let h1 = if y1.norm() <= eps1 {
        UnimodularAffine::identity(d)
    } else {
        first_map(&y1, eps1)?
    };
    let mut h = h1.clone();
    let mut h_inv = h1.inverse();
    let mut collected = vec![y1.clone()];
    let mut images = vec![h1.apply(&y1)];
    let max_image = check_containment(&images, eps1, 1)?;
    let inverse_norm = h_inv.operator_norm();
    check_norm(inverse_norm, schedule.log_norm_bound(1), 1)?;
    trace.steps.push(StepRecord {
        k: 1,
        eps: eps1,
        log_eps: schedule.log_eps(1),
        point: to_vec(&(&y1 / scale)),
        local_point: to_vec(&y1),
        map: h1,
        probe,
        attempts: 1,
        inverse_norm,
        log_norm_bound: schedule.log_norm_bound(1),
        max_image_norm: max_image,
    });

    for k in 2..=n {
        let prev = schedule.eps(k - 1);
        let eps_k = schedule.eps(k);
        let mut found = None;
        let mut last_probe = None;
        for attempt in 0..=opts.retry_budget {
            let dir = probe_direction(opts.policy, k, attempt, h_inv.linear());
            let probe = Ellipsoid::ball(&dir * (prev + 0.25), 0.25)?;
            let region = h_inv.apply_ellipsoid(&probe);
            let mut cands: Vec<(Point, Point)> = Vec::new();
            work.for_each_in((&region).into(), &mut |p| {
                let q = h.apply(&p);
                if q.norm() > prev && probe.gauge(&q) <= 1.0 + CONTAINMENT_TOL {
                    cands.push((p, q));
                }
            })?;
            cands.sort_by(|a, b| lex_cmp(&a.0, &b.0));
            let choice = match opts.policy {
                DirectionPolicy::GoldenAngle => cands.into_iter().next(),
                DirectionPolicy::MinStretch => {
                    let mut best: Option<(f64, (Point, Point))> = None;
                    for c in cands {
                        let (hk, _) = normalize_to_ball(&stretch_cover(prev, &(&c.1 / c.1.norm()))?)?;
                        let cost = spectral_norm(&(h_inv.linear() * hk.inverse().linear()));
                        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                            best = Some((cost, c));
                        }
                    }
                    best.map(|(_, c)| c)
                }
            };
            if let Some(c) = choice {
                found = Some((c, probe, attempt + 1));
                break;
            }
            last_probe = Some(region);
        }
        let Some(((p, q), probe, attempts)) = found else {
            let region = last_probe.expect("at least one attempt");
            trace.accumulated = h;
            trace.collected_points = collected.iter().map(|p| to_vec(&(p / scale))).collect();
            trace.outcome = Outcome::Gap {
                step: k,
                certificate: region.dilated(1.0 / scale),
            };
            return Ok(trace);
        };
        if let Some(other) = collected.iter().find(|c| (*c - &p).norm() < DISTINCT_TOL) {
            return Err(Error::Invariant(format!(
                "step {k}: point {:?} repeats an earlier point {:?}",
                p.as_slice(),
                other.as_slice()
            )));
        }
        let ek = stretch_cover(prev, &(&q / q.norm()))?;
        let (hk, _) = normalize_to_ball(&ek)?;
        h = hk.compose(&h);
        h_inv = h_inv.compose(&hk.inverse());
        for img in images.iter_mut() {
            *img = hk.apply(img);
        }
        images.push(hk.apply(&q));
        collected.push(p.clone());
        let max_image = check_containment(&images, eps_k, k)?;
        let inverse_norm = h_inv.operator_norm();
        check_norm(inverse_norm, schedule.log_norm_bound(k), k)?;
        trace.steps.push(StepRecord {
            k,
            eps: eps_k,
            log_eps: schedule.log_eps(k),
            point: to_vec(&(&p / scale)),
            local_point: to_vec(&q),
            map: hk,
            probe,
            attempts,
            inverse_norm,
            log_norm_bound: schedule.log_norm_bound(k),
            max_image_norm: max_image,
        });
    }

    let eps_n = schedule.eps(n);
    let k_n = h_inv
        .apply_ellipsoid(&Ellipsoid::centered_ball(d, eps_n)?)
        .dilated(1.0 / scale);
    let log_diameter = (2.0 * h_inv.operator_norm() * eps_n / scale).ln();
    if log_diameter > log_diameter_bound {
        return Err(Error::Invariant(format!(
            "diameter exp({log_diameter}) exceeds the bound exp({log_diameter_bound})"
        )));
    }
    trace.accumulated = h;
    trace.collected_points = collected.iter().map(|p| to_vec(&(p / scale))).collect();
    trace.log_diameter = Some(log_diameter);
    trace.result_set = Some(k_n.clone());
    trace.outcome = Outcome::Concentration {
        count: collected.len(),
        region: k_n,
    };
    Ok(trace)
}

fn check_containment(images: &[Point], eps: f64, k: usize) -> Result<f64> {
    let max = images.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if max > eps * (1.0 + CONTAINMENT_TOL) {
        return Err(Error::Invariant(format!(
            "step {k}: collected image at distance {max:e} leaves the ball of radius {eps:e}"
        )));
    }
    Ok(max)
}

fn check_norm(norm: f64, log_bound: f64, k: usize) -> Result<()> {
    if norm.ln() > log_bound + NORM_TOL.ln_1p() {
        return Err(Error::Invariant(format!(
            "step {k}: accumulated inverse norm {norm:e} exceeds exp({log_bound})"
        )));
    }
    Ok(())
}
