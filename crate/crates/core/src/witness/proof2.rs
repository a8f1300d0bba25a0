use serde::{Deserialize, Serialize};

use super::grow::{probe_direction, working_scale};
use super::trace::{to_points, to_vec, GrowOptions, Outcome};
use super::DirectionPolicy;
use crate::error::{invalid, Error, Result};
use crate::geometry::{
    lex_cmp, normalize_to_ball, spectral_norm, stretch_cover, unit_ball_volume, Ellipsoid, Point,
};
use crate::pointset::{PointSource, Scaled};
use crate::FORMAT_VERSION;

const CONTAINMENT_TOL: f64 = 1e-9;
const DISTINCT_TOL: f64 = 1e-9;

/// Volume targets `τ_1, …, τ_n` (working units) with `τ_n = eps` and
/// `τ_k = β_d (τ_{k+1}/β_d)^{d/(d-1)}`: an ellipsoid of volume below `τ_k`
/// normalizes to a ball of radius `r` with `β_d r^{d-1} < τ_{k+1}`.
pub fn induction_targets(d: usize, eps: f64, n: usize) -> Result<Vec<f64>> {
    if d < 2 {
        return Err(Error::Dimension { min: 2, got: d });
    }
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    let beta = unit_ball_volume(d)?;
    let p = d as f64 / (d as f64 - 1.0);
    let mut targets = vec![eps; n];
    for k in (0..n - 1).rev() {
        targets[k] = beta * (targets[k + 1] / beta).powf(p);
    }
    if !(targets[0] > 1e-300) {
        return Err(Error::ScheduleRange(format!(
            "first volume target underflows for d = {d}, n = {n}"
        )));
    }
    Ok(targets)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Proof2Step {
    pub k: usize,
    /// Volume bound for `E_k`, input units.
    pub target: f64,
    /// Radius of the ball `E_{k-1}` was normalized to (working units); zero
    /// for the first step.
    pub radius: f64,
    pub point: Vec<f64>,
    pub region: Ellipsoid,
    pub attempts: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Proof2Trace {
    pub format_version: String,
    pub d: usize,
    pub s: f64,
    pub eps: f64,
    pub n: usize,
    pub scale: f64,
    pub options: GrowOptions,
    pub steps: Vec<Proof2Step>,
    pub collected_points: Vec<Vec<f64>>,
    pub outcome: Outcome,
}

impl Proof2Trace {
    pub fn points(&self) -> Vec<Point> {
        to_points(&self.collected_points)
    }
}

/// Builds `E_1 ⊆ ⋯ ⊆` with `E_k` holding `k` points and `vol(E_n) < eps`, by
/// repeatedly normalizing to a small ball and extending it towards a point
/// found in a disjoint probe ball of diameter 1/2. The set is assumed to meet
/// every convex set of volume `s`.
pub fn grow_witness_proof2<S: PointSource>(
    source: &S,
    s: f64,
    eps: f64,
    n: usize,
    opts: GrowOptions,
) -> Result<Proof2Trace> {
    let d = source.dim();
    let beta = unit_ball_volume(d)?;
    let scale = working_scale(d, s)?;
    let unit = scale.powi(d as i32);
    let eps_w = eps * unit;
    let eps0 = beta / 2f64.powi(d as i32 - 1);
    if !(eps_w > 0.0 && eps_w < eps0) {
        return Err(invalid(
            "eps",
            format!(
                "must lie in (0, {:e}) for s = {s}, got {eps}",
                eps0 / unit
            ),
        ));
    }
    let targets = induction_targets(d, eps_w, n)?;
    let work = Scaled::new(source, scale)?;
    let mut trace = Proof2Trace {
        format_version: FORMAT_VERSION.to_string(),
        d,
        s,
        eps,
        n,
        scale,
        options: opts,
        steps: Vec::with_capacity(n),
        collected_points: Vec::new(),
        outcome: Outcome::Gap {
            step: 1,
            certificate: Ellipsoid::centered_ball(d, 0.25 / scale)?,
        },
    };

    let Some(y1) = work.query(&Ellipsoid::centered_ball(d, 0.5)?)? else {
        return Ok(trace);
    };
    let rho = (targets[0] / 2.0 / beta).powf(1.0 / d as f64);
    let mut e = Ellipsoid::ball(y1.clone(), rho)?;
    let mut collected = vec![y1.clone()];
    trace.steps.push(Proof2Step {
        k: 1,
        target: targets[0] / unit,
        radius: 0.0,
        point: to_vec(&(&y1 / scale)),
        region: e.dilated(1.0 / scale),
        attempts: 1,
    });

    for k in 2..=n {
        let target = targets[k - 1];
        let (g, r) = normalize_to_ball(&e)?;
        if !(beta * r.powi(d as i32 - 1) < target && r < 0.5) {
            return Err(Error::Invariant(format!(
                "step {k}: normalized radius {r:e} too large for target {target:e}"
            )));
        }
        let g_inv = g.inverse();
        let mut found = None;
        let mut last_region = None;
        for attempt in 0..=opts.retry_budget {
            let dir = probe_direction(opts.policy, k, attempt, g_inv.linear());
            let probe = Ellipsoid::ball(&dir * (r + 0.25), 0.25)?;
            let region = g_inv.apply_ellipsoid(&probe);
            let mut cands: Vec<(Point, Point)> = Vec::new();
            work.for_each_in((&region).into(), &mut |p| {
                let q = g.apply(&p);
                if q.norm() > r && probe.gauge(&q) <= 1.0 + CONTAINMENT_TOL {
                    cands.push((p, q));
                }
            })?;
            cands.sort_by(|a, b| lex_cmp(&a.0, &b.0));
            let choice = match opts.policy {
                DirectionPolicy::GoldenAngle => cands.into_iter().next(),
                DirectionPolicy::MinStretch => {
                    let mut best: Option<(f64, (Point, Point))> = None;
                    for c in cands {
                        let cover = stretch_cover(r, &c.1)?;
                        let cost = spectral_norm(&(g_inv.linear() * cover.shape()));
                        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                            best = Some((cost, c));
                        }
                    }
                    best.map(|(_, c)| c)
                }
            };
            if let Some(c) = choice {
                found = Some((c, attempt + 1));
                break;
            }
            last_region = Some(region);
        }
        let Some(((p, q), attempts)) = found else {
            let region = last_region.expect("at least one attempt");
            trace.collected_points = collected.iter().map(|p| to_vec(&(p / scale))).collect();
            trace.outcome = Outcome::Gap {
                step: k,
                certificate: region.dilated(1.0 / scale),
            };
            return Ok(trace);
        };
        if collected.iter().any(|c| (c - &p).norm() < DISTINCT_TOL) {
            return Err(Error::Invariant(format!("step {k}: repeated point")));
        }
        e = g_inv.apply_ellipsoid(&stretch_cover(r, &q)?);
        collected.push(p.clone());
        if !(e.volume() < target) {
            return Err(Error::Invariant(format!(
                "step {k}: volume {:e} not below target {target:e}",
                e.volume()
            )));
        }
        if let Some(c) = collected.iter().find(|c| e.gauge(c) > 1.0 + CONTAINMENT_TOL) {
            return Err(Error::Invariant(format!(
                "step {k}: point {:?} left the ellipsoid",
                c.as_slice()
            )));
        }
        trace.steps.push(Proof2Step {
            k,
            target: target / unit,
            radius: r,
            point: to_vec(&(&p / scale)),
            region: e.dilated(1.0 / scale),
            attempts,
        });
    }

    let region = e.dilated(1.0 / scale);
    trace.collected_points = collected.iter().map(|p| to_vec(&(p / scale))).collect();
    trace.outcome = Outcome::Concentration {
        count: collected.len(),
        region,
    };
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::NetOracle;
    use std::f64::consts::PI;

    #[test]
    fn targets_chain() {
        let t = induction_targets(2, 0.1, 2).unwrap();
        assert!((t[0] - 0.01 / PI).abs() < 1e-15);
        assert_eq!(t[1], 0.1);
    }

    #[test]
    fn base_case() {
        let grid = NetOracle::jittered_grid(2, 0.05, 0.3, 1).unwrap();
        let t = grow_witness_proof2(&grid, PI / 16.0, 0.1, 1, GrowOptions::default()).unwrap();
        match &t.outcome {
            Outcome::Concentration { count, region } => {
                assert_eq!(*count, 1);
                assert!(region.volume() < 0.1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_large_eps() {
        let grid = NetOracle::integer_lattice(2);
        assert!(grow_witness_proof2(&grid, PI / 16.0, 2.0, 2, GrowOptions::default()).is_err());
    }

    #[test]
    fn grid_runs_reach_three() {
        let grid = NetOracle::jittered_grid(2, 0.05, 0.4, 3).unwrap();
        for policy in [DirectionPolicy::GoldenAngle, DirectionPolicy::MinStretch] {
            let opts = GrowOptions {
                policy,
                retry_budget: 8,
            };
            let t = grow_witness_proof2(&grid, PI / 16.0, 0.1, 3, opts).unwrap();
            match &t.outcome {
                Outcome::Concentration { count, region } => {
                    assert_eq!(*count, 3);
                    assert!(region.volume() < 0.1);
                    assert!(t.points().iter().all(|p| region.gauge(p) <= 1.0 + 1e-9));
                }
                other => panic!("{policy:?}: {other:?}"),
            }
        }
    }
}
