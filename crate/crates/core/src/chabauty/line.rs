use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{GroupElement, WindowedSet};
use crate::error::{invalid, Error, Result};
use crate::geometry::{lex_cmp, Ellipsoid, Point, UnimodularAffine};
use crate::pointset::PointSource;

const PROBE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineBuildParams {
    /// Radius of the balls the set is assumed to meet in every `g.B̄_r`.
    pub r: f64,
    /// Spacing `ε` of the targets `(jε, 0, …, 0)`.
    pub spacing: f64,
    /// Targets run over `j ∈ {-N, …, N}`.
    pub half_count: usize,
    pub eta: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetRecord {
    pub j: i64,
    pub target: f64,
    /// `translation ∘ g_t`; the probe region is its image of `B̄_r`.
    pub probe: GroupElement,
    pub shear: Option<GroupElement>,
    /// The chosen point of the input set.
    pub source_point: Option<Vec<f64>>,
    /// Its final image under the accumulated shears.
    pub point: Option<Vec<f64>>,
    pub error: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineBuild {
    pub params: LineBuildParams,
    pub t: f64,
    /// The shears in the order they were applied.
    pub elements: Vec<GroupElement>,
    pub accumulated: GroupElement,
    /// Final images of the chosen points, window `Nε + η`.
    pub set: WindowedSet,
    pub targets: Vec<TargetRecord>,
    pub failures: Vec<i64>,
    pub max_error: f64,
}

impl LineBuild {
    pub fn complete(&self) -> bool {
        self.failures.is_empty() && self.max_error <= self.params.eta
    }
}

/// Targets in the order `0, 1, -1, 2, -2, …`.
fn target_order(n: usize) -> Vec<i64> {
    let mut out = vec![0];
    for j in 1..=n as i64 {
        out.push(j);
        out.push(-j);
    }
    out
}

/// Finite-scale approximation of the x_1-axis inside the orbit of `source`.
///
/// For each target the probe `g_t.B̄_r` (with `e^{-t} r = η/6`) is moved to
/// x_1-coordinate `jε` and distance `η/3` from the axis, so every probe point
/// `x` has `η/6 ≤ ‖P(x)‖ ≤ η/2`. The probe point whose shear `u(a)`, moving it
/// to x_1-coordinate `jε`, has the smallest `‖a‖` is taken; small shears keep
/// the earlier points in place. Empty probes are recorded as failures.
pub fn line_build<S: PointSource>(source: &S, params: LineBuildParams) -> Result<LineBuild> {
    let d = source.dim();
    if d < 2 {
        return Err(Error::Dimension { min: 2, got: d });
    }
    let LineBuildParams {
        r,
        spacing,
        half_count,
        eta,
    } = params;
    for (name, v) in [("r", r), ("spacing", spacing), ("eta", eta)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(name, format!("must be positive, got {v}")));
        }
    }
    let t = (6.0 * r / eta).ln().max(0.0);
    let flow = UnimodularAffine::diagonal_flow(d, t);
    let rho = r * (-t).exp();
    let unit = Ellipsoid::centered_ball(d, r)?;

    let mut acc = UnimodularAffine::identity(d);
    let mut elements = Vec::new();
    let mut targets = Vec::new();
    let mut failures = Vec::new();
    // (index into `targets`, current image)
    let mut placed: Vec<(usize, Point)> = Vec::new();

    for j in target_order(half_count) {
        let x1 = j as f64 * spacing;
        let mut center = DVector::zeros(d);
        center[0] = x1;
        center[1] = 2.0 * rho;
        let probe = UnimodularAffine::translation(center).compose(&flow);
        let region = probe.apply_ellipsoid(&unit);
        let pulled = acc.inverse().apply_ellipsoid(&region);
        let mut best: Option<(f64, Point, Point)> = None;
        source.for_each_in((&pulled).into(), &mut |p| {
            let q = acc.apply(&p);
            let off_axis = q.rows(1, d - 1).norm();
            if region.gauge(&q) > 1.0 + PROBE_TOL || off_axis == 0.0 {
                return;
            }
            let cost = (x1 - q[0]).abs() / off_axis;
            let better = match &best {
                None => true,
                Some((c, bp, _)) => cost < *c || (cost == *c && lex_cmp(&p, bp).is_lt()),
            };
            if better {
                best = Some((cost, p, q));
            }
        })?;
        let mut record = TargetRecord {
            j,
            target: x1,
            probe,
            shear: None,
            source_point: None,
            point: None,
            error: None,
        };
        let Some((_, p, q)) = best else {
            failures.push(j);
            targets.push(record);
            continue;
        };
        let off = q.rows(1, d - 1).into_owned();
        let a = &off * ((x1 - q[0]) / off.norm_squared());
        let u = UnimodularAffine::shear(a.as_slice());
        acc = u.compose(&acc);
        for (_, pos) in placed.iter_mut() {
            *pos = u.apply(pos);
        }
        placed.push((targets.len(), u.apply(&q)));
        record.shear = Some(u.clone());
        record.source_point = Some(p.iter().cloned().collect());
        elements.push(u);
        targets.push(record);
    }

    let mut max_error: f64 = 0.0;
    for (idx, pos) in &placed {
        let rec = &mut targets[*idx];
        let mut target = DVector::zeros(d);
        target[0] = rec.target;
        let err = (pos - target).norm();
        max_error = max_error.max(err);
        rec.point = Some(pos.iter().cloned().collect());
        rec.error = Some(err);
    }
    let window = half_count as f64 * spacing + eta;
    let set = WindowedSet::new(d, placed.into_iter().map(|(_, p)| p).collect(), window)?;
    Ok(LineBuild {
        params,
        t,
        elements,
        accumulated: acc,
        set,
        targets,
        failures,
        max_error,
    })
}
