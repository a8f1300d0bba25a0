use serde::{Deserialize, Serialize};

use super::trace::{GrowOptions, Outcome, WitnessTrace};
use super::{alpha_ln, grow_witness, select_n};
use crate::error::{invalid, Error, Result};
use crate::pointset::{PointSource, Scaled};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StressResult {
    pub eps: f64,
    pub d: usize,
    pub n: usize,
    /// Volume-`eps` region in the original cube: a witness holding at least
    /// `n` points, or a region the net misses.
    pub outcome: Outcome,
    /// Points collected by the iteration.
    pub collected: usize,
    /// Points of the net in the outcome region, counted afresh.
    pub recount: usize,
    pub log_diameter: Option<f64>,
    /// `ln(ε^{1/d}·α_{d,n})`.
    pub log_diameter_bound: f64,
    /// The underlying run in the rescaled coordinates `ε^{-1/d}·x`.
    pub trace: WitnessTrace,
}

/// Finds a convex set of volume `eps` inside `[-1/2, 1/2]^d` holding at
/// least `n(eps)` points of `net`, where `n` is the largest count with
/// `α_{d,n} ≤ eps^{-1/d}/2`.
pub fn net_stress<S: PointSource>(
    net: &S,
    eps: f64,
    d: usize,
    opts: GrowOptions,
) -> Result<StressResult> {
    if net.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: net.dim(),
        });
    }
    let n = select_n(d, eps)?;
    if n == 0 {
        return Err(invalid(
            "eps",
            format!("no n >= 1 has alpha(d, n) <= eps^(-1/d)/2 for eps = {eps}"),
        ));
    }
    let phi = eps.powf(-1.0 / d as f64);
    let scaled = Scaled::new(net, phi)?;
    let trace = grow_witness(&scaled, 1.0, n, opts)?;
    let log_scale = eps.ln() / d as f64;
    let outcome = match &trace.outcome {
        Outcome::Concentration { count, region } => Outcome::Concentration {
            count: *count,
            region: region.dilated(1.0 / phi),
        },
        Outcome::Gap { step, certificate } => Outcome::Gap {
            step: *step,
            certificate: certificate.dilated(1.0 / phi),
        },
    };
    let region = outcome.region();
    if outcome.is_concentration() && region.reach() > 0.5 * (1.0 + 1e-12) {
        return Err(Error::Invariant(format!(
            "witness reaches {} outside the unit cube",
            region.reach()
        )));
    }
    let recount = net.count_in(region)?;
    Ok(StressResult {
        eps,
        d,
        n,
        collected: trace.collected_points.len(),
        recount,
        log_diameter: trace.log_diameter.map(|l| l + log_scale),
        log_diameter_bound: alpha_ln(d, n)? + log_scale,
        outcome,
        trace,
    })
}
