use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::group::random_element;
use super::GroupElement;
use crate::error::{invalid, Error, Result};
use crate::geometry::Ellipsoid;
use crate::par::Exec;
use crate::pointset::PointSource;

const CHUNK: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DanzerCheckOptions {
    pub r: f64,
    pub trials: usize,
    pub seed: u64,
    /// Log-eigenvalues of the diagonal part lie in `[-log_range, log_range]`.
    pub log_range: f64,
    /// Probes stay inside the centered ball of this radius.
    pub window: f64,
    pub exec: Exec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub element: GroupElement,
    /// `g.B̄_r`, which misses the set.
    pub region: Ellipsoid,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DanzerCheck {
    pub passed: bool,
    pub trials_run: usize,
    pub counterexample: Option<Counterexample>,
}

/// Random probe number `trial`: its own ChaCha stream, so results do not
/// depend on the execution order.
fn probe(d: usize, opts: &DanzerCheckOptions, trial: usize) -> Result<(GroupElement, Ellipsoid)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(trial as u64);
    let unit = random_element(d, opts.log_range, DVector::zeros(d), &mut rng)?;
    let stretch = unit.operator_norm() * opts.r;
    let room = opts.window - stretch;
    let dir = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let radius = room * rng.random::<f64>().powf(1.0 / d as f64);
    let shift = dir.normalize() * radius;
    let g = GroupElement::translation(shift).compose(&unit);
    let region = g.apply_ellipsoid(&Ellipsoid::centered_ball(d, opts.r)?);
    Ok((g, region))
}

/// Monte Carlo test that `set` meets `g.B̄_r` for random `g`: a rotation, a
/// volume-preserving diagonal stretch and a translation within the window.
/// Stops at the first miss.
pub fn danzer_param_check<S: PointSource>(set: &S, opts: DanzerCheckOptions) -> Result<DanzerCheck> {
    let d = set.dim();
    if opts.trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    if !(opts.r > 0.0) || !(opts.log_range >= 0.0) {
        return Err(invalid("r", "radius must be positive and log_range non-negative"));
    }
    let worst = opts.r * opts.log_range.exp();
    if worst > opts.window {
        return Err(Error::WindowInsufficient {
            needed: worst,
            window: opts.window,
        });
    }
    let mut start = 0;
    while start < opts.trials {
        let len = CHUNK.min(opts.trials - start);
        let results = opts.exec.map(len, |i| -> Result<Option<Counterexample>> {
            let trial = start + i;
            let (element, region) = probe(d, &opts, trial)?;
            Ok(match set.query(&region)? {
                Some(_) => None,
                None => Some(Counterexample {
                    trial,
                    element,
                    region,
                }),
            })
        });
        for r in results {
            if let Some(c) = r? {
                return Ok(DanzerCheck {
                    passed: false,
                    trials_run: c.trial + 1,
                    counterexample: Some(c),
                });
            }
        }
        start += len;
    }
    Ok(DanzerCheck {
        passed: true,
        trials_run: opts.trials,
        counterexample: None,
    })
}
