use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::Schedule;
use crate::geometry::{Ellipsoid, Point, UnimodularAffine};

/// How probe directions and candidate points are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionPolicy {
    /// Direction `(cos kθ, sin kθ, 0, …)` with θ the golden angle; the
    /// lexicographically smallest point of the probe is taken.
    GoldenAngle,
    /// Probe along the direction the accumulated inverse map contracts most
    /// and take the point keeping that map's operator norm smallest.
    #[default]
    MinStretch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrowOptions {
    pub policy: DirectionPolicy,
    /// Extra directions tried after an empty probe.
    pub retry_budget: usize,
}

impl Default for GrowOptions {
    fn default() -> Self {
        Self {
            policy: DirectionPolicy::default(),
            retry_budget: 16,
        }
    }
}

/// End state of a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// A convex set holding `count` points of the set.
    Concentration { count: usize, region: Ellipsoid },
    /// A region of the stipulated volume containing no point of the set.
    Gap { step: usize, certificate: Ellipsoid },
}

impl Outcome {
    pub fn is_concentration(&self) -> bool {
        matches!(self, Outcome::Concentration { .. })
    }

    pub fn region(&self) -> &Ellipsoid {
        match self {
            Outcome::Concentration { region, .. } => region,
            Outcome::Gap { certificate, .. } => certificate,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    pub eps: f64,
    pub log_eps: f64,
    /// The chosen point, in the coordinates of the input set.
    pub point: Vec<f64>,
    /// The chosen point in the frame of step `k` (before applying `h_k`).
    pub local_point: Vec<f64>,
    pub map: UnimodularAffine,
    /// The probe region in the frame of step `k`.
    pub probe: Ellipsoid,
    pub attempts: usize,
    /// `‖(h_k∘⋯∘h_1)^{-1}‖_op` after this step.
    pub inverse_norm: f64,
    /// `ln ε_1^{-m_k}`.
    pub log_norm_bound: f64,
    /// Largest `‖h(y_i)‖` over the points collected so far.
    pub max_image_norm: f64,
}

/// Full record of a witness-growing run. Working coordinates are the input
/// coordinates multiplied by `scale`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessTrace {
    pub format_version: String,
    pub d: usize,
    pub s: f64,
    pub n: usize,
    pub scale: f64,
    pub options: GrowOptions,
    pub schedule: Schedule,
    pub steps: Vec<StepRecord>,
    /// `h = h_n∘⋯∘h_1` in working coordinates.
    pub accumulated: UnimodularAffine,
    pub result_set: Option<Ellipsoid>,
    pub collected_points: Vec<Vec<f64>>,
    pub log_diameter: Option<f64>,
    pub log_diameter_bound: f64,
    pub outcome: Outcome,
}

impl WitnessTrace {
    pub fn points(&self) -> Vec<Point> {
        to_points(&self.collected_points)
    }
}

pub(crate) fn to_vec(p: &Point) -> Vec<f64> {
    p.iter().cloned().collect()
}

pub(crate) fn to_points(v: &[Vec<f64>]) -> Vec<Point> {
    v.iter().map(|p| DVector::from_vec(p.clone())).collect()
}
