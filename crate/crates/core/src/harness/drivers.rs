use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::json;

use super::config::{Experiment, ExperimentConfig, Format};
use super::output::{fmt_f64, fmt_opt, Report, Table};
use super::seeds::sub_seed;
use crate::chabauty::{
    act, cf_distance_with, line_build, random_log_diagonal, LineBuild, LineBuildParams,
    WindowedSet, CF_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Ellipsoid, Point, UnimodularAffine};
use crate::par::Exec;
use crate::pointset::{AlignedBox, NetOracle, PointSource};
use crate::witness::{
    alpha, diameter_bound, grow_witness, grow_witness_proof2, make_schedule, net_stress, select_n,
    GrowOptions, Outcome, StressResult,
};
use crate::FORMAT_VERSION;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_GAP: i32 = 2;

/// Volumes must match to this relative accuracy.
const VOLUME_TOL: f64 = 1e-9;

fn missing(field: &str) -> Error {
    Error::Config {
        field: field.to_string(),
        message: "required for this experiment".into(),
    }
}

fn need<T: Clone>(v: &Option<T>, field: &str) -> Result<T> {
    v.clone().ok_or_else(|| missing(field))
}

fn build_net(cfg: &ExperimentConfig) -> Result<NetOracle> {
    let spec = cfg.net.as_ref().ok_or_else(|| missing("net"))?;
    let net = NetOracle::from_spec(spec)?;
    if let Some(d) = cfg.d {
        if d != net.dim() {
            return Err(Error::Config {
                field: "d".into(),
                message: format!("d = {d} but the net has dimension {}", net.dim()),
            });
        }
    }
    Ok(net)
}

fn grow_options(cfg: &ExperimentConfig) -> GrowOptions {
    let mut o = GrowOptions::default();
    if let Some(p) = cfg.params.policy {
        o.policy = p;
    }
    if let Some(r) = cfg.params.retry_budget {
        o.retry_budget = r;
    }
    o
}

fn document<T: Serialize, V: Serialize>(
    cfg: &ExperimentConfig,
    result: &T,
    verification: &V,
) -> Result<serde_json::Value> {
    // The output section only says where this document goes.
    let mut config = serde_json::to_value(cfg)?;
    if let Some(map) = config.as_object_mut() {
        map.remove("output");
    }
    Ok(json!({
        "format_version": FORMAT_VERSION,
        "experiment": cfg.experiment.name(),
        "config": config,
        "result": serde_json::to_value(result)?,
        "verification": serde_json::to_value(verification)?,
    }))
}

/// Independent check of an outcome against the set itself.
#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub recount: usize,
    pub volume: f64,
    pub members: bool,
}

fn verify_outcome<S: PointSource>(
    net: &S,
    outcome: &Outcome,
    points: &[Point],
    min_count: usize,
    volume_ok: impl Fn(f64) -> bool,
) -> Result<Verification> {
    let region = outcome.region();
    let recount = net.count_in(region)?;
    let volume = region.volume();
    if !volume_ok(volume) {
        return Err(Error::Invariant(format!("region volume {volume:e} is off")));
    }
    let members = points
        .iter()
        .all(|p| net.contains_point(p) && region.gauge(p) <= 1.0 + 1e-9);
    match outcome {
        Outcome::Concentration { .. } => {
            if recount < min_count || !members {
                return Err(Error::Invariant(format!(
                    "re-verification failed: recount {recount} < {min_count} or foreign points"
                )));
            }
        }
        Outcome::Gap { .. } => {
            if recount != 0 {
                return Err(Error::Invariant(format!(
                    "gap certificate holds {recount} points"
                )));
            }
        }
    }
    Ok(Verification {
        recount,
        volume,
        members,
    })
}

fn outcome_code(o: &Outcome) -> i32 {
    if o.is_concentration() {
        EXIT_OK
    } else {
        EXIT_GAP
    }
}

fn outcome_label(o: &Outcome) -> &'static str {
    if o.is_concentration() {
        "CONCENTRATION"
    } else {
        "GAP"
    }
}

/// Runs the configured experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.experiment {
        Experiment::Witness => run_witness(cfg),
        Experiment::Proof2 => run_proof2(cfg),
        Experiment::Stress => run_stress(cfg),
        Experiment::Sweep => run_loglog_sweep(cfg),
        Experiment::Boxes => run_alignedbox(cfg),
        Experiment::Metric => run_metric(cfg),
        Experiment::Linebuild => run_linebuild(cfg),
        Experiment::Schedule => run_schedule(cfg),
    }
}

pub fn run_witness(cfg: &ExperimentConfig) -> Result<Report> {
    let net = build_net(cfg)?;
    let s = need(&cfg.params.s, "params.s")?;
    let n = need(&cfg.params.n, "params.n")?;
    let trace = grow_witness(&net, s, n, grow_options(cfg))?;
    let points = trace.points();
    let check = verify_outcome(&net, &trace.outcome, &points, n, |v| {
        (v / s - 1.0).abs() <= VOLUME_TOL
    })?;
    let mut table = Table::new(&[
        "k", "eps", "log_eps", "point", "inverse_norm", "log_norm_bound", "max_image_norm", "attempts",
    ]);
    for st in &trace.steps {
        table.push(vec![
            st.k.to_string(),
            fmt_f64(st.eps),
            fmt_f64(st.log_eps),
            st.point.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" "),
            fmt_f64(st.inverse_norm),
            fmt_f64(st.log_norm_bound),
            fmt_f64(st.max_image_norm),
            st.attempts.to_string(),
        ]);
    }
    Ok(Report {
        exit_code: outcome_code(&trace.outcome),
        summary: format!(
            "{} after {} steps, recount {}",
            outcome_label(&trace.outcome),
            trace.steps.len(),
            check.recount
        ),
        document: document(cfg, &trace, &check)?,
        table: Some(table),
        attachments: Vec::new(),
        default_format: Format::Json,
    })
}

pub fn run_proof2(cfg: &ExperimentConfig) -> Result<Report> {
    let net = build_net(cfg)?;
    let s = need(&cfg.params.s, "params.s")?;
    let eps = need(&cfg.params.eps, "params.eps")?;
    let n = need(&cfg.params.n, "params.n")?;
    let trace = grow_witness_proof2(&net, s, eps, n, grow_options(cfg))?;
    let points = trace.points();
    let gap = !trace.outcome.is_concentration();
    let check = verify_outcome(&net, &trace.outcome, &points, n, |v| {
        if gap {
            (v / s - 1.0).abs() <= VOLUME_TOL
        } else {
            v < eps
        }
    })?;
    let mut table = Table::new(&["k", "target", "radius", "point", "volume", "attempts"]);
    for st in &trace.steps {
        table.push(vec![
            st.k.to_string(),
            fmt_f64(st.target),
            fmt_f64(st.radius),
            st.point.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" "),
            fmt_f64(st.region.volume()),
            st.attempts.to_string(),
        ]);
    }
    Ok(Report {
        exit_code: outcome_code(&trace.outcome),
        summary: format!(
            "{} after {} steps, recount {}",
            outcome_label(&trace.outcome),
            trace.steps.len(),
            check.recount
        ),
        document: document(cfg, &trace, &check)?,
        table: Some(table),
        attachments: Vec::new(),
        default_format: Format::Json,
    })
}

fn verify_stress(net: &NetOracle, r: &StressResult) -> Result<Verification> {
    let points = r.trace.points().iter().map(|p| p * r.eps.powf(1.0 / r.d as f64)).collect::<Vec<_>>();
    let check = verify_outcome(net, &r.outcome, &points, r.n, |v| {
        (v / r.eps - 1.0).abs() <= VOLUME_TOL
    })?;
    if r.outcome.region().reach() > 0.5 * (1.0 + 1e-12) {
        return Err(Error::Invariant("region leaves the unit cube".into()));
    }
    Ok(check)
}

pub fn run_stress(cfg: &ExperimentConfig) -> Result<Report> {
    let net = build_net(cfg)?;
    let eps = need(&cfg.params.eps, "params.eps")?;
    let r = net_stress(&net, eps, net.dim(), grow_options(cfg))?;
    let check = verify_stress(&net, &r)?;
    let table = sweep_table(&[SweepRow::from_result(&r, &check, None)]);
    Ok(Report {
        exit_code: outcome_code(&r.outcome),
        summary: format!(
            "{} with n = {}, recount {}",
            outcome_label(&r.outcome),
            r.n,
            check.recount
        ),
        document: document(cfg, &r, &check)?,
        table: Some(table),
        attachments: Vec::new(),
        default_format: Format::Json,
    })
}

/// One row of the log-log sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub n_selected: usize,
    /// Points gathered by the iteration (equal to `n_selected` on success).
    pub count_found: usize,
    /// Points of the net in the final region.
    pub recount: usize,
    pub diam: Option<f64>,
    pub bound: Option<f64>,
    pub status: String,
    pub certificate: Option<String>,
}

impl SweepRow {
    fn from_result(r: &StressResult, check: &Verification, certificate: Option<String>) -> Self {
        let conc = r.outcome.is_concentration();
        Self {
            eps: r.eps,
            n_selected: r.n,
            count_found: if conc { r.collected } else { 0 },
            recount: check.recount,
            diam: r.log_diameter.map(f64::exp),
            bound: Some(r.log_diameter_bound.exp()),
            status: outcome_label(&r.outcome).to_string(),
            certificate: if conc { None } else { certificate },
        }
    }
}

fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut t = Table::new(&[
        "format_version", "eps", "n_selected", "count_found", "recount", "diam", "bound", "status",
        "certificate",
    ]);
    for r in rows {
        t.push(vec![
            FORMAT_VERSION.to_string(),
            fmt_f64(r.eps),
            r.n_selected.to_string(),
            r.count_found.to_string(),
            r.recount.to_string(),
            fmt_opt(r.diam),
            fmt_opt(r.bound),
            r.status.clone(),
            r.certificate.clone().unwrap_or_default(),
        ]);
    }
    t
}

/// Net used for sweep entry `eps`: a jittered grid of spacing
/// `grid_factor·ε^{1/d}` on the window `B_{1/2}`.
pub fn sweep_net(d: usize, eps: f64, grid_factor: f64, jitter: f64, seed: u64) -> Result<NetOracle> {
    let spacing = grid_factor * eps.powf(1.0 / d as f64);
    Ok(NetOracle::jittered_grid(d, spacing, jitter, seed)?.with_window(Some(0.5)))
}

pub fn run_loglog_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let seed = need(&cfg.seed, "seed")?;
    let list = need(&cfg.params.eps_list, "params.eps_list")?;
    let d = cfg.d.unwrap_or(2);
    let factor = cfg.params.grid_factor.unwrap_or(0.1);
    let jitter = cfg.params.jitter.unwrap_or(0.4);
    let exec = cfg.params.exec.unwrap_or_default();
    let opts = grow_options(cfg);
    let stem = cfg
        .output
        .path
        .as_ref()
        .and_then(|p| p.file_stem())
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".into());
    let entries = exec.map_slice(&list, |eps: &f64| -> Result<(SweepRow, Option<StressResult>)> {
        let eps = *eps;
        let n = select_n(d, eps)?;
        if n == 0 {
            let row = SweepRow {
                eps,
                n_selected: 0,
                count_found: 0,
                recount: 0,
                diam: None,
                bound: None,
                status: "NO_N".into(),
                certificate: None,
            };
            return Ok((row, None));
        }
        let net = sweep_net(d, eps, factor, jitter, sub_seed(seed, &format!("sweep/{eps:?}")))?;
        let r = net_stress(&net, eps, d, opts)?;
        let check = verify_stress(&net, &r)?;
        let cert = format!("{stem}.gap-{eps:e}.json");
        Ok((SweepRow::from_result(&r, &check, Some(cert)), Some(r)))
    });
    let mut rows = Vec::new();
    let mut attachments = Vec::new();
    let mut code = EXIT_OK;
    for e in entries {
        let (row, result) = e?;
        if let (Some(cert), Some(r)) = (&row.certificate, &result) {
            attachments.push((cert.clone(), serde_json::to_string_pretty(&r.outcome)? + "\n"));
            code = EXIT_GAP;
        }
        rows.push(row);
    }
    let table = sweep_table(&rows);
    Ok(Report {
        exit_code: code,
        summary: format!(
            "{} entries, counts {:?}",
            rows.len(),
            rows.iter().map(|r| r.count_found).collect::<Vec<_>>()
        ),
        document: document(cfg, &rows, &json!({ "verified": true }))?,
        table: Some(table),
        attachments,
        default_format: Format::Csv,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxSummary {
    pub boxes: usize,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    pub empty_boxes: usize,
    pub c_max: usize,
    pub bounded: bool,
    pub histogram: BTreeMap<usize, usize>,
    pub first_empty: Option<AlignedBox>,
}

/// Random volume-1 aligned box number `i`.
pub fn random_unit_box(d: usize, window: f64, aspect_max: f64, seed: u64, i: usize) -> Result<AlignedBox> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let dir = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let center = dir.normalize() * (window * rng.random::<f64>().powf(1.0 / d as f64));
    let sides = random_log_diagonal(d, aspect_max.ln() / 2.0, &mut rng).map(f64::exp);
    AlignedBox::centered(center.as_slice(), sides.as_slice())
}

pub fn alignedbox_summary<S: PointSource>(
    net: &S,
    boxes: usize,
    window: f64,
    aspect_max: f64,
    c_max: usize,
    seed: u64,
    exec: Exec,
) -> Result<BoxSummary> {
    let d = net.dim();
    let counts = exec.map(boxes, |i| -> Result<(usize, AlignedBox)> {
        let b = random_unit_box(d, window, aspect_max, seed, i)?;
        Ok((net.count_in(&b)?, b))
    });
    let mut histogram = BTreeMap::new();
    let (mut min, mut max, mut total, mut empty) = (usize::MAX, 0, 0usize, 0);
    let mut first_empty = None;
    for c in counts {
        let (c, b) = c?;
        *histogram.entry(c).or_insert(0) += 1;
        min = min.min(c);
        max = max.max(c);
        total += c;
        if c == 0 {
            empty += 1;
            first_empty.get_or_insert(b);
        }
    }
    Ok(BoxSummary {
        boxes,
        min,
        max,
        mean: total as f64 / boxes.max(1) as f64,
        empty_boxes: empty,
        c_max,
        bounded: max <= c_max,
        histogram,
        first_empty,
    })
}

pub fn run_alignedbox(cfg: &ExperimentConfig) -> Result<Report> {
    let net = build_net(cfg)?;
    let seed = sub_seed(need(&cfg.seed, "seed")?, "boxes");
    let p = &cfg.params;
    let s = alignedbox_summary(
        &net,
        p.boxes.unwrap_or(10_000),
        p.window.unwrap_or(50.0),
        p.aspect_max.unwrap_or(100.0),
        p.c_max.unwrap_or(16),
        seed,
        p.exec.unwrap_or_default(),
    )?;
    // The first empty box, if any, is re-checked from scratch.
    if let Some(b) = &s.first_empty {
        if net.count_in(b)? != 0 {
            return Err(Error::Invariant("empty box re-check failed".into()));
        }
    }
    let mut table = Table::new(&["format_version", "boxes", "min", "max", "mean", "empty_boxes", "c_max", "bounded"]);
    table.push(vec![
        FORMAT_VERSION.to_string(),
        s.boxes.to_string(),
        s.min.to_string(),
        s.max.to_string(),
        fmt_f64(s.mean),
        s.empty_boxes.to_string(),
        s.c_max.to_string(),
        s.bounded.to_string(),
    ]);
    Ok(Report {
        exit_code: if s.empty_boxes == 0 && s.bounded { EXIT_OK } else { EXIT_GAP },
        summary: format!(
            "{} boxes: min {}, max {}{}",
            s.boxes,
            s.min,
            s.max,
            if s.bounded { "" } else { " (above c_max)" }
        ),
        document: document(cfg, &s, &json!({ "recounted_empty_box": s.first_empty.is_some() }))?,
        table: Some(table),
        attachments: Vec::new(),
        default_format: Format::Json,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub property: String,
    pub cases: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl PropertyResult {
    fn new(property: &str, residuals: &[f64], tolerance: f64) -> Self {
        let worst = residuals.iter().cloned().fold(0.0, f64::max);
        Self {
            property: property.into(),
            cases: residuals.len(),
            worst_residual: worst,
            tolerance,
            pass: residuals.iter().all(|r| *r <= tolerance),
        }
    }
}

fn random_set(d: usize, radius: f64, window: f64, rng: &mut ChaCha8Rng) -> Result<WindowedSet> {
    let k = rng.random_range(1..=20);
    let pts = (0..k)
        .map(|_| {
            let g = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            g.normalize() * (radius * rng.random::<f64>().powf(1.0 / d as f64))
        })
        .collect();
    WindowedSet::new(d, pts, window)
}

/// Exact value of the distance for finite sets: the largest over points of
/// `min(δ_p, 1/‖p‖)`, capped at 1.
pub fn cf_closed_form(a: &WindowedSet, b: &WindowedSet) -> f64 {
    let one_way = |x: &WindowedSet, y: &WindowedSet| {
        x.points()
            .iter()
            .map(|p| {
                let delta = y.points().iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min);
                delta.min(1.0 / p.norm())
            })
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a)).min(1.0)
}

pub fn metric_suite(d: usize, sets: usize, triples: usize, deltas: &[f64], seed: u64, exec: Exec) -> Result<Vec<PropertyResult>> {
    let window = 100.0;
    let rng_for = |label: &str, i: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, label));
        rng.set_stream(i as u64);
        rng
    };
    let dist = |a: &WindowedSet, b: &WindowedSet| cf_distance_with(Exec::Sequential, a, b);

    let identity = exec.map(sets, |i| -> Result<f64> {
        let f = random_set(d, 3.0, window, &mut rng_for("metric/identity", i))?;
        dist(&f, &f)
    });
    let symmetry = exec.map(sets, |i| -> Result<f64> {
        let mut rng = rng_for("metric/symmetry", i);
        let a = random_set(d, 3.0, window, &mut rng)?;
        let b = random_set(d, 3.0, window, &mut rng)?;
        Ok((dist(&a, &b)? - dist(&b, &a)?).abs())
    });
    let triangle = exec.map(triples, |i| -> Result<(f64, f64)> {
        let mut rng = rng_for("metric/triangle", i);
        let a = random_set(d, 3.0, window, &mut rng)?;
        let b = random_set(d, 3.0, window, &mut rng)?;
        let c = random_set(d, 3.0, window, &mut rng)?;
        let ac = dist(&a, &c)?;
        let excess = (ac - dist(&a, &b)? - dist(&b, &c)?).max(0.0);
        Ok((excess, ac - cf_closed_form(&a, &c)))
    });
    let translation = exec.map(sets, |i| -> Result<f64> {
        // Sets and shifts small enough that everything stays in B_{1/D}.
        let mut rng = rng_for("metric/translation", i);
        let a = random_set(d, 0.5, window, &mut rng)?;
        let b = random_set(d, 0.5, window, &mut rng)?;
        let v = DVector::from_fn(d, |_, _| rng.random_range(-0.15..0.15));
        let g = UnimodularAffine::translation(v);
        Ok((dist(&act(&g, &a)?, &act(&g, &b)?)? - dist(&a, &b)?).abs())
    });
    let collect = |v: Vec<Result<f64>>| v.into_iter().collect::<Result<Vec<f64>>>();
    let triangle: Vec<(f64, f64)> = triangle.into_iter().collect::<Result<_>>()?;
    let excess: Vec<f64> = triangle.iter().map(|t| t.0).collect();
    // Bisection returns the upper end of an interval of width ≤ tolerance.
    let oracle: Vec<f64> = triangle
        .iter()
        .map(|t| if (0.0..=CF_TOLERANCE).contains(&t.1) { 0.0 } else { t.1.abs() })
        .collect();

    let point = WindowedSet::new(d, vec![DVector::zeros(d)], window)?;
    let empty = WindowedSet::empty(d, window)?;
    let empty_res = (dist(&point, &empty)? - 1.0).abs();
    let pair: Vec<f64> = deltas
        .iter()
        .map(|delta| -> Result<f64> {
            let mut p = DVector::zeros(d);
            p[0] = *delta;
            let other = WindowedSet::new(d, vec![p], window)?;
            Ok((dist(&point, &other)? - delta).abs())
        })
        .collect::<Result<_>>()?;

    Ok(vec![
        PropertyResult::new("identity", &collect(identity)?, 0.0),
        PropertyResult::new("symmetry", &collect(symmetry)?, 0.0),
        PropertyResult::new("triangle", &excess, 2e-9),
        PropertyResult::new("closed_form", &oracle, 0.0),
        PropertyResult::new("point_vs_empty", &[empty_res], 0.0),
        PropertyResult::new("point_pair", &pair, CF_TOLERANCE),
        PropertyResult::new("translation", &collect(translation)?, CF_TOLERANCE),
    ])
}

fn property_report(cfg: &ExperimentConfig, props: &[PropertyResult], extra: serde_json::Value) -> Result<Report> {
    let mut table = Table::new(&["format_version", "property", "cases", "worst_residual", "tolerance", "pass"]);
    for p in props {
        table.push(vec![
            FORMAT_VERSION.to_string(),
            p.property.clone(),
            p.cases.to_string(),
            fmt_f64(p.worst_residual),
            fmt_f64(p.tolerance),
            p.pass.to_string(),
        ]);
    }
    let all = props.iter().all(|p| p.pass);
    Ok(Report {
        exit_code: if all { EXIT_OK } else { EXIT_GAP },
        summary: props
            .iter()
            .map(|p| format!("{} {}", p.property, if p.pass { "PASS" } else { "FAIL" }))
            .collect::<Vec<_>>()
            .join(", "),
        document: document(cfg, &json!({ "properties": props, "details": extra }), &json!({}))?,
        table: Some(table),
        attachments: Vec::new(),
        default_format: Format::Json,
    })
}

pub fn run_metric(cfg: &ExperimentConfig) -> Result<Report> {
    let p = &cfg.params;
    let props = metric_suite(
        cfg.d.unwrap_or(2),
        p.sets.unwrap_or(50),
        p.triples.unwrap_or(100),
        p.deltas.as_deref().unwrap_or(&[0.1, 0.5, 0.9]),
        need(&cfg.seed, "seed")?,
        p.exec.unwrap_or_default(),
    )?;
    property_report(cfg, &props, json!(null))
}

pub fn linebuild_properties(out: &LineBuild) -> Vec<PropertyResult> {
    let errors: Vec<f64> = out
        .targets
        .iter()
        .map(|t| t.error.unwrap_or(f64::INFINITY))
        .collect();
    vec![
        PropertyResult::new("targets_hit", &errors, out.params.eta),
        PropertyResult::new("probe_failures", &[out.failures.len() as f64], 0.0),
    ]
}

pub fn run_linebuild(cfg: &ExperimentConfig) -> Result<Report> {
    let net = build_net(cfg)?;
    let p = &cfg.params;
    let params = LineBuildParams {
        r: p.r.unwrap_or(0.02),
        spacing: p.spacing.unwrap_or(0.1),
        half_count: p.half_count.unwrap_or(10),
        eta: p.eta.unwrap_or(1e-2),
    };
    let out = line_build(&net, params)?;
    // Re-check: every placed point is the image of a member of the net.
    let inverse = out.accumulated.inverse();
    for t in &out.targets {
        if let Some(pt) = &t.point {
            let back = inverse.apply(&DVector::from_vec(pt.clone()));
            if !net.contains_point(&back) {
                return Err(Error::Invariant(format!("target {} maps back outside the net", t.j)));
            }
        }
    }
    let props = linebuild_properties(&out);
    let mut report = property_report(cfg, &props, serde_json::to_value(&out)?)?;
    let mut table = Table::new(&["format_version", "j", "target", "point", "error", "hit"]);
    for t in &out.targets {
        table.push(vec![
            FORMAT_VERSION.to_string(),
            t.j.to_string(),
            fmt_f64(t.target),
            t.point
                .as_ref()
                .map(|p| p.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" "))
                .unwrap_or_default(),
            fmt_opt(t.error),
            t.error.is_some_and(|e| e <= params.eta).to_string(),
        ]);
    }
    report.table = Some(table);
    report.summary = format!(
        "{} of {} targets within {}, max error {:e}",
        out.targets.iter().filter(|t| t.error.is_some_and(|e| e <= params.eta)).count(),
        out.targets.len(),
        params.eta,
        out.max_error
    );
    Ok(report)
}

pub fn run_schedule(cfg: &ExperimentConfig) -> Result<Report> {
    let d = cfg.d.unwrap_or(2);
    let n = need(&cfg.params.n, "params.n")?;
    let s = cfg.params.s.unwrap_or(1.0);
    let sched = make_schedule(d, n)?;
    let mut table = Table::new(&["format_version", "k", "eps", "log_eps", "m", "log_norm_bound"]);
    for k in 1..=n {
        table.push(vec![
            FORMAT_VERSION.to_string(),
            k.to_string(),
            fmt_f64(sched.eps(k)),
            fmt_f64(sched.log_eps(k)),
            fmt_f64(sched.m(k)),
            fmt_f64(sched.log_norm_bound(k)),
        ]);
    }
    let extra = json!({
        "schedule": sched,
        "s": s,
        "diameter_bound": diameter_bound(d, s, n)?,
        "log_diameter_bound": crate::witness::diameter_bound_ln(d, s, n)?,
        "alpha": alpha(d, n)?,
        "unit_ball_volume": unit_ball_volume(d)?,
    });
    Ok(Report {
        exit_code: EXIT_OK,
        summary: format!("d = {d}, n = {n}: eps_1 = exp({})", sched.log_eps(1)),
        document: document(cfg, &extra, &json!({}))?,
        table: Some(table),
        attachments: Vec::new(),
        default_format: Format::Csv,
    })
}

/// The centered ellipsoid with semi-axis `a` along `e_1` and volume `s`
/// (`d = 2`).
pub fn lattice_line_ellipse(a: f64, s: f64) -> Result<Ellipsoid> {
    let b = s / (PI * a);
    Ellipsoid::new(
        DVector::zeros(2),
        nalgebra::DMatrix::from_diagonal(&DVector::from_vec(vec![a, b])),
    )
}
