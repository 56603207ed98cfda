//! Command implementations behind the `horosurf` binary. Each command
//! returns its files in memory; [`emit`] writes them.

use std::path::Path;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{map_chart, Config, Tolerances};
use crate::domain::DomainSpec;
use crate::envelope::{curvature_forms, envelope_point_of, shape_operator, EnvelopeOptions};
use crate::error::GeomError;
use crate::fields::RhoField;
use crate::flow::{
    arccoth, convexity_class, flow_invariants, flow_k, flow_kh, focal_times, Convexity, FlowInvariantReport, FocalTime,
};
use crate::grid::{filter_by_field, FieldGrid, SampleGrid};
use crate::hyperbolic::SpherePoint;
use crate::mesh::{mesh_self_intersection, MeshOutput};
use crate::verify::{run_verify, VerifyReport};
use crate::weingarten::{
    curvature_line_trace, ratio, regularity_classify, univalence_bounds, BoundsReport, RegularityReport, TraceStop,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn cfg_err(e: String) -> CliError {
    CliError::Config(e)
}

/// A file produced by a command, named relative to the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub report: Artifact,
    pub files: Vec<Artifact>,
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("report serializes");
    out.push(b'\n');
    out
}

/// Writes the files and the report into `dir`, or prints the report when
/// no directory is configured and the command produced no other files.
pub fn emit(out: &CommandOutput, dir: Option<&Path>) -> Result<(), CliError> {
    match dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            for a in out.files.iter().chain(std::iter::once(&out.report)) {
                std::fs::write(d.join(&a.name), &a.bytes)?;
            }
            Ok(())
        }
        None if out.files.is_empty() => {
            use std::io::Write;
            std::io::stdout().write_all(&out.report.bytes)?;
            Ok(())
        }
        None => Err(CliError::Config("outputs.dir is required for mesh output".into())),
    }
}

/// Per-vertex surface data of one offset.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceLayer {
    pub offset: f64,
    pub mesh: MeshOutput,
    pub focal: Vec<bool>,
}

/// Meshes of `Sigma(rho + t)` over a filtered grid. Focal vertices keep
/// their position; their curvature columns are NaN.
pub fn surface_layers(field: &RhoField, grid: &SampleGrid, offsets: &[f64]) -> Result<Vec<SurfaceLayer>, GeomError> {
    let opts = EnvelopeOptions::default();
    let thetas = grid.sphere_points();
    let jets = thetas.par_iter().map(|p| field.eval_jet(p)).collect::<Result<Vec<_>, _>>()?;
    let s_col: Vec<f64> = match field.map() {
        Some((map, chart)) => thetas
            .par_iter()
            .map(|p| chart.to_chart(p).and_then(|w| ratio(map, w)).map(|r| r.s).unwrap_or(f64::NAN))
            .collect(),
        None => vec![f64::NAN; thetas.len()],
    };
    offsets
        .iter()
        .map(|&t| {
            let rows = thetas
                .par_iter()
                .zip(jets.par_iter())
                .map(|(theta, j)| {
                    let jt = j.shifted(t);
                    let pos = envelope_point_of(theta, &jt)?;
                    match shape_operator(theta, &jt, &opts) {
                        Ok(s) => Ok((*pos.coords(), [s.k1, s.k2, s.gauss, s.mean], false)),
                        Err(GeomError::FocalPoint { .. }) => Ok((*pos.coords(), [f64::NAN; 4], true)),
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<Vec<_>, GeomError>>()?;
            let vertices = rows.iter().map(|r| r.0).collect();
            let col = |i: usize| rows.iter().map(|r| r.1[i]).collect::<Vec<f64>>();
            let focal: Vec<bool> = rows.iter().map(|r| r.2).collect();
            let mesh = MeshOutput::new(vertices, grid.triangles.clone())?
                .with_scalar("k1", col(0))?
                .with_scalar("k2", col(1))?
                .with_scalar("K", col(2))?
                .with_scalar("H", col(3))?
                .with_scalar("s", s_col.clone())?
                .with_scalar("focal", focal.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect())?;
            Ok(SurfaceLayer { offset: t, mesh, focal })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct LayerSummary {
    offset: f64,
    obj: String,
    csv: String,
    vertices: usize,
    triangles: usize,
    focal_vertices: usize,
    self_intersections: usize,
}

fn layer_files(prefix: &str, tag: &str, layer: &SurfaceLayer, files: &mut Vec<Artifact>) -> LayerSummary {
    let obj = format!("{prefix}_{tag}.obj");
    let csv = format!("{prefix}_{tag}.csv");
    files.push(Artifact { name: obj.clone(), bytes: layer.mesh.obj_bytes() });
    files.push(Artifact { name: csv.clone(), bytes: layer.mesh.csv_bytes() });
    LayerSummary {
        offset: layer.offset,
        obj,
        csv,
        vertices: layer.mesh.vertices().len(),
        triangles: layer.mesh.triangles().len(),
        focal_vertices: layer.focal.iter().filter(|&&f| f).count(),
        self_intersections: mesh_self_intersection(&layer.mesh).pairs.len(),
    }
}

fn field_grid(cfg: &Config) -> Result<(RhoField, FieldGrid), CliError> {
    let field = cfg.field().map_err(cfg_err)?;
    let grid = cfg.sample_grid().map_err(cfg_err)?;
    let fg = filter_by_field(&grid, &field, cfg.rho_max())?;
    if fg.grid.is_empty() {
        return Err(CliError::Domain("every grid point exceeds rho_max".into()));
    }
    Ok((field, fg))
}

#[derive(Debug, Serialize)]
struct SurfaceReport {
    command: &'static str,
    grid_points: usize,
    dropped_rho_max: Vec<usize>,
    layers: Vec<LayerSummary>,
}

/// One OBJ and sidecar CSV per offset (offset 0 when none are given).
pub fn cmd_surface(cfg: &Config) -> Result<CommandOutput, CliError> {
    let (field, fg) = field_grid(cfg)?;
    let offsets = if cfg.offsets.is_empty() { vec![0.0] } else { cfg.offsets.clone() };
    let layers = surface_layers(&field, &fg.grid, &offsets)?;
    let prefix = &cfg.outputs.prefix;
    let mut files = Vec::new();
    let summaries =
        layers.iter().enumerate().map(|(i, l)| layer_files(prefix, &format!("t{i}"), l, &mut files)).collect();
    let report = SurfaceReport {
        command: "surface",
        grid_points: fg.grid.len(),
        dropped_rho_max: fg.dropped,
        layers: summaries,
    };
    Ok(CommandOutput { report: Artifact { name: format!("{prefix}_surface.json"), bytes: json_bytes(&report) }, files })
}

#[derive(Debug, Serialize)]
pub struct PathRow {
    pub t: f64,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub gauss: Option<f64>,
    pub mean: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct FocalEvent {
    /// Focal time from the closed form.
    pub t_star: f64,
    pub multiplicity: u8,
    /// Bisection bracket of the sign change of `ch t - k sh t`.
    pub bracket: [f64; 2],
    /// `det g` of the reconstructed flow at the bracket midpoint.
    pub det_g: f64,
}

#[derive(Debug, Serialize)]
pub struct PairReport {
    pub k1: f64,
    pub k2: f64,
    pub convexity: Convexity,
    pub note: Option<&'static str>,
    pub focal_times: Vec<FocalTime>,
    pub focal_events: Vec<FocalEvent>,
    pub no_focal_events: bool,
    pub path: Vec<PathRow>,
    pub invariants: FlowInvariantReport,
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> [f64; 2] {
    let fa0 = f(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (f(m) > 0.0) == (fa0 > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    [a, b]
}

/// Flow report of a principal curvature pair over a sorted time grid.
pub fn pair_report(k1: f64, k2: f64, times: &[f64]) -> Result<PairReport, CliError> {
    let g0 = Matrix2::identity();
    let pi0 = Matrix2::new(k1, 0.0, 0.0, k2);
    let state = crate::flow::decompose_flow(&g0, &pi0)?;
    let (lo, hi) = (times[0], times[times.len() - 1]);
    let mut focal_events = Vec::new();
    for f in focal_times(k1, k2).into_iter().filter(|f| f.t >= lo && f.t <= hi) {
        let k = if arccoth(k1).is_some_and(|t| (t - f.t).abs() <= 1e-12 * (1.0 + t.abs())) { k1 } else { k2 };
        let factor = |t: f64| t.cosh() - k * t.sinh();
        // grid interval holding the root, widened to a sign change
        let i = times.iter().position(|&t| t >= f.t).unwrap_or(times.len() - 1);
        let mut a = if i > 0 { times[i - 1] } else { f.t - 1e-3 };
        let mut b = times[i].max(f.t + 1e-12);
        if factor(a) * factor(b) > 0.0 {
            a = f.t - 1e-6;
            b = f.t + 1e-6;
        }
        let bracket = bisect(factor, a, b, 1e-12);
        let det_g = state.evaluate(0.5 * (bracket[0] + bracket[1])).0.determinant();
        focal_events.push(FocalEvent { t_star: f.t, multiplicity: f.multiplicity, bracket, det_g });
    }
    let path = times
        .iter()
        .map(|&t| {
            let a = flow_k(k1, t).ok();
            let b = flow_k(k2, t).ok();
            let kh = flow_kh(k1 * k2 - 1.0, k1 + k2, t).ok();
            PathRow { t, k1: a, k2: b, gauss: kh.map(|x| x.0), mean: kh.map(|x| x.1) }
        })
        .collect();
    let convexity = convexity_class(k1, k2);
    Ok(PairReport {
        k1,
        k2,
        convexity,
        note: convexity.note(),
        focal_times: focal_times(k1, k2),
        no_focal_events: focal_events.is_empty(),
        focal_events,
        path,
        invariants: flow_invariants(&g0, &pi0, times, 1e-6)?,
    })
}

#[derive(Debug, Serialize)]
pub struct FieldFlowRow {
    pub vertex: usize,
    pub t: f64,
    /// Gauss curvature from the closed-form flow of the initial curvatures.
    pub gauss_flow: Option<f64>,
    /// Gauss curvature of the envelope of `rho + t`.
    pub gauss_envelope: Option<f64>,
    /// `|K sqrt(det g) - K_inf e^{2 rho}|` at the offset surface.
    pub kda_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
struct FlowReport {
    command: &'static str,
    times: Vec<f64>,
    pairs: Vec<PairReport>,
    field_rows: Vec<FieldFlowRow>,
    max_flow_envelope_gap: f64,
    max_kda_residual: f64,
}

/// Curvature paths, focal events, convexity classes and invariant
/// deviations for curvature pairs and for a field on a grid.
pub fn cmd_flow(cfg: &Config) -> Result<CommandOutput, CliError> {
    if cfg.offsets.is_empty() {
        return Err(CliError::Config("flow needs a time grid in 'offsets'".into()));
    }
    if cfg.curvatures.is_empty() && cfg.grid.is_none() {
        return Err(CliError::Config("flow needs 'curvatures' or a field with a grid".into()));
    }
    let mut times = cfg.offsets.clone();
    times.sort_by(f64::total_cmp);
    let pairs = cfg.curvatures.iter().map(|&[a, b]| pair_report(a, b, &times)).collect::<Result<Vec<_>, _>>()?;
    let mut field_rows = Vec::new();
    if cfg.grid.is_some() {
        let (field, fg) = field_grid(cfg)?;
        let opts = EnvelopeOptions::default();
        let thetas = fg.grid.sphere_points();
        let rows: Vec<Vec<FieldFlowRow>> = thetas
            .par_iter()
            .enumerate()
            .map(|(v, theta)| {
                let j = field.eval_jet(theta)?;
                let s0 = shape_operator(theta, &j, &opts).ok();
                Ok(times
                    .iter()
                    .map(|&t| {
                        let jt = j.shifted(t);
                        let st = shape_operator(theta, &jt, &opts).ok();
                        FieldFlowRow {
                            vertex: v,
                            t,
                            gauss_flow: s0.and_then(|s| flow_kh(s.gauss, s.mean, t).ok().map(|kh| kh.0)),
                            gauss_envelope: st.map(|s| s.gauss),
                            kda_residual: st.map(|s| {
                                let (a, b) = curvature_forms(&jt, &s);
                                (a - b).abs()
                            }),
                        }
                    })
                    .collect())
            })
            .collect::<Result<_, GeomError>>()?;
        field_rows = rows.into_iter().flatten().collect();
    }
    let gap = field_rows
        .iter()
        .filter_map(|r| Some((r.gauss_flow? - r.gauss_envelope?).abs() / (1.0 + r.gauss_flow?.abs())))
        .fold(0.0, f64::max);
    let kda = field_rows.iter().filter_map(|r| r.kda_residual).fold(0.0, f64::max);
    let report =
        FlowReport { command: "flow", times, pairs, field_rows, max_flow_envelope_gap: gap, max_kda_residual: kda };
    Ok(CommandOutput {
        report: Artifact { name: format!("{}_flow.json", cfg.outputs.prefix), bytes: json_bytes(&report) },
        files: Vec::new(),
    })
}

#[derive(Debug, Serialize)]
struct AlphaSummary {
    alpha: f64,
    /// Offset `t` with `alpha = -e^{-2t}`.
    t: f64,
    classification: RegularityReport,
    layer: LayerSummary,
}

#[derive(Debug, Serialize)]
struct TraceSummary {
    seed: [f64; 2],
    family: crate::weingarten::Family,
    points: usize,
    stop: TraceStop,
    max_defect: f64,
}

#[derive(Debug, Serialize)]
struct WeingartenReport {
    command: &'static str,
    map: &'static str,
    samples: usize,
    dropped_rho_max: Vec<usize>,
    alphas: Vec<AlphaSummary>,
    bounds: BoundsReport,
    trajectories: Vec<TraceSummary>,
    trajectories_csv: Option<String>,
}

/// Weingarten meshes per `alpha`, classification, univalence bounds and
/// traced curvature lines of the configured map.
pub fn cmd_weingarten(cfg: &Config) -> Result<CommandOutput, CliError> {
    let map = cfg.map_spec().map_err(cfg_err)?.ok_or_else(|| CliError::Config("weingarten needs a map".into()))?;
    let (field, fg) = field_grid(cfg)?;
    let chart = map_chart();
    let samples: Vec<Complex64> =
        fg.grid.sphere_points().iter().map(|p| chart.to_chart(p)).collect::<Result<_, _>>()?;
    let alphas = if cfg.alpha.is_empty() { vec![-1.0] } else { cfg.alpha.clone() };
    let prefix = &cfg.outputs.prefix;
    let mut files = Vec::new();
    let mut summaries = Vec::new();
    for (i, &alpha) in alphas.iter().enumerate() {
        // adding 0.0 turns -0 into 0 for alpha = -1
        let t = -0.5 * alpha.abs().ln() + 0.0;
        let classification = regularity_classify(&map, &samples, alpha)?;
        let layer = surface_layers(&field, &fg.grid, &[t])?.remove(0);
        let layer = layer_files(prefix, &format!("alpha{i}"), &layer, &mut files);
        summaries.push(AlphaSummary { alpha, t, classification, layer });
    }
    let domain = DomainSpec::planar(chart, map.domain().clone());
    let bounds = univalence_bounds(&map, &domain, &samples)?;
    let mut trajectories = Vec::new();
    let mut csv_rows = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    csv_rows.write_record(["seed", "family", "step", "re", "im"]).map_err(io)?;
    for (k, seed) in cfg.trajectory_seeds().iter().enumerate() {
        let tr = curvature_line_trace(&map, seed)?;
        let fam = match seed.family {
            crate::weingarten::Family::Plus => "plus",
            crate::weingarten::Family::Minus => "minus",
        };
        for (i, z) in tr.points.iter().enumerate() {
            csv_rows
                .write_record([
                    k.to_string(),
                    fam.to_string(),
                    i.to_string(),
                    format!("{:.16e}", z.re),
                    format!("{:.16e}", z.im),
                ])
                .map_err(io)?;
        }
        trajectories.push(TraceSummary {
            seed: [seed.z0.re, seed.z0.im],
            family: seed.family,
            points: tr.points.len(),
            stop: tr.stop,
            max_defect: tr.max_defect,
        });
    }
    let trajectories_csv = if trajectories.is_empty() {
        None
    } else {
        let name = format!("{prefix}_trajectories.csv");
        files.push(Artifact {
            name: name.clone(),
            bytes: csv_rows.into_inner().map_err(|e| io(e.into_error().into()))?,
        });
        Some(name)
    };
    let report = WeingartenReport {
        command: "weingarten",
        map: map.name(),
        samples: samples.len(),
        dropped_rho_max: fg.dropped,
        alphas: summaries,
        bounds,
        trajectories,
        trajectories_csv,
    };
    Ok(CommandOutput {
        report: Artifact { name: format!("{prefix}_weingarten.json"), bytes: json_bytes(&report) },
        files,
    })
}

/// Runs the verification suites; the report is returned even when checks
/// fail, so the caller can write it before exiting with code 3.
pub fn cmd_verify(
    suite: Option<&str>,
    tolerances: &Tolerances,
    prefix: &str,
) -> Result<(CommandOutput, VerifyReport), CliError> {
    let report = run_verify(suite, tolerances).map_err(cfg_err)?;
    let out = CommandOutput {
        report: Artifact { name: format!("{prefix}_verify.json"), bytes: json_bytes(&report) },
        files: Vec::new(),
    };
    Ok((out, report))
}

/// Focal flags of a surface layer against the focal times of the
/// unshifted curvatures, per vertex; returns the number of disagreements.
pub fn focal_flag_mismatches(
    field: &RhoField,
    thetas: &[SpherePoint],
    layer: &SurfaceLayer,
) -> Result<usize, GeomError> {
    let opts = EnvelopeOptions::default();
    let mut bad = 0;
    for (theta, &flag) in thetas.iter().zip(&layer.focal) {
        let s = shape_operator(theta, &field.eval_jet(theta)?, &opts)?;
        let predicted = focal_times(s.k1, s.k2).iter().any(|f| (f.t - layer.offset).abs() <= 1e-9 * (1.0 + f.t.abs()));
        if predicted != flag {
            bad += 1;
        }
    }
    Ok(bad)
}
