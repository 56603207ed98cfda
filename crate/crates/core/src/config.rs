//! JSON run configuration and the tolerance table.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::conformal::ConformalMapSpec;
use crate::error::GeomError;
use crate::fields::RhoField;
use crate::grid::{SampleGrid, DEFAULT_RHO_MAX};
use crate::hyperbolic::{ChartFrame, SpherePoint};
use crate::weingarten::{Family, TrajectorySeed, DEFAULT_TRACE_STEP};

/// Default tolerance of every named invariant.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("horosphere_tangency", 1e-12),
    ("geodesic_unit_speed", 1e-8),
    ("chart_conformality", 1e-7),
    ("distance_convexity", 1e-6),
    ("offset_commutation", 0.0),
    ("difference_jet", 1e-7),
    ("metric_equation", 1e-8),
    ("distance_estimate", 1e-12),
    ("sphere_curvature", 1e-8),
    ("sphere_radius", 1e-10),
    ("envelope_condition", 1e-8),
    ("tangent_plane", 1e-6),
    ("gauss_map", 1e-9),
    ("asymptotic_metric", 1e-6),
    ("curvature_form", 1e-8),
    ("unit_normal_flow", 1e-9),
    ("catalog_curvature", 1e-8),
    ("catalog_k_infinity", 1e-10),
    ("flow_closure", 1e-8),
    ("curvature_ode", 1e-6),
    ("focal_bracket", 1e-10),
    ("convexity_preservation", 1e-12),
    ("k2g_invariance", 1e-9),
    ("gauss_sign_rule", 0.0),
    ("schwarzian_cocycle", 1e-9),
    ("weingarten_curvatures", 1e-6),
    ("weingarten_relation", 1e-7),
    ("kraus_equality", 1e-9),
    ("schwarzian_distance", 1e-9),
    ("regularity_classes", 0.0),
    ("trajectory_orthogonality", 1e-12),
    ("trajectory_defect", 1e-6),
    ("trajectory_fit", 1e-4),
    ("principal_directions", 1e-5),
    ("obj_round_trip", 0.0),
    ("determinism", 0.0),
    ("focal_flags", 0.0),
];

/// Per-invariant tolerances: defaults, then config overrides, then an
/// optional global override.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
    global: Option<f64>,
}

impl Tolerances {
    pub fn new(overrides: BTreeMap<String, f64>) -> Result<Self, String> {
        for (k, v) in &overrides {
            if !DEFAULT_TOLERANCES.iter().any(|(n, _)| n == k) {
                return Err(format!("unknown tolerance '{k}'"));
            }
            if !(v.is_finite() && *v >= 0.0) {
                return Err(format!("tolerance '{k}' must be finite and >= 0"));
            }
        }
        Ok(Self { overrides, global: None })
    }

    pub fn with_global(mut self, tol: Option<f64>) -> Self {
        self.global = tol;
        self
    }

    pub fn get(&self, name: &str) -> f64 {
        if let Some(g) = self.global {
            return g;
        }
        if let Some(v) = self.overrides.get(name) {
            return *v;
        }
        DEFAULT_TOLERANCES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| panic!("no default tolerance for '{name}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldConfig {
    Constant {
        c: f64,
    },
    GeodesicPlane {
        normal: [f64; 3],
    },
    Horosphere {
        tangency: [f64; 3],
        #[serde(default)]
        t: f64,
    },
    Geodesic {
        axis: [f64; 3],
    },
    /// The field of the configured map.
    Conformal,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    Identity,
    Mobius { a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2] },
    Koebe,
    KoebeFunction,
    Power { p: f64 },
    Strip { width: f64 },
    Annulus { inner: f64, outer: f64 },
    Polynomial { coeffs: Vec<[f64; 2]>, radius: f64 },
}

fn default_rho_max() -> f64 {
    DEFAULT_RHO_MAX
}

/// Geodesic-polar grid about `center` (a point of the sphere) or
/// `center_w` (a coordinate of the map chart).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default)]
    pub center: Option<[f64; 3]>,
    #[serde(default)]
    pub center_w: Option<[f64; 2]>,
    pub angle: f64,
    pub rings: usize,
    pub sectors: usize,
    #[serde(default = "default_rho_max")]
    pub rho_max: f64,
    #[serde(default)]
    pub inset: Option<f64>,
}

fn default_step() -> f64 {
    DEFAULT_TRACE_STEP
}

fn default_max_steps() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    pub z: [f64; 2],
    pub family: FamilyConfig,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyConfig {
    Plus,
    Minus,
}

fn default_prefix() -> String {
    "horosurf".to_string()
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory, relative to the config file.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, prefix: default_prefix() }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub field: Option<FieldConfig>,
    #[serde(default)]
    pub map: Option<MapConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    /// Offsets `t` of the parallel surfaces; the time grid for `flow`.
    #[serde(default)]
    pub offsets: Vec<f64>,
    #[serde(default)]
    pub alpha: Vec<f64>,
    #[serde(default)]
    pub seeds: Vec<SeedConfig>,
    /// Principal curvature pairs for `flow`.
    #[serde(default)]
    pub curvatures: Vec<[f64; 2]>,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Directory of the config file, for resolving relative paths.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn point(v: [f64; 3], what: &str) -> Result<SpherePoint, String> {
    SpherePoint::from_xyz(v[0], v[1], v[2]).map_err(|e| format!("{what}: {e}"))
}

fn cz(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

/// The chart in which map coordinates are read.
pub fn map_chart() -> ChartFrame {
    ChartFrame::new(&SpherePoint::south())
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, String> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg = Self::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), String> {
        Tolerances::new(self.tolerances.clone())?;
        if let Some(g) = &self.grid {
            if g.center.is_some() && g.center_w.is_some() {
                return Err("grid: give either center or center_w".into());
            }
            if !(g.rho_max.is_finite()) {
                return Err("grid: rho_max must be finite".into());
            }
            if g.inset.is_some_and(|i| !(i >= 0.0)) {
                return Err("grid: inset must be >= 0".into());
            }
        }
        if self.offsets.iter().chain(&self.alpha).any(|v| !v.is_finite()) {
            return Err("offsets and alpha must be finite".into());
        }
        if let Some(a) = self.alpha.iter().find(|&&a| !(a < 0.0)) {
            return Err(format!("alpha {a} must be negative"));
        }
        if self.seeds.iter().any(|s| !(s.step > 0.0)) {
            return Err("seed step must be positive".into());
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances::new(self.tolerances.clone()).expect("validated on load")
    }

    pub fn output_dir(&self) -> Option<PathBuf> {
        self.outputs.dir.as_ref().map(|d| if d.is_absolute() { d.clone() } else { self.base_dir.join(d) })
    }

    pub fn map_spec(&self) -> Result<Option<ConformalMapSpec>, String> {
        let Some(m) = &self.map else { return Ok(None) };
        let err = |e: GeomError| format!("map: {e}");
        let spec = match m {
            MapConfig::Identity => ConformalMapSpec::identity(),
            MapConfig::Mobius { a, b, c, d } => {
                ConformalMapSpec::mobius(cz(*a), cz(*b), cz(*c), cz(*d)).map_err(err)?
            }
            MapConfig::Koebe => ConformalMapSpec::koebe(),
            MapConfig::KoebeFunction => ConformalMapSpec::koebe_function(),
            MapConfig::Power { p } => ConformalMapSpec::power(*p).map_err(err)?,
            MapConfig::Strip { width } => ConformalMapSpec::strip(*width).map_err(err)?,
            MapConfig::Annulus { inner, outer } => ConformalMapSpec::annulus(*inner, *outer).map_err(err)?,
            MapConfig::Polynomial { coeffs, radius } => {
                ConformalMapSpec::polynomial(coeffs.iter().map(|&c| cz(c)).collect(), *radius).map_err(err)?
            }
        };
        Ok(Some(spec))
    }

    /// The configured field, or the field of the map when no field is given.
    pub fn field(&self) -> Result<RhoField, String> {
        let map_field = || -> Result<RhoField, String> {
            let map = self.map_spec()?.ok_or("field 'conformal' needs a map")?;
            RhoField::conformal(map, map_chart()).map_err(|e| format!("map: {e}"))
        };
        let f = match &self.field {
            None if self.map.is_some() => map_field()?,
            None => return Err("config needs a field or a map".into()),
            Some(FieldConfig::Constant { c }) => RhoField::constant(*c),
            Some(FieldConfig::GeodesicPlane { normal }) => RhoField::geodesic_plane(point(*normal, "normal")?),
            Some(FieldConfig::Horosphere { tangency, t }) => RhoField::horosphere(point(*tangency, "tangency")?, *t),
            Some(FieldConfig::Geodesic { axis }) => RhoField::geodesic(point(*axis, "axis")?),
            Some(FieldConfig::Conformal) => map_field()?,
        };
        Ok(match self.grid.as_ref().and_then(|g| g.inset) {
            Some(i) => f.with_inset(i),
            None => f,
        })
    }

    pub fn sample_grid(&self) -> Result<SampleGrid, String> {
        let g = self.grid.as_ref().ok_or("config needs a grid")?;
        let center = match (g.center, g.center_w) {
            (Some(c), None) => point(c, "grid center")?,
            (None, Some(w)) => map_chart().from_chart(cz(w)),
            _ => SpherePoint::south(),
        };
        SampleGrid::geodesic_polar(&center, g.angle, g.rings, g.sectors).map_err(|e| format!("grid: {e}"))
    }

    pub fn rho_max(&self) -> f64 {
        self.grid.as_ref().map(|g| g.rho_max).unwrap_or(DEFAULT_RHO_MAX)
    }

    pub fn trajectory_seeds(&self) -> Vec<TrajectorySeed> {
        self.seeds
            .iter()
            .map(|s| TrajectorySeed {
                z0: cz(s.z),
                family: match s.family {
                    FamilyConfig::Plus => Family::Plus,
                    FamilyConfig::Minus => Family::Minus,
                },
                step: s.step,
                max_steps: s.max_steps,
            })
            .collect()
    }
}
