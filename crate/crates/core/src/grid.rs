//! Geodesic-polar sample grids on the sphere at infinity.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{GeomError, Result};
use crate::fields::RhoField;
use crate::hyperbolic::{chart_at, ChartFrame, SpherePoint};

/// Samples with `rho` above this are dropped: large `rho` means the
/// boundary of the domain is near.
pub const DEFAULT_RHO_MAX: f64 = 12.0;

/// Chart points with a triangulation; every point lies at least `inset`
/// inside the domain it was filtered against.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub chart: ChartFrame,
    pub points: Vec<Complex64>,
    pub triangles: Vec<[usize; 3]>,
    pub inset: f64,
}

impl SampleGrid {
    /// Rings of constant spherical distance from `center` up to `angle`,
    /// `sectors` points per ring, plus the center. Point 0 is the center
    /// and ring `i` starts at `1 + (i - 1) sectors`.
    pub fn geodesic_polar(center: &SpherePoint, angle: f64, rings: usize, sectors: usize) -> Result<Self> {
        if !(angle > 0.0 && angle < std::f64::consts::PI) {
            return Err(GeomError::InvalidInput(format!("grid angle {angle} must lie in (0, pi)")));
        }
        if rings == 0 || sectors < 3 {
            return Err(GeomError::InvalidInput("grid needs at least one ring and three sectors".into()));
        }
        let chart = chart_at(center);
        let mut points = vec![Complex64::new(0.0, 0.0)];
        for i in 1..=rings {
            let r = 2.0 * (0.5 * angle * i as f64 / rings as f64).tan();
            for j in 0..sectors {
                points.push(Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / sectors as f64));
            }
        }
        let idx = |ring: usize, j: usize| 1 + (ring - 1) * sectors + j % sectors;
        let mut triangles = Vec::with_capacity(sectors * (2 * rings - 1));
        for j in 0..sectors {
            triangles.push([0, idx(1, j), idx(1, j + 1)]);
        }
        for ring in 1..rings {
            for j in 0..sectors {
                let (a, b) = (idx(ring, j), idx(ring, j + 1));
                let (c, d) = (idx(ring + 1, j), idx(ring + 1, j + 1));
                triangles.push([a, c, d]);
                triangles.push([a, d, b]);
            }
        }
        Ok(Self { chart, points, triangles, inset: 0.0 })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn sphere_points(&self) -> Vec<SpherePoint> {
        self.points.iter().map(|&z| self.chart.from_chart(z)).collect()
    }

    /// Keeps the flagged points, dropping triangles that lose a vertex.
    /// Returns the new grid and the original index of each kept point.
    pub fn retain(&self, keep: &[bool]) -> (Self, Vec<usize>) {
        let mut map = vec![usize::MAX; self.points.len()];
        let mut kept = Vec::new();
        for (i, _) in keep.iter().enumerate().filter(|(_, &k)| k) {
            map[i] = kept.len();
            kept.push(i);
        }
        let triangles = self
            .triangles
            .iter()
            .filter(|t| t.iter().all(|&v| map[v] != usize::MAX))
            .map(|t| [map[t[0]], map[t[1]], map[t[2]]])
            .collect();
        let points = kept.iter().map(|&i| self.points[i]).collect();
        (Self { chart: self.chart, points, triangles, inset: self.inset }, kept)
    }

    /// Indices in range and positive chart area for every triangle.
    pub fn is_valid(&self) -> bool {
        self.triangles.iter().all(|t| {
            t.iter().all(|&v| v < self.points.len()) && {
                let (a, b, c) = (self.points[t[0]], self.points[t[1]], self.points[t[2]]);
                ((b - a).conj() * (c - a)).im.abs() > 0.0
            }
        })
    }
}

/// Outcome of filtering a grid against a field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub grid: SampleGrid,
    /// Original indices of the kept points.
    pub kept: Vec<usize>,
    /// Original indices dropped for `rho > rho_max`.
    pub dropped: Vec<usize>,
}

/// Drops points where the field exceeds `rho_max`. Points outside the
/// domain, or closer to its boundary than the field inset, are an error
/// that lists their indices.
pub fn filter_by_field(grid: &SampleGrid, field: &RhoField, rho_max: f64) -> Result<FieldGrid> {
    let values: Vec<Result<f64>> = grid.sphere_points().par_iter().map(|p| field.eval_jet(p).map(|j| j.rho)).collect();
    let mut bad = Vec::new();
    let mut keep = Vec::with_capacity(values.len());
    let mut dropped = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match v {
            Ok(rho) => {
                keep.push(*rho <= rho_max);
                if *rho > rho_max {
                    dropped.push(i);
                }
            }
            Err(GeomError::RhoOutOfRange { .. }) => {
                keep.push(false);
                dropped.push(i);
            }
            Err(_) => {
                keep.push(false);
                bad.push(i);
            }
        }
    }
    if !bad.is_empty() {
        let shown: Vec<String> = bad.iter().take(20).map(|i| i.to_string()).collect();
        let more = if bad.len() > 20 { format!(" and {} more", bad.len() - 20) } else { String::new() };
        return Err(GeomError::InvalidInput(format!(
            "{} grid points outside the field domain or inset: {}{more}",
            bad.len(),
            shown.join(", ")
        )));
    }
    let (mut g, kept) = grid.retain(&keep);
    g.inset = field.inset();
    Ok(FieldGrid { grid: g, kept, dropped })
}
