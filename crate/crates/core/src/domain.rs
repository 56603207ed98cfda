//! Domains on the sphere: membership, boundary polylines in a chart, and
//! Euclidean boundary distance in the chart parameter.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{GeomError, Result};
use crate::hyperbolic::{chart_at, ChartFrame, SpherePoint};

/// Extent used when truncating unbounded boundary lines to polylines.
pub const LINE_EXTENT: f64 = 1.0e3;

/// Planar domains in a chart parameter `z`, with exact boundary distance.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanarDomain {
    Disk {
        center: Complex64,
        radius: f64,
    },
    /// `|z - center| > radius`.
    Exterior {
        center: Complex64,
        radius: f64,
    },
    /// `Re(conj(normal) z) < offset`, `normal` unit.
    HalfPlane {
        normal: Complex64,
        offset: f64,
    },
    Annulus {
        center: Complex64,
        inner: f64,
        outer: f64,
    },
    /// `0 < arg z < opening`, `opening <= 2 pi`.
    Sector {
        opening: f64,
    },
    /// `0 < Im z < width`.
    Strip {
        width: f64,
    },
    /// The plane minus the ray `(-inf, tip]`.
    SlitPlane {
        tip: f64,
    },
}

fn arg_0_2pi(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

fn ray_distance(z: Complex64, origin: Complex64, dir: Complex64) -> f64 {
    let t = ((z - origin) * dir.conj()).re.max(0.0);
    (z - origin - dir * t).norm()
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = (((z - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (z - a - d * t).norm()
}

fn circle(center: Complex64, radius: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / n as f64)).collect()
}

/// Closed polyline tracing a segment out and back.
fn segment_loop(a: Complex64, b: Complex64, n: usize) -> Vec<Complex64> {
    let fwd: Vec<Complex64> = (0..=n).map(|k| a + (b - a) * (k as f64 / n as f64)).collect();
    let back = fwd.iter().rev().skip(1).take(n - 1).copied();
    fwd.iter().copied().chain(back).collect()
}

impl PlanarDomain {
    pub fn contains(&self, z: Complex64) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        match *self {
            PlanarDomain::Disk { center, radius } => (z - center).norm() < radius,
            PlanarDomain::Exterior { center, radius } => (z - center).norm() > radius,
            PlanarDomain::HalfPlane { normal, offset } => (normal.conj() * z).re < offset,
            PlanarDomain::Annulus { center, inner, outer } => {
                let r = (z - center).norm();
                r > inner && r < outer
            }
            PlanarDomain::Sector { opening } => {
                let a = arg_0_2pi(z);
                z.norm() > 0.0 && a > 0.0 && a < opening
            }
            PlanarDomain::Strip { width } => z.im > 0.0 && z.im < width,
            PlanarDomain::SlitPlane { tip } => !(z.im == 0.0 && z.re <= tip),
        }
    }

    /// Exact Euclidean distance to the boundary, for interior `z`.
    pub fn distance(&self, z: Complex64) -> f64 {
        match *self {
            PlanarDomain::Disk { center, radius } => radius - (z - center).norm(),
            PlanarDomain::Exterior { center, radius } => (z - center).norm() - radius,
            PlanarDomain::HalfPlane { normal, offset } => offset - (normal.conj() * z).re,
            PlanarDomain::Annulus { center, inner, outer } => {
                let r = (z - center).norm();
                (r - inner).min(outer - r)
            }
            PlanarDomain::Sector { opening } => {
                let zero = Complex64::new(0.0, 0.0);
                ray_distance(z, zero, Complex64::new(1.0, 0.0)).min(ray_distance(
                    z,
                    zero,
                    Complex64::from_polar(1.0, opening),
                ))
            }
            PlanarDomain::Strip { width } => z.im.min(width - z.im),
            PlanarDomain::SlitPlane { tip } => ray_distance(z, Complex64::new(tip, 0.0), Complex64::new(-1.0, 0.0)),
        }
    }

    /// Closed boundary polylines, one per boundary component, with `n`
    /// vertices per component. Unbounded lines are truncated at
    /// [`LINE_EXTENT`].
    pub fn boundary_polylines(&self, n: usize) -> Vec<Vec<Complex64>> {
        let n = n.max(8);
        let r = LINE_EXTENT;
        match *self {
            PlanarDomain::Disk { center, radius } | PlanarDomain::Exterior { center, radius } => {
                vec![circle(center, radius, n)]
            }
            PlanarDomain::HalfPlane { normal, offset } => {
                let foot = normal * offset;
                let along = normal * Complex64::i();
                vec![segment_loop(foot - along * r, foot + along * r, n)]
            }
            PlanarDomain::Annulus { center, inner, outer } => vec![circle(center, inner, n), circle(center, outer, n)],
            PlanarDomain::Sector { opening } => {
                let a = Complex64::from_polar(r, opening);
                let b = Complex64::new(r, 0.0);
                let half = n / 2;
                let mut p: Vec<Complex64> = (0..=half).map(|k| a * (1.0 - k as f64 / half as f64)).collect();
                p.extend((1..half).map(|k| b * (k as f64 / half as f64)));
                p.push(b);
                vec![p]
            }
            PlanarDomain::Strip { width } => vec![
                segment_loop(Complex64::new(-r, 0.0), Complex64::new(r, 0.0), n),
                segment_loop(Complex64::new(-r, width), Complex64::new(r, width), n),
            ],
            PlanarDomain::SlitPlane { tip } => {
                vec![segment_loop(Complex64::new(tip - r, 0.0), Complex64::new(tip, 0.0), n)]
            }
        }
    }

    /// For each boundary component, whether the complementary component that
    /// contains the domain is a simply connected plane region.
    pub fn simply_connected_sides(&self) -> Vec<bool> {
        match self {
            PlanarDomain::Exterior { .. } => vec![false],
            PlanarDomain::Annulus { .. } => vec![false, true],
            PlanarDomain::Strip { .. } => vec![true, true],
            _ => vec![true],
        }
    }
}

/// Membership rule of a [`DomainSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Whole,
    /// Open spherical cap of angular radius `radius` about the chart center.
    Cap {
        radius: f64,
    },
    /// The sphere minus finitely many points.
    Punctured {
        points: Vec<SpherePoint>,
    },
    /// A planar domain in the chart parameter.
    Planar(PlanarDomain),
    /// Even-odd rule against the boundary polylines in the chart.
    Polygons,
}

/// A domain `Omega` of the sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    chart: ChartFrame,
    region: Region,
    boundary: Vec<Vec<Complex64>>,
    simply_connected_sides: Vec<bool>,
}

pub const BOUNDARY_SAMPLES: usize = 4096;

impl DomainSpec {
    pub fn whole() -> Self {
        Self {
            chart: chart_at(&SpherePoint::south()),
            region: Region::Whole,
            boundary: Vec::new(),
            simply_connected_sides: Vec::new(),
        }
    }

    /// Open cap `{X : angle(X, center) < radius}`.
    pub fn cap(center: &SpherePoint, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < PI) {
            return Err(GeomError::InvalidInput(format!("cap radius {radius} not in (0, pi)")));
        }
        let rz = 2.0 * (0.5 * radius).tan();
        Ok(Self {
            chart: chart_at(center),
            region: Region::Cap { radius },
            boundary: vec![circle(Complex64::new(0.0, 0.0), rz, BOUNDARY_SAMPLES)],
            simply_connected_sides: vec![true],
        })
    }

    pub fn punctured(points: Vec<SpherePoint>) -> Result<Self> {
        let first = points.first().ok_or(GeomError::EmptySamples)?;
        // chart centered away from every puncture
        let c = first.coords();
        let perp = if c.x.abs() < 0.9 { nalgebra::Vector3::x() } else { nalgebra::Vector3::y() };
        let center = SpherePoint::new(c.cross(&perp))?;
        let chart = chart_at(&center);
        let boundary = points.iter().map(|p| chart.to_chart(p).map(|z| vec![z])).collect::<Result<Vec<_>>>()?;
        let flags = vec![false; points.len()];
        Ok(Self { chart, region: Region::Punctured { points }, boundary, simply_connected_sides: flags })
    }

    pub fn planar(chart: ChartFrame, domain: PlanarDomain) -> Self {
        let boundary = domain.boundary_polylines(BOUNDARY_SAMPLES);
        let flags = domain.simply_connected_sides();
        Self { chart, region: Region::Planar(domain), boundary, simply_connected_sides: flags }
    }

    /// A domain bounded by closed polylines given on the sphere; membership
    /// is the even-odd rule in `chart`.
    pub fn from_polylines(chart: ChartFrame, polylines: &[Vec<SpherePoint>], flags: Vec<bool>) -> Result<Self> {
        if polylines.is_empty() {
            return Err(GeomError::EmptySamples);
        }
        if flags.len() != polylines.len() {
            return Err(GeomError::InvalidInput("one flag per boundary component".into()));
        }
        let boundary = polylines
            .iter()
            .map(|pl| pl.iter().map(|p| chart.to_chart(p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(|_| GeomError::ChartMismatch("boundary passes through the chart pole".into()))?;
        Ok(Self { chart, region: Region::Polygons, boundary, simply_connected_sides: flags })
    }

    /// Reads closed boundary polylines from CSV rows
    /// `component_id,x,y,z`; rows of a component are in polyline order.
    pub fn from_csv(path: &Path, chart: ChartFrame) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            component_id: usize,
            x: f64,
            y: f64,
            z: f64,
        }
        let mut rdr = csv::Reader::from_path(path).map_err(|e| GeomError::InvalidInput(e.to_string()))?;
        let mut comps: Vec<(usize, Vec<SpherePoint>)> = Vec::new();
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| GeomError::InvalidInput(e.to_string()))?;
            let p = SpherePoint::from_xyz(row.x, row.y, row.z)?;
            match comps.iter_mut().find(|(id, _)| *id == row.component_id) {
                Some((_, v)) => v.push(p),
                None => comps.push((row.component_id, vec![p])),
            }
        }
        comps.sort_by_key(|(id, _)| *id);
        let polylines: Vec<Vec<SpherePoint>> = comps.into_iter().map(|(_, v)| v).collect();
        let flags = vec![true; polylines.len()];
        Self::from_polylines(chart, &polylines, flags)
    }

    pub fn chart(&self) -> &ChartFrame {
        &self.chart
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn boundary(&self) -> &[Vec<Complex64>] {
        &self.boundary
    }

    pub fn simply_connected_sides(&self) -> &[bool] {
        &self.simply_connected_sides
    }

    pub fn planar_domain(&self) -> Option<&PlanarDomain> {
        match &self.region {
            Region::Planar(d) => Some(d),
            _ => None,
        }
    }

    fn even_odd(&self, z: Complex64) -> bool {
        let mut inside = false;
        for pl in &self.boundary {
            let n = pl.len();
            for i in 0..n {
                let (a, b) = (pl[i], pl[(i + 1) % n]);
                if (a.im > z.im) != (b.im > z.im) {
                    let x = a.re + (z.im - a.im) * (b.re - a.re) / (b.im - a.im);
                    if z.re < x {
                        inside = !inside;
                    }
                }
            }
        }
        inside
    }

    pub fn contains(&self, p: &SpherePoint) -> bool {
        match &self.region {
            Region::Whole => true,
            Region::Cap { radius } => self.chart.center().angle_to(p) < *radius,
            Region::Punctured { points } => points.iter().all(|q| q.angle_to(p) > 0.0),
            Region::Planar(d) => self.chart.to_chart(p).map(|z| d.contains(z)).unwrap_or(false),
            Region::Polygons => self.chart.to_chart(p).map(|z| self.even_odd(z)).unwrap_or(false),
        }
    }

    /// Distance from `p` to the boundary used for the evaluation inset:
    /// in the chart at `p` for spherical regions, in the domain chart for
    /// planar and polygonal ones.
    pub fn inset_distance(&self, p: &SpherePoint) -> Result<f64> {
        let chord = |angle: f64| 2.0 * (0.5 * angle).tan();
        match &self.region {
            Region::Whole => Ok(f64::INFINITY),
            Region::Cap { radius } => Ok(chord((radius - self.chart.center().angle_to(p)).max(0.0))),
            Region::Punctured { points } => {
                Ok(chord(points.iter().map(|q| q.angle_to(p)).fold(f64::INFINITY, f64::min)))
            }
            Region::Planar(d) => {
                let z = self.chart.to_chart(p)?;
                Ok(if d.contains(z) { d.distance(z) } else { 0.0 })
            }
            Region::Polygons => {
                let z = self.chart.to_chart(p)?;
                Ok(self.boundary_distance(&self.chart, z)?.0)
            }
        }
    }

    /// `delta(z, boundary)`: minimum point-to-segment distance over the
    /// boundary polylines, and the per-component minima. `chart` must be the
    /// domain's chart.
    pub fn boundary_distance(&self, chart: &ChartFrame, z: Complex64) -> Result<(f64, Vec<f64>)> {
        if chart != &self.chart {
            return Err(GeomError::ChartMismatch("query chart differs from the domain chart".into()));
        }
        if self.boundary.is_empty() {
            return Err(GeomError::EmptySamples);
        }
        let per: Vec<f64> = self
            .boundary
            .iter()
            .map(|pl| {
                let n = pl.len();
                (0..n).map(|i| segment_distance(z, pl[i], pl[(i + 1) % n])).fold(f64::INFINITY, f64::min)
            })
            .collect();
        let min = per.iter().copied().fold(f64::INFINITY, f64::min);
        Ok((min, per))
    }

    /// Boundary polylines mapped back to the sphere.
    pub fn boundary_on_sphere(&self) -> Vec<Vec<SpherePoint>> {
        self.boundary.iter().map(|pl| pl.iter().map(|&z| self.chart.from_chart(z)).collect()).collect()
    }
}
