//! Scalar fields `rho` on domains of the sphere and their second-order jets
//! at chart centers.
//!
//! A field is evaluated at `p` in the chart `chart_at(p)`, where `gamma = 1`
//! at the origin, so `|D rho|^2 = rho_x^2 + rho_y^2` and the spherical
//! Laplacian is `rho_xx + rho_yy` there.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::conformal::ConformalMapSpec;
use crate::domain::DomainSpec;
use crate::error::{GeomError, Result};
use crate::hyperbolic::{chart_at, check_rho, ChartFrame, SpherePoint};
use crate::jet::Jet2;

pub const DEFAULT_INSET: f64 = 1e-6;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Value, chart gradient and chart Hessian `(xx, xy, yy)` of `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoJet {
    pub rho: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
}

impl RhoJet {
    pub fn from_jet(j: &Jet2) -> Self {
        Self { rho: j.v, grad: [j.x, j.y], hess: [j.xx, j.xy, j.yy] }
    }

    pub fn constant(c: f64) -> Self {
        Self { rho: c, grad: [0.0; 2], hess: [0.0; 3] }
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grad[0] * self.grad[0] + self.grad[1] * self.grad[1]
    }

    pub fn laplacian(&self) -> f64 {
        self.hess[0] + self.hess[2]
    }

    /// The jet of `rho + t`.
    pub fn shifted(&self, t: f64) -> Self {
        Self { rho: self.rho + t, ..*self }
    }
}

pub type ScalarFn = Arc<dyn Fn(&SpherePoint) -> f64 + Send + Sync>;

/// Generating-function variants.
#[derive(Clone)]
pub enum FieldKind {
    Constant(f64),
    /// `-log(n . X)`: the geodesic plane through the origin orthogonal to `n`.
    GeodesicPlane {
        normal: SpherePoint,
    },
    /// `-log(1 - q . X)`: the horosphere tangent at `q`.
    Horosphere {
        tangency: SpherePoint,
    },
    /// `-log(1 - (a . X)^2)/2`: the geodesic through the origin with ends `+-a`.
    Geodesic {
        axis: SpherePoint,
    },
    /// Pull-back of the Poincaré metric by a conformal map whose parameter is
    /// the coordinate of `chart`.
    Conformal {
        map: ConformalMapSpec,
        chart: ChartFrame,
    },
    /// Arbitrary callable; jets by centered differences with step `h`.
    Tabulated {
        f: ScalarFn,
        h: f64,
    },
}

impl fmt::Debug for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Constant(c) => write!(f, "Constant({c})"),
            FieldKind::GeodesicPlane { normal } => write!(f, "GeodesicPlane({normal:?})"),
            FieldKind::Horosphere { tangency } => write!(f, "Horosphere({tangency:?})"),
            FieldKind::Geodesic { axis } => write!(f, "Geodesic({axis:?})"),
            FieldKind::Conformal { map, .. } => write!(f, "Conformal({})", map.name()),
            FieldKind::Tabulated { h, .. } => write!(f, "Tabulated(h = {h})"),
        }
    }
}

/// A field `rho + offset` on a domain.
#[derive(Debug, Clone)]
pub struct RhoField {
    kind: FieldKind,
    domain: DomainSpec,
    offset: f64,
    inset: f64,
}

impl RhoField {
    fn new(kind: FieldKind, domain: DomainSpec) -> Self {
        Self { kind, domain, offset: 0.0, inset: DEFAULT_INSET }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(FieldKind::Constant(c), DomainSpec::whole())
    }

    pub fn geodesic_plane(normal: SpherePoint) -> Self {
        let domain = DomainSpec::cap(&normal, std::f64::consts::FRAC_PI_2).expect("hemisphere");
        Self::new(FieldKind::GeodesicPlane { normal }, domain)
    }

    pub fn horosphere(tangency: SpherePoint, t: f64) -> Self {
        let domain = DomainSpec::punctured(vec![tangency]).expect("one puncture");
        Self::new(FieldKind::Horosphere { tangency }, domain).with_offset(t)
    }

    pub fn geodesic(axis: SpherePoint) -> Self {
        let domain = DomainSpec::punctured(vec![axis, axis.antipode()]).expect("two punctures");
        Self::new(FieldKind::Geodesic { axis }, domain)
    }

    /// Field of a conformal map whose parameter is the coordinate of `chart`.
    /// The map must send its domain into the unit disk.
    pub fn conformal(map: ConformalMapSpec, chart: ChartFrame) -> Result<Self> {
        if !map.into_disk() {
            return Err(GeomError::InvalidInput(format!("map '{}' does not land in the unit disk", map.name())));
        }
        let domain = DomainSpec::planar(chart, map.domain().clone());
        Ok(Self::new(FieldKind::Conformal { map, chart }, domain))
    }

    pub fn tabulated(f: ScalarFn, domain: DomainSpec, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(GeomError::InvalidInput("finite-difference step must be positive".into()));
        }
        Ok(Self::new(FieldKind::Tabulated { f, h }, domain))
    }

    /// The same field with `t` added to its offset.
    pub fn with_offset(mut self, t: f64) -> Self {
        self.offset += t;
        self
    }

    pub fn with_inset(mut self, inset: f64) -> Self {
        self.inset = inset;
        self
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn inset(&self) -> f64 {
        self.inset
    }

    pub fn map(&self) -> Option<(&ConformalMapSpec, &ChartFrame)> {
        match &self.kind {
            FieldKind::Conformal { map, chart } => Some((map, chart)),
            _ => None,
        }
    }

    fn check_point(&self, p: &SpherePoint) -> Result<()> {
        if !self.domain.contains(p) {
            return Err(GeomError::OutsideDomain);
        }
        let distance = self.domain.inset_distance(p)?;
        if distance < self.inset {
            return Err(GeomError::BoundaryInset { distance, inset: self.inset });
        }
        Ok(())
    }

    /// Value of `rho` without the offset; `None` off the natural domain.
    fn raw_value(&self, p: &SpherePoint) -> Result<f64> {
        let u = |a: &SpherePoint| a.dot(p);
        let v = match &self.kind {
            FieldKind::Constant(c) => *c,
            FieldKind::GeodesicPlane { normal } => -u(normal).ln(),
            FieldKind::Horosphere { tangency } => -(1.0 - u(tangency)).ln(),
            FieldKind::Geodesic { axis } => -0.5 * (1.0 - u(axis).powi(2)).ln(),
            FieldKind::Conformal { .. } => return Ok(self.conformal_jet(&chart_at(p))?.v),
            FieldKind::Tabulated { f, .. } => f(p),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(GeomError::OutsideDomain)
        }
    }

    /// `rho(p)` including the offset.
    pub fn value(&self, p: &SpherePoint) -> Result<f64> {
        self.check_point(p)?;
        let v = self.raw_value(p)? + self.offset;
        check_rho(v)?;
        Ok(v)
    }

    fn conformal_jet(&self, at: &ChartFrame) -> Result<Jet2> {
        let FieldKind::Conformal { map, chart } = &self.kind else {
            unreachable!("conformal_jet on a non-conformal field")
        };
        let w = chart.transition_jet(at)?;
        let h = map.eval(w.value())?;
        let fw = w.compose_holo(h.f, h.d1, h.d2);
        let dfw = w.compose_holo(h.d1, h.d2, h.d3);
        let f2 = fw.norm_sqr();
        if f2.v >= 1.0 {
            return Err(GeomError::OutsideDisk { modulus: f2.v.sqrt() });
        }
        // rho = log 2 + log|f'| - log gamma(w) - log(1 - |f|^2)
        Ok(dfw.norm_sqr().ln() * 0.5 + (w.norm_sqr() + 4.0).ln() - (-f2 + 1.0).ln() + (2.0f64.ln() - 4.0f64.ln()))
    }

    /// Jet of `rho` at `p` in `chart_at(p)`.
    pub fn eval_jet(&self, p: &SpherePoint) -> Result<RhoJet> {
        self.check_point(p)?;
        let chart = chart_at(p);
        let x = chart.embedding_jet();
        let dot = |a: &SpherePoint| {
            let c = a.coords();
            x[0] * c.x + x[1] * c.y + x[2] * c.z
        };
        let jet = match &self.kind {
            FieldKind::Constant(c) => Jet2::constant(*c),
            FieldKind::GeodesicPlane { normal } => -dot(normal).ln(),
            FieldKind::Horosphere { tangency } => -(-dot(tangency) + 1.0).ln(),
            FieldKind::Geodesic { axis } => {
                let u = dot(axis);
                (-(u * u) + 1.0).ln() * -0.5
            }
            FieldKind::Conformal { .. } => self.conformal_jet(&chart)?,
            FieldKind::Tabulated { h, .. } => self.difference_jet(&chart, *h)?,
        };
        let out = RhoJet::from_jet(&jet).shifted(self.offset);
        check_rho(out.rho)?;
        if !(out.grad.iter().chain(out.hess.iter()).all(|v| v.is_finite())) {
            return Err(GeomError::OutsideDomain);
        }
        Ok(out)
    }

    /// Centered-difference jet of `raw_value` in `chart` at its center.
    pub fn difference_jet(&self, chart: &ChartFrame, h: f64) -> Result<Jet2> {
        let f = |x: f64, y: f64| self.raw_value(&chart.from_chart(Complex64::new(x, y)));
        let f0 = f(0.0, 0.0)?;
        let (fxp, fxm, fyp, fym) = (f(h, 0.0)?, f(-h, 0.0)?, f(0.0, h)?, f(0.0, -h)?);
        let (fpp, fpm, fmp, fmm) = (f(h, h)?, f(h, -h)?, f(-h, h)?, f(-h, -h)?);
        Ok(Jet2 {
            v: f0,
            x: (fxp - fxm) / (2.0 * h),
            y: (fyp - fym) / (2.0 * h),
            xx: (fxp - 2.0 * f0 + fxm) / (h * h),
            xy: (fpp - fpm - fmp + fmm) / (4.0 * h * h),
            yy: (fyp - 2.0 * f0 + fym) / (h * h),
        })
    }

    /// The point of the sphere with parameter `w` in the domain chart.
    pub fn point_at(&self, w: Complex64) -> SpherePoint {
        self.domain.chart().from_chart(w)
    }
}

/// `K_inf = (1 - Laplacian rho) e^{-2 rho}`.
pub fn k_infinity(field: &RhoField, p: &SpherePoint) -> Result<f64> {
    let j = field.eval_jet(p)?;
    Ok(k_infinity_of(&j))
}

pub fn k_infinity_of(j: &RhoJet) -> f64 {
    (1.0 - j.laplacian()) * (-2.0 * j.rho).exp()
}

/// Density `e^{2 rho}` of the limit metric relative to the round metric.
pub fn area_density_infinity(field: &RhoField, p: &SpherePoint) -> Result<f64> {
    Ok((2.0 * field.value(p)?).exp())
}

/// `delta(z, boundary)` and its per-component minima, in `chart`.
pub fn boundary_distance(domain: &DomainSpec, chart: &ChartFrame, z: Complex64) -> Result<(f64, Vec<f64>)> {
    domain.boundary_distance(chart, z)
}
