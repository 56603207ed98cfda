//! Ball-model primitives: points, the conformal metric, distance, geodesics,
//! horospheres and stereographic charts on the sphere at infinity.
//!
//! Hyperbolic space is the open unit ball with metric
//! `4 |dx|^2 / (1 - |x|^2)^2`; its ideal boundary is the unit sphere.

use nalgebra::{Rotation3, Unit, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::jet::{CJet2, Jet2};

pub type Vec3 = Vector3<f64>;

/// Largest |rho| accepted before `e^rho` would overflow downstream.
pub const RHO_LIMIT: f64 = 700.0;

/// Hyperbolic length tolerance for unit tangent vectors.
pub const UNIT_TOL: f64 = 1e-10;

/// A point of the unit sphere, renormalized on construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct SpherePoint(Vec3);

impl SpherePoint {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(GeomError::Degenerate);
        }
        Ok(Self(v / n))
    }

    pub fn from_xyz(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vec3::new(x, y, z))
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    pub fn dot(&self, o: &SpherePoint) -> f64 {
        self.0.dot(&o.0)
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint(-self.0)
    }

    /// Great-circle distance.
    pub fn angle_to(&self, o: &SpherePoint) -> f64 {
        self.0.cross(&o.0).norm().atan2(self.0.dot(&o.0))
    }

    /// The south pole `(0, 0, -1)`, the normalized chart center.
    pub fn south() -> SpherePoint {
        SpherePoint(Vec3::new(0.0, 0.0, -1.0))
    }
}

impl TryFrom<[f64; 3]> for SpherePoint {
    type Error = GeomError;
    fn try_from(a: [f64; 3]) -> Result<Self> {
        Self::new(Vec3::new(a[0], a[1], a[2]))
    }
}

impl From<SpherePoint> for [f64; 3] {
    fn from(p: SpherePoint) -> [f64; 3] {
        [p.0.x, p.0.y, p.0.z]
    }
}

/// A point of hyperbolic space: strictly inside the unit ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallPoint(Vec3);

impl BallPoint {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n >= 1.0 {
            return Err(GeomError::OutsideBall { norm: n });
        }
        Ok(Self(v))
    }

    pub fn origin() -> Self {
        Self(Vec3::zeros())
    }

    pub fn coords(&self) -> &Vec3 {
        &self.0
    }

    /// `1 - |p|^2`, the inverse half conformal factor.
    pub fn defect(&self) -> f64 {
        1.0 - self.0.norm_squared()
    }
}

/// A tangent vector of hyperbolic space, stored in Euclidean components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: BallPoint,
    pub dir: Vec3,
}

impl TangentVector {
    pub fn new(base: BallPoint, dir: Vec3) -> Self {
        Self { base, dir }
    }

    pub fn hyperbolic_norm(&self) -> f64 {
        metric_inner(&self.base, &self.dir, &self.dir).sqrt()
    }

    /// Rescales to unit hyperbolic length.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.hyperbolic_norm();
        if !n.is_finite() || n == 0.0 {
            return Err(GeomError::Degenerate);
        }
        Ok(Self { base: self.base, dir: self.dir / n })
    }
}

/// `<u, v>_p = 4 (u . v) / (1 - |p|^2)^2`.
pub fn metric_inner(p: &BallPoint, u: &Vec3, v: &Vec3) -> f64 {
    let d = p.defect();
    4.0 * u.dot(v) / (d * d)
}

/// Hyperbolic distance.
///
/// Uses `cosh d = 1 + 2|a-b|^2 / ((1-|a|^2)(1-|b|^2))` in its half-angle form
/// `sinh(d/2) = |a-b| / sqrt((1-|a|^2)(1-|b|^2))`, which keeps precision for
/// nearby points.
pub fn distance(a: &BallPoint, b: &BallPoint) -> f64 {
    let num = (a.0 - b.0).norm();
    let den = (a.defect() * b.defect()).sqrt();
    2.0 * (num / den).asinh()
}

/// Möbius addition `p (+) x`: the ball isometry sending the origin to `p`,
/// applied to `x`. Also valid for `|x| = 1`, where it acts on the sphere.
pub fn mobius_add(p: &Vec3, x: &Vec3) -> Vec3 {
    let px = p.dot(x);
    let pp = p.norm_squared();
    let xx = x.norm_squared();
    let num = p * (1.0 + 2.0 * px + xx) + x * (1.0 - pp);
    num / (1.0 + 2.0 * px + pp * xx)
}

fn check_unit(v: &TangentVector) -> Result<Vec3> {
    let len = v.hyperbolic_norm();
    if !((len - 1.0).abs() <= UNIT_TOL) {
        return Err(GeomError::NotUnit { length: len });
    }
    Ok(v.dir / v.dir.norm())
}

/// `psi^t(p, v)`: the point at signed arc length `t` along the geodesic
/// through `p` with unit initial velocity `v`.
///
/// The flow is conjugated to the origin, where geodesics are radial:
/// `psi^t(p, v) = p (+) tanh(t/2) v/|v|`.
pub fn geodesic_flow(v: &TangentVector, t: f64) -> Result<BallPoint> {
    let dir = check_unit(v)?;
    let x = dir * (0.5 * t).tanh();
    BallPoint::new(mobius_add(v.base.coords(), &x))
}

/// `lim_{t -> +inf} psi^t(p, v)` on the sphere at infinity.
pub fn geodesic_endpoint(v: &TangentVector) -> Result<SpherePoint> {
    let dir = check_unit(v)?;
    SpherePoint::new(mobius_add(v.base.coords(), &dir))
}

/// A horosphere: the Euclidean sphere internally tangent to the unit sphere
/// at `tangency`, at signed hyperbolic distance `rho` from the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horosphere {
    pub tangency: SpherePoint,
    pub rho: f64,
    pub euclid_center: Vec3,
    pub euclid_radius: f64,
}

impl Horosphere {
    /// `r = (e^rho - 1)/(e^rho + 1)`.
    pub fn r(&self) -> f64 {
        (0.5 * self.rho).tanh()
    }

    /// Signed Euclidean distance of `x` from the horosphere.
    pub fn residual(&self, x: &Vec3) -> f64 {
        (x - self.euclid_center).norm() - self.euclid_radius
    }

    /// The horosphere point `(1+r)/2 X + (1-r)/2 Y` for `Y` on the sphere.
    pub fn point(&self, y: &SpherePoint) -> Vec3 {
        self.euclid_center + self.euclid_radius * y.coords()
    }
}

pub fn check_rho(rho: f64) -> Result<()> {
    if !(rho.abs() <= RHO_LIMIT) {
        return Err(GeomError::RhoOutOfRange { rho, limit: RHO_LIMIT });
    }
    Ok(())
}

/// The horosphere `H(theta, rho)`.
pub fn horosphere_shape(theta: &SpherePoint, rho: f64) -> Result<Horosphere> {
    check_rho(rho)?;
    // (1+r)/2 = 1/(1+e^-rho), (1-r)/2 = 1/(1+e^rho)
    let radius = 1.0 / (1.0 + rho.exp());
    let along = 1.0 / (1.0 + (-rho).exp());
    Ok(Horosphere { tangency: *theta, rho, euclid_center: theta.coords() * along, euclid_radius: radius })
}

/// Stereographic chart centered at a sphere point.
///
/// The sphere is first rotated so that the center goes to `(0,0,-1)`, then
/// projected from `(0,0,1)` onto the plane tangent at the south pole, so that
/// the round metric reads `gamma(z)^2 |dz|^2` with `gamma = 4/(4+|z|^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartFrame {
    center: SpherePoint,
    rotation: Rotation3<f64>,
}

/// Builds the chart centered at `p`.
pub fn chart_at(p: &SpherePoint) -> ChartFrame {
    ChartFrame::new(p)
}

impl ChartFrame {
    pub fn new(center: &SpherePoint) -> Self {
        let c = *center.coords();
        let s = Vec3::new(0.0, 0.0, -1.0);
        let axis = c.cross(&s);
        let sin = axis.norm();
        let cos = c.dot(&s);
        let rotation = if sin < 1e-15 {
            if cos > 0.0 {
                Rotation3::identity()
            } else {
                Rotation3::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI)
            }
        } else {
            Rotation3::from_axis_angle(&Unit::new_normalize(axis), sin.atan2(cos))
        };
        Self { center: *center, rotation }
    }

    pub fn center(&self) -> &SpherePoint {
        &self.center
    }

    pub fn rotation(&self) -> &Rotation3<f64> {
        &self.rotation
    }

    /// Chart coordinate of a sphere point. The antipode of the center is the
    /// projection pole and is rejected.
    pub fn to_chart(&self, q: &SpherePoint) -> Result<Complex64> {
        let y = self.rotation * q.coords();
        let den = 1.0 - y.z;
        if den <= 1e-14 {
            return Err(GeomError::ChartPole);
        }
        Ok(Complex64::new(2.0 * y.x / den, 2.0 * y.y / den))
    }

    pub fn from_chart(&self, z: Complex64) -> SpherePoint {
        let r2 = z.norm_sqr();
        let d = 4.0 + r2;
        let y = Vec3::new(4.0 * z.re / d, 4.0 * z.im / d, (r2 - 4.0) / d);
        SpherePoint(self.rotation.inverse() * y)
    }

    /// Conformal factor of the round metric, `4/(4+|z|^2)`.
    pub fn gamma(&self, z: Complex64) -> f64 {
        4.0 / (4.0 + z.norm_sqr())
    }

    /// World-space images of the chart axes at the center, `dX/dx` and `dX/dy`.
    pub fn tangent_basis(&self) -> (Vec3, Vec3) {
        let inv = self.rotation.inverse();
        (inv * Vec3::x(), inv * Vec3::y())
    }

    /// Second-order jet of the embedding `z -> X(z)` at `z = 0`, in world
    /// coordinates.
    pub fn embedding_jet(&self) -> [Jet2; 3] {
        let x = Jet2::var_x(0.0);
        let y = Jet2::var_y(0.0);
        let d = (x * x + y * y + 4.0).recip();
        let local = [x * d * 4.0, y * d * 4.0, (x * x + y * y - 4.0) * d];
        let m = self.rotation.inverse().into_inner();
        let mut out = [Jet2::default(); 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = local[0] * m[(i, 0)] + local[1] * m[(i, 1)] + local[2] * m[(i, 2)];
        }
        out
    }

    /// Jet of this chart's coordinate, as a function of the coordinates of
    /// another chart at that chart's center (the chart transition map).
    pub fn transition_jet(&self, from: &ChartFrame) -> Result<CJet2> {
        let world = from.embedding_jet();
        let m = self.rotation.into_inner();
        let local: Vec<Jet2> =
            (0..3).map(|i| world[0] * m[(i, 0)] + world[1] * m[(i, 1)] + world[2] * m[(i, 2)]).collect();
        let den = -(local[2] - 1.0);
        if den.v <= 1e-14 {
            return Err(GeomError::ChartPole);
        }
        let inv = den.recip() * 2.0;
        Ok(CJet2::new(local[0] * inv, local[1] * inv))
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        let m = self.rotation.into_inner();
        ((m.transpose() * m) - nalgebra::Matrix3::identity()).abs().max() <= tol && (m.determinant() - 1.0).abs() <= tol
    }
}

/// Outcome of the discrete convexity test for `cosh d(p, c(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityReport {
    /// Smallest centered second difference of `f`, divided by `h^2`.
    pub min_second_difference: f64,
    pub worst_index: usize,
    pub tolerance: f64,
    pub pass: bool,
}

pub const DEFAULT_CONVEXITY_C: f64 = 10.0;

/// Samples `f(t) = cosh(d(p, c(t)))` along a curve given at uniform arc-length
/// step `h` and checks that every centered second difference is at least
/// `-C h^2`.
pub fn cosh_distance_convexity(curve: &[BallPoint], p: &BallPoint, h: f64, c: f64) -> Result<ConvexityReport> {
    if curve.len() < 5 {
        return Err(GeomError::TooFewSamples { got: curve.len(), need: 5 });
    }
    if !(h > 0.0) {
        return Err(GeomError::InvalidInput("arc-length step must be positive".into()));
    }
    let f: Vec<f64> = curve.iter().map(|q| distance(p, q).cosh()).collect();
    let tolerance = c * h * h;
    let (worst_index, min_second_difference) = f
        .windows(3)
        .enumerate()
        .map(|(i, w)| (i + 1, (w[2] - 2.0 * w[1] + w[0]) / (h * h)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    Ok(ConvexityReport { min_second_difference, worst_index, tolerance, pass: min_second_difference >= -tolerance })
}
