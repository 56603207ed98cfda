//! The envelope `R_rho` of the horospheres `H(theta, rho(theta))` and its
//! extrinsic geometry at chart centers.
//!
//! The normal `N` points toward the tangency point `theta`, the direction in
//! which `rho -> rho + t` moves the surface. Under this choice the sphere
//! `rho = c` has principal curvatures `-coth c`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::fields::{k_infinity_of, RhoField, RhoJet};
use crate::hyperbolic::{chart_at, check_rho, BallPoint, SpherePoint, TangentVector, Vec3};
use crate::linalg::eigen2;

/// Thresholds for focal and umbilic detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeOptions {
    /// Samples with `det g` below this are focal.
    pub focal_floor: f64,
    /// `|k1 - k2|` below this marks an umbilic.
    pub umbilic_tol: f64,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        Self { focal_floor: 1e-12, umbilic_tol: 1e-9 }
    }
}

/// Scalars of the chart-center formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FormAux {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// `det M`, the signed area density `sqrt(det g)`.
    pub d: f64,
    /// `(EG - F^2) e^{-2 rho} - e^{2 rho}/4`.
    pub lambda: f64,
    /// `|D rho|^2 + (e^rho + 1)^2`.
    pub a: f64,
}

/// First and second fundamental forms at a chart center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Forms {
    pub g: Matrix2<f64>,
    pub pi_low: Matrix2<f64>,
    /// Hermitian matrix with the trace and determinant of `g`.
    pub h: Matrix2<Complex64>,
    pub aux: FormAux,
}

/// One sample of the envelope surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub theta: SpherePoint,
    pub position: BallPoint,
    pub normal: TangentVector,
    pub g: Matrix2<f64>,
    pub pi_low: Matrix2<f64>,
    pub shape: Matrix2<f64>,
    pub k1: f64,
    pub k2: f64,
    /// Principal directions in chart coordinates, for `k1` and `k2`.
    pub dirs: [Vector2<f64>; 2],
    pub umbilic: bool,
    /// `k1 k2 - 1`.
    pub gauss: f64,
    /// `k1 + k2`.
    pub mean: f64,
    pub aux: FormAux,
}

impl SurfaceJet {
    /// Principal direction `i` as a world-space tangent of the sphere at
    /// `theta`.
    pub fn dir_world(&self, i: usize) -> Vec3 {
        let (e1, e2) = chart_at(&self.theta).tangent_basis();
        e1 * self.dirs[i].x + e2 * self.dirs[i].y
    }
}

/// `(|D rho|^2 w^2 + 1 - w^2, 2 w^2, |D rho|^2 w^2 + (1 + w)^2)` with
/// `w = e^{-rho}`: the coefficients of `X`, `D rho` and the denominator of
/// `R` after dividing by `e^{2 rho}`, which stay bounded for large `rho`.
fn scaled_coeffs(j: &RhoJet) -> (f64, f64, f64) {
    let p = j.grad_norm_sq();
    if j.rho >= 0.0 {
        let w = (-j.rho).exp();
        let w2 = w * w;
        (p * w2 + 1.0 - w2, 2.0 * w2, p * w2 + (1.0 + w) * (1.0 + w))
    } else {
        let u = j.rho.exp();
        (p + u * u - 1.0, 2.0, p + (u + 1.0) * (u + 1.0))
    }
}

fn grad_world(theta: &SpherePoint, j: &RhoJet) -> Vec3 {
    let (e1, e2) = chart_at(theta).tangent_basis();
    e1 * j.grad[0] + e2 * j.grad[1]
}

/// `R_rho(theta)` from a chart-center jet.
pub fn envelope_point_of(theta: &SpherePoint, j: &RhoJet) -> Result<BallPoint> {
    check_rho(j.rho)?;
    let (cx, cd, den) = scaled_coeffs(j);
    BallPoint::new((theta.coords() * cx + grad_world(theta, j) * cd) / den)
}

/// `R_rho(theta) = [(|D rho|^2 + e^{2 rho} - 1) X + 2 D rho] / (|D rho|^2 + (e^rho + 1)^2)`.
pub fn envelope_point(field: &RhoField, theta: &SpherePoint) -> Result<BallPoint> {
    envelope_point_of(theta, &field.eval_jet(theta)?)
}

/// `|R|^2`, `|R - X|^2` and the bound `4/(e^rho + 1)^2` on the latter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryGap {
    pub abs_r_sq: f64,
    pub gap_sq: f64,
    pub bound_sq: f64,
}

pub fn boundary_gap_of(j: &RhoJet) -> BoundaryGap {
    let u = j.rho.exp();
    let a = j.grad_norm_sq() + (u + 1.0) * (u + 1.0);
    BoundaryGap { abs_r_sq: 1.0 - 4.0 * u / a, gap_sq: 4.0 / a, bound_sq: 4.0 / ((u + 1.0) * (u + 1.0)) }
}

pub fn boundary_gap(field: &RhoField, theta: &SpherePoint) -> Result<BoundaryGap> {
    Ok(boundary_gap_of(&field.eval_jet(theta)?))
}

/// `N = dR_{rho + t}/dt` at `t = 0` from a chart-center jet.
pub fn normal_of(theta: &SpherePoint, j: &RhoJet) -> Result<TangentVector> {
    let position = envelope_point_of(theta, j)?;
    let (cx, cd, den) = scaled_coeffs(j);
    let v = theta.coords() * cx + grad_world(theta, j) * cd;
    let dir = if j.rho >= 0.0 {
        let w = (-j.rho).exp();
        theta.coords() * (2.0 / den) - v * (2.0 * (1.0 + w) / (den * den))
    } else {
        let u = j.rho.exp();
        theta.coords() * (2.0 * u * u / den) - v * (2.0 * u * (u + 1.0) / (den * den))
    };
    Ok(TangentVector::new(position, dir))
}

pub fn normal_vector(field: &RhoField, theta: &SpherePoint) -> Result<TangentVector> {
    normal_of(theta, &field.eval_jet(theta)?)
}

/// `Q = [[E, F], [F, G]]` with `E = rho_xx + (rho_y^2 - rho_x^2 - 1)/2`,
/// `F = rho_xy - rho_x rho_y`, `G = rho_yy + (rho_x^2 - rho_y^2 - 1)/2`.
pub fn q_matrix(j: &RhoJet) -> Matrix2<f64> {
    let [rx, ry] = j.grad;
    let [rxx, rxy, ryy] = j.hess;
    let e = rxx + 0.5 * (ry * ry - rx * rx - 1.0);
    let f = rxy - rx * ry;
    let g = ryy + 0.5 * (rx * rx - ry * ry - 1.0);
    Matrix2::new(e, f, f, g)
}

/// `g = M^2`, `Pi = M M_hat` with `M = e^rho/2 + e^{-rho} Q` and
/// `M_hat = e^{-rho} Q - e^rho/2`; `h` from the complex derivatives of `rho`.
pub fn fundamental_forms(j: &RhoJet) -> Forms {
    let q = q_matrix(j);
    let (e, f, g) = (q[(0, 0)], q[(0, 1)], q[(1, 1)]);
    let ep = j.rho.exp();
    let em = (-j.rho).exp();
    let id = Matrix2::identity();
    let m = id * (0.5 * ep) + q * em;
    let m_hat = q * em - id * (0.5 * ep);
    let det_q = e * g - f * f;
    let aux = FormAux {
        e,
        f,
        g,
        d: det_q * em * em + 0.25 * ep * ep + 0.5 * (e + g),
        lambda: det_q * em * em - 0.25 * ep * ep,
        a: j.grad_norm_sq() + (ep + 1.0) * (ep + 1.0),
    };

    // d = (d_x - i d_y)/2 at the chart center
    let [rx, ry] = j.grad;
    let [rxx, rxy, ryy] = j.hess;
    let d_rho = Complex64::new(0.5 * rx, -0.5 * ry);
    let dd_bar = 0.25 * (rxx + ryy);
    let d2 = Complex64::new(0.25 * (rxx - ryy), -0.5 * rxy);
    let diag = Complex64::new((2.0 * dd_bar - 0.5) * em * em + 0.5, 0.0);
    let off = 2.0 * (d2 - d_rho * d_rho) * em * em;
    let b = Matrix2::new(diag, off, off.conj(), diag);
    let h = b * b * Complex64::new(ep * ep, 0.0);

    Forms { g: m * m, pi_low: m * m_hat, h, aux }
}

/// Shape operator in the closed form `D^{-1} [traceless(Q) + lambda Id]`.
pub fn shape_closed_form(j: &RhoJet) -> Matrix2<f64> {
    let aux = fundamental_forms(j).aux;
    let half = 0.5 * (aux.e - aux.g);
    Matrix2::new(half + aux.lambda, aux.f, aux.f, -half + aux.lambda) / aux.d
}

/// Curvature data of a chart-center jet: `shape = g^{-1} Pi`, principal
/// curvatures `k1 <= k2` and directions.
pub fn shape_operator(theta: &SpherePoint, j: &RhoJet, opts: &EnvelopeOptions) -> Result<SurfaceJet> {
    let forms = fundamental_forms(j);
    let det_g = forms.g.determinant();
    if !(det_g.abs() >= opts.focal_floor) {
        return Err(GeomError::FocalPoint { det_g });
    }
    let g_inv = forms.g.try_inverse().ok_or(GeomError::Singular { det: det_g })?;
    let shape = g_inv * forms.pi_low;
    let eig = eigen2(&shape, 1e-15)
        .ok_or_else(|| GeomError::HypothesisViolated("shape operator with complex spectrum".into()))?;
    let [k1, k2] = eig.values;
    let umbilic = eig.degenerate || (k2 - k1).abs() < opts.umbilic_tol;
    let dirs = if umbilic { [Vector2::x(), Vector2::y()] } else { eig.vectors };
    let normal = normal_of(theta, j)?;
    Ok(SurfaceJet {
        theta: *theta,
        position: normal.base,
        normal,
        g: forms.g,
        pi_low: forms.pi_low,
        shape,
        k1,
        k2,
        dirs,
        umbilic,
        gauss: k1 * k2 - 1.0,
        mean: k1 + k2,
        aux: forms.aux,
    })
}

/// Full surface sample of `field` at `theta`.
pub fn surface_jet(field: &RhoField, theta: &SpherePoint, opts: &EnvelopeOptions) -> Result<SurfaceJet> {
    shape_operator(theta, &field.eval_jet(theta)?, opts)
}

/// `K sqrt(det g)` and `K_inf e^{2 rho}` at a chart center; `sqrt(det g)` is
/// taken with the orientation sign `det M`.
pub fn curvature_forms(j: &RhoJet, s: &SurfaceJet) -> (f64, f64) {
    (s.gauss * s.aux.d, k_infinity_of(j) * (2.0 * j.rho).exp())
}
