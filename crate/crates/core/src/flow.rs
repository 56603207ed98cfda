//! Parallel flow `Sigma -> Sigma_t`: principal curvatures, Gauss and mean
//! curvature, fundamental forms, focal times and the Bonnet partner.

use nalgebra::Matrix2;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::linalg::eigen2;

/// Relative size below which a flow denominator counts as vanished.
const BLOWUP_TOL: f64 = 1e-12;

/// `arccoth k = log((k+1)/(k-1))/2` for `|k| > 1`.
pub fn arccoth(k: f64) -> Option<f64> {
    if k.abs() > 1.0 && k.is_finite() {
        Some(0.5 * ((k + 1.0) / (k - 1.0)).ln())
    } else {
        None
    }
}

/// A principal curvature and the time at which it blows up, if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvaturePath {
    pub k0: f64,
    pub blowup_time: Option<f64>,
}

impl CurvaturePath {
    pub fn new(k0: f64) -> Self {
        Self { k0, blowup_time: arccoth(k0) }
    }

    pub fn at(&self, t: f64) -> Result<f64> {
        flow_k(self.k0, t)
    }
}

/// `k(t) = (k0 ch t - sh t)/(-k0 sh t + ch t)`.
pub fn flow_k(k0: f64, t: f64) -> Result<f64> {
    let (sh, ch) = (t.sinh(), t.cosh());
    let den = -k0 * sh + ch;
    if den.abs() <= BLOWUP_TOL * (ch + k0.abs() * sh.abs()) {
        let t_star = arccoth(k0).unwrap_or(t);
        return Err(GeomError::FocalBlowup { t_star });
    }
    Ok((k0 * ch - sh) / den)
}

/// `K(t)` and `H(t)` from the initial Gauss and mean curvature.
pub fn flow_kh(k0: f64, h0: f64, t: f64) -> Result<(f64, f64)> {
    let (sh, ch) = (t.sinh(), t.cosh());
    let sc = sh * ch;
    let den = k0 * sh * sh - h0 * sc + (ch * ch + sh * sh);
    let scale = k0.abs() * sh * sh + h0.abs() * sc.abs() + ch * ch + sh * sh;
    if den.abs() <= BLOWUP_TOL * scale {
        return Err(GeomError::FocalBlowup { t_star: t });
    }
    Ok((k0 / den, (h0 * (sh * sh + ch * ch) - 4.0 * sc - 2.0 * k0 * sc) / den))
}

/// A focal time with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FocalTime {
    pub t: f64,
    pub multiplicity: u8,
}

/// Times `t*` with `coth t* = k_i`, sorted, equal roots merged.
pub fn focal_times(k1: f64, k2: f64) -> Vec<FocalTime> {
    let mut out: Vec<FocalTime> = Vec::new();
    for t in [arccoth(k1), arccoth(k2)].into_iter().flatten() {
        match out.iter_mut().find(|f| (f.t - t).abs() <= 1e-12 * (1.0 + t.abs())) {
            Some(f) => f.multiplicity += 1,
            None => out.push(FocalTime { t, multiplicity: 1 }),
        }
    }
    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    out
}

/// Convexity of the parallel family through a surface point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Convexity {
    Forward,
    Backward,
    Both,
    Neither,
}

impl Convexity {
    /// Attached note for the doubly convex case.
    pub fn note(&self) -> Option<&'static str> {
        match self {
            Convexity::Both => Some("forward and backward convex: the parallel surfaces have no self intersections"),
            _ => None,
        }
    }
}

/// Forward iff all `k_i <= 1`; backward iff all `k_i >= -1`.
pub fn convexity_class(k1: f64, k2: f64) -> Convexity {
    let forward = k1 <= 1.0 && k2 <= 1.0;
    let backward = k1 >= -1.0 && k2 >= -1.0;
    match (forward, backward) {
        (true, true) => Convexity::Both,
        (true, false) => Convexity::Forward,
        (false, true) => Convexity::Backward,
        (false, false) => Convexity::Neither,
    }
}

/// Closed-form flow of the fundamental forms:
/// `Pi(t) = e^{2t} Pi+ + e^{-2t} Pi-` and `g(t) = Gamma - e^{2t} Pi+ + e^{-2t} Pi-`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState {
    pub pi_plus: Matrix2<f64>,
    pub pi_minus: Matrix2<f64>,
    pub gamma: Matrix2<f64>,
    /// Initial shape operator `g0^{-1} Pi0`.
    pub shape0: Matrix2<f64>,
}

/// Builds the flow coefficients from `g(0)` and `Pi(0)`, using
/// `Pi'(0) = -(Pi0 g0^{-1} Pi0 + g0)`.
pub fn decompose_flow(g0: &Matrix2<f64>, pi0: &Matrix2<f64>) -> Result<FlowState> {
    let det = g0.determinant();
    let g_inv = g0.try_inverse().filter(|_| det.abs() > 0.0).ok_or(GeomError::Singular { det })?;
    let dpi = -(pi0 * g_inv * pi0 + g0);
    let pi_plus = (pi0 + dpi * 0.5) * 0.5;
    let pi_minus = (pi0 - dpi * 0.5) * 0.5;
    Ok(FlowState { pi_plus, pi_minus, gamma: g0 + pi_plus - pi_minus, shape0: g_inv * pi0 })
}

impl FlowState {
    /// `(g(t), Pi(t))`.
    pub fn evaluate(&self, t: f64) -> (Matrix2<f64>, Matrix2<f64>) {
        let (ep, em) = ((2.0 * t).exp(), (-2.0 * t).exp());
        (self.gamma - self.pi_plus * ep + self.pi_minus * em, self.pi_plus * ep + self.pi_minus * em)
    }

    /// `det(ch t - sh t P0)`, whose square scales `det g(t)/det g(0)`; it
    /// changes sign at each simple focal time.
    pub fn jacobian_det(&self, t: f64) -> f64 {
        (Matrix2::identity() * t.cosh() - self.shape0 * t.sinh()).determinant()
    }

    /// Shape operator `g(t)^{-1} Pi(t)`.
    pub fn shape(&self, t: f64) -> Result<Matrix2<f64>> {
        let (g, pi) = self.evaluate(t);
        let det = g.determinant();
        let inv = g.try_inverse().ok_or(GeomError::FocalPoint { det_g: det })?;
        Ok(inv * pi)
    }

    /// Principal curvatures at time `t`, ascending.
    pub fn curvatures(&self, t: f64) -> Result<[f64; 2]> {
        let s = self.shape(t)?;
        eigen2(&s, 1e-14)
            .map(|e| e.values)
            .ok_or_else(|| GeomError::HypothesisViolated("shape operator with complex spectrum".into()))
    }

    /// Bisection inside `[a, b]` on a principal factor `ch t - k sh t` of
    /// [`FlowState::jacobian_det`]. The factors change sign at umbilic focal
    /// points too, where `det J` has a double root; with two focal times in
    /// the interval the earlier one is bracketed.
    pub fn bracket_focal(&self, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
        let ks = eigen2(&self.shape0, 1e-14)
            .map(|e| e.values)
            .ok_or_else(|| GeomError::HypothesisViolated("shape operator with complex spectrum".into()))?;
        let mut best: Option<(f64, f64)> = None;
        for k in ks {
            let f = |t: f64| t.cosh() - k * t.sinh();
            if let Some(br) = bisect_sign(f, a, b, tol) {
                if best.is_none_or(|(x, _)| br.0 < x) {
                    best = Some(br);
                }
            }
        }
        best.ok_or_else(|| GeomError::NoSolution("no focal time inside the interval".into()))
    }
}

fn bisect_sign(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<(f64, f64)> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some((a, a));
    }
    if fb == 0.0 {
        return Some((b, b));
    }
    if fa * fb > 0.0 {
        return None;
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some((m, m));
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some((a, b))
}

/// `t` with `coth t + tanh t = H0`, i.e. `4/expm1(4t) = H0 - 2` (mirrored
/// for `H0 < -2`). At this `t` the parallel surface of a surface of constant
/// mean curvature `H0` has constant Gauss curvature `csch^2 t`.
pub fn bonnet_partner(h0: f64) -> Result<f64> {
    if !(h0.abs() > 2.0) || !h0.is_finite() {
        return Err(GeomError::NoSolution(format!("|H0| = {} must exceed 2", h0.abs())));
    }
    let excess = h0.abs() - 2.0;
    let phi = |t: f64| 4.0 / (4.0 * t).exp_m1() - excess;
    let dphi = |t: f64| {
        let e = (4.0 * t).exp_m1();
        -16.0 * (e + 1.0) / (e * e)
    };
    // phi decreases from +inf to -excess on (0, inf)
    let mut lo = 1.0 / h0.abs();
    while phi(lo) <= 0.0 {
        lo *= 0.5;
    }
    let mut hi = 0.25 * (4.0 / excess).ln_1p() + 1.0;
    while phi(hi) >= 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-6 * hi {
        let m = 0.5 * (lo + hi);
        if phi(m) > 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..50 {
        let step = phi(t) / dphi(t);
        let next = (t - step).clamp(lo, hi);
        let done = (next - t).abs() <= 1e-12 * t.max(1e-300);
        t = next;
        if done {
            break;
        }
    }
    Ok(if h0 > 0.0 { t } else { -t })
}

/// Invariant deviations of the flow over a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowInvariantReport {
    /// Initial `K^2 det g`.
    pub k2g0: f64,
    /// Largest `|K^2 det g - k2g0|`, relative to `|k2g0|` when nonzero.
    pub max_k2g_deviation: f64,
    /// Largest `|dK/dt - K H|` by centered differences.
    pub max_dk_residual: f64,
    /// Largest `|d det g/dt + 2 det g H|` relative to `1 + |det g|`.
    pub max_dg_residual: f64,
    pub samples: usize,
    /// Grid points within `skip` of a focal time.
    pub skipped: usize,
}

fn gauss_mean(state: &FlowState, t: f64) -> Result<(f64, f64, f64)> {
    let (g, _) = state.evaluate(t);
    let s = state.shape(t)?;
    Ok((s.determinant() - 1.0, s.trace(), g.determinant()))
}

/// `K^2 det g`, `dK/dt = K H` and `d det g/dt = -2 det g H` over `grid`,
/// skipping points within `skip` of a focal time of the initial data.
pub fn flow_invariants(g0: &Matrix2<f64>, pi0: &Matrix2<f64>, grid: &[f64], skip: f64) -> Result<FlowInvariantReport> {
    let state = decompose_flow(g0, pi0)?;
    let ks = eigen2(&state.shape0, 1e-14)
        .ok_or_else(|| GeomError::HypothesisViolated("initial shape operator with complex spectrum".into()))?
        .values;
    let focal = focal_times(ks[0], ks[1]);
    let (k0, _, det0) = gauss_mean(&state, 0.0)?;
    let k2g0 = k0 * k0 * det0;
    let scale = if k2g0 != 0.0 { k2g0.abs() } else { 1.0 };
    let h = 1e-4;
    let mut report = FlowInvariantReport {
        k2g0,
        max_k2g_deviation: 0.0,
        max_dk_residual: 0.0,
        max_dg_residual: 0.0,
        samples: 0,
        skipped: 0,
    };
    for &t in grid {
        if focal.iter().any(|f| (f.t - t).abs() <= skip + 2.0 * h) {
            report.skipped += 1;
            continue;
        }
        let (k, hm, det) = gauss_mean(&state, t)?;
        let (kp, _, dp) = gauss_mean(&state, t + h)?;
        let (km, _, dm) = gauss_mean(&state, t - h)?;
        report.max_k2g_deviation = report.max_k2g_deviation.max((k * k * det - k2g0).abs() / scale);
        report.max_dk_residual = report.max_dk_residual.max(((kp - km) / (2.0 * h) - k * hm).abs());
        report.max_dg_residual =
            report.max_dg_residual.max(((dp - dm) / (2.0 * h) + 2.0 * det * hm).abs() / (1.0 + det.abs()));
        report.samples += 1;
    }
    Ok(report)
}
