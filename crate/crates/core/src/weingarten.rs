//! Weingarten surfaces from conformal maps: Schwarzian, hyperbolic density,
//! the ratio `s = |S|/mu`, principal curvatures, regularity classes,
//! curvature lines and the classical univalence bounds.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::ConformalMapSpec;
use crate::domain::DomainSpec;
use crate::envelope::envelope_point;
use crate::error::{GeomError, Result};
use crate::fields::RhoField;
use crate::hyperbolic::{distance, BallPoint, ChartFrame, SpherePoint};
use crate::jet::Holo;

/// `|S|` below which a point counts as a zero of the quadratic differential.
pub const SCHWARZIAN_ZERO: f64 = 1e-12;
/// Default arc-length step for curvature-line tracing.
pub const DEFAULT_TRACE_STEP: f64 = 1e-3;

pub fn schwarzian(map: &ConformalMapSpec, z: Complex64) -> Result<Complex64> {
    Ok(map.eval(z)?.schwarzian())
}

fn mu_of(h: &Holo) -> Result<f64> {
    let m = h.f.norm_sqr();
    if m >= 1.0 {
        return Err(GeomError::OutsideDisk { modulus: m.sqrt() });
    }
    Ok(4.0 * h.d1.norm_sqr() / ((1.0 - m) * (1.0 - m)))
}

/// `mu = 4|f'|^2 / (1 - |f|^2)^2`.
pub fn mu_hyperbolic(map: &ConformalMapSpec, z: Complex64) -> Result<f64> {
    mu_of(&map.eval(z)?)
}

/// Schwarzian, density and their ratio at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSample {
    pub z: Complex64,
    pub schwarzian: Complex64,
    pub mu: f64,
    pub s: f64,
}

impl RatioSample {
    pub fn from_holo(z: Complex64, h: &Holo) -> Result<Self> {
        let schwarzian = h.schwarzian();
        let mu = mu_of(h)?;
        Ok(Self { z, schwarzian, mu, s: schwarzian.norm() / mu })
    }
}

pub fn ratio(map: &ConformalMapSpec, z: Complex64) -> Result<RatioSample> {
    RatioSample::from_holo(z, &map.eval(z)?)
}

/// The field `rho = log(2|f'| / (gamma (1 - |f|^2)))` of `map`, whose
/// parameter is the coordinate of `chart`.
pub fn rho_of_map(map: &ConformalMapSpec, chart: ChartFrame) -> Result<RhoField> {
    RhoField::conformal(map.clone(), chart)
}

/// Principal and Gauss curvature of the parallel surface at distance `t` of
/// the `-1`-Weingarten surface with ratio `s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeingartenCurvatures {
    pub k_plus: f64,
    pub k_minus: f64,
    pub gauss: f64,
    /// A denominator vanished: the sample sits on a focal point.
    pub focal: bool,
}

/// `k+- = s/(s +- 1)` flowed to time `t`, and
/// `K(t) = (s^2 e^{-2t} - ch^2 t)^{-1}`.
pub fn weingarten_curvatures(s: f64, t: f64) -> Result<WeingartenCurvatures> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(GeomError::InvalidInput(format!("ratio s = {s} must be finite and >= 0")));
    }
    let (sh, ch) = (t.sinh(), t.cosh());
    let num = |sign: f64| s * ch - (s + sign) * sh;
    let den = |sign: f64| (s + sign) * ch - s * sh;
    let tiny = 1e-14 * (1.0 + s) * ch;
    let (dp, dm) = (den(1.0), den(-1.0));
    let kden = s * s * (-2.0 * t).exp() - ch * ch;
    let focal = dp.abs() <= tiny || dm.abs() <= tiny;
    let div = |n: f64, d: f64| if d.abs() <= tiny { f64::INFINITY.copysign(n) } else { n / d };
    Ok(WeingartenCurvatures {
        k_plus: div(num(1.0), dp),
        k_minus: div(num(-1.0), dm),
        gauss: if focal { f64::INFINITY } else { 1.0 / kden },
        focal,
    })
}

/// `alpha` is immersed where `s < (1 + |alpha|^{-1})/2`.
pub fn immersion_threshold(alpha: f64) -> f64 {
    0.5 * (1.0 + 1.0 / alpha.abs())
}

/// Largest `|alpha|` for which every ratio up to `sup_s` is immersed:
/// `1/(2 sup_s - 1)`, unbounded when `sup_s <= 1/2`.
pub fn alpha_bound(sup_s: f64) -> f64 {
    if sup_s <= 0.5 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * sup_s - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegularityClass {
    /// `sup s < 1/2`: embedded for every `alpha < 0`.
    A,
    /// `sup s < 1`: immersed for `-1 < alpha < 0`.
    B,
    /// Immersed for `-1/2 < alpha < 0` when `s <= 3/2`.
    C,
}

impl RegularityClass {
    pub fn of(sup_s: f64) -> Self {
        if sup_s < 0.5 {
            RegularityClass::A
        } else if sup_s < 1.0 {
            RegularityClass::B
        } else {
            RegularityClass::C
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub class: RegularityClass,
    pub sup_s: f64,
    /// Sample attaining `sup_s`, as `[re, im]`.
    pub argsup: [f64; 2],
    pub alpha: f64,
    pub threshold: f64,
    pub immersed_everywhere: bool,
    /// Samples with `s >= threshold`.
    pub witnesses: Vec<[f64; 2]>,
}

pub fn regularity_classify(map: &ConformalMapSpec, samples: &[Complex64], alpha: f64) -> Result<RegularityReport> {
    if !(alpha < 0.0) {
        return Err(GeomError::InvalidInput(format!("alpha = {alpha} must be negative")));
    }
    if samples.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    let ratios: Vec<RatioSample> = samples.par_iter().map(|&z| ratio(map, z)).collect::<Result<_>>()?;
    let threshold = immersion_threshold(alpha);
    let best = ratios.iter().fold(&ratios[0], |b, r| if r.s > b.s { r } else { b });
    Ok(RegularityReport {
        class: RegularityClass::of(best.s),
        sup_s: best.s,
        argsup: [best.z.re, best.z.im],
        alpha,
        threshold,
        immersed_everywhere: ratios.iter().all(|r| r.s < threshold),
        witnesses: ratios.iter().filter(|r| r.s >= threshold).map(|r| [r.z.re, r.z.im]).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `S dz^2 > 0`.
    Plus,
    /// `S dz^2 < 0`.
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySeed {
    pub z0: Complex64,
    pub family: Family,
    pub step: f64,
    pub max_steps: usize,
}

impl TrajectorySeed {
    pub fn new(z0: Complex64, family: Family) -> Self {
        Self { z0, family, step: DEFAULT_TRACE_STEP, max_steps: 10_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStop {
    Boundary,
    StepBudget,
    /// A zero of `S` is within ten steps.
    Singularity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<Complex64>,
    pub stop: TraceStop,
    /// Largest `|Im(S dz^2)| / (|S| |dz|^2)` over the steps, with `S` at
    /// each chord midpoint.
    pub max_defect: f64,
}

/// Unit direction of the trajectory family: `conj(sqrt S)/|S|^{1/2}` for
/// plus, rotated by `i` for minus.
pub fn trajectory_direction(s: Complex64, family: Family) -> Complex64 {
    let r = s.sqrt().conj();
    let d = r / r.norm();
    match family {
        Family::Plus => d,
        Family::Minus => d * Complex64::i(),
    }
}

fn aligned(d: Complex64, heading: Complex64) -> Complex64 {
    if (d * heading.conj()).re < 0.0 {
        -d
    } else {
        d
    }
}

/// Normalized trajectory defect of a chord `dz` against `S`.
pub fn trajectory_defect(s: Complex64, dz: Complex64) -> f64 {
    (s * dz * dz).im.abs() / (s.norm() * dz.norm_sqr())
}

/// Traces a curvature line with fixed-step RK4 on the renormalized
/// direction field, refining the exit point by bisection.
pub fn curvature_line_trace(map: &ConformalMapSpec, seed: &TrajectorySeed) -> Result<Trajectory> {
    if !(seed.step > 0.0 && seed.step.is_finite()) {
        return Err(GeomError::InvalidInput("trace step must be positive".into()));
    }
    let field = |z: Complex64| -> Option<Complex64> {
        let s = map.eval(z).ok()?.schwarzian();
        s.norm().is_finite().then_some(s)
    };
    let s0 = field(seed.z0).ok_or(GeomError::OutsideDomain)?;
    if s0.norm() < SCHWARZIAN_ZERO {
        return Err(GeomError::SeedAtZero);
    }
    let h = seed.step;
    let mut heading = trajectory_direction(s0, seed.family);
    let mut z = seed.z0;
    let mut s_prev = s0;
    let mut points = vec![z];
    let mut max_defect: f64 = 0.0;
    let rk4 = |z: Complex64, heading: Complex64, h: f64| -> Option<(Complex64, Complex64, Complex64)> {
        let stage = |p: Complex64, hd: Complex64| field(p).map(|s| aligned(trajectory_direction(s, seed.family), hd));
        let k1 = stage(z, heading)?;
        let k2 = stage(z + k1 * (0.5 * h), k1)?;
        let k3 = stage(z + k2 * (0.5 * h), k2)?;
        let k4 = stage(z + k3 * h, k3)?;
        let zn = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        field(zn).map(|s| (zn, s, k1))
    };
    for _ in 0..seed.max_steps {
        let Some((zn, sn, k1)) = rk4(z, heading, h) else {
            // shortest failing step length, to 1e-12
            let (mut lo, mut hi) = (0.0, h);
            let mut last = None;
            while hi - lo > 1e-12 {
                let m = 0.5 * (lo + hi);
                match rk4(z, heading, m) {
                    Some((zm, ..)) => {
                        lo = m;
                        last = Some(zm);
                    }
                    None => hi = m,
                }
            }
            points.extend(last);
            if points.len() == 1 {
                return Err(GeomError::BoundaryExit);
            }
            return Ok(Trajectory { points, stop: TraceStop::Boundary, max_defect });
        };
        let dz = zn - z;
        if let Some(sm) = field(z + dz * 0.5) {
            max_defect = max_defect.max(trajectory_defect(sm, dz));
        }
        points.push(zn);
        heading = aligned(dz / dz.norm(), k1);
        let ds = (sn - s_prev).norm();
        let near_zero = sn.norm() < SCHWARZIAN_ZERO || (ds > 0.0 && sn.norm() / ds * h < 10.0 * h);
        if near_zero {
            return Ok(Trajectory { points, stop: TraceStop::Singularity, max_defect });
        }
        z = zn;
        s_prev = sn;
    }
    Ok(Trajectory { points, stop: TraceStop::StepBudget, max_defect })
}

/// One inequality evaluated over the samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub applicable: bool,
    pub samples: usize,
    /// Smallest `bound - value`, relative to the bound.
    pub worst_margin: f64,
    pub violations: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub checks: Vec<BoundCheck>,
    /// Sampled supremum of `s`, when the map lands in the disk.
    pub sup_s: Option<f64>,
    /// `|alpha|` below which every sample is immersed.
    pub alpha_bound: Option<f64>,
}

impl BoundsReport {
    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Relative slack granted to equality cases.
const BOUND_TOL: f64 = 1e-9;

fn bound_check(name: &'static str, applicable: bool, pairs: &[(f64, f64)]) -> BoundCheck {
    if !applicable {
        return BoundCheck { name, applicable, samples: 0, worst_margin: f64::INFINITY, violations: 0, pass: true };
    }
    let margins: Vec<f64> = pairs.iter().map(|&(value, bound)| (bound - value) / bound.abs().max(1e-300)).collect();
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let violations = margins.iter().filter(|&&m| m < -BOUND_TOL).count();
    BoundCheck { name, applicable, samples: pairs.len(), worst_margin: worst, violations, pass: violations == 0 }
}

/// Checks the univalence inequalities that apply to `map` at `samples`
/// (coordinates of the domain chart):
/// - `kraus_disk`: `|S| <= 6 (1 - |z|^2)^{-2}` for maps univalent on the unit disk;
/// - `kraus_ratio`: `s <= 3/2` for univalent maps onto the disk;
/// - `schwarzian_distance`: `|S| <= 6 delta^{-2}` for locally univalent maps;
/// - `density_upper`: `mu <= 4 delta^{-2}` for maps onto the disk;
/// - `density_lower`: `delta^{-2}/4 <= mu` when every boundary component
///   has simply connected sides;
/// - `ratio_24`: `s <= 24` under the same hypothesis.
///
/// A violation falsifies the flags declared for the map.
pub fn univalence_bounds(map: &ConformalMapSpec, domain: &DomainSpec, samples: &[Complex64]) -> Result<BoundsReport> {
    if samples.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    if domain.boundary().is_empty() {
        return Err(GeomError::InvalidInput("distance bounds need boundary data".into()));
    }
    let delta = |z: Complex64| -> Result<f64> {
        match domain.planar_domain() {
            Some(d) => Ok(d.distance(z)),
            None => Ok(domain.boundary_distance(domain.chart(), z)?.0),
        }
    };
    struct Row {
        z: Complex64,
        s_abs: f64,
        delta: f64,
        ratio: Option<RatioSample>,
    }
    let rows: Vec<Row> = samples
        .par_iter()
        .map(|&z| {
            let h = map.eval(z)?;
            let ratio = if map.into_disk() { Some(RatioSample::from_holo(z, &h)?) } else { None };
            Ok(Row { z, s_abs: h.schwarzian().norm(), delta: delta(z)?, ratio })
        })
        .collect::<Result<_>>()?;

    let unit_disk = matches!(map.domain(), crate::domain::PlanarDomain::Disk { center, radius }
        if center.norm() == 0.0 && *radius == 1.0);
    let sides = domain.simply_connected_sides().iter().all(|&b| b);
    let onto = map.onto_disk();
    let collect = |f: &dyn Fn(&Row) -> (f64, f64)| rows.iter().map(f).collect::<Vec<_>>();
    let ratio_of = |r: &Row| r.ratio.map(|x| x.s).unwrap_or(f64::NAN);
    let mu_of_row = |r: &Row| r.ratio.map(|x| x.mu).unwrap_or(f64::NAN);

    let checks = vec![
        bound_check(
            "kraus_disk",
            map.univalent() && unit_disk,
            &collect(&|r| (r.s_abs, 6.0 / (1.0 - r.z.norm_sqr()).powi(2))),
        ),
        bound_check("kraus_ratio", map.univalent() && onto, &collect(&|r| (ratio_of(r), 1.5))),
        bound_check(
            "schwarzian_distance",
            map.univalent() || map.locally_univalent(),
            &collect(&|r| (r.s_abs, 6.0 / (r.delta * r.delta))),
        ),
        bound_check("density_upper", onto, &collect(&|r| (mu_of_row(r), 4.0 / (r.delta * r.delta)))),
        // written as -mu <= -delta^{-2}/4 so that the margin keeps its sign
        bound_check("density_lower", onto && sides, &collect(&|r| (0.25 / (r.delta * r.delta) - mu_of_row(r), 0.0))),
        bound_check("ratio_24", onto && sides, &collect(&|r| (ratio_of(r), 24.0))),
    ];
    let checks = checks
        .into_iter()
        .map(|mut c| {
            if c.name == "density_lower" && c.applicable {
                // relative margin against the lower bound itself
                let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (0.25 / (r.delta * r.delta), mu_of_row(r))).collect();
                let margins: Vec<f64> = pairs.iter().map(|&(lo, mu)| (mu - lo) / lo).collect();
                c.worst_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
                c.violations = margins.iter().filter(|&&m| m < -BOUND_TOL).count();
                c.pass = c.violations == 0;
            }
            c
        })
        .collect();
    let sup_s = map.into_disk().then(|| rows.iter().map(ratio_of).fold(0.0, f64::max));
    Ok(BoundsReport { checks, sup_s, alpha_bound: sup_s.map(alpha_bound) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestedReport {
    /// Minimum hyperbolic distance between `Sigma_t(rho1)` and `Sigma(rho2)`.
    pub min_distance: f64,
    /// Minimum of `rho1 - rho2` over the samples of the inner domain.
    pub min_rho_gap: f64,
    /// Minimum distance between `Sigma_t(rho1)` and `Sigma(rho1)`.
    pub leaf_min_distance: f64,
    pub pairs: usize,
}

fn min_pair_distance(a: &[BallPoint], b: &[BallPoint]) -> f64 {
    a.par_iter()
        .map(|p| b.iter().map(|q| distance(p, q)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min)
}

fn envelope_points(field: &RhoField, samples: &[SpherePoint]) -> Result<Vec<BallPoint>> {
    samples.par_iter().map(|p| envelope_point(field, p)).collect()
}

/// Minimum distance between the leaves `Sigma_t(rho)` and `Sigma_s(rho)`.
pub fn leaf_disjointness(field: &RhoField, s: f64, t: f64, samples: &[SpherePoint]) -> Result<f64> {
    if samples.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    let a = envelope_points(&field.clone().with_offset(t), samples)?;
    let b = envelope_points(&field.clone().with_offset(s), samples)?;
    Ok(min_pair_distance(&a, &b))
}

/// Distance between `Sigma_t(rho1)` over `samples1` and `Sigma(rho2)` over
/// `samples2`, after verifying `rho2 < rho1` on `samples1`.
pub fn nested_disjointness(
    field1: &RhoField,
    field2: &RhoField,
    t: f64,
    samples1: &[SpherePoint],
    samples2: &[SpherePoint],
) -> Result<NestedReport> {
    if !(t > 0.0) {
        return Err(GeomError::InvalidInput("offset t must be positive".into()));
    }
    if samples1.is_empty() || samples2.is_empty() {
        return Err(GeomError::EmptySamples);
    }
    let gaps: Vec<f64> = samples1.par_iter().map(|p| Ok(field1.value(p)? - field2.value(p)?)).collect::<Result<_>>()?;
    let min_rho_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_rho_gap > 0.0) {
        return Err(GeomError::HypothesisViolated(format!("rho1 - rho2 reaches {min_rho_gap:e}")));
    }
    let a = envelope_points(&field1.clone().with_offset(t), samples1)?;
    let b = envelope_points(field2, samples2)?;
    Ok(NestedReport {
        min_distance: min_pair_distance(&a, &b),
        min_rho_gap,
        leaf_min_distance: leaf_disjointness(field1, 0.0, t, samples1)?,
        pairs: a.len() * b.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::PlanarDomain;
    use crate::envelope::{surface_jet, EnvelopeOptions};
    use crate::hyperbolic::chart_at;
    use proptest::prelude::*;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk_samples(r: f64, n: usize) -> Vec<Complex64> {
        (0..n)
            .flat_map(|i| {
                let rad = r * (i as f64 + 0.5) / n as f64;
                (0..2 * n).map(move |j| Complex64::from_polar(rad, std::f64::consts::PI * j as f64 / n as f64))
            })
            .collect()
    }

    /// Symbolic derivatives of `z^2`: `S = -3/(2 z^2)`.
    #[test]
    fn schwarzian_examples() {
        let sq = Holo::var(cz(1.0, 0.0)).mul(&Holo::var(cz(1.0, 0.0)));
        assert!((sq.schwarzian() - cz(-1.5, 0.0)).norm() < 1e-15);
        let kf = ConformalMapSpec::koebe_function();
        assert!((schwarzian(&kf, cz(0.0, 0.0)).unwrap() - cz(-6.0, 0.0)).norm() < 1e-12);
        let z = cz(0.3, -0.2);
        let want = -6.0 / (1.0 - z * z).powi(2);
        assert!((schwarzian(&kf, z).unwrap() - want).norm() < 1e-12 * want.norm());
        let m = ConformalMapSpec::mobius(cz(1.0, 0.5), cz(0.2, 0.0), cz(0.1, 0.1), cz(2.0, 0.0)).unwrap();
        assert!(schwarzian(&m, cz(0.1, 0.2)).unwrap().norm() < 1e-12);
        assert!((schwarzian(&ConformalMapSpec::koebe(), cz(0.0, 0.0)).unwrap() - cz(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn density_examples() {
        let id = ConformalMapSpec::identity();
        assert_eq!(mu_hyperbolic(&id, cz(0.0, 0.0)).unwrap(), 4.0);
        assert!((mu_hyperbolic(&id, cz(0.5, 0.0)).unwrap() - 64.0 / 9.0).abs() < 1e-14);
        assert!(matches!(
            mu_hyperbolic(&ConformalMapSpec::koebe_function(), cz(0.5, 0.0)),
            Err(GeomError::OutsideDisk { .. })
        ));
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio(&ConformalMapSpec::identity(), cz(0.4, 0.1)).unwrap().s, 0.0);
        let k = ratio(&ConformalMapSpec::koebe(), cz(0.0, 0.0)).unwrap();
        assert!((k.mu - 4.0).abs() < 1e-14 && (k.s - 1.5).abs() < 1e-12);
        let kf = ratio(&ConformalMapSpec::koebe_function(), cz(0.0, 0.0)).unwrap();
        assert!((kf.s - 1.5).abs() < 1e-12);
    }

    #[test]
    fn curvature_examples() {
        let w = weingarten_curvatures(0.0, 0.0).unwrap();
        assert_eq!((w.k_plus, w.k_minus, w.gauss), (0.0, 0.0, -1.0));
        let w = weingarten_curvatures(0.5, 0.0).unwrap();
        assert!((w.k_plus - 1.0 / 3.0).abs() < 1e-15 && (w.k_minus + 1.0).abs() < 1e-15);
        assert!((w.gauss + 4.0 / 3.0).abs() < 1e-15);
        let f = weingarten_curvatures(1.0, 0.0).unwrap();
        assert!(f.focal && f.k_minus.is_infinite());
        assert!(weingarten_curvatures(-0.1, 0.0).is_err());
    }

    #[test]
    fn threshold_reproduces_constants() {
        assert_eq!(immersion_threshold(-1.0), 1.0);
        assert_eq!(immersion_threshold(-0.5), 1.5);
        assert!((alpha_bound(24.0) - 1.0 / 47.0).abs() < 1e-17);
        assert!(immersion_threshold(-1.0 / 47.0 * 0.999) > 24.0);
        assert!(immersion_threshold(-1.0 / 47.0 * 1.001) < 24.0);
    }

    #[test]
    fn classification_examples() {
        let samples = disk_samples(0.95, 12);
        let id = regularity_classify(&ConformalMapSpec::identity(), &samples, -2.0).unwrap();
        assert_eq!(id.class, RegularityClass::A);
        assert!(id.immersed_everywhere && id.witnesses.is_empty());
        let mut koebe_samples = disk_samples(0.2, 6);
        koebe_samples.push(cz(0.0, 0.0));
        let k = regularity_classify(&ConformalMapSpec::koebe(), &koebe_samples, -0.5).unwrap();
        assert_eq!(k.class, RegularityClass::C);
        assert!((k.sup_s - 1.5).abs() < 1e-12);
        // s = 3/2 sits exactly on the alpha = -1/2 threshold
        assert!(!k.immersed_everywhere);
        assert!(regularity_classify(&ConformalMapSpec::koebe(), &koebe_samples, -0.49).unwrap().immersed_everywhere);
        assert!(matches!(regularity_classify(&ConformalMapSpec::identity(), &[], -1.0), Err(GeomError::EmptySamples)));
        assert!(regularity_classify(&ConformalMapSpec::identity(), &samples, 0.1).is_err());
    }

    #[test]
    fn engineered_power_map_is_class_b() {
        let m = ConformalMapSpec::power(0.625).unwrap();
        let samples: Vec<Complex64> = (1..40)
            .flat_map(|i| {
                (1..40)
                    .map(move |j| Complex64::from_polar(0.1 * i as f64, 1.6 * std::f64::consts::PI * j as f64 / 40.0))
            })
            .collect();
        let r = regularity_classify(&m, &samples, -1.0).unwrap();
        assert_eq!(r.class, RegularityClass::B);
        assert!(r.sup_s > 0.7 && r.sup_s < 0.8);
    }

    #[test]
    fn kraus_equality_only_at_koebe() {
        let samples = disk_samples(0.9, 10);
        let mut with_zero = samples.clone();
        with_zero.push(cz(0.0, 0.0));
        let disk = DomainSpec::planar(
            ChartFrame::new(&SpherePoint::south()),
            PlanarDomain::Disk { center: cz(0.0, 0.0), radius: 1.0 },
        );
        let kf = univalence_bounds(&ConformalMapSpec::koebe_function(), &disk, &with_zero).unwrap();
        let c = kf.check("kraus_disk").unwrap();
        assert!(c.pass && c.worst_margin.abs() < 1e-12);
        for m in [
            ConformalMapSpec::identity(),
            ConformalMapSpec::mobius(cz(1.0, 0.0), cz(0.3, 0.0), cz(0.3, 0.0), cz(1.0, 0.0)).unwrap(),
            ConformalMapSpec::polynomial(vec![cz(0.0, 0.0), cz(0.5, 0.0), cz(0.1, 0.0)], 1.0).unwrap(),
        ] {
            let r = univalence_bounds(&m, &disk, &with_zero).unwrap();
            let c = r.check("kraus_disk").unwrap();
            assert!(c.applicable && c.pass && c.worst_margin > 0.1, "{} {}", m.name(), c.worst_margin);
        }
    }

    #[test]
    fn thick_annulus_breaks_the_lower_density_bound() {
        // L = 2 pi: at |w| = e^{pi} the density is 1/(4 e^{2 pi}) < 1/(4 (e^{pi} - 1)^2)
        let l = 2.0 * std::f64::consts::PI;
        let m = ConformalMapSpec::annulus(1.0, l.exp()).unwrap();
        let z = cz(std::f64::consts::PI.exp(), 0.0);
        let mu = mu_hyperbolic(&m, z).unwrap();
        assert!((mu - 0.25 * (-2.0 * std::f64::consts::PI).exp()).abs() < 1e-12 * mu);
        let delta = m.domain().distance(z);
        assert!(mu < 0.25 / (delta * delta));
        // the inner circle does not bound a simply connected side, so the
        // bound is not claimed
        let dom = DomainSpec::planar(ChartFrame::new(&SpherePoint::south()), m.domain().clone());
        let r = univalence_bounds(&m, &dom, &[z]).unwrap();
        assert!(!r.check("density_lower").unwrap().applicable);
        assert!((r.sup_s.unwrap() - 2.5).abs() < 1e-9);
    }

    #[test]
    fn moderate_annulus_ratio_below_24() {
        let m = ConformalMapSpec::annulus(1.0, 3.0).unwrap();
        let samples: Vec<Complex64> = (1..30)
            .flat_map(|i| {
                (0..36).map(move |j| Complex64::from_polar(1.0 + 2.0 * i as f64 / 30.0, 0.17 * j as f64 + 0.01))
            })
            .collect();
        let dom = DomainSpec::planar(ChartFrame::new(&SpherePoint::south()), m.domain().clone());
        let r = univalence_bounds(&m, &dom, &samples).unwrap();
        assert!(r.pass());
        let sup = r.sup_s.unwrap();
        let l = 3f64.ln();
        assert!(sup <= 0.5 * (1.0 + l * l / std::f64::consts::PI.powi(2)) + 1e-9);
        assert!(sup <= 24.0 && r.alpha_bound.unwrap() >= 1.0 / 47.0);
    }

    #[test]
    fn trajectories_of_constant_and_power_maps() {
        // z^2 on the quarter plane: S = -3/(2 z^2); plus lines are circles, minus lines are rays
        let m = ConformalMapSpec::power(2.0).unwrap();
        let z0 = Complex64::from_polar(0.5, 0.6);
        let plus =
            curvature_line_trace(&m, &TrajectorySeed { z0, family: Family::Plus, step: 1e-3, max_steps: 400 }).unwrap();
        assert!(plus.max_defect < 1e-6);
        for p in &plus.points {
            assert!((p.norm() - 0.5).abs() < 1e-8);
        }
        let minus = curvature_line_trace(&m, &TrajectorySeed { z0, family: Family::Minus, step: 1e-3, max_steps: 400 })
            .unwrap();
        for p in &minus.points {
            assert!((p.arg() - 0.6).abs() < 1e-8);
        }
        // constant real S > 0: exp(w) has S = -1/2, so rotate: exp(i w) has S = 1/2
        let d = trajectory_direction(cz(0.5, 0.0), Family::Plus);
        assert!((d - cz(1.0, 0.0)).norm() < 1e-15);
        assert!((trajectory_direction(cz(0.5, 0.0), Family::Minus) - cz(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_stops_and_errors() {
        let m = ConformalMapSpec::power(2.0).unwrap();
        let run = |z0, family| curvature_line_trace(&m, &TrajectorySeed { z0, family, step: 1e-3, max_steps: 100_000 });
        let short = curvature_line_trace(
            &m,
            &TrajectorySeed { z0: cz(0.3, 0.3), family: Family::Minus, step: 1e-3, max_steps: 50 },
        );
        assert_eq!(short.unwrap().stop, TraceStop::StepBudget);
        let arc = run(Complex64::from_polar(0.5, 0.6), Family::Plus).unwrap();
        assert_eq!(arc.stop, TraceStop::Boundary);
        let end = *arc.points.last().unwrap();
        assert!(m.domain().distance(end) < 1e-9);
        assert!(matches!(run(cz(-0.5, 0.1), Family::Plus), Err(GeomError::OutsideDomain)));
        assert!(matches!(
            curvature_line_trace(&ConformalMapSpec::identity(), &TrajectorySeed::new(cz(0.1, 0.0), Family::Plus)),
            Err(GeomError::SeedAtZero)
        ));
    }

    #[test]
    fn plus_and_minus_are_orthogonal() {
        for s in [cz(1.0, 2.0), cz(-3.0, 0.1), cz(0.0, -1.0)] {
            let (a, b) = (trajectory_direction(s, Family::Plus), trajectory_direction(s, Family::Minus));
            assert!((a * b.conj()).re.abs() < 1e-15);
            assert!(trajectory_defect(s, a) < 1e-15 && trajectory_defect(s, b) < 1e-15);
        }
    }

    fn south_chart() -> ChartFrame {
        ChartFrame::new(&SpherePoint::south())
    }

    /// Envelope curvatures of the map field against the closed form in `s`.
    #[test]
    fn envelope_matches_weingarten_curvatures() {
        let opts = EnvelopeOptions::default();
        for (m, ws) in [
            (ConformalMapSpec::power(0.625).unwrap(), vec![cz(0.4, 0.3), cz(-0.2, 0.5), cz(0.9, 0.1)]),
            (ConformalMapSpec::strip(2.0).unwrap(), vec![cz(0.3, 0.7), cz(-1.0, 1.5)]),
            (ConformalMapSpec::koebe(), vec![cz(0.0, 0.0), cz(0.5, 0.5)]),
        ] {
            let field = rho_of_map(&m, south_chart()).unwrap();
            for w in ws {
                let s = ratio(&m, w).unwrap().s;
                if (s - 1.0).abs() < 1e-3 {
                    continue;
                }
                let want = weingarten_curvatures(s, 0.0).unwrap();
                let sj = surface_jet(&field, &field.point_at(w), &opts).unwrap();
                let mut a = [want.k_minus, want.k_plus];
                a.sort_by(f64::total_cmp);
                assert!((sj.k1 - a[0]).abs() < 1e-6 && (sj.k2 - a[1]).abs() < 1e-6, "{} {w}", m.name());
                assert!((sj.gauss - want.gauss).abs() < 1e-6 * (1.0 + want.gauss.abs()));
            }
        }
    }

    #[test]
    fn offsets_satisfy_the_weingarten_relation() {
        let opts = EnvelopeOptions::default();
        let m = ConformalMapSpec::power(0.625).unwrap();
        for t in [0.3, 1.0, 2.5] {
            let field = rho_of_map(&m, south_chart()).unwrap().with_offset(t);
            let alpha = -(-2.0 * t).exp();
            for w in [cz(0.4, 0.3), cz(-0.2, 0.5)] {
                let sj = surface_jet(&field, &field.point_at(w), &opts).unwrap();
                let lhs = (1.0 - alpha) * sj.gauss;
                let rhs = alpha * (2.0 - sj.mean);
                assert!((lhs - rhs).abs() < 1e-7 * (1.0 + lhs.abs()), "t={t} {lhs} {rhs}");
                let want = weingarten_curvatures(ratio(&m, w).unwrap().s, t).unwrap();
                assert!((sj.gauss - want.gauss).abs() < 1e-6 * (1.0 + want.gauss.abs()));
            }
        }
    }

    /// Principal directions of the envelope, pushed to the map chart, align
    /// with the trajectory directions.
    #[test]
    fn principal_directions_follow_trajectories() {
        let opts = EnvelopeOptions::default();
        let m = ConformalMapSpec::power(0.625).unwrap();
        let chart = south_chart();
        let field = rho_of_map(&m, chart).unwrap();
        for w in [cz(0.4, 0.3), cz(-0.2, 0.5), cz(0.05, 0.2)] {
            let theta = field.point_at(w);
            let sj = surface_jet(&field, &theta, &opts).unwrap();
            let jac = chart.transition_jet(&chart_at(&theta)).unwrap().jacobian();
            let s = schwarzian(&m, w).unwrap();
            let ratio_s = ratio(&m, w).unwrap().s;
            let kp = weingarten_curvatures(ratio_s, 0.0).unwrap().k_plus;
            for i in 0..2 {
                let v = sj.dirs[i];
                let pushed = cz(jac[0][0] * v.x + jac[0][1] * v.y, jac[1][0] * v.x + jac[1][1] * v.y);
                let k = if i == 0 { sj.k1 } else { sj.k2 };
                let fam = if (k - kp).abs() < 1e-6 { Family::Plus } else { Family::Minus };
                let d = trajectory_direction(s, fam);
                let sin = (pushed / pushed.norm() * d.conj()).im.abs();
                assert!(sin < 1e-5, "{w} dir {i}: {sin}");
            }
        }
    }

    #[test]
    fn disjointness_examples() {
        let samples: Vec<SpherePoint> = (0..60)
            .map(|i| {
                let a = 2.399963 * i as f64;
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / 60.0;
                let r = (1.0 - z * z).sqrt();
                SpherePoint::from_xyz(r * a.cos(), r * a.sin(), z).unwrap()
            })
            .collect();
        let (c1, c2, t) = (1.5, 0.7, 0.4);
        let r = nested_disjointness(&RhoField::constant(c1), &RhoField::constant(c2), t, &samples, &samples).unwrap();
        assert!((r.min_distance - (c1 + t - c2)).abs() < 1e-9);
        assert!((r.leaf_min_distance - t).abs() < 1e-9);
        assert!(leaf_disjointness(&RhoField::constant(c1), 0.0, 0.0, &samples).unwrap().abs() < 1e-12);
        assert!(matches!(
            nested_disjointness(&RhoField::constant(c2), &RhoField::constant(c1), t, &samples, &samples),
            Err(GeomError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn class_a_leaves_are_disjoint() {
        let m = ConformalMapSpec::strip(2.0).unwrap();
        let field = rho_of_map(&m, south_chart()).unwrap();
        let samples: Vec<SpherePoint> = (0..15)
            .flat_map(|i| (0..8).map(move |j| cz(-1.5 + 0.2 * i as f64, 0.2 + 0.2 * j as f64)))
            .map(|w| field.point_at(w))
            .collect();
        let d = leaf_disjointness(&field, 0.0, 0.5, &samples).unwrap();
        assert!(d > 0.0 && d <= 0.5 + 1e-9);
    }

    fn mobius_holo(z: Complex64, a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Holo {
        let den = c * z + d;
        let det = a * d - b * c;
        Holo {
            f: (a * z + b) / den,
            d1: det / (den * den),
            d2: -2.0 * c * det / (den * den * den),
            d3: 6.0 * c * c * det / (den * den * den * den),
        }
    }

    proptest! {
        #[test]
        fn schwarzian_cocycle_and_ratio_invariance(
            re in -0.3..0.3f64, im in -0.3..0.3f64, ar in -0.5..0.5f64, ai in -0.5..0.5f64, phi in 0.0..std::f64::consts::TAU,
        ) {
            // disk automorphism m(z) = e^{i phi} (z - a)/(1 - conj(a) z) composed into the Koebe inverse
            let a = cz(ar, ai);
            let rot = Complex64::from_polar(1.0, phi);
            let z = cz(re, im);
            let mh = mobius_holo(z, rot, -rot * a, -a.conj(), cz(1.0, 0.0));
            let f = ConformalMapSpec::power(0.625).unwrap();
            let w = mh.f * 0.3 + cz(0.5, 0.5);
            // inner map: affine image of the automorphism, still Mobius
            let inner = Holo { f: w, d1: mh.d1 * 0.3, d2: mh.d2 * 0.3, d3: mh.d3 * 0.3 };
            let fw = f.eval(w).unwrap();
            let comp = inner.compose(fw.f, fw.d1, fw.d2, fw.d3);
            let lhs = comp.schwarzian();
            let rhs = fw.schwarzian() * inner.d1 * inner.d1;
            prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + rhs.norm()));
            let s1 = RatioSample::from_holo(z, &comp).unwrap().s;
            let s0 = RatioSample::from_holo(w, &fw).unwrap().s;
            prop_assert!((s1 - s0).abs() <= 1e-10 * (1.0 + s0));
        }

        #[test]
        fn curvature_identities(s in 0.0..3.0f64) {
            prop_assume!((s - 1.0).abs() > 1e-3);
            let w = weingarten_curvatures(s, 0.0).unwrap();
            prop_assert!((w.gauss - 1.0 / (s * s - 1.0)).abs() < 1e-9 * (1.0 + w.gauss.abs()));
            if s > 1e-6 {
                prop_assert!((1.0 / w.k_plus + 1.0 / w.k_minus - 2.0).abs() < 1e-9);
                prop_assert!((w.k_minus - w.k_plus / (2.0 * w.k_plus - 1.0)).abs() < 1e-9 * (1.0 + w.k_minus.abs()));
            }
            let k = w.gauss;
            let root = (k * (k + 1.0)).sqrt();
            let mut pair = [k + 1.0 + root, k + 1.0 - root];
            let mut got = [w.k_plus, w.k_minus];
            pair.sort_by(f64::total_cmp);
            got.sort_by(f64::total_cmp);
            for i in 0..2 { prop_assert!((pair[i] - got[i]).abs() < 1e-9 * (1.0 + got[i].abs())); }
        }

        #[test]
        fn flowed_curvatures_match_gauss(s in 0.0..3.0f64, t in -2.0..2.0f64) {
            let w = weingarten_curvatures(s, t).unwrap();
            prop_assume!(!w.focal && w.gauss.abs() < 1e6);
            prop_assert!((w.k_plus * w.k_minus - 1.0 - w.gauss).abs() < 1e-8 * (1.0 + w.gauss.abs()));
        }

        #[test]
        fn pullback_density_is_invariant(ar in -0.6..0.6f64, ai in -0.6..0.6f64, re in -0.6..0.6f64, im in -0.6..0.6f64) {
            // mu |dz|^2 of the disk is invariant under disk automorphisms
            let a = cz(ar, ai);
            let z = cz(re, im);
            let mh = mobius_holo(z, cz(1.0, 0.0), -a, -a.conj(), cz(1.0, 0.0));
            let id = ConformalMapSpec::identity();
            let mu_z = mu_hyperbolic(&id, z).unwrap();
            let mu_w = mu_hyperbolic(&id, mh.f).unwrap();
            prop_assert!((mu_w * mh.d1.norm_sqr() - mu_z).abs() < 1e-10 * mu_z);
        }
    }
}
