//! Invariant suites behind `horosurf verify`. Every suite draws its samples
//! from its own fixed-seed generator, so filtering by suite does not change
//! the results of the others.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli::{focal_flag_mismatches, surface_layers};
use crate::config::{map_chart, Tolerances};
use crate::conformal::ConformalMapSpec;
use crate::domain::DomainSpec;
use crate::envelope::{
    curvature_forms, envelope_point, envelope_point_of, fundamental_forms, normal_vector, shape_operator, surface_jet,
    EnvelopeOptions,
};
use crate::fields::{k_infinity_of, RhoField};
use crate::flow::{arccoth, decompose_flow, flow_invariants, flow_k, flow_kh, focal_times};
use crate::grid::{filter_by_field, SampleGrid};
use crate::hyperbolic::{
    cosh_distance_convexity, distance, geodesic_endpoint, geodesic_flow, horosphere_shape, metric_inner, mobius_add,
    BallPoint, ChartFrame, SpherePoint, TangentVector, Vec3, DEFAULT_CONVEXITY_C,
};
use crate::jet::Holo;
use crate::mesh::parse_obj;
use crate::weingarten::{
    alpha_bound, curvature_line_trace, immersion_threshold, ratio, regularity_classify, schwarzian,
    trajectory_direction, univalence_bounds, weingarten_curvatures, Family, RegularityClass, TrajectorySeed,
};

pub const VERIFY_SEED: u64 = 0x686f_726f;
pub const SUITES: &[&str] = &["hyperbolic", "fields", "envelope", "flow", "weingarten", "cli"];

/// One invariant: `worst_margin = tolerance - worst deviation`, so a
/// record passes iff its margin is non-negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantRecord {
    pub invariant: String,
    pub samples: usize,
    pub worst_margin: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub records: Vec<InvariantRecord>,
    pub pass: bool,
}

struct Suite<'a> {
    name: &'static str,
    tol: &'a Tolerances,
    records: Vec<InvariantRecord>,
}

impl Suite<'_> {
    /// Records the largest deviation; NaN deviations fail.
    fn record(&mut self, key: &str, deviations: impl IntoIterator<Item = f64>) {
        let tolerance = self.tol.get(key);
        let (mut n, mut worst) = (0usize, 0.0f64);
        for d in deviations {
            n += 1;
            worst = if d.is_nan() || worst.is_nan() { f64::NAN } else { worst.max(d) };
        }
        let worst_margin = tolerance - worst;
        self.records.push(InvariantRecord {
            invariant: format!("{}.{key}", self.name),
            samples: n,
            worst_margin,
            tolerance,
            pass: worst_margin >= 0.0,
        });
    }
}

fn rng_for(suite: &str) -> ChaCha8Rng {
    let idx = SUITES.iter().position(|s| *s == suite).unwrap_or(0) as u64;
    ChaCha8Rng::seed_from_u64(VERIFY_SEED.wrapping_add(idx))
}

fn random_sphere(rng: &mut ChaCha8Rng) -> SpherePoint {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).sqrt();
    SpherePoint::from_xyz(r * phi.cos(), r * phi.sin(), z).expect("unit vector")
}

fn random_ball(rng: &mut ChaCha8Rng, max: f64) -> BallPoint {
    let d = random_sphere(rng);
    BallPoint::new(*d.coords() * rng.random_range(0.0..max)).expect("inside the ball")
}

fn cz(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Catalog maps used for sampling, all landing in the disk.
fn disk_maps() -> Vec<ConformalMapSpec> {
    vec![
        ConformalMapSpec::identity(),
        ConformalMapSpec::mobius(cz(0.5, 0.0), cz(0.0, 0.0), cz(0.0, 0.0), cz(1.0, 0.0)).expect("mobius"),
        ConformalMapSpec::koebe(),
        ConformalMapSpec::power(0.625).expect("power"),
        ConformalMapSpec::power(2.0).expect("power"),
        ConformalMapSpec::strip(2.0).expect("strip"),
        ConformalMapSpec::annulus(1.0, 3.0).expect("annulus"),
        ConformalMapSpec::polynomial(vec![cz(0.0, 0.0), cz(0.5, 0.0), cz(0.05, 0.0)], 1.0).expect("polynomial"),
    ]
}

/// Interior point of the map domain, at least `margin` from its boundary,
/// with `|f| < 1`.
fn interior_point(map: &ConformalMapSpec, rng: &mut ChaCha8Rng, margin: f64) -> Complex64 {
    loop {
        let w = cz(rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5));
        if map.domain().contains(w) && map.domain().distance(w) > margin {
            if let Ok(h) = map.eval(w) {
                if h.f.norm() < 1.0 {
                    return w;
                }
            }
        }
    }
}

/// A catalog or conformal field with a sample point where `|rho| <= 3`.
fn field_sample(rng: &mut ChaCha8Rng, maps: &[ConformalMapSpec]) -> (RhoField, SpherePoint) {
    sample_of(rng, maps, 8)
}

/// Catalog fields only: constant, plane, horosphere and geodesic.
fn catalog_sample(rng: &mut ChaCha8Rng) -> (RhoField, SpherePoint) {
    sample_of(rng, &[], 4)
}

fn sample_of(rng: &mut ChaCha8Rng, maps: &[ConformalMapSpec], kinds: usize) -> (RhoField, SpherePoint) {
    loop {
        let kind = rng.random_range(0..kinds);
        let (field, p) = match kind {
            0 => (RhoField::constant(rng.random_range(-2.0..2.0)), random_sphere(rng)),
            1 => {
                let n = random_sphere(rng);
                (RhoField::geodesic_plane(n), random_sphere(rng))
            }
            2 => (RhoField::horosphere(random_sphere(rng), rng.random_range(-1.0..1.0)), random_sphere(rng)),
            3 => (RhoField::geodesic(random_sphere(rng)), random_sphere(rng)),
            _ => {
                let map = maps[rng.random_range(0..maps.len())].clone();
                let w = interior_point(&map, rng, 0.05);
                let field = RhoField::conformal(map, map_chart()).expect("lands in the disk");
                let p = field.point_at(w);
                (field.with_offset(rng.random_range(-1.0..1.0)), p)
            }
        };
        if let Ok(j) = field.eval_jet(&p) {
            if j.rho.abs() <= 3.0 && j.hess.iter().all(|h| h.abs() < 50.0) {
                return (field, p);
            }
        }
    }
}

fn hyperbolic_suite(s: &mut Suite) {
    let mut rng = rng_for(s.name);
    let tangency: Vec<f64> = (0..500)
        .map(|_| {
            let h = horosphere_shape(&random_sphere(&mut rng), rng.random_range(-5.0..5.0)).expect("rho in range");
            (h.euclid_center.norm() + h.euclid_radius - 1.0).abs()
        })
        .collect();
    s.record("horosphere_tangency", tangency);

    let speed: Vec<f64> = (0..500)
        .map(|_| {
            let base = random_ball(&mut rng, 0.8);
            let v = TangentVector::new(base, *random_sphere(&mut rng).coords()).normalized().expect("nonzero");
            let (a, b) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
            let pa = geodesic_flow(&v, a).expect("finite");
            let pb = geodesic_flow(&v, b).expect("finite");
            (distance(&pa, &pb) - (a - b).abs()).abs()
        })
        .collect();
    s.record("geodesic_unit_speed", speed);

    let conformal: Vec<f64> = (0..500)
        .map(|_| {
            let chart = ChartFrame::new(&random_sphere(&mut rng));
            let z = Complex64::from_polar(rng.random_range(0.0..2.0), rng.random_range(0.0..6.3));
            let dz = Complex64::from_polar(1e-4, rng.random_range(0.0..6.3));
            let chord = (chart.from_chart(z + dz).coords() - chart.from_chart(z).coords()).norm();
            (chord - chart.gamma(z) * dz.norm()).abs()
        })
        .collect();
    s.record("chart_conformality", conformal);

    // hypercycles at distance d from a geodesic have curvature tanh d < 1
    let convex: Vec<f64> = (0..60)
        .map(|_| {
            let d: f64 = rng.random_range(0.0..1.0);
            let shift = *random_ball(&mut rng, 0.7).coords();
            let p = random_ball(&mut rng, 0.9);
            let h = 0.01;
            let curve: Vec<BallPoint> = (-100..=100)
                .map(|k| {
                    let s_geo = k as f64 * h / d.cosh();
                    let base = BallPoint::new(Vec3::new((0.5 * s_geo).tanh(), 0.0, 0.0)).expect("inside");
                    let q = geodesic_flow(&TangentVector::new(base, Vec3::z()).normalized().expect("unit"), d)
                        .expect("finite");
                    BallPoint::new(mobius_add(&shift, q.coords())).expect("isometry keeps the ball")
                })
                .collect();
            let r = cosh_distance_convexity(&curve, &p, h, DEFAULT_CONVEXITY_C).expect("enough samples");
            (-r.min_second_difference).max(0.0)
        })
        .collect();
    s.record("distance_convexity", convex);
}

fn fields_suite(s: &mut Suite) {
    let mut rng = rng_for(s.name);
    let maps = disk_maps();
    let commute: Vec<f64> = (0..300)
        .map(|_| {
            let (field, p) = field_sample(&mut rng, &maps);
            let t: f64 = rng.random_range(-3.0..3.0);
            let a = field.eval_jet(&p).expect("sampled inside");
            let b = field.clone().with_offset(t).eval_jet(&p).expect("sampled inside");
            let exact = a.grad == b.grad && a.hess == b.hess;
            let drho = (b.rho - (a.rho + t)).abs() / (1.0 + a.rho.abs() + t.abs());
            if exact && drho <= 4.0 * f64::EPSILON {
                0.0
            } else {
                drho.max(1.0)
            }
        })
        .collect();
    s.record("offset_commutation", commute);

    let h = crate::fields::DEFAULT_FD_STEP;
    let fd: Vec<f64> = (0..300)
        .filter_map(|_| {
            let (field, p) = catalog_sample(&mut rng);
            let a = field.eval_jet(&p).ok()?;
            if a.rho.abs() > 1.0 || a.hess.iter().any(|x| x.abs() > 2.0) {
                return None;
            }
            let src = field.clone();
            let tab = RhoField::tabulated(
                std::sync::Arc::new(move |q: &SpherePoint| src.value(q).unwrap_or(f64::NAN)),
                DomainSpec::whole(),
                h,
            )
            .expect("positive step");
            let b = tab.eval_jet(&p).ok()?;
            let diffs = [
                a.rho - b.rho,
                a.grad[0] - b.grad[0],
                a.grad[1] - b.grad[1],
                a.hess[0] - b.hess[0],
                a.hess[1] - b.hess[1],
                a.hess[2] - b.hess[2],
            ];
            Some(diffs.iter().fold(0.0f64, |m, d| m.max(d.abs())))
        })
        .collect();
    s.record("difference_jet", fd);

    let mut metric = Vec::new();
    let mut estimate = Vec::new();
    for map in &maps {
        let field = RhoField::conformal(map.clone(), map_chart()).expect("lands in the disk");
        let simply = map.onto_disk() && map.domain().simply_connected_sides().iter().all(|&b| b);
        for _ in 0..125 {
            let w = interior_point(map, &mut rng, 1e-3);
            let p = field.point_at(w);
            let Ok(j) = field.eval_jet(&p) else { continue };
            if j.rho > 12.0 {
                continue;
            }
            metric.push((k_infinity_of(&j) + 1.0).abs());
            if simply {
                // gamma e^rho = sqrt(mu) lies in [1/(2 delta), 2/delta]
                let dens = map_chart().gamma(w) * j.rho.exp();
                let delta = map.domain().distance(w);
                let (lo, hi) = (0.5 / delta, 2.0 / delta);
                estimate.push(((lo - dens) / lo).max((dens - hi) / hi).max(0.0));
            }
        }
    }
    s.record("metric_equation", metric);
    s.record("distance_estimate", estimate);
}

fn polar_thetas(center: &SpherePoint, angle: f64) -> Vec<SpherePoint> {
    SampleGrid::geodesic_polar(center, angle, 20, 50).expect("valid grid").sphere_points()
}

fn envelope_suite(s: &mut Suite) {
    let mut rng = rng_for(s.name);
    let maps = disk_maps();
    let opts = EnvelopeOptions::default();
    let samples: Vec<(RhoField, SpherePoint)> = (0..300).map(|_| field_sample(&mut rng, &maps)).collect();
    let eps = 1e-5;

    let mut cond = Vec::new();
    let mut tangent = Vec::new();
    let mut gauss = Vec::new();
    let mut asym = Vec::new();
    let mut form = Vec::new();
    let mut speed = Vec::new();
    for (field, theta) in &samples {
        let j = field.eval_jet(theta).expect("sampled inside");
        let r_pt = envelope_point(field, theta).expect("sampled inside");
        let chart = crate::hyperbolic::chart_at(theta);
        let h0 = horosphere_shape(theta, j.rho).expect("sampled inside");
        let r0 = h0.euclid_radius;
        let y = (r_pt.coords() - h0.euclid_center) / r0;
        // the residual is stationary in theta: Y . dC + dr = 0 for both chart axes
        let (ex, ey) = chart.tangent_basis();
        let (a, b) = (1.0 / (1.0 + (-j.rho).exp()), 1.0 / (1.0 + j.rho.exp()));
        let stationary = [(ex, j.grad[0]), (ey, j.grad[1])]
            .iter()
            .map(|(e, dr)| {
                let dc = e * a + theta.coords() * (a * b * dr);
                (y.dot(&dc) - a * b * dr).abs()
            })
            .fold(0.0, f64::max);
        cond.push((h0.residual(r_pt.coords()) / r0).abs().max(stationary));
        let dr = |z: Complex64| envelope_point(field, &chart.from_chart(z)).map(|b| *b.coords());
        if let (Ok(xp), Ok(xm), Ok(yp), Ok(ym)) =
            (dr(cz(eps, 0.0)), dr(cz(-eps, 0.0)), dr(cz(0.0, eps)), dr(cz(0.0, -eps)))
        {
            let (rx, ry) = ((xp - xm) / (2.0 * eps), (yp - ym) / (2.0 * eps));
            if rx.norm() > 1e-6 && ry.norm() > 1e-6 {
                tangent.push((rx.dot(&y) / rx.norm()).abs().max((ry.dot(&y) / ry.norm()).abs()));
            }
        }
        let n = normal_vector(field, theta).expect("sampled inside");
        gauss.push((geodesic_endpoint(&n).expect("unit normal").coords() - theta.coords()).norm());
        let g10 = fundamental_forms(&j.shifted(10.0)).g * (4.0 * (-20.0f64).exp());
        let e2 = (2.0 * j.rho).exp();
        asym.push((g10 - Matrix2::identity() * e2).norm() / e2);
        if let Ok(sj) = shape_operator(theta, &j, &opts) {
            let (a, b) = curvature_forms(&j, &sj);
            form.push((a - b).abs() / (1.0 + b.abs()));
        }
        let hs = 1e-3;
        let at = |t: f64| *envelope_point_of(theta, &j.shifted(t)).expect("finite").coords();
        let v = (at(-2.0 * hs) - at(2.0 * hs) + (at(hs) - at(-hs)) * 8.0) / (12.0 * hs);
        speed.push((metric_inner(&r_pt, &v, &v) - 1.0).abs());
    }
    s.record("envelope_condition", cond);
    s.record("tangent_plane", tangent);
    s.record("gauss_map", gauss);
    s.record("asymptotic_metric", asym);
    s.record("curvature_form", form);
    s.record("unit_normal_flow", speed);

    let mut sphere_k = Vec::new();
    let mut sphere_r = Vec::new();
    for c in [0.5f64, 1.0, 2.0] {
        let field = RhoField::constant(c);
        for theta in polar_thetas(&SpherePoint::south(), 3.0) {
            let sj = surface_jet(&field, &theta, &opts).expect("sphere is regular");
            let want = -1.0 / c.tanh();
            sphere_k.push((sj.k1 - want).abs().max((sj.k2 - want).abs()));
            sphere_r.push((sj.position.coords().norm() - (0.5 * c).tanh()).abs());
        }
    }
    s.record("sphere_curvature", sphere_k);
    s.record("sphere_radius", sphere_r);

    let mut cat_k = Vec::new();
    let mut cat_inf = Vec::new();
    let normal = random_sphere(&mut rng);
    let plane = RhoField::geodesic_plane(normal);
    for theta in polar_thetas(&normal, 1.3) {
        let j = plane.eval_jet(&theta).expect("inside the hemisphere");
        let sj = shape_operator(&theta, &j, &opts).expect("regular");
        cat_k.push(sj.k1.abs().max(sj.k2.abs()));
        cat_inf.push((k_infinity_of(&j) + 1.0).abs());
    }
    let q = random_sphere(&mut rng);
    let horo = RhoField::horosphere(q, 0.0);
    for theta in polar_thetas(&q.antipode(), 2.5) {
        let j = horo.eval_jet(&theta).expect("away from the tangency");
        let sj = shape_operator(&theta, &j, &opts).expect("regular");
        cat_k.push((sj.k1 + 1.0).abs().max((sj.k2 + 1.0).abs()));
        cat_inf.push(k_infinity_of(&j).abs());
    }
    s.record("catalog_curvature", cat_k);
    s.record("catalog_k_infinity", cat_inf);
}

/// `g0` symmetric positive definite and `Pi0 = g0 S` with `S` self-adjoint
/// for `g0` and eigenvalues `k1, k2`.
fn forms_with_curvatures(rng: &mut ChaCha8Rng, k1: f64, k2: f64) -> (Matrix2<f64>, Matrix2<f64>) {
    let l = Matrix2::new(rng.random_range(0.3..3.0), 0.0, rng.random_range(-1.0..1.0), rng.random_range(0.3..3.0));
    let g0 = l * l.transpose();
    let phi: f64 = rng.random_range(0.0..3.1);
    let r = Matrix2::new(phi.cos(), -phi.sin(), phi.sin(), phi.cos());
    let sym = r * Matrix2::new(k1, 0.0, 0.0, k2) * r.transpose();
    let linv = l.try_inverse().expect("triangular with positive diagonal");
    (g0, g0 * (linv.transpose() * sym * l.transpose()))
}

fn flow_suite(s: &mut Suite) {
    let mut rng = rng_for(s.name);
    let maps = disk_maps();
    let closure: Vec<f64> = (0..250)
        .flat_map(|_| {
            let (field, theta) = field_sample(&mut rng, &maps);
            let j = field.eval_jet(&theta).expect("sampled inside");
            let f0 = fundamental_forms(&j);
            // the geodesic field envelopes a curve; its g0 is singular
            let regular = f0.g.determinant().abs() > 1e-9 * f0.g.norm_squared();
            let state = decompose_flow(&f0.g, &f0.pi_low).ok().filter(|_| regular);
            [-1.0, -0.5, 0.5, 1.0]
                .into_iter()
                .filter_map(|t| {
                    let (g, pi) = state?.evaluate(t);
                    let ft = fundamental_forms(&j.shifted(t));
                    let scale = 1.0 + ft.g.norm() + ft.pi_low.norm();
                    Some((g - ft.g).norm().max((pi - ft.pi_low).norm()) / scale)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    s.record("flow_closure", closure);

    let h = 1e-4;
    let ode: Vec<f64> = (0..1000)
        .map(|_| {
            let k0: f64 = rng.random_range(-0.95..0.95);
            let t: f64 = rng.random_range(-3.0..3.0);
            let d = (flow_k(k0, t + h).expect("no blowup") - flow_k(k0, t - h).expect("no blowup")) / (2.0 * h);
            let k = flow_k(k0, t).expect("no blowup");
            (d - (k * k - 1.0)).abs()
        })
        .collect();
    s.record("curvature_ode", ode);

    let mut ks = vec![1.5, 2.0, 5.0, -1.5, -2.0, -5.0];
    ks.extend((0..30).map(|_| rng.random_range(1.05..8.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }));
    let bracket: Vec<f64> = ks
        .iter()
        .map(|&k| {
            let other = rng.random_range(-0.9..0.9);
            let (g0, pi0) = forms_with_curvatures(&mut rng, k, other);
            let st = decompose_flow(&g0, &pi0).expect("regular data");
            let t_star = arccoth(k).expect("|k| > 1");
            match st.bracket_focal(t_star - 0.25, t_star + 0.25, 1e-12) {
                Ok((a, b)) => (a - t_star).abs().max((b - t_star).abs()),
                Err(_) => f64::NAN,
            }
        })
        .collect();
    s.record("focal_bracket", bracket);

    let preserve: Vec<f64> = (0..1000)
        .map(|_| {
            let k0: f64 = rng.random_range(-1.0..=1.0);
            let t: f64 = rng.random_range(-10.0..10.0);
            (flow_k(k0, t).expect("bounded").abs() - 1.0).max(0.0)
        })
        .collect();
    s.record("convexity_preservation", preserve);

    let grid: Vec<f64> = (0..=60).map(|i| -3.0 + 0.1 * i as f64).collect();
    let k2g: Vec<f64> = (0..100)
        .map(|i| {
            let (k1, k2) = if i % 2 == 0 {
                (rng.random_range(-0.95..0.95), rng.random_range(-0.95..0.95))
            } else {
                (rng.random_range(1.2..4.0), rng.random_range(-4.0..-1.2))
            };
            let (g0, pi0) = forms_with_curvatures(&mut rng, k1, k2);
            let focal = focal_times(k1, k2);
            let times: Vec<f64> =
                grid.iter().copied().filter(|t| focal.iter().all(|f| (f.t - t).abs() > 0.02)).collect();
            flow_invariants(&g0, &pi0, &times, 1e-6).map(|r| r.max_k2g_deviation).unwrap_or(f64::NAN)
        })
        .collect();
    s.record("k2g_invariance", k2g);

    let sign: Vec<f64> = (0..300)
        .filter_map(|_| {
            let (k1, k2): (f64, f64) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let k0 = k1 * k2 - 1.0;
            if k0 >= 0.0 {
                return None;
            }
            let first = focal_times(k1, k2).into_iter().find(|f| f.t > 0.0).map(|f| f.t);
            if first.is_some_and(|t| t > 4.9) {
                return None;
            }
            let crossed = (1..=200).any(|i| match flow_kh(k0, k1 + k2, 0.025 * i as f64) {
                Ok((k, _)) => k >= 0.0,
                Err(_) => true,
            });
            Some(if crossed == first.is_some() { 0.0 } else { 1.0 })
        })
        .collect();
    s.record("gauss_sign_rule", sign);
}

fn mobius_holo(z: Complex64, a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Holo {
    let den = c * z + d;
    let det = a * d - b * c;
    Holo {
        f: (a * z + b) / den,
        d1: det / (den * den),
        d2: -2.0 * c * det / den.powi(3),
        d3: 6.0 * c * c * det / den.powi(4),
    }
}

fn weingarten_suite(s: &mut Suite) {
    let mut rng = rng_for(s.name);
    let maps = disk_maps();
    let opts = EnvelopeOptions::default();

    let cocycle: Vec<f64> = (0..500)
        .map(|_| {
            let map = &maps[rng.random_range(0..maps.len())];
            let w0 = interior_point(map, &mut rng, 0.05);
            let small = |r: &mut ChaCha8Rng| cz(r.random_range(-0.2..0.2), r.random_range(-0.2..0.2));
            let (a, c, d) = (cz(1.0, 0.0) + small(&mut rng), small(&mut rng), cz(1.0, 0.0) + small(&mut rng));
            // m(0) = w0
            let m = mobius_holo(cz(0.0, 0.0), a, w0 * d, c, d);
            let fw = map.eval(m.f).expect("interior");
            let comp = m.compose(fw.f, fw.d1, fw.d2, fw.d3);
            let want = fw.schwarzian() * m.d1 * m.d1;
            (comp.schwarzian() - want).norm() / (1.0 + want.norm())
        })
        .collect();
    s.record("schwarzian_cocycle", cocycle);

    let class_a = [
        ConformalMapSpec::identity(),
        ConformalMapSpec::polynomial(vec![cz(0.0, 0.0), cz(0.5, 0.0), cz(0.05, 0.0)], 1.0).expect("polynomial"),
    ];
    let mut cross = Vec::new();
    let mut relation = Vec::new();
    for map in &class_a {
        let field = RhoField::conformal(map.clone(), map_chart()).expect("lands in the disk");
        for _ in 0..250 {
            let w = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(0.0..6.3));
            let theta = field.point_at(w);
            let sr = ratio(map, w).expect("interior").s;
            let want = weingarten_curvatures(sr, 0.0).expect("s < 1/2");
            let sj = surface_jet(&field, &theta, &opts).expect("regular");
            let (lo, hi) = (want.k_minus.min(want.k_plus), want.k_minus.max(want.k_plus));
            cross.push((sj.k1 - lo).abs().max((sj.k2 - hi).abs()));
            for t in [0.0, 0.5] {
                let st = surface_jet(&field.clone().with_offset(t), &theta, &opts).expect("regular");
                let alpha = -(-2.0 * t).exp();
                relation.push(((1.0 - alpha) * st.gauss - alpha * (2.0 - st.mean)).abs());
            }
        }
    }
    s.record("weingarten_curvatures", cross);
    s.record("weingarten_relation", relation);

    let k = ratio(&ConformalMapSpec::koebe(), cz(0.0, 0.0)).expect("interior");
    s.record("kraus_equality", [(k.schwarzian.norm() - 1.5 * k.mu).abs() / k.mu]);

    let univalent = [
        ConformalMapSpec::identity(),
        ConformalMapSpec::mobius(cz(1.0, 0.0), cz(0.3, 0.1), cz(0.2, 0.0), cz(1.0, 0.0)).expect("mobius"),
        ConformalMapSpec::koebe(),
        ConformalMapSpec::koebe_function(),
        ConformalMapSpec::power(0.625).expect("power"),
        ConformalMapSpec::power(2.0).expect("power"),
        ConformalMapSpec::strip(2.0).expect("strip"),
        ConformalMapSpec::polynomial(vec![cz(0.0, 0.0), cz(0.5, 0.0), cz(0.05, 0.0)], 1.0).expect("polynomial"),
    ];
    let mut distance_bound = Vec::new();
    for map in &univalent {
        let samples: Vec<Complex64> = (0..500).map(|_| interior_point(map, &mut rng, 1e-3)).collect();
        let dom = DomainSpec::planar(map_chart(), map.domain().clone());
        let r = univalence_bounds(map, &dom, &samples).expect("samples inside");
        let c = r.check("schwarzian_distance").expect("always present");
        distance_bound.push((-c.worst_margin).max(0.0));
    }
    s.record("schwarzian_distance", distance_bound);

    let disk: Vec<Complex64> =
        (0..400).map(|_| Complex64::from_polar(rng.random_range(0.0..0.95), rng.random_range(0.0..6.3))).collect();
    let sector: Vec<Complex64> = (0..400)
        .map(|_| {
            Complex64::from_polar(rng.random_range(0.05..2.0), rng.random_range(0.01..1.59 * std::f64::consts::PI))
        })
        .collect();
    let mut koebe_pts: Vec<Complex64> =
        (0..400).map(|_| interior_point(&ConformalMapSpec::koebe(), &mut rng, 1e-3)).collect();
    koebe_pts.push(cz(0.0, 0.0));
    let classes = [
        (ConformalMapSpec::identity(), disk, RegularityClass::A),
        (ConformalMapSpec::power(0.625).expect("power"), sector, RegularityClass::B),
        (ConformalMapSpec::koebe(), koebe_pts, RegularityClass::C),
    ];
    let mut class_dev: Vec<f64> = classes
        .iter()
        .map(|(m, pts, want)| match regularity_classify(m, pts, -0.4) {
            Ok(r) if r.class == *want => 0.0,
            _ => 1.0,
        })
        .collect();
    let a47 = alpha_bound(24.0);
    class_dev.push(if (immersion_threshold(-a47) - 24.0).abs() < 1e-12 && (a47 - 1.0 / 47.0).abs() < 1e-15 {
        0.0
    } else {
        1.0
    });
    s.record("regularity_classes", class_dev);

    let ortho: Vec<f64> = (0..500)
        .map(|_| {
            let sv = Complex64::from_polar(
                rng.random_range(0.01..10.0),
                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            );
            (trajectory_direction(sv, Family::Plus) * trajectory_direction(sv, Family::Minus).conj()).re.abs()
        })
        .collect();
    s.record("trajectory_orthogonality", ortho);

    let sq = ConformalMapSpec::power(2.0).expect("power");
    let mut defect = Vec::new();
    let mut fit = Vec::new();
    for (r0, a0, family) in
        [(2.0, 0.78, Family::Plus), (1.5, 0.3, Family::Plus), (0.5, 0.6, Family::Minus), (0.2, 1.2, Family::Minus)]
    {
        let z0 = Complex64::from_polar(r0, a0);
        let tr = curvature_line_trace(&sq, &TrajectorySeed { z0, family, step: 1e-3, max_steps: 1000 })
            .expect("interior seed");
        defect.push(tr.max_defect);
        let dev = tr
            .points
            .iter()
            .map(|z| match family {
                Family::Plus => (z.norm() - r0).abs(),
                Family::Minus => (z * Complex64::from_polar(1.0, -a0)).im.abs(),
            })
            .fold(0.0, f64::max);
        fit.push(dev);
    }
    s.record("trajectory_defect", defect);
    s.record("trajectory_fit", fit);

    let map = ConformalMapSpec::power(0.625).expect("power");
    let field = RhoField::conformal(map.clone(), map_chart()).expect("lands in the disk");
    let chart = map_chart();
    let dirs: Vec<f64> = (0..200)
        .filter_map(|_| {
            let w = interior_point(&map, &mut rng, 0.05);
            let theta = field.point_at(w);
            let sj = surface_jet(&field, &theta, &opts).ok()?;
            let sv = schwarzian(&map, w).ok()?;
            if sj.umbilic || sv.norm() < 1e-8 {
                return None;
            }
            let jac = chart.transition_jet(&crate::hyperbolic::chart_at(&theta)).ok()?.jacobian();
            let kp = weingarten_curvatures(ratio(&map, w).ok()?.s, 0.0).ok()?.k_plus;
            let worst = (0..2)
                .map(|i| {
                    let v = sj.dirs[i];
                    let pushed = cz(jac[0][0] * v.x + jac[0][1] * v.y, jac[1][0] * v.x + jac[1][1] * v.y);
                    let k = if i == 0 { sj.k1 } else { sj.k2 };
                    let fam = if (k - kp).abs() <= (k - (kp / (2.0 * kp - 1.0))).abs() {
                        Family::Plus
                    } else {
                        Family::Minus
                    };
                    (pushed / pushed.norm() * trajectory_direction(sv, fam).conj()).im.abs()
                })
                .fold(0.0, f64::max);
            Some(worst)
        })
        .collect();
    s.record("principal_directions", dirs);
}

fn cli_suite(s: &mut Suite) {
    let field = RhoField::constant(1.0);
    let grid = SampleGrid::geodesic_polar(&SpherePoint::south(), 2.5, 8, 16).expect("valid grid");
    let fg = filter_by_field(&grid, &field, 12.0).expect("whole sphere");
    let offsets = [0.0, 0.5, -0.5, -1.0];
    let run = || surface_layers(&field, &fg.grid, &offsets);
    let (a, b) = (run(), run());
    let round_trip: Vec<f64> = match &a {
        Ok(layers) => layers
            .iter()
            .map(|l| {
                let text = String::from_utf8(l.mesh.obj_bytes()).expect("ascii");
                match parse_obj(&text) {
                    Ok((v, t)) if v == l.mesh.vertices() && t == l.mesh.triangles() => 0.0,
                    _ => 1.0,
                }
            })
            .collect(),
        Err(_) => vec![f64::NAN],
    };
    s.record("obj_round_trip", round_trip);
    let same = match (&a, &b) {
        (Ok(x), Ok(y)) => x
            .iter()
            .zip(y)
            .all(|(p, q)| p.mesh.obj_bytes() == q.mesh.obj_bytes() && p.mesh.csv_bytes() == q.mesh.csv_bytes()),
        _ => false,
    };
    s.record("determinism", [if same { 0.0 } else { 1.0 }]);
    let thetas = fg.grid.sphere_points();
    let flags: Vec<f64> = match &a {
        Ok(layers) => layers
            .iter()
            .map(|l| focal_flag_mismatches(&field, &thetas, l).map(|n| n as f64).unwrap_or(f64::NAN))
            .collect(),
        Err(_) => vec![f64::NAN],
    };
    s.record("focal_flags", flags);
}

/// Runs one suite, or all of them in a fixed order.
pub fn run_verify(suite: Option<&str>, tol: &Tolerances) -> Result<VerifyReport, String> {
    let selected: Vec<&'static str> = match suite {
        None | Some("all") => SUITES.to_vec(),
        Some(name) => vec![*SUITES
            .iter()
            .find(|s| **s == name)
            .ok_or_else(|| format!("unknown suite '{name}'; expected one of {}", SUITES.join(", ")))?],
    };
    let mut records = Vec::new();
    for name in selected {
        let mut s = Suite { name, tol, records: Vec::new() };
        match name {
            "hyperbolic" => hyperbolic_suite(&mut s),
            "fields" => fields_suite(&mut s),
            "envelope" => envelope_suite(&mut s),
            "flow" => flow_suite(&mut s),
            "weingarten" => weingarten_suite(&mut s),
            _ => cli_suite(&mut s),
        }
        records.extend(s.records);
    }
    let pass = records.iter().all(|r| r.pass);
    Ok(VerifyReport { suite: suite.unwrap_or("all").to_string(), seed: VERIFY_SEED, records, pass })
}
