//! Catalog of conformal maps from planar domains into the unit disk, with
//! exact derivatives through third order.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::domain::PlanarDomain;
use crate::error::{GeomError, Result};
use crate::jet::Holo;

/// Catalog entry.
#[derive(Debug, Clone, PartialEq)]
pub enum MapKind {
    /// `w` on the unit disk.
    Identity,
    /// `(a w + b)/(c w + d)` on the preimage of the unit disk.
    Mobius { a: Complex64, b: Complex64, c: Complex64, d: Complex64 },
    /// Inverse of the Koebe function: the slit plane `C \ (-inf, -1/4]`
    /// onto the disk, `(q - 1)/(q + 1)` with `q = sqrt(1 + 4w)`.
    Koebe,
    /// The Koebe function `w/(1-w)^2` on the unit disk (univalent, not into
    /// the disk).
    KoebeFunction,
    /// Cayley transform of `w^p` on the sector `0 < arg w < pi/p`.
    Power { p: f64 },
    /// Cayley transform of `exp(pi w / width)` on `0 < Im w < width`.
    Strip { width: f64 },
    /// Cayley transform of `exp(i pi log(w/inner)/log(outer/inner))` on
    /// `inner < |w| < outer`; locally univalent, multivalued.
    Annulus { inner: f64, outer: f64 },
    /// `sum c_k w^k` on `|w| < radius`.
    Polynomial { coeffs: Vec<Complex64>, radius: f64 },
}

/// A holomorphic, locally univalent map `f` on a planar domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMapSpec {
    kind: MapKind,
    domain: PlanarDomain,
    univalent: bool,
    locally_univalent: bool,
    /// `f` maps onto the unit disk (possibly as a covering), so that the
    /// pulled-back density is the complete hyperbolic density of the domain.
    onto_disk: bool,
    into_disk: bool,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn cayley(h: &Holo) -> Holo {
    let i = Complex64::i();
    h.add_const(-i).div(&h.add_const(i))
}

/// `w^p` on the branch with `arg w` in `[0, 2 pi)`.
fn pow_upper(h: &Holo, p: f64) -> Holo {
    let w = h.f;
    let mut arg = w.im.atan2(w.re);
    if arg < 0.0 {
        arg += TAU;
    }
    let v = Complex64::from_polar(w.norm().powf(p), p * arg);
    let pc = c(p);
    h.compose(v, pc * v / w, pc * (pc - 1.0) * v / (w * w), pc * (pc - 1.0) * (pc - 2.0) * v / (w * w * w))
}

/// Preimage of the unit disk under `(a w + b)/(c w + d)`.
fn mobius_domain(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> PlanarDomain {
    let big_a = a.norm_sqr() - cc.norm_sqr();
    let big_b = a * b.conj() - cc * d.conj();
    let big_c = b.norm_sqr() - d.norm_sqr();
    if big_a.abs() < 1e-14 {
        let n = big_b.conj() / big_b.norm();
        return PlanarDomain::HalfPlane { normal: n, offset: -big_c / (2.0 * big_b.norm()) };
    }
    let center = -big_b.conj() / big_a;
    let radius = ((big_b.norm_sqr() / big_a - big_c) / big_a).sqrt();
    if big_a > 0.0 {
        PlanarDomain::Disk { center, radius }
    } else {
        PlanarDomain::Exterior { center, radius }
    }
}

impl ConformalMapSpec {
    pub fn identity() -> Self {
        Self::onto(MapKind::Identity, PlanarDomain::Disk { center: c(0.0), radius: 1.0 })
    }

    fn onto(kind: MapKind, domain: PlanarDomain) -> Self {
        Self { kind, domain, univalent: true, locally_univalent: true, onto_disk: true, into_disk: true }
    }

    pub fn mobius(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * cc;
        if det.norm() < 1e-14 {
            return Err(GeomError::Singular { det: det.norm() });
        }
        Ok(Self::onto(MapKind::Mobius { a, b, c: cc, d }, mobius_domain(a, b, cc, d)))
    }

    pub fn koebe() -> Self {
        Self::onto(MapKind::Koebe, PlanarDomain::SlitPlane { tip: -0.25 })
    }

    pub fn koebe_function() -> Self {
        Self {
            kind: MapKind::KoebeFunction,
            domain: PlanarDomain::Disk { center: c(0.0), radius: 1.0 },
            univalent: true,
            locally_univalent: true,
            onto_disk: false,
            into_disk: false,
        }
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 0.5 && p.is_finite()) {
            return Err(GeomError::InvalidInput(format!("power exponent {p} must be >= 1/2")));
        }
        Ok(Self::onto(MapKind::Power { p }, PlanarDomain::Sector { opening: PI / p }))
    }

    pub fn strip(width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(GeomError::InvalidInput("strip width must be positive".into()));
        }
        Ok(Self::onto(MapKind::Strip { width }, PlanarDomain::Strip { width }))
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(GeomError::InvalidInput("annulus needs 0 < inner < outer".into()));
        }
        let mut m =
            Self::onto(MapKind::Annulus { inner, outer }, PlanarDomain::Annulus { center: c(0.0), inner, outer });
        m.univalent = false;
        Ok(m)
    }

    /// Polynomial map on `|w| < radius`. The image is checked to lie in the
    /// unit disk on the boundary circle (maximum modulus); univalence on the
    /// disk is the caller's claim.
    pub fn polynomial(coeffs: Vec<Complex64>, radius: f64) -> Result<Self> {
        if coeffs.is_empty() || !(radius > 0.0) {
            return Err(GeomError::InvalidInput("polynomial needs coefficients and a positive radius".into()));
        }
        let m = Self {
            kind: MapKind::Polynomial { coeffs, radius },
            domain: PlanarDomain::Disk { center: c(0.0), radius },
            univalent: true,
            locally_univalent: true,
            onto_disk: false,
            into_disk: true,
        };
        let n = 4096;
        for k in 0..n {
            let w = Complex64::from_polar(radius, TAU * k as f64 / n as f64);
            let f = m.holo_unchecked(w).f;
            if f.norm() >= 1.0 {
                return Err(GeomError::OutsideDisk { modulus: f.norm() });
            }
        }
        Ok(m)
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn domain(&self) -> &PlanarDomain {
        &self.domain
    }

    pub fn univalent(&self) -> bool {
        self.univalent
    }

    pub fn locally_univalent(&self) -> bool {
        self.locally_univalent
    }

    pub fn onto_disk(&self) -> bool {
        self.onto_disk
    }

    pub fn into_disk(&self) -> bool {
        self.into_disk
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            MapKind::Identity => "identity",
            MapKind::Mobius { .. } => "mobius",
            MapKind::Koebe => "koebe",
            MapKind::KoebeFunction => "koebe_function",
            MapKind::Power { .. } => "power",
            MapKind::Strip { .. } => "strip",
            MapKind::Annulus { .. } => "annulus",
            MapKind::Polynomial { .. } => "polynomial",
        }
    }

    fn holo_unchecked(&self, w: Complex64) -> Holo {
        let z = Holo::var(w);
        match &self.kind {
            MapKind::Identity => z,
            MapKind::Mobius { a, b, c, d } => z.scale(*a).add_const(*b).div(&z.scale(*c).add_const(*d)),
            MapKind::Koebe => {
                let q = z.scale(c(4.0)).add_const(c(1.0)).sqrt();
                q.add_const(c(-1.0)).div(&q.add_const(c(1.0)))
            }
            MapKind::KoebeFunction => {
                let one_minus = z.scale(c(-1.0)).add_const(c(1.0));
                z.div(&one_minus.mul(&one_minus))
            }
            MapKind::Power { p } => cayley(&pow_upper(&z, *p)),
            MapKind::Strip { width } => cayley(&z.scale(c(PI / width)).exp()),
            MapKind::Annulus { inner, outer } => {
                let l = (outer / inner).ln();
                let e = z.ln().add_const(c(-inner.ln())).scale(Complex64::new(0.0, PI / l));
                cayley(&e.exp())
            }
            MapKind::Polynomial { coeffs, .. } => {
                let zero = c(0.0);
                let (mut f, mut d1, mut d2, mut d3) = (zero, zero, zero, zero);
                for &a in coeffs.iter().rev() {
                    d3 = d3 * w + 3.0 * d2;
                    d2 = d2 * w + 2.0 * d1;
                    d1 = d1 * w + f;
                    f = f * w + a;
                }
                Holo { f, d1, d2, d3 }
            }
        }
    }

    /// `(f, f', f'', f''')` at `w`.
    pub fn eval(&self, w: Complex64) -> Result<Holo> {
        if !self.domain.contains(w) {
            return Err(GeomError::OutsideDomain);
        }
        let h = self.holo_unchecked(w);
        if h.d1.norm() == 0.0 {
            return Err(GeomError::VanishingDerivative);
        }
        if !(h.f.norm().is_finite() && h.d3.norm().is_finite()) {
            return Err(GeomError::OutsideDomain);
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Derivatives by complex central differences of `f`.
    fn fd_check(m: &ConformalMapSpec, w: Complex64) {
        let h = 1e-4;
        let f = |z: Complex64| m.eval(z).unwrap();
        let d1 = (f(w + h).f - f(w - h).f) / (2.0 * h);
        let d2 = (f(w + h).d1 - f(w - h).d1) / (2.0 * h);
        let d3 = (f(w + h).d2 - f(w - h).d2) / (2.0 * h);
        let e = f(w);
        let tol = |x: Complex64| 1e-6 * (1.0 + x.norm());
        assert!((e.d1 - d1).norm() < tol(e.d1), "{} d1", m.name());
        assert!((e.d2 - d2).norm() < tol(e.d2), "{} d2", m.name());
        assert!((e.d3 - d3).norm() < tol(e.d3), "{} d3", m.name());
    }

    #[test]
    fn catalog_derivatives_match_differences() {
        fd_check(&ConformalMapSpec::identity(), cz(0.3, 0.2));
        fd_check(
            &ConformalMapSpec::mobius(cz(1.0, 0.0), cz(0.2, 0.1), cz(0.3, 0.0), cz(1.0, 0.0)).unwrap(),
            cz(0.1, 0.3),
        );
        fd_check(&ConformalMapSpec::koebe(), cz(0.4, -0.7));
        fd_check(&ConformalMapSpec::koebe_function(), cz(0.2, 0.3));
        fd_check(&ConformalMapSpec::power(0.625).unwrap(), cz(-0.5, -0.4));
        fd_check(&ConformalMapSpec::power(2.0).unwrap(), cz(0.6, 0.5));
        fd_check(&ConformalMapSpec::strip(2.0).unwrap(), cz(0.3, 0.7));
        fd_check(&ConformalMapSpec::annulus(1.0, 3.0).unwrap(), cz(-1.2, 0.9));
        fd_check(
            &ConformalMapSpec::polynomial(vec![cz(0.0, 0.0), cz(0.5, 0.0), cz(0.05, 0.0)], 1.0).unwrap(),
            cz(0.2, -0.3),
        );
    }

    #[test]
    fn catalog_maps_land_in_disk() {
        let maps = [
            (ConformalMapSpec::koebe(), cz(-3.0, 0.01)),
            (ConformalMapSpec::power(0.625).unwrap(), cz(0.3, 0.01)),
            (ConformalMapSpec::strip(1.0).unwrap(), cz(-4.0, 0.999)),
            (ConformalMapSpec::annulus(1.0, 3.0).unwrap(), cz(0.0, -2.99)),
        ];
        for (m, w) in maps {
            assert!(m.eval(w).unwrap().f.norm() < 1.0, "{}", m.name());
        }
    }

    #[test]
    fn inverse_koebe_inverts_koebe() {
        let k = ConformalMapSpec::koebe_function();
        let ki = ConformalMapSpec::koebe();
        for z in [cz(0.3, 0.1), cz(-0.5, 0.4), cz(0.0, -0.8)] {
            let w = k.eval(z).unwrap().f;
            assert!((ki.eval(w).unwrap().f - z).norm() < 1e-12);
        }
    }

    #[test]
    fn mobius_domain_is_the_preimage_of_the_disk() {
        let (a, b, cc, d) = (cz(2.0, 1.0), cz(0.3, -0.2), cz(0.5, 0.5), cz(1.0, -1.0));
        let m = ConformalMapSpec::mobius(a, b, cc, d).unwrap();
        for k in 0..50 {
            let w = cz(-2.0 + 0.08 * k as f64, 0.37 - 0.03 * k as f64);
            let img = (a * w + b) / (cc * w + d);
            if (img.norm() - 1.0).abs() > 1e-9 {
                assert_eq!(m.domain().contains(w), img.norm() < 1.0, "{w}");
            }
        }
    }

    #[test]
    fn polynomial_escaping_disk_is_rejected() {
        assert!(ConformalMapSpec::polynomial(vec![cz(0.0, 0.0), cz(1.2, 0.0)], 1.0).is_err());
    }

    #[test]
    fn outside_domain_is_rejected() {
        assert_eq!(ConformalMapSpec::identity().eval(cz(1.0, 0.5)), Err(GeomError::OutsideDomain));
        assert_eq!(ConformalMapSpec::koebe().eval(cz(-1.0, 0.0)), Err(GeomError::OutsideDomain));
    }
}
