//! Forward-mode jets used to get exact chart derivatives.
//!
//! [`Jet2`] carries a real function of two chart variables `(x, y)` together
//! with its gradient and Hessian at one point. [`CJet2`] is the complex-valued
//! counterpart, and [`Holo`] is a holomorphic function of one complex
//! variable with its first three complex derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Second-order jet of a real function of `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub x: f64,
    pub y: f64,
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Jet2 {
    pub const fn constant(v: f64) -> Self {
        Self { v, x: 0.0, y: 0.0, xx: 0.0, xy: 0.0, yy: 0.0 }
    }

    /// The coordinate function `x` at `x = v`.
    pub const fn var_x(v: f64) -> Self {
        Self { v, x: 1.0, y: 0.0, xx: 0.0, xy: 0.0, yy: 0.0 }
    }

    /// The coordinate function `y` at `y = v`.
    pub const fn var_y(v: f64) -> Self {
        Self { v, x: 0.0, y: 1.0, xx: 0.0, xy: 0.0, yy: 0.0 }
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.v` (chain rule to second order).
    pub fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        Self {
            v: f,
            x: df * self.x,
            y: df * self.y,
            xx: d2f * self.x * self.x + df * self.xx,
            xy: d2f * self.x * self.y + df * self.xy,
            yy: d2f * self.y * self.y + df * self.yy,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(self.v.ln(), r, -r * r)
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn powi(self, n: i32) -> Self {
        let nf = f64::from(n);
        self.chain(self.v.powi(n), nf * self.v.powi(n - 1), nf * (nf - 1.0) * self.v.powi(n - 2))
    }

    pub fn scale(self, k: f64) -> Self {
        Self { v: k * self.v, x: k * self.x, y: k * self.y, xx: k * self.xx, xy: k * self.xy, yy: k * self.yy }
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn laplacian(&self) -> f64 {
        self.xx + self.yy
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            x: self.x + o.x,
            y: self.y + o.y,
            xx: self.xx + o.xx,
            xy: self.xy + o.xy,
            yy: self.yy + o.yy,
        }
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, k: f64) -> Jet2 {
        self.v += k;
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, k: f64) -> Jet2 {
        self.v -= k;
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            x: self.x * o.v + self.v * o.x,
            y: self.y * o.v + self.v * o.y,
            xx: self.xx * o.v + 2.0 * self.x * o.x + self.v * o.xx,
            xy: self.xy * o.v + self.x * o.y + self.y * o.x + self.v * o.xy,
            yy: self.yy * o.v + 2.0 * self.y * o.y + self.v * o.yy,
        }
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, k: f64) -> Jet2 {
        self.scale(k)
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, k: f64) -> Jet2 {
        self.scale(1.0 / k)
    }
}

/// Complex-valued second-order jet in the real chart variables `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CJet2 {
    pub re: Jet2,
    pub im: Jet2,
}

impl CJet2 {
    pub fn new(re: Jet2, im: Jet2) -> Self {
        Self { re, im }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.v, self.im.v)
    }

    fn dx(&self) -> Complex64 {
        Complex64::new(self.re.x, self.im.x)
    }

    fn dy(&self) -> Complex64 {
        Complex64::new(self.re.y, self.im.y)
    }

    fn from_parts(v: Complex64, x: Complex64, y: Complex64, xx: Complex64, xy: Complex64, yy: Complex64) -> Self {
        Self {
            re: Jet2 { v: v.re, x: x.re, y: y.re, xx: xx.re, xy: xy.re, yy: yy.re },
            im: Jet2 { v: v.im, x: x.im, y: y.im, xx: xx.im, xy: xy.im, yy: yy.im },
        }
    }

    /// Composes a holomorphic `F` with this jet, given `F`, `F'`, `F''` at
    /// the jet's value.
    pub fn compose_holo(&self, f: Complex64, df: Complex64, d2f: Complex64) -> Self {
        let wx = self.dx();
        let wy = self.dy();
        let wxx = Complex64::new(self.re.xx, self.im.xx);
        let wxy = Complex64::new(self.re.xy, self.im.xy);
        let wyy = Complex64::new(self.re.yy, self.im.yy);
        Self::from_parts(
            f,
            df * wx,
            df * wy,
            d2f * wx * wx + df * wxx,
            d2f * wx * wy + df * wxy,
            d2f * wy * wy + df * wyy,
        )
    }

    pub fn norm_sqr(&self) -> Jet2 {
        self.re * self.re + self.im * self.im
    }

    /// Real 2x2 Jacobian `[[u_x, u_y], [v_x, v_y]]` of the map `(x, y) -> (u, v)`.
    pub fn jacobian(&self) -> [[f64; 2]; 2] {
        [[self.re.x, self.re.y], [self.im.x, self.im.y]]
    }
}

/// A holomorphic function value with its first three complex derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Holo {
    pub f: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
    pub d3: Complex64,
}

impl Holo {
    pub fn constant(c: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { f: c, d1: z, d2: z, d3: z }
    }

    /// The identity function at `w`.
    pub fn var(w: Complex64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { f: w, d1: Complex64::new(1.0, 0.0), d2: z, d3: z }
    }

    /// Composes an outer holomorphic `F` (value and three derivatives at
    /// `self.f`) with this inner function.
    pub fn compose(&self, f: Complex64, df: Complex64, d2f: Complex64, d3f: Complex64) -> Self {
        let (g1, g2, g3) = (self.d1, self.d2, self.d3);
        Self { f, d1: df * g1, d2: d2f * g1 * g1 + df * g2, d3: d3f * g1 * g1 * g1 + 3.0 * d2f * g1 * g2 + df * g3 }
    }

    pub fn add(&self, o: &Holo) -> Holo {
        Holo { f: self.f + o.f, d1: self.d1 + o.d1, d2: self.d2 + o.d2, d3: self.d3 + o.d3 }
    }

    pub fn add_const(&self, c: Complex64) -> Holo {
        Holo { f: self.f + c, ..*self }
    }

    pub fn scale(&self, k: Complex64) -> Holo {
        Holo { f: self.f * k, d1: self.d1 * k, d2: self.d2 * k, d3: self.d3 * k }
    }

    pub fn mul(&self, o: &Holo) -> Holo {
        Holo {
            f: self.f * o.f,
            d1: self.d1 * o.f + self.f * o.d1,
            d2: self.d2 * o.f + 2.0 * self.d1 * o.d1 + self.f * o.d2,
            d3: self.d3 * o.f + 3.0 * self.d2 * o.d1 + 3.0 * self.d1 * o.d2 + self.f * o.d3,
        }
    }

    pub fn recip(&self) -> Holo {
        let r = self.f.inv();
        let r2 = r * r;
        self.compose(r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2)
    }

    pub fn div(&self, o: &Holo) -> Holo {
        self.mul(&o.recip())
    }

    pub fn exp(&self) -> Holo {
        let e = self.f.exp();
        self.compose(e, e, e, e)
    }

    pub fn ln(&self) -> Holo {
        let r = self.f.inv();
        self.compose(self.f.ln(), r, -r * r, 2.0 * r * r * r)
    }

    /// Principal branch power `w^p`.
    pub fn powc(&self, p: Complex64) -> Holo {
        let w = self.f;
        let one = Complex64::new(1.0, 0.0);
        let v = w.powc(p);
        let d1 = p * v / w;
        let d2 = p * (p - one) * v / (w * w);
        let d3 = p * (p - one) * (p - 2.0 * one) * v / (w * w * w);
        self.compose(v, d1, d2, d3)
    }

    pub fn sqrt(&self) -> Holo {
        self.powc(Complex64::new(0.5, 0.0))
    }

    /// Schwarzian derivative `f'''/f' - (3/2)(f''/f')^2`.
    pub fn schwarzian(&self) -> Complex64 {
        let a = self.d2 / self.d1;
        self.d3 / self.d1 - 1.5 * a * a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jet_of(f: impl Fn(f64, f64) -> f64, x: f64, y: f64) -> Jet2 {
        // central differences, independent of the jet arithmetic
        let h = 1e-4;
        Jet2 {
            v: f(x, y),
            x: (f(x + h, y) - f(x - h, y)) / (2.0 * h),
            y: (f(x, y + h) - f(x, y - h)) / (2.0 * h),
            xx: (f(x + h, y) - 2.0 * f(x, y) + f(x - h, y)) / (h * h),
            xy: (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4.0 * h * h),
            yy: (f(x, y + h) - 2.0 * f(x, y) + f(x, y - h)) / (h * h),
        }
    }

    fn close(a: Jet2, b: Jet2, tol: f64) {
        for (p, q) in [(a.v, b.v), (a.x, b.x), (a.y, b.y), (a.xx, b.xx), (a.xy, b.xy), (a.yy, b.yy)] {
            assert!((p - q).abs() < tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn jet_arithmetic_matches_finite_differences() {
        let (x0, y0) = (0.3, -0.7);
        let x = Jet2::var_x(x0);
        let y = Jet2::var_y(y0);
        let j = ((x * y).exp() + (x * x + 2.0).ln()) / (y * y + 1.0).sqrt();
        let f = |x: f64, y: f64| ((x * y).exp() + (x * x + 2.0).ln()) / (y * y + 1.0).sqrt();
        close(j, jet_of(f, x0, y0), 1e-6);
    }

    #[test]
    fn holo_compose_matches_power_rule() {
        let w = Complex64::new(0.4, 0.2);
        let h = Holo::var(w).mul(&Holo::var(w)).mul(&Holo::var(w));
        assert!((h.d1 - 3.0 * w * w).norm() < 1e-14);
        assert!((h.d2 - 6.0 * w).norm() < 1e-14);
        assert!((h.d3 - Complex64::new(6.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn schwarzian_of_square_is_minus_three_halves_over_z_squared() {
        let z = Complex64::new(1.0, 0.0);
        let h = Holo::var(z).powc(Complex64::new(2.0, 0.0));
        assert!((h.schwarzian() - Complex64::new(-1.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn cjet_composition_is_holomorphic_chain_rule() {
        // W(x, y) = x + i y composed with F = exp gives exp(z) with
        // F_x = exp, F_y = i exp.
        let w = CJet2::new(Jet2::var_x(0.2), Jet2::var_y(0.1));
        let e = w.value().exp();
        let c = w.compose_holo(e, e, e);
        assert!((Complex64::new(c.re.x, c.im.x) - e).norm() < 1e-15);
        assert!((Complex64::new(c.re.y, c.im.y) - Complex64::i() * e).norm() < 1e-15);
        assert!((Complex64::new(c.re.yy, c.im.yy) + e).norm() < 1e-15);
    }
}
