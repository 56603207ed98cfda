//! C ABI for horosurf.
//!
//! Every fallible call returns an [`HsStatus`] and writes its result through
//! an out pointer. On failure a message is kept per thread and can be read
//! with [`hs_last_error_message`] until the next failing call on that thread.
//! Handles are opaque; each constructor has a matching `_free`.

use std::cell::RefCell;
use std::ffi::CString;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use horosurf::conformal::ConformalMapSpec;
use horosurf::envelope::{surface_jet, EnvelopeOptions};
use horosurf::fields::RhoField;
use horosurf::flow::{flow_k, focal_times};
use horosurf::hyperbolic::{ChartFrame, SpherePoint};
use horosurf::weingarten::{ratio, weingarten_curvatures};
use horosurf::GeomError;
use libc::{c_char, size_t};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    OutsideDomain = 3,
    Focal = 4,
    Singular = 5,
    NoSolution = 6,
    HypothesisViolated = 7,
    Panic = 8,
}

impl From<&GeomError> for HsStatus {
    fn from(e: &GeomError) -> Self {
        use GeomError::*;
        match e {
            OutsideBall { .. }
            | Degenerate
            | NotUnit { .. }
            | TooFewSamples { .. }
            | ChartMismatch(_)
            | EmptySamples
            | SeedAtZero
            | InvalidInput(_) => HsStatus::InvalidInput,
            RhoOutOfRange { .. }
            | ChartPole
            | OutsideDomain
            | BoundaryInset { .. }
            | OutsideDisk { .. }
            | BoundaryExit => HsStatus::OutsideDomain,
            FocalBlowup { .. } | FocalPoint { .. } => HsStatus::Focal,
            Singular { .. } | VanishingDerivative => HsStatus::Singular,
            NoSolution(_) => HsStatus::NoSolution,
            HypothesisViolated(_) => HsStatus::HypothesisViolated,
        }
    }
}

/// Opaque `rho` field on the sphere at infinity.
pub struct HsField(RhoField);

/// Opaque conformal map onto (or into) the unit disk.
pub struct HsMap(ConformalMapSpec);

/// Envelope data at one sphere point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct HsSurfacePoint {
    /// Ball coordinates of the envelope point.
    pub position: [f64; 3],
    /// Principal curvatures, `k1 <= k2`.
    pub k1: f64,
    pub k2: f64,
    /// `k1 k2 - 1`.
    pub gauss: f64,
    /// `k1 + k2`.
    pub mean: f64,
    pub umbilic: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), HsStatus>) -> HsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            HsStatus::Panic
        }
    }
}

fn geom<T>(r: Result<T, GeomError>) -> Result<T, HsStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        HsStatus::from(&e)
    })
}

fn null(what: &str) -> HsStatus {
    set_error(format!("{what} is null"));
    HsStatus::NullPointer
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), HsStatus> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// # Safety
/// `p` must be null or point to a live `T`.
unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, HsStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failing call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated version string.
#[no_mangle]
pub extern "C" fn hs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_field_constant(c: f64, out: *mut *mut HsField) -> HsStatus {
    guard(|| {
        if !c.is_finite() {
            set_error("constant must be finite".into());
            return Err(HsStatus::InvalidInput);
        }
        write_out(out, boxed(HsField(RhoField::constant(c))))
    })
}

/// Field of the geodesic plane with unit normal `normal` at its center.
///
/// # Safety
/// `normal` must point to 3 doubles; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_field_geodesic_plane(normal: *const f64, out: *mut *mut HsField) -> HsStatus {
    guard(|| {
        let n = sphere_point(normal)?;
        write_out(out, boxed(HsField(RhoField::geodesic_plane(n))))
    })
}

/// Field of a horosphere tangent at `tangency`, pushed out by `t`.
///
/// # Safety
/// `tangency` must point to 3 doubles; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_field_horosphere(tangency: *const f64, t: f64, out: *mut *mut HsField) -> HsStatus {
    guard(|| {
        let q = sphere_point(tangency)?;
        write_out(out, boxed(HsField(RhoField::horosphere(q, t))))
    })
}

/// Field whose envelope is the geodesic with endpoints `axis` and `-axis`.
///
/// # Safety
/// `axis` must point to 3 doubles; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_field_geodesic(axis: *const f64, out: *mut *mut HsField) -> HsStatus {
    guard(|| {
        let a = sphere_point(axis)?;
        write_out(out, boxed(HsField(RhoField::geodesic(a))))
    })
}

/// Field of the hyperbolic metric pulled back by `map`, in the chart at the
/// south pole.
///
/// # Safety
/// `map` must be a live handle; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_field_from_map(map: *const HsMap, out: *mut *mut HsField) -> HsStatus {
    guard(|| {
        let m = deref(map, "map")?;
        let f = geom(RhoField::conformal(m.0.clone(), ChartFrame::new(&SpherePoint::south())))?;
        write_out(out, boxed(HsField(f)))
    })
}

/// New handle for `field + t`; the original stays valid.
///
/// # Safety
/// `field` must be a live handle; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_field_with_offset(field: *const HsField, t: f64, out: *mut *mut HsField) -> HsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        write_out(out, boxed(HsField(f.0.clone().with_offset(t))))
    })
}

/// Value of the field at a sphere point.
///
/// # Safety
/// `field` must be a live handle, `theta` must point to 3 doubles and `out`
/// must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hs_field_value(field: *const HsField, theta: *const f64, out: *mut f64) -> HsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let p = sphere_point(theta)?;
        write_out(out, geom(f.0.value(&p))?)
    })
}

/// # Safety
/// `field` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_field_free(field: *mut HsField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Envelope point and curvatures of `field` at the sphere point `theta`.
///
/// # Safety
/// `field` must be a live handle, `theta` must point to 3 doubles and `out`
/// must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hs_surface_point(
    field: *const HsField,
    theta: *const f64,
    out: *mut HsSurfacePoint,
) -> HsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let p = sphere_point(theta)?;
        let j = geom(surface_jet(&f.0, &p, &EnvelopeOptions::default()))?;
        let c = j.position.coords();
        write_out(
            out,
            HsSurfacePoint {
                position: [c.x, c.y, c.z],
                k1: j.k1,
                k2: j.k2,
                gauss: j.gauss,
                mean: j.mean,
                umbilic: j.umbilic,
            },
        )
    })
}

/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_map_identity(out: *mut *mut HsMap) -> HsStatus {
    guard(|| write_out(out, boxed(HsMap(ConformalMapSpec::identity()))))
}

/// Inverse Koebe map from the plane slit along `(-inf, -1/4]`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_map_koebe(out: *mut *mut HsMap) -> HsStatus {
    guard(|| write_out(out, boxed(HsMap(ConformalMapSpec::koebe()))))
}

/// Map from the sector `0 < arg w < pi/p` onto the disk.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_map_power(p: f64, out: *mut *mut HsMap) -> HsStatus {
    guard(|| write_out(out, boxed(HsMap(geom(ConformalMapSpec::power(p))?))))
}

/// Map from the strip `0 < Im w < width` onto the disk.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_map_strip(width: f64, out: *mut *mut HsMap) -> HsStatus {
    guard(|| write_out(out, boxed(HsMap(geom(ConformalMapSpec::strip(width))?))))
}

/// Möbius map `(a w + b)/(c w + d)` restricted to the preimage of the disk.
/// `coeffs` holds `a, b, c, d` as interleaved real and imaginary parts.
///
/// # Safety
/// `coeffs` must point to 8 doubles; `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn hs_map_mobius(coeffs: *const f64, out: *mut *mut HsMap) -> HsStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null("coefficients"));
        }
        let v = std::slice::from_raw_parts(coeffs, 8);
        let z = |i: usize| Complex64::new(v[2 * i], v[2 * i + 1]);
        write_out(out, boxed(HsMap(geom(ConformalMapSpec::mobius(z(0), z(1), z(2), z(3)))?)))
    })
}

/// # Safety
/// `map` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hs_map_free(map: *mut HsMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Ratio `s = |S f| / mu` of the Schwarzian to the pulled-back density at `w`.
///
/// # Safety
/// `map` must be a live handle; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hs_map_ratio(map: *const HsMap, re: f64, im: f64, out: *mut f64) -> HsStatus {
    guard(|| {
        let m = deref(map, "map")?;
        write_out(out, geom(ratio(&m.0, Complex64::new(re, im)))?.s)
    })
}

/// Principal curvatures `k+` and `k-` at ratio `s` after flowing by `t`.
///
/// # Safety
/// `k_plus` and `k_minus` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn hs_weingarten_curvatures(s: f64, t: f64, k_plus: *mut f64, k_minus: *mut f64) -> HsStatus {
    guard(|| {
        if k_minus.is_null() {
            return Err(null("k_minus"));
        }
        let w = geom(weingarten_curvatures(s, t))?;
        write_out(k_plus, w.k_plus)?;
        write_out(k_minus, w.k_minus)
    })
}

/// Principal curvature `k0` flowed by `t`; `Focal` at the blowup time.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn hs_flow_k(k0: f64, t: f64, out: *mut f64) -> HsStatus {
    guard(|| write_out(out, geom(flow_k(k0, t))?))
}

/// Focal times of the curvature pair, ascending, merged when equal.
/// Writes up to 2 times to `times` and their count to `count`.
///
/// # Safety
/// `times` must be valid for 2 writes and `count` for one.
#[no_mangle]
pub unsafe extern "C" fn hs_focal_times(k1: f64, k2: f64, times: *mut f64, count: *mut size_t) -> HsStatus {
    guard(|| {
        if times.is_null() {
            return Err(null("times"));
        }
        let f = focal_times(k1, k2);
        for (i, ft) in f.iter().enumerate() {
            times.add(i).write(ft.t);
        }
        write_out(count, f.len())
    })
}

/// # Safety
/// `p` must be null or point to 3 doubles.
unsafe fn sphere_point(p: *const f64) -> Result<SpherePoint, HsStatus> {
    if p.is_null() {
        return Err(null("point"));
    }
    let v = std::slice::from_raw_parts(p, 3);
    geom(SpherePoint::from_xyz(v[0], v[1], v[2]))
}
