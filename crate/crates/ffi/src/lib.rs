//! C interface. Objects are opaque handles created by `tr_*_new` style
//! functions and released with the matching `tr_*_free`. Every fallible
//! function returns a [`TrStatus`] and writes results through out-pointers;
//! on failure [`tr_last_error_message`] describes the error.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use translative::functionals::{self, Family};
use translative::geom::{io, AaBox, Polytope, Region, Vec3};
use translative::gp_union::{self, GpUnion};
use translative::stochastic::{self, GrainDistribution, RotationAverage, RotationMode, Shape};
use translative::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Geometry = 4,
    NotGeneralPosition = 5,
    Io = 6,
    Panic = 7,
}

/// A convex polytope.
pub struct TrPolytope(Polytope);

/// A local functional: `f_0, ..., f_{d-1}` and `c_d`.
pub struct TrFamily(Family);

/// A union of polytopes certified to be in mutual general position.
pub struct TrUnion(GpUnion);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TrStatus {
    match e {
        Error::Parse { .. } => TrStatus::Parse,
        Error::Io(_) => TrStatus::Io,
        Error::CertificationFailed(_) | Error::NotCertified => TrStatus::NotGeneralPosition,
        Error::EmptyPointSet
        | Error::NonFinite
        | Error::ImproperFace
        | Error::NonPointedCone
        | Error::ZeroCone
        | Error::SphericalDimension(_) => TrStatus::Geometry,
        _ => TrStatus::InvalidArgument,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard<F: FnOnce() -> Result<(), (TrStatus, String)>>(f: F) -> TrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TrStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(m);
            s
        }
        Err(p) => {
            let m = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {m}"));
            TrStatus::Panic
        }
    }
}

type FfiResult<T> = Result<T, (TrStatus, String)>;

fn lift<T>(r: translative::Result<T>) -> FfiResult<T> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

unsafe fn get<'a, T>(p: *const T, name: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .ok_or_else(|| (TrStatus::NullPointer, format!("`{name}` is null")))
}

fn check_out<T>(p: *mut T, name: &str) -> FfiResult<()> {
    if p.is_null() {
        Err((TrStatus::NullPointer, format!("`{name}` is null")))
    } else {
        Ok(())
    }
}

fn invalid(m: &str) -> (TrStatus, String) {
    (TrStatus::InvalidArgument, m.to_string())
}

fn boxed<T>(out: *mut *mut T, v: T) {
    unsafe { *out = Box::into_raw(Box::new(v)) };
}

unsafe fn points(coords: *const f64, n: usize, d: usize) -> FfiResult<Vec<Vec3>> {
    if !(d == 2 || d == 3) {
        return Err((TrStatus::InvalidArgument, format!("dimension {d} is not 2 or 3")));
    }
    if n == 0 {
        return Err((TrStatus::Geometry, "empty point set".into()));
    }
    let xs = std::slice::from_raw_parts(get(coords, "coords")?, n * d);
    Ok(xs
        .chunks(d)
        .map(|c| {
            let mut v = Vec3::zeros();
            v.as_mut_slice()[..d].copy_from_slice(c);
            v
        })
        .collect())
}

unsafe fn region(lo: *const f64, hi: *const f64, d: usize) -> FfiResult<Region> {
    let lo = std::slice::from_raw_parts(get(lo, "lo")?, d);
    let hi = std::slice::from_raw_parts(get(hi, "hi")?, d);
    Ok(AaBox::new(lo, hi).to_region())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Convex hull of `n` points given as `n * d` coordinates.
///
/// # Safety
/// `coords` must point to `n * d` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_polytope_from_points(
    coords: *const f64,
    n: usize,
    d: usize,
    out: *mut *mut TrPolytope,
) -> TrStatus {
    guard(|| {
        check_out(out, "out")?;
        let pts = points(coords, n, d)?;
        boxed(out, TrPolytope(lift(Polytope::from_points(&pts, d))?));
        Ok(())
    })
}

/// Reads a polytope file (`dim d` followed by one vertex per line).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_polytope_read(path: *const c_char, out: *mut *mut TrPolytope) -> TrStatus {
    guard(|| {
        check_out(out, "out")?;
        let path = CStr::from_ptr(get(path, "path")?)
            .to_str()
            .map_err(|_| invalid("path is not UTF-8"))?;
        boxed(out, TrPolytope(lift(io::read_polytope(Path::new(path)))?));
        Ok(())
    })
}

/// # Safety
/// `p` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tr_polytope_free(p: *mut TrPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tr_polytope_dim(p: *const TrPolytope) -> usize {
    p.as_ref().map_or(0, |p| p.0.dim())
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_polytope_volume(p: *const TrPolytope, out: *mut f64) -> TrStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = get(p, "p")?.0.volume();
        Ok(())
    })
}

/// Family from `skeleton`, `intrinsic`, or a list such as
/// `const:1,angle:1;cd=1`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_family_new(d: usize, spec: *const c_char, out: *mut *mut TrFamily) -> TrStatus {
    guard(|| {
        check_out(out, "out")?;
        let s = CStr::from_ptr(get(spec, "spec")?)
            .to_str()
            .map_err(|_| invalid("spec is not UTF-8"))?;
        boxed(out, TrFamily(lift(Family::parse(d, s))?));
        Ok(())
    })
}

/// # Safety
/// `f` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tr_family_free(f: *mut TrFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// `φ^(j)(P)`.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_phi(
    f: *const TrFamily,
    p: *const TrPolytope,
    j: usize,
    out: *mut f64,
) -> TrStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = lift(functionals::phi_homogeneous(&get(f, "f")?.0, j, &get(p, "p")?.0))?;
        Ok(())
    })
}

/// `Φ^(j)(P, A)` for the box `A = [lo, hi]`.
///
/// # Safety
/// Handles must be live, `lo` and `hi` must hold `d` doubles and `out` be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tr_extension_measure(
    f: *const TrFamily,
    p: *const TrPolytope,
    j: usize,
    lo: *const f64,
    hi: *const f64,
    out: *mut f64,
) -> TrStatus {
    guard(|| {
        check_out(out, "out")?;
        let p = &get(p, "p")?.0;
        let a = region(lo, hi, p.dim())?;
        *out = lift(functionals::extension_measure(&get(f, "f")?.0, j, p, &a))?;
        Ok(())
    })
}

/// `φ^(j)_{m_1..m_k}(P_1, ..., P_k)`.
///
/// # Safety
/// `polys` and `m` must hold `k` entries of live handles and indices, and
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tr_mixed_functional(
    f: *const TrFamily,
    j: usize,
    polys: *const *const TrPolytope,
    m: *const usize,
    k: usize,
    out: *mut f64,
) -> TrStatus {
    guard(|| {
        check_out(out, "out")?;
        if k == 0 {
            return Err(invalid("k must be positive"));
        }
        let handles = std::slice::from_raw_parts(get(polys, "polys")?, k);
        let ps: Vec<&Polytope> = handles
            .iter()
            .map(|&h| get(h, "polys[i]").map(|p| &p.0))
            .collect::<FfiResult<_>>()?;
        let m = std::slice::from_raw_parts(get(m, "m")?, k);
        *out = lift(functionals::mixed_functional(&get(f, "f")?.0, j, &ps, m))?.value;
        Ok(())
    })
}

/// Monte Carlo estimate of `∫ φ^(j)(P ∩ (Q + x)) dx` with its standard error.
///
/// # Safety
/// Handles must be live and `mean`, `stderr` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_translative_lhs_mc(
    f: *const TrFamily,
    j: usize,
    p: *const TrPolytope,
    q: *const TrPolytope,
    samples: usize,
    seed: u64,
    mean: *mut f64,
    stderr: *mut f64,
) -> TrStatus {
    guard(|| {
        check_out(mean, "mean")?;
        check_out(stderr, "stderr")?;
        let (p, q) = (&get(p, "p")?.0, &get(q, "q")?.0);
        let a = Region::covering(&[p]);
        let b = Region::covering(&[q]);
        let e = lift(functionals::translative_lhs_mc(
            &get(f, "f")?.0,
            j,
            p,
            q,
            &a,
            &b,
            samples,
            seed,
        ))?;
        *mean = e.mean;
        *stderr = e.stderr;
        Ok(())
    })
}

/// Union of `k` polytopes. Fails with `NOT_GENERAL_POSITION` when the parts
/// are not in mutual general position.
///
/// # Safety
/// `parts` must hold `k` live handles and `out` be writable. The parts are
/// copied.
#[no_mangle]
pub unsafe extern "C" fn tr_union_new(
    parts: *const *const TrPolytope,
    k: usize,
    out: *mut *mut TrUnion,
) -> TrStatus {
    guard(|| {
        check_out(out, "out")?;
        if k == 0 {
            return Err(invalid("a union needs at least one part"));
        }
        let handles = std::slice::from_raw_parts(get(parts, "parts")?, k);
        let ps: Vec<Polytope> = handles
            .iter()
            .map(|&h| get(h, "parts[i]").map(|p| p.0.clone()))
            .collect::<FfiResult<_>>()?;
        let (u, cert) = lift(GpUnion::new(ps))?;
        if let Some(v) = cert.violation {
            return Err((
                TrStatus::NotGeneralPosition,
                format!("part {} and parts {:?}: {}", v.part, v.group, v.reason),
            ));
        }
        boxed(out, TrUnion(u));
        Ok(())
    })
}

/// # Safety
/// `u` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tr_union_free(u: *mut TrUnion) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// `φ^(j)` of the union by inclusion-exclusion.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_union_phi(
    f: *const TrFamily,
    u: *const TrUnion,
    j: usize,
    out: *mut f64,
) -> TrStatus {
    guard(|| {
        check_out(out, "out")?;
        *out = lift(gp_union::gp_phi_degree(&get(f, "f")?.0, j, &get(u, "u")?.0))?;
        Ok(())
    })
}

/// Signed vertex count and signed edge length of the union boundary.
///
/// # Safety
/// `u` must be live and the out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn tr_union_boundary_features(
    u: *const TrUnion,
    signed_vertices: *mut f64,
    signed_edge_length: *mut f64,
) -> TrStatus {
    guard(|| {
        check_out(signed_vertices, "signed_vertices")?;
        check_out(signed_edge_length, "signed_edge_length")?;
        let r = lift(gp_union::classify_boundary_features(&get(u, "u")?.0))?;
        *signed_vertices = r.signed_vertices();
        *signed_edge_length = r.signed_edge_length();
        Ok(())
    })
}

/// Density `φ̄^(j)(Z)` of a Boolean model with intensity `gamma` and the
/// single grain `p`, rotated uniformly when `isotropic` is nonzero. Rotation
/// averages use `samples` draws from `seed`; `stderr` is their standard
/// error.
///
/// # Safety
/// Handles must be live and `value`, `stderr` writable.
#[no_mangle]
pub unsafe extern "C" fn tr_boolean_density(
    f: *const TrFamily,
    p: *const TrPolytope,
    isotropic: i32,
    gamma: f64,
    j: usize,
    samples: usize,
    seed: u64,
    value: *mut f64,
    stderr: *mut f64,
) -> TrStatus {
    guard(|| {
        check_out(value, "value")?;
        check_out(stderr, "stderr")?;
        let mode = if isotropic != 0 {
            RotationMode::Isotropic
        } else {
            RotationMode::Fixed
        };
        let q = lift(GrainDistribution::single(
            Shape::Convex(get(p, "p")?.0.clone()),
            mode,
        ))?;
        let rot = RotationAverage { samples, seed };
        let a = lift(stochastic::boolean_density_formula(
            &get(f, "f")?.0,
            j,
            &q,
            gamma,
            &rot,
        ))?;
        *value = a.value;
        *stderr = a.stderr;
        Ok(())
    })
}
