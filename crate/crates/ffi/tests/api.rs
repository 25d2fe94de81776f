use std::ffi::{CStr, CString};
use std::ptr;

use translative_ffi::*;

fn last_error() -> String {
    let p = tr_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

unsafe fn cube() -> *mut TrPolytope {
    let mut pts = Vec::new();
    for i in 0..8 {
        pts.extend([(i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64]);
    }
    let mut p = ptr::null_mut();
    assert_eq!(tr_polytope_from_points(pts.as_ptr(), 8, 3, &mut p), TrStatus::Ok);
    p
}

unsafe fn family(d: usize, s: &str) -> *mut TrFamily {
    let s = CString::new(s).unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(tr_family_new(d, s.as_ptr(), &mut f), TrStatus::Ok);
    f
}

#[test]
fn intrinsic_volumes_of_the_cube() {
    unsafe {
        let p = cube();
        let f = family(3, "intrinsic");
        assert_eq!(tr_polytope_dim(p), 3);
        let mut v = 0.0;
        assert_eq!(tr_polytope_volume(p, &mut v), TrStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        for (j, want) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
            assert_eq!(tr_phi(f, p, j, &mut v), TrStatus::Ok);
            assert!((v - want).abs() < 1e-12, "j = {j}: {v}");
        }
        let lo = [0.0, 0.0, 0.0];
        let hi = [0.5, 1.0, 1.0];
        assert_eq!(
            tr_extension_measure(f, p, 3, lo.as_ptr(), hi.as_ptr(), &mut v),
            TrStatus::Ok
        );
        assert!((v - 0.5).abs() < 1e-12);
        tr_family_free(f);
        tr_polytope_free(p);
    }
}

#[test]
fn translative_sides_agree() {
    unsafe {
        let sq = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let mut p = ptr::null_mut();
        assert_eq!(tr_polytope_from_points(sq.as_ptr(), 4, 2, &mut p), TrStatus::Ok);
        let f = family(2, "skeleton");
        let (mut mean, mut se) = (0.0, 0.0);
        assert_eq!(
            tr_translative_lhs_mc(f, 1, p, p, 20_000, 3, &mut mean, &mut se),
            TrStatus::Ok
        );
        assert!((mean - 8.0).abs() < 3.0 * se.max(1e-9), "{mean} ± {se}");
        tr_family_free(f);
        tr_polytope_free(p);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(
            tr_polytope_from_points(ptr::null(), 3, 2, &mut p),
            TrStatus::NullPointer
        );
        assert!(last_error().contains("coords"));
        let pts = [0.0; 8];
        assert_eq!(
            tr_polytope_from_points(pts.as_ptr(), 2, 4, &mut p),
            TrStatus::InvalidArgument
        );
        let bad = CString::new("const:x").unwrap();
        let mut f = ptr::null_mut();
        assert_eq!(tr_family_new(2, bad.as_ptr(), &mut f), TrStatus::InvalidArgument);
        let path = CString::new("/nonexistent/file.poly").unwrap();
        assert_eq!(tr_polytope_read(path.as_ptr(), &mut p), TrStatus::Io);
        assert!(p.is_null());
        let mut v = 0.0;
        assert_eq!(tr_phi(ptr::null(), ptr::null(), 0, &mut v), TrStatus::NullPointer);
        tr_polytope_free(ptr::null_mut());
    }
}

#[test]
fn edge_sharing_union_is_rejected() {
    unsafe {
        let a = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let b = [1.0, 0.0, 2.0, 0.0, 2.0, 1.0, 1.0, 1.0];
        let (mut p, mut q) = (ptr::null_mut(), ptr::null_mut());
        tr_polytope_from_points(a.as_ptr(), 4, 2, &mut p);
        tr_polytope_from_points(b.as_ptr(), 4, 2, &mut q);
        let parts = [p as *const TrPolytope, q as *const TrPolytope];
        let mut u = ptr::null_mut();
        assert_eq!(
            tr_union_new(parts.as_ptr(), 2, &mut u),
            TrStatus::NotGeneralPosition
        );
        assert!(last_error().contains("part 0"));
        assert!(u.is_null());
        assert_eq!(tr_union_new(parts.as_ptr(), 1, &mut u), TrStatus::Ok);
        let f = family(2, "skeleton");
        let mut v = 0.0;
        assert_eq!(tr_union_phi(f, u, 1, &mut v), TrStatus::Ok);
        assert_eq!(v, 4.0);
        tr_union_free(u);
        tr_family_free(f);
        tr_polytope_free(p);
        tr_polytope_free(q);
    }
}

#[test]
fn isotropic_boolean_density_of_squares() {
    unsafe {
        let sq = [0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let mut p = ptr::null_mut();
        tr_polytope_from_points(sq.as_ptr(), 4, 2, &mut p);
        let f = family(2, "skeleton");
        let (mut v, mut se) = (0.0, 0.0);
        assert_eq!(
            tr_boolean_density(f, p, 1, 0.3, 0, 20_000, 0, &mut v, &mut se),
            TrStatus::Ok
        );
        let want = (-0.3f64).exp() * (1.2 - 1.44 / std::f64::consts::PI);
        assert!((v - want).abs() < 4.0 * se, "{v} ± {se} vs {want}");
        tr_family_free(f);
        tr_polytope_free(p);
    }
}
