use std::ffi::{CStr, CString};
use std::ptr;

use thintails_ffi::*;

fn last_error() -> String {
    let p = tt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn curve(spec: &str) -> *mut TtCurve {
    let s = CString::new(spec).unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { tt_curve_parse(s.as_ptr(), &mut c) }, TtStatus::Ok);
    c
}

fn student(sigma: f64, alpha: f64) -> *mut TtStudentT {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { tt_student_new(sigma, alpha, &mut d) }, TtStatus::Ok);
    d
}

#[test]
fn curve_round_trip() {
    let c = curve("sigmoid:kl=0;a=1,b=1,c=0");
    let mut v = 0.0;
    unsafe {
        assert_eq!(tt_curve_eval(c, 0.0, &mut v), TtStatus::Ok);
        assert_eq!(v, 0.5);
        assert_eq!(tt_curve_derivative(c, 0.0, 1, &mut v), TtStatus::Ok);
        assert!((v - 0.25).abs() < 1e-15);
        assert_eq!(tt_curve_inverse(c, 0.75, &mut v), TtStatus::Ok);
        assert!((v - 3f64.ln()).abs() < 1e-14);
        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(tt_curve_attained_range(c, &mut lo, &mut hi), TtStatus::Ok);
        assert_eq!((lo, hi), (0.0, 1.0));
        assert_eq!(tt_curve_derivative(c, 0.0, 3, &mut v), TtStatus::Domain);
        tt_curve_free(c);
    }
}

#[test]
fn errors_carry_messages() {
    let bad = CString::new("sigmoid:kl=0;a=1,b=0,c=0").unwrap();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { tt_curve_parse(bad.as_ptr(), &mut c) }, TtStatus::Parse);
    assert!(c.is_null());
    assert!(!last_error().is_empty());

    let mut d = ptr::null_mut();
    assert_eq!(unsafe { tt_student_new(-1.0, 3.0, &mut d) }, TtStatus::Domain);
    assert!(last_error().contains("sigma") || !last_error().is_empty());

    let mut v = 0.0;
    assert_eq!(unsafe { tt_student_cdf(ptr::null(), 0.0, &mut v) }, TtStatus::NullPointer);
    assert_eq!(unsafe { tt_erfc_inv(2.5, &mut v) }, TtStatus::Domain);
    assert_eq!(unsafe { tt_erfc(0.0, ptr::null_mut()) }, TtStatus::NullPointer);

    let two = curve("sigmoid:kl=0;a=1,b=1,c=1;a=-2,b=2,c=15");
    assert_eq!(unsafe { tt_curve_inverse(two, 0.1, &mut v) }, TtStatus::Unsupported);
    unsafe { tt_curve_free(two) };
    unsafe { tt_curve_free(ptr::null_mut()) };
    unsafe { tt_student_free(ptr::null_mut()) };
}

#[test]
fn student_and_inherited() {
    let d = student(1.0, 3.0);
    let c = curve("sigmoid:kl=0;a=1,b=1,c=0");
    let mut v = 0.0;
    unsafe {
        assert_eq!(tt_student_pdf(d, 0.0, &mut v), TtStatus::Ok);
        assert!((v - 0.36755259694786137).abs() < 1e-15);
        assert_eq!(tt_student_cdf(d, 0.0, &mut v), TtStatus::Ok);
        assert_eq!(v, 0.5);
        assert_eq!(tt_student_quantile(d, 0.5, &mut v), TtStatus::Ok);
        assert!(v.abs() < 1e-14);
        assert_eq!(tt_inherited_pdf(c, d, 0.5, &mut v), TtStatus::Ok);
        assert!((v - 1.4702103877914455).abs() < 1e-12);
        assert_eq!(tt_inherited_kurtosis(c, d, &mut v), TtStatus::Ok);
        assert!(v > 1.0 && v < 3.0);

        let mut a = vec![0.0; 1000];
        let mut b = vec![0.0; 1000];
        assert_eq!(tt_student_sample(d, 9, 1000, a.as_mut_ptr()), TtStatus::Ok);
        assert_eq!(tt_student_sample(d, 9, 1000, b.as_mut_ptr()), TtStatus::Ok);
        assert_eq!(a, b);
        assert_eq!(tt_inherited_sample(c, d, 9, 1000, b.as_mut_ptr()), TtStatus::Ok);
        assert!(b.iter().all(|&y| (0.0..=1.0).contains(&y)));
        assert_eq!(tt_student_sample(d, 9, 0, a.as_mut_ptr()), TtStatus::Domain);
        tt_curve_free(c);
        tt_student_free(d);
    }
}

#[test]
fn gamma_and_special() {
    let d = student(1.0, 2.0);
    let mut v = 0.0;
    unsafe {
        assert_eq!(tt_gamma_map(d, 0.0, 1.0, 2f64.sqrt(), &mut v), TtStatus::Ok);
        assert!((v - 1.051795860165225).abs() < 1e-12);
        assert_eq!(tt_gamma_map(d, 0.0, -1.0, 0.0, &mut v), TtStatus::Domain);
        assert_eq!(tt_erfc(1.0, &mut v), TtStatus::Ok);
        assert!((v - 0.15729920705028513).abs() < 1e-16);
        assert_eq!(tt_erfc_inv(0.5, &mut v), TtStatus::Ok);
        assert!((v - 0.476_936_276_204_469_9).abs() < 1e-15);
        assert_eq!(tt_beta(2.5, 0.5, &mut v), TtStatus::Ok);
        assert!((v - 1.1780972450961725).abs() < 1e-14);
        assert_eq!(tt_beta(-1.0, 0.5, &mut v), TtStatus::Domain);
        tt_student_free(d);
    }
    let ver = unsafe { CStr::from_ptr(tt_version()) }.to_str().unwrap();
    assert_eq!(ver, env!("CARGO_PKG_VERSION"));
}
