use homfam_ffi::*;
use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

fn new_family(name: &str, n: i64, lambda: f64) -> (HomfamStatus, *mut HomfamFamily) {
    let name = CString::new(name).unwrap();
    let mut f = ptr::null_mut();
    let s = unsafe { homfam_family_new(name.as_ptr(), n, lambda, &mut f) };
    (s, f)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(homfam_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn standard_normal_through_the_abi() {
    let (s, f) = new_family("normal", -1, f64::NAN);
    assert_eq!(s, HomfamStatus::Ok);
    unsafe {
        assert_eq!(homfam_family_natural_len(f), 3);
        assert_eq!(homfam_family_chart_len(f), 1);
        let theta = [0.5, 0.0, 0.0];
        let mut a = 0.0;
        assert_eq!(homfam_log_partition(f, theta.as_ptr(), 3, &mut a), HomfamStatus::Ok);
        assert!((a - 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-14);
        let pts = [0.0, 1.0];
        let mut out = [0.0; 2];
        assert_eq!(homfam_log_density(f, theta.as_ptr(), 3, pts.as_ptr(), 2, out.as_mut_ptr()), HomfamStatus::Ok);
        assert!((out[0] - out[1] - 0.5).abs() < 1e-14);
        homfam_family_free(f);
    }
}

#[test]
fn sample_then_fit() {
    let (_, f) = new_family("gamma_lambda", -1, 1.0);
    let doc = CString::new(r#"{"schema_version":1,"family":"gamma_lambda","variant":{"lambda":1.0},"parameterization":"classical","values":{"k":3,"theta":2}}"#).unwrap();
    let mut theta = [0.0; 2];
    unsafe {
        assert_eq!(homfam_natural_from_document(f, doc.as_ptr(), theta.as_mut_ptr(), 2), HomfamStatus::Ok, "{}", last_error());
        let mut draws = vec![0.0; 10_000];
        assert_eq!(homfam_sample(f, theta.as_ptr(), 2, 10_000, 3, draws.as_mut_ptr()), HomfamStatus::Ok);
        let mut again = vec![0.0; 10_000];
        homfam_sample(f, theta.as_ptr(), 2, 10_000, 3, again.as_mut_ptr());
        assert_eq!(draws, again);
        let mut fitted = [0.0; 2];
        assert_eq!(homfam_fit(f, draws.as_ptr(), 10_000, fitted.as_mut_ptr(), 2), HomfamStatus::Ok);
        for (a, b) in theta.iter().zip(&fitted) {
            assert!((a / b - 1.0).abs() < 0.05, "{theta:?} vs {fitted:?}");
        }
        homfam_family_free(f);
    }
}

#[test]
fn errors_are_reported() {
    let (s, f) = new_family("cauchy", -1, f64::NAN);
    assert_eq!(s, HomfamStatus::Usage);
    assert!(f.is_null());
    assert!(last_error().contains("cauchy"));

    let (s, _) = new_family("hyperboloid", 1, f64::NAN);
    assert_eq!(s, HomfamStatus::Usage);

    let (_, f) = new_family("normal", -1, f64::NAN);
    unsafe {
        let bad = [-1.0, 0.0, 0.0];
        let mut a = 0.0;
        assert_eq!(homfam_log_partition(f, bad.as_ptr(), 3, &mut a), HomfamStatus::Domain);
        assert_eq!(homfam_log_partition(f, bad.as_ptr(), 2, &mut a), HomfamStatus::Domain);
        assert_eq!(homfam_log_partition(ptr::null(), bad.as_ptr(), 3, &mut a), HomfamStatus::InvalidArgument);
        let same = [1.0; 5];
        let mut out = [0.0; 3];
        assert_eq!(homfam_fit(f, same.as_ptr(), 5, out.as_mut_ptr(), 3), HomfamStatus::Domain);
        let doc = CString::new(r#"{"schema_version":1,"family":"bernoulli","parameterization":"natural","values":[0.1]}"#).unwrap();
        assert_eq!(homfam_natural_from_document(f, doc.as_ptr(), out.as_mut_ptr(), 3), HomfamStatus::Usage);
        homfam_family_free(f);
        homfam_family_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_api() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/homfam.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "typedef struct HomfamFamily HomfamFamily;",
        "HomfamStatus homfam_family_new(",
        "void homfam_family_free(",
        "HomfamStatus homfam_log_density(",
        "HomfamStatus homfam_sample(",
        "HomfamStatus homfam_fit(",
        "const char *homfam_last_error(void)",
        "HOMFAM_STATUS_DOMAIN = 3",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}
