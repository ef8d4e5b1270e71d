use std::ffi::{CStr, CString};
use std::ptr;

use holderlie_ffi::*;

unsafe fn last_error() -> String {
    let p = hl_last_error();
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    hl_string_free(p);
    s
}

#[test]
fn polynomial_norm_on_interval() {
    unsafe {
        let mut d = ptr::null_mut();
        assert_eq!(hl_domain_box([0.0].as_ptr(), [1.0].as_ptr(), 1, &mut d), HlStatus::Ok);
        let mut diam = 0.0;
        assert_eq!(hl_domain_diameter(d, &mut diam), HlStatus::Ok);
        assert!((diam - 1.0).abs() < 1e-15);

        // t ↦ 2t: sup ≈ 2, (1,0) seminorm is 2.
        let mut p = ptr::null_mut();
        assert_eq!(hl_polynomial_univariate([0.0, 2.0].as_ptr(), 2, &mut p), HlStatus::Ok);
        let mut y = [0.0];
        assert_eq!(hl_polynomial_eval(p, [0.25].as_ptr(), 1, y.as_mut_ptr(), 1), HlStatus::Ok);
        assert_eq!(y[0], 0.5);

        let mut est = HlNormEstimate::default();
        assert_eq!(hl_holder_norm(p, d, 1, 0.0, ptr::null(), &mut est), HlStatus::Ok);
        assert!((est.seminorm_part - 2.0).abs() < 1e-12);
        assert!(est.sup_part <= 2.0 && est.sup_part > 1.8);
        assert!((est.total - est.sup_part - est.seminorm_part).abs() < 1e-15);

        let mut c = 0.0;
        assert_eq!(hl_product_constant(d, 0, &mut c), HlStatus::Ok);
        assert_eq!(c, 2.0);
        let mut dk = 0.0;
        assert_eq!(hl_inclusion_constant(d, 0, &mut dk), HlStatus::Ok);
        assert!(dk >= 1.0);
        assert_eq!(hl_product_constant(d, 1, &mut c), HlStatus::Ok);
        assert!((c - (2.0 * dk + 2.0) * 2.0).abs() < 1e-12 * c);

        hl_polynomial_free(p);
        hl_domain_free(d);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut d = ptr::null_mut();
        let st = hl_domain_ball([0.0, 0.0].as_ptr(), 2, 0.75, &mut d);
        assert_eq!(st, HlStatus::DiameterExceeded);
        assert!(d.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(hl_domain_diameter(ptr::null(), &mut 0.0), HlStatus::NullPointer);
        assert!(last_error().contains("null"));

        let mut p = ptr::null_mut();
        let bad = CString::new("{not json").unwrap();
        assert_eq!(hl_polynomial_from_json(bad.as_ptr(), &mut p), HlStatus::ConfigInvalid);

        let g = [3.0, 0.0, 0.0, 3.0];
        let mut out = [0.0; 4];
        assert_eq!(hl_matrix_log(g.as_ptr(), 2, out.as_mut_ptr()), HlStatus::LogDomain);
    }
}

#[test]
fn polynomial_from_record() {
    unsafe {
        let rec = holderlie::corpus::PolynomialRecord::from_polynomial("p", &holderlie::Polynomial::univariate(&[1.0, 0.0, 3.0]));
        let json = CString::new(serde_json::to_string(&rec).unwrap()).unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(hl_polynomial_from_json(json.as_ptr(), &mut p), HlStatus::Ok, "{}", last_error());
        let mut y = [0.0];
        assert_eq!(hl_polynomial_eval(p, [2.0].as_ptr(), 1, y.as_mut_ptr(), 1), HlStatus::Ok);
        assert_eq!(y[0], 13.0);
        assert_eq!(hl_polynomial_eval(p, [2.0, 1.0].as_ptr(), 2, y.as_mut_ptr(), 1), HlStatus::InvalidArgument);
        hl_polynomial_free(p);
    }
}

#[test]
fn exp_log_and_bch_abelian() {
    unsafe {
        let x = [0.0, 0.1, -0.1, 0.0];
        let mut g = [0.0; 4];
        assert_eq!(hl_matrix_exp(x.as_ptr(), 2, g.as_mut_ptr()), HlStatus::Ok);
        assert!((g[0] - 0.1f64.cos()).abs() < 1e-14);
        assert!((g[1] - 0.1f64.sin()).abs() < 1e-14);
        let mut back = [0.0; 4];
        assert_eq!(hl_matrix_log(g.as_ptr(), 2, back.as_mut_ptr()), HlStatus::Ok);
        for (a, b) in back.iter().zip(&x) {
            assert!((a - b).abs() < 1e-13);
        }

        let name = CString::new("abelian2").unwrap();
        let (a, b) = ([0.1, 0.0, 0.0, 0.05], [0.02, 0.0, 0.0, -0.03]);
        let mut z = [0.0; 4];
        assert_eq!(hl_bch(name.as_ptr(), a.as_ptr(), b.as_ptr(), 6, 0.5, z.as_mut_ptr()), HlStatus::Ok, "{}", last_error());
        for i in 0..4 {
            assert!((z[i] - a[i] - b[i]).abs() < 1e-15);
        }
        let big = [5.0, 0.0, 0.0, 5.0];
        assert_eq!(hl_bch(name.as_ptr(), big.as_ptr(), b.as_ptr(), 6, 0.5, z.as_mut_ptr()), HlStatus::OutsideConvergenceDomain);
        let unknown = CString::new("e8").unwrap();
        assert_ne!(hl_bch(unknown.as_ptr(), a.as_ptr(), b.as_ptr(), 6, 0.5, z.as_mut_ptr()), HlStatus::Ok);
    }
}

#[test]
fn suite_report_round_trip() {
    unsafe {
        let cfg = CString::new(r#"{"suites": ["inclusions"], "corpus": {"count": 4}}"#).unwrap();
        let mut report = ptr::null_mut();
        let mut passed = false;
        assert_eq!(hl_run_suite_json(cfg.as_ptr(), &mut report, &mut passed), HlStatus::Ok, "{}", last_error());
        assert!(passed);
        let text = CStr::from_ptr(report).to_str().unwrap().to_owned();
        hl_string_free(report);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["total_failed"], 0);

        let bad = CString::new(r#"{"no_such_field": 1}"#).unwrap();
        assert_eq!(hl_run_suite_json(bad.as_ptr(), &mut report, &mut passed), HlStatus::ConfigInvalid);

        let mut table = ptr::null_mut();
        assert_eq!(hl_constants_json(ptr::null(), &mut table), HlStatus::Ok);
        let t: serde_json::Value = serde_json::from_str(CStr::from_ptr(table).to_str().unwrap()).unwrap();
        hl_string_free(table);
        assert!(t["product"].is_array());
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/holderlie.h")).unwrap();
    for f in [
        "hl_last_error", "hl_string_free", "hl_version", "hl_domain_ball", "hl_domain_box", "hl_domain_free",
        "hl_domain_diameter", "hl_polynomial_univariate", "hl_polynomial_from_json", "hl_polynomial_free",
        "hl_polynomial_eval", "hl_holder_norm", "hl_product_constant", "hl_inclusion_constant", "hl_matrix_exp",
        "hl_matrix_log", "hl_bch", "hl_run_suite_json", "hl_constants_json",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("HL_STATUS_OK = 0"));
    let v = unsafe { CStr::from_ptr(hl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
