use std::ffi::{CStr, CString};
use std::ptr;

use parking_ilu_ffi::*;

fn last_error() -> String {
    let p = pilu_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn constant_model_round_trip() {
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(pilu_model_new_constant(-2.0, 2.0, 1.0, &mut model), PiluStatus::Ok);
        assert_eq!(pilu_model_validate(model), PiluStatus::Ok);

        let mut oracle = ptr::null_mut();
        assert_eq!(pilu_oracle_new(model, &mut oracle), PiluStatus::Ok);
        let mut r = PiluOracleResult::default();
        assert_eq!(pilu_oracle_result(oracle, &mut r), PiluStatus::Ok);
        assert!((r.b_star + 2f64.ln()).abs() < 1e-8);
        assert!((r.tail_mean - 1.0).abs() < 1e-9);

        let mut gap = f64::NAN;
        assert_eq!(pilu_oracle_gap(oracle, 0.0, &mut gap), PiluStatus::Ok);
        assert!((gap - (1.0 - 2f64.ln())).abs() < 1e-9);
        let mut d2 = f64::NAN;
        assert_eq!(pilu_oracle_gap_second_derivative(oracle, -1.0, &mut d2), PiluStatus::Ok);
        assert!((d2 - 2.0 * (-1.0f64).exp()).abs() < 1e-9);

        let mut bounds = PiluBounds::default();
        assert_eq!(pilu_bounds(oracle, &mut bounds), PiluStatus::Ok);
        let (a, b) = (bounds.lower_bound, 2.0);
        assert!((bounds.c_prime - 1.0 / (40.0 / ((b - a) * (b - a)) + 1.0 / a)).abs() < 1e-12);

        pilu_oracle_free(oracle);
        pilu_model_free(model);
    }
}

#[test]
fn model_expression_and_errors() {
    unsafe {
        let mut model = ptr::null_mut();
        let expr = CString::new("sinusoidal(1.5, 0.3, 1.0)").unwrap();
        assert_eq!(pilu_model_new(-2.0, 2.0, expr.as_ptr(), &mut model), PiluStatus::Ok);
        let mut v = 0.0;
        assert_eq!(pilu_model_evaluate(model, 0.0, &mut v), PiluStatus::Ok);
        assert_eq!(v, 1.5);
        assert_eq!(pilu_model_evaluate(model, -3.0, &mut v), PiluStatus::Domain);
        assert!(last_error().contains("outside"));
        assert_eq!(pilu_model_cumulative(model, 0.0, &mut v), PiluStatus::Ok);
        assert_eq!(v, 0.0);
        pilu_model_free(model);

        let bad = CString::new("cubic(1)").unwrap();
        assert_eq!(pilu_model_new(-2.0, 2.0, bad.as_ptr(), &mut model), PiluStatus::InvalidArgument);
        assert_eq!(pilu_model_new(-2.0, 2.0, ptr::null(), &mut model), PiluStatus::NullPointer);

        let mut low = ptr::null_mut();
        assert_eq!(pilu_model_new_constant(-2.0, 2.0, 0.5, &mut low), PiluStatus::Ok);
        assert_eq!(pilu_model_validate(low), PiluStatus::ClassViolation);
        assert!(last_error().contains("property 2"));
        let mut oracle = ptr::null_mut();
        assert_eq!(pilu_oracle_new(low, &mut oracle), PiluStatus::ClassViolation);
        assert!(oracle.is_null());
        pilu_model_free(low);

        assert_eq!(pilu_model_new_constant(-0.1, 1.05, 1.0, &mut model), PiluStatus::ClassViolation);
        assert_eq!(pilu_model_validate(ptr::null()), PiluStatus::NullPointer);
        pilu_model_free(ptr::null_mut());
    }
}

#[test]
fn ilu_steps_are_reproducible() {
    unsafe {
        let mut model = ptr::null_mut();
        assert_eq!(pilu_model_new_constant(-2.0, 2.0, 1.0, &mut model), PiluStatus::Ok);
        let run = || {
            let mut ilu = ptr::null_mut();
            assert_eq!(pilu_ilu_new(-2.0, &mut ilu), PiluStatus::Ok);
            let mut t = f64::NAN;
            assert_eq!(pilu_ilu_next_threshold(ilu, &mut t), PiluStatus::Ok);
            assert_eq!(t, 0.0);
            let mut steps = Vec::new();
            for _ in 0..50 {
                let mut s = PiluStep::default();
                assert_eq!(pilu_ilu_step(ilu, model, 11, 0, &mut s), PiluStatus::Ok);
                steps.push(s);
            }
            pilu_ilu_free(ilu);
            steps
        };
        let a = run();
        assert_eq!(a, run());
        assert!(a[0].full_information && a[0].threshold == 0.0);
        assert_eq!(a[49].round, 49);
        assert!(a.iter().all(|s| (-2.0..=0.0).contains(&s.threshold) && s.stop > s.threshold));
        assert!(a.windows(2).all(|w| w[1].records >= w[0].records));

        let mut ilu = ptr::null_mut();
        assert_eq!(pilu_ilu_new(0.5, &mut ilu), PiluStatus::InvalidArgument);
        pilu_model_free(model);
    }
}

#[test]
fn version_is_static_string() {
    let v = unsafe { CStr::from_ptr(pilu_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
