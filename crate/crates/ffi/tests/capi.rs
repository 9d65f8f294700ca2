// Copyright 2026 the wheelbks developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Exercises the C ABI from Rust: handle lifecycles, agreement with the
//! underlying library, and the error-code contract.

use std::ffi::{CStr, CString};
use std::ptr;

use wheelbks::analysis::{propagate, DataSetTable, Method, PropagationConfig};
use wheelbks::interfsim::{reference_config, run_pipeline};
use wheelbks::qalg::SpinState;
use wheelbks::weakval::{witness_c, WeakValue};
use wheelbks::wheel::WheelSet;
use wheelbks_ffi::*;
use WheelbksStatus::*;

fn last_error_text() -> Option<String> {
    let ptr = wheelbks_last_error();
    if ptr.is_null() {
        return None;
    }
    let text = unsafe { CStr::from_ptr(ptr) }.to_str().ok().map(str::to_owned);
    unsafe { wheelbks_string_free(ptr) };
    text
}

#[test]
fn wheel_lifecycle_and_proofs() {
    unsafe {
        let mut wheel = ptr::null_mut();
        assert_eq!(wheelbks_wheel_build(5, &mut wheel), WheelbksStatusOk);
        assert!(!wheel.is_null());

        let (mut observables, mut contexts) = (0usize, 0usize);
        assert_eq!(
            wheelbks_wheel_shape(wheel, &mut observables, &mut contexts),
            WheelbksStatusOk
        );
        assert_eq!((observables, contexts), (15, 8));

        let mut ok = false;
        assert_eq!(wheelbks_wheel_verify(wheel, &mut ok), WheelbksStatusOk);
        assert!(ok);

        let mut inconsistent = false;
        assert_eq!(
            wheelbks_wheel_nchv_inconsistent(wheel, &mut inconsistent),
            WheelbksStatusOk
        );
        assert!(inconsistent);

        let mut json = ptr::null_mut();
        assert_eq!(wheelbks_wheel_to_json(wheel, &mut json), WheelbksStatusOk);
        let text = CStr::from_ptr(json).to_str().expect("utf-8 json").to_owned();
        wheelbks_string_free(json);
        let reparsed = WheelSet::from_json(&text).expect("round-trips");
        assert_eq!(reparsed.n(), 5);

        wheelbks_wheel_free(wheel);
    }
}

#[test]
fn witness_and_projector_match_the_library() {
    let re = [0.0; 5];
    let im = [1.0; 5];
    let zw: Vec<WeakValue> = (0..5).map(|k| WeakValue::new(re[k], im[k])).collect();
    unsafe {
        let (mut c_re, mut c_im) = (f64::NAN, f64::NAN);
        assert_eq!(
            wheelbks_witness(5, re.as_ptr(), im.as_ptr(), &mut c_re, &mut c_im),
            WheelbksStatusOk
        );
        let want = witness_c(5, &zw).expect("five spins");
        assert_eq!((c_re, c_im), (want.re, want.im));
        assert_eq!((c_re, c_im), (-3.0, 0.0));

        let (mut p_re, mut p_im) = (f64::NAN, f64::NAN);
        assert_eq!(
            wheelbks_projector(5, 0, re.as_ptr(), im.as_ptr(), &mut p_re, &mut p_im),
            WheelbksStatusOk
        );
        assert_eq!((p_re, p_im), (-0.25, 0.0));
    }
}

#[test]
fn propagated_estimates_match_the_library() {
    let table = DataSetTable::bundled();
    let subset: Vec<usize> = (1..=5).collect();
    let cfg = PropagationConfig {
        method: Method::MonteCarlo,
        mc_samples: 50_000,
        seed: 3,
        threads: 2,
    };
    let want = propagate(
        |zw| witness_c(5, zw).expect("five spins"),
        &table,
        &subset,
        &cfg,
    )
    .expect("propagation succeeds");

    unsafe {
        let mut handle = ptr::null_mut();
        assert_eq!(wheelbks_table_bundled(&mut handle), WheelbksStatusOk);
        let mut len = 0usize;
        assert_eq!(wheelbks_table_len(handle, &mut len), WheelbksStatusOk);
        assert_eq!(len, 17);

        let mut est = WheelbksEstimate {
            re: 0.0,
            re_sigma: 0.0,
            im: 0.0,
            im_sigma: 0.0,
        };
        assert_eq!(
            wheelbks_witness_propagated(
                handle,
                5,
                WheelbksMethod::WheelbksMethodMonteCarlo,
                50_000,
                3,
                2,
                &mut est,
            ),
            WheelbksStatusOk
        );
        assert_eq!(est.re.to_bits(), want.value.re.to_bits());
        assert_eq!(est.re_sigma.to_bits(), want.sigma_re.to_bits());
        assert_eq!(est.im_sigma.to_bits(), want.sigma_im.to_bits());

        assert_eq!(
            wheelbks_projector_propagated(
                handle,
                5,
                0,
                WheelbksMethod::WheelbksMethodFirstOrder,
                0,
                0,
                1,
                &mut est,
            ),
            WheelbksStatusOk
        );
        assert!((est.re + 0.2508).abs() < 5e-4);
        assert!(-est.re / est.re_sigma > 50.0);

        wheelbks_table_free(handle);
    }
}

#[test]
fn table_parses_external_csv() {
    let text = CString::new(DataSetTable::bundled().to_csv()).expect("no NULs");
    unsafe {
        let mut handle = ptr::null_mut();
        assert_eq!(
            wheelbks_table_from_csv(text.as_ptr(), &mut handle),
            WheelbksStatusOk
        );
        let mut len = 0usize;
        assert_eq!(wheelbks_table_len(handle, &mut len), WheelbksStatusOk);
        assert_eq!(len, 17);
        wheelbks_table_free(handle);

        let garbage = CString::new("set_id,re\n1,0.5\n").expect("no NULs");
        let status = wheelbks_table_from_csv(garbage.as_ptr(), &mut handle);
        assert_eq!(status, WheelbksStatusDataError);
        assert!(last_error_text().is_some());
    }
}

#[test]
fn simulate_extract_matches_the_pipeline() {
    let mut cfg = reference_config(11);
    cfg.subtract_orthogonal_bg = true;
    let want = run_pipeline(&cfg, &SpinState::plus_x(), &SpinState::plus_y())
        .expect("pipeline runs")
        .measured;
    unsafe {
        let mut est = WheelbksEstimate {
            re: 0.0,
            re_sigma: 0.0,
            im: 0.0,
            im_sigma: 0.0,
        };
        assert_eq!(
            wheelbks_simulate_extract(15.0, 11, &mut est),
            WheelbksStatusOk
        );
        assert_eq!(est.re.to_bits(), want.re.to_bits());
        assert_eq!(est.im.to_bits(), want.im.to_bits());
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut wheel = ptr::null_mut();
        assert_eq!(wheelbks_wheel_build(4, &mut wheel), WheelbksStatusUsageError);
        assert!(wheel.is_null());
        let message = last_error_text().expect("failure recorded");
        assert!(message.contains('4'), "message: {}", message);

        assert_eq!(
            wheelbks_wheel_build(5, ptr::null_mut()),
            WheelbksStatusNullPointer
        );

        let mut ok = false;
        assert_eq!(
            wheelbks_wheel_verify(ptr::null(), &mut ok),
            WheelbksStatusNullPointer
        );

        let re = [0.0; 5];
        let im = [1.0; 5];
        let (mut out_re, mut out_im) = (0.0, 0.0);
        assert_eq!(
            wheelbks_projector(5, 99, re.as_ptr(), im.as_ptr(), &mut out_re, &mut out_im),
            WheelbksStatusUsageError
        );
        assert_eq!(
            wheelbks_witness(5, ptr::null(), im.as_ptr(), &mut out_re, &mut out_im),
            WheelbksStatusNullPointer
        );

        // No failure has happened yet on a fresh thread.
        let handle = std::thread::spawn(|| wheelbks_last_error().is_null());
        assert!(handle.join().expect("thread joins"));

        wheelbks_string_free(ptr::null_mut());
        wheelbks_wheel_free(ptr::null_mut());
        wheelbks_table_free(ptr::null_mut());
    }
}

#[test]
fn generated_header_is_committed_and_current() {
    let header = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/include/wheelbks.h"
    ))
    .expect("header exists");
    for symbol in [
        "WheelbksStatus",
        "WheelbksEstimate",
        "wheelbks_wheel_build",
        "wheelbks_witness_propagated",
        "wheelbks_simulate_extract",
        "wheelbks_last_error",
    ] {
        assert!(header.contains(symbol), "header lacks {}", symbol);
    }
}
