use std::ffi::{CStr, CString};
use std::ptr;

use sesam_core::oracle::{GranularityRule, MockScene};
use sesam_core::raster::{BinaryMask, Rect, IGNORE};
use sesam_ffi::*;

fn last_error() -> String {
    let p = sesam_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn scene_json() -> CString {
    let mut scene = MockScene::new("img", 12, 10, 3)
        .with_shape(1, BinaryMask::from_rect(12, 10, Rect::new(1, 1, 6, 9)))
        .with_shape(2, BinaryMask::from_rect(12, 10, Rect::new(7, 2, 11, 8)));
    scene.granularity = GranularityRule::Exact;
    CString::new(scene.to_json()).unwrap()
}

unsafe fn map_from(width: usize, height: usize, labels: &[u16]) -> *mut SesamLabelMap {
    let mut out = ptr::null_mut();
    let st = sesam_label_map_from_raw(width, height, 3, labels.as_ptr(), labels.len(), &mut out);
    assert_eq!(st, SesamStatus::Ok);
    out
}

#[test]
fn refine_through_handles() {
    unsafe {
        let doc = scene_json();
        let docs = [doc.as_ptr()];
        let mut oracle = ptr::null_mut();
        assert_eq!(sesam_oracle_mock_new(docs.as_ptr(), 1, &mut oracle), SesamStatus::Ok);

        // shape interiors labeled, borders left open
        let mut weak = vec![IGNORE; 120];
        for y in 2..8 {
            for x in 2..5 {
                weak[y * 12 + x] = 1;
            }
            if (3..7).contains(&y) {
                for x in 8..10 {
                    weak[y * 12 + x] = 2;
                }
            }
        }
        let map = map_from(12, 10, &weak);
        let cfg = sesam_config_default();
        let image = CString::new("img").unwrap();
        let mut result = ptr::null_mut();
        let st = sesam_refine(map, SesamWeakKind::Coarse, image.as_ptr(), oracle, cfg, &mut result);
        assert_eq!(st, SesamStatus::Ok, "{}", last_error());
        assert_eq!(sesam_refine_result_instance_count(result), 2);

        let labels = sesam_refine_result_labels(result);
        assert_eq!(
            (sesam_label_map_width(labels), sesam_label_map_height(labels)),
            (12, 10)
        );
        let data = std::slice::from_raw_parts(sesam_label_map_data(labels), 120);
        assert_eq!(data[12 + 1], 1);
        assert_eq!(data[2 * 12 + 7], 2);
        assert_eq!(data[0], IGNORE);

        let audit = CStr::from_ptr(sesam_refine_result_audit(result)).to_str().unwrap();
        assert_eq!(audit.lines().count(), 2);
        assert!(audit.contains("\"request_id\":\"img:1:0\""));

        let mut gt_labels = vec![IGNORE; 120];
        gt_labels.copy_from_slice(data);
        let gt = map_from(12, 10, &gt_labels);
        let mut summary = SesamEvalSummary::default();
        assert_eq!(sesam_evaluate(labels, gt, &mut summary), SesamStatus::Ok);
        assert_eq!(summary.miou, 1.0);

        sesam_label_map_free(gt);
        sesam_refine_result_free(result);
        sesam_label_map_free(map);
        sesam_config_free(cfg);
        sesam_oracle_free(oracle);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(
            sesam_label_map_from_raw(2, 2, 3, ptr::null(), 4, &mut out),
            SesamStatus::NullPointer
        );
        assert!(last_error().contains("labels"));

        let bad = [0u16, 1, 9, 0];
        assert_eq!(
            sesam_label_map_from_raw(2, 2, 3, bad.as_ptr(), 4, &mut out),
            SesamStatus::InvalidArgument
        );

        let a = map_from(2, 2, &[0, 1, 1, 0]);
        let b = map_from(1, 4, &[0, 1, 1, 0]);
        let mut s = SesamEvalSummary::default();
        assert_eq!(sesam_evaluate(a, b, &mut s), SesamStatus::DimensionMismatch);

        let json = CString::new(r#"{"theta1": 0.96, "theta2": 0.9}"#).unwrap();
        let mut cfg = ptr::null_mut();
        assert_eq!(sesam_config_from_json(json.as_ptr(), &mut cfg), SesamStatus::Config);
        assert!(cfg.is_null());

        let path = CString::new("/nonexistent/weak.lbl").unwrap();
        assert_eq!(sesam_label_map_read(path.as_ptr(), &mut out), SesamStatus::Io);

        let cfg = sesam_config_default();
        let image = CString::new("missing").unwrap();
        let doc = scene_json();
        let docs = [doc.as_ptr()];
        let mut oracle = ptr::null_mut();
        assert_eq!(sesam_oracle_mock_new(docs.as_ptr(), 1, &mut oracle), SesamStatus::Ok);
        let weak = map_from(2, 2, &[1, 1, 1, IGNORE]);
        let mut result = ptr::null_mut();
        assert_eq!(
            sesam_refine(weak, SesamWeakKind::Coarse, image.as_ptr(), oracle, cfg, &mut result),
            SesamStatus::Oracle
        );
        assert!(last_error().contains("missing"));

        for h in [a, b, weak] {
            sesam_label_map_free(h);
        }
        sesam_config_free(cfg);
        sesam_oracle_free(oracle);
        // freeing null is a no-op
        sesam_label_map_free(ptr::null_mut());
        sesam_refine_result_free(ptr::null_mut());
    }
}

#[test]
fn config_round_trip_and_seed() {
    unsafe {
        let cfg = sesam_config_default();
        assert_eq!(sesam_config_set_seed(cfg, 42), SesamStatus::Ok);
        let mut text = ptr::null_mut();
        assert_eq!(sesam_config_to_json(cfg, &mut text), SesamStatus::Ok);
        let json = CStr::from_ptr(text).to_owned();
        assert!(json.to_str().unwrap().contains("\"seed\": 42"));
        let mut back = ptr::null_mut();
        assert_eq!(sesam_config_from_json(json.as_ptr(), &mut back), SesamStatus::Ok);
        sesam_string_free(text);
        sesam_config_free(back);
        sesam_config_free(cfg);
    }
}

#[test]
fn rle_and_hours() {
    unsafe {
        let bits = [0u8, 0, 1, 1, 1, 0];
        let (mut buf, mut len) = (ptr::null_mut(), 0usize);
        assert_eq!(
            sesam_rle_encode(bits.as_ptr(), 6, 1, &mut buf, &mut len),
            SesamStatus::Ok
        );
        assert_eq!(std::slice::from_raw_parts(buf, len), &[2, 3, 1]);
        let mut back = [9u8; 6];
        assert_eq!(sesam_rle_decode(buf, len, 6, 1, back.as_mut_ptr()), SesamStatus::Ok);
        assert_eq!(back, bits);
        assert_eq!(
            sesam_rle_decode(buf, len, 7, 1, back.as_mut_ptr()),
            SesamStatus::InvalidArgument
        );
        sesam_bytes_free(buf, len);

        let mut h = 0.0;
        assert_eq!(
            sesam_annotation_hours(SesamAnnotationKind::Fine, 100, &mut h),
            SesamStatus::Ok
        );
        assert_eq!(h, 150.0);
        assert_eq!(
            sesam_annotation_hours(SesamAnnotationKind::Point, 1, ptr::null_mut()),
            SesamStatus::NullPointer
        );
    }
}

#[test]
fn version_matches_package() {
    let v = unsafe { CStr::from_ptr(sesam_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
