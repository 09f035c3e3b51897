//! C interface to the refinement toolkit.
//!
//! Objects are opaque handles created by `sesam_*_new`/`_open`/`_read`
//! functions and released with the matching `_free`. Fallible calls return a
//! [`SesamStatus`]; on failure `sesam_last_error()` describes what went wrong
//! on the calling thread. Strings and byte buffers handed out by the library
//! are released with `sesam_string_free` and `sesam_bytes_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use sesam_core::config::RefinementConfig;
use sesam_core::cost::{self, AnnotationKind};
use sesam_core::metrics;
use sesam_core::oracle::{rle_decode, rle_encode, MaskOracle, MockOracle, MockScene, ProcessOracle, ReplayOracle};
use sesam_core::raster::io::{read_label_map, write_label_map};
use sesam_core::raster::{BinaryMask, LabelMap, RasterError};
use sesam_core::refine::{self, RefineError, WeakAnnotation, WeakKind};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SesamStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Io = 4,
    Oracle = 5,
    Config = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SesamAnnotationKind {
    Fine = 0,
    Coarse = 1,
    Scribble = 2,
    Point = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SesamWeakKind {
    Coarse = 0,
    Scribble = 1,
    Point = 2,
}

/// Headline numbers of an evaluation.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SesamEvalSummary {
    pub miou: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// A dense label map; 65535 marks unlabeled pixels.
pub struct SesamLabelMap(LabelMap);

/// Refinement settings.
pub struct SesamConfig(RefinementConfig);

/// A mask oracle backend.
pub struct SesamOracle(Box<dyn MaskOracle>);

/// Output of one refinement run.
pub struct SesamRefineResult {
    labels: SesamLabelMap,
    sam: SesamLabelMap,
    audit_json: CString,
    instances: usize,
}

struct Failure {
    status: SesamStatus,
    message: String,
}

impl Failure {
    fn new(status: SesamStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<RasterError> for Failure {
    fn from(e: RasterError) -> Self {
        let status = match e {
            RasterError::DimensionMismatch { .. } => SesamStatus::DimensionMismatch,
            RasterError::Io(_) => SesamStatus::Io,
            _ => SesamStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<RefineError> for Failure {
    fn from(e: RefineError) -> Self {
        let status = match &e {
            RefineError::Config(_) => SesamStatus::Config,
            RefineError::Oracle { .. } | RefineError::ResponseCount { .. } | RefineError::ResponseOrder { .. } => {
                SesamStatus::Oracle
            }
            RefineError::Raster(RasterError::DimensionMismatch { .. }) => SesamStatus::DimensionMismatch,
            _ => SesamStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn run(f: impl FnOnce() -> Result<(), Failure>) -> SesamStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SesamStatus::Ok,
        Ok(Err(e)) => {
            set_last_error(&e.message);
            e.status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_last_error(&format!("internal error: {msg}"));
            SesamStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(SesamStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure::new(SesamStatus::NullPointer, format!("{what} is null")))
}

unsafe fn string_arg(p: *const c_char, what: &str) -> Result<String, Failure> {
    if p.is_null() {
        return Err(Failure::new(SesamStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| Failure::new(SesamStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(SesamStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

fn owned_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(SesamStatus::InvalidArgument, "string contains nul"))
}

/// Message for the most recent failed call on this thread, or null if none
/// has failed. Valid until another call fails on the same thread.
#[no_mangle]
pub extern "C" fn sesam_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn sesam_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn sesam_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `data`/`len` must be a buffer returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn sesam_bytes_free(data: *mut u8, len: usize) {
    if !data.is_null() {
        drop(Box::from_raw(ptr::slice_from_raw_parts_mut(data, len)));
    }
}

// ---------------------------------------------------------------- label maps

/// New map with every pixel unlabeled.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sesam_label_map_new(
    width: usize,
    height: usize,
    class_count: u32,
    out: *mut *mut SesamLabelMap,
) -> SesamStatus {
    run(|| {
        let out = out_ptr(out, "out")?;
        *out = boxed(SesamLabelMap(LabelMap::new(width, height, class_count)?));
        Ok(())
    })
}

/// Copy `width * height` row-major labels into a new map.
///
/// # Safety
/// `labels` must point to `len` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_label_map_from_raw(
    width: usize,
    height: usize,
    class_count: u32,
    labels: *const u16,
    len: usize,
    out: *mut *mut SesamLabelMap,
) -> SesamStatus {
    run(|| {
        let out = out_ptr(out, "out")?;
        let data = slice_arg(labels, len, "labels")?;
        *out = boxed(SesamLabelMap(LabelMap::from_raw(
            width,
            height,
            class_count,
            data.to_vec(),
        )?));
        Ok(())
    })
}

/// # Safety
/// `path` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_label_map_read(path: *const c_char, out: *mut *mut SesamLabelMap) -> SesamStatus {
    run(|| {
        let out = out_ptr(out, "out")?;
        let path = string_arg(path, "path")?;
        *out = boxed(SesamLabelMap(read_label_map(PathBuf::from(path))?));
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle; `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sesam_label_map_write(map: *const SesamLabelMap, path: *const c_char) -> SesamStatus {
    run(|| {
        let map = deref(map, "map")?;
        let path = string_arg(path, "path")?;
        write_label_map(PathBuf::from(path), &map.0)?;
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sesam_label_map_width(map: *const SesamLabelMap) -> usize {
    map.as_ref().map_or(0, |m| m.0.width())
}

/// # Safety
/// `map` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sesam_label_map_height(map: *const SesamLabelMap) -> usize {
    map.as_ref().map_or(0, |m| m.0.height())
}

/// # Safety
/// `map` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sesam_label_map_class_count(map: *const SesamLabelMap) -> u32 {
    map.as_ref().map_or(0, |m| m.0.class_count())
}

/// Borrowed pointer to the `width * height` labels; valid while `map` lives.
///
/// # Safety
/// `map` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sesam_label_map_data(map: *const SesamLabelMap) -> *const u16 {
    map.as_ref().map_or(ptr::null(), |m| m.0.labels().as_ptr())
}

/// # Safety
/// `map` must come from this library or be null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn sesam_label_map_free(map: *mut SesamLabelMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

// ---------------------------------------------------------------- config

/// Default settings. Never fails.
#[no_mangle]
pub extern "C" fn sesam_config_default() -> *mut SesamConfig {
    boxed(SesamConfig(RefinementConfig::default()))
}

/// Parse and validate a JSON config; missing keys take defaults.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_config_from_json(json: *const c_char, out: *mut *mut SesamConfig) -> SesamStatus {
    run(|| {
        let out = out_ptr(out, "out")?;
        let text = string_arg(json, "json")?;
        let cfg = RefinementConfig::from_json(&text)
            .and_then(|c| c.validate().map(|()| c))
            .map_err(|e| Failure::new(SesamStatus::Config, e.to_string()))?;
        *out = boxed(SesamConfig(cfg));
        Ok(())
    })
}

/// Serialized settings; release with `sesam_string_free`.
///
/// # Safety
/// `config` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_config_to_json(config: *const SesamConfig, out: *mut *mut c_char) -> SesamStatus {
    run(|| {
        let cfg = deref(config, "config")?;
        let out = out_ptr(out, "out")?;
        *out = owned_string(cfg.0.to_json())?;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn sesam_config_set_seed(config: *mut SesamConfig, seed: u64) -> SesamStatus {
    run(|| {
        out_ptr(config, "config")?.0.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle or null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn sesam_config_free(config: *mut SesamConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

// ---------------------------------------------------------------- oracles

/// Mock oracle over scenes given as JSON documents.
///
/// # Safety
/// `scenes` must point to `count` nul-terminated strings; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_oracle_mock_new(
    scenes: *const *const c_char,
    count: usize,
    out: *mut *mut SesamOracle,
) -> SesamStatus {
    run(|| {
        let out = out_ptr(out, "out")?;
        let docs = slice_arg(scenes, count, "scenes")?;
        if docs.is_empty() {
            return Err(Failure::new(SesamStatus::InvalidArgument, "no scenes"));
        }
        let mut parsed = Vec::with_capacity(docs.len());
        for (i, &doc) in docs.iter().enumerate() {
            let text = string_arg(doc, "scene")?;
            let scene = MockScene::from_json(&text)
                .map_err(|e| Failure::new(SesamStatus::InvalidArgument, format!("scene {i}: {e}")))?;
            scene
                .validate()
                .map_err(|e| Failure::new(SesamStatus::InvalidArgument, format!("scene {i}: {e}")))?;
            parsed.push(scene);
        }
        *out = boxed(SesamOracle(Box::new(MockOracle::new(parsed))));
        Ok(())
    })
}

/// Oracle backed by an external command speaking the line protocol.
///
/// # Safety
/// `command` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_oracle_process_new(command: *const c_char, out: *mut *mut SesamOracle) -> SesamStatus {
    run(|| {
        let out = out_ptr(out, "out")?;
        let cmd = string_arg(command, "command")?;
        if cmd.trim().is_empty() {
            return Err(Failure::new(SesamStatus::InvalidArgument, "empty command"));
        }
        *out = boxed(SesamOracle(Box::new(ProcessOracle::new(cmd))));
        Ok(())
    })
}

/// Oracle answering from a recorded responses file.
///
/// # Safety
/// `path` must be a nul-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_oracle_replay_open(path: *const c_char, out: *mut *mut SesamOracle) -> SesamStatus {
    run(|| {
        let out = out_ptr(out, "out")?;
        let path = string_arg(path, "path")?;
        let oracle =
            ReplayOracle::open(&PathBuf::from(path)).map_err(|e| Failure::new(SesamStatus::Io, e.to_string()))?;
        *out = boxed(SesamOracle(Box::new(oracle)));
        Ok(())
    })
}

/// # Safety
/// `oracle` must be a live handle or null; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn sesam_oracle_free(oracle: *mut SesamOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

// ---------------------------------------------------------------- refinement

/// Refine `weak` labels for image `image_ref`. Point and scribble labels are
/// grown into coarse regions first.
///
/// # Safety
/// All handles must be live; `image_ref` nul-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_refine(
    weak: *const SesamLabelMap,
    kind: SesamWeakKind,
    image_ref: *const c_char,
    oracle: *const SesamOracle,
    config: *const SesamConfig,
    out: *mut *mut SesamRefineResult,
) -> SesamStatus {
    run(|| {
        let weak = deref(weak, "weak")?;
        let oracle = deref(oracle, "oracle")?;
        let cfg = deref(config, "config")?;
        let image_ref = string_arg(image_ref, "image_ref")?;
        let out = out_ptr(out, "out")?;
        let kind = match kind {
            SesamWeakKind::Coarse => WeakKind::Coarse,
            SesamWeakKind::Scribble => WeakKind::Scribble,
            SesamWeakKind::Point => WeakKind::Point,
        };
        let annotation = WeakAnnotation {
            kind,
            labels: weak.0.clone(),
        };
        let (coarse, mut audit) = refine::bootstrap_coarse(&annotation, &image_ref, oracle.0.as_ref(), &cfg.0)?;
        let result = refine::refine_labels(&coarse, &image_ref, oracle.0.as_ref(), &cfg.0, None)?;
        let instances = result.audit.len();
        audit.extend(result.audit);
        let mut lines = String::new();
        for rec in &audit {
            lines.push_str(&serde_json::to_string(rec).map_err(|e| Failure::new(SesamStatus::Panic, e.to_string()))?);
            lines.push('\n');
        }
        *out = boxed(SesamRefineResult {
            labels: SesamLabelMap(result.labels),
            sam: SesamLabelMap(result.sam),
            audit_json: CString::new(lines).expect("json has no nul"),
            instances,
        });
        Ok(())
    })
}

/// Refined labels, borrowed from `result`.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sesam_refine_result_labels(result: *const SesamRefineResult) -> *const SesamLabelMap {
    result.as_ref().map_or(ptr::null(), |r| &r.labels)
}

/// Oracle-derived labels alone, borrowed from `result`.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sesam_refine_result_sam(result: *const SesamRefineResult) -> *const SesamLabelMap {
    result.as_ref().map_or(ptr::null(), |r| &r.sam)
}

/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sesam_refine_result_instance_count(result: *const SesamRefineResult) -> usize {
    result.as_ref().map_or(0, |r| r.instances)
}

/// Audit trail as JSON lines, borrowed from `result`.
///
/// # Safety
/// `result` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn sesam_refine_result_audit(result: *const SesamRefineResult) -> *const c_char {
    result.as_ref().map_or(ptr::null(), |r| r.audit_json.as_ptr())
}

/// # Safety
/// `result` must be a live handle or null; it and its borrows are invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn sesam_refine_result_free(result: *mut SesamRefineResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

// ---------------------------------------------------------------- metrics and cost

/// Compare `pred` with `gt` over all pixels.
///
/// # Safety
/// Handles must be live; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_evaluate(
    pred: *const SesamLabelMap,
    gt: *const SesamLabelMap,
    out: *mut SesamEvalSummary,
) -> SesamStatus {
    run(|| {
        let (pred, gt) = (deref(pred, "pred")?, deref(gt, "gt")?);
        let out = out_ptr(out, "out")?;
        let r = metrics::evaluate(&pred.0, &gt.0, None, &[]).map_err(|e| match e {
            metrics::MetricsError::Raster(r) => Failure::from(r),
            other => Failure::new(SesamStatus::InvalidArgument, other.to_string()),
        })?;
        *out = SesamEvalSummary {
            miou: r.miou,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
        };
        Ok(())
    })
}

/// Hours of annotator time for `n_images` images of one label kind.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_annotation_hours(
    kind: SesamAnnotationKind,
    n_images: u64,
    out: *mut f64,
) -> SesamStatus {
    run(|| {
        let out = out_ptr(out, "out")?;
        let kind = match kind {
            SesamAnnotationKind::Fine => AnnotationKind::Fine,
            SesamAnnotationKind::Coarse => AnnotationKind::Coarse,
            SesamAnnotationKind::Scribble => AnnotationKind::Scribble,
            SesamAnnotationKind::Point => AnnotationKind::Point,
        };
        *out = cost::annotation_hours(kind, n_images)
            .map_err(|e| Failure::new(SesamStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

// ---------------------------------------------------------------- RLE

/// Run-length encode a mask given as `width * height` bytes (non-zero = set).
/// The buffer is released with `sesam_bytes_free(*out, *out_len)`.
///
/// # Safety
/// `bits` must point to `width * height` bytes; `out`/`out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sesam_rle_encode(
    bits: *const u8,
    width: usize,
    height: usize,
    out: *mut *mut u8,
    out_len: *mut usize,
) -> SesamStatus {
    run(|| {
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Failure::new(SesamStatus::InvalidArgument, "mask too large"))?;
        let data = slice_arg(bits, n, "bits")?;
        let out = out_ptr(out, "out")?;
        let out_len = out_ptr(out_len, "out_len")?;
        let mask = BinaryMask::from_bits(width, height, data.iter().map(|&b| b != 0).collect())?;
        let bytes = rle_encode(&mask).into_boxed_slice();
        *out_len = bytes.len();
        *out = Box::into_raw(bytes).cast();
        Ok(())
    })
}

/// Decode into the caller's `width * height` byte buffer (1 = set).
///
/// # Safety
/// `bytes` must point to `len` bytes; `bits` to `width * height` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sesam_rle_decode(
    bytes: *const u8,
    len: usize,
    width: usize,
    height: usize,
    bits: *mut u8,
) -> SesamStatus {
    run(|| {
        let input = slice_arg(bytes, len, "bytes")?;
        let mask =
            rle_decode(input, width, height).map_err(|e| Failure::new(SesamStatus::InvalidArgument, e.to_string()))?;
        if width * height != 0 && bits.is_null() {
            return Err(Failure::new(SesamStatus::NullPointer, "bits is null"));
        }
        let dst = std::slice::from_raw_parts_mut(bits, mask.len());
        for (d, &b) in dst.iter_mut().zip(mask.bits()) {
            *d = b as u8;
        }
        Ok(())
    })
}
