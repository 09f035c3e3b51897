#ifndef SESAM_H
#define SESAM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum {
  SESAM_STATUS_OK = 0,
  SESAM_STATUS_NULL_POINTER = 1,
  SESAM_STATUS_INVALID_ARGUMENT = 2,
  SESAM_STATUS_DIMENSION_MISMATCH = 3,
  SESAM_STATUS_IO = 4,
  SESAM_STATUS_ORACLE = 5,
  SESAM_STATUS_CONFIG = 6,
  SESAM_STATUS_PANIC = 7,
} SesamStatus;

typedef enum {
  SESAM_WEAK_KIND_COARSE = 0,
  SESAM_WEAK_KIND_SCRIBBLE = 1,
  SESAM_WEAK_KIND_POINT = 2,
} SesamWeakKind;

typedef enum {
  SESAM_ANNOTATION_KIND_FINE = 0,
  SESAM_ANNOTATION_KIND_COARSE = 1,
  SESAM_ANNOTATION_KIND_SCRIBBLE = 2,
  SESAM_ANNOTATION_KIND_POINT = 3,
} SesamAnnotationKind;

// Refinement settings.
typedef struct SesamConfig SesamConfig;

// A dense label map; 65535 marks unlabeled pixels.
typedef struct SesamLabelMap SesamLabelMap;

// A mask oracle backend.
typedef struct SesamOracle SesamOracle;

// Output of one refinement run.
typedef struct SesamRefineResult SesamRefineResult;

// Headline numbers of an evaluation.
typedef struct {
  double miou;
  double precision;
  double recall;
  double f1;
} SesamEvalSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failed call on this thread, or null if none
// has failed. Valid until another call fails on the same thread.
const char *sesam_last_error(void);

// Library version, a static string.
const char *sesam_version(void);

// # Safety
// `s` must come from this library or be null.
void sesam_string_free(char *s);

// # Safety
// `data`/`len` must be a buffer returned by this library, or null.
void sesam_bytes_free(uint8_t *data, size_t len);

// New map with every pixel unlabeled.
//
// # Safety
// `out` must be a valid pointer.
SesamStatus sesam_label_map_new(size_t width,
                                size_t height,
                                uint32_t class_count,
                                SesamLabelMap **out);

// Copy `width * height` row-major labels into a new map.
//
// # Safety
// `labels` must point to `len` values; `out` must be valid.
SesamStatus sesam_label_map_from_raw(size_t width,
                                     size_t height,
                                     uint32_t class_count,
                                     const uint16_t *labels,
                                     size_t len,
                                     SesamLabelMap **out);

// # Safety
// `path` must be a nul-terminated string; `out` must be valid.
SesamStatus sesam_label_map_read(const char *path, SesamLabelMap **out);

// # Safety
// `map` must be a live handle; `path` a nul-terminated string.
SesamStatus sesam_label_map_write(const SesamLabelMap *map, const char *path);

// # Safety
// `map` must be a live handle or null.
size_t sesam_label_map_width(const SesamLabelMap *map);

// # Safety
// `map` must be a live handle or null.
size_t sesam_label_map_height(const SesamLabelMap *map);

// # Safety
// `map` must be a live handle or null.
uint32_t sesam_label_map_class_count(const SesamLabelMap *map);

// Borrowed pointer to the `width * height` labels; valid while `map` lives.
//
// # Safety
// `map` must be a live handle or null.
const uint16_t *sesam_label_map_data(const SesamLabelMap *map);

// # Safety
// `map` must come from this library or be null; it is invalid afterwards.
void sesam_label_map_free(SesamLabelMap *map);

// Default settings. Never fails.
SesamConfig *sesam_config_default(void);

// Parse and validate a JSON config; missing keys take defaults.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be valid.
SesamStatus sesam_config_from_json(const char *json, SesamConfig **out);

// Serialized settings; release with `sesam_string_free`.
//
// # Safety
// `config` must be a live handle; `out` must be valid.
SesamStatus sesam_config_to_json(const SesamConfig *config, char **out);

// # Safety
// `config` must be a live handle.
SesamStatus sesam_config_set_seed(SesamConfig *config, uint64_t seed);

// # Safety
// `config` must be a live handle or null; it is invalid afterwards.
void sesam_config_free(SesamConfig *config);

// Mock oracle over scenes given as JSON documents.
//
// # Safety
// `scenes` must point to `count` nul-terminated strings; `out` must be valid.
SesamStatus sesam_oracle_mock_new(const char *const *scenes, size_t count, SesamOracle **out);

// Oracle backed by an external command speaking the line protocol.
//
// # Safety
// `command` must be a nul-terminated string; `out` must be valid.
SesamStatus sesam_oracle_process_new(const char *command, SesamOracle **out);

// Oracle answering from a recorded responses file.
//
// # Safety
// `path` must be a nul-terminated string; `out` must be valid.
SesamStatus sesam_oracle_replay_open(const char *path, SesamOracle **out);

// # Safety
// `oracle` must be a live handle or null; it is invalid afterwards.
void sesam_oracle_free(SesamOracle *oracle);

// Refine `weak` labels for image `image_ref`. Point and scribble labels are
// grown into coarse regions first.
//
// # Safety
// All handles must be live; `image_ref` nul-terminated; `out` valid.
SesamStatus sesam_refine(const SesamLabelMap *weak,
                         SesamWeakKind kind,
                         const char *image_ref,
                         const SesamOracle *oracle,
                         const SesamConfig *config,
                         SesamRefineResult **out);

// Refined labels, borrowed from `result`.
//
// # Safety
// `result` must be a live handle or null.
const SesamLabelMap *sesam_refine_result_labels(const SesamRefineResult *result);

// Oracle-derived labels alone, borrowed from `result`.
//
// # Safety
// `result` must be a live handle or null.
const SesamLabelMap *sesam_refine_result_sam(const SesamRefineResult *result);

// # Safety
// `result` must be a live handle or null.
size_t sesam_refine_result_instance_count(const SesamRefineResult *result);

// Audit trail as JSON lines, borrowed from `result`.
//
// # Safety
// `result` must be a live handle or null.
const char *sesam_refine_result_audit(const SesamRefineResult *result);

// # Safety
// `result` must be a live handle or null; it and its borrows are invalid afterwards.
void sesam_refine_result_free(SesamRefineResult *result);

// Compare `pred` with `gt` over all pixels.
//
// # Safety
// Handles must be live; `out` must be valid.
SesamStatus sesam_evaluate(const SesamLabelMap *pred,
                           const SesamLabelMap *gt,
                           SesamEvalSummary *out);

// Hours of annotator time for `n_images` images of one label kind.
//
// # Safety
// `out` must be valid.
SesamStatus sesam_annotation_hours(SesamAnnotationKind kind, uint64_t n_images, double *out);

// Run-length encode a mask given as `width * height` bytes (non-zero = set).
// The buffer is released with `sesam_bytes_free(*out, *out_len)`.
//
// # Safety
// `bits` must point to `width * height` bytes; `out`/`out_len` must be valid.
SesamStatus sesam_rle_encode(const uint8_t *bits,
                             size_t width,
                             size_t height,
                             uint8_t **out,
                             size_t *out_len);

// Decode into the caller's `width * height` byte buffer (1 = set).
//
// # Safety
// `bytes` must point to `len` bytes; `bits` to `width * height` writable bytes.
SesamStatus sesam_rle_decode(const uint8_t *bytes,
                             size_t len,
                             size_t width,
                             size_t height,
                             uint8_t *bits);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SESAM_H */
