// Copyright 2026 The gndc Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the neural data cube library. */
#ifndef GNDC_H
#define GNDC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GNDC_API __declspec(dllexport)
#else
#define GNDC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gndc_status {
  GNDC_OK = 0,
  GNDC_INVALID_ARGUMENT = 1,
  GNDC_MISSING_FILE = 2,
  GNDC_SHAPE_MISMATCH = 3,
  GNDC_NON_MONOTONIC_TIMESTAMPS = 4,
  GNDC_ALL_INVALID_MASK = 5,
  GNDC_IO_FAILURE = 6,
  GNDC_NON_FINITE_LOSS = 7,
  GNDC_EMPTY_BATCH = 8,
  GNDC_INDEX_OUT_OF_RANGE = 9,
  GNDC_CORRUPT_STREAM = 10,
  GNDC_INCONSISTENT_PARTS = 11,
  GNDC_BAD_MAGIC = 12,
  GNDC_UNSUPPORTED_VERSION = 13,
  GNDC_SECTION_OVERLAP = 14,
  GNDC_CRC_MISMATCH = 15,
  GNDC_TRUNCATED_FILE = 16,
  GNDC_MALFORMED_FILE = 17,
  GNDC_MODEL_NOT_LOADED = 18,
  GNDC_WINDOW_OUT_OF_BOUNDS = 19,
  GNDC_ZERO_VARIANCE = 20,
  GNDC_LENGTH_MISMATCH = 21,
  GNDC_FRAME_TOO_SMALL = 22,
  GNDC_NO_VALID_FRAMES = 23,
  GNDC_INTERNAL = 99
} gndc_status;

typedef enum gndc_provenance {
  GNDC_OBSERVED = 0,
  GNDC_RECONSTRUCTED = 1
} gndc_provenance;

typedef struct gndc_bundle gndc_bundle;
typedef struct gndc_model gndc_model;

typedef struct gndc_shape {
  size_t height;
  size_t width;
  size_t frames;
  size_t channels;
} gndc_shape;

/* Strings and buffers returned through out-parameters are released with gndc_free. */
GNDC_API void gndc_free(void* p);
GNDC_API const char* gndc_version(void);
GNDC_API const char* gndc_status_string(gndc_status s);
/* Message of the last failure on the calling thread; empty after success. */
GNDC_API const char* gndc_last_error(void);

/* Times are seconds since the Unix epoch; strings are ISO-8601. */
GNDC_API gndc_status gndc_time_parse(const char* text, double* seconds);
GNDC_API gndc_status gndc_time_format(double seconds, char** text);

/* Bundles: dense H x W x T x C float32 cube plus validity mask. */
GNDC_API gndc_status gndc_bundle_load(const char* dir, gndc_bundle** out);
/* kind: "sinusoid", "seasonal", "textured". */
GNDC_API gndc_status gndc_bundle_synthetic(const char* kind, gndc_shape shape, uint64_t seed, gndc_bundle** out);
GNDC_API gndc_status gndc_bundle_save(const gndc_bundle* b, const char* dir);
GNDC_API gndc_status gndc_bundle_shape(const gndc_bundle* b, gndc_shape* shape);
/* Masks about coverage of frame t with random discs. */
GNDC_API gndc_status gndc_bundle_add_clouds(gndc_bundle* b, size_t t, double coverage, double radius_px,
                                            uint64_t seed);
GNDC_API void gndc_bundle_free(gndc_bundle* b);

/* config_json may be NULL for defaults. report_json may be NULL. */
GNDC_API gndc_status gndc_encode(const gndc_bundle* b, const char* config_json, const char* out_path,
                                 char** report_json);

GNDC_API gndc_status gndc_model_open(const char* path, gndc_model** out);
GNDC_API void gndc_model_close(gndc_model* m);
GNDC_API gndc_status gndc_model_shape(const gndc_model* m, gndc_shape* shape);
GNDC_API gndc_status gndc_model_meta_json(const gndc_model* m, char** out);
/* Header summary without decoding the payload. as_json selects JSON or text. */
GNDC_API gndc_status gndc_inspect(const char* path, int as_json, char** out);

/* values and flags hold `channels` entries; time_out may be NULL. */
GNDC_API gndc_status gndc_query_point(const gndc_model* m, double x, double y, double seconds, double* values,
                                      uint8_t* flags, size_t channels, double* time_out);
/* Half-open window [i0, i1) x [j0, j1); buffers hold rows*cols*channels entries. */
GNDC_API gndc_status gndc_query_region(const gndc_model* m, size_t i0, size_t i1, size_t j0, size_t j1,
                                       double seconds, double* values, uint8_t* flags, size_t capacity);

GNDC_API gndc_status gndc_query_point_json(const gndc_model* m, double x, double y, double seconds, char** out);
GNDC_API gndc_status gndc_query_region_json(const gndc_model* m, size_t i0, size_t i1, size_t j0, size_t j1,
                                            double seconds, char** out);
/* n == 0 returns the native timestamps; otherwise n evenly spaced instants. */
GNDC_API gndc_status gndc_query_timeseries_json(const gndc_model* m, double x, double y, size_t n, char** out);
GNDC_API gndc_status gndc_query_derivative_json(const gndc_model* m, size_t i0, size_t i1, size_t j0, size_t j1,
                                                double seconds, char** out);

typedef struct gndc_render_options {
  size_t downsample;
  size_t bands[3];
  size_t band_count;    /* 1 or 3 */
  const char* colormap; /* "viridis", "gray"; NULL means viridis */
  double vmin;          /* NaN or vmin >= vmax means the stored band range */
  double vmax;
} gndc_render_options;

GNDC_API gndc_render_options gndc_render_defaults(void);
GNDC_API gndc_status gndc_render_pixels(const gndc_model* m, size_t downsample, size_t* pixels);
GNDC_API gndc_status gndc_render_png(const gndc_model* m, double seconds, const gndc_render_options* opt,
                                     uint8_t** png, size_t* length);

/* Model fidelity against a reference bundle on the same grid. */
GNDC_API gndc_status gndc_eval(const gndc_model* m, const gndc_bundle* reference, int as_json, char** out);
/* Gap masking experiment on a bundle; config_json may be NULL. */
GNDC_API gndc_status gndc_mask_restore(const gndc_bundle* b, const char* config_json, int as_json, char** out);
/* Latency comparison against a frame-per-file baseline written under scratch_dir. */
GNDC_API gndc_status gndc_bench(const char* model_path, const gndc_bundle* source, const char* scratch_dir,
                                size_t runs, size_t region_size, int as_json, char** out);

#ifdef __cplusplus
}
#endif

#endif
