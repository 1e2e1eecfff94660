/*
 * Copyright 2026 The etc-isotropic Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the EtC block cipher toolkit.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns an etc_status; on
 * failure a description is available from etc_last_error() until the next
 * call on the same thread. Strings returned by the library stay valid for
 * the lifetime of the handle they were read from.
 */
#ifndef ETC_ETC_H_
#define ETC_ETC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ETC_BUILDING_LIBRARY)
#define ETC_API __attribute__((visibility("default")))
#else
#define ETC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum etc_status {
  ETC_OK = 0,
  ETC_ERR_DIMENSION = 1,
  ETC_ERR_SHAPE = 2,
  ETC_ERR_RANGE = 3,
  ETC_ERR_MODE = 4,
  ETC_ERR_USAGE = 5,
  ETC_ERR_IO = 6,
  ETC_ERR_FORMAT = 7,
  ETC_ERR_INTERNAL = 8
} etc_status;

typedef enum etc_key_mode {
  ETC_MODE_PER_BLOCK = 0,
  ETC_MODE_UNIFORM = 1
} etc_key_mode;

enum {
  ETC_STEP_SCRAMBLE = 1,
  ETC_STEP_DIHEDRAL = 2,
  ETC_STEP_NEGPOS = 4,
  ETC_STEP_COLORSHUFFLE = 8,
  ETC_STEP_ALL = 15
};

typedef struct etc_cipher_spec {
  uint32_t block_size;
  etc_key_mode mode;
  uint32_t steps; /* ETC_STEP_* bit set */
} etc_cipher_spec;

typedef struct etc_key etc_key;
typedef struct etc_image etc_image;
typedef struct etc_report etc_report;

ETC_API const char* etc_last_error(void);
ETC_API const char* etc_status_name(etc_status status);
ETC_API const char* etc_version(void);

/* Block 16, per-block keys, all steps. */
ETC_API etc_cipher_spec etc_cipher_spec_default(void);
/* "scramble,dihedral,negpos,colorshuffle" subsets, "all" or "none". */
ETC_API etc_status etc_parse_steps(const char* text, uint32_t* steps);
ETC_API etc_status etc_parse_mode(const char* text, etc_key_mode* mode);

/* ---- keys ---- */
ETC_API etc_status etc_key_from_seeds(const uint64_t seeds[4], etc_key** out);
ETC_API etc_status etc_key_generate(etc_key** out); /* OS entropy */
ETC_API etc_status etc_key_load(const char* path, etc_key** out);
ETC_API etc_status etc_key_save(const etc_key* key, const char* path, int force);
ETC_API void etc_key_seeds(const etc_key* key, uint64_t seeds[4]);
ETC_API void etc_key_free(etc_key* key);

/* ---- images (8-bit RGB, row-major, interleaved) ---- */
ETC_API etc_status etc_image_create(uint32_t width, uint32_t height,
                                    const uint8_t* pixels, etc_image** out);
ETC_API etc_status etc_image_load(const char* path, etc_image** out);
ETC_API etc_status etc_image_save_png(const etc_image* image, const char* path);
/* Largest centred crop with sides that are multiples of `multiple`. */
ETC_API etc_status etc_image_center_crop(const etc_image* image,
                                         uint32_t multiple, etc_image** out);
ETC_API uint32_t etc_image_width(const etc_image* image);
ETC_API uint32_t etc_image_height(const etc_image* image);
ETC_API const uint8_t* etc_image_pixels(const etc_image* image);
ETC_API void etc_image_free(etc_image* image);

/* ---- cipher ---- */
ETC_API etc_status etc_encrypt(const etc_image* plain, const etc_key* key,
                               const etc_cipher_spec* spec, etc_image** out);
/* No integrity check: a wrong key or spec yields deterministic garbage. */
ETC_API etc_status etc_decrypt(const etc_image* cipher, const etc_key* key,
                               const etc_cipher_spec* spec, etc_image** out);

/* ---- embedding equivalence ---- */
typedef struct etc_embed_check_result {
  double max_deviation; /* worst trial */
  double tolerance;
  uint32_t trials;
  int passed; /* max_deviation < tolerance */
} etc_embed_check_result;

/* Runs `trials` random (E, E_pos) instances drawn from `seed` against one
 * image and key with uniform block keys; ETC_ERR_MODE for per-block mode.
 * With dump_dir non-NULL the first trial's E, E_pos, E1, E2 and adapted
 * matrices are written there as plain-text matrix dumps. */
ETC_API etc_status etc_embed_check(const etc_image* image, const etc_key* key,
                                   const etc_cipher_spec* spec, uint32_t dim,
                                   uint32_t trials, uint64_t seed,
                                   const char* dump_dir,
                                   etc_embed_check_result* result);

/* ---- reports ---- */
ETC_API etc_status etc_report_compression(const char* corpus_dir,
                                          const etc_key* key,
                                          const etc_cipher_spec* spec,
                                          const int* qualities, size_t count,
                                          uint32_t center_crop, unsigned threads,
                                          etc_report** out);
ETC_API etc_status etc_report_leakage(const char* corpus_dir, const etc_key* key,
                                      const etc_cipher_spec* spec,
                                      uint32_t center_crop, unsigned threads,
                                      etc_report** out);

typedef struct etc_probe_config {
  const char* corpus_dir; /* class-per-directory corpus, or NULL */
  uint32_t synthetic;     /* synthetic shapes count when corpus_dir is NULL */
  uint32_t classes;       /* synthetic classes */
  uint32_t block_size;
  uint32_t dim;
  int32_t epochs;
  double learning_rate;
  uint32_t batch_size;
  uint64_t seed; /* dataset, params and batch order */
  uint32_t steps;
  uint32_t center_crop;
  unsigned threads;
} etc_probe_config;

ETC_API etc_probe_config etc_probe_config_default(void);
ETC_API etc_status etc_probe_run(const etc_probe_config* config,
                                 const etc_key* key, etc_report** out);

/* Human-readable table and line-delimited JSON records. */
ETC_API const char* etc_report_table(const etc_report* report);
ETC_API const char* etc_report_records(const etc_report* report);
/* Named scalar from the report, e.g. "ratio_jpeg_85", "ratio_png",
 * "ssim_mean", "ssim_median", "acc_plain", "acc_adapted", "acc_encrypted",
 * "chance", "feature_deviation", "predictions_identical". */
ETC_API etc_status etc_report_value(const etc_report* report, const char* name,
                                    double* value);
/* 1 when the report meets its contract (see README), else 0. */
ETC_API int etc_report_passed(const etc_report* report);
ETC_API void etc_report_free(etc_report* report);

#ifdef __cplusplus
}
#endif

#endif /* ETC_ETC_H_ */
