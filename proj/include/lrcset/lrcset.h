/* lrcset — image set classification by least-squares subspace reconstruction.
 *
 * C API over the core library. Objects are opaque handles created and
 * destroyed here; every fallible call returns an lrcset_status and leaves a
 * human-readable message in lrcset_last_error() (thread-local) on failure.
 */
#ifndef LRCSET_H
#define LRCSET_H

#include <stdint.h>

#if defined(_WIN32) || defined(_WIN64)
#define LRCSET_API __declspec(dllexport)
#else
#define LRCSET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lrcset_status {
  LRCSET_OK = 0,
  LRCSET_ERR_INVALID_ARGUMENT = 1,   /* null pointer / malformed argument */
  LRCSET_ERR_INVALID_INPUT = 2,      /* bad data shape or content */
  LRCSET_ERR_INVALID_CONFIG = 3,     /* bad configuration value */
  LRCSET_ERR_CONDITION_VIOLATION = 4,/* structural requirement broken (e.g. N > T) */
  LRCSET_ERR_SINGULAR = 5,           /* rank-deficient regressor where full rank is needed */
  LRCSET_ERR_UNSUPPORTED = 6,        /* operation not available (e.g. streaming knn) */
  LRCSET_ERR_INGEST = 7,             /* dataset directory problems */
  LRCSET_ERR_PROTOCOL = 8,           /* infeasible evaluation split */
  LRCSET_ERR_IO = 9,                 /* file read/write/decode failure */
  LRCSET_ERR_INTERNAL = 10
} lrcset_status;

typedef struct lrcset_gallery lrcset_gallery;
typedef struct lrcset_result lrcset_result;
typedef struct lrcset_stream lrcset_stream;

LRCSET_API const char* lrcset_version(void);
LRCSET_API const char* lrcset_status_name(lrcset_status status);

/* Message for the most recent failure on this thread; empty string if the
 * last call succeeded. The pointer stays valid until the next API call on
 * the same thread. */
LRCSET_API const char* lrcset_last_error(void);

/* ---- gallery ---- */

enum { LRCSET_REMEDY_PERTURB = 0, LRCSET_REMEDY_QR = 1 };

typedef struct lrcset_gallery_options {
  int rows, cols;        /* downsampled resolution */
  int equalize;          /* histogram equalization (0/1) */
  int standardize;       /* per-image standardization (0/1) */
  int gallery_images;    /* images sampled per class; 0 = use all */
  int remedy;            /* LRCSET_REMEDY_* */
  uint64_t seed;
} lrcset_gallery_options;

/* Builds a gallery from a corpus laid out as root/<class>/<set>/<images>,
 * pooling every set of a class before sampling. */
LRCSET_API lrcset_status lrcset_gallery_build(const char* data_root,
                                              const lrcset_gallery_options* options,
                                              lrcset_gallery** out);
LRCSET_API lrcset_status lrcset_gallery_save(const lrcset_gallery* gallery, const char* path);
LRCSET_API lrcset_status lrcset_gallery_load(const char* path, lrcset_gallery** out);
LRCSET_API void lrcset_gallery_free(lrcset_gallery* gallery);

LRCSET_API int lrcset_gallery_class_count(const lrcset_gallery* gallery);
/* Returns NULL on a bad index. The pointer is owned by the gallery. */
LRCSET_API const char* lrcset_gallery_label(const lrcset_gallery* gallery, int class_index);
LRCSET_API lrcset_status lrcset_gallery_dims(const lrcset_gallery* gallery, int* rows, int* cols);

/* ---- classification ---- */

enum { LRCSET_VOTE_EXPONENTIAL = 0, LRCSET_VOTE_MAJORITY = 1, LRCSET_VOTE_KNN = 2 };

typedef struct lrcset_vote_options {
  int strategy;  /* LRCSET_VOTE_* */
  double alpha;  /* exponential decay rate */
  int k;         /* neighbour count for knn, odd */
} lrcset_vote_options;

/* Classifies every image file in a directory as one test set. */
LRCSET_API lrcset_status lrcset_classify_dir(const lrcset_gallery* gallery, const char* set_dir,
                                             const lrcset_vote_options* vote,
                                             lrcset_result** out);

LRCSET_API int lrcset_result_predicted(const lrcset_result* result);
/* Owned by the result. */
LRCSET_API const char* lrcset_result_predicted_label(const lrcset_result* result);
LRCSET_API int lrcset_result_tie(const lrcset_result* result);
LRCSET_API int lrcset_result_class_count(const lrcset_result* result);
LRCSET_API int lrcset_result_image_count(const lrcset_result* result);
/* NaN on a bad index. */
LRCSET_API double lrcset_result_theta(const lrcset_result* result, int class_index);
LRCSET_API double lrcset_result_distance(const lrcset_result* result, int class_index,
                                         int image_index);
/* Structured record: set_id, predicted_label, tie, per-class scores, and the
 * full distance matrix when include_distances is nonzero. Free the string
 * with lrcset_string_free. */
LRCSET_API lrcset_status lrcset_result_json(const lrcset_result* result, int include_distances,
                                            char** json_out);
LRCSET_API void lrcset_result_free(lrcset_result* result);

/* ---- streaming (one image at a time) ---- */

/* The gallery must outlive the stream. knn voting is rejected. */
LRCSET_API lrcset_status lrcset_stream_new(const lrcset_gallery* gallery,
                                           const lrcset_vote_options* vote, lrcset_stream** out);
/* Folds one image into the running scores and returns the decision so far. */
LRCSET_API lrcset_status lrcset_stream_push(lrcset_stream* stream, const char* image_path,
                                            lrcset_result** current);
LRCSET_API void lrcset_stream_free(lrcset_stream* stream);

/* ---- synthetic corpus ---- */

typedef struct lrcset_synth_options {
  int classes, sets_per_class, images_per_set;
  int rows, cols;
  int rank;       /* class subspace dimension */
  double sigma;   /* additive Gaussian noise level */
  uint64_t seed;
} lrcset_synth_options;

LRCSET_API lrcset_status lrcset_synth_generate(const lrcset_synth_options* options,
                                               const char* out_dir);

/* ---- evaluation protocol ---- */

/* config_json example:
 *   {"preset": "eth80", "mode": "fast", "repeats": 10, "seed": 42}
 * Custom runs set "preset": "custom" plus "dims", "alpha", etc. The returned
 * report is a JSON document; free it with lrcset_string_free. */
LRCSET_API lrcset_status lrcset_benchmark_run(const char* data_root, const char* config_json,
                                              char** report_json);
/* CSV projection of a JSON report (one row per repeat x test set). */
LRCSET_API lrcset_status lrcset_report_to_csv(const char* report_json, char** csv_out);
LRCSET_API void lrcset_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* LRCSET_H */
