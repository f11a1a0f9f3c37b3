#ifndef BIASK_BIASK_H
#define BIASK_BIASK_H

/* C interface to the bias-aware sketching library.
 *
 * Every function returns a biask_status. On failure the thread-local message
 * from biask_last_error() describes the problem; outputs are left untouched.
 * Handles are opaque and owned by the caller until passed to the matching
 * *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BIASK_BUILDING_LIBRARY)
#    define BIASK_API __declspec(dllexport)
#  else
#    define BIASK_API __declspec(dllimport)
#  endif
#else
#  define BIASK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum biask_status {
  BIASK_OK = 0,
  BIASK_ERR_CONFIG = 2,
  BIASK_ERR_FORMAT = 3,
  BIASK_ERR_INDEX = 4,
  BIASK_ERR_INCOMPATIBLE = 5,
  BIASK_ERR_ARGUMENT = 6,
  BIASK_ERR_DEGENERATE = 7,
  BIASK_ERR_INSUFFICIENT_BUCKETS = 8,
  BIASK_ERR_IO = 9,
  BIASK_ERR_INTERNAL = 10
} biask_status;

typedef enum biask_algorithm {
  BIASK_ALGO_L1SR = 0,
  BIASK_ALGO_L2SR = 1,
  BIASK_ALGO_CM = 2,
  BIASK_ALGO_CS = 3,
  BIASK_ALGO_CMIN = 4,
  BIASK_ALGO_L1MEAN = 5,
  BIASK_ALGO_L2MEAN = 6,
  BIASK_ALGO_DYADIC = 7
} biask_algorithm;

/* File kinds, as stored in the sketch header. */
typedef enum biask_kind {
  BIASK_KIND_CM = 0,
  BIASK_KIND_CS = 1,
  BIASK_KIND_L1 = 2,
  BIASK_KIND_L2 = 3,
  BIASK_KIND_DYADIC = 4
} biask_kind;

typedef enum biask_estimator {
  BIASK_EST_DEFAULT = 0, /* bias-aware, mean-bias or the kind's natural plain estimator */
  BIASK_EST_COUNT_MEDIAN = 1,
  BIASK_EST_COUNT_SKETCH = 2,
  BIASK_EST_COUNT_MIN = 3
} biask_estimator;

typedef struct biask_config {
  uint32_t k;           /* sparsity target */
  uint32_t s;           /* buckets per row; 0 means ceil(c_s * k) */
  uint32_t d;           /* rows; 0 means the algorithm's default depth */
  double c_s;           /* bucket multiplier */
  uint64_t master_seed; /* all hash functions derive from this */
} biask_config;

typedef struct biask_sketch_info {
  biask_kind kind;
  uint64_t n;
  uint32_t k;
  uint32_t s;
  uint32_t d;
  double c_s;
  uint64_t master_seed;
  uint64_t words;    /* serialized size in 8-byte words */
  int has_total;     /* running sum stored (mean-bias baselines) */
} biask_sketch_info;

typedef struct biask_sketch biask_sketch;
typedef struct biask_stream biask_stream;

/* Return nonzero to stop the enumeration early. */
typedef int (*biask_entry_fn)(uint64_t index, double estimate, void* user);
typedef int (*biask_pair_fn)(uint64_t u, uint64_t v, double estimate, void* user);

BIASK_API const char* biask_version(void);
BIASK_API const char* biask_last_error(void);
BIASK_API const char* biask_status_name(biask_status status);
BIASK_API const char* biask_algorithm_name(biask_algorithm algorithm);
BIASK_API biask_status biask_parse_algorithm(const char* name, biask_algorithm* out);

/* k = 100, s = 0, d = 0, c_s = 4, master_seed = 1. */
BIASK_API void biask_config_default(biask_config* cfg);

/* ---- sketches ---------------------------------------------------------- */

BIASK_API biask_status biask_sketch_new(biask_algorithm algorithm, uint64_t n,
                                        const biask_config* cfg, biask_sketch** out);
BIASK_API biask_status biask_sketch_build(biask_algorithm algorithm, const double* x,
                                          uint64_t n, const biask_config* cfg,
                                          biask_sketch** out);
BIASK_API biask_status biask_sketch_clone(const biask_sketch* sk, biask_sketch** out);
BIASK_API void biask_sketch_free(biask_sketch* sk);

BIASK_API biask_status biask_sketch_update(biask_sketch* sk, uint64_t j, double delta);
/* dst += alpha * src */
BIASK_API biask_status biask_sketch_add_scaled(biask_sketch* dst, const biask_sketch* src,
                                               double alpha);
BIASK_API biask_status biask_sketch_merge(biask_sketch* dst, const biask_sketch* src);

BIASK_API biask_status biask_sketch_info_get(const biask_sketch* sk, biask_sketch_info* out);
BIASK_API biask_status biask_sketch_point(const biask_sketch* sk, biask_estimator est,
                                          uint64_t j, double* out);
/* out must hold n values. */
BIASK_API biask_status biask_sketch_recover(const biask_sketch* sk, biask_estimator est,
                                            double* out, uint64_t n);
/* Bias estimate of an l1/l2 sketch, or sum / n for a mean-bias sketch. */
BIASK_API biask_status biask_sketch_bias(const biask_sketch* sk, double* out);
/* Dyadic sketches only. `visited` may be NULL. */
BIASK_API biask_status biask_sketch_heavy(const biask_sketch* sk, double theta,
                                          biask_entry_fn fn, void* user, uint64_t* visited);

/* With buf == NULL only *len is set. */
BIASK_API biask_status biask_sketch_serialize(const biask_sketch* sk, uint8_t* buf,
                                              size_t cap, size_t* len);
BIASK_API biask_status biask_sketch_deserialize(const uint8_t* buf, size_t len,
                                                biask_sketch** out);
BIASK_API biask_status biask_sketch_save(const biask_sketch* sk, const char* path);
BIASK_API biask_status biask_sketch_load(const char* path, biask_sketch** out);

/* ---- streaming point queries (p = 1 or 2) ------------------------------ */

BIASK_API biask_status biask_stream_new(int p, uint64_t n, const biask_config* cfg,
                                        biask_stream** out);
BIASK_API void biask_stream_free(biask_stream* st);
BIASK_API biask_status biask_stream_update(biask_stream* st, uint64_t i, double delta);
BIASK_API biask_status biask_stream_point(const biask_stream* st, uint64_t i, double* out);
BIASK_API biask_status biask_stream_bias(const biask_stream* st, double* out);

/* ---- data and exact references ---------------------------------------- */

/* N(b, sigma^2) entries, `shift` added at m_shift positions. out holds n. */
BIASK_API biask_status biask_gen_gaussian(uint64_t n, double b, double sigma,
                                          uint64_t m_shift, double shift, uint64_t seed,
                                          double* out);
BIASK_API biask_status biask_metrics(const double* x, const double* x_hat, uint64_t n,
                                     double* avg_error, double* max_error);
BIASK_API biask_status biask_tail_error(const double* x, uint64_t n, uint64_t k, int p,
                                        double* out);
BIASK_API biask_status biask_best_bias(const double* x, uint64_t n, uint64_t k, int p,
                                       double* beta, double* err);

/* Whitespace-separated reals. Release *out with biask_vector_free. */
BIASK_API biask_status biask_read_vector(const char* path, double** out, uint64_t* n);
BIASK_API void biask_vector_free(double* v);

/* kappa vectors summing to x; out holds kappa * n values, site-major. */
BIASK_API biask_status biask_additive_shares(const double* x, uint64_t n, uint32_t kappa,
                                             uint64_t seed, double* out);

/* ---- coordinator model ------------------------------------------------- */

/* Per-site words; arrays hold kappa entries. Any pointer may be NULL. */
typedef struct biask_comm {
  uint32_t rounds;
  uint64_t* up;
  uint64_t* down;
} biask_comm;

/* xs: kappa pointers to local vectors of length n. indices holds k entries,
 * largest deviation first. */
BIASK_API biask_status biask_outliers(const double* const* xs, uint32_t kappa, uint64_t n,
                                      uint64_t k, int p, const biask_config* cfg,
                                      uint64_t* indices, double* median, biask_comm* comm);

/* a: n x N row-major; boundaries: kappa + 1 column offsets from 0 to N.
 * per_site (kappa entries) may be NULL. */
BIASK_API biask_status biask_simjoin(const double* a, uint64_t n, uint64_t N,
                                     const uint64_t* boundaries, uint32_t kappa, double theta,
                                     int p, const biask_config* cfg, biask_pair_fn fn,
                                     void* user, uint64_t* per_site, biask_comm* comm);

/* ---- sweeps ------------------------------------------------------------ */

typedef struct biask_sweep_config {
  const biask_algorithm* algorithms;
  uint32_t n_algorithms;
  uint64_t n;
  uint32_t k;
  double c_s;
  uint32_t d; /* 0: per-algorithm default */
  uint64_t master_seed;
  uint32_t repeats;
  double b;
  double sigma;
  uint64_t m_shift;
  double shift;
  const uint32_t* s_values; /* may be NULL */
  uint32_t n_s_values;
  const uint32_t* d_values; /* may be NULL */
  uint32_t n_d_values;
  int timings;
} biask_sweep_config;

/* Writes the CSV to `path`, or to stdout when path is "-". */
BIASK_API biask_status biask_sweep(const biask_sweep_config* cfg, const char* path,
                                   uint64_t* rows);

#ifdef __cplusplus
}
#endif

#endif /* BIASK_BIASK_H */
