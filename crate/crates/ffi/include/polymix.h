#ifndef POLYMIX_H
#define POLYMIX_H

#include <stdint.h>
#include <stddef.h>

typedef enum {
  PM_STATUS_OK = 0,
  PM_STATUS_NULL_POINTER = 1,
  PM_STATUS_INVALID_ARGUMENT = 2,
  PM_STATUS_DOMAIN = 3,
  PM_STATUS_CAPACITY = 4,
  PM_STATUS_UNSUPPORTED = 5,
  PM_STATUS_PARSE = 6,
  // A Rust panic was caught at the boundary.
  PM_STATUS_INTERNAL = 7,
} PmStatus;

// Opaque chain handle.
typedef struct PmChain PmChain;

// Step thresholds from a corner start.
typedef struct {
  double upper;
  double upper_level;
  double lower;
  double lower_level;
  double rate;
  // NaN when there is no large-N form.
  double asymptotic;
} PmBound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *pm_version(void);

// Message of the last failed call on this thread. Valid until the next
// failing call on the same thread; empty if none.
const char *pm_last_error(void);

// Builds a chain from JSON such as
// `{"family":"moran","n":20,"m":"1/21","p":["1/5","1/5","1/5","1/5","1/5"]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a writable pointer. The
// handle written to `out` must be released with `pm_chain_free`.
PmStatus pm_chain_from_json(const char *json, PmChain **out);

// # Safety
// `chain` must be null or a handle from `pm_chain_from_json` not yet freed.
void pm_chain_free(PmChain *chain);

// Number of colors (or AR dimension) and population (0 for AR).
//
// # Safety
// `chain` must be a live handle; `dim` and `population` writable.
PmStatus pm_chain_shape(const PmChain *chain, uintptr_t *dim, uint64_t *population);

// Largest eigenvalue degree.
//
// # Safety
// `chain` must be a live handle; `out` writable.
PmStatus pm_max_degree(const PmChain *chain, uint64_t *out);

// Eigenvalue `beta_n` and its multiplicity (saturating at `UINT64_MAX`).
//
// # Safety
// `chain` must be a live handle; `beta` and `mult` writable.
PmStatus pm_eigenvalue(const PmChain *chain, uint64_t n, double *beta, uint64_t *mult);

// Chi-square distance after `l_i` steps for each of `count` step counts.
//
// # Safety
// `chain` must be a live handle, `start` must hold `start_len` counts,
// `steps` `count` entries, and `out` room for `count` doubles.
PmStatus pm_chisq(const PmChain *chain,
                  const uint64_t *start,
                  uintptr_t start_len,
                  const uint64_t *steps,
                  uintptr_t count,
                  double *out);

// First step with chi-square at most `eps`.
//
// # Safety
// As for `pm_chisq`; `out` writable.
PmStatus pm_steps_to_epsilon(const PmChain *chain,
                             const uint64_t *start,
                             uintptr_t start_len,
                             double eps,
                             uint64_t *out);

// Closed-form thresholds for the start `N e_{color+1}` (0-based `color`).
//
// # Safety
// `chain` must be a live handle; `out` writable.
PmStatus pm_mixing_bounds(const PmChain *chain, uintptr_t color, double c, PmBound *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYMIX_H */
