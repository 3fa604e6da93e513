#ifndef BASTA_H
#define BASTA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum BastaStatus {
  BASTA_STATUS_OK = 0,
  BASTA_STATUS_NULL_POINTER = 1,
  BASTA_STATUS_INVALID_UTF8 = 2,
  BASTA_STATUS_INVALID_CONFIG = 3,
  BASTA_STATUS_INVALID_ARGUMENT = 4,
  BASTA_STATUS_BUFFER_TOO_SMALL = 5,
  BASTA_STATUS_NO_ARRIVALS = 6,
  BASTA_STATUS_UNSTABLE = 7,
  BASTA_STATUS_PANIC = 8,
} BastaStatus;

/**
 * Which empirical distribution to copy out of a report.
 */
typedef enum BastaDistribution {
  /**
   * Slot edges.
   */
  BASTA_DISTRIBUTION_EDGE = 0,
  /**
   * Slot centers.
   */
  BASTA_DISTRIBUTION_CENTER = 1,
  /**
   * Just before every potential-arrival epoch.
   */
  BASTA_DISTRIBUTION_POTENTIAL_ARRIVAL = 2,
  /**
   * Just before every arrival event.
   */
  BASTA_DISTRIBUTION_PRE_ARRIVAL = 3,
} BastaDistribution;

/**
 * A validated model. Opaque.
 */
typedef struct BastaModel BastaModel;

/**
 * Merged simulation output. Opaque.
 */
typedef struct BastaReport BastaReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread, or an empty string. The
 * pointer stays valid until the next failing call on this thread.
 */
const char *basta_last_error_message(void);

/**
 * Parse a JSON experiment config (the CLI format) into a model.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BastaStatus basta_model_from_json(const char *json, struct BastaModel **out);

/**
 * # Safety
 * `model` must come from `basta_model_from_json` and not be freed twice.
 * Null is ignored.
 */
void basta_model_free(struct BastaModel *model);

/**
 * Whether the model's utilization is below one.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BastaStatus basta_model_is_stable(const struct BastaModel *model, bool *out);

/**
 * Run every replication of the model and merge them.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BastaStatus basta_simulate(const struct BastaModel *model, struct BastaReport **out);

/**
 * # Safety
 * `report` must come from `basta_simulate` and not be freed twice. Null
 * is ignored.
 */
void basta_report_free(struct BastaReport *report);

/**
 * Observed slots, summed over replications.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BastaStatus basta_report_total_slots(const struct BastaReport *report, uint64_t *out);

/**
 * Observed slots with at least one arrival.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BastaStatus basta_report_arrival_events(const struct BastaReport *report, uint64_t *out);

/**
 * Length of every distribution: tracked states plus the overflow bin.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BastaStatus basta_report_num_states(const struct BastaReport *report, size_t *out);

/**
 * Arrival-event frequency per observed slot.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BastaStatus basta_report_lambda_hat(const struct BastaReport *report, double *out);

/**
 * Copy one distribution into `buf[0..len]`. `written` receives the
 * number of states, also when the buffer is too small.
 *
 * # Safety
 * `buf` must hold `len` doubles; other pointers must be valid.
 */
enum BastaStatus basta_report_distribution(const struct BastaReport *report,
                                           enum BastaDistribution kind,
                                           double *buf,
                                           size_t len,
                                           size_t *written);

/**
 * Largest per-state residual of the sample-path identity.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BastaStatus basta_check_theorem31(const struct BastaReport *report,
                                       double *residual,
                                       bool *passed);

/**
 * TV distance between the pre-arrival and potential-arrival
 * distributions, and whether it is within `threshold`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum BastaStatus basta_check_basta(const struct BastaReport *report,
                                   double threshold,
                                   double *tv,
                                   bool *passed);

/**
 * Birth-death product form for the model's rule, states `0..written`,
 * plus the truncated tail mass. Needs Bernoulli arrivals and geometric or
 * hazard service.
 *
 * # Safety
 * `buf` must hold `len` doubles; other pointers must be valid.
 */
enum BastaStatus basta_analytic(const struct BastaModel *model,
                                double *buf,
                                size_t len,
                                size_t *written,
                                double *tail_mass);

/**
 * Total-variation distance; the shorter vector is padded with zeros.
 *
 * # Safety
 * `p` and `q` must hold `p_len` and `q_len` doubles.
 */
enum BastaStatus basta_tv_distance(const double *p,
                                   size_t p_len,
                                   const double *q,
                                   size_t q_len,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BASTA_H */
