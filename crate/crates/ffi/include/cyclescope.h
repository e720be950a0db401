#ifndef CYCLESCOPE_H
#define CYCLESCOPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_TOO_SHORT = 3,
  CS_STATUS_NON_FINITE = 4,
  CS_STATUS_NON_POSITIVE = 5,
  CS_STATUS_OUT_OF_RANGE = 6,
  CS_STATUS_INTERNAL = 7,
  CS_STATUS_PANIC = 8,
} CsStatus;

typedef struct CsReport CsReport;

typedef struct CsSeries CsSeries;

/**
 * One identified cycle.
 */
typedef struct CsCycle {
  double psi;
  double period_months;
  double period_years;
  /**
   * Peak-to-trough amplitude on the original scale.
   */
  double amplitude;
  /**
   * Fourier coefficient on the original scale.
   */
  double coeff_re;
  double coeff_im;
  /**
   * Flagged interval the estimate was refined in.
   */
  double interval_lo;
  double interval_hi;
} CsCycle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next call on the same thread.
 */
const char *cs_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cs_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void cs_string_free(char *s);

/**
 * Create a monthly series starting at `start_year`-`start_month`.
 *
 * # Safety
 * `values` must point to `len` doubles; `out` must be writable.
 */
enum CsStatus cs_series_new(int32_t start_year,
                            uint8_t start_month,
                            const double *values,
                            size_t len,
                            struct CsSeries **out);

/**
 * # Safety
 * `series` must be null or a handle from [`cs_series_new`], freed once.
 */
void cs_series_free(struct CsSeries *series);

/**
 * # Safety
 * `series` must be a live handle.
 */
enum CsStatus cs_series_len(const struct CsSeries *series, size_t *out);

/**
 * HP smoothing parameter whose gain is one half at `psi` rad/month.
 *
 * # Safety
 * `out` must be writable.
 */
enum CsStatus cs_lambda_from_cutoff(double psi, double *out);

/**
 * Inverse of [`cs_lambda_from_cutoff`].
 *
 * # Safety
 * `out` must be writable.
 */
enum CsStatus cs_cutoff_from_lambda(double lambda, double *out);

/**
 * Period in months of frequency `psi` rad/month.
 *
 * # Safety
 * `out` must be writable.
 */
enum CsStatus cs_period_months(double psi, double *out);

/**
 * `√n |r̂_n(ψ)|` of a raw value buffer.
 *
 * # Safety
 * `values` must point to `len` doubles; `out` must be writable.
 */
enum CsStatus cs_scan_statistic(const double *values, size_t len, double psi, double *out);

/**
 * HP decomposition of `len` values into caller buffers of the same length.
 *
 * # Safety
 * `values` must point to `len` doubles; `trend` and `cycle` to `len`
 * writable doubles.
 */
enum CsStatus cs_hp_decompose(const double *values,
                              size_t len,
                              double lambda,
                              double *trend,
                              double *cycle);

/**
 * Run the full pipeline. `config_json` is null for defaults or a JSON
 * object whose fields override them (e.g. `{"log_transform": false}`).
 *
 * # Safety
 * `series` must be a live handle; `config_json` null or NUL-terminated;
 * `out` writable.
 */
enum CsStatus cs_analyze(const struct CsSeries *series,
                         const char *config_json,
                         struct CsReport **out);

/**
 * # Safety
 * `report` must be null or a handle from [`cs_analyze`], freed once.
 */
void cs_report_free(struct CsReport *report);

/**
 * # Safety
 * `report` must be a live handle; `out` writable.
 */
enum CsStatus cs_report_block_length(const struct CsReport *report, size_t *out);

/**
 * # Safety
 * `report` must be a live handle; `out` writable.
 */
enum CsStatus cs_report_cycle_count(const struct CsReport *report, size_t *out);

/**
 * # Safety
 * `report` must be a live handle; `out` writable.
 */
enum CsStatus cs_report_cycle(const struct CsReport *report, size_t index, struct CsCycle *out);

/**
 * Full report as pretty JSON; release with [`cs_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` writable.
 */
enum CsStatus cs_report_json(const struct CsReport *report, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CYCLESCOPE_H */
