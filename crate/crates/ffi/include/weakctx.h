/* weakctx C API: Gaussian-pointer weak measurements, weak values and noncontextual bounds. */

#ifndef WEAKCTX_H
#define WEAKCTX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum WcxStatus {
  /**
   * Success.
   */
  WCX_STATUS_OK = 0,
  /**
   * Invalid argument or scenario data.
   */
  WCX_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Numerical failure (quadrature budget, LP infeasibility).
   */
  WCX_STATUS_NUMERICAL_ERROR = 2,
  /**
   * A required pointer was null.
   */
  WCX_STATUS_NULL_POINTER = 3,
  /**
   * A panic was caught at the boundary; state is still consistent.
   */
  WCX_STATUS_PANIC = 4,
} WcxStatus;

/**
 * Report selector for [`wcx_report_json`].
 */
typedef enum WcxReportKind {
  WCX_REPORT_KIND_WEAK_VALUE = 0,
  WCX_REPORT_KIND_MEASURE = 1,
  WCX_REPORT_KIND_CHECK = 2,
  WCX_REPORT_KIND_XCHECK = 3,
} WcxReportKind;

/**
 * Opaque scenario handle.
 */
typedef struct WcxScenario WcxScenario;

/**
 * Closed forms of the negative-axis noise integrals.
 */
typedef struct WcxAbc {
  double a;
  double b;
  double c;
} WcxAbc;

/**
 * Disturbance summary of a scenario.
 */
typedef struct WcxMeasurement {
  /**
   * Gaussian overlap Delta = exp(-1/4 sigma^2).
   */
  double delta;
  /**
   * Probability of disturbance p_d = (1 - Delta)/2.
   */
  double p_d;
  /**
   * Squared pointer normalization (pi sigma^2)^(-1/2).
   */
  double normalization_sq;
  /**
   * Total post-selection pass probability <psi|S|psi>.
   */
  double pass_rate;
} WcxMeasurement;

/**
 * The negative-reading probability in its three flavours.
 */
typedef struct WcxPMinus {
  double exact;
  double conditional;
  double asymptotic;
  /**
   * Set when `exact` leaves [0, 1] through the p_phi normalization.
   */
  bool exact_outside_unit;
} WcxPMinus;

/**
 * Margins for the four noncontextuality-breaking conditions.
 */
typedef struct WcxConditionReport {
  double p_phi;
  double p_d;
  double p_minus;
  double threshold;
  double margins[4];
  bool all_hold;
} WcxConditionReport;

/**
 * Noncontextual LP bound summary.
 */
typedef struct WcxNcBound {
  double lp_optimum;
  double analytic_bound;
  double gap_to_quantum;
} WcxNcBound;

/**
 * A Monte Carlo estimate with standard error.
 */
typedef struct WcxEstimate {
  double value;
  double std_error;
  uint64_t n_effective;
} WcxEstimate;

/**
 * Monte Carlo estimates for one batch.
 */
typedef struct WcxSampleEstimates {
  struct WcxEstimate p_minus;
  struct WcxEstimate pass_rate;
} WcxSampleEstimates;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread, or null if none was recorded. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *wcx_last_error_message(void);

/**
 * Parses a scenario from the JSON schema used by the CLI.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum WcxStatus wcx_scenario_from_json(const char *json, struct WcxScenario **out);

/**
 * Builds a scenario from raw buffers: `psi` and `phi` hold `2*dim`
 * interleaved doubles, `pi` holds `2*dim*dim` row-major interleaved doubles.
 *
 * # Safety
 * The buffers must match the advertised lengths; `out` must be valid.
 */
enum WcxStatus wcx_scenario_new(size_t dim,
                                const double *psi,
                                const double *phi,
                                const double *pi,
                                double sigma,
                                struct WcxScenario **out);

/**
 * Clones a scenario with a different pointer width.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum WcxStatus wcx_scenario_with_sigma(const struct WcxScenario *scenario,
                                       double sigma,
                                       struct WcxScenario **out);

/**
 * Releases a scenario handle. Null is ignored.
 *
 * # Safety
 * `scenario` must have been returned by a constructor and not freed before.
 */
void wcx_scenario_free(struct WcxScenario *scenario);

/**
 * Hilbert-space dimension of the scenario.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum WcxStatus wcx_scenario_dim(const struct WcxScenario *scenario, size_t *out);

/**
 * Post-selection probability `p_phi`.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum WcxStatus wcx_scenario_p_phi(const struct WcxScenario *scenario, double *out);

/**
 * Weak value of the scenario observable (the measured projector when the
 * scenario carries no explicit observable).
 *
 * # Safety
 * `scenario` must be a live handle; `out_re`/`out_im` must be valid.
 */
enum WcxStatus wcx_weak_value(const struct WcxScenario *scenario, double *out_re, double *out_im);

/**
 * Weak value of the measured projector itself.
 *
 * # Safety
 * `scenario` must be a live handle; `out_re`/`out_im` must be valid.
 */
enum WcxStatus wcx_projector_weak_value(const struct WcxScenario *scenario,
                                        double *out_re,
                                        double *out_im);

/**
 * Closed forms of the A, B, C integrals at pointer width `sigma`.
 *
 * # Safety
 * `out` must be valid.
 */
enum WcxStatus wcx_abc(double sigma, struct WcxAbc *out);

/**
 * Disturbance summary (Delta, p_d, normalization, pass rate).
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum WcxStatus wcx_measurement(const struct WcxScenario *scenario, struct WcxMeasurement *out);

/**
 * Writes the disturbed effect `E_d` into `out` (`2*dim*dim` doubles,
 * row-major interleaved).
 *
 * # Safety
 * `scenario` must be a live handle; `out` must hold `2*dim*dim` doubles.
 */
enum WcxStatus wcx_disturbed_effect(const struct WcxScenario *scenario, double *out);

/**
 * Writes the averaged post-selection effect `S` into `out` (`2*dim*dim`
 * doubles, row-major interleaved).
 *
 * # Safety
 * `scenario` must be a live handle; `out` must hold `2*dim*dim` doubles.
 */
enum WcxStatus wcx_averaged_effect(const struct WcxScenario *scenario, double *out);

/**
 * Closed-form `p_-` in all three flavours.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum WcxStatus wcx_p_minus(const struct WcxScenario *scenario, struct WcxPMinus *out);

/**
 * `p_-` by adaptive quadrature of the defining integral.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum WcxStatus wcx_p_minus_quadrature(const struct WcxScenario *scenario, double *out);

/**
 * Margins for the four noncontextuality-breaking conditions.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum WcxStatus wcx_check_conditions(const struct WcxScenario *scenario,
                                    struct WcxConditionReport *out);

/**
 * Maximal noncontextual `p_-` via the LP with `n_bins` pointer bins.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum WcxStatus wcx_nc_bound(const struct WcxScenario *scenario,
                            size_t n_bins,
                            struct WcxNcBound *out);

/**
 * Draws `n` Monte Carlo events at `seed` and reports estimates.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum WcxStatus wcx_sample_estimates(const struct WcxScenario *scenario,
                                    uint64_t n,
                                    uint64_t seed,
                                    struct WcxSampleEstimates *out);

/**
 * Builds one of the CLI's JSON reports and returns it as an owned string.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid. The result must be
 * released with [`wcx_string_free`].
 */
enum WcxStatus wcx_report_json(const struct WcxScenario *scenario,
                               enum WcxReportKind kind,
                               char **out);

/**
 * Noncontextual-bound report (with certificate) as an owned JSON string.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid. Release the string
 * with [`wcx_string_free`].
 */
enum WcxStatus wcx_bound_json(const struct WcxScenario *scenario, size_t n_bins, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must have come from this library and not been freed before.
 */
void wcx_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEAKCTX_H */
