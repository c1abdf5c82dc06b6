#ifndef SWAPTEST_H
#define SWAPTEST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SwaptestBranch {
  SWAPTEST_BRANCH_ANTISYMMETRIC = 0,
  SWAPTEST_BRANCH_SYMMETRIC = 1,
} SwaptestBranch;

typedef enum SwaptestGate {
  SWAPTEST_GATE_CONTROLLED_SWAP = 0,
  SWAPTEST_GATE_CONTROLLED_BEAM_SPLITTER = 1,
} SwaptestGate;

typedef enum SwaptestStatus {
  SWAPTEST_STATUS_OK = 0,
  SWAPTEST_STATUS_NULL_POINTER = 1,
  SWAPTEST_STATUS_INVALID_ARGUMENT = 2,
  SWAPTEST_STATUS_CONFIG = 3,
  SWAPTEST_STATUS_TRUNCATION = 4,
  SWAPTEST_STATUS_NULL_OUTCOME = 5,
  SWAPTEST_STATUS_UNDEFINED = 6,
  SWAPTEST_STATUS_INTEGRATOR = 7,
  SWAPTEST_STATUS_IO = 8,
  SWAPTEST_STATUS_OUT_OF_RANGE = 9,
  SWAPTEST_STATUS_PANIC = 10,
} SwaptestStatus;

/*
 Input states, gate and postselected branch.
 */
typedef struct SwaptestPlan SwaptestPlan;

/*
 Tables produced by a config run.
 */
typedef struct SwaptestResult SwaptestResult;

/*
 Gate-level simulator bound to one plan.
 */
typedef struct SwaptestRunner SwaptestRunner;

/*
 Result of a least-squares fringe fit.
 */
typedef struct SwaptestFringe {
  double visibility;
  double offset;
  double phase;
  double period;
  double residual;
} SwaptestFringe;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty if none. The pointer
 stays valid until the next failing call on the same thread.
 */
const char *swaptest_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *swaptest_version(void);

/*
 NOON-type plan `|n⟩|m⟩` with a controlled swap and the antisymmetric branch.

 # Safety
 `out_plan` must be valid for one write.
 */
enum SwaptestStatus swaptest_plan_noon(size_t n, size_t m, struct SwaptestPlan **out_plan);

/*
 Coherent plan `|α₁⟩|α₂⟩`.

 # Safety
 `out_plan` must be valid for one write.
 */
enum SwaptestStatus swaptest_plan_coherent(double alpha1_re,
                                           double alpha1_im,
                                           double alpha2_re,
                                           double alpha2_im,
                                           struct SwaptestPlan **out_plan);

/*
 # Safety
 `plan` must come from a `swaptest_plan_*` constructor.
 */
enum SwaptestStatus swaptest_plan_set_gate(struct SwaptestPlan *plan, enum SwaptestGate gate);

/*
 # Safety
 `plan` must come from a `swaptest_plan_*` constructor.
 */
enum SwaptestStatus swaptest_plan_set_branch(struct SwaptestPlan *plan, enum SwaptestBranch branch);

/*
 # Safety
 `plan` must be null or a handle not yet freed.
 */
void swaptest_plan_free(struct SwaptestPlan *plan);

/*
 Closed-form overlap witness `Δ(φ)` with phase-flip probabilities `p1`, `p2`.

 # Safety
 `plan` must be a live handle and `out_delta` valid for one write.
 */
enum SwaptestStatus swaptest_witness(const struct SwaptestPlan *plan,
                                     double p1,
                                     double p2,
                                     double phi,
                                     double *out_delta);

/*
 Classical Fisher information of the second swap test.

 # Safety
 `plan` must be a live handle and `out_cfi` valid for one write.
 */
enum SwaptestStatus swaptest_cfi(const struct SwaptestPlan *plan,
                                 double p1,
                                 double p2,
                                 double phi,
                                 double *out_cfi);

/*
 Quantum Fisher information of the state prepared by the first swap test.

 # Safety
 `plan` must be a live handle and `out_qfi` valid for one write.
 */
enum SwaptestStatus swaptest_qfi(const struct SwaptestPlan *plan, double *out_qfi);

/*
 Gate-level simulator for `plan` with the default truncation.

 # Safety
 `plan` must be a live handle and `out_runner` valid for one write.
 */
enum SwaptestStatus swaptest_runner_new(const struct SwaptestPlan *plan,
                                        struct SwaptestRunner **out_runner);

/*
 Probability mass of the input lost to truncation.

 # Safety
 `runner` must be a live handle and `out_leakage` valid for one write.
 */
enum SwaptestStatus swaptest_runner_leakage(const struct SwaptestRunner *runner,
                                            double *out_leakage);

/*
 Second-test outcome probabilities for `len` phases. `p_plus` and `p_minus`
 must each hold `len` values.

 # Safety
 All arrays must be valid for `len` elements.
 */
enum SwaptestStatus swaptest_runner_sweep(const struct SwaptestRunner *runner,
                                          const double *phis,
                                          size_t len,
                                          double p1,
                                          double p2,
                                          double *p_plus,
                                          double *p_minus);

/*
 # Safety
 `runner` must be null or a handle not yet freed.
 */
void swaptest_runner_free(struct SwaptestRunner *runner);

/*
 Fits `c₀ − V cos(n(φ − ϑ/n))` to `len` samples.

 # Safety
 `phis` and `deltas` must be valid for `len` elements, `out_fit` for one write.
 */
enum SwaptestStatus swaptest_fit_fringe(const double *phis,
                                        const double *deltas,
                                        size_t len,
                                        uint32_t harmonic,
                                        struct SwaptestFringe *out_fit);

/*
 Runs an experiment from TOML config text (rates in Hz). Nothing is
 written to disk.

 # Safety
 `config_toml` must be a NUL-terminated UTF-8 string, `out_result` valid for one write.
 */
enum SwaptestStatus swaptest_run_config(const char *config_toml,
                                        struct SwaptestResult **out_result);

/*
 Number of tables; the primary one has index 0.

 # Safety
 `result` must be a live handle.
 */
size_t swaptest_result_table_count(const struct SwaptestResult *result);

/*
 Row and column counts of table `t`.

 # Safety
 `result` must be a live handle; the out pointers valid for one write.
 */
enum SwaptestStatus swaptest_result_shape(const struct SwaptestResult *result,
                                          size_t t,
                                          size_t *out_rows,
                                          size_t *out_cols);

/*
 Column name, owned by the result handle; null if out of range.

 # Safety
 `result` must be a live handle.
 */
const char *swaptest_result_column_name(const struct SwaptestResult *result, size_t t, size_t col);

/*
 Copies column `col` of table `t` into `buf`, which must hold the table's row count.

 # Safety
 `result` must be a live handle and `buf` valid for `len` writes.
 */
enum SwaptestStatus swaptest_result_column(const struct SwaptestResult *result,
                                           size_t t,
                                           size_t col,
                                           double *buf,
                                           size_t len);

/*
 Fitted fringe stored in the run metadata, if the experiment has one.

 # Safety
 `result` must be a live handle and `out_fit` valid for one write.
 */
enum SwaptestStatus swaptest_result_fit(const struct SwaptestResult *result,
                                        struct SwaptestFringe *out_fit);

/*
 # Safety
 `result` must be null or a handle not yet freed.
 */
void swaptest_result_free(struct SwaptestResult *result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWAPTEST_H */
