#ifndef CAUSEWAY_H
#define CAUSEWAY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum CwStatus {
  CW_STATUS_OK = 0,
  CW_STATUS_NULL_POINTER = 1,
  CW_STATUS_INVALID_UTF8 = 2,
  CW_STATUS_PARSE = 3,
  CW_STATUS_GRAPH = 4,
  CW_STATUS_DATA = 5,
  CW_STATUS_NOT_IDENTIFIED = 6,
  CW_STATUS_ESTIMATION = 7,
  CW_STATUS_REFUTATION = 8,
  CW_STATUS_INVALID_ARGUMENT = 9,
  CW_STATUS_PANIC = 10,
} CwStatus;

/*
 Causal graph handle.
 */
typedef struct CwDag CwDag;

/*
 Data table handle.
 */
typedef struct CwTable CwTable;

typedef struct CwEstimate {
  double ate;
  double se;
  double ci_low;
  double ci_high;
  double p_value;
  size_t n;
} CwEstimate;

typedef struct CwRefutation {
  double original_effect;
  double new_effect;
  double new_effect_sd;
  double p_value;
  size_t replicates;
  /*
   Non-zero when there were too few replicates for a stable p-value.
   */
  bool wide_variance;
} CwRefutation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the most recent failure on this thread, or null.
 The pointer stays valid until the next call into this library on the
 same thread.
 */
const char *cw_last_error(void);

/*
 Frees a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void cw_string_free(char *s);

/*
 Parses a DOT digraph.

 # Safety
 `dot` must be a NUL-terminated string; `out` must be writable.
 */
enum CwStatus cw_dag_parse(const char *dot, struct CwDag **out);

/*
 # Safety
 `dag` must come from [`cw_dag_parse`] and not have been freed. Null is ignored.
 */
void cw_dag_free(struct CwDag *dag);

/*
 DOT text of the graph; release with [`cw_string_free`].

 # Safety
 `dag` must be a live handle; `out` must be writable.
 */
enum CwStatus cw_dag_to_dot(const struct CwDag *dag, char **out);

/*
 Whether `x` and `y` are d-separated given the `n_given` names in `given`.

 # Safety
 Strings must be NUL-terminated; `given` must hold `n_given` of them.
 */
enum CwStatus cw_dag_d_separated(const struct CwDag *dag,
                                 const char *x,
                                 const char *y,
                                 const char *const *given,
                                 size_t n_given,
                                 bool *out);

/*
 Reads a CSV file with a header row of column names.

 # Safety
 `path` must be NUL-terminated; `out` must be writable.
 */
enum CwStatus cw_table_from_csv(const char *path, struct CwTable **out);

/*
 Builds a table from `n_cols` columns of `n_rows` values each.

 # Safety
 `names` and `columns` must hold `n_cols` entries; every column must hold
 `n_rows` doubles.
 */
enum CwStatus cw_table_from_columns(const char *const *names,
                                    const double *const *columns,
                                    size_t n_cols,
                                    size_t n_rows,
                                    struct CwTable **out);

/*
 # Safety
 `table` must come from this library and not have been freed. Null is ignored.
 */
void cw_table_free(struct CwTable *table);

/*
 Number of rows, or 0 for a null handle.

 # Safety
 `table` must be null or a live handle.
 */
size_t cw_table_rows(const struct CwTable *table);

/*
 Identifies and estimates the effect of `treatment` on `outcome`.
 `strategy` is one of "backdoor", "iv", "frontdoor", "mediation", or null
 for the first identified estimand.

 # Safety
 Handles must be live; strings NUL-terminated or, for `strategy`, null.
 */
enum CwStatus cw_estimate(const struct CwDag *dag,
                          const struct CwTable *table,
                          const char *treatment,
                          const char *outcome,
                          const char *strategy,
                          struct CwEstimate *out);

/*
 Estimates the effect as [`cw_estimate`] does, then runs one refuter:
 "random_common_cause", "placebo_treatment" or "data_subset". `fraction`
 is only read by "data_subset".

 # Safety
 As for [`cw_estimate`]; `method` must be NUL-terminated.
 */
enum CwStatus cw_refute(const struct CwDag *dag,
                        const struct CwTable *table,
                        const char *treatment,
                        const char *outcome,
                        const char *strategy,
                        const char *method,
                        size_t k,
                        double fraction,
                        uint64_t seed,
                        struct CwRefutation *out);

/*
 Log-negativity of a two-qubit density matrix given as 16 real and 16
 imaginary parts in row-major order.

 # Safety
 `re` and `im` must each point to 16 doubles.
 */
enum CwStatus cw_log_negativity(const double *re, const double *im, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CAUSEWAY_H */
