/* C interface for the rearrangement-invariant function-space toolkit.
 *
 * All entry points return ri_status; RI_OK means the call succeeded and every
 * output parameter is populated. On failure outputs are left untouched (out
 * strings set to NULL) and ri_last_error() returns a thread-local message
 * describing what went wrong. Strings returned through char** parameters are
 * heap-allocated and must be released with ri_string_free().
 *
 * Structured inputs (function spaces, interpolation couples and parameters,
 * solver and experiment configurations) are passed as JSON documents; the
 * schemas are the ones produced by the corresponding *_to_json calls, e.g.
 *   {"kind":"lorentz","p":2,"q":1}
 *   {"kind":"lorentz_zygmund","p":2,"q":"inf","lambda":-0.5}
 *   {"x0":{"kind":"lebesgue","p":1},"x1":{"kind":"lebesgue","p":"inf"}}
 */
#ifndef RISPACE_H
#define RISPACE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ri_status {
  RI_OK = 0,
  RI_ERR_INVALID_ARG = 1,  /* null pointer or malformed scalar argument */
  RI_ERR_PARSE = 2,        /* JSON document does not parse */
  RI_ERR_SPEC = 3,         /* parsed, but describes an inadmissible object */
  RI_ERR_DOMAIN = 4,       /* scalar argument outside the mathematical domain */
  RI_ERR_DIVERGENT = 5,    /* the requested norm or integral is infinite */
  RI_ERR_UNSUPPORTED = 6,  /* no registered rule covers the requested pair */
  RI_ERR_CONVERGENCE = 7,  /* iterative solver failed to reach tolerance */
  RI_ERR_INTERNAL = 8
} ri_status;

/* Message for the most recent failing call on this thread; empty string after
 * a successful call. The pointer stays valid until the next library call on
 * the same thread. */
const char* ri_last_error(void);

/* Release a string returned through a char** output parameter. NULL is ok. */
void ri_string_free(char* s);

/* --------------------------------------------------------------------------
 * Simple functions on the unit-measure domain.
 *
 * A function is a finite list of (value, measure) pieces with total measure
 * at most 1; the remainder of the domain is implicitly zero. */

typedef struct ri_function ri_function;

/* values/measures are parallel arrays of length count. Measures must be
 * positive with total <= 1 (up to roundoff). */
ri_status ri_function_create(const double* values, const double* measures,
                             size_t count, ri_function** out);

/* JSON form: an array of [value, measure] pairs. */
ri_status ri_function_from_json(const char* json, ri_function** out);
ri_status ri_function_to_json(const ri_function* f, char** out_json);
void ri_function_free(ri_function* f);

/* --------------------------------------------------------------------------
 * Decreasing rearrangement, distribution function, maximal function. */

typedef struct ri_rearrangement ri_rearrangement;

ri_status ri_rearrange(const ri_function* f, ri_rearrangement** out);

/* Number of steps of the rearrangement (0 for the zero function). */
size_t ri_rearrangement_size(const ri_rearrangement* r);

/* Copies the step representation into caller-owned arrays of length
 * ri_rearrangement_size(r): the rearrangement equals levels[i] on
 * [breaks[i-1], breaks[i]) (with breaks[-1] read as 0) and vanishes beyond
 * breaks[size-1]. breaks are strictly increasing, levels strictly
 * decreasing. */
ri_status ri_rearrangement_data(const ri_rearrangement* r, double* breaks,
                                double* levels);
void ri_rearrangement_free(ri_rearrangement* r);

/* mu{ |f| >= lambda }, lambda >= 0 (so lambda = 0 gives the full measure 1). */
ri_status ri_distribution(const ri_function* f, double lambda, double* out);

/* f**(t) = t^{-1} \int_0^t f_*, 0 < t <= 1. */
ri_status ri_maximal(const ri_function* f, double t, double* out);

/* --------------------------------------------------------------------------
 * Norms and embeddings. */

/* Norm of f in the space described by space_json. RI_ERR_DIVERGENT when the
 * norm is infinite (the message names the divergent integral). */
ri_status ri_norm(const ri_function* f, const char* space_json, double* out);
ri_status ri_norm_rearranged(const ri_rearrangement* r, const char* space_json,
                             double* out);

/* Name of the registered rule proving src ⊂ tgt, or RI_ERR_UNSUPPORTED when
 * no rule covers the pair (which is not a claim that the embedding fails). */
ri_status ri_embedding_rule(const char* src_json, const char* tgt_json,
                            char** out_rule);

/* Weight admissibility report for a generalized-Gamma spec:
 * {"c1":bool,"c2":bool,"doubling_constant":x}. */
ri_status ri_weight_conditions(const char* space_json, char** out_json);

/* --------------------------------------------------------------------------
 * K-functionals and logarithmic interpolation. */

/* K(f, t; X0, X1) for t > 0. couple_json: {"x0":space,"x1":space}. */
ri_status ri_k_functional(const ri_function* f, const char* couple_json,
                          double t, double* out);

/* || t^{-theta-1/q} (1-log t)^alpha K(f,t) ||_{L^q(0,1)}.
 * params_json: {"theta":t,"q":q,"alpha":a}. */
ri_status ri_log_interp_norm(const ri_function* f, const char* couple_json,
                             const char* params_json, double* out);

/* Symbolic identification of the interpolation space on the Lorentz--Zygmund
 * scale: {"space":{...},"case":"..."}. */
ri_status ri_identify(const char* couple_json, const char* params_json,
                      char** out_json);

/* Slow-variation quotient whose t->0 limit is 1/p0 - 1/p1; 0 < t < 1. */
ri_status ri_btheta_quotient(const char* couple_json, double t, double* out);

/* --------------------------------------------------------------------------
 * Dirichlet solver for -div(|∇u|^{p-2}∇u) + V(x,u) = f.
 *
 * config_json:
 *   {"dim":1|2, "n":cells_per_axis, "domain":"interval"|"square"|"disk",
 *    "radius":0.45, "p":2.0, "tol":1e-10,
 *    "potential":{"kind":"zero"|"const"|"bump", "c0":..,"m1":..,...},
 *    "f":{"kind":"const","value":1}
 *       | {"kind":"descriptor","descriptor":{...}}
 *       | {"kind":"values","values":[...]},
 *    "gradient_norm_space": space (optional),
 *    "solution_norm_space": space (optional)}
 *
 * Result JSON: {"converged","iterations","residual","energy","max_abs",
 * "center_value","gradient_sup","grid","values"} plus "gradient_norm" /
 * "solution_norm" when the corresponding space was requested. */
ri_status ri_solve(const char* config_json, char** out_json);

/* --------------------------------------------------------------------------
 * Experiment harness (regularity sweeps, bound checks, verification runs).
 *
 * config_json follows the experiment-configuration schema; the result JSON is
 * {"rows":[...],"summary":{...},"pass":bool}. */
ri_status ri_experiment_run(const char* config_json, char** out_json);

/* Same run rendered as CSV; with_seconds = 0 zeroes the timing column so the
 * byte stream is reproducible for a fixed configuration. */
ri_status ri_experiment_csv(const char* config_json, int with_seconds,
                            char** out_csv);

#ifdef __cplusplus
}
#endif

#endif /* RISPACE_H */
