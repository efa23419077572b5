/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef UST_GRAPHON_H
#define UST_GRAPHON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Success.
 */
#define UG_OK 0

/**
 * A required pointer was null or a string was not valid UTF-8.
 */
#define UG_ERR_NULL 1

/**
 * Malformed input or invalid parameter.
 */
#define UG_ERR_CONFIG 2

/**
 * A mathematical precondition failed (for example a disconnected graph).
 */
#define UG_ERR_PRECONDITION 3

/**
 * Numerical failure.
 */
#define UG_ERR_NUMERIC 4

/**
 * A size or work budget was exceeded.
 */
#define UG_ERR_BUDGET 5

/**
 * The library panicked; this is a bug.
 */
#define UG_ERR_PANIC 6

/**
 * An output buffer was too small; the required length was written.
 */
#define UG_ERR_BUFFER 7

/**
 * Multigraph handle.
 */
typedef struct UgGraph UgGraph;

/**
 * Step graphon handle.
 */
typedef struct UgGraphon UgGraphon;

/**
 * Spanning tree handle.
 */
typedef struct UgSpanningTree UgSpanningTree;

/**
 * Rooted tree (pattern) handle.
 */
typedef struct UgTree UgTree;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ug_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *ug_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library, freed once.
 */
void ug_string_free(char *s);

/**
 * Parses an edge list (`n m` header, then `u v` lines).
 *
 * # Safety
 * `text_ptr` must be a NUL-terminated string and `out_graph` a valid pointer.
 */
int32_t ug_graph_from_edge_list(const char *text_ptr, struct UgGraph **out_graph);

/**
 * Builds a graph on `n` vertices from `len` pairs `(us[i], vs[i])`; repeated pairs add multiplicity.
 *
 * # Safety
 * `us` and `vs` must point to `len` elements each; `out_graph` must be valid.
 */
int32_t ug_graph_from_pairs(uintptr_t n,
                            const uintptr_t *us,
                            const uintptr_t *vs,
                            uintptr_t len,
                            struct UgGraph **out_graph);

/**
 * Complete graph `K_n`.
 *
 * # Safety
 * `out_graph` must be a valid pointer.
 */
int32_t ug_graph_complete(uintptr_t n, struct UgGraph **out_graph);

/**
 * # Safety
 * `g` must be null or a handle from this library, freed once.
 */
void ug_graph_free(struct UgGraph *g);

/**
 * Number of vertices, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a valid handle.
 */
uintptr_t ug_graph_vertex_count(const struct UgGraph *g);

/**
 * Number of edges counted with multiplicity, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a valid handle.
 */
uintptr_t ug_graph_edge_count(const struct UgGraph *g);

/**
 * Degree of `v`.
 *
 * # Safety
 * `g` must be a valid handle and `out_degree` a valid pointer.
 */
int32_t ug_graph_degree(const struct UgGraph *g, uintptr_t v, uintptr_t *out_degree);

/**
 * `R_eff(u ↔ v)`; infinity when `u` and `v` are in different components.
 *
 * # Safety
 * `g` must be a valid handle and `out_value` a valid pointer.
 */
int32_t ug_effective_resistance(const struct UgGraph *g,
                                uintptr_t u,
                                uintptr_t v,
                                double *out_value);

/**
 * Natural log of the number of spanning trees.
 *
 * # Safety
 * `g` must be a valid handle and `out_value` a valid pointer.
 */
int32_t ug_log_spanning_tree_count(const struct UgGraph *g, double *out_value);

/**
 * Expander decomposition with its verification report, as JSON.
 *
 * # Safety
 * `g` must be a valid handle and `out_json` a valid pointer; free the string with `ug_string_free`.
 */
int32_t ug_expander_decompose_json(const struct UgGraph *g,
                                   double gamma,
                                   double eta,
                                   double eps,
                                   char **out_json);

/**
 * Step graphon from block measures `mu[k]` and a row-major kernel `w[k*k]`.
 *
 * # Safety
 * `mu` must point to `k` and `w` to `k*k` doubles; `out_graphon` must be valid.
 */
int32_t ug_graphon_new(uintptr_t k,
                       const double *mu,
                       const double *w,
                       struct UgGraphon **out_graphon);

/**
 * Step graphon from JSON `{"mu": [...], "W": [[...]]}`.
 *
 * # Safety
 * `json` must be NUL-terminated and `out_graphon` valid.
 */
int32_t ug_graphon_from_json(const char *json, struct UgGraphon **out_graphon);

/**
 * # Safety
 * `w` must be null or a handle from this library, freed once.
 */
void ug_graphon_free(struct UgGraphon *w);

/**
 * W-random graph on `n` vertices. The same seed gives the same graph.
 *
 * # Safety
 * `w` must be a valid handle and `out_graph` a valid pointer.
 */
int32_t ug_sample_w_random_graph(const struct UgGraphon *w,
                                 uintptr_t n,
                                 uint64_t seed,
                                 struct UgGraph **out_graph);

/**
 * Rooted tree from a parent array (`-1` marks the root).
 *
 * # Safety
 * `parents` must point to `len` elements and `out_tree` must be valid.
 */
int32_t ug_tree_from_parents(const int64_t *parents, uintptr_t len, struct UgTree **out_tree);

/**
 * # Safety
 * `t` must be null or a handle from this library, freed once.
 */
void ug_tree_free(struct UgTree *t);

/**
 * Canonical code of the rooted tree; equal codes mean root-isomorphic trees.
 *
 * # Safety
 * `t` must be a valid handle and `out_code` valid; free the string with `ug_string_free`.
 */
int32_t ug_tree_canonical_code(const struct UgTree *t, char **out_code);

/**
 * `Freq(T; W)`: probability that the root ball of the limiting branching process is `T`.
 *
 * # Safety
 * Handles and `out_value` must be valid.
 */
int32_t ug_freq_graphon(const struct UgTree *t, const struct UgGraphon *w, double *out_value);

/**
 * Uniform spanning tree by Wilson's algorithm. The same seed gives the same tree.
 *
 * # Safety
 * `g` must be a valid handle and `out_tree` a valid pointer.
 */
int32_t ug_ust_sample(const struct UgGraph *g, uint64_t seed, struct UgSpanningTree **out_tree);

/**
 * # Safety
 * `t` must be null or a handle from this library, freed once.
 */
void ug_spanning_tree_free(struct UgSpanningTree *t);

/**
 * Degree of `v` in the spanning tree.
 *
 * # Safety
 * `t` must be a valid handle and `out_degree` a valid pointer.
 */
int32_t ug_spanning_tree_degree(const struct UgSpanningTree *t, uintptr_t v, uintptr_t *out_degree);

/**
 * Copies the `n − 1` tree edges into `us`/`vs` (capacity `cap` each) and
 * writes the edge count to `out_len`. Returns `UG_ERR_BUFFER` when `cap` is too small.
 *
 * # Safety
 * `us` and `vs` must have room for `cap` elements; `out_len` must be valid.
 */
int32_t ug_spanning_tree_edges(const struct UgSpanningTree *t,
                               uintptr_t *us,
                               uintptr_t *vs,
                               uintptr_t cap,
                               uintptr_t *out_len);

/**
 * Extremal degree-density bound for degree `k`; `out_upper` is 1 for an upper bound.
 *
 * # Safety
 * Out-pointers must be valid.
 */
int32_t ug_degree_density_bound(uintptr_t k, double *out_value, int32_t *out_upper);

/**
 * Maximum of `λ e^{−y} y^k` over `λ ∈ [0,1]`, `λ y ≤ 1`, cross-checked to `tol`.
 *
 * # Safety
 * `out_value` must be valid.
 */
int32_t ug_optimize_lemma_max(uintptr_t k, double tol, double *out_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UST_GRAPHON_H */
