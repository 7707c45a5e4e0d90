/* C ABI for the rgcf collaborative-filtering engine. */

#ifndef RGCF_H
#define RGCF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum RgcfStatus {
  RgcfStatus_Ok = 0,
  /**
   * Invalid argument (null pointer, bad UTF-8, bad configuration).
   */
  RgcfStatus_InvalidArgument = 1,
  /**
   * File could not be read, written, or parsed.
   */
  RgcfStatus_Io = 2,
  /**
   * Inputs disagree with each other (unknown ids, mismatched models).
   */
  RgcfStatus_Inconsistent = 3,
  /**
   * Numerical or generation failure during computation.
   */
  RgcfStatus_Failed = 4,
} RgcfStatus;

/**
 * An immutable bipartite like graph.
 */
typedef struct RgcfGraph RgcfGraph;

/**
 * A trained (or loaded) posterior with id lookup maps.
 */
typedef struct RgcfModel RgcfModel;

/**
 * Training configuration mirroring the CLI defaults when zero-initialized
 * fields are replaced by `rgcf_train_config_default`.
 */
typedef struct RgcfTrainConfig {
  uintptr_t k;
  double alpha;
  double beta;
  double r;
  uintptr_t iterations;
  uintptr_t t_eps;
  uintptr_t t_tau;
  uint64_t seed;
  /**
   * Nonzero pins user biases at zero.
   */
  int32_t clamp_user_bias;
} RgcfTrainConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent error on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *rgcf_last_error(void);

/**
 * Load an edge-list file into a new graph handle. On success writes the
 * handle through `out` and returns Ok.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum RgcfStatus rgcf_graph_load(const char *path, struct RgcfGraph **out);

/**
 * # Safety
 * `graph` must be a handle from this library or null.
 */
void rgcf_graph_free(struct RgcfGraph *graph);

/**
 * # Safety
 * `graph` must be a valid graph handle.
 */
uintptr_t rgcf_graph_num_users(const struct RgcfGraph *graph);

/**
 * # Safety
 * `graph` must be a valid graph handle.
 */
uintptr_t rgcf_graph_num_items(const struct RgcfGraph *graph);

/**
 * # Safety
 * `graph` must be a valid graph handle.
 */
uintptr_t rgcf_graph_num_edges(const struct RgcfGraph *graph);

struct RgcfTrainConfig rgcf_train_config_default(void);

/**
 * Train a model on `graph`. On success writes a model handle through
 * `out`.
 *
 * # Safety
 * `graph`, `config` and `out` must be valid pointers.
 */
enum RgcfStatus rgcf_train(const struct RgcfGraph *graph,
                           const struct RgcfTrainConfig *config,
                           struct RgcfModel **out);

/**
 * # Safety
 * `model` must be a handle from this library or null.
 */
void rgcf_model_free(struct RgcfModel *model);

/**
 * Write the model to `path` in the versioned text format.
 *
 * # Safety
 * `model` and `path` must be valid pointers.
 */
enum RgcfStatus rgcf_model_save(const struct RgcfModel *model, const char *path);

/**
 * Load a model file written by `rgcf_model_save` (or the CLI).
 *
 * # Safety
 * `path` and `out` must be valid pointers.
 */
enum RgcfStatus rgcf_model_load(const char *path, struct RgcfModel **out);

/**
 * Predicted like probability for a (user id, item id) pair, written
 * through `out`. Unknown ids return Inconsistent.
 *
 * # Safety
 * All pointers must be valid; ids must be NUL-terminated strings.
 */
enum RgcfStatus rgcf_like_probability(const struct RgcfModel *model,
                                      const char *user_id,
                                      const char *item_id,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RGCF_H */
