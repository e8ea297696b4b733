/*******************************************************************************
 * C interface of the djet graph partitioner.
 *
 * All functions returning djet_status leave a message in djet_last_error() on
 * failure (per thread). Strings returned through char** are owned by the
 * caller and must be released with djet_string_free().
 *
 * @file:   djet.h
 ******************************************************************************/
#ifndef DJET_DJET_H
#define DJET_DJET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DJET_API __declspec(dllexport)
#else
#define DJET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum djet_status {
  DJET_OK = 0,
  DJET_INVALID_ARGUMENT = 1,
  DJET_PARSE_ERROR = 2,
  DJET_IO_ERROR = 3,
  DJET_INTERNAL_ERROR = 4,
} djet_status;

typedef enum djet_refiner {
  DJET_REFINER_LP = 0,
  DJET_REFINER_JET = 1,
} djet_refiner;

typedef enum djet_execution {
  DJET_EXEC_SEQUENTIAL = 0,
  DJET_EXEC_REVERSE = 1,
  DJET_EXEC_SHUFFLED = 2,
  DJET_EXEC_THREADED = 3,
} djet_execution;

typedef struct djet_graph djet_graph;
typedef struct djet_result djet_result;

typedef struct djet_config {
  int32_t refiner; /* djet_refiner */
  int32_t rounds;
  double initial_temperature;
  double final_temperature;
  int32_t patience;
  uint64_t seed;
  uint32_t pes;
  int32_t lp_rounds;
  int32_t initial_repetitions;
  double alpha;
  double trigger_threshold;
  int32_t rebalance_max_iterations;
  int32_t admissions_per_block;
  int32_t reported_per_block;
  int32_t execution; /* djet_execution */
  uint32_t threads;
} djet_config;

DJET_API const char *djet_version(void);
DJET_API const char *djet_last_error(void);
DJET_API const char *djet_status_string(djet_status status);
DJET_API void djet_string_free(char *str);

/* Graphs */
DJET_API djet_status djet_graph_read(const char *path, djet_graph **out);
DJET_API djet_status djet_graph_parse(const char *text, size_t length, djet_graph **out);
DJET_API djet_status djet_graph_write(const djet_graph *graph, const char *path);
DJET_API djet_status djet_graph_gen_grid(int64_t width, int64_t height, djet_graph **out);
DJET_API djet_status djet_graph_gen_rgg2d(int64_t n, double radius, uint64_t seed, djet_graph **out);
DJET_API void djet_graph_free(djet_graph *graph);

DJET_API uint32_t djet_graph_n(const djet_graph *graph);
DJET_API uint64_t djet_graph_m(const djet_graph *graph);
DJET_API int64_t djet_graph_total_node_weight(const djet_graph *graph);
DJET_API djet_status
djet_edge_cut(const djet_graph *graph, const uint32_t *assignment, size_t length, int64_t *cut);

/* Configuration */
DJET_API void djet_config_init(djet_config *config);
DJET_API djet_status djet_config_validate(const djet_config *config);
/* Applies "key = value" lines ('#' starts a comment) on top of *config. */
DJET_API djet_status djet_config_apply_text(djet_config *config, const char *text);
DJET_API djet_status djet_config_to_text(const djet_config *config, char **out);
DJET_API djet_status djet_temperature_schedule(const djet_config *config, double *out, size_t capacity);

/* Partitioning */
DJET_API djet_status
djet_partition(const djet_graph *graph, uint32_t k, double epsilon, const djet_config *config, djet_result **out);
DJET_API void djet_result_free(djet_result *result);

DJET_API int64_t djet_result_cut(const djet_result *result);
DJET_API double djet_result_imbalance(const djet_result *result);
DJET_API int djet_result_balanced(const djet_result *result);
DJET_API double djet_result_l_max(const djet_result *result);
DJET_API double djet_result_residual_overload(const djet_result *result);
DJET_API uint32_t djet_result_k(const djet_result *result);
DJET_API size_t djet_result_levels(const djet_result *result);
DJET_API size_t djet_result_num_temperatures(const djet_result *result);
DJET_API double djet_result_temperature(const djet_result *result, size_t i);
DJET_API size_t djet_result_num_jet_rounds(const djet_result *result);
DJET_API double djet_result_time_total(const djet_result *result);
/* Pointer stays valid until djet_result_free(). */
DJET_API const uint32_t *djet_result_assignment(const djet_result *result, size_t *length);
DJET_API int64_t djet_result_block_weight(const djet_result *result, uint32_t block);

DJET_API djet_status djet_result_write_partition(const djet_result *result, const char *path);
/* Line-oriented key=value metrics; timing keys start with "time_". */
DJET_API djet_status djet_result_metrics(const djet_result *result, char **out);
DJET_API djet_status djet_result_json(const djet_result *result, char **out);

/* Performance profiles: run-record CSV in, (algorithm, delta, fraction) CSV out.
 * deltas may be NULL to use the built-in grid. */
DJET_API djet_status
djet_profile_csv(const char *records_csv, const double *deltas, size_t num_deltas, char **out_csv);

#ifdef __cplusplus
}
#endif

#endif
