#ifndef SICUT_H
#define SICUT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SICUT_API __declspec(dllexport)
#else
#define SICUT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/*
 * Every function returns SICUT_OK or a negative error code. On failure a message for the calling
 * thread is available from sicut_last_error() until the next failing call on that thread.
 * Strings handed out through char** must be released with sicut_string_free().
 */
enum sicut_error {
    SICUT_OK = 0,
    SICUT_ERROR_INVALID_ARGUMENT = -1,
    SICUT_ERROR_NULL_POINTER = -2,
    SICUT_ERROR_INGESTION = -3,
    SICUT_ERROR_DEGENERATE_CLUSTER = -4,
    SICUT_ERROR_VERSION_MISMATCH = -5,
    SICUT_ERROR_SCHEMA_MISMATCH = -6,
    SICUT_ERROR_IO = -7,
    SICUT_ERROR_CONFLICT = -8,
    SICUT_ERROR_NOT_FOUND = -9,
    SICUT_ERROR_INTERNAL = -100
};

typedef struct sicut_dataset_s* sicut_dataset_t;
typedef struct sicut_embedding_s* sicut_embedding_t;
typedef struct sicut_model_s* sicut_model_t;
typedef struct sicut_solution_s* sicut_solution_t;
typedef struct sicut_server_s* sicut_server_t;

typedef struct sicut_search_params {
    double alpha;
    double beta;
    int64_t time_budget_ms;
    /* Maximum number of recorded iterations (the k = 1 record counts); 0 means no cap. */
    size_t iteration_cap;
    size_t min_cluster_size;
} sicut_search_params;

typedef struct sicut_solution_summary {
    size_t k;
    size_t attributes;
    double information;
    double complexity;
    double si;
    size_t iterations;
    int budget_expired;
} sicut_solution_summary;

typedef struct sicut_server_config {
    const char* host;
    /* 0 picks an ephemeral port. */
    int port;
    /* NULL or empty disables writing solution documents to disk. */
    const char* session_dir;
    const char* default_linkage;
    int64_t async_threshold_ms;
} sicut_server_config;

SICUT_API const char* sicut_version(void);
SICUT_API const char* sicut_error_description(int code);
SICUT_API const char* sicut_last_error(void);
SICUT_API void sicut_string_free(char* s);

/* schema_json may be NULL for full type inference. */
SICUT_API int sicut_dataset_load(const char* path, const char* schema_json, sicut_dataset_t* out);
SICUT_API int sicut_dataset_parse(const char* text, const char* schema_json, sicut_dataset_t* out);
SICUT_API int sicut_dataset_shape(sicut_dataset_t ds, size_t* n, size_t* m);
SICUT_API int sicut_dataset_warning_count(sicut_dataset_t ds, size_t* count);
/* The returned pointer stays valid while ds lives. */
SICUT_API int sicut_dataset_warning(sicut_dataset_t ds, size_t i, const char** out);
SICUT_API int sicut_dataset_attribute_name(sicut_dataset_t ds, size_t j, const char** out);
/* Keeps the listed rows, in the given order. */
SICUT_API int sicut_dataset_select_rows(sicut_dataset_t ds, const size_t* rows, size_t count,
                                          sicut_dataset_t* out);
SICUT_API void sicut_dataset_free(sicut_dataset_t ds);

SICUT_API int sicut_embedding_load(const char* path, size_t expected_rows, sicut_embedding_t* out);
SICUT_API int sicut_embedding_pca(sicut_dataset_t ds, sicut_embedding_t* out);
SICUT_API int sicut_embedding_point(sicut_embedding_t emb, size_t i, double* x, double* y);
SICUT_API int sicut_embedding_select_rows(sicut_embedding_t emb, const size_t* rows, size_t count,
                                            sicut_embedding_t* out);
SICUT_API void sicut_embedding_free(sicut_embedding_t emb);

/*
 * Builds the dendrogram and prior once; every search on the model reuses them. The model copies
 * the dataset and embedding. linkage is "single", "complete" or "average"; epsilon <= 0 selects
 * the default variance floor.
 */
SICUT_API int sicut_model_create(sicut_dataset_t ds, sicut_embedding_t emb, const char* linkage,
                                   double epsilon, sicut_model_t* out);
SICUT_API void sicut_model_free(sicut_model_t model);

SICUT_API void sicut_params_default(sicut_search_params* params);
/* Greedy search from one cluster. */
SICUT_API int sicut_model_search(sicut_model_t model, const sicut_search_params* params,
                                   sicut_solution_t* out);
/* Hill-climbs from previous, which must belong to the same model. */
SICUT_API int sicut_model_refine(sicut_model_t model, sicut_solution_t previous,
                                   const sicut_search_params* params, sicut_solution_t* out);

SICUT_API int sicut_solution_summary_get(sicut_solution_t sol, sicut_solution_summary* out);
/* Writes min(n, capacity) labels. */
SICUT_API int sicut_solution_labels(sicut_solution_t sol, size_t* labels, size_t capacity);
SICUT_API int sicut_solution_to_json(sicut_model_t model, sicut_solution_t sol, char** out);
SICUT_API int sicut_solution_from_json(sicut_model_t model, const char* text, sicut_solution_t* out);
SICUT_API int sicut_solution_report(sicut_model_t model, sicut_solution_t sol, char** out);
SICUT_API void sicut_solution_free(sicut_solution_t sol);

/* A NULL config uses 127.0.0.1:8080 without a session directory. */
SICUT_API int sicut_server_create(const sicut_server_config* config, sicut_server_t* out);
SICUT_API int sicut_server_bind(sicut_server_t srv, int* port);
/* Blocks until sicut_server_stop() is called from another thread. */
SICUT_API int sicut_server_listen(sicut_server_t srv);
SICUT_API int sicut_server_stop(sicut_server_t srv);
SICUT_API void sicut_server_free(sicut_server_t srv);

#ifdef __cplusplus
}
#endif

#endif
