#include "sicut/sicut.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "sicut/explain.hpp"
#include "sicut/hierarchy.hpp"
#include "sicut/ingestion.hpp"
#include "sicut/persistence.hpp"
#include "sicut/search.hpp"
#include "sicut/service.hpp"
#include "sicut/statistics.hpp"

using namespace sicut;

struct sicut_dataset_s {
    Dataset data;
    std::vector<std::string> warnings;
};

struct sicut_embedding_s {
    Embedding embedding;
};

struct sicut_model_s {
    Dataset data;
    Embedding embedding;
    Linkage linkage = Linkage::single;
    double epsilon = default_epsilon;
    Dendrogram dendrogram;
    PriorModel prior;
    std::unique_ptr<SearchContext> context;
};

struct sicut_solution_s {
    const sicut_model_s* model = nullptr;
    Hyperparameters hp;
    ClusteringSolution solution;
    SearchTrace trace;
};

struct sicut_server_s {
    std::unique_ptr<Service> service;
};

namespace {

thread_local std::string last_error;

int code_for(Errc code) {
    switch (code) {
    case Errc::invalid_argument:
        return SICUT_ERROR_INVALID_ARGUMENT;
    case Errc::ingestion:
        return SICUT_ERROR_INGESTION;
    case Errc::degenerate_cluster:
        return SICUT_ERROR_DEGENERATE_CLUSTER;
    case Errc::version_mismatch:
        return SICUT_ERROR_VERSION_MISMATCH;
    case Errc::schema_mismatch:
        return SICUT_ERROR_SCHEMA_MISMATCH;
    case Errc::io:
        return SICUT_ERROR_IO;
    case Errc::conflict:
        return SICUT_ERROR_CONFLICT;
    case Errc::not_found:
        return SICUT_ERROR_NOT_FOUND;
    }
    return SICUT_ERROR_INTERNAL;
}

int fail(int code, std::string message) {
    last_error = std::move(message);
    return code;
}

template <typename F>
int guard(F&& body) noexcept {
    try {
        body();
        return SICUT_OK;
    } catch (const Error& e) {
        return fail(code_for(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SICUT_ERROR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SICUT_ERROR_INTERNAL, e.what());
    } catch (...) {
        return fail(SICUT_ERROR_INTERNAL, "unknown error");
    }
}

#define SICUT_REQUIRE(p)                                                      \
    do {                                                                       \
        if ((p) == nullptr) {                                                  \
            return fail(SICUT_ERROR_NULL_POINTER, "argument " #p " is null"); \
        }                                                                      \
    } while (0)

std::optional<SchemaSpec> schema_from(const char* schema_json) {
    if (schema_json == nullptr || *schema_json == '\0') {
        return std::nullopt;
    }
    return SchemaSpec::from_json(schema_json);
}

char* duplicate(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

Hyperparameters to_hyperparameters(const sicut_model_s& model, const sicut_search_params& p) {
    Hyperparameters hp;
    hp.alpha = p.alpha;
    hp.beta = p.beta;
    hp.time_budget_ms = p.time_budget_ms;
    hp.min_cluster_size = p.min_cluster_size == 0 ? 1 : p.min_cluster_size;
    hp.linkage = model.linkage;
    hp.epsilon = model.epsilon;
    hp.validate();
    return hp;
}

std::optional<std::size_t> cap_of(const sicut_search_params& p) {
    return p.iteration_cap == 0 ? std::nullopt : std::optional<std::size_t>(p.iteration_cap);
}

}  // namespace

extern "C" {

const char* sicut_version(void) { return "1.0.0"; }

const char* sicut_error_description(int code) {
    switch (code) {
    case SICUT_OK:
        return "ok";
    case SICUT_ERROR_INVALID_ARGUMENT:
        return "invalid argument";
    case SICUT_ERROR_NULL_POINTER:
        return "null pointer";
    case SICUT_ERROR_INGESTION:
        return "ingestion error";
    case SICUT_ERROR_DEGENERATE_CLUSTER:
        return "degenerate cluster";
    case SICUT_ERROR_VERSION_MISMATCH:
        return "version mismatch";
    case SICUT_ERROR_SCHEMA_MISMATCH:
        return "schema mismatch";
    case SICUT_ERROR_IO:
        return "i/o error";
    case SICUT_ERROR_CONFLICT:
        return "conflict";
    case SICUT_ERROR_NOT_FOUND:
        return "not found";
    case SICUT_ERROR_INTERNAL:
        return "internal error";
    default:
        return "unknown error code";
    }
}

const char* sicut_last_error(void) { return last_error.c_str(); }

void sicut_string_free(char* s) { std::free(s); }

int sicut_dataset_load(const char* path, const char* schema_json, sicut_dataset_t* out) {
    SICUT_REQUIRE(path);
    SICUT_REQUIRE(out);
    return guard([&] {
        auto loaded = load_dataset(path, schema_from(schema_json));
        *out = new sicut_dataset_s{std::move(loaded.dataset), std::move(loaded.warnings)};
    });
}

int sicut_dataset_parse(const char* text, const char* schema_json, sicut_dataset_t* out) {
    SICUT_REQUIRE(text);
    SICUT_REQUIRE(out);
    return guard([&] {
        auto loaded = parse_dataset(text, schema_from(schema_json));
        *out = new sicut_dataset_s{std::move(loaded.dataset), std::move(loaded.warnings)};
    });
}

int sicut_dataset_shape(sicut_dataset_t ds, size_t* n, size_t* m) {
    SICUT_REQUIRE(ds);
    if (n != nullptr) {
        *n = ds->data.n();
    }
    if (m != nullptr) {
        *m = ds->data.m();
    }
    return SICUT_OK;
}

int sicut_dataset_warning_count(sicut_dataset_t ds, size_t* count) {
    SICUT_REQUIRE(ds);
    SICUT_REQUIRE(count);
    *count = ds->warnings.size();
    return SICUT_OK;
}

int sicut_dataset_warning(sicut_dataset_t ds, size_t i, const char** out) {
    SICUT_REQUIRE(ds);
    SICUT_REQUIRE(out);
    if (i >= ds->warnings.size()) {
        return fail(SICUT_ERROR_INVALID_ARGUMENT, "warning index out of range");
    }
    *out = ds->warnings[i].c_str();
    return SICUT_OK;
}

int sicut_dataset_attribute_name(sicut_dataset_t ds, size_t j, const char** out) {
    SICUT_REQUIRE(ds);
    SICUT_REQUIRE(out);
    if (j >= ds->data.m()) {
        return fail(SICUT_ERROR_INVALID_ARGUMENT, "attribute index out of range");
    }
    *out = ds->data.attribute(j).name.c_str();
    return SICUT_OK;
}

int sicut_dataset_select_rows(sicut_dataset_t ds, const size_t* rows, size_t count, sicut_dataset_t* out) {
    SICUT_REQUIRE(ds);
    SICUT_REQUIRE(rows);
    SICUT_REQUIRE(out);
    return guard([&] {
        *out = new sicut_dataset_s{ds->data.subset(std::span<const std::size_t>(rows, count)), {}};
    });
}

void sicut_dataset_free(sicut_dataset_t ds) { delete ds; }

int sicut_embedding_load(const char* path, size_t expected_rows, sicut_embedding_t* out) {
    SICUT_REQUIRE(path);
    SICUT_REQUIRE(out);
    return guard([&] { *out = new sicut_embedding_s{load_embedding(path, expected_rows)}; });
}

int sicut_embedding_pca(sicut_dataset_t ds, sicut_embedding_t* out) {
    SICUT_REQUIRE(ds);
    SICUT_REQUIRE(out);
    return guard([&] { *out = new sicut_embedding_s{pca_embedding(ds->data)}; });
}

int sicut_embedding_point(sicut_embedding_t emb, size_t i, double* x, double* y) {
    SICUT_REQUIRE(emb);
    if (i >= emb->embedding.n()) {
        return fail(SICUT_ERROR_INVALID_ARGUMENT, "point index out of range");
    }
    if (x != nullptr) {
        *x = emb->embedding[i].x;
    }
    if (y != nullptr) {
        *y = emb->embedding[i].y;
    }
    return SICUT_OK;
}

int sicut_embedding_select_rows(sicut_embedding_t emb, const size_t* rows, size_t count, sicut_embedding_t* out) {
    SICUT_REQUIRE(emb);
    SICUT_REQUIRE(rows);
    SICUT_REQUIRE(out);
    return guard([&] {
        std::vector<Embedding::Point> coords;
        coords.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            if (rows[i] >= emb->embedding.n()) {
                throw Error(Errc::invalid_argument, "row index out of range");
            }
            coords.push_back(emb->embedding[rows[i]]);
        }
        *out = new sicut_embedding_s{Embedding(std::move(coords))};
    });
}

void sicut_embedding_free(sicut_embedding_t emb) { delete emb; }

int sicut_model_create(sicut_dataset_t ds, sicut_embedding_t emb, const char* linkage, double epsilon,
                        sicut_model_t* out) {
    SICUT_REQUIRE(ds);
    SICUT_REQUIRE(emb);
    SICUT_REQUIRE(out);
    return guard([&] {
        if (emb->embedding.n() != ds->data.n()) {
            throw Error(Errc::invalid_argument, "embedding has " + std::to_string(emb->embedding.n()) +
                                                    " rows but the dataset has " + std::to_string(ds->data.n()));
        }
        auto model = std::make_unique<sicut_model_s>();
        model->data = ds->data;
        model->embedding = emb->embedding;
        model->linkage = linkage == nullptr ? Linkage::single : parse_linkage(linkage);
        model->epsilon = epsilon > 0.0 ? epsilon : default_epsilon;
        model->dendrogram = build_dendrogram(model->embedding, model->linkage);
        model->prior = fit_prior(model->data, model->epsilon);
        model->context = std::make_unique<SearchContext>(model->dendrogram, model->data, model->prior);
        *out = model.release();
    });
}

void sicut_model_free(sicut_model_t model) { delete model; }

void sicut_params_default(sicut_search_params* params) {
    if (params == nullptr) {
        return;
    }
    const Hyperparameters hp;
    params->alpha = hp.alpha;
    params->beta = hp.beta;
    params->time_budget_ms = hp.time_budget_ms;
    params->iteration_cap = 0;
    params->min_cluster_size = hp.min_cluster_size;
}

int sicut_model_search(sicut_model_t model, const sicut_search_params* params, sicut_solution_t* out) {
    SICUT_REQUIRE(model);
    SICUT_REQUIRE(params);
    SICUT_REQUIRE(out);
    return guard([&] {
        const auto hp = to_hyperparameters(*model, *params);
        auto [solution, trace] = greedy_search(*model->context, hp, SearchBudget::from(hp, cap_of(*params)));
        *out = new sicut_solution_s{model, hp, std::move(solution), std::move(trace)};
    });
}

int sicut_model_refine(sicut_model_t model, sicut_solution_t previous, const sicut_search_params* params,
                        sicut_solution_t* out) {
    SICUT_REQUIRE(model);
    SICUT_REQUIRE(previous);
    SICUT_REQUIRE(params);
    SICUT_REQUIRE(out);
    if (previous->model != model) {
        return fail(SICUT_ERROR_INVALID_ARGUMENT, "solution belongs to a different model");
    }
    return guard([&] {
        const auto hp = to_hyperparameters(*model, *params);
        auto [solution, trace] =
            refine(previous->solution, *model->context, hp, SearchBudget::from(hp, cap_of(*params)));
        *out = new sicut_solution_s{model, hp, std::move(solution), std::move(trace)};
    });
}

int sicut_solution_summary_get(sicut_solution_t sol, sicut_solution_summary* out) {
    SICUT_REQUIRE(sol);
    SICUT_REQUIRE(out);
    out->k = sol->solution.k();
    out->attributes = sol->solution.attribute_count();
    out->information = sol->solution.total_information;
    out->complexity = sol->solution.complexity;
    out->si = sol->solution.si;
    out->iterations = sol->solution.iterations_completed;
    out->budget_expired = sol->trace.budget_expired ? 1 : 0;
    return SICUT_OK;
}

int sicut_solution_labels(sicut_solution_t sol, size_t* labels, size_t capacity) {
    SICUT_REQUIRE(sol);
    SICUT_REQUIRE(labels);
    return guard([&] {
        const auto all = sol->solution.labels(sol->model->data.n());
        std::copy_n(all.begin(), std::min(capacity, all.size()), labels);
    });
}

int sicut_solution_to_json(sicut_model_t model, sicut_solution_t sol, char** out) {
    SICUT_REQUIRE(model);
    SICUT_REQUIRE(sol);
    SICUT_REQUIRE(out);
    return guard([&] {
        SolutionDocument doc{sol->hp, sol->solution, sol->trace};
        *out = duplicate(save_document(doc, model->data));
    });
}

int sicut_solution_from_json(sicut_model_t model, const char* text, sicut_solution_t* out) {
    SICUT_REQUIRE(model);
    SICUT_REQUIRE(text);
    SICUT_REQUIRE(out);
    return guard([&] {
        auto doc = load_document(text, model->data, model->dendrogram);
        if (!doc.solution) {
            throw Error(Errc::invalid_argument, "solution document holds no solution");
        }
        *out = new sicut_solution_s{model, doc.hyperparameters, std::move(*doc.solution), std::move(doc.trace)};
    });
}

int sicut_solution_report(sicut_model_t model, sicut_solution_t sol, char** out) {
    SICUT_REQUIRE(model);
    SICUT_REQUIRE(sol);
    SICUT_REQUIRE(out);
    return guard([&] { *out = duplicate(format_report(sol->solution, model->data, model->prior)); });
}

void sicut_solution_free(sicut_solution_t sol) { delete sol; }

int sicut_server_create(const sicut_server_config* config, sicut_server_t* out) {
    SICUT_REQUIRE(out);
    return guard([&] {
        ServiceConfig c;
        if (config != nullptr) {
            if (config->host != nullptr && *config->host != '\0') {
                c.host = config->host;
            }
            c.port = config->port;
            if (config->session_dir != nullptr) {
                c.session_dir = config->session_dir;
            }
            if (config->default_linkage != nullptr && *config->default_linkage != '\0') {
                c.default_linkage = parse_linkage(config->default_linkage);
            }
            if (config->async_threshold_ms > 0) {
                c.async_threshold_ms = config->async_threshold_ms;
            }
        }
        if (c.port < 0 || c.port > 65535) {
            throw Error(Errc::invalid_argument, "port must lie in [0, 65535]");
        }
        *out = new sicut_server_s{std::make_unique<Service>(std::move(c))};
    });
}

int sicut_server_bind(sicut_server_t srv, int* port) {
    SICUT_REQUIRE(srv);
    return guard([&] {
        const int bound = srv->service->bind();
        if (port != nullptr) {
            *port = bound;
        }
    });
}

int sicut_server_listen(sicut_server_t srv) {
    SICUT_REQUIRE(srv);
    return guard([&] { srv->service->listen(); });
}

int sicut_server_stop(sicut_server_t srv) {
    SICUT_REQUIRE(srv);
    return guard([&] { srv->service->stop(); });
}

void sicut_server_free(sicut_server_t srv) { delete srv; }

}  // extern "C"
