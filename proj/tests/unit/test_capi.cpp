#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "sicut/sicut.h"
#include "../support/fixtures.hpp"

namespace {

std::string temp_file(const std::string& name, const std::string& contents) {
    const auto dir = std::filesystem::temp_directory_path() / "sicut_capi_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / name).string();
    std::ofstream(path) << contents;
    return path;
}

}  // namespace

TEST_CASE("error codes and descriptions") {
    CHECK(std::strcmp(sicut_error_description(SICUT_OK), "ok") == 0);
    CHECK(std::strcmp(sicut_error_description(12345), "unknown error code") == 0);
    sicut_dataset_t ds = nullptr;
    CHECK(sicut_dataset_parse(nullptr, nullptr, &ds) == SICUT_ERROR_NULL_POINTER);
    CHECK(sicut_dataset_parse("a\n1\nNA\n", nullptr, &ds) == SICUT_ERROR_INGESTION);
    CHECK(std::strlen(sicut_last_error()) > 0);
    CHECK(sicut_dataset_load("/nonexistent/file.csv", nullptr, &ds) == SICUT_ERROR_IO);
}

TEST_CASE("search, serialize and reload through the C API") {
    const auto planted = fixtures::planted_blobs(120);
    const auto data_path = temp_file("d.csv", fixtures::to_csv(planted.data));
    const auto emb_path = temp_file("e.csv", fixtures::to_csv(planted.embedding));

    sicut_dataset_t ds = nullptr;
    REQUIRE(sicut_dataset_load(data_path.c_str(), nullptr, &ds) == SICUT_OK);
    size_t n = 0, m = 0;
    sicut_dataset_shape(ds, &n, &m);
    CHECK(n == 120);
    CHECK(m == 10);
    const char* name = nullptr;
    CHECK(sicut_dataset_attribute_name(ds, 0, &name) == SICUT_OK);
    CHECK(std::string(name) == "signal0");

    sicut_embedding_t emb = nullptr;
    REQUIRE(sicut_embedding_load(emb_path.c_str(), n, &emb) == SICUT_OK);
    sicut_embedding_t short_emb = nullptr;
    CHECK(sicut_embedding_load(emb_path.c_str(), n + 1, &short_emb) == SICUT_ERROR_INGESTION);

    sicut_model_t model = nullptr;
    CHECK(sicut_model_create(ds, emb, "ward", 0.0, &model) == SICUT_ERROR_INVALID_ARGUMENT);
    REQUIRE(sicut_model_create(ds, emb, "single", 0.0, &model) == SICUT_OK);

    sicut_search_params params;
    sicut_params_default(&params);
    CHECK(params.alpha == 250.0);
    params.time_budget_ms = 5000;
    sicut_solution_t sol = nullptr;
    REQUIRE(sicut_model_search(model, &params, &sol) == SICUT_OK);
    sicut_solution_summary summary;
    sicut_solution_summary_get(sol, &summary);
    CHECK(summary.k == 3);
    CHECK(summary.si > 0.0);

    std::vector<size_t> labels(n);
    CHECK(sicut_solution_labels(sol, labels.data(), labels.size()) == SICUT_OK);
    CHECK(labels[0] != labels[1]);
    CHECK(labels[0] == labels[3]);

    char* text = nullptr;
    REQUIRE(sicut_solution_to_json(model, sol, &text) == SICUT_OK);
    sicut_solution_t reloaded = nullptr;
    REQUIRE(sicut_solution_from_json(model, text, &reloaded) == SICUT_OK);
    char* again = nullptr;
    REQUIRE(sicut_solution_to_json(model, reloaded, &again) == SICUT_OK);
    CHECK(std::string(text) == std::string(again));

    sicut_solution_t refined = nullptr;
    REQUIRE(sicut_model_refine(model, reloaded, &params, &refined) == SICUT_OK);
    sicut_solution_summary rs;
    sicut_solution_summary_get(refined, &rs);
    CHECK(rs.si >= summary.si);

    char* report = nullptr;
    REQUIRE(sicut_solution_report(model, sol, &report) == SICUT_OK);
    CHECK(std::string(report).find("cluster 2") != std::string::npos);

    params.alpha = -1.0;
    sicut_solution_t bad = nullptr;
    CHECK(sicut_model_search(model, &params, &bad) == SICUT_ERROR_INVALID_ARGUMENT);

    sicut_string_free(report);
    sicut_string_free(again);
    sicut_string_free(text);
    sicut_solution_free(refined);
    sicut_solution_free(reloaded);
    sicut_solution_free(sol);
    sicut_model_free(model);
    sicut_embedding_free(emb);
    sicut_dataset_free(ds);
}

TEST_CASE("row selection and pca") {
    sicut_dataset_t ds = nullptr;
    REQUIRE(sicut_dataset_parse("a,b\n1,2\n3,5\n4,4\n0,1\n", nullptr, &ds) == SICUT_OK);
    const size_t rows[] = {3, 1};
    sicut_dataset_t sub = nullptr;
    REQUIRE(sicut_dataset_select_rows(ds, rows, 2, &sub) == SICUT_OK);
    size_t n = 0;
    sicut_dataset_shape(sub, &n, nullptr);
    CHECK(n == 2);
    sicut_embedding_t emb = nullptr;
    REQUIRE(sicut_embedding_pca(ds, &emb) == SICUT_OK);
    double x = 0, y = 0;
    CHECK(sicut_embedding_point(emb, 0, &x, &y) == SICUT_OK);
    CHECK(sicut_embedding_point(emb, 4, &x, &y) == SICUT_ERROR_INVALID_ARGUMENT);
    const size_t bad_rows[] = {9};
    sicut_embedding_t bad = nullptr;
    CHECK(sicut_embedding_select_rows(emb, bad_rows, 1, &bad) == SICUT_ERROR_INVALID_ARGUMENT);
    sicut_embedding_free(emb);
    sicut_dataset_free(sub);
    sicut_dataset_free(ds);
}

TEST_CASE("server handle") {
    sicut_server_config config{"127.0.0.1", 0, nullptr, "single", 0};
    sicut_server_t srv = nullptr;
    REQUIRE(sicut_server_create(&config, &srv) == SICUT_OK);
    int port = 0;
    CHECK(sicut_server_bind(srv, &port) == SICUT_OK);
    CHECK(port > 0);
    sicut_server_free(srv);

    config.port = 70000;
    CHECK(sicut_server_create(&config, &srv) == SICUT_ERROR_INVALID_ARGUMENT);
}
