// Command-line front-end: run, sweep, bench and serve. Uses only the C API.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sicut/sicut.h"

namespace {

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(int rc, const std::string& what) {
    if (rc != SICUT_OK) {
        throw Failure(what + ": " + sicut_error_description(rc) + ": " + sicut_last_error());
    }
}

struct DatasetDeleter {
    void operator()(sicut_dataset_s* p) const { sicut_dataset_free(p); }
};
struct EmbeddingDeleter {
    void operator()(sicut_embedding_s* p) const { sicut_embedding_free(p); }
};
struct ModelDeleter {
    void operator()(sicut_model_s* p) const { sicut_model_free(p); }
};
struct SolutionDeleter {
    void operator()(sicut_solution_s* p) const { sicut_solution_free(p); }
};
struct StringDeleter {
    void operator()(char* p) const { sicut_string_free(p); }
};

using DatasetPtr = std::unique_ptr<sicut_dataset_s, DatasetDeleter>;
using EmbeddingPtr = std::unique_ptr<sicut_embedding_s, EmbeddingDeleter>;
using ModelPtr = std::unique_ptr<sicut_model_s, ModelDeleter>;
using SolutionPtr = std::unique_ptr<sicut_solution_s, SolutionDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

struct InputOptions {
    std::string data;
    std::string embedding;
    std::string schema;
    bool pca = false;
    std::string linkage = "single";
};

struct Inputs {
    DatasetPtr dataset;
    EmbeddingPtr embedding;
    std::size_t n = 0;
    std::size_t m = 0;
};

void add_input_options(CLI::App* cmd, InputOptions& opt) {
    cmd->add_option("--data", opt.data, "CSV dataset with a header row")->required()->check(CLI::ExistingFile);
    auto* emb = cmd->add_option("--embedding", opt.embedding, "CSV with two coordinate columns, one row per point")
                    ->check(CLI::ExistingFile);
    auto* pca = cmd->add_flag("--pca", opt.pca, "embed with the first two principal components");
    emb->excludes(pca);
    cmd->add_option("--schema", opt.schema, "JSON file declaring column types")->check(CLI::ExistingFile);
    cmd->add_option("--linkage", opt.linkage, "dendrogram linkage")
        ->check(CLI::IsMember({"single", "complete", "average"}));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Failure("cannot read " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Failure("cannot write " + path);
    }
}

Inputs load_inputs(const InputOptions& opt) {
    if (opt.embedding.empty() && !opt.pca) {
        throw CLI::ValidationError("one of --embedding or --pca is required");
    }
    Inputs in;
    const std::string schema = opt.schema.empty() ? std::string() : slurp(opt.schema);
    sicut_dataset_t ds = nullptr;
    check(sicut_dataset_load(opt.data.c_str(), schema.empty() ? nullptr : schema.c_str(), &ds), "loading data");
    in.dataset.reset(ds);
    check(sicut_dataset_shape(ds, &in.n, &in.m), "reading shape");

    std::size_t warnings = 0;
    sicut_dataset_warning_count(ds, &warnings);
    for (std::size_t i = 0; i < warnings; ++i) {
        const char* w = nullptr;
        sicut_dataset_warning(ds, i, &w);
        std::cerr << "warning: " << w << "\n";
    }

    sicut_embedding_t emb = nullptr;
    if (opt.pca) {
        check(sicut_embedding_pca(ds, &emb), "computing PCA embedding");
    } else {
        check(sicut_embedding_load(opt.embedding.c_str(), in.n, &emb), "loading embedding");
    }
    in.embedding.reset(emb);
    return in;
}

ModelPtr make_model(const Inputs& in, const std::string& linkage) {
    sicut_model_t model = nullptr;
    check(sicut_model_create(in.dataset.get(), in.embedding.get(), linkage.c_str(), 0.0, &model), "building model");
    return ModelPtr(model);
}

SolutionPtr search(sicut_model_t model, const sicut_search_params& params) {
    sicut_solution_t sol = nullptr;
    check(sicut_model_search(model, &params, &sol), "searching");
    return SolutionPtr(sol);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw CLI::ValidationError(flag, "'" + item + "' is not a number");
        }
    }
    if (out.empty()) {
        throw CLI::ValidationError(flag, "empty list");
    }
    return out;
}

// Shortest decimal that reads back as the same double.
std::string format_double(double v) {
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) {
            break;
        }
    }
    return buf;
}

struct RunOptions {
    InputOptions input;
    double alpha = 250.0;
    double beta = 1.6;
    std::int64_t time_limit = 5000;
    std::size_t iteration_cap = 0;
    std::size_t min_cluster_size = 1;
    std::string out;
};

int run(const RunOptions& opt) {
    const auto in = load_inputs(opt.input);
    auto model = make_model(in, opt.input.linkage);
    sicut_search_params params;
    sicut_params_default(&params);
    params.alpha = opt.alpha;
    params.beta = opt.beta;
    params.time_budget_ms = opt.time_limit;
    params.iteration_cap = opt.iteration_cap;
    params.min_cluster_size = opt.min_cluster_size;
    auto sol = search(model.get(), params);

    char* raw = nullptr;
    check(sicut_solution_to_json(model.get(), sol.get(), &raw), "serializing");
    StringPtr doc(raw);
    check(sicut_solution_report(model.get(), sol.get(), &raw), "writing report");
    StringPtr report(raw);

    spill(opt.out, doc.get());
    spill(opt.out + ".txt", report.get());
    std::cout << report.get();
    return 0;
}

struct SweepOptions {
    InputOptions input;
    std::string alpha_grid;
    std::string beta_grid;
    std::int64_t time_limit = 5000;
    std::size_t iteration_cap = 0;
    std::string out;
};

int sweep(const SweepOptions& opt) {
    const auto alphas = parse_list(opt.alpha_grid, "--alpha-grid");
    const auto betas = parse_list(opt.beta_grid, "--beta-grid");
    for (double a : alphas) {
        if (a < 0.0) {
            throw CLI::ValidationError("--alpha-grid", "alpha must be non-negative");
        }
    }
    for (double b : betas) {
        if (b < 1.0) {
            throw CLI::ValidationError("--beta-grid", "beta must be at least 1");
        }
    }
    const auto in = load_inputs(opt.input);
    auto model = make_model(in, opt.input.linkage);

    std::ostringstream table;
    table << "alpha,beta,k,attributes,information,si,iterations,budget_expired\n";
    for (double beta : betas) {
        for (double alpha : alphas) {
            sicut_search_params params;
            sicut_params_default(&params);
            params.alpha = alpha;
            params.beta = beta;
            params.time_budget_ms = opt.time_limit;
            params.iteration_cap = opt.iteration_cap;
            auto sol = search(model.get(), params);
            sicut_solution_summary s;
            check(sicut_solution_summary_get(sol.get(), &s), "summarizing");
            table << format_double(alpha) << ',' << format_double(beta) << ',' << s.k << ',' << s.attributes << ','
                  << format_double(s.information) << ',' << format_double(s.si) << ',' << s.iterations << ','
                  << s.budget_expired << "\n";
        }
    }
    spill(opt.out, table.str());
    std::cout << table.str();
    return 0;
}

struct BenchOptions {
    InputOptions input;
    std::string time_limits;
    std::string subsample;
    std::uint64_t seed = 0;
    std::string out;
};

int bench(const BenchOptions& opt) {
    const auto limits = parse_list(opt.time_limits, "--time-limits");
    for (double l : limits) {
        if (!(l > 0.0)) {
            throw CLI::ValidationError("--time-limits", "limits must be positive");
        }
    }
    const auto full = load_inputs(opt.input);
    std::vector<std::size_t> sizes{full.n};
    if (!opt.subsample.empty()) {
        sizes.clear();
        for (double s : parse_list(opt.subsample, "--subsample")) {
            if (s < 2.0 || s != static_cast<double>(static_cast<std::size_t>(s))) {
                throw CLI::ValidationError("--subsample", "sizes must be integers of at least 2");
            }
            sizes.push_back(std::min(full.n, static_cast<std::size_t>(s)));
        }
    }

    std::vector<std::size_t> order(full.n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(opt.seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::ostringstream table;
    table << "n,m,time_limit_ms,iterations,k,budget_expired\n";
    for (std::size_t size : sizes) {
        Inputs in;
        if (size == full.n) {
            sicut_dataset_t ds = nullptr;
            sicut_embedding_t emb = nullptr;
            std::vector<std::size_t> all(full.n);
            std::iota(all.begin(), all.end(), std::size_t{0});
            check(sicut_dataset_select_rows(full.dataset.get(), all.data(), all.size(), &ds), "copying data");
            in.dataset.reset(ds);
            check(sicut_embedding_select_rows(full.embedding.get(), all.data(), all.size(), &emb), "copying embedding");
            in.embedding.reset(emb);
        } else {
            std::vector<std::size_t> rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size));
            std::sort(rows.begin(), rows.end());
            sicut_dataset_t ds = nullptr;
            sicut_embedding_t emb = nullptr;
            check(sicut_dataset_select_rows(full.dataset.get(), rows.data(), rows.size(), &ds), "subsampling data");
            in.dataset.reset(ds);
            check(sicut_embedding_select_rows(full.embedding.get(), rows.data(), rows.size(), &emb),
                  "subsampling embedding");
            in.embedding.reset(emb);
        }
        check(sicut_dataset_shape(in.dataset.get(), &in.n, &in.m), "reading shape");
        auto model = make_model(in, opt.input.linkage);
        for (double limit : limits) {
            sicut_search_params params;
            sicut_params_default(&params);
            params.time_budget_ms = static_cast<std::int64_t>(limit);
            auto sol = search(model.get(), params);
            sicut_solution_summary s;
            check(sicut_solution_summary_get(sol.get(), &s), "summarizing");
            table << in.n << ',' << in.m << ',' << params.time_budget_ms << ',' << s.iterations << ',' << s.k << ','
                  << s.budget_expired << "\n";
        }
    }
    spill(opt.out, table.str());
    std::cout << table.str();
    return 0;
}

struct ServeOptions {
    std::string listen = "127.0.0.1:8080";
    std::string session_dir;
    std::string linkage = "single";
    std::int64_t async_threshold_ms = 2000;
};

int serve(const ServeOptions& opt) {
    const auto colon = opt.listen.rfind(':');
    if (colon == std::string::npos) {
        throw CLI::ValidationError("--listen", "expected host:port");
    }
    const std::string host = opt.listen.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(opt.listen.substr(colon + 1));
    } catch (const std::exception&) {
        throw CLI::ValidationError("--listen", "port is not a number");
    }

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    sicut_server_config config{host.c_str(), port, opt.session_dir.c_str(), opt.linkage.c_str(),
                                opt.async_threshold_ms};
    sicut_server_t srv = nullptr;
    check(sicut_server_create(&config, &srv), "creating server");
    std::unique_ptr<sicut_server_s, void (*)(sicut_server_t)> guard(srv, sicut_server_free);
    int bound = 0;
    check(sicut_server_bind(srv, &bound), "binding");
    std::cerr << "listening on " << host << ":" << bound << std::endl;

    std::thread waiter([srv, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        sicut_server_stop(srv);
    });
    const int rc = sicut_server_listen(srv);
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    check(rc, "serving");
    return 0;
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interpretable clustering of embedded data by cutting a dendrogram"};
    app.require_subcommand(1);
    app.set_version_flag("--version", sicut_version());

    RunOptions run_opt;
    auto* run_cmd = app.add_subcommand("run", "search one solution and write it with a report");
    add_input_options(run_cmd, run_opt.input);
    run_cmd->add_option("--alpha", run_opt.alpha, "complexity offset")->check(CLI::Range(0.0, 1e12));
    run_cmd->add_option("--beta", run_opt.beta, "complexity exponent")->check(CLI::Range(1.0, 1e12));
    run_cmd->add_option("--time-limit", run_opt.time_limit, "search budget in milliseconds")
        ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
    run_cmd->add_option("--iteration-cap", run_opt.iteration_cap, "maximum recorded iterations, k = 1 included")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--min-cluster-size", run_opt.min_cluster_size, "smallest cluster a split may create")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", run_opt.out, "solution document; the report goes to <out>.txt")->required();

    SweepOptions sweep_opt;
    auto* sweep_cmd = app.add_subcommand("sweep", "search every (alpha, beta) pair on one model");
    add_input_options(sweep_cmd, sweep_opt.input);
    sweep_cmd->add_option("--alpha-grid", sweep_opt.alpha_grid, "comma-separated alphas")->required();
    sweep_cmd->add_option("--beta-grid", sweep_opt.beta_grid, "comma-separated betas")->required();
    sweep_cmd->add_option("--time-limit", sweep_opt.time_limit, "budget per cell in milliseconds")
        ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
    sweep_cmd->add_option("--iteration-cap", sweep_opt.iteration_cap, "maximum recorded iterations per cell")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out", sweep_opt.out, "CSV table")->required();

    BenchOptions bench_opt;
    auto* bench_cmd = app.add_subcommand("bench", "count iterations reached within each time limit");
    add_input_options(bench_cmd, bench_opt.input);
    bench_cmd->add_option("--time-limits", bench_opt.time_limits, "comma-separated limits in milliseconds")
        ->required();
    bench_cmd->add_option("--subsample", bench_opt.subsample, "comma-separated row counts drawn without replacement");
    bench_cmd->add_option("--seed", bench_opt.seed, "subsampling seed");
    bench_cmd->add_option("--out", bench_opt.out, "CSV table")->required();

    ServeOptions serve_opt;
    serve_opt.listen = env_or("SICUT_LISTEN", serve_opt.listen);
    serve_opt.session_dir = env_or("SICUT_SESSION_DIR", serve_opt.session_dir);
    serve_opt.linkage = env_or("SICUT_LINKAGE", serve_opt.linkage);
    auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP API");
    serve_cmd->add_option("--listen", serve_opt.listen, "host:port (env SICUT_LISTEN)");
    serve_cmd->add_option("--session-dir", serve_opt.session_dir, "directory for solution documents");
    serve_cmd->add_option("--linkage", serve_opt.linkage, "default linkage")
        ->check(CLI::IsMember({"single", "complete", "average"}));
    serve_cmd->add_option("--async-threshold", serve_opt.async_threshold_ms,
                          "budgets above this many milliseconds run in the background")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) {
            return run(run_opt);
        }
        if (sweep_cmd->parsed()) {
            return sweep(sweep_opt);
        }
        if (bench_cmd->parsed()) {
            return bench(bench_opt);
        }
        return serve(serve_opt);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
