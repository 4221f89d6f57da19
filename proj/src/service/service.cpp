#include "sicut/service.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "sicut/explain.hpp"
#include "sicut/hierarchy.hpp"
#include "sicut/ingestion.hpp"
#include "sicut/persistence.hpp"
#include "sicut/search.hpp"
#include "sicut/statistics.hpp"
#include "httplib.h"
#include "json.hpp"

namespace sicut {

using nlohmann::json;

namespace {

constexpr double max_alpha = 1000.0;
constexpr double max_beta = 2.0;
constexpr std::int64_t max_budget_ms = 600000;

struct Published {
    Hyperparameters hp;
    ClusteringSolution solution;
    SearchTrace trace;
};

struct Session {
    std::string id;
    Dataset data;
    Embedding embedding;
    Dendrogram dendrogram;
    PriorModel prior;
    Linkage linkage = Linkage::single;
    std::chrono::system_clock::time_point created;
    std::unique_ptr<SearchContext> context;

    std::mutex mu;
    Hyperparameters hp;
    std::shared_ptr<const Published> current;
    std::thread worker;

    std::atomic<bool> running{false};
    SearchProgress progress;

    std::shared_ptr<const Published> snapshot() {
        std::lock_guard lock(mu);
        return current;
    }
};

json statistic_json(const AttributeStatistics& s) {
    if (const auto* b = std::get_if<BooleanStat>(&s)) {
        return {{"frequency", b->frequency}};
    }
    const auto& r = std::get<RealStat>(s);
    return {{"mean", r.mean}, {"stdev", r.stdev}};
}

json explanation_json(const ClusterExplanation& ex) {
    json attrs = json::array();
    for (const auto& a : ex.attributes) {
        attrs.push_back({{"index", a.index},
                         {"name", a.name},
                         {"type", to_string(a.type)},
                         {"information", a.information},
                         {"cluster", statistic_json(a.cluster)},
                         {"prior", statistic_json(a.prior)}});
    }
    return {{"cluster", ex.cluster},
            {"node", ex.node},
            {"size", ex.size},
            {"relative_size", ex.relative_size},
            {"attributes", std::move(attrs)}};
}

json hyperparameters_json(const Hyperparameters& hp) {
    return {{"alpha", hp.alpha},
            {"beta", hp.beta},
            {"time_budget_ms", hp.time_budget_ms},
            {"linkage", to_string(hp.linkage)},
            {"epsilon", hp.epsilon},
            {"min_cluster_size", hp.min_cluster_size}};
}

json summary_json(const Session& s, const Published* pub) {
    json out = {{"id", s.id}, {"n", s.data.n()}, {"m", s.data.m()}, {"linkage", to_string(s.linkage)}};
    if (pub == nullptr) {
        out["solution"] = nullptr;
        return out;
    }
    const auto& sol = pub->solution;
    json sizes = json::array();
    for (const auto& p : sol.patterns) {
        sizes.push_back(p.points.size());
    }
    out["solution"] = {{"k", sol.k()},
                       {"attributes", sol.attribute_count()},
                       {"information", sol.total_information},
                       {"cluster_sizes", std::move(sizes)},
                       {"cluster_nodes", sol.cut_set},
                       {"labels", sol.labels(s.data.n())},
                       {"iterations", sol.iterations_completed},
                       {"budget_expired", pub->trace.budget_expired},
                       {"hyperparameters", hyperparameters_json(pub->hp)}};
    return out;
}

void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
    reply(res, status, {{"error", message}});
}

int status_for(Errc code) {
    switch (code) {
    case Errc::not_found:
        return 404;
    case Errc::conflict:
        return 409;
    default:
        return 400;
    }
}

std::string new_session_id() {
    static std::mutex mu;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mu);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    return buf;
}

}  // namespace

struct Service::Impl {
    ServiceConfig config;
    httplib::Server server;
    bool bound = false;
    int port = 0;

    std::mutex store_mu;
    std::map<std::string, std::shared_ptr<Session>> sessions;

    explicit Impl(ServiceConfig c) : config(std::move(c)) { routes(); }

    ~Impl() {
        server.stop();
        join_all();
    }

    void join_all() {
        std::vector<std::shared_ptr<Session>> all;
        {
            std::lock_guard lock(store_mu);
            for (auto& [id, s] : sessions) {
                all.push_back(s);
            }
        }
        for (auto& s : all) {
            std::thread t;
            {
                std::lock_guard lock(s->mu);
                t = std::move(s->worker);
            }
            if (t.joinable()) {
                t.join();
            }
        }
    }

    std::shared_ptr<Session> find(const std::string& id) {
        std::lock_guard lock(store_mu);
        auto it = sessions.find(id);
        if (it == sessions.end()) {
            throw Error(Errc::not_found, "unknown session '" + id + "'");
        }
        return it->second;
    }

    template <typename F>
    void guarded(httplib::Response& res, F&& body) {
        try {
            body();
        } catch (const Error& e) {
            fail(res, status_for(e.code()), e.what());
        } catch (const json::exception& e) {
            fail(res, 400, std::string("malformed request: ") + e.what());
        } catch (const std::exception& e) {
            fail(res, 500, e.what());
        }
    }

    void routes() {
        server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { create_session(req, res); });
        });
        server.Get(R"(/sessions/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto s = find(req.matches[1]);
                auto pub = s->snapshot();
                reply(res, 200, summary_json(*s, pub.get()));
            });
        });
        server.Post(R"(/sessions/([0-9a-f]+)/recalc)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { start_search(find(req.matches[1]), req, res, false); });
        });
        server.Post(R"(/sessions/([0-9a-f]+)/refine)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { start_search(find(req.matches[1]), req, res, true); });
        });
        server.Get(R"(/sessions/([0-9a-f]+)/status)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto s = find(req.matches[1]);
                auto pub = s->snapshot();
                reply(res, 200,
                      {{"running", s->running.load()},
                       {"iterations", s->progress.iterations.load()},
                       {"elapsed_ms", s->progress.elapsed_ms.load()},
                       {"has_solution", pub != nullptr}});
            });
        });
        server.Get(R"(/sessions/([0-9a-f]+)/embedding)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto s = find(req.matches[1]);
                auto pub = s->snapshot();
                std::vector<std::size_t> labels;
                if (pub) {
                    labels = pub->solution.labels(s->data.n());
                }
                json points = json::array();
                for (std::size_t i = 0; i < s->embedding.n(); ++i) {
                    points.push_back({{"index", i},
                                      {"x", s->embedding[i].x},
                                      {"y", s->embedding[i].y},
                                      {"label", pub ? json(labels[i]) : json(nullptr)}});
                }
                reply(res, 200,
                      {{"n", s->embedding.n()},
                       {"k", pub ? pub->solution.k() : 0},
                       {"cluster_nodes", pub ? json(pub->solution.cut_set) : json::array()},
                       {"points", std::move(points)}});
            });
        });
        server.Get(R"(/sessions/([0-9a-f]+)/explanations)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto s = find(req.matches[1]);
                auto pub = require_solution(*s);
                json clusters = json::array();
                for (const auto& ex : explain(pub->solution, s->data, s->prior)) {
                    clusters.push_back(explanation_json(ex));
                }
                reply(res, 200, {{"k", pub->solution.k()}, {"clusters", std::move(clusters)}});
            });
        });
        server.Get(R"(/sessions/([0-9a-f]+)/explanations/(\d+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       guarded(res, [&] {
                           auto s = find(req.matches[1]);
                           auto pub = require_solution(*s);
                           const auto c = std::stoull(req.matches[2]);
                           if (c >= pub->solution.k()) {
                               throw Error(Errc::not_found, "cluster " + std::to_string(c) + " does not exist");
                           }
                           const auto all = explain(pub->solution, s->data, s->prior);
                           reply(res, 200, explanation_json(all[c]));
                       });
                   });
        server.Get(R"(/sessions/([0-9a-f]+)/solution)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                auto s = find(req.matches[1]);
                auto pub = s->snapshot();
                SolutionDocument doc;
                {
                    std::lock_guard lock(s->mu);
                    doc.hyperparameters = s->hp;
                }
                if (pub) {
                    doc.hyperparameters = pub->hp;
                    doc.solution = pub->solution;
                    doc.trace = pub->trace;
                }
                res.status = 200;
                res.set_content(save_document(doc, s->data), "application/json");
            });
        });
    }

    static std::shared_ptr<const Published> require_solution(Session& s) {
        auto pub = s.snapshot();
        if (!pub) {
            throw Error(Errc::conflict, "session has no solution yet; run recalc first");
        }
        return pub;
    }

    void create_session(const httplib::Request& req, httplib::Response& res) {
        std::string dataset_text;
        std::string embedding_text = "pca";
        std::optional<SchemaSpec> schema;
        Linkage linkage = config.default_linkage;

        if (req.is_multipart_form_data()) {
            if (!req.has_file("dataset")) {
                throw Error(Errc::invalid_argument, "missing 'dataset' part");
            }
            dataset_text = req.get_file_value("dataset").content;
            if (req.has_file("embedding")) {
                embedding_text = req.get_file_value("embedding").content;
            }
            if (req.has_file("schema")) {
                schema = SchemaSpec::from_json(req.get_file_value("schema").content);
            }
            if (req.has_file("linkage")) {
                linkage = parse_linkage(req.get_file_value("linkage").content);
            }
        } else {
            const json body = json::parse(req.body);
            dataset_text = body.at("dataset").get<std::string>();
            if (body.contains("embedding") && !body["embedding"].is_null()) {
                embedding_text = body["embedding"].get<std::string>();
            }
            if (body.contains("schema") && !body["schema"].is_null()) {
                schema = SchemaSpec::from_json(body["schema"].is_string() ? body["schema"].get<std::string>()
                                                                          : body["schema"].dump());
            }
            if (body.contains("linkage")) {
                linkage = parse_linkage(body["linkage"].get<std::string>());
            }
        }

        auto loaded = parse_dataset(dataset_text, schema);
        auto session = std::make_shared<Session>();
        session->id = new_session_id();
        session->data = std::move(loaded.dataset);
        session->embedding = embedding_text == "pca" ? pca_embedding(session->data)
                                                     : parse_embedding(embedding_text, session->data.n());
        session->linkage = linkage;
        session->hp.linkage = linkage;
        session->dendrogram = build_dendrogram(session->embedding, linkage);
        session->prior = fit_prior(session->data, session->hp.epsilon);
        session->context = std::make_unique<SearchContext>(session->dendrogram, session->data, session->prior);
        session->created = std::chrono::system_clock::now();
        {
            std::lock_guard lock(store_mu);
            sessions[session->id] = session;
        }
        reply(res, 201,
              {{"id", session->id},
               {"n", session->data.n()},
               {"m", session->data.m()},
               {"linkage", to_string(linkage)},
               {"warnings", loaded.warnings}});
    }

    static Hyperparameters parse_parameters(const httplib::Request& req, Hyperparameters hp,
                                            std::optional<std::size_t>& cap) {
        const json body = req.body.empty() ? json::object() : json::parse(req.body);
        hp.alpha = body.value("alpha", hp.alpha);
        hp.beta = body.value("beta", hp.beta);
        hp.time_budget_ms = body.value("time_budget_ms", hp.time_budget_ms);
        hp.min_cluster_size = body.value("min_cluster_size", hp.min_cluster_size);
        if (body.contains("iteration_cap") && !body["iteration_cap"].is_null()) {
            cap = body["iteration_cap"].get<std::size_t>();
        }
        if (!(hp.alpha >= 0.0 && hp.alpha <= max_alpha)) {
            throw Error(Errc::invalid_argument, "alpha must lie in [0, 1000]");
        }
        if (!(hp.beta >= 1.0 && hp.beta <= max_beta)) {
            throw Error(Errc::invalid_argument, "beta must lie in [1, 2]");
        }
        if (hp.time_budget_ms <= 0 || hp.time_budget_ms > max_budget_ms) {
            throw Error(Errc::invalid_argument, "time_budget_ms must lie in (0, 600000]");
        }
        hp.validate();
        return hp;
    }

    void start_search(std::shared_ptr<Session> s, const httplib::Request& req, httplib::Response& res, bool refining) {
        std::optional<std::size_t> cap;
        Hyperparameters hp;
        {
            std::lock_guard lock(s->mu);
            hp = parse_parameters(req, s->hp, cap);
        }

        std::shared_ptr<const Published> previous;
        std::thread finished;
        {
            std::lock_guard lock(s->mu);
            if (s->running.load()) {
                throw Error(Errc::conflict, "a search is already running for this session");
            }
            previous = s->current;
            if (refining && !previous) {
                throw Error(Errc::conflict, "no current solution to refine; run recalc first");
            }
            s->running = true;
            s->progress.iterations = 0;
            s->progress.elapsed_ms = 0.0;
            finished = std::move(s->worker);
        }
        if (finished.joinable()) {
            finished.join();
        }

        auto job = [this, s, hp, cap, previous, refining] {
            try {
                SearchBudget budget = SearchBudget::from(hp, cap);
                budget.progress = &s->progress;
                auto [solution, trace] = refining ? refine(previous->solution, *s->context, hp, budget)
                                                  : greedy_search(*s->context, hp, budget);
                auto pub = std::make_shared<const Published>(Published{hp, std::move(solution), std::move(trace)});
                {
                    std::lock_guard lock(s->mu);
                    s->current = pub;
                    s->hp = hp;
                }
                persist(*s, *pub);
            } catch (...) {
                s->running = false;
                throw;
            }
            s->running = false;
        };

        if (hp.time_budget_ms > config.async_threshold_ms) {
            std::lock_guard lock(s->mu);
            s->worker = std::thread([job] {
                try {
                    job();
                } catch (...) {
                }
            });
            reply(res, 202, {{"status", "running"}, {"id", s->id}});
            return;
        }
        job();
        auto pub = s->snapshot();
        reply(res, 200, summary_json(*s, pub.get()));
    }

    void persist(const Session& s, const Published& pub) const {
        if (config.session_dir.empty()) {
            return;
        }
        SolutionDocument doc{pub.hp, pub.solution, pub.trace};
        std::filesystem::create_directories(config.session_dir);
        write_file((std::filesystem::path(config.session_dir) / (s.id + ".json")).string(), save_document(doc, s.data));
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() = default;

int Service::bind() {
    if (impl_->bound) {
        return impl_->port;
    }
    if (impl_->config.port == 0) {
        impl_->port = impl_->server.bind_to_any_port(impl_->config.host);
    } else {
        impl_->port = impl_->server.bind_to_port(impl_->config.host, impl_->config.port) ? impl_->config.port : -1;
    }
    if (impl_->port < 0) {
        throw Error(Errc::io, "cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
    }
    impl_->bound = true;
    return impl_->port;
}

void Service::listen() {
    bind();
    impl_->server.listen_after_bind();
}

void Service::stop() { impl_->server.stop(); }

void Service::wait_idle() { impl_->join_all(); }

}  // namespace sicut
