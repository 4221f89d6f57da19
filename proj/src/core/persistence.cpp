#include "sicut/persistence.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>

#include "json.hpp"

namespace sicut {

using nlohmann::json;

std::string schema_hash(const Dataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* bytes, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(bytes);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t n = data.n();
    const std::uint64_t m = data.m();
    mix(&n, sizeof n);
    mix(&m, sizeof m);
    for (const auto& a : data.schema()) {
        mix(a.name.data(), a.name.size());
        const char sep[2] = {'\0', static_cast<char>(a.type)};
        mix(sep, sizeof sep);
    }
    for (double v : data.values()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        mix(&bits, sizeof bits);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

namespace {

void write_canonical(const json& value, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (value.type()) {
    case json::value_t::object: {
        if (value.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = value.begin(); it != value.end(); ++it) {
            if (!first) {
                out += ",\n";
            }
            first = false;
            out += pad + json(it.key()).dump() + ": ";
            write_canonical(it.value(), out, indent + 2);
        }
        out += "\n" + close + "}";
        return;
    }
    case json::value_t::array: {
        if (value.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (i != 0) {
                out += ",\n";
            }
            out += pad;
            write_canonical(value[i], out, indent + 2);
        }
        out += "\n" + close + "]";
        return;
    }
    case json::value_t::number_float: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", value.get<double>());
        out += buf;
        return;
    }
    default:
        out += value.dump();
        return;
    }
}

json statistic_json(const AttributeStatistics& s) {
    if (const auto* b = std::get_if<BooleanStat>(&s)) {
        return {{"type", "boolean"}, {"frequency", b->frequency}};
    }
    const auto& r = std::get<RealStat>(s);
    return {{"type", "real"}, {"mean", r.mean}, {"stdev", r.stdev}};
}

AttributeStatistics statistic_from_json(const json& j, AttributeType expected) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "boolean" && expected == AttributeType::boolean) {
        return BooleanStat{j.at("frequency").get<double>()};
    }
    if (type == "real" && expected == AttributeType::real) {
        return RealStat{j.at("mean").get<double>(), j.at("stdev").get<double>()};
    }
    throw Error(Errc::invalid_argument, "statistic type '" + type + "' does not match the dataset schema");
}

json hyperparameters_json(const Hyperparameters& hp) {
    return {{"alpha", hp.alpha},
            {"beta", hp.beta},
            {"time_budget_ms", hp.time_budget_ms},
            {"linkage", to_string(hp.linkage)},
            {"epsilon", hp.epsilon},
            {"min_cluster_size", hp.min_cluster_size}};
}

Hyperparameters hyperparameters_from_json(const json& j) {
    Hyperparameters hp;
    hp.alpha = j.at("alpha").get<double>();
    hp.beta = j.at("beta").get<double>();
    hp.time_budget_ms = j.at("time_budget_ms").get<std::int64_t>();
    hp.linkage = parse_linkage(j.at("linkage").get<std::string>());
    hp.epsilon = j.at("epsilon").get<double>();
    hp.min_cluster_size = j.at("min_cluster_size").get<std::size_t>();
    return hp;
}

}  // namespace

std::string save_document(const SolutionDocument& doc, const Dataset& data) {
    json root;
    root["version"] = document_version;
    root["schema_hash"] = schema_hash(data);
    root["n"] = data.n();
    root["m"] = data.m();
    root["hyperparameters"] = hyperparameters_json(doc.hyperparameters);

    json cutset = json::array();
    json labels = json::array();
    json patterns = json::array();
    json scores = nullptr;
    if (doc.solution) {
        const auto& sol = *doc.solution;
        for (auto id : sol.cut_set) {
            cutset.push_back(id);
        }
        for (auto l : sol.labels(data.n())) {
            labels.push_back(l);
        }
        for (std::size_t c = 0; c < sol.patterns.size(); ++c) {
            const auto& p = sol.patterns[c];
            json attrs = json::array();
            for (std::size_t a = 0; a < p.attributes.size(); ++a) {
                json entry = statistic_json(p.statistics[a]);
                entry["index"] = p.attributes[a];
                entry["name"] = data.attribute(p.attributes[a]).name;
                attrs.push_back(std::move(entry));
            }
            patterns.push_back({{"cluster", c},
                                {"node", c < sol.cut_set.size() ? json(sol.cut_set[c]) : json(nullptr)},
                                {"size", p.points.size()},
                                {"attributes", std::move(attrs)}});
        }
        scores = {{"information", sol.total_information},
                  {"complexity", sol.complexity},
                  {"si", sol.si},
                  {"k", sol.k()},
                  {"attributes", sol.attribute_count()}};
    }
    root["cutset"] = std::move(cutset);
    root["labels"] = std::move(labels);
    root["patterns"] = std::move(patterns);
    root["scores"] = std::move(scores);

    json records = json::array();
    for (const auto& r : doc.trace.records) {
        records.push_back({{"k", r.k}, {"si", r.si}, {"elapsed_ms", r.elapsed_ms}});
    }
    root["trace"] = {{"records", std::move(records)},
                     {"budget_expired", doc.trace.budget_expired},
                     {"iterations_completed", doc.solution ? doc.solution->iterations_completed : 0}};

    std::string out;
    write_canonical(root, out, 0);
    out += "\n";
    return out;
}

SolutionDocument load_document(const std::string& text, const Dataset& data, const Dendrogram& d) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_argument, std::string("solution document is not valid JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("version") || !root["version"].is_number_integer() ||
        root["version"].get<int>() != document_version) {
        throw Error(Errc::version_mismatch,
                    "unsupported solution document version (expected " + std::to_string(document_version) + ")");
    }
    if (root.value("schema_hash", std::string()) != schema_hash(data)) {
        throw Error(Errc::schema_mismatch, "solution document was written for a different dataset");
    }

    try {
        SolutionDocument doc;
        doc.hyperparameters = hyperparameters_from_json(root.at("hyperparameters"));

        const auto& trace = root.at("trace");
        for (const auto& r : trace.at("records")) {
            doc.trace.records.push_back(
                {r.at("k").get<std::size_t>(), r.at("si").get<double>(), r.at("elapsed_ms").get<double>()});
        }
        doc.trace.budget_expired = trace.at("budget_expired").get<bool>();

        const auto& cutset = root.at("cutset");
        if (cutset.empty()) {
            return doc;
        }
        if (d.n_points() != data.n()) {
            throw Error(Errc::invalid_argument, "dendrogram does not belong to this dataset");
        }
        ClusteringSolution sol;
        for (const auto& id : cutset) {
            sol.cut_set.push_back(id.get<NodeId>());
        }
        const auto clusters = clusters_from_cutset(d, CutSet(sol.cut_set));
        const auto& labels = root.at("labels");
        if (labels.size() != data.n()) {
            throw Error(Errc::invalid_argument, "label count does not match the dataset");
        }
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            for (auto p : clusters[c]) {
                if (labels[p].get<std::size_t>() != c) {
                    throw Error(Errc::invalid_argument, "labels do not match the cut-set on this dendrogram");
                }
            }
        }
        const auto& patterns = root.at("patterns");
        if (patterns.size() != clusters.size()) {
            throw Error(Errc::invalid_argument, "pattern count does not match the cut-set");
        }
        for (std::size_t c = 0; c < clusters.size(); ++c) {
            BiclusterPattern p;
            p.points = clusters[c];
            for (const auto& a : patterns[c].at("attributes")) {
                const auto j = a.at("index").get<std::size_t>();
                if (j >= data.m()) {
                    throw Error(Errc::invalid_argument, "attribute index out of range");
                }
                p.attributes.push_back(j);
                p.statistics.push_back(statistic_from_json(a, data.attribute(j).type));
            }
            sol.patterns.push_back(std::move(p));
        }
        const auto& scores = root.at("scores");
        sol.total_information = scores.at("information").get<double>();
        sol.complexity = scores.at("complexity").get<double>();
        sol.si = scores.at("si").get<double>();
        sol.iterations_completed = trace.at("iterations_completed").get<std::size_t>();
        doc.solution = std::move(sol);
        return doc;
    } catch (const json::exception& e) {
        throw Error(Errc::invalid_argument, std::string("malformed solution document: ") + e.what());
    }
}

}  // namespace sicut
