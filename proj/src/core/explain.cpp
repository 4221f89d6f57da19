#include "sicut/explain.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "sicut/infotheory.hpp"

namespace sicut {

std::vector<ClusterExplanation> explain(const ClusteringSolution& solution, const Dataset& data,
                                        const PriorModel& prior) {
    std::vector<ClusterExplanation> out;
    out.reserve(solution.patterns.size());
    for (std::size_t c = 0; c < solution.patterns.size(); ++c) {
        const auto& pattern = solution.patterns[c];
        ClusterExplanation ex;
        ex.cluster = c;
        ex.node = c < solution.cut_set.size() ? solution.cut_set[c] : 0;
        ex.size = pattern.points.size();
        ex.relative_size = static_cast<double>(ex.size) / static_cast<double>(data.n());
        for (std::size_t a = 0; a < pattern.attributes.size(); ++a) {
            const std::size_t j = pattern.attributes[a];
            AttributeExplanation attr;
            attr.index = j;
            attr.name = data.attribute(j).name;
            attr.type = data.attribute(j).type;
            attr.cluster = pattern.statistics[a];
            attr.prior = prior.statistics[j];
            attr.information = static_cast<double>(ex.size) * kl_statistics(attr.cluster, attr.prior);
            ex.attributes.push_back(std::move(attr));
        }
        std::stable_sort(ex.attributes.begin(), ex.attributes.end(), [](const auto& a, const auto& b) {
            return a.information != b.information ? a.information > b.information : a.index < b.index;
        });
        out.push_back(std::move(ex));
    }
    return out;
}

namespace {

std::string describe(const AttributeStatistics& s) {
    char buf[96];
    if (const auto* b = std::get_if<BooleanStat>(&s)) {
        std::snprintf(buf, sizeof buf, "freq %.3f", b->frequency);
    } else {
        const auto& r = std::get<RealStat>(s);
        std::snprintf(buf, sizeof buf, "mean %.4g sd %.4g", r.mean, r.stdev);
    }
    return buf;
}

}  // namespace

std::string format_report(const ClusteringSolution& solution, const Dataset& data, const PriorModel& prior) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "clusters: %zu  attributes: %zu  information: %.3f bits  si: %.6f\n",
                  solution.k(), solution.attribute_count(), solution.total_information, solution.si);
    os << line;
    for (const auto& ex : explain(solution, data, prior)) {
        std::snprintf(line, sizeof line, "\ncluster %zu  (node %zu)  size %zu  (%.1f%%)\n", ex.cluster, ex.node, ex.size,
                      100.0 * ex.relative_size);
        os << line;
        for (const auto& a : ex.attributes) {
            std::snprintf(line, sizeof line, "  %-24s %-7s cluster %-26s prior %-26s info %.3f bits\n",
                          a.name.c_str(), to_string(a.type), describe(a.cluster).c_str(), describe(a.prior).c_str(),
                          a.information);
            os << line;
        }
    }
    return os.str();
}

}  // namespace sicut
