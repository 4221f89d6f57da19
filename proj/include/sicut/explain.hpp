#ifndef SICUT_EXPLAIN_HPP
#define SICUT_EXPLAIN_HPP

#include <string>
#include <vector>

#include "sicut/model.hpp"

namespace sicut {

struct AttributeExplanation {
    std::size_t index = 0;
    std::string name;
    AttributeType type = AttributeType::real;
    AttributeStatistics cluster;
    AttributeStatistics prior;
    /// |D| * KL in bits.
    double information = 0.0;
};

/// What a cluster looks like next to the full data. Attributes by decreasing information, ties by index.
struct ClusterExplanation {
    std::size_t cluster = 0;
    NodeId node = 0;
    std::size_t size = 0;
    double relative_size = 0.0;
    std::vector<AttributeExplanation> attributes;
};

std::vector<ClusterExplanation> explain(const ClusteringSolution& solution, const Dataset& data,
                                        const PriorModel& prior);

/// Plain-text summary: dashboard totals, then one block per cluster.
std::string format_report(const ClusteringSolution& solution, const Dataset& data, const PriorModel& prior);

}  // namespace sicut

#endif
