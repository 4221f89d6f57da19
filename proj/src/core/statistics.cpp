#include "sicut/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace sicut {

void SufficientStats::add_point(const Dataset& data, std::span<const double> centers, std::size_t point) {
    const auto row = data.row(point);
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (data.schema()[j].type == AttributeType::boolean) {
            first[j] += row[j];
        } else {
            const double d = row[j] - centers[j];
            first[j] += d;
            second[j] += d * d;
        }
    }
    ++count;
}

SufficientStats& SufficientStats::operator+=(const SufficientStats& other) {
    count += other.count;
    for (std::size_t j = 0; j < first.size(); ++j) {
        first[j] += other.first[j];
        second[j] += other.second[j];
    }
    return *this;
}

SufficientStats& SufficientStats::operator-=(const SufficientStats& other) {
    count -= other.count;
    for (std::size_t j = 0; j < first.size(); ++j) {
        first[j] -= other.first[j];
        second[j] -= other.second[j];
    }
    return *this;
}

namespace {

AttributeStatistics estimate_raw(AttributeType type, std::size_t count, double first, double second, double center,
                                 double floor) {
    const double n = static_cast<double>(count);
    if (type == AttributeType::boolean) {
        const double lo = 1.0 / (2.0 * n);
        return BooleanStat{std::clamp(first / n, lo, 1.0 - lo)};
    }
    const double shift = first / n;
    const double variance = std::max(second / n - shift * shift, floor);
    return RealStat{center + shift, std::sqrt(variance)};
}

}  // namespace

AttributeStatistics estimate(const Dataset& data, const PriorModel& prior, const SufficientStats& stats,
                             std::size_t j) {
    return estimate_raw(data.schema()[j].type, stats.count, stats.first[j], stats.second[j], prior.centers[j],
                        prior.variance_floor[j]);
}

AttributeStatistics estimate(const Dataset& data, const PriorModel& prior, std::size_t count, double first,
                             double second, std::size_t j) {
    return estimate_raw(data.schema()[j].type, count, first, second, prior.centers[j], prior.variance_floor[j]);
}

PriorModel fit_prior(const Dataset& data, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw Error(Errc::invalid_argument, "epsilon must be positive");
    }
    const std::size_t n = data.n();
    const std::size_t m = data.m();

    PriorModel prior;
    prior.epsilon = epsilon;
    prior.clamp = 1.0 / (2.0 * static_cast<double>(n));
    prior.centers.assign(m, 0.0);
    prior.variance_floor.assign(m, 0.0);

    for (std::size_t j = 0; j < m; ++j) {
        if (data.schema()[j].type == AttributeType::boolean) {
            continue;
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += data.at(i, j);
        }
        prior.centers[j] = sum / static_cast<double>(n);
    }

    SufficientStats all(m);
    for (std::size_t i = 0; i < n; ++i) {
        all.add_point(data, prior.centers, i);
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (data.schema()[j].type == AttributeType::boolean) {
            continue;
        }
        const double shift = all.first[j] / static_cast<double>(n);
        const double variance = std::max(all.second[j] / static_cast<double>(n) - shift * shift, 0.0);
        prior.variance_floor[j] = std::max(epsilon * variance, absolute_variance_floor);
    }

    prior.statistics.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        prior.statistics.push_back(estimate(data, prior, all, j));
    }
    return prior;
}

SufficientStats accumulate(const Dataset& data, const PriorModel& prior, std::span<const std::size_t> points) {
    std::vector<std::size_t> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    SufficientStats stats(data.m());
    for (auto p : sorted) {
        if (p >= data.n()) {
            throw Error(Errc::invalid_argument, "point index " + std::to_string(p) + " out of range");
        }
        stats.add_point(data, prior.centers, p);
    }
    return stats;
}

std::vector<AttributeStatistics> fit_cluster_statistics(const Dataset& data, const PriorModel& prior,
                                                        std::span<const std::size_t> points,
                                                        std::span<const std::size_t> attributes) {
    if (points.empty()) {
        throw Error(Errc::degenerate_cluster, "cannot fit statistics of an empty cluster");
    }
    const SufficientStats stats = accumulate(data, prior, points);
    std::vector<AttributeStatistics> out;
    out.reserve(attributes.size());
    for (auto j : attributes) {
        if (j >= data.m()) {
            throw Error(Errc::invalid_argument, "attribute index " + std::to_string(j) + " out of range");
        }
        out.push_back(estimate(data, prior, stats, j));
    }
    return out;
}

}  // namespace sicut
