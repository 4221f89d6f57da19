#include "sicut/infotheory.hpp"

#include <cmath>
#include <numbers>

namespace sicut {

double kl_bernoulli(double p, double q) {
    if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0)) {
        throw Error(Errc::invalid_argument, "Bernoulli KL needs frequencies strictly inside (0, 1)");
    }
    const double kl = p * std::log2(p / q) + (1.0 - p) * std::log2((1.0 - p) / (1.0 - q));
    // Rounding can push the result a hair below zero near p == q.
    return kl > 0.0 ? kl : 0.0;
}

double kl_gaussian(double mean1, double stdev1, double mean0, double stdev0) {
    if (!(stdev1 > 0.0) || !(stdev0 > 0.0)) {
        throw Error(Errc::invalid_argument, "Gaussian KL needs positive standard deviations");
    }
    const double diff = mean1 - mean0;
    const double nats =
        std::log(stdev0 / stdev1) + (stdev1 * stdev1 + diff * diff) / (2.0 * stdev0 * stdev0) - 0.5;
    const double kl = nats / std::numbers::ln2;
    return kl > 0.0 ? kl : 0.0;
}

double kl_statistics(const AttributeStatistics& cluster, const AttributeStatistics& prior) {
    if (const auto* c = std::get_if<BooleanStat>(&cluster)) {
        const auto* p = std::get_if<BooleanStat>(&prior);
        if (p == nullptr) {
            throw Error(Errc::invalid_argument, "statistic type mismatch");
        }
        return kl_bernoulli(c->frequency, p->frequency);
    }
    const auto& c = std::get<RealStat>(cluster);
    const auto* p = std::get_if<RealStat>(&prior);
    if (p == nullptr) {
        throw Error(Errc::invalid_argument, "statistic type mismatch");
    }
    return kl_gaussian(c.mean, c.stdev, p->mean, p->stdev);
}

double pattern_information(const BiclusterPattern& pattern, const PriorModel& prior) {
    if (pattern.attributes.size() != pattern.statistics.size()) {
        throw Error(Errc::invalid_argument, "pattern statistics are not aligned with its attributes");
    }
    double kl = 0.0;
    for (std::size_t a = 0; a < pattern.attributes.size(); ++a) {
        kl += kl_statistics(pattern.statistics[a], prior.statistics.at(pattern.attributes[a]));
    }
    return static_cast<double>(pattern.points.size()) * kl;
}

double description_complexity(double statistic_total, double alpha, double beta) noexcept {
    return alpha + std::pow(statistic_total, beta);
}

double description_complexity(std::span<const BiclusterPattern> patterns, const Dataset& data, double alpha,
                              double beta) {
    double total = 0.0;
    for (const auto& p : patterns) {
        for (auto j : p.attributes) {
            total += statistic_count(data.attribute(j).type);
        }
    }
    return description_complexity(total, alpha, beta);
}

Score subjective_interestingness(std::span<const BiclusterPattern> patterns, const Dataset& data,
                                 const PriorModel& prior, const Hyperparameters& hp) {
    std::vector<char> seen(data.n(), 0);
    std::size_t covered = 0;
    for (const auto& p : patterns) {
        for (auto i : p.points) {
            if (i >= data.n() || seen[i] != 0) {
                throw Error(Errc::invalid_argument, "patterns do not partition the points");
            }
            seen[i] = 1;
            ++covered;
        }
    }
    if (covered != data.n()) {
        throw Error(Errc::invalid_argument, "patterns do not cover every point");
    }

    Score score;
    for (const auto& p : patterns) {
        score.information += pattern_information(p, prior);
    }
    score.complexity = description_complexity(patterns, data, hp.alpha, hp.beta);
    score.si = score.complexity > 0.0 ? score.information / score.complexity : 0.0;
    return score;
}

}  // namespace sicut
