#ifndef SICUT_INFOTHEORY_HPP
#define SICUT_INFOTHEORY_HPP

#include <span>
#include <vector>

#include "sicut/model.hpp"

namespace sicut {

/// All quantities are in bits; information content is in bits times points.
struct Score {
    double information = 0.0;
    double complexity = 1.0;
    double si = 0.0;
};

/// KL(Bernoulli(p) || Bernoulli(q)). Both frequencies must lie strictly inside (0, 1).
double kl_bernoulli(double p, double q);

/// KL(N(mean1, stdev1^2) || N(mean0, stdev0^2)). Both deviations must be positive.
double kl_gaussian(double mean1, double stdev1, double mean0, double stdev0);

/// KL between the maximum-entropy models of two statistics of the same attribute type.
double kl_statistics(const AttributeStatistics& cluster, const AttributeStatistics& prior);

/**
 * |D| times the summed KL divergence of each pattern attribute against the prior.
 */
double pattern_information(const BiclusterPattern& pattern, const PriorModel& prior);

/// alpha + T^beta, T the total number of statistics (1 per boolean, 2 per real attribute).
double description_complexity(std::span<const BiclusterPattern> patterns, const Dataset& data, double alpha,
                              double beta);

/// alpha + T^beta for a precomputed statistic count.
double description_complexity(double statistic_total, double alpha, double beta) noexcept;

/**
 * Information over complexity of a set of patterns.
 *
 * Throws `Error(Errc::invalid_argument)` unless the pattern point sets partition {0..n-1}.
 */
Score subjective_interestingness(std::span<const BiclusterPattern> patterns, const Dataset& data,
                                 const PriorModel& prior, const Hyperparameters& hp);

}  // namespace sicut

#endif
