#ifndef SICUT_STATISTICS_HPP
#define SICUT_STATISTICS_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "sicut/model.hpp"

namespace sicut {

/**
 * @brief Additive per-attribute moments of a point set.
 *
 * For real attributes `first` and `second` hold the sums of (x - c) and (x - c)^2, where c is the
 * global attribute mean stored in the prior. For boolean attributes `first` counts the ones and
 * `second` is unused. Centring keeps the subtraction-based variance well conditioned.
 */
struct SufficientStats {
    std::size_t count = 0;
    std::vector<double> first;
    std::vector<double> second;

    explicit SufficientStats(std::size_t m = 0) : first(m, 0.0), second(m, 0.0) {}

    void add_point(const Dataset& data, std::span<const double> centers, std::size_t point);
    SufficientStats& operator+=(const SufficientStats& other);
    SufficientStats& operator-=(const SufficientStats& other);
};

/// Default relative variance floor.
inline constexpr double default_epsilon = 1e-4;
/// Absolute lower bound on any fitted variance.
inline constexpr double absolute_variance_floor = 1e-12;

/**
 * Fits the prior on every point, in index order.
 *
 * Real attributes get the population mean and variance, floored at
 * max(epsilon * global variance, 1e-12). Boolean frequencies are clamped to [1/(2n), 1 - 1/(2n)].
 */
PriorModel fit_prior(const Dataset& data, double epsilon = default_epsilon);

/**
 * Statistics of `attributes` over `points`, with the same estimator and floor policy as the prior.
 * Points are accumulated in ascending index order, so the result is independent of their order.
 *
 * Throws `Error(Errc::degenerate_cluster)` for an empty point set.
 */
std::vector<AttributeStatistics> fit_cluster_statistics(const Dataset& data, const PriorModel& prior,
                                                        std::span<const std::size_t> points,
                                                        std::span<const std::size_t> attributes);

/// Moments of `points` accumulated in ascending index order.
SufficientStats accumulate(const Dataset& data, const PriorModel& prior, std::span<const std::size_t> points);

/// The shared estimator: statistics of attribute `j` from accumulated moments.
AttributeStatistics estimate(const Dataset& data, const PriorModel& prior, const SufficientStats& stats,
                             std::size_t j);

/// Same estimator on raw moments of attribute `j`.
AttributeStatistics estimate(const Dataset& data, const PriorModel& prior, std::size_t count, double first,
                             double second, std::size_t j);

}  // namespace sicut

#endif
