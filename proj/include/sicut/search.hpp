#ifndef SICUT_SEARCH_HPP
#define SICUT_SEARCH_HPP

#include <atomic>
#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sicut/hierarchy.hpp"
#include "sicut/infotheory.hpp"
#include "sicut/model.hpp"
#include "sicut/statistics.hpp"

namespace sicut {

/// Counters a caller may poll while a search runs on another thread.
struct SearchProgress {
    std::atomic<std::size_t> iterations{0};
    std::atomic<double> elapsed_ms{0.0};
};

/**
 * @brief When to stop searching.
 *
 * Checked between candidate evaluations. An iteration (or refinement step) interrupted by the
 * deadline is discarded as a whole.
 */
struct SearchBudget {
    std::optional<std::chrono::steady_clock::time_point> deadline;
    /// Greedy search: cap on completed iterations, the k = 1 evaluation included.
    /// Refinement: cap on applied moves.
    std::optional<std::size_t> iterations_max;
    SearchProgress* progress = nullptr;

    /// Deadline `hp.time_budget_ms` from now, plus an optional iteration cap.
    static SearchBudget from(const Hyperparameters& hp, std::optional<std::size_t> iteration_cap = std::nullopt);
    /// No deadline; only the iteration cap applies.
    static SearchBudget iterations(std::size_t cap);

    bool expired() const;
};

struct IterationRecord {
    std::size_t k = 0;
    double si = 0.0;
    double elapsed_ms = 0.0;
};

struct SearchTrace {
    std::vector<IterationRecord> records;
    bool budget_expired = false;
};

/**
 * @brief Additive moments of every dendrogram subtree, computed once bottom-up.
 *
 * Independent of the hyperparameters, so one instance serves a whole sweep.
 */
class MomentTree {
public:
    MomentTree(const Dendrogram& d, const Dataset& data, const PriorModel& prior);

    std::size_t m() const noexcept { return m_; }
    std::size_t count(NodeId id) const noexcept { return counts_[id]; }
    std::span<const double> first(NodeId id) const noexcept { return {first_.data() + id * m_, m_}; }
    std::span<const double> second(NodeId id) const noexcept { return {second_.data() + id * m_, m_}; }

private:
    std::size_t m_ = 0;
    std::vector<std::size_t> counts_;
    std::vector<double> first_;
    std::vector<double> second_;
};

/**
 * @brief Everything a search needs that does not depend on the hyperparameters.
 *
 * Holds references; the dendrogram, dataset and prior must outlive it.
 */
class SearchContext {
public:
    SearchContext(const Dendrogram& d, const Dataset& data, const PriorModel& prior)
        : dendrogram_(d), data_(data), prior_(prior), moments_(d, data, prior) {}

    const Dendrogram& dendrogram() const noexcept { return dendrogram_; }
    const Dataset& data() const noexcept { return data_; }
    const PriorModel& prior() const noexcept { return prior_; }
    const MomentTree& moments() const noexcept { return moments_; }

private:
    const Dendrogram& dendrogram_;
    const Dataset& data_;
    const PriorModel& prior_;
    MomentTree moments_;
};

/**
 * Greedy attribute selection for a fixed partition.
 *
 * Every cluster is seeded with its most informative attribute. Then, over all (cluster, unused
 * attribute) pairs, the one giving the highest SI is added while that strictly improves SI.
 * Ties go to the lowest cluster, then the lowest attribute index. Each returned pattern lists its
 * attributes by decreasing information.
 */
std::vector<BiclusterPattern> select_attributes(std::span<const std::vector<std::size_t>> partition,
                                                const Dataset& data, const PriorModel& prior,
                                                const Hyperparameters& hp);

/// Clusters, attribute selection and scores for one cut-set.
ClusteringSolution evaluate_cutset(const CutSet& cut, const SearchContext& ctx, const Hyperparameters& hp);
ClusteringSolution evaluate_cutset(const CutSet& cut, const Dendrogram& d, const Dataset& data,
                                   const PriorModel& prior, const Hyperparameters& hp);

/**
 * Top-down greedy search. Starting from one cluster, each iteration applies the single split with the
 * highest SI (ties to the smaller node id). Returns the best solution over all completed iterations.
 */
std::pair<ClusteringSolution, SearchTrace> greedy_search(const SearchContext& ctx, const Hyperparameters& hp,
                                                         const SearchBudget& budget);
std::pair<ClusteringSolution, SearchTrace> greedy_search(const Dendrogram& d, const Dataset& data,
                                                         const PriorModel& prior, const Hyperparameters& hp);

/**
 * Hill-climbing from a previous solution under new hyperparameters. Each step applies the best
 * single split or merge if it strictly raises SI; ties prefer the merge, then the smaller node id.
 *
 * Throws `Error(Errc::invalid_argument)` if `previous` does not belong to this dendrogram.
 */
std::pair<ClusteringSolution, SearchTrace> refine(const ClusteringSolution& previous, const SearchContext& ctx,
                                                  const Hyperparameters& hp, const SearchBudget& budget);
std::pair<ClusteringSolution, SearchTrace> refine(const ClusteringSolution& previous, const Dendrogram& d,
                                                  const Dataset& data, const PriorModel& prior,
                                                  const Hyperparameters& hp);

}  // namespace sicut

#endif
