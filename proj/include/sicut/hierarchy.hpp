#ifndef SICUT_HIERARCHY_HPP
#define SICUT_HIERARCHY_HPP

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "sicut/model.hpp"

namespace sicut {

inline constexpr NodeId no_node = std::numeric_limits<NodeId>::max();

struct DendrogramNode {
    NodeId id = no_node;
    NodeId left = no_node;
    NodeId right = no_node;
    NodeId parent = no_node;
    double height = 0.0;
    /// Embedding row for leaves, `no_node` otherwise.
    std::size_t point = no_node;
    std::size_t leaf_count = 1;

    bool is_leaf() const noexcept { return left == no_node; }
};

/**
 * @brief Binary merge tree over n points.
 *
 * Leaves have ids 0..n-1 and map to point i. The t-th merge creates node n+t, so every parent id
 * is larger than its children's ids and the root is 2n-2.
 */
class Dendrogram {
public:
    struct Merge {
        NodeId first = no_node;
        NodeId second = no_node;
        double height = 0.0;
    };

    Dendrogram() = default;

    /**
     * Builds the tree from n-1 merges. Throws `Error(Errc::invalid_argument)` if a merge references
     * an unknown or already merged node, or lowers the height below a child's height.
     */
    static Dendrogram from_merges(std::size_t n, std::span<const Merge> merges);

    std::size_t n_points() const noexcept { return n_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    NodeId root() const noexcept { return nodes_.empty() ? no_node : nodes_.size() - 1; }
    const DendrogramNode& node(NodeId id) const { return nodes_.at(id); }
    const std::vector<DendrogramNode>& nodes() const noexcept { return nodes_; }
    const std::vector<Merge>& merges() const noexcept { return merges_; }

    /// Leaf point indices under `id`, ascending.
    std::vector<std::size_t> leaves(NodeId id) const;

    bool operator==(const Dendrogram& other) const;

private:
    std::size_t n_ = 0;
    std::vector<DendrogramNode> nodes_;
    std::vector<Merge> merges_;
};

/**
 * Agglomerative clustering of the embedding under Euclidean distance.
 *
 * Equal distances are resolved by merging the pair with the lexicographically smallest
 * (min id, max id). Throws for fewer than two points.
 */
Dendrogram build_dendrogram(const Embedding& embedding, Linkage linkage);

/**
 * @brief Selected dendrogram nodes, in insertion order, always starting with the root.
 *
 * Each leaf belongs to the cluster of its lowest selected ancestor (itself included).
 */
class CutSet {
public:
    CutSet() = default;
    explicit CutSet(NodeId root) : selected_{root} {}
    explicit CutSet(std::vector<NodeId> selected) : selected_(std::move(selected)) {}

    const std::vector<NodeId>& selected() const noexcept { return selected_; }
    std::size_t size() const noexcept { return selected_.size(); }
    bool contains(NodeId id) const noexcept;
    /// Position of `id` in insertion order, or `no_node`.
    std::size_t index_of(NodeId id) const noexcept;

    CutSet with_split(NodeId id) const;
    CutSet without(NodeId id) const;

    bool operator==(const CutSet&) const = default;

private:
    std::vector<NodeId> selected_;
};

/**
 * @brief Per-node bookkeeping for one cut-set.
 */
struct CutIndex {
    /// Cluster index (position in the cut-set) each node's leaves fall into when not shadowed.
    std::vector<std::size_t> label;
    /// Lowest selected proper ancestor, `no_node` for the root.
    std::vector<NodeId> host;
    /// Leaves under the node that are not under a selected proper descendant.
    std::vector<std::size_t> free_count;
    std::vector<char> selected;
};

/// Throws `Error(Errc::invalid_argument)` for unknown or duplicate ids or a missing root.
CutIndex index_cutset(const Dendrogram& d, const CutSet& c);

/**
 * k disjoint point sets covering every point, ordered like the cut-set.
 * Throws `Error(Errc::degenerate_cluster)` if a selected node induces an empty cluster.
 */
std::vector<std::vector<std::size_t>> clusters_from_cutset(const Dendrogram& d, const CutSet& c);

/// Nodes whose selection leaves both the new cluster and its host's remainder with >= min_cluster_size points.
std::vector<NodeId> candidate_splits(const Dendrogram& d, const CutSet& c, std::size_t min_cluster_size = 1);

/// Every selected node except the root.
std::vector<NodeId> candidate_merges(const Dendrogram& d, const CutSet& c);

}  // namespace sicut

#endif
