#include "sicut/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace sicut {

Dendrogram Dendrogram::from_merges(std::size_t n, std::span<const Merge> merges) {
    if (n < 2) {
        throw Error(Errc::invalid_argument, "a dendrogram needs at least two points");
    }
    if (merges.size() != n - 1) {
        throw Error(Errc::invalid_argument, "expected " + std::to_string(n - 1) + " merges, got " +
                                                std::to_string(merges.size()));
    }
    Dendrogram d;
    d.n_ = n;
    d.nodes_.resize(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        auto& leaf = d.nodes_[i];
        leaf.id = i;
        leaf.point = i;
        leaf.leaf_count = 1;
    }
    for (std::size_t t = 0; t < merges.size(); ++t) {
        const NodeId id = n + t;
        const auto [a, b, height] = merges[t];
        if (a >= id || b >= id || a == b) {
            throw Error(Errc::invalid_argument, "merge " + std::to_string(t) + " references an invalid node");
        }
        auto& left = d.nodes_[std::min(a, b)];
        auto& right = d.nodes_[std::max(a, b)];
        if (left.parent != no_node || right.parent != no_node) {
            throw Error(Errc::invalid_argument, "merge " + std::to_string(t) + " reuses an already merged node");
        }
        if (!std::isfinite(height) || height < left.height || height < right.height) {
            throw Error(Errc::invalid_argument, "merge " + std::to_string(t) + " is lower than its children");
        }
        left.parent = id;
        right.parent = id;
        auto& node = d.nodes_[id];
        node.id = id;
        node.left = left.id;
        node.right = right.id;
        node.height = height;
        node.leaf_count = left.leaf_count + right.leaf_count;
        d.merges_.push_back({left.id, right.id, height});
    }
    return d;
}

std::vector<std::size_t> Dendrogram::leaves(NodeId id) const {
    std::vector<std::size_t> out;
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        const auto& node = nodes_.at(stack.back());
        stack.pop_back();
        if (node.is_leaf()) {
            out.push_back(node.point);
        } else {
            stack.push_back(node.left);
            stack.push_back(node.right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool Dendrogram::operator==(const Dendrogram& other) const {
    if (n_ != other.n_ || merges_.size() != other.merges_.size()) {
        return false;
    }
    for (std::size_t t = 0; t < merges_.size(); ++t) {
        const auto& a = merges_[t];
        const auto& b = other.merges_[t];
        if (a.first != b.first || a.second != b.second || a.height != b.height) {
            return false;
        }
    }
    return true;
}

namespace {

// Stored-matrix agglomeration over a condensed distance matrix. Clusters live in "slots"; a merge
// keeps the lower slot and retires the other. Each slot caches its best partner so the global minimum
// is an O(n) scan, with a full row rescan only when a cached partner disappears.
class Agglomerator {
public:
    Agglomerator(const Embedding& e, Linkage linkage) : n_(e.n()), linkage_(linkage) {
        dist_.resize(n_ * (n_ - 1) / 2);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                dist_[index(i, j)] = std::hypot(e[i].x - e[j].x, e[i].y - e[j].y);
            }
        }
        node_.resize(n_);
        size_.assign(n_, 1);
        active_.assign(n_, 1);
        for (std::size_t i = 0; i < n_; ++i) {
            node_[i] = i;
        }
        best_.resize(n_);
        height_.assign(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            rescan(i);
        }
    }

    std::vector<Dendrogram::Merge> run() {
        std::vector<Dendrogram::Merge> merges;
        merges.reserve(n_ - 1);
        for (std::size_t t = 0; t + 1 < n_; ++t) {
            std::size_t a = no_node;
            for (std::size_t s = 0; s < n_; ++s) {
                if (active_[s] && best_[s].partner != no_node && (a == no_node || less(best_[s], best_[a]))) {
                    a = s;
                }
            }
            const std::size_t b = best_[a].partner;
            const std::size_t keep = std::min(a, b);
            const std::size_t drop = std::max(a, b);
            const double height = std::max({dist(a, b), height_[a], height_[b]});
            merges.push_back({node_[keep], node_[drop], height});

            for (std::size_t s = 0; s < n_; ++s) {
                if (!active_[s] || s == keep || s == drop) {
                    continue;
                }
                dist_[index(s, keep)] = combine(dist(s, keep), dist(s, drop), size_[keep], size_[drop]);
            }
            active_[drop] = 0;
            size_[keep] += size_[drop];
            node_[keep] = n_ + t;
            height_[keep] = height;

            rescan(keep);
            for (std::size_t s = 0; s < n_; ++s) {
                if (!active_[s] || s == keep) {
                    continue;
                }
                if (best_[s].partner == keep || best_[s].partner == drop) {
                    rescan(s);
                } else {
                    Candidate c = candidate(s, keep);
                    if (less(c, best_[s])) {
                        best_[s] = c;
                    }
                }
            }
        }
        return merges;
    }

private:
    struct Candidate {
        double distance = 0.0;
        NodeId lo = no_node;
        NodeId hi = no_node;
        std::size_t partner = no_node;
    };

    static bool less(const Candidate& a, const Candidate& b) {
        return std::tie(a.distance, a.lo, a.hi) < std::tie(b.distance, b.lo, b.hi);
    }

    std::size_t index(std::size_t i, std::size_t j) const {
        if (i > j) {
            std::swap(i, j);
        }
        return i * n_ - i * (i + 1) / 2 + (j - i - 1);
    }

    double dist(std::size_t i, std::size_t j) const { return dist_[index(i, j)]; }

    Candidate candidate(std::size_t s, std::size_t t) const {
        return {dist(s, t), std::min(node_[s], node_[t]), std::max(node_[s], node_[t]), t};
    }

    void rescan(std::size_t s) {
        Candidate best;
        for (std::size_t t = 0; t < n_; ++t) {
            if (t == s || !active_[t]) {
                continue;
            }
            Candidate c = candidate(s, t);
            if (best.partner == no_node || less(c, best)) {
                best = c;
            }
        }
        best_[s] = best;
    }

    double combine(double da, double db, std::size_t na, std::size_t nb) const {
        switch (linkage_) {
        case Linkage::single:
            return std::min(da, db);
        case Linkage::complete:
            return std::max(da, db);
        case Linkage::average:
            return (static_cast<double>(na) * da + static_cast<double>(nb) * db) / static_cast<double>(na + nb);
        }
        return std::min(da, db);
    }

    std::size_t n_;
    Linkage linkage_;
    std::vector<double> dist_;
    std::vector<NodeId> node_;
    std::vector<std::size_t> size_;
    std::vector<char> active_;
    std::vector<Candidate> best_;
    std::vector<double> height_;
};

}  // namespace

Dendrogram build_dendrogram(const Embedding& embedding, Linkage linkage) {
    if (embedding.n() < 2) {
        throw Error(Errc::invalid_argument, "need at least two points to build a dendrogram");
    }
    Agglomerator agglomerator(embedding, linkage);
    const auto merges = agglomerator.run();
    return Dendrogram::from_merges(embedding.n(), merges);
}

bool CutSet::contains(NodeId id) const noexcept {
    return std::find(selected_.begin(), selected_.end(), id) != selected_.end();
}

std::size_t CutSet::index_of(NodeId id) const noexcept {
    auto it = std::find(selected_.begin(), selected_.end(), id);
    return it == selected_.end() ? no_node : static_cast<std::size_t>(it - selected_.begin());
}

CutSet CutSet::with_split(NodeId id) const {
    if (contains(id)) {
        throw Error(Errc::invalid_argument, "node " + std::to_string(id) + " is already selected");
    }
    auto next = selected_;
    next.push_back(id);
    return CutSet(std::move(next));
}

CutSet CutSet::without(NodeId id) const {
    if (!selected_.empty() && selected_.front() == id) {
        throw Error(Errc::invalid_argument, "the root cannot be removed from a cut-set");
    }
    auto next = selected_;
    auto it = std::find(next.begin(), next.end(), id);
    if (it == next.end()) {
        throw Error(Errc::invalid_argument, "node " + std::to_string(id) + " is not selected");
    }
    next.erase(it);
    return CutSet(std::move(next));
}

CutIndex index_cutset(const Dendrogram& d, const CutSet& c) {
    const std::size_t size = d.size();
    if (c.size() == 0 || c.selected().front() != d.root()) {
        throw Error(Errc::invalid_argument, "cut-set must start with the root");
    }
    CutIndex idx;
    idx.selected.assign(size, 0);
    idx.label.assign(size, no_node);
    idx.host.assign(size, no_node);
    idx.free_count.assign(size, 0);

    for (std::size_t pos = 0; pos < c.size(); ++pos) {
        const NodeId id = c.selected()[pos];
        if (id >= size) {
            throw Error(Errc::invalid_argument, "cut-set references unknown node " + std::to_string(id));
        }
        if (idx.selected[id] != 0) {
            throw Error(Errc::invalid_argument, "cut-set selects node " + std::to_string(id) + " twice");
        }
        idx.selected[id] = 1;
        idx.label[id] = pos;
    }

    // Parents have larger ids than children, so a descending sweep is top-down.
    for (NodeId id = size; id-- > 0;) {
        const auto& node = d.node(id);
        if (node.parent == no_node) {
            continue;
        }
        idx.host[id] = idx.selected[node.parent] ? node.parent : idx.host[node.parent];
        if (!idx.selected[id]) {
            idx.label[id] = idx.label[node.parent];
        }
    }
    for (NodeId id = 0; id < size; ++id) {
        const auto& node = d.node(id);
        if (node.is_leaf()) {
            idx.free_count[id] = 1;
            continue;
        }
        for (NodeId child : {node.left, node.right}) {
            if (!idx.selected[child]) {
                idx.free_count[id] += idx.free_count[child];
            }
        }
    }
    return idx;
}

std::vector<std::vector<std::size_t>> clusters_from_cutset(const Dendrogram& d, const CutSet& c) {
    const CutIndex idx = index_cutset(d, c);
    std::vector<std::vector<std::size_t>> clusters(c.size());
    for (std::size_t leaf = 0; leaf < d.n_points(); ++leaf) {
        clusters[idx.label[leaf]].push_back(d.node(leaf).point);
    }
    for (std::size_t pos = 0; pos < clusters.size(); ++pos) {
        if (clusters[pos].empty()) {
            throw Error(Errc::degenerate_cluster,
                        "selected node " + std::to_string(c.selected()[pos]) + " induces an empty cluster");
        }
        std::sort(clusters[pos].begin(), clusters[pos].end());
    }
    return clusters;
}

std::vector<NodeId> candidate_splits(const Dendrogram& d, const CutSet& c, std::size_t min_cluster_size) {
    const CutIndex idx = index_cutset(d, c);
    const std::size_t min_size = std::max<std::size_t>(min_cluster_size, 1);
    std::vector<NodeId> out;
    for (NodeId id = 0; id < d.size(); ++id) {
        if (idx.selected[id]) {
            continue;
        }
        const std::size_t inside = idx.free_count[id];
        const std::size_t host_size = idx.free_count[idx.host[id]];
        if (inside >= min_size && host_size - inside >= min_size) {
            out.push_back(id);
        }
    }
    return out;
}

std::vector<NodeId> candidate_merges(const Dendrogram& d, const CutSet& c) {
    index_cutset(d, c);
    return {c.selected().begin() + 1, c.selected().end()};
}

}  // namespace sicut
