#include "sicut/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace sicut {

SearchBudget SearchBudget::from(const Hyperparameters& hp, std::optional<std::size_t> iteration_cap) {
    SearchBudget budget;
    budget.deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(hp.time_budget_ms);
    budget.iterations_max = iteration_cap;
    return budget;
}

SearchBudget SearchBudget::iterations(std::size_t cap) {
    SearchBudget budget;
    budget.iterations_max = cap;
    return budget;
}

bool SearchBudget::expired() const {
    return deadline && std::chrono::steady_clock::now() >= *deadline;
}

MomentTree::MomentTree(const Dendrogram& d, const Dataset& data, const PriorModel& prior) : m_(data.m()) {
    if (d.n_points() != data.n()) {
        throw Error(Errc::invalid_argument, "dendrogram has " + std::to_string(d.n_points()) +
                                                " leaves but the dataset has " + std::to_string(data.n()) +
                                                " points");
    }
    const std::size_t size = d.size();
    counts_.assign(size, 0);
    first_.assign(size * m_, 0.0);
    second_.assign(size * m_, 0.0);
    for (NodeId id = 0; id < size; ++id) {
        const auto& node = d.node(id);
        double* f = first_.data() + id * m_;
        double* s = second_.data() + id * m_;
        if (node.is_leaf()) {
            counts_[id] = 1;
            const auto row = data.row(node.point);
            for (std::size_t j = 0; j < m_; ++j) {
                if (data.schema()[j].type == AttributeType::boolean) {
                    f[j] = row[j];
                } else {
                    const double dev = row[j] - prior.centers[j];
                    f[j] = dev;
                    s[j] = dev * dev;
                }
            }
            continue;
        }
        counts_[id] = counts_[node.left] + counts_[node.right];
        for (std::size_t j = 0; j < m_; ++j) {
            f[j] = first_[node.left * m_ + j] + first_[node.right * m_ + j];
            s[j] = second_[node.left * m_ + j] + second_[node.right * m_ + j];
        }
    }
}

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Moments of one cluster, flat.
struct Moments {
    std::size_t count = 0;
    std::vector<double> first;
    std::vector<double> second;

    void resize(std::size_t m) {
        first.resize(m);
        second.resize(m);
    }
};

/// Per-attribute information of a cluster, ranked for the greedy selection.
struct Profile {
    std::vector<double> info;
    std::size_t seed = 0;
    /// Attributes of each type by decreasing information, ties by index.
    std::vector<std::uint32_t> booleans;
    std::vector<std::uint32_t> reals;
    /// Position of each attribute in its type list.
    std::vector<std::uint32_t> position;
};

AttributeStatistics cluster_statistic(const Dataset& data, const PriorModel& prior, const Moments& mo,
                                      std::size_t j) {
    // A cluster holding every point is the prior itself; reuse it so its information is exactly zero.
    if (mo.count == data.n()) {
        return prior.statistics[j];
    }
    return estimate(data, prior, mo.count, mo.first[j], mo.second[j], j);
}

void make_profile(const Dataset& data, const PriorModel& prior, const Moments& mo, Profile& out) {
    const std::size_t m = data.m();
    out.info.resize(m);
    const double size = static_cast<double>(mo.count);
    for (std::size_t j = 0; j < m; ++j) {
        out.info[j] = mo.count == data.n()
                          ? 0.0
                          : size * kl_statistics(cluster_statistic(data, prior, mo, j), prior.statistics[j]);
    }
    out.seed = 0;
    for (std::size_t j = 1; j < m; ++j) {
        if (out.info[j] > out.info[out.seed]) {
            out.seed = j;
        }
    }
    out.booleans.clear();
    out.reals.clear();
    for (std::size_t j = 0; j < m; ++j) {
        (data.schema()[j].type == AttributeType::boolean ? out.booleans : out.reals)
            .push_back(static_cast<std::uint32_t>(j));
    }
    auto by_info = [&](std::uint32_t a, std::uint32_t b) {
        return out.info[a] != out.info[b] ? out.info[a] > out.info[b] : a < b;
    };
    std::sort(out.booleans.begin(), out.booleans.end(), by_info);
    std::sort(out.reals.begin(), out.reals.end(), by_info);
    out.position.resize(m);
    for (std::size_t i = 0; i < out.booleans.size(); ++i) {
        out.position[out.booleans[i]] = static_cast<std::uint32_t>(i);
    }
    for (std::size_t i = 0; i < out.reals.size(); ++i) {
        out.position[out.reals[i]] = static_cast<std::uint32_t>(i);
    }
}

struct Selection {
    double information = 0.0;
    double statistics = 0.0;
    double si = 0.0;
    /// Chosen attributes per cluster; only filled on request.
    std::vector<std::vector<std::size_t>> chosen;
};

double ratio(double information, double complexity) { return complexity > 0.0 ? information / complexity : 0.0; }

constexpr std::size_t none = static_cast<std::size_t>(-1);

/// Selection state of one cluster. Cursors never pass the first unused entry of their list; ends
/// bound the positions of used entries from above.
struct Chosen {
    const char* used = nullptr;
    std::size_t count = 0;
    std::size_t next_boolean = 0;
    std::size_t next_real = 0;
    std::size_t end_boolean = 0;
    std::size_t end_real = 0;
};

std::size_t first_unused(const std::vector<std::uint32_t>& list, const char* used, std::size_t& cursor) {
    while (cursor < list.size() && used[list[cursor]]) {
        ++cursor;
    }
    return cursor < list.size() ? list[cursor] : none;
}

std::size_t last_used(const std::vector<std::uint32_t>& list, const char* used, std::size_t end) {
    for (std::size_t i = end; i-- > 0;) {
        if (used[list[i]]) {
            return list[i];
        }
    }
    return none;
}

/**
 * Greedy selection over all clusters at once. Seeds every cluster with its most informative
 * attribute and adds the best (cluster, attribute) pair while si strictly improves. When no
 * addition helps, each cluster in turn takes its best removal or one-for-one exchange if that
 * strictly improves si, and additions resume after any such move.
 */
Selection select(std::span<const Profile* const> clusters, const Dataset& data, double alpha, double beta,
                 bool keep_choices) {
    Selection sel;
    const std::size_t k = clusters.size();
    const std::size_t m = data.m();
    auto weight = [&](std::size_t j) { return static_cast<double>(statistic_count(data.schema()[j].type)); };
    // Statistic totals are small integers, so their powers are tabulated per beta.
    thread_local std::vector<double> powers;
    thread_local double powers_beta = -1.0;
    if (powers_beta != beta) {
        powers.clear();
        powers_beta = beta;
    }
    auto si_of = [&](double information, double statistics) {
        const auto t = static_cast<std::size_t>(statistics);
        while (powers.size() <= t) {
            powers.push_back(std::pow(static_cast<double>(powers.size()), beta));
        }
        return ratio(information, alpha + powers[t]);
    };

    thread_local std::vector<char> used;
    thread_local std::vector<Chosen> state;
    used.assign(k * m, 0);
    state.assign(k, Chosen{});
    auto place = [&](std::size_t c, std::size_t j, bool on) {
        const auto& p = *clusters[c];
        auto& s = state[c];
        used[c * m + j] = on ? 1 : 0;
        const bool boolean = data.schema()[j].type == AttributeType::boolean;
        const std::size_t at = p.position[j];
        sel.information += on ? p.info[j] : -p.info[j];
        sel.statistics += on ? weight(j) : -weight(j);
        if (on) {
            ++s.count;
            auto& end = boolean ? s.end_boolean : s.end_real;
            end = std::max(end, at + 1);
            return;
        }
        --s.count;
        auto& cursor = boolean ? s.next_boolean : s.next_real;
        cursor = std::min(cursor, at);
    };
    for (std::size_t c = 0; c < k; ++c) {
        state[c].used = used.data() + c * m;
        place(c, clusters[c]->seed, true);
    }
    double current = si_of(sel.information, sel.statistics);

    for (;;) {
        // Additions: the most informative unused attribute of each type across clusters.
        std::size_t bc = none, rc = none, boolean_attr = none, real_attr = none;
        for (std::size_t c = 0; c < k; ++c) {
            const auto& p = *clusters[c];
            const auto b = first_unused(p.booleans, state[c].used, state[c].next_boolean);
            if (b != none && (bc == none || p.info[b] > clusters[bc]->info[boolean_attr])) {
                bc = c;
                boolean_attr = b;
            }
            const auto r = first_unused(p.reals, state[c].used, state[c].next_real);
            if (r != none && (rc == none || p.info[r] > clusters[rc]->info[real_attr])) {
                rc = c;
                real_attr = r;
            }
        }
        const double boolean_si = bc != none ? si_of(sel.information + clusters[bc]->info[boolean_attr],
                                                     sel.statistics + 1.0)
                                             : -1.0;
        const double real_si =
            rc != none ? si_of(sel.information + clusters[rc]->info[real_attr], sel.statistics + 2.0) : -1.0;
        bool take_boolean = bc != none;
        if (bc != none && rc != none) {
            take_boolean = boolean_si != real_si ? boolean_si > real_si
                                                 : std::pair(bc, boolean_attr) < std::pair(rc, real_attr);
        }
        if (bc != none || rc != none) {
            const double best = take_boolean ? boolean_si : real_si;
            if (best > current) {
                take_boolean ? place(bc, boolean_attr, true) : place(rc, real_attr, true);
                current = best;
                continue;
            }
        }

        // One sweep over the clusters, each taking its best improving removal or exchange.
        bool moved = false;
        for (std::size_t c = 0; c < k; ++c) {
            const auto& p = *clusters[c];
            auto& s = state[c];
            const std::size_t outs[2] = {last_used(p.booleans, s.used, s.end_boolean),
                                         last_used(p.reals, s.used, s.end_real)};
            const std::size_t ins[2] = {first_unused(p.booleans, s.used, s.next_boolean),
                                        first_unused(p.reals, s.used, s.next_real)};
            double best = current;
            std::size_t drop = none, add = none;
            for (auto out : outs) {
                if (out == none) {
                    continue;
                }
                const double info = sel.information - p.info[out];
                const double stats = sel.statistics - weight(out);
                if (s.count > 1) {
                    const double v = si_of(info, stats);
                    if (v > best) {
                        best = v;
                        drop = out;
                        add = none;
                    }
                }
                for (auto in : ins) {
                    if (in == none) {
                        continue;
                    }
                    const double v = si_of(info + p.info[in], stats + weight(in));
                    if (v > best) {
                        best = v;
                        drop = out;
                        add = in;
                    }
                }
            }
            if (drop == none) {
                continue;
            }
            place(c, drop, false);
            if (add != none) {
                place(c, add, true);
            }
            current = best;
            moved = true;
        }
        if (!moved) {
            break;
        }
    }

    sel.si = current;
    if (keep_choices) {
        sel.chosen.resize(k);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t j = 0; j < m; ++j) {
                if (state[c].used[j]) {
                    sel.chosen[c].push_back(j);
                }
            }
        }
    }
    return sel;
}

/// Orders chosen attributes by decreasing information, ties by index.
void rank_attributes(std::vector<std::size_t>& attributes, const Profile& profile) {
    std::sort(attributes.begin(), attributes.end(), [&](std::size_t a, std::size_t b) {
        return profile.info[a] != profile.info[b] ? profile.info[a] > profile.info[b] : a < b;
    });
}

/**
 * Finalizes patterns from selected attributes. Scores are recomputed from the patterns themselves
 * so that the stored si equals information / complexity of what is reported.
 */
ClusteringSolution assemble(std::vector<BiclusterPattern> patterns, const Dataset& data, const PriorModel& prior,
                            const Hyperparameters& hp) {
    ClusteringSolution sol;
    sol.patterns = std::move(patterns);
    for (const auto& p : sol.patterns) {
        sol.total_information += pattern_information(p, prior);
    }
    sol.complexity = description_complexity(sol.patterns, data, hp.alpha, hp.beta);
    sol.si = ratio(sol.total_information, sol.complexity);
    return sol;
}

/**
 * @brief Scores a cut-set and its single-move neighbours.
 *
 * Cluster moments are subtree moments minus the moments shadowed by selected descendants.
 * Profiles of the current clusters are computed once; a neighbour only re-profiles the one or two
 * clusters the move touches.
 */
class CutEvaluator {
public:
    CutEvaluator(const SearchContext& ctx, CutSet cut)
        : ctx_(&ctx), cut_(std::move(cut)), index_(index_cutset(ctx.dendrogram(), cut_)) {
        const auto& d = ctx.dendrogram();
        const auto& mt = ctx.moments();
        const std::size_t m = mt.m();
        shadow_count_.assign(d.size(), 0);
        shadow_first_.assign(d.size() * m, 0.0);
        shadow_second_.assign(d.size() * m, 0.0);
        for (NodeId id = 0; id < d.size(); ++id) {
            const auto& node = d.node(id);
            if (node.is_leaf()) {
                continue;
            }
            for (NodeId child : {node.left, node.right}) {
                if (index_.selected[child]) {
                    shadow_count_[id] += mt.count(child);
                    add(shadow_first_.data() + id * m, mt.first(child));
                    add(shadow_second_.data() + id * m, mt.second(child));
                } else {
                    shadow_count_[id] += shadow_count_[child];
                    add(shadow_first_.data() + id * m, {shadow_first_.data() + child * m, m});
                    add(shadow_second_.data() + id * m, {shadow_second_.data() + child * m, m});
                }
            }
        }

        cluster_moments_.resize(cut_.size());
        profiles_.resize(cut_.size());
        for (std::size_t c = 0; c < cut_.size(); ++c) {
            free_moments(cut_.selected()[c], cluster_moments_[c]);
            if (cluster_moments_[c].count == 0) {
                throw Error(Errc::degenerate_cluster, "selected node " + std::to_string(cut_.selected()[c]) +
                                                          " induces an empty cluster");
            }
            make_profile(ctx.data(), ctx.prior(), cluster_moments_[c], profiles_[c]);
        }
        scratch_a_.resize(m);
        scratch_b_.resize(m);
    }

    const CutSet& cut() const noexcept { return cut_; }
    const CutIndex& index() const noexcept { return index_; }

    double current_si(const Hyperparameters& hp) {
        pointers_.clear();
        for (const auto& p : profiles_) {
            pointers_.push_back(&p);
        }
        return select(pointers_, ctx_->data(), hp.alpha, hp.beta, false).si;
    }

    std::vector<NodeId> splits(std::size_t min_cluster_size) const {
        const std::size_t min_size = std::max<std::size_t>(min_cluster_size, 1);
        std::vector<NodeId> out;
        for (NodeId id = 0; id < index_.selected.size(); ++id) {
            if (index_.selected[id]) {
                continue;
            }
            const std::size_t inside = index_.free_count[id];
            const std::size_t host_size = index_.free_count[index_.host[id]];
            if (inside >= min_size && host_size - inside >= min_size) {
                out.push_back(id);
            }
        }
        return out;
    }

    double split_si(NodeId v, const Hyperparameters& hp) {
        const std::size_t host_pos = index_.label[v];
        free_moments(v, scratch_b_);
        const Moments& host = cluster_moments_[host_pos];
        scratch_a_.count = host.count - scratch_b_.count;
        for (std::size_t j = 0; j < scratch_a_.first.size(); ++j) {
            scratch_a_.first[j] = host.first[j] - scratch_b_.first[j];
            scratch_a_.second[j] = host.second[j] - scratch_b_.second[j];
        }
        make_profile(ctx_->data(), ctx_->prior(), scratch_a_, profile_a_);
        make_profile(ctx_->data(), ctx_->prior(), scratch_b_, profile_b_);
        pointers_.clear();
        for (std::size_t c = 0; c < profiles_.size(); ++c) {
            pointers_.push_back(c == host_pos ? &profile_a_ : &profiles_[c]);
        }
        pointers_.push_back(&profile_b_);
        return select(pointers_, ctx_->data(), hp.alpha, hp.beta, false).si;
    }

    double merge_si(NodeId s, const Hyperparameters& hp) {
        const std::size_t pos = index_.label[s];
        const std::size_t host_pos = index_.label[index_.host[s]];
        const Moments& host = cluster_moments_[host_pos];
        const Moments& gone = cluster_moments_[pos];
        scratch_a_.count = host.count + gone.count;
        for (std::size_t j = 0; j < scratch_a_.first.size(); ++j) {
            scratch_a_.first[j] = host.first[j] + gone.first[j];
            scratch_a_.second[j] = host.second[j] + gone.second[j];
        }
        make_profile(ctx_->data(), ctx_->prior(), scratch_a_, profile_a_);
        pointers_.clear();
        for (std::size_t c = 0; c < profiles_.size(); ++c) {
            if (c == pos) {
                continue;
            }
            pointers_.push_back(c == host_pos ? &profile_a_ : &profiles_[c]);
        }
        return select(pointers_, ctx_->data(), hp.alpha, hp.beta, false).si;
    }

    ClusteringSolution solution(const Hyperparameters& hp) {
        const auto& data = ctx_->data();
        pointers_.clear();
        for (const auto& p : profiles_) {
            pointers_.push_back(&p);
        }
        Selection sel = select(pointers_, data, hp.alpha, hp.beta, true);

        std::vector<std::vector<std::size_t>> members(cut_.size());
        for (std::size_t leaf = 0; leaf < ctx_->dendrogram().n_points(); ++leaf) {
            members[index_.label[leaf]].push_back(ctx_->dendrogram().node(leaf).point);
        }

        std::vector<BiclusterPattern> patterns(cut_.size());
        for (std::size_t c = 0; c < cut_.size(); ++c) {
            auto& pattern = patterns[c];
            pattern.points = std::move(members[c]);
            std::sort(pattern.points.begin(), pattern.points.end());
            pattern.attributes = std::move(sel.chosen[c]);
            rank_attributes(pattern.attributes, profiles_[c]);
            for (auto j : pattern.attributes) {
                pattern.statistics.push_back(cluster_statistic(data, ctx_->prior(), cluster_moments_[c], j));
            }
        }
        ClusteringSolution sol = assemble(std::move(patterns), data, ctx_->prior(), hp);
        sol.cut_set = cut_.selected();
        return sol;
    }

private:
    static void add(double* dst, std::span<const double> src) {
        for (std::size_t j = 0; j < src.size(); ++j) {
            dst[j] += src[j];
        }
    }

    void free_moments(NodeId id, Moments& out) const {
        const auto& mt = ctx_->moments();
        const std::size_t m = mt.m();
        out.resize(m);
        out.count = mt.count(id) - shadow_count_[id];
        const auto f = mt.first(id);
        const auto s = mt.second(id);
        for (std::size_t j = 0; j < m; ++j) {
            out.first[j] = f[j] - shadow_first_[id * m + j];
            out.second[j] = s[j] - shadow_second_[id * m + j];
        }
    }

    const SearchContext* ctx_;
    CutSet cut_;
    CutIndex index_;
    std::vector<std::size_t> shadow_count_;
    std::vector<double> shadow_first_;
    std::vector<double> shadow_second_;
    std::vector<Moments> cluster_moments_;
    std::vector<Profile> profiles_;

    Moments scratch_a_;
    Moments scratch_b_;
    Profile profile_a_;
    Profile profile_b_;
    std::vector<const Profile*> pointers_;
};

void report(const SearchBudget& budget, std::size_t iterations, double elapsed) {
    if (budget.progress != nullptr) {
        budget.progress->iterations.store(iterations);
        budget.progress->elapsed_ms.store(elapsed);
    }
}

}  // namespace

std::vector<BiclusterPattern> select_attributes(std::span<const std::vector<std::size_t>> partition,
                                                const Dataset& data, const PriorModel& prior,
                                                const Hyperparameters& hp) {
    std::vector<Moments> moments(partition.size());
    std::vector<Profile> profiles(partition.size());
    for (std::size_t c = 0; c < partition.size(); ++c) {
        if (partition[c].empty()) {
            throw Error(Errc::degenerate_cluster, "cluster " + std::to_string(c) + " is empty");
        }
        SufficientStats stats = accumulate(data, prior, partition[c]);
        moments[c].count = stats.count;
        moments[c].first = std::move(stats.first);
        moments[c].second = std::move(stats.second);
        make_profile(data, prior, moments[c], profiles[c]);
    }
    std::vector<const Profile*> pointers;
    for (const auto& p : profiles) {
        pointers.push_back(&p);
    }
    Selection sel = select(pointers, data, hp.alpha, hp.beta, true);

    std::vector<BiclusterPattern> patterns(partition.size());
    for (std::size_t c = 0; c < partition.size(); ++c) {
        auto& pattern = patterns[c];
        pattern.points.assign(partition[c].begin(), partition[c].end());
        std::sort(pattern.points.begin(), pattern.points.end());
        pattern.attributes = std::move(sel.chosen[c]);
        rank_attributes(pattern.attributes, profiles[c]);
        for (auto j : pattern.attributes) {
            pattern.statistics.push_back(cluster_statistic(data, prior, moments[c], j));
        }
    }
    return patterns;
}

ClusteringSolution evaluate_cutset(const CutSet& cut, const SearchContext& ctx, const Hyperparameters& hp) {
    CutEvaluator evaluator(ctx, cut);
    return evaluator.solution(hp);
}

ClusteringSolution evaluate_cutset(const CutSet& cut, const Dendrogram& d, const Dataset& data,
                                   const PriorModel& prior, const Hyperparameters& hp) {
    const SearchContext ctx(d, data, prior);
    return evaluate_cutset(cut, ctx, hp);
}

std::pair<ClusteringSolution, SearchTrace> greedy_search(const SearchContext& ctx, const Hyperparameters& hp,
                                                         const SearchBudget& budget) {
    hp.validate();
    const auto start = std::chrono::steady_clock::now();
    SearchTrace trace;

    CutEvaluator current(ctx, CutSet(ctx.dendrogram().root()));
    ClusteringSolution best = current.solution(hp);
    trace.records.push_back({1, best.si, elapsed_ms(start)});
    report(budget, 1, trace.records.back().elapsed_ms);

    for (;;) {
        if (budget.iterations_max && trace.records.size() >= *budget.iterations_max) {
            break;
        }
        const auto candidates = current.splits(hp.min_cluster_size);
        if (candidates.empty()) {
            break;
        }
        NodeId chosen = no_node;
        double chosen_si = 0.0;
        bool aborted = false;
        for (NodeId v : candidates) {
            if (budget.expired()) {
                aborted = true;
                break;
            }
            const double si = current.split_si(v, hp);
            if (chosen == no_node || si > chosen_si) {
                chosen = v;
                chosen_si = si;
            }
        }
        if (aborted) {
            trace.budget_expired = true;
            break;
        }
        current = CutEvaluator(ctx, current.cut().with_split(chosen));
        ClusteringSolution sol = current.solution(hp);
        trace.records.push_back({sol.k(), sol.si, elapsed_ms(start)});
        report(budget, trace.records.size(), trace.records.back().elapsed_ms);
        if (sol.si > best.si) {
            best = std::move(sol);
        }
    }
    best.iterations_completed = trace.records.size();
    return {std::move(best), std::move(trace)};
}

std::pair<ClusteringSolution, SearchTrace> greedy_search(const Dendrogram& d, const Dataset& data,
                                                         const PriorModel& prior, const Hyperparameters& hp) {
    const SearchContext ctx(d, data, prior);
    return greedy_search(ctx, hp, SearchBudget::from(hp));
}

std::pair<ClusteringSolution, SearchTrace> refine(const ClusteringSolution& previous, const SearchContext& ctx,
                                                  const Hyperparameters& hp, const SearchBudget& budget) {
    hp.validate();
    const auto& d = ctx.dendrogram();
    if (previous.cut_set.empty()) {
        throw Error(Errc::invalid_argument, "previous solution has no cut-set");
    }
    const CutSet start_cut(previous.cut_set);
    const auto clusters = clusters_from_cutset(d, start_cut);
    if (!previous.patterns.empty()) {
        bool consistent = previous.patterns.size() == clusters.size();
        for (std::size_t c = 0; consistent && c < clusters.size(); ++c) {
            auto points = previous.patterns[c].points;
            std::sort(points.begin(), points.end());
            consistent = points == clusters[c];
        }
        if (!consistent) {
            throw Error(Errc::invalid_argument, "previous solution does not match this dendrogram");
        }
    }

    const auto start = std::chrono::steady_clock::now();
    SearchTrace trace;
    CutEvaluator current(ctx, start_cut);
    ClusteringSolution sol = current.solution(hp);
    trace.records.push_back({sol.k(), sol.si, elapsed_ms(start)});
    report(budget, 1, trace.records.back().elapsed_ms);

    std::size_t moves = 0;
    for (;;) {
        if (budget.iterations_max && moves >= *budget.iterations_max) {
            break;
        }
        if (budget.expired()) {
            trace.budget_expired = true;
            break;
        }
        const double base = current.current_si(hp);

        NodeId best_merge = no_node;
        double best_merge_si = 0.0;
        NodeId best_split = no_node;
        double best_split_si = 0.0;
        bool aborted = false;

        std::vector<NodeId> merges(current.cut().selected().begin() + 1, current.cut().selected().end());
        std::sort(merges.begin(), merges.end());
        for (NodeId s : merges) {
            if (budget.expired()) {
                aborted = true;
                break;
            }
            const double si = current.merge_si(s, hp);
            if (best_merge == no_node || si > best_merge_si) {
                best_merge = s;
                best_merge_si = si;
            }
        }
        if (!aborted) {
            for (NodeId v : current.splits(hp.min_cluster_size)) {
                if (budget.expired()) {
                    aborted = true;
                    break;
                }
                const double si = current.split_si(v, hp);
                if (best_split == no_node || si > best_split_si) {
                    best_split = v;
                    best_split_si = si;
                }
            }
        }
        if (aborted) {
            trace.budget_expired = true;
            break;
        }

        const bool merge_ok = best_merge != no_node && best_merge_si > base;
        const bool split_ok = best_split != no_node && best_split_si > base;
        if (!merge_ok && !split_ok) {
            break;
        }
        const bool take_merge = merge_ok && (!split_ok || best_merge_si >= best_split_si);
        CutSet next = take_merge ? current.cut().without(best_merge) : current.cut().with_split(best_split);
        current = CutEvaluator(ctx, std::move(next));
        sol = current.solution(hp);
        ++moves;
        trace.records.push_back({sol.k(), sol.si, elapsed_ms(start)});
        report(budget, trace.records.size(), trace.records.back().elapsed_ms);
    }
    sol.iterations_completed = trace.records.size();
    return {std::move(sol), std::move(trace)};
}

std::pair<ClusteringSolution, SearchTrace> refine(const ClusteringSolution& previous, const Dendrogram& d,
                                                  const Dataset& data, const PriorModel& prior,
                                                  const Hyperparameters& hp) {
    const SearchContext ctx(d, data, prior);
    return refine(previous, ctx, hp, SearchBudget::from(hp));
}

}  // namespace sicut
