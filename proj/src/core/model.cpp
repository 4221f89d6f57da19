#include "sicut/model.hpp"

#include <algorithm>
#include <cmath>

namespace sicut {

const char* to_string(AttributeType type) noexcept {
    return type == AttributeType::boolean ? "boolean" : "real";
}

const char* to_string(Linkage linkage) noexcept {
    switch (linkage) {
    case Linkage::single:
        return "single";
    case Linkage::complete:
        return "complete";
    case Linkage::average:
        return "average";
    }
    return "single";
}

Linkage parse_linkage(const std::string& text) {
    if (text == "single") {
        return Linkage::single;
    }
    if (text == "complete") {
        return Linkage::complete;
    }
    if (text == "average") {
        return Linkage::average;
    }
    throw Error(Errc::invalid_argument, "unknown linkage '" + text + "' (expected single, complete or average)");
}

Dataset::Dataset(std::vector<Attribute> schema, std::vector<double> values)
    : schema_(std::move(schema)), values_(std::move(values)) {
    if (schema_.empty()) {
        throw Error(Errc::invalid_argument, "dataset needs at least one attribute");
    }
    if (values_.size() % schema_.size() != 0) {
        throw Error(Errc::invalid_argument, "value count is not a multiple of the attribute count");
    }
    n_ = values_.size() / schema_.size();
    if (n_ < 2) {
        throw Error(Errc::invalid_argument, "dataset needs at least two points");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < m(); ++j) {
            const double v = at(i, j);
            if (!std::isfinite(v)) {
                throw Error(Errc::invalid_argument, "non-finite value at row " + std::to_string(i) + ", column '" +
                                                        schema_[j].name + "'");
            }
            if (schema_[j].type == AttributeType::boolean && v != 0.0 && v != 1.0) {
                throw Error(Errc::invalid_argument, "boolean column '" + schema_[j].name + "' holds " +
                                                        std::to_string(v) + " at row " + std::to_string(i));
            }
        }
    }
}

Dataset Dataset::subset(std::span<const std::size_t> points) const {
    std::vector<double> values;
    values.reserve(points.size() * m());
    for (auto p : points) {
        auto r = row(p);
        values.insert(values.end(), r.begin(), r.end());
    }
    return Dataset(schema_, std::move(values));
}

Embedding::Embedding(std::vector<Point> coords) : coords_(std::move(coords)) {
    for (std::size_t i = 0; i < coords_.size(); ++i) {
        if (!std::isfinite(coords_[i].x) || !std::isfinite(coords_[i].y)) {
            throw Error(Errc::invalid_argument, "non-finite embedding coordinate at row " + std::to_string(i));
        }
    }
}

void Hyperparameters::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw Error(Errc::invalid_argument, "alpha must be >= 0");
    }
    if (!(beta >= 1.0) || !std::isfinite(beta)) {
        throw Error(Errc::invalid_argument, "beta must be >= 1");
    }
    if (time_budget_ms <= 0) {
        throw Error(Errc::invalid_argument, "time budget must be positive");
    }
    if (!(epsilon > 0.0)) {
        throw Error(Errc::invalid_argument, "epsilon must be positive");
    }
    if (min_cluster_size < 1) {
        throw Error(Errc::invalid_argument, "min_cluster_size must be >= 1");
    }
}

std::size_t ClusteringSolution::attribute_count() const noexcept {
    std::size_t total = 0;
    for (const auto& p : patterns) {
        total += p.attributes.size();
    }
    return total;
}

std::vector<std::size_t> ClusteringSolution::labels(std::size_t n) const {
    std::vector<std::size_t> out(n, 0);
    for (std::size_t c = 0; c < patterns.size(); ++c) {
        for (auto p : patterns[c].points) {
            out.at(p) = c;
        }
    }
    return out;
}

}  // namespace sicut
