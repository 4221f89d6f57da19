#ifndef SICUT_MODEL_HPP
#define SICUT_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

/**
 * @file model.hpp
 *
 * @brief Dataset, embedding, pattern and solution types shared by every module.
 */

namespace sicut {

/**
 * Failure categories. The C API maps each one onto a stable error code.
 */
enum class Errc {
    invalid_argument,
    ingestion,
    degenerate_cluster,
    version_mismatch,
    schema_mismatch,
    io,
    conflict,
    not_found,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

enum class AttributeType : std::uint8_t { boolean, real };

const char* to_string(AttributeType type) noexcept;

struct Attribute {
    std::string name;
    AttributeType type = AttributeType::real;
};

/**
 * @brief An n x m data matrix with a per-column type schema.
 *
 * Boolean attributes are stored as exactly 0 or 1. Rows are points, in file order.
 */
class Dataset {
public:
    Dataset() = default;

    /**
     * @param schema One entry per column.
     * @param values Row-major values, `rows * schema.size()` entries.
     *
     * Throws `Error(Errc::invalid_argument)` when n < 2, m < 1, a boolean value is not 0/1,
     * or any value is non-finite.
     */
    Dataset(std::vector<Attribute> schema, std::vector<double> values);

    std::size_t n() const noexcept { return n_; }
    std::size_t m() const noexcept { return schema_.size(); }

    double at(std::size_t point, std::size_t attribute) const noexcept { return values_[point * m() + attribute]; }

    std::span<const double> row(std::size_t point) const noexcept {
        return {values_.data() + point * m(), m()};
    }

    const std::vector<Attribute>& schema() const noexcept { return schema_; }
    const Attribute& attribute(std::size_t j) const { return schema_.at(j); }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Rows `points` (in the given order) as a new dataset.
    Dataset subset(std::span<const std::size_t> points) const;

private:
    std::vector<Attribute> schema_;
    std::vector<double> values_;
    std::size_t n_ = 0;
};

/**
 * @brief n x 2 low-dimensional coordinates, one row per dataset point.
 */
class Embedding {
public:
    struct Point {
        double x = 0.0;
        double y = 0.0;
    };

    Embedding() = default;
    explicit Embedding(std::vector<Point> coords);

    std::size_t n() const noexcept { return coords_.size(); }
    const Point& operator[](std::size_t i) const noexcept { return coords_[i]; }
    const std::vector<Point>& coords() const noexcept { return coords_; }

private:
    std::vector<Point> coords_;
};

struct BooleanStat {
    double frequency = 0.5;
};

struct RealStat {
    double mean = 0.0;
    double stdev = 1.0;
};

using AttributeStatistics = std::variant<BooleanStat, RealStat>;

/// Number of statistics an attribute contributes to the description: 1 for boolean, 2 for real.
inline int statistic_count(AttributeType type) noexcept { return type == AttributeType::boolean ? 1 : 2; }

/**
 * @brief Maximum-likelihood statistics of every attribute over the full dataset.
 */
struct PriorModel {
    std::vector<AttributeStatistics> statistics;
    /// Global per-attribute mean, also used as the centring constant for sufficient statistics.
    std::vector<double> centers;
    /// Absolute variance floor per attribute (zero for boolean attributes).
    std::vector<double> variance_floor;
    double epsilon = 1e-4;
    /// Boolean frequency clamp bound, 1/(2n).
    double clamp = 0.0;
};

enum class Linkage : std::uint8_t { single, complete, average };

const char* to_string(Linkage linkage) noexcept;
Linkage parse_linkage(const std::string& text);

struct Hyperparameters {
    double alpha = 250.0;
    double beta = 1.6;
    std::int64_t time_budget_ms = 5000;
    Linkage linkage = Linkage::single;
    double epsilon = 1e-4;
    std::size_t min_cluster_size = 1;

    /// Throws `Error(Errc::invalid_argument)` unless alpha >= 0, beta >= 1, budget > 0, epsilon > 0.
    void validate() const;
};

/**
 * @brief A set of points, a set of attributes and the statistics of those attributes on those points.
 *
 * `attributes` is ordered by decreasing information; `statistics` is aligned with it.
 */
struct BiclusterPattern {
    std::vector<std::size_t> points;
    std::vector<std::size_t> attributes;
    std::vector<AttributeStatistics> statistics;
};

using NodeId = std::size_t;

struct ClusteringSolution {
    /// Selected dendrogram nodes in insertion order; cluster c is induced by cut_set[c].
    std::vector<NodeId> cut_set;
    std::vector<BiclusterPattern> patterns;
    double total_information = 0.0;
    double complexity = 0.0;
    double si = 0.0;
    std::size_t iterations_completed = 0;

    std::size_t k() const noexcept { return patterns.size(); }
    std::size_t attribute_count() const noexcept;
    /// Cluster index per point.
    std::vector<std::size_t> labels(std::size_t n) const;
};

}  // namespace sicut

#endif
