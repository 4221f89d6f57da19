#ifndef SICUT_INGESTION_HPP
#define SICUT_INGESTION_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sicut/model.hpp"

namespace sicut {

enum class ColumnType { boolean, real, categorical, ignore };

const char* to_string(ColumnType type) noexcept;
ColumnType parse_column_type(const std::string& text);

/// Declared column types by column name. Columns not listed are inferred.
struct SchemaSpec {
    std::map<std::string, ColumnType> columns;

    /// Parses a JSON object mapping column name to "boolean", "real", "categorical" or "ignore".
    static SchemaSpec from_json(const std::string& text);
};

struct LoadedDataset {
    Dataset dataset;
    /// Non-fatal notes: dropped constant columns, scale warnings.
    std::vector<std::string> warnings;
};

/// Rows above which a scale warning is emitted.
inline constexpr std::size_t warn_points = 100000;
inline constexpr std::size_t warn_attributes = 500;

/**
 * Parses a delimited table with a mandatory header row. The delimiter is a comma, or a tab when
 * the header has tabs and no commas. Double-quoted fields are supported.
 *
 * Inference: a column whose values all parse as numbers is real; otherwise one with at most two
 * distinct values is boolean and anything else categorical. Categorical and two-valued textual
 * columns expand to indicators named "col=value"; a two-valued column keeps only the indicator of
 * its lexicographically first value. Boolean columns written as 0/1, true/false or yes/no keep
 * their name.
 *
 * Throws `Error(Errc::ingestion)` on missing values, non-numeric values in real columns, or
 * unusable boolean values, with the offending row (1-based, header excluded) and column.
 */
LoadedDataset parse_dataset(const std::string& text, const std::optional<SchemaSpec>& schema = std::nullopt);
LoadedDataset load_dataset(const std::string& path, const std::optional<SchemaSpec>& schema = std::nullopt);

/// Two numeric columns, optional "x,y" header, exactly `expected_rows` rows.
Embedding parse_embedding(const std::string& text, std::size_t expected_rows);
Embedding load_embedding(const std::string& path, std::size_t expected_rows);

/**
 * First two principal components of the z-scored data. Each component's largest-magnitude loading
 * is made positive. Throws `Error(Errc::invalid_argument)` when m < 2.
 */
Embedding pca_embedding(const Dataset& data);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace sicut

#endif
