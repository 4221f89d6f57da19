#ifndef SICUT_PERSISTENCE_HPP
#define SICUT_PERSISTENCE_HPP

#include <optional>
#include <string>

#include "sicut/hierarchy.hpp"
#include "sicut/model.hpp"
#include "sicut/search.hpp"

namespace sicut {

inline constexpr int document_version = 1;

/// FNV-1a over the schema and every value, as 16 hex digits.
std::string schema_hash(const Dataset& data);

/**
 * @brief A session's hyperparameters and, once a search has run, its solution and trace.
 */
struct SolutionDocument {
    Hyperparameters hyperparameters;
    std::optional<ClusteringSolution> solution;
    SearchTrace trace;
};

/**
 * Serializes to JSON with sorted keys, two-space indentation and doubles at 17 significant digits,
 * so loading and saving again reproduces the same bytes.
 */
std::string save_document(const SolutionDocument& doc, const Dataset& data);

/**
 * Parses a document written by `save_document`.
 *
 * Throws `Error(Errc::version_mismatch)` for an unknown version, `Error(Errc::schema_mismatch)` when
 * the document was written for a different dataset, and `Error(Errc::invalid_argument)` when the
 * cut-set or labels do not fit the dendrogram.
 */
SolutionDocument load_document(const std::string& text, const Dataset& data, const Dendrogram& d);

}  // namespace sicut

#endif
