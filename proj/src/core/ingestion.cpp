#include "sicut/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include "json.hpp"

namespace sicut {

const char* to_string(ColumnType type) noexcept {
    switch (type) {
    case ColumnType::boolean:
        return "boolean";
    case ColumnType::real:
        return "real";
    case ColumnType::categorical:
        return "categorical";
    case ColumnType::ignore:
        return "ignore";
    }
    return "real";
}

ColumnType parse_column_type(const std::string& text) {
    if (text == "boolean" || text == "bool") {
        return ColumnType::boolean;
    }
    if (text == "real") {
        return ColumnType::real;
    }
    if (text == "categorical") {
        return ColumnType::categorical;
    }
    if (text == "ignore") {
        return ColumnType::ignore;
    }
    throw Error(Errc::ingestion, "unknown column type '" + text + "'");
}

SchemaSpec SchemaSpec::from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ingestion, std::string("schema is not valid JSON: ") + e.what());
    }
    if (doc.contains("columns") && doc["columns"].is_object()) {
        doc = doc["columns"];
    }
    if (!doc.is_object()) {
        throw Error(Errc::ingestion, "schema must map column names to types");
    }
    SchemaSpec spec;
    for (const auto& [name, type] : doc.items()) {
        if (!type.is_string()) {
            throw Error(Errc::ingestion, "type of column '" + name + "' must be a string");
        }
        spec.columns[name] = parse_column_type(type.get<std::string>());
    }
    return spec;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::io, "cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(Errc::io, "cannot write '" + path + "'");
    }
    out << contents;
    if (!out) {
        throw Error(Errc::io, "failed writing '" + path + "'");
    }
}

namespace {

using Table = std::vector<std::vector<std::string>>;

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return std::string(s);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(trim(field));
    return fields;
}

Table parse_table(const std::string& text, char delim) {
    Table rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        rows.push_back(split_line(line, delim));
    }
    return rows;
}

char detect_delimiter(const std::string& text) {
    const std::string header = text.substr(0, text.find('\n'));
    return header.find('\t') != std::string::npos && header.find(',') == std::string::npos ? '\t' : ',';
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') {
        ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

bool is_missing(const std::string& s) {
    static const std::set<std::string> tokens{"", "na", "n/a", "nan", "null", "none", "?"};
    return tokens.count(lower(s)) != 0;
}

std::optional<double> parse_boolean(const std::string& s) {
    const std::string v = lower(s);
    if (v == "1" || v == "true" || v == "yes") {
        return 1.0;
    }
    if (v == "0" || v == "false" || v == "no") {
        return 0.0;
    }
    return std::nullopt;
}

std::string where(std::size_t row, const std::string& column) {
    return "row " + std::to_string(row + 1) + ", column '" + column + "'";
}

struct Column {
    std::vector<Attribute> attributes;
    /// Column-major values, one vector per produced attribute.
    std::vector<std::vector<double>> values;
};

Column expand_indicators(const std::string& name, const std::vector<std::string>& cells,
                         std::vector<std::string>& warnings) {
    std::set<std::string> distinct(cells.begin(), cells.end());
    Column col;
    if (distinct.size() < 2) {
        warnings.push_back("column '" + name + "' is constant and was dropped");
        return col;
    }
    std::vector<std::string> levels(distinct.begin(), distinct.end());
    if (levels.size() == 2) {
        levels.pop_back();
    }
    for (const auto& level : levels) {
        col.attributes.push_back({name + "=" + level, AttributeType::boolean});
        std::vector<double> v(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            v[i] = cells[i] == level ? 1.0 : 0.0;
        }
        col.values.push_back(std::move(v));
    }
    return col;
}

Column convert_column(const std::string& name, const std::vector<std::string>& cells,
                      std::optional<ColumnType> declared, std::vector<std::string>& warnings) {
    if (declared == ColumnType::ignore) {
        return {};
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (is_missing(cells[i])) {
            throw Error(Errc::ingestion, "missing value at " + where(i, name));
        }
    }

    ColumnType type;
    if (declared) {
        type = *declared;
    } else {
        const bool numeric = std::all_of(cells.begin(), cells.end(), [](const auto& c) { return parse_number(c).has_value(); });
        if (numeric) {
            type = ColumnType::real;
        } else {
            std::set<std::string> distinct(cells.begin(), cells.end());
            type = distinct.size() <= 2 ? ColumnType::boolean : ColumnType::categorical;
        }
    }

    Column col;
    switch (type) {
    case ColumnType::ignore:
        return col;
    case ColumnType::real: {
        std::vector<double> v(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            auto x = parse_number(cells[i]);
            if (!x) {
                throw Error(Errc::ingestion, "non-numeric value '" + cells[i] + "' at " + where(i, name));
            }
            v[i] = *x;
        }
        col.attributes.push_back({name, AttributeType::real});
        col.values.push_back(std::move(v));
        return col;
    }
    case ColumnType::boolean: {
        std::vector<double> v(cells.size());
        bool truthy = true;
        for (std::size_t i = 0; i < cells.size() && truthy; ++i) {
            auto b = parse_boolean(cells[i]);
            truthy = b.has_value();
            if (truthy) {
                v[i] = *b;
            }
        }
        if (truthy) {
            const bool constant = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
            if (constant) {
                warnings.push_back("column '" + name + "' is constant and was dropped");
                return col;
            }
            col.attributes.push_back({name, AttributeType::boolean});
            col.values.push_back(std::move(v));
            return col;
        }
        std::set<std::string> distinct(cells.begin(), cells.end());
        if (declared || distinct.size() > 2) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (!parse_boolean(cells[i])) {
                    throw Error(Errc::ingestion, "value '" + cells[i] + "' is not boolean at " + where(i, name));
                }
            }
        }
        return expand_indicators(name, cells, warnings);
    }
    case ColumnType::categorical:
        return expand_indicators(name, cells, warnings);
    }
    return col;
}

}  // namespace

LoadedDataset parse_dataset(const std::string& text, const std::optional<SchemaSpec>& schema) {
    const Table table = parse_table(text, detect_delimiter(text));
    if (table.empty()) {
        throw Error(Errc::ingestion, "dataset is empty (a header row is required)");
    }
    const auto& header = table.front();
    std::set<std::string> names;
    for (const auto& h : header) {
        if (h.empty()) {
            throw Error(Errc::ingestion, "header has an empty column name");
        }
        if (!names.insert(h).second) {
            throw Error(Errc::ingestion, "duplicate column name '" + h + "'");
        }
    }
    if (schema) {
        for (const auto& [name, type] : schema->columns) {
            if (names.count(name) == 0) {
                throw Error(Errc::ingestion, "schema names unknown column '" + name + "'");
            }
        }
    }
    const std::size_t rows = table.size() - 1;
    for (std::size_t r = 1; r < table.size(); ++r) {
        if (table[r].size() != header.size()) {
            throw Error(Errc::ingestion, "row " + std::to_string(r) + " has " + std::to_string(table[r].size()) +
                                             " fields, expected " + std::to_string(header.size()));
        }
    }
    if (rows < 2) {
        throw Error(Errc::ingestion, "dataset needs at least two rows");
    }

    LoadedDataset out;
    std::vector<Attribute> attributes;
    std::vector<std::vector<double>> columns;
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::optional<ColumnType> declared;
        if (schema) {
            auto it = schema->columns.find(header[c]);
            if (it != schema->columns.end()) {
                declared = it->second;
            }
        }
        std::vector<std::string> cells(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            cells[r] = table[r + 1][c];
        }
        Column col = convert_column(header[c], cells, declared, out.warnings);
        for (std::size_t a = 0; a < col.attributes.size(); ++a) {
            attributes.push_back(std::move(col.attributes[a]));
            columns.push_back(std::move(col.values[a]));
        }
    }
    if (attributes.empty()) {
        throw Error(Errc::ingestion, "no usable columns");
    }

    const std::size_t m = attributes.size();
    std::vector<double> values(rows * m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < rows; ++i) {
            values[i * m + j] = columns[j][i];
        }
    }
    if (rows > warn_points) {
        out.warnings.push_back(std::to_string(rows) + " points; searches may reach few iterations");
    }
    if (m > warn_attributes) {
        out.warnings.push_back(std::to_string(m) + " attributes; searches may reach few iterations");
    }
    out.dataset = Dataset(std::move(attributes), std::move(values));
    return out;
}

LoadedDataset load_dataset(const std::string& path, const std::optional<SchemaSpec>& schema) {
    return parse_dataset(read_file(path), schema);
}

Embedding parse_embedding(const std::string& text, std::size_t expected_rows) {
    Table table = parse_table(text, detect_delimiter(text));
    if (!table.empty() && table.front().size() == 2 && lower(table.front()[0]) == "x" &&
        lower(table.front()[1]) == "y") {
        table.erase(table.begin());
    }
    std::vector<Embedding::Point> coords;
    coords.reserve(table.size());
    for (std::size_t r = 0; r < table.size(); ++r) {
        if (table[r].size() != 2) {
            throw Error(Errc::ingestion, "embedding row " + std::to_string(r + 1) + " has " +
                                             std::to_string(table[r].size()) +
                                             " columns; only 2D embeddings are supported");
        }
        auto x = parse_number(table[r][0]);
        auto y = parse_number(table[r][1]);
        if (!x || !y) {
            throw Error(Errc::ingestion, "embedding row " + std::to_string(r + 1) + " is not a pair of finite numbers");
        }
        coords.push_back({*x, *y});
    }
    if (coords.size() != expected_rows) {
        throw Error(Errc::ingestion, "embedding has " + std::to_string(coords.size()) + " rows, expected " +
                                         std::to_string(expected_rows));
    }
    return Embedding(std::move(coords));
}

Embedding load_embedding(const std::string& path, std::size_t expected_rows) {
    return parse_embedding(read_file(path), expected_rows);
}

Embedding pca_embedding(const Dataset& data) {
    const std::size_t n = data.n();
    const std::size_t m = data.m();
    if (m < 2) {
        throw Error(Errc::invalid_argument, "PCA embedding needs at least two attributes");
    }
    Eigen::MatrixXd z(n, m);
    for (std::size_t j = 0; j < m; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean += data.at(i, j);
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = data.at(i, j) - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sd > 0.0 ? (data.at(i, j) - mean) / sd : 0.0;
        }
    }
    const Eigen::MatrixXd cov = (z.transpose() * z) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw Error(Errc::invalid_argument, "PCA eigendecomposition failed");
    }
    const auto& values = solver.eigenvalues();
    const double top = std::max(values(static_cast<Eigen::Index>(m - 1)), 0.0);

    Eigen::MatrixXd projected = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 2);
    for (int c = 0; c < 2; ++c) {
        const Eigen::Index col = static_cast<Eigen::Index>(m) - 1 - c;
        if (values(col) <= 1e-12 * top || top == 0.0) {
            continue;
        }
        Eigen::VectorXd loading = solver.eigenvectors().col(col);
        Eigen::Index largest = 0;
        for (Eigen::Index j = 1; j < loading.size(); ++j) {
            if (std::abs(loading(j)) > std::abs(loading(largest)) + 1e-12) {
                largest = j;
            }
        }
        if (loading(largest) < 0.0) {
            loading = -loading;
        }
        projected.col(c) = z * loading;
    }
    std::vector<Embedding::Point> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        coords[i] = {projected(static_cast<Eigen::Index>(i), 0), projected(static_cast<Eigen::Index>(i), 1)};
    }
    return Embedding(std::move(coords));
}

}  // namespace sicut
