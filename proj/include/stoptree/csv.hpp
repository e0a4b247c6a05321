#pragma once

#include "stoptree/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace stoptree {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Numeric table: header row plus row-major values.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<double> values; ///< row-major
    std::size_t n_rows = 0;

    double at(std::size_t row, std::size_t col) const {
        return values[row * columns.size() + col];
    }

    std::size_t column_index(const std::string& name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) {
            throw CsvError("column '" + name + "' not found");
        }
        return static_cast<std::size_t>(it - columns.begin());
    }
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delimiter) {
            fields.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

inline std::string strip_quotes(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = s.substr(1, s.size() - 2);
    }
    return std::string(s);
}

} // namespace detail

/// Read a delimiter-separated numeric table. The first row is a required
/// header; every cell below it must parse as a finite real. Errors carry
/// the origin name, 1-based line number and the offending column.
inline CsvTable read_csv(std::istream& in, char delimiter = ',',
                         const std::string& origin = "<input>") {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) {
        throw CsvError(origin + ": empty input, expected a header row");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    for (const auto field : detail::split_fields(line, delimiter)) {
        table.columns.push_back(detail::strip_quotes(field));
    }
    if (table.columns.empty() || (table.columns.size() == 1 && table.columns[0].empty())) {
        throw CsvError(origin + ": header row is empty");
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue; // ignore blank lines (commonly a trailing newline)
        }
        const auto fields = detail::split_fields(line, delimiter);
        if (fields.size() != table.columns.size()) {
            throw CsvError(origin + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(table.columns.size()) + " fields, found " +
                           std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string_view cell = fields[c];
            const auto fail = [&](const char* what) {
                throw CsvError(origin + ":" + std::to_string(line_no) + ": column '" +
                               table.columns[c] + "': " + what + " '" + std::string(cell) + "'");
            };
            if (cell.empty()) {
                fail("missing value");
            }
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
                fail("not a numeric value");
            }
            if (!std::isfinite(v)) {
                fail("non-finite value");
            }
            table.values.push_back(v);
        }
        ++table.n_rows;
    }
    return table;
}

inline CsvTable read_csv_file(const std::string& path, char delimiter = ',') {
    std::ifstream in(path);
    if (!in) {
        throw CsvError("cannot open '" + path + "' for reading");
    }
    return read_csv(in, delimiter, path);
}

/// How to turn a CSV file into a fitting dataset.
struct IngestSpec {
    std::string path;
    std::string target;
    std::vector<std::string> features; ///< empty: every column but the target
    char delimiter = ',';
};

struct Dataset {
    NodeData data;
    std::string target_name;
    std::vector<std::string> feature_names;
};

inline Dataset ingest_csv(const IngestSpec& spec) {
    const CsvTable table = read_csv_file(spec.path, spec.delimiter);
    if (table.n_rows == 0) {
        throw CsvError(spec.path + ": no data rows");
    }

    Dataset ds;
    ds.target_name = spec.target;
    const std::size_t target_col = table.column_index(spec.target);

    std::vector<std::size_t> feature_cols;
    if (spec.features.empty()) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c != target_col) {
                feature_cols.push_back(c);
            }
        }
    } else {
        for (const auto& name : spec.features) {
            const std::size_t c = table.column_index(name);
            if (c == target_col) {
                throw CsvError("feature '" + name + "' is also the target column");
            }
            feature_cols.push_back(c);
        }
    }
    if (feature_cols.empty()) {
        throw CsvError(spec.path + ": no feature columns left after removing the target");
    }

    const std::size_t n = table.n_rows;
    ds.data.d = feature_cols.size();
    ds.data.y.resize(n);
    ds.data.x.resize(n * feature_cols.size());
    ds.data.row_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.data.row_ids[i] = i;
        ds.data.y[i] = table.at(i, target_col);
    }
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
        ds.feature_names.push_back(table.columns[feature_cols[j]]);
        for (std::size_t i = 0; i < n; ++i) {
            ds.data.x[j * n + i] = table.at(i, feature_cols[j]);
        }
    }
    return ds;
}

/// Feature-only view of a table, for prediction inputs.
inline NodeData table_to_features(const CsvTable& table,
                                  const std::vector<std::string>& features = {}) {
    std::vector<std::size_t> cols;
    if (features.empty()) {
        cols.resize(table.columns.size());
        std::iota(cols.begin(), cols.end(), std::size_t{0});
    } else {
        for (const auto& name : features) {
            cols.push_back(table.column_index(name));
        }
    }
    NodeData node;
    node.d = cols.size();
    const std::size_t n = table.n_rows;
    node.y.assign(n, 0.0);
    node.row_ids.resize(n);
    std::iota(node.row_ids.begin(), node.row_ids.end(), std::size_t{0});
    node.x.resize(n * cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            node.x[j * n + i] = table.at(i, cols[j]);
        }
    }
    return node;
}

} // namespace stoptree
