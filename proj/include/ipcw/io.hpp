#pragma once

// CSV dataset ingestion and JSON/CSV serialization helpers.
//
// Dataset CSV: a header row naming the columns `time` (float), `status`
// (integer, 0 = censored), covariates `x1`..`xp` (floats) and optionally `z`
// (integer stratum). Other numeric columns are carried along untouched.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ipcw/censoring.hpp"
#include "ipcw/dataset.hpp"
#include "ipcw/errors.hpp"
#include "ipcw/oracle.hpp"
#include "ipcw/outcome.hpp"

namespace ipcw::io {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> lines;  // source line of each row, header = 1

    std::size_t line_of(std::size_t row) const { return row < lines.size() ? lines[row] : row + 2; }

    std::optional<std::size_t> find(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    }

    std::size_t column(const std::string& name) const {
        if (auto c = find(name)) return *c;
        throw DataFormatError(1, "missing required column '" + name + "'");
    }
};

namespace detail {

inline std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_number(const std::string& text, std::size_t line, const std::string& column) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (text.empty() || ec != std::errc() || ptr != last) {
        throw DataFormatError(line, "column '" + column + "': '" + text + "' is not a number");
    }
    return value;
}

// Covariate columns x1, x2, ... ordered by their number.
inline std::vector<std::size_t> covariate_columns(const CsvTable& table) {
    std::vector<std::pair<int, std::size_t>> found;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
        const auto& name = table.header[c];
        if (name.size() < 2 || name[0] != 'x') continue;
        int number = 0;
        const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), number);
        if (ec == std::errc() && ptr == name.data() + name.size()) found.emplace_back(number, c);
    }
    std::sort(found.begin(), found.end());
    std::vector<std::size_t> columns;
    for (const auto& f : found) columns.push_back(f.second);
    return columns;
}

inline int as_integer(double value, std::size_t line, const std::string& column) {
    if (value != std::floor(value) || !std::isfinite(value)) {
        throw DataFormatError(line, "column '" + column + "' must hold integers");
    }
    return static_cast<int>(value);
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw DataFormatError(line_no, "expected " + std::to_string(table.header.size()) + " fields, found " +
                                               std::to_string(cells.size()));
        }
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) row[c] = detail::parse_number(cells[c], line_no, table.header[c]);
        table.rows.push_back(std::move(row));
        table.lines.push_back(line_no);
    }
    if (table.header.empty()) throw DataFormatError(1, "missing header row");
    return table;
}

inline std::string format_number(double value) {
    if (std::isnan(value)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

inline void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
    }
}

struct DatasetOptions {
    OutcomeSpec outcome;
    bool intercept = true;
    std::optional<std::string> strata_column;  // explicit integer labels
    std::optional<int> strata_bins;            // bin a covariate into k strata
    std::string bin_covariate = "x1";
};

inline Dataset load_dataset(const CsvTable& table, const DatasetOptions& options) {
    if (options.strata_column && options.strata_bins) {
        throw std::invalid_argument("stratify either by a column or by binning a covariate, not both");
    }
    if (table.rows.empty()) throw DataFormatError(1, "no data rows");
    const std::size_t time_col = table.column("time");
    const std::size_t status_col = table.column("status");
    const auto x_cols = detail::covariate_columns(table);

    std::vector<ObservedRecord> records;
    records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        ObservedRecord rec;
        rec.exit_time = row[time_col];
        if (!(rec.exit_time > 0.0) || !std::isfinite(rec.exit_time)) {
            throw DataFormatError(table.line_of(r), "time must be positive and finite");
        }
        rec.exit_type = detail::as_integer(row[status_col], table.line_of(r), "status");
        if (rec.exit_type < 0) throw DataFormatError(table.line_of(r), "status must be non-negative");
        if (options.intercept) rec.covariates.push_back(1.0);
        for (auto c : x_cols) rec.covariates.push_back(row[c]);
        records.push_back(std::move(rec));
    }
    if (records.front().covariates.empty()) throw DataFormatError(1, "no covariates and no intercept");

    if (options.strata_column) {
        const std::size_t z_col = table.column(*options.strata_column);
        int k = 0;
        for (std::size_t r = 0; r < records.size(); ++r) {
            const int z = detail::as_integer(table.rows[r][z_col], table.line_of(r), *options.strata_column);
            if (z < 0) throw DataFormatError(table.line_of(r), "stratum labels must be non-negative");
            records[r].stratum = z;
            k = std::max(k, z + 1);
        }
        return Dataset(std::move(records), options.outcome, k);
    }
    if (options.strata_bins) {
        const auto pos = std::find(x_cols.begin(), x_cols.end(), table.column(options.bin_covariate));
        if (pos == x_cols.end()) throw DataFormatError(1, "'" + options.bin_covariate + "' is not a covariate column");
        const auto index = static_cast<std::size_t>(pos - x_cols.begin()) + (options.intercept ? 1 : 0);
        return Dataset(std::move(records), options.outcome, Stratifier::covariate_bins(index, *options.strata_bins));
    }
    return Dataset(std::move(records), options.outcome, 1);
}

inline nlohmann::json to_json(const CensoringCurve& curve) {
    return {{"stratum", curve.stratum},
            {"jump_times", curve.jump_times},
            {"hazard_increments", curve.hazard_increments},
            {"survival_values", curve.survival_values},
            {"at_risk_counts", curve.at_risk_counts},
            {"censoring_counts", curve.censoring_counts}};
}

inline nlohmann::json to_json(const StratifiedCensoring& fit) {
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& c : fit.curves) curves.push_back(to_json(c));
    return {{"strata", curves}, {"stratum_sizes", fit.stratum_sizes}};
}

inline nlohmann::json to_json(const oracle::OracleReport& r) {
    auto per_type = [](const std::array<double, 3>& v) {
        return nlohmann::json{{"ind", v[oracle::Ind]}, {"out", v[oracle::Out]}, {"pse", v[oracle::Pse]}};
    };
    return {{"p", r.params.p},
            {"q", r.params.q},
            {"s", r.params.s},
            {"contrast", {r.params.a[0], r.params.a[1]}},
            {"f1", r.f.f1},
            {"f2", r.f.f2},
            {"f3", r.f.f3},
            {"f4", r.f.f4},
            {"j_inv", {{r.j_inv(0, 0), r.j_inv(0, 1)}, {r.j_inv(1, 0), r.j_inv(1, 1)}}},
            {"survival_at_s", r.survival_at_s},
            {"sigma_uncensored", r.sigma_uncensored},
            {"phi", per_type(r.phi)},
            {"phi_prime", per_type(r.phi_prime)},
            {"sigma", per_type(r.sigma)},
            {"sigma_prime", per_type(r.sigma_prime)}};
}

}  // namespace ipcw::io
