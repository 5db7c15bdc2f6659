#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "symreg/common.hpp"
#include "symreg/config.hpp"
#include "symreg/dataset.hpp"

namespace symreg {

namespace detail {

inline std::vector<std::string> split_row(const std::string& line, char delim)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto next = line.find(delim, pos);
        out.push_back(trim(line.substr(pos, next - pos)));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

inline bool parse_cell(const std::string& cell, double& out)
{
    if (cell.empty()) return false;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && p == cell.data() + cell.size() && std::isfinite(out);
}

} // namespace detail

/// Load a delimiter-separated table (comma by default, tab when the header
/// contains one) and bind the configured columns: variables map to v1..vN
/// in config order (all non-target, non-weight columns when unspecified).
/// Any row with a missing or non-numeric selected field, a non-finite
/// value, or a non-positive weight is reported by row number; any such row
/// fails the load. The fit/validation split is drawn once from the seed.
inline Dataset load_dataset(const std::string& path, const RunConfig& cfg)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file '" + path + "'");

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    std::size_t first = 0;
    while (first < lines.size() && detail::trim(lines[first]).empty())
        ++first;
    if (first == lines.size()) throw DataError(path + ": no header row");

    const char delim = lines[first].find('\t') != std::string::npos ? '\t' : ',';
    const auto header = detail::split_row(lines[first], delim);

    auto column_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return int(i);
        std::string available;
        for (std::size_t i = 0; i < header.size(); ++i)
            available += (i ? ", " : "") + header[i];
        throw DataError(path + ": column '" + name + "' not found; available: " + available);
    };

    const int target_col = column_of(cfg.target_column);
    const int weight_col = cfg.weight_column.empty() ? -1 : column_of(cfg.weight_column);

    std::vector<int> var_cols;
    std::vector<std::string> var_names;
    if (cfg.variable_columns.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (int(i) != target_col && int(i) != weight_col) {
                var_cols.push_back(int(i));
                var_names.push_back(header[i]);
            }
    } else {
        for (const auto& name : cfg.variable_columns) {
            var_cols.push_back(column_of(name));
            var_names.push_back(name);
        }
    }
    if (var_cols.empty()) throw DataError(path + ": no variable columns");

    std::vector<std::vector<double>> x_rows;
    std::vector<double> y_vals;
    std::vector<double> w_vals;
    std::vector<std::string> errors;
    std::size_t n_bad = 0;
    auto report = [&](std::size_t lineno, const std::string& msg) {
        ++n_bad;
        if (errors.size() < 20)
            errors.push_back("row " + std::to_string(lineno) + ": " + msg);
    };

    for (std::size_t li = first + 1; li < lines.size(); ++li) {
        if (detail::trim(lines[li]).empty()) continue;
        const auto cells = detail::split_row(lines[li], delim);
        const std::size_t lineno = li + 1;
        if (cells.size() != header.size()) {
            report(lineno, "expected " + std::to_string(header.size()) + " fields, got "
                               + std::to_string(cells.size()));
            continue;
        }
        bool row_ok = true;
        auto cell = [&](int col, const std::string& name, double& out) {
            if (!detail::parse_cell(cells[std::size_t(col)], out)) {
                report(lineno, "column '" + name + "' value '" + cells[std::size_t(col)]
                                   + "' is not numeric");
                row_ok = false;
            }
        };
        std::vector<double> x(var_cols.size());
        for (std::size_t j = 0; j < var_cols.size(); ++j)
            cell(var_cols[j], var_names[j], x[j]);
        double y = 0;
        cell(target_col, cfg.target_column, y);
        double w = 1;
        if (weight_col >= 0) {
            cell(weight_col, cfg.weight_column, w);
            if (row_ok && !(w > 0)) {
                report(lineno, "column '" + cfg.weight_column + "' weight must be > 0, got "
                                   + cells[std::size_t(weight_col)]);
                row_ok = false;
            }
        }
        if (!row_ok) continue;
        x_rows.push_back(std::move(x));
        y_vals.push_back(y);
        if (weight_col >= 0) w_vals.push_back(w);
    }

    if (n_bad > 0) {
        std::string msg = path + ": " + std::to_string(n_bad) + " malformed value(s):";
        for (const auto& e : errors)
            msg += "\n  " + e;
        if (n_bad > errors.size())
            msg += "\n  ... and " + std::to_string(n_bad - errors.size()) + " more";
        throw DataError(msg);
    }
    if (x_rows.empty()) throw DataError(path + ": no data rows");

    Dataset data;
    data.X.resize(Eigen::Index(x_rows.size()), Eigen::Index(var_cols.size()));
    data.y.resize(Eigen::Index(y_vals.size()));
    for (std::size_t i = 0; i < x_rows.size(); ++i) {
        for (std::size_t j = 0; j < var_cols.size(); ++j)
            data.X(Eigen::Index(i), Eigen::Index(j)) = x_rows[i][j];
        data.y[Eigen::Index(i)] = y_vals[i];
    }
    if (weight_col >= 0) {
        data.weights.resize(Eigen::Index(w_vals.size()));
        for (std::size_t i = 0; i < w_vals.size(); ++i)
            data.weights[Eigen::Index(i)] = w_vals[i];
    }
    data.variable_names = var_names;
    assign_split(data, cfg.fit_fraction, cfg.options.seed);
    data.validate();
    return data;
}

} // namespace symreg
