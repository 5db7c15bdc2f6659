#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "symreg/common.hpp"
#include "symreg/engine.hpp"
#include "symreg/individual.hpp"
#include "symreg/text.hpp"

namespace symreg {

namespace detail {

inline std::vector<const Individual*> report_order(const std::vector<Individual>& members)
{
    std::vector<const Individual*> order;
    order.reserve(members.size());
    for (const auto& m : members)
        order.push_back(&m);
    std::sort(order.begin(), order.end(), [](const Individual* a, const Individual* b) {
        if (a->complexity != b->complexity) return a->complexity < b->complexity;
        if (a->measures.ms_processed_e != b->measures.ms_processed_e)
            return a->measures.ms_processed_e < b->measures.ms_processed_e;
        return print(a->expr) < print(b->expr);
    });
    return order;
}

inline std::string attribute_text(const Individual& ind, std::size_t idx)
{
    switch (idx) {
    case 8: return std::to_string(ind.complexity);
    case 10: return std::to_string(ind.n_params);
    case 11: return std::to_string(ind.age);
    case 12: return ind.valid ? "1" : "0";
    default: return format_double(attribute_value(ind, idx));
    }
}

} // namespace detail

/// Serialize the hall of fame as a comma-separated table: the printed
/// expression plus every attribute column. Expressions re-parse to
/// evaluation-identical trees; doubles print shortest-round-trip, so the
/// file is byte-stable for identical runs.
inline std::string hall_of_fame_csv(const std::vector<Individual>& members)
{
    std::ostringstream out;
    out << "expression";
    for (auto name : kAttributeNames)
        out << ',' << name;
    out << '\n';
    for (const Individual* m : detail::report_order(members)) {
        out << print(m->expr);
        for (std::size_t j = 0; j < kAttributeNames.size(); ++j)
            out << ',' << detail::attribute_text(*m, j);
        out << '\n';
    }
    return out.str();
}

/// Human-readable listing sorted by complexity, then by the fitted error.
inline std::string hall_of_fame_text(const std::vector<Individual>& members)
{
    std::ostringstream out;
    out << "hall of fame (" << members.size() << " expressions)\n";
    for (const Individual* m : detail::report_order(members)) {
        out << "  compl=" << m->complexity
            << "  ms_processed_e=" << format_double(m->measures.ms_processed_e)
            << "  mare=" << format_double(m->measures.mare) << "  n_params=" << m->n_params
            << "\n    " << print(m->expr) << "\n";
    }
    return out.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
}

/// Write both report files under the output directory and return their
/// paths (table first).
inline std::pair<std::filesystem::path, std::filesystem::path>
export_hall_of_fame(const std::vector<Individual>& members, const std::filesystem::path& out_dir)
{
    auto csv = out_dir / "hall_of_fame.csv";
    auto txt = out_dir / "report.txt";
    write_file(csv, hall_of_fame_csv(members));
    write_file(txt, hall_of_fame_text(members));
    return {csv, txt};
}

/// Expression column of a previously exported table, for resuming.
inline std::vector<std::string> load_expressions_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open hall-of-fame file '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        std::string expr = comma == std::string::npos ? line : line.substr(0, comma);
        if (header) {
            if (expr != "expression")
                throw DataError(path + ": not a hall-of-fame table (first column must be "
                                       "'expression', got '"
                                + expr + "')");
            header = false;
            continue;
        }
        out.push_back(expr);
    }
    return out;
}

/// One progress-log line: generation, wall time, hall-of-fame size, and
/// the per-island best mse / mare / complexity.
inline std::string progress_line(const Progress& p)
{
    std::ostringstream out;
    out << "gen " << p.generation << "  t=" << format_double(p.elapsed_s, 2) << "s  hof="
        << p.hof_size;
    for (std::size_t i = 0; i < p.best_mse.size(); ++i)
        out << "  [i" << i << " mse=" << format_double(p.best_mse[i], 3)
            << " mare=" << format_double(p.best_mare[i], 3) << " compl=" << p.best_compl[i]
            << "]";
    return out.str();
}

} // namespace symreg
