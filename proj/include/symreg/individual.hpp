#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "symreg/canonical.hpp"
#include "symreg/common.hpp"
#include "symreg/dataset.hpp"
#include "symreg/expr.hpp"
#include "symreg/fitting.hpp"
#include "symreg/grammar.hpp"
#include "symreg/options.hpp"
#include "symreg/rng.hpp"

namespace symreg {

/// One candidate expression with its fitted parameters and attributes.
/// `born` is the generation index whose population it first competed in;
/// after every selection, age == current generation - born.
struct Individual {
    Expr expr;
    Measures measures;
    int complexity = 0; // exported as "compl" (reserved token in C++)
    double recursive_compl = 0;
    int n_params = 0;
    int age = 0;
    bool valid = false;
    int born = 0;
};

/// Exported attribute names, in report-column order.
inline constexpr std::array<std::string_view, 13> kAttributeNames{
    "ms_processed_e", "mse",   "mae",     "max_ae",         "minus_r2", "mare", "q75_are",
    "max_are",        "compl", "recursive_compl", "n_params", "age",    "valid"};

inline double attribute_value(const Individual& ind, std::size_t idx)
{
    switch (idx) {
    case 0: return ind.measures.ms_processed_e;
    case 1: return ind.measures.mse;
    case 2: return ind.measures.mae;
    case 3: return ind.measures.max_ae;
    case 4: return ind.measures.minus_r2;
    case 5: return ind.measures.mare;
    case 6: return ind.measures.q75_are;
    case 7: return ind.measures.max_are;
    case 8: return double(ind.complexity);
    case 9: return ind.recursive_compl;
    case 10: return double(ind.n_params);
    case 11: return double(ind.age);
    case 12: return ind.valid ? 1.0 : 0.0;
    }
    throw ConfigError("attribute index out of range");
}

inline std::size_t attribute_index(std::string_view name)
{
    for (std::size_t i = 0; i < kAttributeNames.size(); ++i)
        if (kAttributeNames[i] == name) return i;
    throw ConfigError("unknown attribute '" + std::string(name) + "'");
}

inline double attribute_value(const Individual& ind, std::string_view name)
{
    return attribute_value(ind, attribute_index(name));
}

/// Resolve selection objective names; any attribute may drive selection
/// except `valid`.
inline std::vector<std::size_t> objective_indices(const std::vector<std::string>& names)
{
    if (names.empty()) throw ConfigError("objective list must be non-empty");
    std::vector<std::size_t> out;
    out.reserve(names.size());
    for (const auto& n : names) {
        auto idx = attribute_index(n);
        if (kAttributeNames[idx] == "valid")
            throw ConfigError("'valid' cannot be used as a selection objective");
        out.push_back(idx);
    }
    return out;
}

/// The instantiation pipeline. In order: redundant-parameter removal,
/// trimming to max_nodes, canonical reordering, grammar check, parameter
/// identification plus measures, the constraint and singularity hooks
/// (pass-through placeholders until those features exist), attribute
/// determination. Any failed stage invalidates the candidate, which the
/// caller discards.
inline std::optional<Individual> instantiate_individual(Expr expr, const Dataset& data,
                                                        const Options& opts, int generation,
                                                        Rng& rng)
{
    expr = remove_redundant_params(std::move(expr));
    expr = trim_to_size(std::move(expr), opts.max_nodes, rng);
    expr = canonical_reorder(std::move(expr));
    if (!check_grammar(expr, opts.grammar)) return std::nullopt;
    if (max_var_index(expr) > data.cols()) return std::nullopt;

    auto fitted = fit_params_lm(expr, data, opts.residual, opts.fit, rng);
    if (!fitted) return std::nullopt;
    if (opts.constraint_hook && !opts.constraint_hook(fitted->expr, data)) return std::nullopt;
    auto m = compute_measures(fitted->expr, data, opts.residual);
    if (!m) return std::nullopt;
    if (opts.singularity_hook && !opts.singularity_hook(fitted->expr, data)) return std::nullopt;

    Individual ind;
    ind.expr = std::move(fitted->expr);
    ind.measures = *m;
    ind.complexity = complexity(ind.expr);
    ind.recursive_compl = recursive_complexity(ind.expr);
    ind.n_params = count_params(ind.expr);
    ind.age = 0;
    ind.valid = true;
    ind.born = generation;
    return ind;
}

} // namespace symreg
