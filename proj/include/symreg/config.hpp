#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "symreg/common.hpp"
#include "symreg/individual.hpp"
#include "symreg/options.hpp"
#include "symreg/text.hpp"

namespace symreg {

/// A full run description: where the data lives, how columns bind to v1..vN,
/// and every engine option. Field defaults are the documented defaults; the
/// config file and then command-line overrides are layered on top.
struct RunConfig {
    std::string data_path;
    std::string target_column;
    std::vector<std::string> variable_columns; // empty = all remaining columns
    std::string weight_column;
    double fit_fraction = 0.8;
    std::string output_dir = "results";
    Options options;

    bool binary_weights_set = false;
    bool unary_weights_set = false;
    std::optional<double> fit_bound_low;
    std::optional<double> fit_bound_high;

    RunConfig() { options.grammar.forbid_param_in_exponent = true; }
};

namespace detail {

inline std::string trim(std::string s)
{
    auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t b = 0, e = s.size();
    while (b < e && issp(s[b])) ++b;
    while (e > b && issp(s[e - 1])) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split_list(const std::string& v, char sep)
{
    std::vector<std::string> out;
    if (trim(v).empty()) return out;
    std::size_t pos = 0;
    while (true) {
        auto next = v.find(sep, pos);
        out.push_back(trim(v.substr(pos, next - pos)));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

inline double cfg_real(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    double out = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size())
        throw ConfigError(key + ": '" + v + "' is not a number");
    return out;
}

inline long long cfg_int(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    long long out = 0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size())
        throw ConfigError(key + ": '" + v + "' is not an integer");
    return out;
}

inline bool cfg_bool(const std::string& key, const std::string& v)
{
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean (use true/false)");
}

inline std::vector<double> cfg_reals(const std::string& key, const std::string& v)
{
    std::vector<double> out;
    for (const auto& s : split_list(v, ','))
        out.push_back(cfg_real(key, s));
    return out;
}

inline Op cfg_op(const std::string& key, const std::string& name)
{
    auto op = op_from_name(trim(name));
    if (!op) throw ConfigError(key + ": unknown operator '" + name + "'");
    return *op;
}

inline std::string join(const std::vector<std::string>& parts, const char* sep)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

template <class T, class F>
inline std::string join_mapped(const std::vector<T>& xs, const char* sep, F f)
{
    std::vector<std::string> parts;
    parts.reserve(xs.size());
    for (const auto& x : xs)
        parts.push_back(f(x));
    return join(parts, sep);
}

inline std::size_t levenshtein(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t prev = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t cur = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                               prev + (a[i - 1] == b[j - 1] ? 0 : 1)});
            prev = cur;
        }
    }
    return row[b.size()];
}

} // namespace detail

/// One configurable key: how to parse it into a RunConfig and how to read
/// the current value back out (used for the generated reference and the
/// resolved-config listing).
struct ConfigKey {
    std::string name;
    std::string type;
    std::string doc;
    std::function<void(RunConfig&, const std::string&)> apply;
    std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_keys()
{
    using detail::cfg_bool;
    using detail::cfg_int;
    using detail::cfg_op;
    using detail::cfg_real;
    using detail::split_list;

    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;

        auto add = [&](std::string name, std::string type, std::string doc,
                       std::function<void(RunConfig&, const std::string&)> apply,
                       std::function<std::string(const RunConfig&)> get) {
            k.push_back({std::move(name), std::move(type), std::move(doc), std::move(apply),
                         std::move(get)});
        };
        auto positive_real = [](const std::string& key, const std::string& v) {
            double x = cfg_real(key, v);
            if (!(x > 0)) throw ConfigError(key + ": must be > 0");
            return x;
        };
        auto nonneg_real = [](const std::string& key, const std::string& v) {
            double x = cfg_real(key, v);
            if (x < 0) throw ConfigError(key + ": must be >= 0");
            return x;
        };
        auto int_at_least = [](const std::string& key, const std::string& v, long long lo) {
            long long x = cfg_int(key, v);
            if (x < lo)
                throw ConfigError(key + ": must be >= " + std::to_string(lo));
            return x;
        };

        add("data_path", "string", "input table (delimiter-separated with a header row)",
            [](RunConfig& c, const std::string& v) { c.data_path = detail::trim(v); },
            [](const RunConfig& c) { return c.data_path; });
        add("target_column", "string", "column fitted as y",
            [](RunConfig& c, const std::string& v) { c.target_column = detail::trim(v); },
            [](const RunConfig& c) { return c.target_column; });
        add("variable_columns", "list", "ordered columns bound to v1..vN; empty = all others",
            [](RunConfig& c, const std::string& v) { c.variable_columns = split_list(v, ','); },
            [](const RunConfig& c) { return detail::join(c.variable_columns, ","); });
        add("weight_column", "string", "optional strictly positive residual weights",
            [](RunConfig& c, const std::string& v) { c.weight_column = detail::trim(v); },
            [](const RunConfig& c) { return c.weight_column; });
        add("fit_fraction", "real", "fraction of rows used for parameter fitting, in (0, 1]; "
            "< 1 enables early stopping on the held-out rows",
            [](RunConfig& c, const std::string& v) {
                double x = cfg_real("fit_fraction", v);
                if (!(x > 0 && x <= 1)) throw ConfigError("fit_fraction: must be in (0, 1]");
                c.fit_fraction = x;
            },
            [](const RunConfig& c) { return format_double(c.fit_fraction); });
        add("output_dir", "string", "directory for reports and logs",
            [](RunConfig& c, const std::string& v) { c.output_dir = detail::trim(v); },
            [](const RunConfig& c) { return c.output_dir; });

        add("binary_operators", "list", "binary operators the search may use",
            [](RunConfig& c, const std::string& v) {
                c.options.ops.binary.clear();
                for (const auto& s : split_list(v, ',')) {
                    Op op = cfg_op("binary_operators", s);
                    if (!is_binary(op))
                        throw ConfigError("binary_operators: '" + s + "' is unary");
                    c.options.ops.binary.push_back(op);
                }
            },
            [](const RunConfig& c) {
                return detail::join_mapped(c.options.ops.binary, ",",
                                           [](Op o) { return std::string(op_name(o)); });
            });
        add("binary_weights", "list", "selection weight per binary operator",
            [](RunConfig& c, const std::string& v) {
                c.options.ops.binary_weights = detail::cfg_reals("binary_weights", v);
                c.binary_weights_set = true;
            },
            [](const RunConfig& c) {
                return detail::join_mapped(c.options.ops.binary_weights, ",",
                                           [](double w) { return format_double(w); });
            });
        add("unary_operators", "list", "unary operators the search may use",
            [](RunConfig& c, const std::string& v) {
                c.options.ops.unary.clear();
                for (const auto& s : split_list(v, ',')) {
                    Op op = cfg_op("unary_operators", s);
                    if (is_binary(op))
                        throw ConfigError("unary_operators: '" + s + "' is binary");
                    c.options.ops.unary.push_back(op);
                }
            },
            [](const RunConfig& c) {
                return detail::join_mapped(c.options.ops.unary, ",",
                                           [](Op o) { return std::string(op_name(o)); });
            });
        add("unary_weights", "list", "selection weight per unary operator",
            [](RunConfig& c, const std::string& v) {
                c.options.ops.unary_weights = detail::cfg_reals("unary_weights", v);
                c.unary_weights_set = true;
            },
            [](const RunConfig& c) {
                return detail::join_mapped(c.options.ops.unary_weights, ",",
                                           [](double w) { return format_double(w); });
            });

        add("banned_nestings", "list", "forbidden direct compositions as outer:inner pairs, "
            "e.g. cos:cos,exp:log",
            [](RunConfig& c, const std::string& v) {
                c.options.grammar.banned_nestings.clear();
                for (const auto& s : split_list(v, ',')) {
                    auto colon = s.find(':');
                    if (colon == std::string::npos)
                        throw ConfigError("banned_nestings: '" + s + "' is not outer:inner");
                    Op outer = cfg_op("banned_nestings", s.substr(0, colon));
                    Op inner = cfg_op("banned_nestings", s.substr(colon + 1));
                    c.options.grammar.banned_nestings.emplace_back(outer, inner);
                }
            },
            [](const RunConfig& c) {
                return detail::join_mapped(
                    c.options.grammar.banned_nestings, ",", [](const std::pair<Op, Op>& p) {
                        return std::string(op_name(p.first)) + ":" + std::string(op_name(p.second));
                    });
            });
        add("forbid_param_in_exponent", "bool",
            "keep fittable parameters out of composite pow exponents",
            [](RunConfig& c, const std::string& v) {
                c.options.grammar.forbid_param_in_exponent =
                    cfg_bool("forbid_param_in_exponent", v);
            },
            [](const RunConfig& c) {
                return c.options.grammar.forbid_param_in_exponent ? "true" : "false";
            });
        add("max_nodes", "int", "maximum nodes per expression",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.max_nodes = int(int_at_least("max_nodes", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.max_nodes); });

        struct MutW {
            const char* key;
            const char* doc;
            double MutationConfig::*field;
        };
        static const MutW mut_weights[] = {
            {"w_insert", "weight of the insert mutation", &MutationConfig::w_insert},
            {"w_point", "weight of the point mutation", &MutationConfig::w_point},
            {"w_addterm", "weight of the add-term mutation", &MutationConfig::w_addterm},
            {"w_hoist", "weight of the hoist mutation (depth > 2)", &MutationConfig::w_hoist},
            {"w_innergrow", "weight of the inner-grow mutation (depth > 2)",
             &MutationConfig::w_innergrow},
            {"w_subtree", "weight of the subtree mutation (depth > 2)", &MutationConfig::w_subtree},
            {"w_drastic", "weight of drastic simplification (depth > 2)",
             &MutationConfig::w_drastic},
            {"w_simplify", "weight of algebraic simplification (depth > 2)",
             &MutationConfig::w_simplify},
            {"w_crossover", "weight of crossover (depth > 2)", &MutationConfig::w_crossover},
        };
        for (const auto& mw : mut_weights) {
            std::string name = mw.key;
            auto field = mw.field;
            add(name, "real", mw.doc,
                [name, field, nonneg_real](RunConfig& c, const std::string& v) {
                    c.options.mutation.*field = nonneg_real(name, v);
                },
                [field](const RunConfig& c) { return format_double(c.options.mutation.*field); });
        }

        add("drastic_tolerance", "real", "parameters below this magnitude are dropped by "
            "drastic simplification",
            [positive_real](RunConfig& c, const std::string& v) {
                c.options.mutation.drastic_tolerance = positive_real("drastic_tolerance", v);
            },
            [](const RunConfig& c) { return format_double(c.options.mutation.drastic_tolerance); });
        add("max_snippet_depth", "int", "depth cap for random snippets used by mutations",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.mutation.max_snippet_depth = int(int_at_least("max_snippet_depth", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.mutation.max_snippet_depth); });
        add("depth_min", "int", "minimum depth of freshly generated expressions",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.mutation.depth_min = int(int_at_least("depth_min", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.mutation.depth_min); });
        add("depth_max", "int", "maximum depth of freshly generated expressions",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.mutation.depth_max = int(int_at_least("depth_max", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.mutation.depth_max); });
        add("param_init_low", "real", "lower bound for freshly drawn parameter values",
            [](RunConfig& c, const std::string& v) {
                double x = cfg_real("param_init_low", v);
                c.options.mutation.param_init_low = x;
                c.options.fit.param_init_low = x;
            },
            [](const RunConfig& c) { return format_double(c.options.mutation.param_init_low); });
        add("param_init_high", "real", "upper bound for freshly drawn parameter values",
            [](RunConfig& c, const std::string& v) {
                double x = cfg_real("param_init_high", v);
                c.options.mutation.param_init_high = x;
                c.options.fit.param_init_high = x;
            },
            [](const RunConfig& c) { return format_double(c.options.mutation.param_init_high); });

        add("fit_max_iterations", "int", "iteration cap for parameter identification",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.fit.max_iterations = int(int_at_least("fit_max_iterations", v, 0));
            },
            [](const RunConfig& c) { return std::to_string(c.options.fit.max_iterations); });
        add("fit_lambda0", "real", "initial damping of the fit",
            [positive_real](RunConfig& c, const std::string& v) {
                c.options.fit.lambda0 = positive_real("fit_lambda0", v);
            },
            [](const RunConfig& c) { return format_double(c.options.fit.lambda0); });
        add("fit_damping_up", "real", "damping multiplier after a rejected step (> 1)",
            [](RunConfig& c, const std::string& v) {
                double x = cfg_real("fit_damping_up", v);
                if (!(x > 1)) throw ConfigError("fit_damping_up: must be > 1");
                c.options.fit.damping_up = x;
            },
            [](const RunConfig& c) { return format_double(c.options.fit.damping_up); });
        add("fit_damping_down", "real", "damping divisor after an accepted step (> 1)",
            [](RunConfig& c, const std::string& v) {
                double x = cfg_real("fit_damping_down", v);
                if (!(x > 1)) throw ConfigError("fit_damping_down: must be > 1");
                c.options.fit.damping_down = x;
            },
            [](const RunConfig& c) { return format_double(c.options.fit.damping_down); });
        add("fit_patience", "int", "accepted steps of monotone validation worsening before "
            "early stop",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.fit.early_stop_patience = int(int_at_least("fit_patience", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.fit.early_stop_patience); });
        add("fit_restarts", "int", "random restarts when the initial point is invalid",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.fit.restarts = int(int_at_least("fit_restarts", v, 0));
            },
            [](const RunConfig& c) { return std::to_string(c.options.fit.restarts); });
        add("fit_fd_step", "real", "relative forward-difference step of the fit",
            [positive_real](RunConfig& c, const std::string& v) {
                c.options.fit.fd_step = positive_real("fit_fd_step", v);
            },
            [](const RunConfig& c) { return format_double(c.options.fit.fd_step); });
        add("fit_bound_low", "real", "optional lower parameter bound ('none' to disable)",
            [](RunConfig& c, const std::string& v) {
                if (detail::trim(v) == "none") {
                    c.fit_bound_low.reset();
                    return;
                }
                c.fit_bound_low = cfg_real("fit_bound_low", v);
            },
            [](const RunConfig& c) {
                return c.fit_bound_low ? format_double(*c.fit_bound_low) : "none";
            });
        add("fit_bound_high", "real", "optional upper parameter bound ('none' to disable)",
            [](RunConfig& c, const std::string& v) {
                if (detail::trim(v) == "none") {
                    c.fit_bound_high.reset();
                    return;
                }
                c.fit_bound_high = cfg_real("fit_bound_high", v);
            },
            [](const RunConfig& c) {
                return c.fit_bound_high ? format_double(*c.fit_bound_high) : "none";
            });

        add("pareto_objectives", "list", "attributes minimized by the Pareto selection stage",
            [](RunConfig& c, const std::string& v) {
                c.options.selection.pareto_objectives = split_list(v, ',');
            },
            [](const RunConfig& c) {
                return detail::join(c.options.selection.pareto_objectives, ",");
            });
        add("tournament_objectives", "list", "attributes minimized by the tournament stage",
            [](RunConfig& c, const std::string& v) {
                c.options.selection.tournament_objectives = split_list(v, ',');
            },
            [](const RunConfig& c) {
                return detail::join(c.options.selection.tournament_objectives, ",");
            });
        add("pareto_ratio", "real", "share of capacity filled by Pareto selection, in [0, 1]",
            [](RunConfig& c, const std::string& v) {
                double x = cfg_real("pareto_ratio", v);
                if (!(x >= 0 && x <= 1)) throw ConfigError("pareto_ratio: must be in [0, 1]");
                c.options.selection.pareto_ratio = x;
            },
            [](const RunConfig& c) { return format_double(c.options.selection.pareto_ratio); });
        add("tournament_size", "int", "contestants per tournament (>= 2)",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.selection.tournament_size = int(int_at_least("tournament_size", v, 2));
            },
            [](const RunConfig& c) { return std::to_string(c.options.selection.tournament_size); });

        add("n_islands", "int", "number of subpopulations on the migration ring",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.n_islands = int(int_at_least("n_islands", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.n_islands); });
        add("island_capacity", "int", "individuals per island after selection",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.island_capacity = int(int_at_least("island_capacity", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.island_capacity); });
        add("offspring_per_island", "int", "offspring per island per generation (0 = capacity)",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.offspring_per_island = int(int_at_least("offspring_per_island", v, 0));
            },
            [](const RunConfig& c) { return std::to_string(c.options.offspring_per_island); });
        add("migration_interval", "int", "generations between migration events",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.migration_interval = int(int_at_least("migration_interval", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.migration_interval); });

        add("generations", "int", "generation limit",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.generations = int(int_at_least("generations", v, 0));
            },
            [](const RunConfig& c) { return std::to_string(c.options.generations); });
        add("time_limit_s", "real", "wall-clock limit in seconds (0 = none)",
            [](RunConfig& c, const std::string& v) {
                double x = cfg_real("time_limit_s", v);
                if (x < 0) throw ConfigError("time_limit_s: must be >= 0");
                c.options.time_limit_s = x;
            },
            [](const RunConfig& c) { return format_double(c.options.time_limit_s); });
        add("stop_measure", "string", "attribute checked against stop_threshold (empty = none)",
            [](RunConfig& c, const std::string& v) { c.options.stop_measure = detail::trim(v); },
            [](const RunConfig& c) { return c.options.stop_measure; });
        add("stop_threshold", "real", "run stops once stop_measure reaches this value",
            [](RunConfig& c, const std::string& v) {
                c.options.stop_threshold = cfg_real("stop_threshold", v);
            },
            [](const RunConfig& c) { return format_double(c.options.stop_threshold); });

        add("seed", "int", "master random seed",
            [](RunConfig& c, const std::string& v) {
                c.options.seed = std::uint64_t(cfg_int("seed", v));
            },
            [](const RunConfig& c) { return std::to_string(c.options.seed); });
        add("threads", "int", "worker threads for instantiation (results do not depend on it)",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.threads = int(int_at_least("threads", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.threads); });
        add("reporting_interval", "int", "generations between progress lines",
            [int_at_least](RunConfig& c, const std::string& v) {
                c.options.reporting_interval = int(int_at_least("reporting_interval", v, 1));
            },
            [](const RunConfig& c) { return std::to_string(c.options.reporting_interval); });
        add("starting_expressions", "list", "expressions seeded into generation 0, separated "
            "by ';'",
            [](RunConfig& c, const std::string& v) {
                c.options.starting_expressions = split_list(v, ';');
            },
            [](const RunConfig& c) { return detail::join(c.options.starting_expressions, ";"); });

        return k;
    }();
    return keys;
}

inline const ConfigKey* find_config_key(std::string_view name)
{
    for (const auto& k : config_keys())
        if (k.name == name) return &k;
    return nullptr;
}

inline std::string nearest_config_key(std::string_view name)
{
    const ConfigKey* best = nullptr;
    std::size_t best_d = std::size_t(-1);
    for (const auto& k : config_keys()) {
        auto d = detail::levenshtein(name, k.name);
        if (d < best_d) {
            best_d = d;
            best = &k;
        }
    }
    return best ? best->name : "";
}

inline void apply_config_value(RunConfig& cfg, const std::string& key, const std::string& value,
                               int line = 0)
{
    const ConfigKey* ck = find_config_key(key);
    if (!ck) {
        std::string where = line > 0 ? " (line " + std::to_string(line) + ")" : "";
        throw ConfigError("unknown key '" + key + "'" + where + "; did you mean '"
                          + nearest_config_key(key) + "'?");
    }
    ck->apply(cfg, value);
}

/// Layer command-line overrides over the current values.
inline void apply_overrides(RunConfig& cfg,
                            const std::vector<std::pair<std::string, std::string>>& pairs)
{
    for (const auto& [k, v] : pairs)
        apply_config_value(cfg, k, v);
}

/// Parse a flat key = value file with '#' comments over the defaults.
/// Unknown keys are errors, with the nearest valid key suggested.
inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno)
                              + ": expected key = value, got '" + line + "'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        apply_config_value(cfg, key, value, lineno);
    }
    return cfg;
}

/// Cross-field validation and derived defaults (operator weights default
/// to ones, parameter bounds combine). Throws ConfigError naming the key.
inline void validate_config(RunConfig& cfg)
{
    if (cfg.data_path.empty()) throw ConfigError("data_path: required");
    if (cfg.target_column.empty()) throw ConfigError("target_column: required");

    auto& ops = cfg.options.ops;
    if (!cfg.binary_weights_set) ops.binary_weights.assign(ops.binary.size(), 1.0);
    if (!cfg.unary_weights_set) ops.unary_weights.assign(ops.unary.size(), 1.0);
    ops.validate();

    const auto& mc = cfg.options.mutation;
    if (mc.depth_min > mc.depth_max)
        throw ConfigError("depth_min: must be <= depth_max");
    if (!(mc.param_init_low < mc.param_init_high))
        throw ConfigError("param_init_low: must be < param_init_high");

    if (cfg.fit_bound_low.has_value() != cfg.fit_bound_high.has_value())
        throw ConfigError("fit_bound_low/fit_bound_high: set both or neither");
    if (cfg.fit_bound_low) {
        if (!(*cfg.fit_bound_low < *cfg.fit_bound_high))
            throw ConfigError("fit_bound_low: must be < fit_bound_high");
        cfg.options.fit.param_bounds = {*cfg.fit_bound_low, *cfg.fit_bound_high};
    } else {
        cfg.options.fit.param_bounds.reset();
    }

    objective_indices(cfg.options.selection.pareto_objectives);
    objective_indices(cfg.options.selection.tournament_objectives);
    if (!cfg.options.stop_measure.empty()) attribute_index(cfg.options.stop_measure);

    for (const auto& text : cfg.options.starting_expressions) {
        try {
            parse(text);
        } catch (const ParseError& e) {
            throw ConfigError("starting_expressions: '" + text + "': " + e.what());
        }
    }
}

/// Generated reference of every key with type, default, and description.
inline std::string config_reference()
{
    const RunConfig defaults;
    std::ostringstream out;
    out << "key | type | default | description\n";
    out << "--- | --- | --- | ---\n";
    for (const auto& k : config_keys()) {
        std::string def = k.get(defaults);
        out << k.name << " | " << k.type << " | " << (def.empty() ? "(empty)" : def) << " | "
            << k.doc << "\n";
    }
    return out.str();
}

/// The resolved value of every key, for the validate subcommand.
inline std::string resolved_config(const RunConfig& cfg)
{
    std::ostringstream out;
    for (const auto& k : config_keys())
        out << k.name << " = " << k.get(cfg) << "\n";
    return out.str();
}

} // namespace symreg
