#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "symreg/config.hpp"
#include "symreg/data_io.hpp"
#include "symreg/engine.hpp"
#include "symreg/report.hpp"

namespace symreg {

namespace detail {

/// Leftover tokens become config overrides: --key value or --key=value.
inline std::vector<std::pair<std::string, std::string>>
parse_override_tokens(const std::vector<std::string>& toks)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& t = toks[i];
        if (t.rfind("--", 0) != 0)
            throw ConfigError("unexpected argument '" + t
                              + "'; overrides are written --key value or --key=value");
        std::string key = t.substr(2);
        std::string value;
        auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.erase(eq);
        } else {
            if (++i >= toks.size())
                throw ConfigError("override --" + key + " is missing its value");
            value = toks[i];
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

/// Paths in a config file resolve relative to the file itself.
inline std::string resolve_path(const std::string& path, const std::filesystem::path& base)
{
    std::filesystem::path p(path);
    if (p.is_absolute() || base.empty()) return path;
    return (base / p).string();
}

struct CliCommon {
    std::string config_path;
    std::vector<std::string> extras;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool quiet = false;
};

inline void add_common(CLI::App* cmd, CliCommon& c)
{
    cmd->add_option("-c,--config", c.config_path, "config file (key = value lines)")
        ->required();
    cmd->add_option("--seed", c.seed, "override the master random seed");
    cmd->add_option("--threads", c.threads, "override the worker thread count");
    cmd->add_flag("--quiet", c.quiet, "suppress progress output on stderr");
    cmd->allow_extras();
}

inline RunConfig load_resolved_config(const CliCommon& c)
{
    RunConfig cfg = load_config(c.config_path);
    apply_overrides(cfg, parse_override_tokens(c.extras));
    if (c.seed) cfg.options.seed = *c.seed;
    if (c.threads) cfg.options.threads = std::max(1, *c.threads);
    validate_config(cfg);
    auto base = std::filesystem::path(c.config_path).parent_path();
    cfg.data_path = resolve_path(cfg.data_path, base);
    cfg.output_dir = resolve_path(cfg.output_dir, base);
    return cfg;
}

inline int run_with_config(RunConfig cfg, bool quiet)
{
    Dataset data = load_dataset(cfg.data_path, cfg);

    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream plog(std::filesystem::path(cfg.output_dir) / "progress.log");
    cfg.options.on_progress = [&](const Progress& p) {
        auto line = progress_line(p);
        plog << line << '\n';
        if (!quiet) std::cerr << line << '\n';
    };

    RunResult result = run(cfg.options, data);
    auto [csv, txt] = export_hall_of_fame(result.hall_of_fame, cfg.output_dir);
    plog << "stop: " << result.stop_reason << " after " << result.generations_run
         << " generation(s)\n";
    if (!quiet) {
        std::cerr << "stop: " << result.stop_reason << " after " << result.generations_run
                  << " generation(s); " << result.hall_of_fame.size() << " expression(s) in "
                  << csv.string() << '\n';
    }
    return 0;
}

inline int eval_expression(const RunConfig& cfg, const std::string& text, bool do_fit)
{
    Dataset data = load_dataset(cfg.data_path, cfg);
    Expr expr = parse(text);
    Rng rng(cfg.options.seed);

    Individual ind;
    if (do_fit) {
        auto got = instantiate_individual(expr, data, cfg.options, 0, rng);
        if (!got) {
            std::cerr << "expression is invalid on this data (domain violation or failed fit)\n";
            return 3;
        }
        ind = std::move(*got);
    } else {
        auto m = compute_measures(expr, data, cfg.options.residual);
        if (!m) {
            std::cerr << "expression is invalid on this data (domain violation)\n";
            return 3;
        }
        ind.expr = expr;
        ind.measures = *m;
        ind.complexity = complexity(expr);
        ind.recursive_compl = recursive_complexity(expr);
        ind.n_params = count_params(expr);
        ind.valid = true;
    }
    std::cout << "expression = " << print(ind.expr) << '\n';
    for (std::size_t j = 0; j < kAttributeNames.size(); ++j)
        std::cout << kAttributeNames[j] << " = " << detail::attribute_text(ind, j) << '\n';
    return 0;
}

} // namespace detail

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 configuration or usage error, 2 data error, 3 runtime failure.
inline int run_cli(std::vector<std::string> args)
{
    CLI::App app{"symbolic regression of algebraic equations from tabular data"};
    app.require_subcommand(1);

    detail::CliCommon run_c, resume_c, eval_c, validate_c;
    std::string from_path, expr_text;
    bool do_fit = false;

    auto* cmd_run = app.add_subcommand("run", "search equations per the config");
    detail::add_common(cmd_run, run_c);

    auto* cmd_resume =
        app.add_subcommand("resume", "seed a run with a previous hall-of-fame table");
    detail::add_common(cmd_resume, resume_c);
    cmd_resume->add_option("--from", from_path,
                           "hall-of-fame table (default: <output_dir>/hall_of_fame.csv)");

    auto* cmd_eval = app.add_subcommand("evalexpr", "evaluate one expression on the data");
    detail::add_common(cmd_eval, eval_c);
    cmd_eval->add_option("-e,--expr", expr_text, "expression text, e.g. '2.5*v1^2 + sin(v2)'")
        ->required();
    cmd_eval->add_flag("--fit", do_fit, "fit the expression's parameters first");

    auto* cmd_validate =
        app.add_subcommand("validate", "check config and data, print resolved settings");
    detail::add_common(cmd_validate, validate_c);

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_run->parsed()) {
            run_c.extras = cmd_run->remaining();
            return detail::run_with_config(detail::load_resolved_config(run_c), run_c.quiet);
        }
        if (cmd_resume->parsed()) {
            resume_c.extras = cmd_resume->remaining();
            RunConfig cfg = detail::load_resolved_config(resume_c);
            std::string from = from_path.empty()
                                   ? (std::filesystem::path(cfg.output_dir) / "hall_of_fame.csv")
                                         .string()
                                   : from_path;
            for (auto& text : load_expressions_csv(from))
                cfg.options.starting_expressions.push_back(std::move(text));
            validate_config(cfg);
            return detail::run_with_config(std::move(cfg), resume_c.quiet);
        }
        if (cmd_eval->parsed()) {
            eval_c.extras = cmd_eval->remaining();
            return detail::eval_expression(detail::load_resolved_config(eval_c), expr_text,
                                           do_fit);
        }
        if (cmd_validate->parsed()) {
            validate_c.extras = cmd_validate->remaining();
            RunConfig cfg = detail::load_resolved_config(validate_c);
            load_dataset(cfg.data_path, cfg);
            std::cout << resolved_config(cfg);
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}

inline int run_cli(int argc, char** argv)
{
    std::vector<std::string> args;
    args.reserve(std::size_t(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run_cli(std::move(args));
}

} // namespace symreg
