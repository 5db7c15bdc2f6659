#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symreg/grammar.hpp"
#include "symreg/ops.hpp"

namespace symreg {

struct Dataset;

/// Weights for the mutation table plus the knobs the mutations share.
/// Mutations marked depth-gated are only eligible on trees deeper than 2.
struct MutationConfig {
    double w_insert = 1.0;
    double w_point = 2.0;
    double w_addterm = 1.0;
    double w_hoist = 1.0;        // depth-gated
    double w_innergrow = 0.5;    // depth-gated
    double w_subtree = 1.0;      // depth-gated
    double w_drastic = 0.25;     // depth-gated
    double w_simplify = 0.25;    // depth-gated
    double w_crossover = 3.0;    // depth-gated
    double drastic_tolerance = 1e-4;
    int max_snippet_depth = 3;
    int depth_min = 2;
    int depth_max = 4;
    double param_init_low = -5.0;
    double param_init_high = 5.0;
};

/// Levenberg-Marquardt settings for parameter identification.
struct FitOptions {
    int max_iterations = 100;
    double lambda0 = 1e-3;
    double damping_up = 3.0;
    double damping_down = 2.0;
    int early_stop_patience = 5;
    std::optional<std::pair<double, double>> param_bounds;
    int restarts = 1;
    double fd_step = 1e-8;
    // redraw range for restarts after an invalid initial point
    double param_init_low = -5.0;
    double param_init_high = 5.0;
};

/// Hooks applied around the raw residual y - f(X). pre transforms the
/// prediction before the residual is formed; post transforms the residual
/// before squaring; weights multiply the processed residual. Both hooks
/// see the row index and the dataset so they may read the row's X values.
struct ResidualConfig {
    std::function<double(double, int, const Dataset&)> pre;  // identity when empty
    std::function<double(double, int, const Dataset&)> post; // identity when empty
    std::optional<Eigen::VectorXd> weights;                  // falls back to dataset weights
};

/// Which individual attributes drive each selection stage. Attribute names
/// are the exported measure names; all are minimized.
struct SelectionConfig {
    std::vector<std::string> pareto_objectives{"ms_processed_e", "compl"};
    std::vector<std::string> tournament_objectives{"ms_processed_e", "compl"};
    double pareto_ratio = 0.5;
    int tournament_size = 5;
};

struct Progress; // engine.hpp
struct Island;   // engine.hpp

/// Every hyperparameter of the engine.
struct Options {
    OperatorSet ops;
    Grammar grammar;
    int n_vars = 1;
    int max_nodes = 30;
    MutationConfig mutation;
    FitOptions fit;
    ResidualConfig residual;
    SelectionConfig selection;

    int n_islands = 4;
    int island_capacity = 30;
    int offspring_per_island = 0; // 0 = island_capacity
    int migration_interval = 5;

    int generations = 100;
    double time_limit_s = 0.0;      // 0 = none
    std::string stop_measure;       // empty = none
    double stop_threshold = 0.0;

    std::uint64_t seed = 1;
    int threads = 1;
    int reporting_interval = 10;
    std::vector<std::string> starting_expressions;

    std::function<void(const Progress&)> on_progress;
    // test/inspection hook, called with the post-selection islands each generation
    std::function<void(int, const std::vector<Island>&)> inspect;

    // instantiation-pipeline hooks; empty means pass. Constraint violation
    // and singularity screening plug in here once they exist.
    std::function<bool(const Expr&, const Dataset&)> constraint_hook;
    std::function<bool(const Expr&, const Dataset&)> singularity_hook;

    int offspring_count() const
    {
        return offspring_per_island > 0 ? offspring_per_island : island_capacity;
    }
};

} // namespace symreg
