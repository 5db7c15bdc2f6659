#pragma once

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "symreg/individual.hpp"
#include "symreg/mutation.hpp"
#include "symreg/options.hpp"
#include "symreg/selection.hpp"
#include "symreg/text.hpp"

namespace symreg {

/// Stream tags keep every random decision on its own derived stream, so a
/// run is bitwise reproducible regardless of thread count or scheduling.
namespace stream_tag {
inline constexpr std::uint64_t kInit = 0x696e6974;      // initial population slots
inline constexpr std::uint64_t kOffspring = 0x6f666673; // (generation, island, offspring)
inline constexpr std::uint64_t kSelection = 0x73656c65; // (generation, island)
inline constexpr std::uint64_t kMigration = 0x6d696772; // (generation)
} // namespace stream_tag

struct Progress {
    int generation = 0;
    double elapsed_s = 0.0;
    std::size_t hof_size = 0;
    std::vector<double> best_mse;  // per island, post-selection
    std::vector<double> best_mare; // per island
    std::vector<int> best_compl;   // per island
};

struct RunResult {
    std::vector<Individual> hall_of_fame;
    int generations_run = 0;
    std::string stop_reason;
    std::vector<Island> islands;
};

/// Work pool over independent tasks. Tasks only read shared state and
/// write to their own slot, so execution order cannot affect results.
inline void parallel_for(int n_tasks, int threads, const std::function<void(int)>& task)
{
    if (threads <= 1 || n_tasks <= 1) {
        for (int i = 0; i < n_tasks; ++i)
            task(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    int n_threads = std::min(threads, n_tasks);
    pool.reserve(std::size_t(n_threads));
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (err) std::rethrow_exception(err);
}

struct MigrationEvent {
    int from = -1;
    int to = -1;
};

/// One migration event on the static ring: a uniform emigration island, a
/// uniform choice among its two ring neighbors, and a uniform individual
/// copied (not moved) into the neighbor. Capacity overflow is resolved by
/// the next selection.
inline MigrationEvent migrate(std::vector<Island>& islands, Rng& rng)
{
    MigrationEvent ev;
    const std::size_t n = islands.size();
    if (n < 2) return ev;
    std::size_t from = rng.index(n);
    std::size_t to = rng.coin() ? (from + 1) % n : (from + n - 1) % n;
    ev.from = int(from);
    ev.to = int(to);
    auto& src = islands[from].population;
    if (src.empty()) return ev;
    Individual copy = src[rng.index(src.size())];
    islands[to].population.push_back(std::move(copy));
    return ev;
}

/// Merge valid candidates into the hall of fame: deduplicate by printed
/// canonical form (existing members win) and keep the non-dominated set
/// under the Pareto objectives.
inline void hof_update(std::vector<Individual>& hof, const std::vector<Individual>& candidates,
                       const std::vector<std::string>& objectives)
{
    std::unordered_set<std::string> seen;
    seen.reserve(hof.size() + candidates.size());
    for (const auto& m : hof)
        seen.insert(print(m.expr));
    std::vector<Individual> pool = hof;
    for (const auto& c : candidates) {
        if (!c.valid) continue;
        if (seen.insert(print(c.expr)).second) pool.push_back(c);
    }
    auto pts = objective_matrix(pool, objectives);
    std::vector<Individual> keep;
    keep.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < pool.size() && !dominated; ++j)
            dominated = j != i && dominates(pts[j], pts[i]);
        if (!dominated) keep.push_back(std::move(pool[i]));
    }
    hof = std::move(keep);
}

namespace detail {

inline std::optional<Individual> fill_slot(const Expr* start, const Dataset& data,
                                           const Options& opts, int generation, Rng& rng)
{
    std::optional<Individual> ind;
    if (start) ind = instantiate_individual(*start, data, opts, generation, rng);
    for (int attempt = 0; !ind && attempt < 20; ++attempt)
        ind = instantiate_individual(random_expression(opts, rng), data, opts, generation, rng);
    return ind;
}

inline Progress make_progress(int generation, double elapsed_s, std::size_t hof_size,
                              const std::vector<Island>& islands)
{
    Progress p;
    p.generation = generation;
    p.elapsed_s = elapsed_s;
    p.hof_size = hof_size;
    for (const auto& isl : islands) {
        double mse = std::numeric_limits<double>::infinity();
        double mare = std::numeric_limits<double>::infinity();
        int cx = 0;
        for (const auto& ind : isl.population) {
            if (ind.measures.mse < mse) mse = ind.measures.mse;
            if (ind.measures.mare < mare) mare = ind.measures.mare;
            if (cx == 0 || ind.complexity < cx) cx = ind.complexity;
        }
        p.best_mse.push_back(mse);
        p.best_mare.push_back(mare);
        p.best_compl.push_back(cx);
    }
    return p;
}

} // namespace detail

/// The generational loop: fill islands, then per generation mutate parents
/// into offspring, instantiate them (in parallel when threads > 1), merge
/// parents with valid offspring, select survivors, and migrate on the
/// ring every migration_interval generations. Stops on the generation
/// limit, the wall-clock limit, or when the best hall-of-fame value of
/// stop_measure reaches stop_threshold.
inline RunResult run(Options opts, const Dataset& data)
{
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

    opts.n_vars = data.cols();
    opts.ops.validate();
    data.validate();
    objective_indices(opts.selection.pareto_objectives);
    objective_indices(opts.selection.tournament_objectives);
    if (!(opts.selection.pareto_ratio >= 0.0 && opts.selection.pareto_ratio <= 1.0))
        throw ConfigError("pareto_ratio: must be in [0, 1]");
    if (opts.selection.tournament_size < 2)
        throw ConfigError("tournament_size: must be >= 2");
    if (opts.n_islands < 1) throw ConfigError("n_islands: must be >= 1");
    if (opts.island_capacity < 1) throw ConfigError("island_capacity: must be >= 1");
    if (opts.max_nodes < 1) throw ConfigError("max_nodes: must be >= 1");
    if (opts.migration_interval < 1) throw ConfigError("migration_interval: must be >= 1");
    if (opts.generations < 0) throw ConfigError("generations: must be >= 0");
    if (opts.threads < 1) opts.threads = 1;
    if (!opts.stop_measure.empty()) attribute_index(opts.stop_measure);
    if (opts.mutation.depth_min < 1 || opts.mutation.depth_max < opts.mutation.depth_min)
        throw ConfigError("depth_min/depth_max: need 1 <= depth_min <= depth_max");

    std::vector<Expr> starts;
    starts.reserve(opts.starting_expressions.size());
    for (const auto& text : opts.starting_expressions)
        starts.push_back(parse(text));

    const int n_isl = opts.n_islands;
    const int cap = opts.island_capacity;
    std::vector<Island> islands(static_cast<std::size_t>(n_isl));
    for (int i = 0; i < n_isl; ++i) {
        islands[std::size_t(i)].id = i;
        islands[std::size_t(i)].capacity = cap;
    }

    // initial fill; starting expressions are dealt round-robin across islands
    std::vector<std::optional<Individual>> slots(static_cast<std::size_t>(n_isl * cap));
    parallel_for(n_isl * cap, opts.threads, [&](int t) {
        const int i = t / cap;
        const int k = t % cap;
        Rng rng = Rng::stream(opts.seed,
                              {stream_tag::kInit, std::uint64_t(i), std::uint64_t(k)});
        std::size_t start_idx = std::size_t(k) * std::size_t(n_isl) + std::size_t(i);
        const Expr* start = start_idx < starts.size() ? &starts[start_idx] : nullptr;
        slots[std::size_t(t)] = detail::fill_slot(start, data, opts, 0, rng);
    });
    for (int i = 0; i < n_isl; ++i)
        for (int k = 0; k < cap; ++k)
            if (auto& ind = slots[std::size_t(i * cap + k)])
                islands[std::size_t(i)].population.push_back(std::move(*ind));

    RunResult result;
    for (const auto& isl : islands)
        hof_update(result.hall_of_fame, isl.population, opts.selection.pareto_objectives);
    if (opts.inspect) opts.inspect(0, islands);
    if (opts.on_progress)
        opts.on_progress(detail::make_progress(0, elapsed(), result.hall_of_fame.size(), islands));

    result.stop_reason = "generations";
    auto threshold_hit = [&] {
        if (opts.stop_measure.empty()) return false;
        auto idx = attribute_index(opts.stop_measure);
        for (const auto& m : result.hall_of_fame)
            if (attribute_value(m, idx) <= opts.stop_threshold) return true;
        return false;
    };

    const int noff = opts.offspring_count();
    for (int g = 1; g <= opts.generations; ++g) {
        if (opts.time_limit_s > 0 && elapsed() >= opts.time_limit_s) {
            result.stop_reason = "time_limit";
            break;
        }

        std::vector<std::optional<Individual>> off(static_cast<std::size_t>(n_isl * noff));
        parallel_for(n_isl * noff, opts.threads, [&](int t) {
            const int i = t / noff;
            const int k = t % noff;
            Rng rng = Rng::stream(opts.seed, {stream_tag::kOffspring, std::uint64_t(g),
                                              std::uint64_t(i), std::uint64_t(k)});
            const auto& pop = islands[std::size_t(i)].population;
            if (pop.empty()) {
                off[std::size_t(t)] = detail::fill_slot(nullptr, data, opts, g - 1, rng);
                return;
            }
            const Expr& parent = pop[rng.index(pop.size())].expr;
            const Expr& partner = pop[rng.index(pop.size())].expr;
            Expr child = mutate(parent, opts, rng, &partner);
            off[std::size_t(t)] = instantiate_individual(std::move(child), data, opts, g - 1, rng);
        });

        std::vector<Individual> candidates;
        for (int i = 0; i < n_isl; ++i) {
            auto& isl = islands[std::size_t(i)];
            std::vector<Individual> pool = std::move(isl.population);
            for (int k = 0; k < noff; ++k)
                if (auto& ind = off[std::size_t(i * noff + k)])
                    pool.push_back(std::move(*ind));
            candidates.insert(candidates.end(), pool.begin(), pool.end());
            Rng sel_rng = Rng::stream(opts.seed, {stream_tag::kSelection, std::uint64_t(g),
                                                  std::uint64_t(i)});
            islands[std::size_t(i)] =
                select_next_generation(Island{i, std::move(pool), cap}, opts.selection, sel_rng);
        }
        hof_update(result.hall_of_fame, candidates, opts.selection.pareto_objectives);
        if (opts.inspect) opts.inspect(g, islands);

        if (g % opts.migration_interval == 0) {
            Rng mig_rng = Rng::stream(opts.seed, {stream_tag::kMigration, std::uint64_t(g)});
            migrate(islands, mig_rng);
        }

        result.generations_run = g;
        if (opts.on_progress && (g % opts.reporting_interval == 0 || g == opts.generations))
            opts.on_progress(
                detail::make_progress(g, elapsed(), result.hall_of_fame.size(), islands));

        if (threshold_hit()) {
            result.stop_reason = "threshold";
            break;
        }
    }

    result.islands = std::move(islands);
    return result;
}

} // namespace symreg
