#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "symreg/individual.hpp"
#include "symreg/options.hpp"
#include "symreg/pareto.hpp"
#include "symreg/rng.hpp"

namespace symreg {

struct Island {
    int id = 0;
    std::vector<Individual> population;
    int capacity = 0;
};

/// Tournament selection over the pool under the tournament objectives.
/// Each round draws tournament_size contestants uniformly without
/// replacement; the winner is the best by non-dominated rank within the
/// pool, ties broken by higher crowding distance, remaining ties uniformly
/// at random. With unique_winners, a winner cannot win again (used by
/// survivor selection to fill the remaining capacity without duplicates).
inline std::vector<Individual> tournament_select(const std::vector<Individual>& pool,
                                                 const SelectionConfig& cfg, int count, Rng& rng,
                                                 bool unique_winners = false)
{
    std::vector<Individual> out;
    if (pool.empty() || count <= 0) return out;
    auto info = pareto_analyze(objective_matrix(pool, cfg.tournament_objectives));

    std::vector<std::size_t> eligible(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i)
        eligible[i] = i;

    std::vector<std::size_t> scratch;
    std::vector<std::size_t> tied;
    out.reserve(std::size_t(count));
    for (int round = 0; round < count && !eligible.empty(); ++round) {
        scratch = eligible;
        std::size_t k = std::min<std::size_t>(std::size_t(cfg.tournament_size), scratch.size());
        for (std::size_t i = 0; i < k; ++i)
            std::swap(scratch[i], scratch[i + rng.index(scratch.size() - i)]);

        tied.clear();
        int best_rank = 0;
        double best_crowd = 0;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t c = scratch[i];
            int r = info.rank[c];
            double cd = info.crowding[c];
            if (tied.empty() || r < best_rank || (r == best_rank && cd > best_crowd)) {
                tied.assign(1, c);
                best_rank = r;
                best_crowd = cd;
            } else if (r == best_rank && cd == best_crowd) {
                tied.push_back(c);
            }
        }
        std::size_t winner = tied[rng.index(tied.size())];
        out.push_back(pool[winner]);
        if (unique_winners)
            eligible.erase(std::find(eligible.begin(), eligible.end(), winner));
    }
    return out;
}

/// Two-stage survivor selection. Invalid individuals are dropped first.
/// When the valid pool fits in the capacity everyone survives. Otherwise
/// round(pareto_ratio * capacity) slots are filled front-by-front under
/// the Pareto objectives, the last partial front cut by crowding distance,
/// and the remaining slots by tournaments over the not-yet-selected
/// individuals under the tournament objectives. Survivor ages increment.
inline Island select_next_generation(Island island, const SelectionConfig& cfg, Rng& rng)
{
    std::vector<Individual> pool;
    pool.reserve(island.population.size());
    for (auto& ind : island.population)
        if (ind.valid) pool.push_back(std::move(ind));

    const int cap = island.capacity;
    std::vector<Individual> survivors;
    if (int(pool.size()) <= cap) {
        survivors = std::move(pool);
    } else {
        int n_pareto = int(std::llround(cfg.pareto_ratio * cap));
        n_pareto = std::clamp(n_pareto, 0, cap);

        auto info = pareto_analyze(objective_matrix(pool, cfg.pareto_objectives));
        std::vector<char> taken(pool.size(), 0);
        survivors.reserve(std::size_t(cap));
        for (const auto& front : info.fronts) {
            if (int(survivors.size()) >= n_pareto) break;
            for (int i : front) {
                if (int(survivors.size()) >= n_pareto) break;
                survivors.push_back(pool[std::size_t(i)]);
                taken[std::size_t(i)] = 1;
            }
        }

        std::vector<Individual> rest;
        rest.reserve(pool.size() - survivors.size());
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!taken[i]) rest.push_back(std::move(pool[i]));
        int n_tournament = std::min(cap - int(survivors.size()), int(rest.size()));
        auto winners = tournament_select(rest, cfg, n_tournament, rng, true);
        for (auto& w : winners)
            survivors.push_back(std::move(w));
    }

    for (auto& s : survivors)
        ++s.age;
    island.population = std::move(survivors);
    return island;
}

} // namespace symreg
