#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "symreg/individual.hpp"

namespace symreg {

/// a dominates b iff a <= b in every objective and a < b in at least one
/// (all objectives minimized).
inline bool dominates(const std::vector<double>& a, const std::vector<double>& b)
{
    bool strict = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (a[j] > b[j]) return false;
        if (a[j] < b[j]) strict = true;
    }
    return strict;
}

struct ParetoInfo {
    std::vector<std::vector<int>> fronts; // best first; within a front, crowding descending
    std::vector<int> rank;                // front index per point
    std::vector<double> crowding;         // per point
};

namespace detail {

/// Standard NSGA-II crowding distance within one front; boundary points
/// get infinity.
inline void crowding_for_front(const std::vector<std::vector<double>>& pts,
                               const std::vector<int>& front, std::vector<double>& crowding)
{
    const std::size_t n = front.size();
    if (n == 0) return;
    if (n <= 2) {
        for (int i : front)
            crowding[std::size_t(i)] = std::numeric_limits<double>::infinity();
        return;
    }
    const std::size_t m = pts[std::size_t(front[0])].size();
    std::vector<int> order(front);
    for (std::size_t j = 0; j < m; ++j) {
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return pts[std::size_t(a)][j] < pts[std::size_t(b)][j];
        });
        double lo = pts[std::size_t(order.front())][j];
        double hi = pts[std::size_t(order.back())][j];
        crowding[std::size_t(order.front())] = std::numeric_limits<double>::infinity();
        crowding[std::size_t(order.back())] = std::numeric_limits<double>::infinity();
        if (hi <= lo) continue;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            double gap = pts[std::size_t(order[k + 1])][j] - pts[std::size_t(order[k - 1])][j];
            crowding[std::size_t(order[k])] += gap / (hi - lo);
        }
    }
}

} // namespace detail

/// Fast non-dominated sorting plus crowding distances. Fronts are ordered
/// best-first and each front is sorted by descending crowding distance
/// (stable, so ties keep index order).
inline ParetoInfo pareto_analyze(const std::vector<std::vector<double>>& pts)
{
    const std::size_t n = pts.size();
    ParetoInfo info;
    info.rank.assign(n, 0);
    info.crowding.assign(n, 0.0);
    if (n == 0) return info;

    std::vector<std::vector<int>> dominated_by(n);
    std::vector<int> dom_count(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(pts[i], pts[j])) {
                dominated_by[i].push_back(int(j));
                ++dom_count[j];
            } else if (dominates(pts[j], pts[i])) {
                dominated_by[j].push_back(int(i));
                ++dom_count[i];
            }
        }
    }

    std::vector<int> current;
    for (std::size_t i = 0; i < n; ++i)
        if (dom_count[i] == 0) current.push_back(int(i));
    int rank = 0;
    while (!current.empty()) {
        std::vector<int> next;
        for (int i : current) {
            info.rank[std::size_t(i)] = rank;
            for (int j : dominated_by[std::size_t(i)])
                if (--dom_count[std::size_t(j)] == 0) next.push_back(j);
        }
        info.fronts.push_back(std::move(current));
        current = std::move(next);
        ++rank;
    }

    for (auto& front : info.fronts) {
        detail::crowding_for_front(pts, front, info.crowding);
        std::stable_sort(front.begin(), front.end(), [&](int a, int b) {
            return info.crowding[std::size_t(a)] > info.crowding[std::size_t(b)];
        });
    }
    return info;
}

inline std::vector<std::vector<int>> non_dominated_sort(const std::vector<std::vector<double>>& pts)
{
    return pareto_analyze(pts).fronts;
}

/// Objective matrix for a population under named attributes.
inline std::vector<std::vector<double>> objective_matrix(const std::vector<Individual>& pop,
                                                         const std::vector<std::string>& names)
{
    auto idx = objective_indices(names);
    std::vector<std::vector<double>> pts(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pts[i].reserve(idx.size());
        for (auto j : idx)
            pts[i].push_back(attribute_value(pop[i], j));
    }
    return pts;
}

inline std::vector<std::vector<int>> non_dominated_sort(const std::vector<Individual>& pop,
                                                        const std::vector<std::string>& objectives)
{
    return non_dominated_sort(objective_matrix(pop, objectives));
}

} // namespace symreg
