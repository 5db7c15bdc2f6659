#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "symreg/common.hpp"
#include "symreg/rng.hpp"

namespace symreg {

inline constexpr std::uint64_t kSplitStreamTag = 0x73706c69; // "spli"

/// Tabular data: variable matrix X (one column per variable v1..vN),
/// target vector y, optional per-row weights, and a fit/validation split
/// fixed at load time. fit_fraction < 1 enables early stopping.
struct Dataset {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd weights; // size 0 when absent, otherwise strictly positive
    double fit_fraction = 1.0;
    std::vector<int> fit_rows;
    std::vector<int> val_rows;
    std::vector<std::string> variable_names; // optional, for reports

    int rows() const { return int(y.size()); }
    int cols() const { return int(X.cols()); }
    bool has_weights() const { return weights.size() > 0; }
    bool early_stopping() const { return !val_rows.empty(); }

    std::span<const int> all() const { return all_rows_; }
    std::span<const int> fit() const { return fit_rows; }
    std::span<const int> val() const { return val_rows; }

    void rebuild_row_index()
    {
        all_rows_.resize(std::size_t(rows()));
        std::iota(all_rows_.begin(), all_rows_.end(), 0);
    }

    void validate() const
    {
        if (rows() == 0) throw DataError("dataset is empty");
        if (X.rows() != y.size())
            throw DataError("dataset: X and y row counts disagree");
        if (weights.size() > 0 && weights.size() != y.size())
            throw DataError("dataset: weight and target row counts disagree");
        if (!X.allFinite() || !y.allFinite())
            throw DataError("dataset: non-finite entries in X or y");
        for (Eigen::Index i = 0; i < weights.size(); ++i)
            if (!(weights[i] > 0))
                throw DataError("dataset: weights must be strictly positive (row "
                                + std::to_string(i + 1) + ")");
        if (!(fit_fraction > 0.0 && fit_fraction <= 1.0))
            throw DataError("dataset: fit_fraction must be in (0, 1]");
        if (fit_fraction < 1.0 && val_rows.empty())
            throw DataError("dataset: fit_fraction < 1 requires a non-empty validation set; "
                            "add rows or set fit_fraction = 1");
    }

private:
    std::vector<int> all_rows_;
};

/// Draw the fit/validation split once from the run seed. Exactly
/// ceil(fit_fraction * n) rows are assigned to the fit subset, so the
/// assignment is stable across reloads of the same file and seed.
inline void assign_split(Dataset& data, double fit_fraction, std::uint64_t seed)
{
    const int n = data.rows();
    data.fit_fraction = fit_fraction;
    data.fit_rows.clear();
    data.val_rows.clear();
    if (fit_fraction >= 1.0) {
        data.fit_rows.resize(std::size_t(n));
        std::iota(data.fit_rows.begin(), data.fit_rows.end(), 0);
    } else {
        const int n_fit = int(std::ceil(fit_fraction * n));
        std::vector<int> idx(static_cast<std::size_t>(n));
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng = Rng::stream(seed, {kSplitStreamTag});
        for (int i = n - 1; i > 0; --i)
            std::swap(idx[std::size_t(i)], idx[rng.index(std::size_t(i) + 1)]);
        data.fit_rows.assign(idx.begin(), idx.begin() + n_fit);
        data.val_rows.assign(idx.begin() + n_fit, idx.end());
        std::sort(data.fit_rows.begin(), data.fit_rows.end());
        std::sort(data.val_rows.begin(), data.val_rows.end());
    }
    data.rebuild_row_index();
}

} // namespace symreg
