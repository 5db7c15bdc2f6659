#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "symreg/dataset.hpp"
#include "symreg/eval.hpp"
#include "symreg/expr.hpp"
#include "symreg/options.hpp"
#include "symreg/rng.hpp"

namespace symreg {

/// Rows with |y| below this are excluded from relative-error measures.
inline constexpr double kRelErrYFloor = 1e-300;

/// All residual-related quality measures of an individual.
struct Measures {
    double ms_processed_e = 0; // minimized by the parameter identification
    double mse = 0;
    double mae = 0;
    double max_ae = 0;
    double minus_r2 = 0;
    double mare = 0;
    double q75_are = 0;
    double max_are = 0;
};

/// Raw residual vector r_i = y_i - g(f(X_i)) over the selected rows, where
/// g is the optional pre-residual transform. Invalid when evaluation leaves
/// the protected domains or the transform output is non-finite.
inline std::optional<Eigen::VectorXd> residual(const Expr& e, const Dataset& data,
                                               const ResidualConfig& cfg,
                                               std::span<const int> rows)
{
    auto pred = eval(e, data, rows);
    if (!pred) return std::nullopt;
    Eigen::VectorXd r(pred->size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        int row = rows[std::size_t(i)];
        double p = (*pred)[i];
        if (cfg.pre) p = cfg.pre(p, row, data);
        r[i] = data.y[row] - p;
    }
    if (!r.allFinite()) return std::nullopt;
    return r;
}

inline double residual_weight(const Dataset& data, const ResidualConfig& cfg, int row)
{
    if (cfg.weights) return (*cfg.weights)[row];
    if (data.has_weights()) return data.weights[row];
    return 1.0;
}

/// w_i * h(r_i): the vector whose squared mean is ms_processed_e and whose
/// Jacobian drives the Levenberg-Marquardt steps.
inline std::optional<Eigen::VectorXd> processed_residual(const Expr& e, const Dataset& data,
                                                         const ResidualConfig& cfg,
                                                         std::span<const int> rows)
{
    auto r = residual(e, data, cfg, rows);
    if (!r) return std::nullopt;
    for (Eigen::Index i = 0; i < r->size(); ++i) {
        int row = rows[std::size_t(i)];
        double h = cfg.post ? cfg.post((*r)[i], row, data) : (*r)[i];
        (*r)[i] = residual_weight(data, cfg, row) * h;
    }
    if (!r->allFinite()) return std::nullopt;
    return r;
}

/// Mean squared processed error of a raw residual vector. With no weights
/// and no custom processing this equals the mse exactly (same summation).
inline double ms_processed_e(const Eigen::VectorXd& residuals, const Dataset& data,
                             const ResidualConfig& cfg, std::span<const int> rows)
{
    if (residuals.size() == 0) return 0.0;
    Eigen::VectorXd processed(residuals.size());
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
        int row = rows[std::size_t(i)];
        double h = cfg.post ? cfg.post(residuals[i], row, data) : residuals[i];
        processed[i] = residual_weight(data, cfg, row) * h;
    }
    return processed.squaredNorm() / double(processed.size());
}

/// Forward finite-difference Jacobian of the processed residual w.r.t. the
/// parameter vector, column j stepped by fd_step * max(|p_j|, 1).
/// Computed on the given rows only (the fit subset during identification).
inline std::optional<Eigen::MatrixXd> fd_jacobian(Expr& working, std::span<double*> slots,
                                                  const Eigen::VectorXd& p,
                                                  const Eigen::VectorXd& rho0,
                                                  const Dataset& data, const ResidualConfig& cfg,
                                                  std::span<const int> rows, double fd_step)
{
    const auto k = Eigen::Index(slots.size());
    Eigen::MatrixXd jac(rho0.size(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
        double h = fd_step * std::max(std::abs(p[j]), 1.0);
        for (Eigen::Index i = 0; i < k; ++i)
            *slots[std::size_t(i)] = p[i];
        *slots[std::size_t(j)] = p[j] + h;
        auto rho = processed_residual(working, data, cfg, rows);
        if (!rho) return std::nullopt;
        jac.col(j) = (*rho - rho0) / h;
    }
    for (Eigen::Index i = 0; i < k; ++i)
        *slots[std::size_t(i)] = p[i];
    return jac;
}

enum class FitStop : std::uint8_t {
    None,          // no parameters to fit
    MaxIterations,
    StepTolerance,
    EarlyStopping, // validation error rose monotonically for `patience` steps
    JacobianDomain,
};

struct FitReport {
    int iterations = 0;
    int restarts_used = 0;
    FitStop stop = FitStop::None;
    double fit_objective = std::numeric_limits<double>::quiet_NaN();
    double val_objective = std::numeric_limits<double>::quiet_NaN();
    double final_val_objective = std::numeric_limits<double>::quiet_NaN();
};

struct FitResult {
    Expr expr;
    FitReport report;
};

namespace detail {

inline double subset_objective(const Expr& e, const Dataset& data, const ResidualConfig& cfg,
                               std::span<const int> rows)
{
    auto rho = processed_residual(e, data, cfg, rows);
    if (!rho) return std::numeric_limits<double>::infinity();
    return rho->squaredNorm() / double(rho->size());
}

} // namespace detail

/// Levenberg-Marquardt identification of the tree's embedded parameters,
/// minimizing ms_processed_e over the fit subset. The Jacobian is forward
/// finite differences on the fit subset only. After each accepted step the
/// validation objective is evaluated; once it rises monotonically for
/// early_stop_patience accepted steps the search stops and the parameters
/// with the best validation objective seen are returned. Without a
/// validation split the last accepted iterate is returned. The initial
/// point comes from the tree's embedded values; when it is invalid the
/// parameters are redrawn uniformly, up to `restarts` times, before the
/// whole fit is declared Invalid.
inline std::optional<FitResult> fit_params_lm(const Expr& expr, const Dataset& data,
                                              const ResidualConfig& cfg, const FitOptions& opt,
                                              Rng& rng)
{
    FitResult out{expr, {}};
    auto slots = param_slots(out.expr);
    const auto k = Eigen::Index(slots.size());
    const auto fit_rows = data.fit();
    const auto val_rows = data.val();
    const bool early_stop = !val_rows.empty();

    if (k == 0) {
        auto rho = processed_residual(out.expr, data, cfg, fit_rows);
        if (!rho) return std::nullopt;
        out.report.fit_objective = rho->squaredNorm() / double(rho->size());
        if (early_stop) {
            out.report.val_objective = detail::subset_objective(out.expr, data, cfg, val_rows);
            out.report.final_val_objective = out.report.val_objective;
        }
        return out;
    }

    auto clamp_params = [&](Eigen::VectorXd& p) {
        if (!opt.param_bounds) return;
        for (Eigen::Index i = 0; i < p.size(); ++i)
            p[i] = std::clamp(p[i], opt.param_bounds->first, opt.param_bounds->second);
    };
    auto write_params = [&](const Eigen::VectorXd& p) {
        for (Eigen::Index i = 0; i < k; ++i)
            *slots[std::size_t(i)] = p[i];
    };

    // find a valid starting point
    Eigen::VectorXd p(k);
    for (Eigen::Index i = 0; i < k; ++i)
        p[i] = *slots[std::size_t(i)];
    std::optional<Eigen::VectorXd> rho;
    int restart = 0;
    for (;; ++restart) {
        if (restart > 0) {
            for (Eigen::Index i = 0; i < k; ++i)
                p[i] = rng.uniform(opt.param_init_low, opt.param_init_high);
        }
        clamp_params(p);
        write_params(p);
        rho = processed_residual(out.expr, data, cfg, fit_rows);
        if (rho) break;
        if (restart >= opt.restarts) return std::nullopt;
    }
    out.report.restarts_used = restart;

    double obj = rho->squaredNorm() / double(rho->size());
    double lambda = opt.lambda0;

    double prev_val = std::numeric_limits<double>::quiet_NaN();
    double best_val = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_p = p;
    double best_fit_obj = obj;
    int rise_streak = 0;
    if (early_stop) {
        prev_val = detail::subset_objective(out.expr, data, cfg, val_rows);
        best_val = prev_val;
    }

    Eigen::MatrixXd jac;
    Eigen::MatrixXd normal;
    Eigen::VectorXd grad;
    bool have_jac = false;
    out.report.stop = FitStop::MaxIterations;

    while (out.report.iterations < opt.max_iterations) {
        if (!have_jac) {
            auto j = fd_jacobian(out.expr, slots, p, *rho, data, cfg, fit_rows, opt.fd_step);
            if (!j) {
                out.report.stop = FitStop::JacobianDomain;
                break;
            }
            jac = std::move(*j);
            normal = jac.transpose() * jac;
            grad = jac.transpose() * *rho;
            have_jac = true;
        }
        ++out.report.iterations;

        Eigen::MatrixXd lhs = normal;
        for (Eigen::Index i = 0; i < k; ++i)
            lhs(i, i) += lambda * std::max(normal(i, i), 1e-12);
        Eigen::VectorXd delta = lhs.ldlt().solve(-grad);
        if (!delta.allFinite() || delta.norm() < 1e-12) {
            out.report.stop = FitStop::StepTolerance;
            break;
        }

        Eigen::VectorXd trial = p + delta;
        clamp_params(trial);
        write_params(trial);
        auto trial_rho = processed_residual(out.expr, data, cfg, fit_rows);
        double trial_obj = trial_rho ? trial_rho->squaredNorm() / double(trial_rho->size())
                                     : std::numeric_limits<double>::infinity();
        if (trial_rho && trial_obj < obj) {
            p = trial;
            rho = std::move(trial_rho);
            obj = trial_obj;
            lambda = std::max(lambda / opt.damping_down, 1e-12);
            have_jac = false;
            if (early_stop) {
                double v = detail::subset_objective(out.expr, data, cfg, val_rows);
                rise_streak = v > prev_val ? rise_streak + 1 : 0;
                prev_val = v;
                if (v < best_val) {
                    best_val = v;
                    best_p = p;
                    best_fit_obj = obj;
                }
                if (rise_streak >= opt.early_stop_patience) {
                    out.report.stop = FitStop::EarlyStopping;
                    break;
                }
            }
        } else {
            lambda = std::min(lambda * opt.damping_up, 1e30);
        }
    }

    if (early_stop) {
        out.report.final_val_objective = prev_val;
        write_params(best_p);
        out.report.fit_objective = best_fit_obj;
        out.report.val_objective = best_val;
    } else {
        write_params(p);
        out.report.fit_objective = obj;
    }
    return out;
}

/// 75th percentile with linear interpolation between order statistics.
inline double percentile75(std::vector<double> v)
{
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    double h = 0.75 * double(v.size() - 1);
    auto lo = std::size_t(h);
    double frac = h - double(lo);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

/// All Table-style residual measures, computed over every row of the
/// dataset. Rows with |y| < 1e-300 are excluded from the relative errors.
inline std::optional<Measures> compute_measures(const Expr& e, const Dataset& data,
                                                const ResidualConfig& cfg)
{
    const auto rows = data.all();
    auto r = residual(e, data, cfg, rows);
    if (!r) return std::nullopt;

    Measures m;
    const auto n = double(r->size());
    m.mse = r->squaredNorm() / n;
    m.mae = r->cwiseAbs().mean();
    m.max_ae = r->cwiseAbs().maxCoeff();
    m.ms_processed_e = ms_processed_e(*r, data, cfg, rows);

    double ybar = 0;
    for (int row : rows)
        ybar += data.y[row];
    ybar /= n;
    double ss_tot = 0;
    for (int row : rows)
        ss_tot += (data.y[row] - ybar) * (data.y[row] - ybar);
    double ss_res = r->squaredNorm();
    if (ss_tot > 0)
        m.minus_r2 = -(1.0 - ss_res / ss_tot);
    else
        m.minus_r2 = ss_res == 0 ? -1.0 : 0.0; // constant target, degenerate r^2

    std::vector<double> rel;
    rel.reserve(rows.size());
    for (Eigen::Index i = 0; i < r->size(); ++i) {
        double y = data.y[rows[std::size_t(i)]];
        if (std::abs(y) < kRelErrYFloor) continue;
        rel.push_back(std::abs((*r)[i] / y));
    }
    if (!rel.empty()) {
        double acc = 0, mx = 0;
        for (double a : rel) {
            acc += a;
            mx = std::max(mx, a);
        }
        m.mare = acc / double(rel.size());
        m.max_are = mx;
        m.q75_are = percentile75(rel);
    }
    return m;
}

} // namespace symreg
