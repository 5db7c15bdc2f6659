#pragma once

// Shared test utilities. The scalar interpreter here is written independently
// of the library's vectorized evaluator on purpose: the two implementations
// must agree, and neither is allowed to define the other's expected values.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <symreg/symreg.hpp>

namespace test_support {

// ---------------------------------------------------------------------------
// Independent scalar evaluator (per-row oracle for the protected semantics).
// ---------------------------------------------------------------------------

inline std::optional<double> finite_or_invalid(double v)
{
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<double> oracle_eval(const symreg::Expr& e, std::span<const double> vars)
{
    using symreg::NodeKind;
    using symreg::Op;
    switch (e.kind) {
    case NodeKind::Param:
        return e.value;
    case NodeKind::Var:
        if (e.var_index < 1 || std::size_t(e.var_index) > vars.size())
            throw std::out_of_range("oracle_eval: variable index out of range");
        return vars[std::size_t(e.var_index - 1)];
    case NodeKind::Unary: {
        auto c = oracle_eval(e.child(), vars);
        if (!c) return std::nullopt;
        switch (e.op) {
        case Op::Neg: return finite_or_invalid(-*c);
        case Op::Exp: return finite_or_invalid(std::exp(*c));
        case Op::Log:
            if (*c <= 0.0) return std::nullopt;
            return finite_or_invalid(std::log(*c));
        case Op::Sin: return finite_or_invalid(std::sin(*c));
        case Op::Cos: return finite_or_invalid(std::cos(*c));
        case Op::Abs: return finite_or_invalid(std::abs(*c));
        case Op::Sqrt: return finite_or_invalid(std::sqrt(*c));
        default: return std::nullopt;
        }
    }
    case NodeKind::Binary: {
        auto l = oracle_eval(e.left(), vars);
        if (!l) return std::nullopt;
        auto r = oracle_eval(e.right(), vars);
        if (!r) return std::nullopt;
        switch (e.op) {
        case Op::Add: return finite_or_invalid(*l + *r);
        case Op::Sub: return finite_or_invalid(*l - *r);
        case Op::Mul: return finite_or_invalid(*l * *r);
        case Op::Div:
            if (std::abs(*r) < 1e-100) return std::nullopt;
            return finite_or_invalid(*l / *r);
        case Op::Pow:
            if (*l < 0.0) return std::nullopt;
            if (*l == 0.0 && *r <= 0.0) return std::nullopt;
            return finite_or_invalid(std::pow(*l, *r));
        default: return std::nullopt;
        }
    }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Independent random tree builder. Unlike the library's generator it places
// any operator anywhere (including parameters in exponents) so domain errors
// and invalid outcomes are actually exercised.
// ---------------------------------------------------------------------------

inline symreg::Expr oracle_tree(symreg::Rng& rng, int depth, int n_vars)
{
    using symreg::Expr;
    using symreg::Op;
    if (depth <= 1 || rng.uniform() < 0.25) {
        if (rng.coin())
            return Expr::param(rng.uniform(-3.0, 3.0));
        return Expr::var(1 + int(rng.index(std::size_t(n_vars))));
    }
    Op op = Op(rng.index(std::size_t(symreg::Op::Sqrt) + 1));
    if (symreg::is_binary(op))
        return Expr::binary(op, oracle_tree(rng, depth - 1, n_vars),
                            oracle_tree(rng, depth - 1, n_vars));
    return Expr::unary(op, oracle_tree(rng, depth - 1, n_vars));
}

// ---------------------------------------------------------------------------
// Central-difference Jacobian oracle for the forward-difference
// implementation under test.
// ---------------------------------------------------------------------------

inline std::optional<Eigen::MatrixXd> central_diff_jacobian(const symreg::Expr& e,
                                                            const symreg::Dataset& data,
                                                            const symreg::ResidualConfig& cfg,
                                                            std::span<const int> rows, double step)
{
    symreg::Expr work = e;
    auto slots = symreg::param_slots(work);
    const auto k = Eigen::Index(slots.size());
    Eigen::VectorXd p(k);
    for (Eigen::Index i = 0; i < k; ++i)
        p[i] = *slots[std::size_t(i)];

    Eigen::MatrixXd jac(Eigen::Index(rows.size()), k);
    for (Eigen::Index j = 0; j < k; ++j) {
        double h = step * std::max(std::abs(p[j]), 1.0);
        *slots[std::size_t(j)] = p[j] + h;
        auto hi = symreg::processed_residual(work, data, cfg, rows);
        *slots[std::size_t(j)] = p[j] - h;
        auto lo = symreg::processed_residual(work, data, cfg, rows);
        *slots[std::size_t(j)] = p[j];
        if (!hi || !lo) return std::nullopt;
        jac.col(j) = (*hi - *lo) / (2.0 * h);
    }
    return jac;
}

// ---------------------------------------------------------------------------
// Dataset factories.
// ---------------------------------------------------------------------------

inline symreg::Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
                                    double fit_fraction = 1.0, std::uint64_t seed = 1,
                                    Eigen::VectorXd weights = Eigen::VectorXd())
{
    symreg::Dataset d;
    d.X = std::move(X);
    d.y = std::move(y);
    d.weights = std::move(weights);
    d.variable_names.clear();
    for (int j = 1; j <= d.cols(); ++j)
        d.variable_names.push_back("v" + std::to_string(j));
    symreg::assign_split(d, fit_fraction, seed);
    d.validate();
    return d;
}

// Random X in [lo, hi], y = f(row view).
template <typename F>
symreg::Dataset make_dataset_fn(int n_rows, int n_vars, F&& f, double lo, double hi,
                                symreg::Rng& rng, double fit_fraction = 1.0,
                                std::uint64_t seed = 1)
{
    Eigen::MatrixXd X(n_rows, n_vars);
    for (int i = 0; i < n_rows; ++i)
        for (int j = 0; j < n_vars; ++j)
            X(i, j) = rng.uniform(lo, hi);
    Eigen::VectorXd y(n_rows);
    for (int i = 0; i < n_rows; ++i) {
        std::vector<double> row(static_cast<std::size_t>(n_vars));
        for (int j = 0; j < n_vars; ++j)
            row[std::size_t(j)] = X(i, j);
        y[i] = f(std::span<const double>(row));
    }
    return make_dataset(std::move(X), std::move(y), fit_fraction, seed);
}

// ---------------------------------------------------------------------------
// Filesystem helpers.
// ---------------------------------------------------------------------------

class TempDir {
public:
    TempDir()
    {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / ("symreg_test_" + std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("TempDir: could not create a scratch directory");
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& content)
{
    std::ofstream out(p);
    out << content;
    if (!out) throw std::runtime_error("write_text failed: " + p.string());
}

inline std::string read_text(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("read_text failed: " + p.string());
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

// Parse helper: unwrap or fail loudly.
inline symreg::Expr parsed(std::string_view text) { return symreg::parse(text); }

} // namespace test_support
