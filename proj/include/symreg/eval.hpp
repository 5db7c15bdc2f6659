#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>

#include "symreg/dataset.hpp"
#include "symreg/expr.hpp"

namespace symreg {

/// Division is invalid when |denominator| falls below this threshold.
inline constexpr double kDivEps = 1e-100;

/// Protected evaluation over the selected rows. Returns one prediction per
/// row, or nullopt when the expression leaves the operators' valid domains
/// anywhere on the selection:
///   log  — operand <= 0
///   div  — |denominator| < 1e-100
///   pow  — base < 0 (any exponent), or base = 0 with exponent <= 0
/// plus any non-finite intermediate. Invalid is a normal outcome, not an
/// error; the caller discards the candidate.
inline std::optional<Eigen::VectorXd> eval(const Expr& e, const Dataset& data,
                                           std::span<const int> rows)
{
    const Eigen::Index n = Eigen::Index(rows.size());
    switch (e.kind) {
    case NodeKind::Param:
        return Eigen::VectorXd::Constant(n, e.value);
    case NodeKind::Var: {
        if (e.var_index < 1 || e.var_index > data.cols())
            throw std::out_of_range("eval: variable v" + std::to_string(e.var_index)
                                    + " exceeds the dataset's " + std::to_string(data.cols())
                                    + " column(s)");
        Eigen::VectorXd out(n);
        const auto col = data.X.col(e.var_index - 1);
        for (Eigen::Index i = 0; i < n; ++i)
            out[i] = col[rows[std::size_t(i)]];
        return out;
    }
    case NodeKind::Unary: {
        auto c = eval(e.child(), data, rows);
        if (!c) return std::nullopt;
        Eigen::VectorXd out(n);
        switch (e.op) {
        case Op::Neg: out = -*c; break;
        case Op::Exp: out = c->array().exp(); break;
        case Op::Log:
            if ((c->array() <= 0.0).any()) return std::nullopt;
            out = c->array().log();
            break;
        case Op::Sin: out = c->array().sin(); break;
        case Op::Cos: out = c->array().cos(); break;
        case Op::Abs: out = c->array().abs(); break;
        case Op::Sqrt: out = c->array().sqrt(); break;
        default: return std::nullopt;
        }
        if (!out.allFinite()) return std::nullopt;
        return out;
    }
    case NodeKind::Binary: {
        auto l = eval(e.left(), data, rows);
        if (!l) return std::nullopt;
        auto r = eval(e.right(), data, rows);
        if (!r) return std::nullopt;
        Eigen::VectorXd out(n);
        switch (e.op) {
        case Op::Add: out = *l + *r; break;
        case Op::Sub: out = *l - *r; break;
        case Op::Mul: out = l->cwiseProduct(*r); break;
        case Op::Div:
            if ((r->array().abs() < kDivEps).any()) return std::nullopt;
            out = l->cwiseQuotient(*r);
            break;
        case Op::Pow:
            if ((l->array() < 0.0).any()) return std::nullopt;
            if (((l->array() == 0.0) && (r->array() <= 0.0)).any()) return std::nullopt;
            out = l->array().pow(r->array());
            break;
        default: return std::nullopt;
        }
        if (!out.allFinite()) return std::nullopt;
        return out;
    }
    }
    return std::nullopt;
}

inline std::optional<Eigen::VectorXd> eval(const Expr& e, const Dataset& data)
{
    return eval(e, data, data.all());
}

} // namespace symreg
