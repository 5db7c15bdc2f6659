#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "symreg/common.hpp"

namespace symreg {

enum class Op : std::uint8_t {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Abs,
    Sqrt,
};

constexpr bool is_binary(Op op) { return op <= Op::Pow; }
constexpr bool is_unary(Op op) { return !is_binary(op); }
constexpr int arity(Op op) { return is_binary(op) ? 2 : 1; }
constexpr bool is_commutative(Op op) { return op == Op::Add || op == Op::Mul; }

constexpr std::string_view op_name(Op op)
{
    switch (op) {
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
    case Op::Neg: return "neg";
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Abs: return "abs";
    case Op::Sqrt: return "sqrt";
    }
    return "?";
}

inline std::optional<Op> op_from_name(std::string_view name)
{
    for (int i = 0; i <= int(Op::Sqrt); ++i)
        if (op_name(Op(i)) == name) return Op(i);
    return std::nullopt;
}

/// The operators the search draws from, with per-operator selection weights.
struct OperatorSet {
    std::vector<Op> binary{Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow};
    std::vector<double> binary_weights{1, 1, 1, 1, 1};
    std::vector<Op> unary{Op::Neg, Op::Exp, Op::Log, Op::Sin, Op::Cos, Op::Abs, Op::Sqrt};
    std::vector<double> unary_weights{1, 1, 1, 1, 1, 1, 1};

    bool contains(Op op) const
    {
        const auto& list = is_binary(op) ? binary : unary;
        for (Op o : list)
            if (o == op) return true;
        return false;
    }

    void validate() const
    {
        auto check = [](const std::vector<Op>& ops, const std::vector<double>& w,
                        const char* which, bool want_binary) {
            if (ops.empty())
                throw ConfigError(std::string(which) + "_operators: list must be non-empty");
            if (w.size() != ops.size())
                throw ConfigError(std::string(which)
                                  + "_weights: need one weight per operator ("
                                  + std::to_string(ops.size()) + " expected, got "
                                  + std::to_string(w.size()) + ")");
            double total = 0;
            for (std::size_t i = 0; i < ops.size(); ++i) {
                if (is_binary(ops[i]) != want_binary)
                    throw ConfigError(std::string(which) + "_operators: " + std::string(op_name(ops[i]))
                                      + " has the wrong arity for this list");
                for (std::size_t j = i + 1; j < ops.size(); ++j)
                    if (ops[i] == ops[j])
                        throw ConfigError(std::string(which) + "_operators: duplicate entry "
                                          + std::string(op_name(ops[i])));
                if (w[i] < 0)
                    throw ConfigError(std::string(which) + "_weights: weights must be >= 0");
                total += w[i];
            }
            if (total <= 0)
                throw ConfigError(std::string(which) + "_weights: weights must sum to > 0");
        };
        check(binary, binary_weights, "binary", true);
        check(unary, unary_weights, "unary", false);
    }
};

} // namespace symreg
