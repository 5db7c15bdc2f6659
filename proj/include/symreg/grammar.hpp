#pragma once

#include <utility>
#include <vector>

#include "symreg/expr.hpp"

namespace symreg {

/// Structural restrictions on expressions. banned_nestings forbids direct
/// operator compositions, e.g. (cos, cos) bans cos(cos(x)). The exponent
/// rule keeps fittable parameters out of composite pow exponents; a bare
/// parameter exponent like (x + 1)^3 stays legal, 3^(x + 1) does not.
struct Grammar {
    std::vector<std::pair<Op, Op>> banned_nestings; // (outer, inner)
    bool forbid_param_in_exponent = false;

    bool is_banned(Op outer, Op inner) const
    {
        for (const auto& [o, i] : banned_nestings)
            if (o == outer && i == inner) return true;
        return false;
    }
};

/// True iff no direct parent-child operator pair is banned and the
/// exponent rule (when enabled) holds everywhere. Creation and mutation
/// enforce the same rules while building, so this acts as the gate for
/// user-supplied starting expressions and for post-trim hygiene.
inline bool check_grammar(const Expr& e, const Grammar& g)
{
    if (e.is_op()) {
        for (const auto& kid : e.kids)
            if (kid.is_op() && g.is_banned(e.op, kid.op)) return false;
        if (g.forbid_param_in_exponent && e.op == Op::Pow) {
            const Expr& exponent = e.right();
            if (!exponent.is_param() && contains_param(exponent)) return false;
        }
    }
    for (const auto& kid : e.kids)
        if (!check_grammar(kid, g)) return false;
    return true;
}

} // namespace symreg
