#pragma once

#include <utility>

#include "symreg/expr.hpp"
#include "symreg/rng.hpp"

namespace symreg {

/// Collapse parameter-only subtrees bottom-up to a fixed point:
/// op(parameter, parameter) and op(parameter) become a single parameter.
/// Parameter values are not adjusted (identification happens afterwards);
/// the left/child value survives.
inline Expr remove_redundant_params(Expr e)
{
    for (auto& kid : e.kids)
        kid = remove_redundant_params(std::move(kid));
    switch (e.kind) {
    case NodeKind::Unary:
        if (e.child().is_param()) return Expr::param(e.child().value);
        break;
    case NodeKind::Binary:
        if (e.left().is_param() && e.right().is_param())
            return Expr::param(e.left().value);
        break;
    default:
        break;
    }
    return e;
}

/// Randomly hoist children over operator nodes until the tree fits within
/// max_nodes. Every surviving node existed in the input.
inline Expr trim_to_size(Expr e, int max_nodes, Rng& rng)
{
    while (node_count(e) > max_nodes) {
        auto refs = collect_refs(e);
        std::vector<Expr*> ops;
        for (const auto& r : refs)
            if (r.node->is_op()) ops.push_back(r.node);
        if (ops.empty()) break;
        Expr* target = ops[rng.index(ops.size())];
        std::size_t c = rng.index(target->kids.size());
        Expr lifted = std::move(target->kids[c]);
        *target = std::move(lifted);
    }
    return e;
}

/// Reorder operands of the commutative operators (add, mul) bottom-up so
/// the lesser class sits on the left: parameter < variable < unary < binary.
/// Same-class operands keep their order. Idempotent; exact commutativity of
/// IEEE add/mul keeps evaluation unchanged.
inline Expr canonical_reorder(Expr e)
{
    for (auto& kid : e.kids)
        kid = canonical_reorder(std::move(kid));
    if (e.kind == NodeKind::Binary && is_commutative(e.op)
        && class_rank(e.kids[0]) > class_rank(e.kids[1]))
        std::swap(e.kids[0], e.kids[1]);
    return e;
}

} // namespace symreg
