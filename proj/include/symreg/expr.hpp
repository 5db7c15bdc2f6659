#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>
#include <vector>

#include "symreg/ops.hpp"

namespace symreg {

enum class NodeKind : std::uint8_t { Param, Var, Unary, Binary };

/// Expression tree node; the genotype. A node is one of
///   Param  — a fittable constant,
///   Var    — a 1-based column index into the dataset,
///   Unary  — op with one child,
///   Binary — op with two children.
/// Value semantics throughout: copying an Expr deep-copies the subtree,
/// so expressions are safe to share across worker threads.
struct Expr {
    NodeKind kind = NodeKind::Param;
    Op op = Op::Add;
    double value = 0.0;
    int var_index = 0;
    std::vector<Expr> kids;

    static Expr param(double v)
    {
        Expr e;
        e.kind = NodeKind::Param;
        e.value = v;
        return e;
    }

    static Expr var(int index)
    {
        assert(index >= 1);
        Expr e;
        e.kind = NodeKind::Var;
        e.var_index = index;
        return e;
    }

    static Expr unary(Op op, Expr child)
    {
        assert(is_unary(op));
        Expr e;
        e.kind = NodeKind::Unary;
        e.op = op;
        e.kids.push_back(std::move(child));
        return e;
    }

    static Expr binary(Op op, Expr left, Expr right)
    {
        assert(is_binary(op));
        Expr e;
        e.kind = NodeKind::Binary;
        e.op = op;
        e.kids.reserve(2);
        e.kids.push_back(std::move(left));
        e.kids.push_back(std::move(right));
        return e;
    }

    bool is_param() const { return kind == NodeKind::Param; }
    bool is_var() const { return kind == NodeKind::Var; }
    bool is_op() const { return kind == NodeKind::Unary || kind == NodeKind::Binary; }
    bool is_leaf() const { return kids.empty(); }

    const Expr& left() const { return kids[0]; }
    const Expr& right() const { return kids[1]; }
    const Expr& child() const { return kids[0]; }
};

/// Ordering class used by canonical_reorder:
/// parameter < variable < unary operator < binary operator.
inline int class_rank(const Expr& e)
{
    switch (e.kind) {
    case NodeKind::Param: return 0;
    case NodeKind::Var: return 1;
    case NodeKind::Unary: return 2;
    case NodeKind::Binary: return 3;
    }
    return 3;
}

inline int node_count(const Expr& e)
{
    int n = 1;
    for (const auto& k : e.kids)
        n += node_count(k);
    return n;
}

inline int depth(const Expr& e)
{
    int d = 0;
    for (const auto& k : e.kids)
        d = std::max(d, depth(k));
    return d + 1;
}

inline bool expr_equal(const Expr& a, const Expr& b)
{
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case NodeKind::Param:
        return a.value == b.value;
    case NodeKind::Var:
        return a.var_index == b.var_index;
    default:
        if (a.op != b.op || a.kids.size() != b.kids.size()) return false;
        for (std::size_t i = 0; i < a.kids.size(); ++i)
            if (!expr_equal(a.kids[i], b.kids[i])) return false;
        return true;
    }
}

inline int count_params(const Expr& e)
{
    int n = e.is_param() ? 1 : 0;
    for (const auto& k : e.kids)
        n += count_params(k);
    return n;
}

inline bool contains_param(const Expr& e)
{
    if (e.is_param()) return true;
    for (const auto& k : e.kids)
        if (contains_param(k)) return true;
    return false;
}

inline int max_var_index(const Expr& e)
{
    int m = e.is_var() ? e.var_index : 0;
    for (const auto& k : e.kids)
        m = std::max(m, max_var_index(k));
    return m;
}

/// Mutable slots for every Param node, in preorder. Used by the fitter to
/// write candidate parameter vectors into a working copy of the tree.
inline void collect_param_slots(Expr& e, std::vector<double*>& out)
{
    if (e.is_param()) out.push_back(&e.value);
    for (auto& k : e.kids)
        collect_param_slots(k, out);
}

inline std::vector<double*> param_slots(Expr& e)
{
    std::vector<double*> out;
    collect_param_slots(e, out);
    return out;
}

/// Preorder reference to a node together with its surroundings.
/// in_exponent is true when the node lies inside the right subtree of some
/// pow node (the region the exponent grammar applies to).
struct NodeRef {
    Expr* node;
    Expr* parent; // null for the root
    int slot;     // index in parent->kids
    bool in_exponent;
};

namespace detail {
inline void collect_refs(Expr& e, Expr* parent, int slot, bool in_exp, std::vector<NodeRef>& out)
{
    out.push_back({&e, parent, slot, in_exp});
    for (std::size_t i = 0; i < e.kids.size(); ++i) {
        bool kid_in_exp = in_exp || (e.is_op() && e.op == Op::Pow && i == 1);
        collect_refs(e.kids[i], &e, int(i), kid_in_exp, out);
    }
}
} // namespace detail

inline std::vector<NodeRef> collect_refs(Expr& root)
{
    std::vector<NodeRef> out;
    detail::collect_refs(root, nullptr, -1, false, out);
    return out;
}

/// Node count: every parameter, variable, and operator counts one.
inline int complexity(const Expr& e) { return node_count(e); }

inline constexpr double kRecursiveComplexityCap = 1e12;

/// Recursive complexity. Leaves score 1; add/sub sum their children,
/// mul/div multiply them, a unary op squares its child, and pow scores
/// left^2 * (1 + right); every node adds 1 and is capped so deep chains
/// stay finite.
inline double recursive_complexity(const Expr& e)
{
    double v = 0.0;
    switch (e.kind) {
    case NodeKind::Param:
    case NodeKind::Var:
        return 1.0;
    case NodeKind::Unary: {
        double c = recursive_complexity(e.child());
        v = c * c + 1.0;
        break;
    }
    case NodeKind::Binary: {
        double l = recursive_complexity(e.left());
        double r = recursive_complexity(e.right());
        switch (e.op) {
        case Op::Add:
        case Op::Sub: v = l + r + 1.0; break;
        case Op::Mul:
        case Op::Div: v = l * r + 1.0; break;
        case Op::Pow: v = l * l * (1.0 + r) + 1.0; break;
        default: v = l + r + 1.0; break;
        }
        break;
    }
    }
    return std::min(v, kRecursiveComplexityCap);
}

} // namespace symreg
