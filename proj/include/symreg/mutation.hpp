#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "symreg/canonical.hpp"
#include "symreg/eval.hpp"
#include "symreg/expr.hpp"
#include "symreg/grammar.hpp"
#include "symreg/options.hpp"
#include "symreg/rng.hpp"

namespace symreg {

inline constexpr int kMutationRetries = 32;

namespace detail {

inline constexpr double kGrowLeafProb = 0.3;

/// Weighted operator draw honoring the banned-nesting pairs against the
/// prospective parent above and child below. nullopt when nothing is legal.
inline std::optional<Op> draw_allowed_op(const OperatorSet& os, const Grammar& g,
                                         std::optional<Op> parent, std::optional<Op> child,
                                         Rng& rng)
{
    std::vector<Op> cand;
    std::vector<double> w;
    auto admit = [&](Op op, double weight) {
        if (parent && g.is_banned(*parent, op)) return;
        if (child && g.is_banned(op, *child)) return;
        cand.push_back(op);
        w.push_back(weight);
    };
    for (std::size_t i = 0; i < os.binary.size(); ++i)
        admit(os.binary[i], os.binary_weights[i]);
    for (std::size_t i = 0; i < os.unary.size(); ++i)
        admit(os.unary[i], os.unary_weights[i]);
    auto k = rng.weighted(w);
    if (k == w.size()) return std::nullopt;
    return cand[k];
}

/// Grow-method generation. With force set, one spine reaches the full
/// remaining depth; other branches may stop early. Inside an exponent
/// region leaves are variables only, keeping parameters out of composite
/// exponents by construction.
inline Expr grow(const Options& o, Rng& rng, int remaining, bool force, bool in_exp,
                 std::optional<Op> parent)
{
    auto leaf = [&] {
        if (!in_exp && rng.coin())
            return Expr::param(rng.uniform(o.mutation.param_init_low, o.mutation.param_init_high));
        return Expr::var(1 + int(rng.index(std::size_t(o.n_vars))));
    };
    if (remaining <= 1) return leaf();
    if (!force && rng.coin(kGrowLeafProb)) return leaf();
    auto op = draw_allowed_op(o.ops, o.grammar, parent, std::nullopt, rng);
    if (!op) return leaf();
    if (is_unary(*op))
        return Expr::unary(*op, grow(o, rng, remaining - 1, force, in_exp, *op));
    bool spine_left = !force || rng.coin();
    bool right_exp = in_exp || *op == Op::Pow;
    Expr l = grow(o, rng, remaining - 1, force && spine_left, in_exp, *op);
    Expr r = grow(o, rng, remaining - 1, force && !spine_left, right_exp, *op);
    return Expr::binary(*op, std::move(l), std::move(r));
}

/// Random snippet of depth at most max_snippet_depth, for insertion at a
/// position below `parent` (possibly inside an exponent region).
inline Expr random_snippet(const Options& o, Rng& rng, bool in_exp, std::optional<Op> parent)
{
    int hi = std::max(1, o.mutation.max_snippet_depth);
    int target = 1 + int(rng.index(std::size_t(hi)));
    return grow(o, rng, target, false, in_exp, parent);
}

inline std::optional<Op> parent_op(const NodeRef& ref)
{
    if (ref.parent && ref.parent->is_op()) return ref.parent->op;
    return std::nullopt;
}

inline bool small_param(const Expr& e, double tol)
{
    return e.is_param() && std::abs(e.value) < tol;
}

} // namespace detail

/// Random tree of depth within [depth_min, depth_max]; operators drawn by
/// OperatorSet weights, leaves parameter or variable with equal probability,
/// grammar enforced during construction.
inline Expr random_expression(const Options& o, Rng& rng)
{
    const auto& mc = o.mutation;
    const int lo = std::max(1, mc.depth_min);
    const int hi = std::max(lo, mc.depth_max);
    for (int attempt = 0; attempt < 100; ++attempt) {
        int target = lo + int(rng.index(std::size_t(hi - lo + 1)));
        Expr e = detail::grow(o, rng, target, true, false, std::nullopt);
        int d = depth(e);
        if (d >= lo && d <= hi && check_grammar(e, o.grammar)) return e;
    }
    return Expr::var(1 + int(rng.index(std::size_t(o.n_vars))));
}

/// Replace a random node n by op(n, snippet) (binary, operand side
/// randomized for non-commutative ops) or op(n) (unary).
inline Expr insert_mutation(const Expr& input, const Options& o, Rng& rng)
{
    const bool forbid = o.grammar.forbid_param_in_exponent;
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        Expr e = input;
        auto refs = collect_refs(e);
        NodeRef ref = refs[rng.index(refs.size())];
        if (ref.in_exponent && forbid && contains_param(*ref.node)) continue;
        std::optional<Op> child = ref.node->is_op() ? std::optional<Op>(ref.node->op) : std::nullopt;
        auto op = detail::draw_allowed_op(o.ops, o.grammar, detail::parent_op(ref), child, rng);
        if (!op) continue;
        Expr original = std::move(*ref.node);
        if (is_unary(*op)) {
            *ref.node = Expr::unary(*op, std::move(original));
        } else {
            bool n_on_left = is_commutative(*op) ? true : rng.coin();
            if (*op == Op::Pow && !n_on_left && forbid && !original.is_param()
                && contains_param(original))
                n_on_left = true;
            bool snippet_in_exp = ref.in_exponent || (*op == Op::Pow && n_on_left);
            Expr snippet = detail::random_snippet(o, rng, snippet_in_exp, *op);
            *ref.node = n_on_left ? Expr::binary(*op, std::move(original), std::move(snippet))
                                  : Expr::binary(*op, std::move(snippet), std::move(original));
        }
        if (check_grammar(e, o.grammar)) return e;
    }
    return input;
}

/// Mutate one random node in-kind: variable index, parameter value
/// (multiplicative factor in [0.5, 2.0]), or operator within the same
/// arity. Tree shape is unchanged.
inline Expr point_mutation(const Expr& input, const Options& o, Rng& rng)
{
    Expr e = input;
    auto refs = collect_refs(e);
    NodeRef ref = refs[rng.index(refs.size())];
    Expr* n = ref.node;
    switch (n->kind) {
    case NodeKind::Param:
        n->value *= rng.uniform(0.5, 2.0);
        break;
    case NodeKind::Var:
        if (o.n_vars > 1) {
            int shift = 1 + int(rng.index(std::size_t(o.n_vars - 1)));
            n->var_index = 1 + (n->var_index - 1 + shift) % o.n_vars;
        }
        break;
    case NodeKind::Unary:
    case NodeKind::Binary: {
        const auto& pool = n->kind == NodeKind::Unary ? o.ops.unary : o.ops.binary;
        auto parent = detail::parent_op(ref);
        std::vector<Op> cand;
        for (Op op : pool) {
            if (op == n->op) continue;
            if (parent && o.grammar.is_banned(*parent, op)) continue;
            bool bad = false;
            for (const auto& kid : n->kids)
                if (kid.is_op() && o.grammar.is_banned(op, kid.op)) bad = true;
            if (op == Op::Pow && o.grammar.forbid_param_in_exponent && !n->right().is_param()
                && contains_param(n->right()))
                bad = true;
            if (!bad) cand.push_back(op);
        }
        if (!cand.empty()) n->op = cand[rng.index(cand.size())];
        break;
    }
    }
    return check_grammar(e, o.grammar) ? e : input;
}

/// add(input, t) where t is a random snippet, wrapped with a leading
/// parameter coefficient with probability one half.
inline Expr addterm_mutation(const Expr& input, const Options& o, Rng& rng)
{
    bool wrap = rng.coin();
    Expr term = detail::random_snippet(o, rng, false, wrap ? Op::Mul : Op::Add);
    if (wrap) {
        double c = rng.uniform(o.mutation.param_init_low, o.mutation.param_init_high);
        term = Expr::binary(Op::Mul, Expr::param(c), std::move(term));
    }
    Expr e = Expr::binary(Op::Add, input, std::move(term));
    return check_grammar(e, o.grammar) ? e : input;
}

/// Replace a random operator node by one of its children (uniform choice).
inline Expr hoist_mutation(const Expr& input, const Options& o, Rng& rng)
{
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        Expr e = input;
        auto refs = collect_refs(e);
        std::vector<std::size_t> ops;
        for (std::size_t i = 0; i < refs.size(); ++i)
            if (refs[i].node->is_op()) ops.push_back(i);
        if (ops.empty()) return input;
        Expr* target = refs[ops[rng.index(ops.size())]].node;
        std::size_t c = rng.index(target->kids.size());
        Expr lifted = std::move(target->kids[c]);
        *target = std::move(lifted);
        if (check_grammar(e, o.grammar)) return e;
    }
    return input;
}

/// Replace a random target subtree by a copy of another subtree of the
/// same expression; the target is never an ancestor of the source, so the
/// result stays a strict tree.
inline Expr innergrow_mutation(const Expr& input, const Options& o, Rng& rng)
{
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        Expr e = input;
        auto refs = collect_refs(e);
        std::size_t a = rng.index(refs.size());
        std::size_t a_span = std::size_t(node_count(*refs[a].node));
        std::vector<std::size_t> sources;
        for (std::size_t i = 0; i < refs.size(); ++i)
            if (i < a || i >= a + a_span) sources.push_back(i);
        if (sources.empty()) continue;
        std::size_t b = sources[rng.index(sources.size())];
        Expr copy = *refs[b].node;
        *refs[a].node = std::move(copy);
        if (check_grammar(e, o.grammar)) return e;
    }
    return input;
}

/// Replace a random operator node's entire subtree by a fresh random
/// snippet.
inline Expr subtree_mutation(const Expr& input, const Options& o, Rng& rng)
{
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        Expr e = input;
        auto refs = collect_refs(e);
        std::vector<std::size_t> ops;
        for (std::size_t i = 0; i < refs.size(); ++i)
            if (refs[i].node->is_op()) ops.push_back(i);
        if (ops.empty()) return input;
        NodeRef ref = refs[ops[rng.index(ops.size())]];
        *ref.node = detail::random_snippet(o, rng, ref.in_exponent, detail::parent_op(ref));
        if (check_grammar(e, o.grammar)) return e;
    }
    return input;
}

namespace detail {

inline Expr drastic_pass(Expr e, double tol, bool& changed)
{
    for (auto& kid : e.kids)
        kid = drastic_pass(std::move(kid), tol, changed);
    if (e.kind == NodeKind::Binary) {
        if (e.op == Op::Add || e.op == Op::Sub) {
            if (small_param(e.left(), tol)) {
                changed = true;
                return std::move(e.kids[1]);
            }
            if (small_param(e.right(), tol)) {
                changed = true;
                return std::move(e.kids[0]);
            }
        } else if (e.op == Op::Mul
                   && (small_param(e.left(), tol) || small_param(e.right(), tol))) {
            changed = true;
            return Expr::param(0.0);
        }
    }
    return e;
}

} // namespace detail

/// Remove additive parameters and multiplicative factors smaller than the
/// tolerance; a product killed by a small factor collapses to zero, which
/// a surrounding add/sub then absorbs. Applied to a fixed point.
inline Expr drastic_simplify(const Expr& input, double tol)
{
    Expr e = input;
    bool changed = true;
    while (changed) {
        changed = false;
        e = detail::drastic_pass(std::move(e), tol, changed);
    }
    return e;
}

namespace detail {

inline bool is_const(const Expr& e, double v) { return e.is_param() && e.value == v; }

/// Fold an operator over constant operands, only when the operands are
/// inside the protected domains and the result is finite.
inline std::optional<double> fold_constant(const Expr& e)
{
    double a = e.kids[0].value;
    double r = 0;
    if (e.kind == NodeKind::Binary) {
        double b = e.kids[1].value;
        switch (e.op) {
        case Op::Add: r = a + b; break;
        case Op::Sub: r = a - b; break;
        case Op::Mul: r = a * b; break;
        case Op::Div:
            if (std::abs(b) < kDivEps) return std::nullopt;
            r = a / b;
            break;
        case Op::Pow:
            if (a < 0 || (a == 0 && b <= 0)) return std::nullopt;
            r = std::pow(a, b);
            break;
        default: return std::nullopt;
        }
    } else {
        switch (e.op) {
        case Op::Neg: r = -a; break;
        case Op::Exp: r = std::exp(a); break;
        case Op::Log:
            if (a <= 0) return std::nullopt;
            r = std::log(a);
            break;
        case Op::Sin: r = std::sin(a); break;
        case Op::Cos: r = std::cos(a); break;
        case Op::Abs: r = std::abs(a); break;
        case Op::Sqrt:
            if (a < 0) return std::nullopt;
            r = std::sqrt(a);
            break;
        default: return std::nullopt;
        }
    }
    if (!std::isfinite(r)) return std::nullopt;
    return r;
}

inline Expr simplify_pass(Expr e, bool& changed)
{
    for (auto& kid : e.kids)
        kid = simplify_pass(std::move(kid), changed);
    if (!e.is_op()) return e;

    bool all_const = true;
    for (const auto& kid : e.kids)
        all_const = all_const && kid.is_param();
    if (all_const) {
        if (auto v = fold_constant(e)) {
            changed = true;
            return Expr::param(*v);
        }
    }

    if (e.kind == NodeKind::Binary) {
        switch (e.op) {
        case Op::Add:
            if (is_const(e.left(), 0.0)) {
                changed = true;
                return std::move(e.kids[1]);
            }
            if (is_const(e.right(), 0.0)) {
                changed = true;
                return std::move(e.kids[0]);
            }
            break;
        case Op::Sub:
            if (expr_equal(e.left(), e.right())) {
                changed = true;
                return Expr::param(0.0);
            }
            break;
        case Op::Mul:
            if (is_const(e.left(), 0.0) || is_const(e.right(), 0.0)) {
                changed = true;
                return Expr::param(0.0);
            }
            if (is_const(e.left(), 1.0)) {
                changed = true;
                return std::move(e.kids[1]);
            }
            if (is_const(e.right(), 1.0)) {
                changed = true;
                return std::move(e.kids[0]);
            }
            break;
        case Op::Div:
            // x/x -> 1 is exact under protected division wherever x/x is valid
            if (expr_equal(e.left(), e.right())) {
                changed = true;
                return Expr::param(1.0);
            }
            break;
        case Op::Pow:
            if (is_const(e.right(), 1.0)) {
                changed = true;
                return std::move(e.kids[0]);
            }
            if (is_const(e.right(), 0.0)) {
                changed = true;
                return Expr::param(1.0);
            }
            break;
        default:
            break;
        }
    } else {
        if (e.op == Op::Log && e.child().kind == NodeKind::Unary && e.child().op == Op::Exp) {
            changed = true;
            return std::move(e.kids[0].kids[0]);
        }
        if (e.op == Op::Neg && e.child().kind == NodeKind::Unary && e.child().op == Op::Neg) {
            changed = true;
            return std::move(e.kids[0].kids[0]);
        }
    }
    return e;
}

} // namespace detail

/// Evaluation-preserving rewriter: constant folding inside the protected
/// domains plus the identity rules x+0, x*1, x*0, x-x, x/x, x^1, x^0,
/// log(exp(x)), and double negation, applied to a fixed point.
inline Expr simplify_algebraic(const Expr& input)
{
    Expr e = input;
    bool changed = true;
    while (changed) {
        changed = false;
        e = detail::simplify_pass(std::move(e), changed);
    }
    return e;
}

/// Subtree crossover: a random subtree of a copy of `a` is replaced by a
/// copy of a random subtree of `b`; the result is trimmed to max_nodes.
inline Expr crossover(const Expr& a, const Expr& b, const Options& o, Rng& rng)
{
    Expr b_copy = b;
    auto b_refs = collect_refs(b_copy);
    for (int attempt = 0; attempt < kMutationRetries; ++attempt) {
        Expr e = a;
        auto refs = collect_refs(e);
        NodeRef site = refs[rng.index(refs.size())];
        Expr donor = *b_refs[rng.index(b_refs.size())].node;
        *site.node = std::move(donor);
        e = trim_to_size(std::move(e), o.max_nodes, rng);
        if (check_grammar(e, o.grammar)) return e;
    }
    return a;
}

enum class MutationKind : int {
    Insert,
    Point,
    AddTerm,
    Hoist,
    InnerGrow,
    Subtree,
    DrasticSimplify,
    SimplifyAlgebraic,
    Crossover,
};

inline constexpr std::size_t kMutationCount = 9;

/// Hoist onward operate on inner structure and are only eligible on trees
/// deeper than 2.
inline bool mutation_depth_gated(MutationKind k)
{
    return int(k) >= int(MutationKind::Hoist);
}

/// Weighted draw over the mutation table, masking depth-gated entries on
/// shallow trees and crossover when no partner is available. Falls back to
/// point mutation when everything is masked.
inline MutationKind pick_mutation(const MutationConfig& mc, int tree_depth, bool has_partner,
                                  Rng& rng)
{
    std::array<double, kMutationCount> w{mc.w_insert,  mc.w_point,    mc.w_addterm,
                                         mc.w_hoist,   mc.w_innergrow, mc.w_subtree,
                                         mc.w_drastic, mc.w_simplify,  mc.w_crossover};
    if (tree_depth <= 2)
        for (std::size_t i = std::size_t(MutationKind::Hoist); i < kMutationCount; ++i)
            w[i] = 0;
    if (!has_partner) w[std::size_t(MutationKind::Crossover)] = 0;
    auto k = rng.weighted(w);
    if (k == w.size()) return MutationKind::Point;
    return MutationKind(k);
}

/// One mutation drawn from the weight table and applied. The result is
/// grammar-checked; the simplifying mutations can re-join operators into a
/// banned pair, in which case the input is returned unchanged.
inline Expr mutate(const Expr& e, const Options& o, Rng& rng, const Expr* partner = nullptr)
{
    MutationKind k = pick_mutation(o.mutation, depth(e), partner != nullptr, rng);
    Expr out = [&]() -> Expr {
        switch (k) {
        case MutationKind::Insert: return insert_mutation(e, o, rng);
        case MutationKind::Point: return point_mutation(e, o, rng);
        case MutationKind::AddTerm: return addterm_mutation(e, o, rng);
        case MutationKind::Hoist: return hoist_mutation(e, o, rng);
        case MutationKind::InnerGrow: return innergrow_mutation(e, o, rng);
        case MutationKind::Subtree: return subtree_mutation(e, o, rng);
        case MutationKind::DrasticSimplify: return drastic_simplify(e, o.mutation.drastic_tolerance);
        case MutationKind::SimplifyAlgebraic: return simplify_algebraic(e);
        case MutationKind::Crossover: return crossover(e, *partner, o, rng);
        }
        return e;
    }();
    return check_grammar(out, o.grammar) ? out : e;
}

} // namespace symreg
