#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "symreg/common.hpp"
#include "symreg/expr.hpp"

namespace symreg {

// Infix text format. Precedence low to high: +- < */ < unary minus < ^,
// with ^ right-associative. Variables are v1..vN, decimal literals are
// parameters, functions are exp/log/sin/cos/abs/sqrt/neg.

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr run()
    {
        skip_ws();
        Expr e = expression();
        skip_ws();
        if (pos_ < text_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what)
    {
        throw ParseError("parse error at offset " + std::to_string(pos_ + 1) + ": " + what,
                         pos_ + 1);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool accept(char c)
    {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        skip_ws();
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    Expr expression()
    {
        Expr e = term();
        for (;;) {
            if (accept('+'))
                e = Expr::binary(Op::Add, std::move(e), term());
            else if (accept('-'))
                e = Expr::binary(Op::Sub, std::move(e), term());
            else
                return e;
        }
    }

    Expr term()
    {
        Expr e = factor();
        for (;;) {
            if (accept('*'))
                e = Expr::binary(Op::Mul, std::move(e), factor());
            else if (accept('/'))
                e = Expr::binary(Op::Div, std::move(e), factor());
            else
                return e;
        }
    }

    // unary minus; a minus on a bare literal folds into a negative parameter
    Expr factor()
    {
        if (accept('-')) {
            Expr e = factor();
            if (e.is_param()) return Expr::param(-e.value);
            return Expr::unary(Op::Neg, std::move(e));
        }
        return power();
    }

    Expr power()
    {
        Expr base = atom();
        if (accept('^'))
            return Expr::binary(Op::Pow, std::move(base), factor());
        return base;
    }

    Expr atom()
    {
        skip_ws();
        if (pos_ >= text_.size())
            fail("expected an operand");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expression();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return identifier();
        fail("expected an operand");
    }

    Expr number()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark; // 'e' belongs to something else
            }
        }
        double v = 0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return Expr::param(v);
    }

    Expr identifier()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size()
               && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);
        if (name.size() >= 2 && name[0] == 'v') {
            bool digits = true;
            for (std::size_t i = 1; i < name.size(); ++i)
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
            if (digits) {
                int idx = 0;
                std::from_chars(name.data() + 1, name.data() + name.size(), idx);
                if (idx < 1) {
                    pos_ = start;
                    fail("variable index must be >= 1");
                }
                return Expr::var(idx);
            }
        }
        auto op = op_from_name(name);
        if (!op || !is_unary(*op)) {
            pos_ = start;
            fail("unknown function or variable '" + std::string(name) + "'");
        }
        expect('(');
        Expr arg = expression();
        expect(')');
        return Expr::unary(*op, std::move(arg));
    }
};

inline bool starts_negative(const std::string& s) { return !s.empty() && s[0] == '-'; }

} // namespace detail

/// Parse infix text into an expression tree. Throws ParseError with a
/// 1-based character offset on malformed input.
inline Expr parse(std::string_view text) { return detail::Parser(text).run(); }

/// Deterministic printer; parse(print(e)) reconstructs the same tree.
inline std::string print(const Expr& e)
{
    switch (e.kind) {
    case NodeKind::Param:
        return format_double(e.value);
    case NodeKind::Var:
        return "v" + std::to_string(e.var_index);
    case NodeKind::Unary: {
        if (e.op == Op::Neg) {
            if (e.child().is_param())
                return "neg(" + print(e.child()) + ")"; // keep distinct from a negative literal
            std::string s = print(e.child());
            if (e.child().kind == NodeKind::Binary || detail::starts_negative(s))
                return "-(" + s + ")";
            return "-" + s;
        }
        return std::string(op_name(e.op)) + "(" + print(e.child()) + ")";
    }
    case NodeKind::Binary: {
        auto operand = [](const Expr& c) {
            std::string s = print(c);
            if (c.kind == NodeKind::Binary || detail::starts_negative(s))
                return "(" + s + ")";
            return s;
        };
        const char* sym = "?";
        switch (e.op) {
        case Op::Add: sym = " + "; break;
        case Op::Sub: sym = " - "; break;
        case Op::Mul: sym = " * "; break;
        case Op::Div: sym = " / "; break;
        case Op::Pow: sym = " ^ "; break;
        default: break;
        }
        return operand(e.left()) + sym + operand(e.right());
    }
    }
    return {};
}

} // namespace symreg
