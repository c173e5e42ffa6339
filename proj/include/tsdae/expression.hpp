#pragma once
// Entry expressions over the variable t:
//   expr   := term {("+"|"-") term}
//   term   := factor {("*"|"/") factor}
//   factor := "-" factor | base ["^" integer]
//   base   := number | "t" | "(" expr ")"
// Unary minus sits above "^", so "-t^2" means -(t^2).

#include "tsdae/error.hpp"
#include "tsdae/scalar.hpp"

#include <cctype>
#include <charconv>
#include <memory>
#include <string>
#include <string_view>

namespace tsdae {

struct ExprNode {
    enum class Kind { number, var, neg, add, sub, mul, div, pow };
    Kind kind;
    std::string literal;  // number text
    double value = 0.0;   // number value in double precision
    int exponent = 0;     // pow
    std::shared_ptr<const ExprNode> lhs, rhs;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

class Expression {
public:
    Expression() = default;
    explicit Expression(ExprPtr root, std::string source = {}) : root_(std::move(root)), source_(std::move(source)) {}

    const ExprPtr& root() const { return root_; }
    const std::string& source() const { return source_; }

    template <class T>
    T evaluate(const T& t) const {
        return eval<T>(*root_, t);
    }

    std::string render() const { return render_node(*root_); }

    static ExprPtr number(std::string literal) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::number;
        n->value = parse_decimal<double>(literal);
        n->literal = std::move(literal);
        return n;
    }
    static ExprPtr var() {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::var;
        return n;
    }
    static ExprPtr unary_minus(ExprPtr a) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::neg;
        n->lhs = std::move(a);
        return n;
    }
    static ExprPtr binary(ExprNode::Kind k, ExprPtr a, ExprPtr b) {
        auto n = std::make_shared<ExprNode>();
        n->kind = k;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        return n;
    }
    static ExprPtr power(ExprPtr a, int e) {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprNode::Kind::pow;
        n->lhs = std::move(a);
        n->exponent = e;
        return n;
    }

    static bool same_structure(const ExprNode& a, const ExprNode& b) {
        if (a.kind != b.kind) return false;
        switch (a.kind) {
        case ExprNode::Kind::number: return a.value == b.value;
        case ExprNode::Kind::var: return true;
        case ExprNode::Kind::neg: return same_structure(*a.lhs, *b.lhs);
        case ExprNode::Kind::pow: return a.exponent == b.exponent && same_structure(*a.lhs, *b.lhs);
        default: return same_structure(*a.lhs, *b.lhs) && same_structure(*a.rhs, *b.rhs);
        }
    }

private:
    template <class T>
    static T eval(const ExprNode& n, const T& t) {
        switch (n.kind) {
        case ExprNode::Kind::number:
            if constexpr (is_exact_v<T>) {
                return parse_decimal<T>(n.literal);
            } else {
                return n.value;
            }
        case ExprNode::Kind::var: return t;
        case ExprNode::Kind::neg: return -eval<T>(*n.lhs, t);
        case ExprNode::Kind::add: return eval<T>(*n.lhs, t) + eval<T>(*n.rhs, t);
        case ExprNode::Kind::sub: return eval<T>(*n.lhs, t) - eval<T>(*n.rhs, t);
        case ExprNode::Kind::mul: return eval<T>(*n.lhs, t) * eval<T>(*n.rhs, t);
        case ExprNode::Kind::div: {
            T den = eval<T>(*n.rhs, t);
            if (den == 0) fail(ErrorCode::input_error, "division by zero at t = " + std::to_string(to_double(t)));
            return eval<T>(*n.lhs, t) / den;
        }
        case ExprNode::Kind::pow: {
            T b = eval<T>(*n.lhs, t);
            T r = T(1);
            for (int i = 0; i < n.exponent; ++i) r *= b;
            return r;
        }
        }
        return T(0);
    }

    static std::string render_node(const ExprNode& n) {
        switch (n.kind) {
        case ExprNode::Kind::number: return n.literal;
        case ExprNode::Kind::var: return "t";
        case ExprNode::Kind::neg: return "-" + render_node(*n.lhs);
        case ExprNode::Kind::pow: {
            std::string b = render_node(*n.lhs);
            if (n.lhs->kind == ExprNode::Kind::neg || n.lhs->kind == ExprNode::Kind::pow) b = "(" + b + ")";
            return b + "^" + std::to_string(n.exponent);
        }
        default: {
            const char* op = n.kind == ExprNode::Kind::add   ? "+"
                             : n.kind == ExprNode::Kind::sub ? "-"
                             : n.kind == ExprNode::Kind::mul ? "*"
                                                             : "/";
            return "(" + render_node(*n.lhs) + op + render_node(*n.rhs) + ")";
        }
        }
    }

    ExprPtr root_;
    std::string source_;
};

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    ExprPtr parse() {
        auto e = expr();
        skip();
        if (pos_ < s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void error(const std::string& msg) const {
        fail(ErrorCode::syntax_error,
             "syntax error at position " + std::to_string(pos_) + " in \"" + std::string(s_) + "\": " + msg);
    }

    ExprPtr expr() {
        auto lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = Expression::binary(ExprNode::Kind::add, lhs, term());
            else if (accept('-'))
                lhs = Expression::binary(ExprNode::Kind::sub, lhs, term());
            else
                return lhs;
        }
    }

    ExprPtr term() {
        auto lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = Expression::binary(ExprNode::Kind::mul, lhs, factor());
            else if (accept('/'))
                lhs = Expression::binary(ExprNode::Kind::div, lhs, factor());
            else
                return lhs;
        }
    }

    ExprPtr factor() {
        if (accept('-')) return Expression::unary_minus(factor());
        auto b = base();
        if (accept('^')) {
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_ || (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))) {
                pos_ = start;
                error("exponent must be a non-negative integer literal");
            }
            int e = 0;
            auto res = std::from_chars(s_.data() + start, s_.data() + pos_, e);
            if (res.ec != std::errc() || e > 64) {
                pos_ = start;
                error("exponent out of range");
            }
            return Expression::power(b, e);
        }
        return b;
    }

    ExprPtr base() {
        skip();
        if (pos_ >= s_.size()) error("unexpected end of input");
        char c = s_[pos_];
        if (c == 't') {
            ++pos_;
            return Expression::var();
        }
        if (c == '(') {
            ++pos_;
            auto e = expr();
            if (!accept(')')) error("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        error("unexpected '" + std::string(1, c) + "'");
    }

    ExprPtr number() {
        std::size_t start = pos_;
        bool digits = false;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, digits = true;
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, digits = true;
        }
        if (!digits) {
            pos_ = start;
            error("malformed number");
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            std::size_t dstart = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (dstart == pos_) {
                pos_ = save;
                error("malformed exponent in number");
            }
        }
        return Expression::number(std::string(s_.substr(start, pos_ - start)));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Expression parse_expression(std::string_view source) {
    return Expression(detail::ExprParser(source).parse(), std::string(source));
}

} // namespace tsdae
