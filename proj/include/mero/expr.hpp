#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mero/poly.hpp"

namespace mero {

/// Syntax error with the byte offset and what was expected there.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t offset, const std::string& expected,
               const std::string& got)
        : std::runtime_error("parse error at offset " +
                             std::to_string(offset) + ": expected " +
                             expected + (got.empty() ? "" : ", got " + got)),
          offset_(offset),
          expected_(expected) {}
    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

/// Numeric failure (division by zero, domain error) tagged with the source
/// span of the offending node.
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& what, std::size_t begin, std::size_t end)
        : std::runtime_error(what + " (source span " + std::to_string(begin) +
                             ".." + std::to_string(end) + ")"),
          begin_(begin),
          end_(end) {}
    std::size_t begin() const { return begin_; }
    std::size_t end() const { return end_; }

private:
    std::size_t begin_, end_;
};

/// Arithmetic expression over one variable x: +, -, *, /, ^ (right
/// associative, binding tighter than unary minus), pi, and the call set
/// exp sin cos tan sinh cosh tanh csch sech sqrt abs.
class Expr {
public:
    double eval(double x) const { return eval_node(root_, x); }

    std::string to_string() const { return print_node(root_); }

    bool uses_variable() const {
        for (const auto& n : nodes_)
            if (n.op == Op::variable) return true;
        return false;
    }

    static Expr parse(const std::string& src);

private:
    enum class Op {
        literal,
        pi_const,
        variable,
        negate,
        add,
        sub,
        mul,
        divide,
        power,
        call
    };
    struct Node {
        Op op;
        double value = 0.0;
        int lhs = -1, rhs = -1;
        int fn = -1;
        std::size_t begin = 0, end = 0;
    };

    static constexpr const char* kFns[] = {"exp",  "sin",  "cos", "tan",
                                           "sinh", "cosh", "tanh", "csch",
                                           "sech", "sqrt", "abs"};

    double eval_node(int id, double x) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        switch (n.op) {
            case Op::literal: return n.value;
            case Op::pi_const: return M_PI;
            case Op::variable: return x;
            case Op::negate: return -eval_node(n.lhs, x);
            case Op::add: return eval_node(n.lhs, x) + eval_node(n.rhs, x);
            case Op::sub: return eval_node(n.lhs, x) - eval_node(n.rhs, x);
            case Op::mul: return eval_node(n.lhs, x) * eval_node(n.rhs, x);
            case Op::divide: {
                double den = eval_node(n.rhs, x);
                if (den == 0.0)
                    throw EvalError("division by zero", n.begin, n.end);
                return eval_node(n.lhs, x) / den;
            }
            case Op::power: {
                double base = eval_node(n.lhs, x);
                double expo = eval_node(n.rhs, x);
                if (base < 0.0 && expo != std::floor(expo))
                    throw EvalError(
                        "negative base needs an integer exponent", n.begin,
                        n.end);
                if (base == 0.0 && expo < 0.0)
                    throw EvalError("zero raised to a negative power",
                                    n.begin, n.end);
                return std::pow(base, expo);
            }
            case Op::call: {
                double v = eval_node(n.lhs, x);
                switch (n.fn) {
                    case 0: return std::exp(v);
                    case 1: return std::sin(v);
                    case 2: return std::cos(v);
                    case 3: return std::tan(v);
                    case 4: return std::sinh(v);
                    case 5: return std::cosh(v);
                    case 6: return std::tanh(v);
                    case 7: {
                        double s = std::sinh(v);
                        if (s == 0.0)
                            throw EvalError("csch pole", n.begin, n.end);
                        return 1.0 / s;
                    }
                    case 8: return 1.0 / std::cosh(v);
                    case 9:
                        if (v < 0.0)
                            throw EvalError("sqrt of a negative value",
                                            n.begin, n.end);
                        return std::sqrt(v);
                    default: return std::fabs(v);
                }
            }
        }
        throw std::logic_error("corrupt expression node");
    }

    std::string print_node(int id) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        switch (n.op) {
            case Op::literal: return scalar_to_string(n.value);
            case Op::pi_const: return "pi";
            case Op::variable: return "x";
            case Op::negate: return "(-" + print_node(n.lhs) + ")";
            case Op::add:
                return "(" + print_node(n.lhs) + " + " + print_node(n.rhs) +
                       ")";
            case Op::sub:
                return "(" + print_node(n.lhs) + " - " + print_node(n.rhs) +
                       ")";
            case Op::mul:
                return "(" + print_node(n.lhs) + "*" + print_node(n.rhs) + ")";
            case Op::divide:
                return "(" + print_node(n.lhs) + "/" + print_node(n.rhs) + ")";
            case Op::power:
                return "(" + print_node(n.lhs) + "^" + print_node(n.rhs) + ")";
            case Op::call:
                return std::string(kFns[n.fn]) + "(" + print_node(n.lhs) + ")";
        }
        return "?";
    }

    friend class ExprParser;
    friend Poly<double> expr_to_poly(const Expr& e);

    std::vector<Node> nodes_;
    int root_ = -1;
};

class ExprParser {
public:
    explicit ExprParser(const std::string& src) : src_(src) {}

    Expr run() {
        Expr e;
        out_ = &e;
        e.root_ = parse_expression();
        skip_space();
        if (pos_ != src_.size())
            throw ParseError(pos_, "end of input", describe_here());
        return e;
    }

private:
    using Op = Expr::Op;

    void skip_space() {
        while (pos_ < src_.size() &&
               std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }
    char peek() {
        skip_space();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::string describe_here() {
        if (pos_ >= src_.size()) return "end of input";
        return "'" + std::string(1, src_[pos_]) + "'";
    }

    int add_node(Expr::Node n) {
        out_->nodes_.push_back(n);
        return static_cast<int>(out_->nodes_.size()) - 1;
    }
    std::size_t node_begin(int id) const {
        return out_->nodes_[static_cast<std::size_t>(id)].begin;
    }

    int parse_expression() {
        int lhs = parse_term();
        for (;;) {
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++pos_;
            int rhs = parse_term();
            lhs = add_node({c == '+' ? Op::add : Op::sub, 0.0, lhs, rhs, -1,
                            node_begin(lhs), pos_});
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++pos_;
            int rhs = parse_unary();
            lhs = add_node({c == '*' ? Op::mul : Op::divide, 0.0, lhs, rhs,
                            -1, node_begin(lhs), pos_});
        }
    }

    int parse_unary() {
        if (peek() == '-') {
            std::size_t begin = pos_;
            ++pos_;
            int inner = parse_unary();
            return add_node({Op::negate, 0.0, inner, -1, -1, begin, pos_});
        }
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        if (peek() == '^') {
            ++pos_;
            int expo = parse_unary();  // right associative; allows 2^-3
            return add_node(
                {Op::power, 0.0, base, expo, -1, node_begin(base), pos_});
        }
        return base;
    }

    int parse_primary() {
        char c = peek();
        std::size_t begin = pos_;
        if (c == '(') {
            ++pos_;
            int inner = parse_expression();
            if (!consume(')'))
                throw ParseError(pos_, "')'", describe_here());
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_'))
                name += src_[pos_++];
            if (name == "pi")
                return add_node({Op::pi_const, 0.0, -1, -1, -1, begin, pos_});
            if (name == "x")
                return add_node({Op::variable, 0.0, -1, -1, -1, begin, pos_});
            for (int fi = 0; fi < 11; ++fi)
                if (name == Expr::kFns[fi]) {
                    if (!consume('('))
                        throw ParseError(pos_, "'(' after function name",
                                         describe_here());
                    int arg = parse_expression();
                    if (!consume(')'))
                        throw ParseError(pos_, "')'", describe_here());
                    return add_node(
                        {Op::call, 0.0, arg, -1, fi, begin, pos_});
                }
            throw ParseError(begin, "a known identifier (pi, x, or function)",
                             "'" + name + "'");
        }
        throw ParseError(pos_, "a number, name, unary '-', or '('",
                         describe_here());
    }

    int parse_number() {
        std::size_t begin = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                src_[pos_] == '.'))
            ++pos_;
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (pos_ < src_.size() &&
                std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // 'e' belongs to something else
            }
        }
        std::string tok = src_.substr(begin, pos_ - begin);
        try {
            double v = std::stod(tok);
            return add_node({Op::literal, v, -1, -1, -1, begin, pos_});
        } catch (const std::exception&) {
            throw ParseError(begin, "a numeric literal", "'" + tok + "'");
        }
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    Expr* out_ = nullptr;
};

inline Expr Expr::parse(const std::string& src) {
    return ExprParser(src).run();
}

inline Expr parse_expression(const std::string& src) {
    return Expr::parse(src);
}

inline double eval_expr(const Expr& e, double x) { return e.eval(x); }

/// Structural conversion of a polynomial-shaped expression into
/// coefficients; rejects anything that is not a polynomial in x (division
/// by non-constants, non-integer powers, transcendental calls).
inline Poly<double> expr_to_poly(const Expr& e) {
    struct Walk {
        const Expr& e;
        Poly<double> go(int id) const {
            const Expr::Node& n = e.nodes_[static_cast<std::size_t>(id)];
            using Op = Expr::Op;
            switch (n.op) {
                case Op::literal: return Poly<double>::constant(n.value);
                case Op::pi_const: return Poly<double>::constant(M_PI);
                case Op::variable: return Poly<double>::identity();
                case Op::negate: return -go(n.lhs);
                case Op::add: return go(n.lhs) + go(n.rhs);
                case Op::sub: return go(n.lhs) - go(n.rhs);
                case Op::mul: return go(n.lhs) * go(n.rhs);
                case Op::divide: {
                    Poly<double> den = go(n.rhs);
                    if (den.degree() != 0)
                        throw EvalError(
                            "polynomial form requires constant divisors",
                            n.begin, n.end);
                    return go(n.lhs).scaled(1.0 / den.coeff(0));
                }
                case Op::power: {
                    Poly<double> base = go(n.lhs);
                    const Expr::Node& ex =
                        e.nodes_[static_cast<std::size_t>(n.rhs)];
                    double v = ex.op == Op::literal ? ex.value : -1.0;
                    if (ex.op != Op::literal || v != std::floor(v) || v < 0 ||
                        v > 64)
                        throw EvalError(
                            "polynomial form requires small nonnegative "
                            "integer exponents",
                            n.begin, n.end);
                    Poly<double> acc = Poly<double>::one();
                    for (int i = 0; i < static_cast<int>(v); ++i)
                        acc = acc * base;
                    return acc;
                }
                case Op::call:
                    throw EvalError("polynomial form cannot contain calls",
                                    n.begin, n.end);
            }
            throw std::logic_error("corrupt expression node");
        }
    };
    return Walk{e}.go(e.root_);
}

}  // namespace mero
