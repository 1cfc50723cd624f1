// Small arithmetic expression language for integrand specification in config
// files: numeric literals, declared variables, + - * / ^, unary minus, and
// the functions exp, log, sqrt, abs, pow, sin, cos.
//
// Precedence: ^ binds tighter than unary minus, which binds tighter than
// * and /, which bind tighter than + and -. ^ is right-associative, the
// rest associate left. Variable references are resolved against the declared
// set at parse time.

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gcflow {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    std::size_t position;
};

struct DomainError : std::runtime_error {
    DomainError(const std::string& kind_, double value_)
        : std::runtime_error(kind_ + " (offending value " + std::to_string(value_) + ")"),
          kind(kind_), value(value_) {}
    std::string kind;
    double value;
};

class Expr {
public:
    static Expr parse(std::string_view source, std::span<const std::string> variables);

    // bindings follow the declared variable order; every op checks its
    // result for finiteness, so an in-range tree either yields a finite
    // number or throws DomainError
    double eval(std::span<const double> bindings) const;

    std::string print() const;
    const std::vector<std::string>& variables() const { return vars_; }

private:
    enum class Op : std::uint8_t {
        number, variable, neg, add, sub, mul, div, pow_op,
        fn_exp, fn_log, fn_sqrt, fn_abs, fn_pow, fn_sin, fn_cos
    };
    struct Node {
        Op op;
        double number = 0.0;
        int var = -1;
        int lhs = -1, rhs = -1;
    };
    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<std::string> vars_;

    double eval_node(int idx, std::span<const double> bindings) const;
    void print_node(int idx, int parent_level, std::string& out) const;
    friend class ExprParser;
};

} // namespace gcflow
