#include "gcflow/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>

namespace gcflow {

class ExprParser {
public:
    ExprParser(std::string_view src, std::span<const std::string> variables, Expr& out)
        : src_(src), out_(out) {
        out_.vars_.assign(variables.begin(), variables.end());
    }

    void run() {
        out_.root_ = parse_expr();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError("unexpected trailing input", pos_);
        if (out_.nodes_.size() > 100000)
            throw ParseError("expression too large", 0);
    }

private:
    std::string_view src_;
    Expr& out_;
    std::size_t pos_ = 0;
    int depth_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }
    bool peek_is(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }
    bool consume(char c) {
        if (peek_is(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    int add_node(Expr::Node n) {
        out_.nodes_.push_back(n);
        return static_cast<int>(out_.nodes_.size()) - 1;
    }

    struct DepthGuard {
        int& d;
        std::size_t pos;
        DepthGuard(int& depth, std::size_t p) : d(depth), pos(p) {
            if (++d > 200) throw ParseError("expression nested too deeply", pos);
        }
        ~DepthGuard() { --d; }
    };

    int parse_expr() {
        DepthGuard guard(depth_, pos_);
        int lhs = parse_term();
        for (;;) {
            if (consume('+'))
                lhs = add_node({Expr::Op::add, 0.0, -1, lhs, parse_term()});
            else if (consume('-'))
                lhs = add_node({Expr::Op::sub, 0.0, -1, lhs, parse_term()});
            else
                return lhs;
        }
    }

    int parse_term() {
        DepthGuard guard(depth_, pos_);
        int lhs = parse_factor();
        for (;;) {
            if (consume('*'))
                lhs = add_node({Expr::Op::mul, 0.0, -1, lhs, parse_factor()});
            else if (consume('/'))
                lhs = add_node({Expr::Op::div, 0.0, -1, lhs, parse_factor()});
            else
                return lhs;
        }
    }

    int parse_factor() {
        DepthGuard guard(depth_, pos_);
        if (consume('-'))
            return add_node({Expr::Op::neg, 0.0, -1, parse_factor(), -1});
        return parse_power();
    }

    int parse_power() {
        DepthGuard guard(depth_, pos_);
        int base = parse_atom();
        if (consume('^')) // right-associative; exponent may carry unary minus
            return add_node({Expr::Op::pow_op, 0.0, -1, base, parse_factor()});
        return base;
    }

    int parse_atom() {
        skip_ws();
        if (pos_ >= src_.size())
            throw ParseError("unexpected end of expression", pos_);
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_ident();
        if (consume('(')) {
            int inner = parse_expr();
            if (!consume(')'))
                throw ParseError("expected ')'", pos_);
            return inner;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    int parse_number() {
        // strtod is only entered on a digit or '.', so no signs/inf/nan here
        std::string buf(src_.substr(pos_, std::min<std::size_t>(64, src_.size() - pos_)));
        char* end = nullptr;
        const double v = std::strtod(buf.c_str(), &end);
        if (end == buf.c_str())
            throw ParseError("invalid number", pos_);
        pos_ += static_cast<std::size_t>(end - buf.c_str());
        return add_node({Expr::Op::number, v, -1, -1, -1});
    }

    int parse_ident() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name(src_.substr(start, pos_ - start));

        static const std::map<std::string, std::pair<Expr::Op, int>> fns = {
            {"exp", {Expr::Op::fn_exp, 1}},  {"log", {Expr::Op::fn_log, 1}},
            {"sqrt", {Expr::Op::fn_sqrt, 1}}, {"abs", {Expr::Op::fn_abs, 1}},
            {"pow", {Expr::Op::fn_pow, 2}},  {"sin", {Expr::Op::fn_sin, 1}},
            {"cos", {Expr::Op::fn_cos, 1}}};

        if (auto it = fns.find(name); it != fns.end()) {
            if (!consume('('))
                throw ParseError("function '" + name + "' needs arguments", pos_);
            int a0 = parse_expr();
            int a1 = -1;
            if (it->second.second == 2) {
                if (!consume(','))
                    throw ParseError("function '" + name + "' needs two arguments", pos_);
                a1 = parse_expr();
            }
            if (!consume(')'))
                throw ParseError("expected ')' after arguments of '" + name + "'", pos_);
            return add_node({it->second.first, 0.0, -1, a0, a1});
        }

        for (int i = 0; i < static_cast<int>(out_.vars_.size()); ++i)
            if (out_.vars_[i] == name)
                return add_node({Expr::Op::variable, 0.0, i, -1, -1});
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

Expr Expr::parse(std::string_view source, std::span<const std::string> variables) {
    Expr e;
    ExprParser parser(source, variables, e);
    parser.run();
    return e;
}

namespace {
double checked(double v, const char* what) {
    if (!std::isfinite(v))
        throw DomainError(std::string("non-finite result of ") + what, v);
    return v;
}
} // namespace

double Expr::eval_node(int idx, std::span<const double> bindings) const {
    const Node& n = nodes_[idx];
    switch (n.op) {
    case Op::number:
        return n.number;
    case Op::variable:
        return bindings[n.var];
    case Op::neg:
        return -eval_node(n.lhs, bindings);
    case Op::add:
        return checked(eval_node(n.lhs, bindings) + eval_node(n.rhs, bindings), "+");
    case Op::sub:
        return checked(eval_node(n.lhs, bindings) - eval_node(n.rhs, bindings), "-");
    case Op::mul:
        return checked(eval_node(n.lhs, bindings) * eval_node(n.rhs, bindings), "*");
    case Op::div: {
        const double den = eval_node(n.rhs, bindings);
        if (den == 0.0)
            throw DomainError("division by zero", den);
        return checked(eval_node(n.lhs, bindings) / den, "/");
    }
    case Op::pow_op:
    case Op::fn_pow: {
        const double base = eval_node(n.lhs, bindings);
        const double expo = eval_node(n.rhs, bindings);
        const double v = std::pow(base, expo);
        if (!std::isfinite(v))
            throw DomainError("pow outside domain or overflowing", base);
        return v;
    }
    case Op::fn_exp:
        return checked(std::exp(eval_node(n.lhs, bindings)), "exp");
    case Op::fn_log: {
        const double a = eval_node(n.lhs, bindings);
        if (a <= 0.0)
            throw DomainError("log of non-positive value", a);
        return checked(std::log(a), "log");
    }
    case Op::fn_sqrt: {
        const double a = eval_node(n.lhs, bindings);
        if (a < 0.0)
            throw DomainError("sqrt of negative value", a);
        return std::sqrt(a);
    }
    case Op::fn_abs:
        return std::abs(eval_node(n.lhs, bindings));
    case Op::fn_sin:
        return checked(std::sin(eval_node(n.lhs, bindings)), "sin");
    case Op::fn_cos:
        return checked(std::cos(eval_node(n.lhs, bindings)), "cos");
    }
    throw std::logic_error("Expr: corrupt node");
}

double Expr::eval(std::span<const double> bindings) const {
    if (bindings.size() < vars_.size())
        throw std::invalid_argument("Expr::eval: missing bindings");
    return eval_node(root_, bindings);
}

// levels: add/sub 1, mul/div 2, unary 3, pow 4, atom 5
void Expr::print_node(int idx, int parent_level, std::string& out) const {
    const Node& n = nodes_[idx];
    auto wrap = [&](int level, auto&& body) {
        const bool paren = level < parent_level;
        if (paren) out += '(';
        body();
        if (paren) out += ')';
    };
    switch (n.op) {
    case Op::number: {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", n.number);
        out += buf;
        return;
    }
    case Op::variable:
        out += vars_[n.var];
        return;
    case Op::neg:
        wrap(3, [&] {
            out += '-';
            print_node(n.lhs, 3, out);
        });
        return;
    case Op::add:
    case Op::sub:
        wrap(1, [&] {
            print_node(n.lhs, 1, out);
            out += (n.op == Op::add) ? " + " : " - ";
            print_node(n.rhs, 2, out); // right operand binds tighter on reparse
        });
        return;
    case Op::mul:
    case Op::div:
        wrap(2, [&] {
            print_node(n.lhs, 2, out);
            out += (n.op == Op::mul) ? "*" : "/";
            print_node(n.rhs, 3, out);
        });
        return;
    case Op::pow_op:
        wrap(4, [&] {
            print_node(n.lhs, 5, out); // left operand of ^ must be an atom
            out += '^';
            print_node(n.rhs, 3, out); // exponent is a factor (may be unary)
        });
        return;
    case Op::fn_exp:
    case Op::fn_log:
    case Op::fn_sqrt:
    case Op::fn_abs:
    case Op::fn_pow:
    case Op::fn_sin:
    case Op::fn_cos: {
        static const char* names[] = {"exp", "log", "sqrt", "abs", "pow", "sin", "cos"};
        out += names[static_cast<int>(n.op) - static_cast<int>(Op::fn_exp)];
        out += '(';
        print_node(n.lhs, 0, out);
        if (n.rhs >= 0) {
            out += ", ";
            print_node(n.rhs, 0, out);
        }
        out += ')';
        return;
    }
    }
}

std::string Expr::print() const {
    std::string out;
    print_node(root_, 0, out);
    return out;
}

} // namespace gcflow
