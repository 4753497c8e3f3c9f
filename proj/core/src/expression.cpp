#include "qgraph/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "qgraph/error.hpp"

namespace qgraph {

enum class NodeKind { number, variable, pi, negate, add, subtract, multiply, divide, power, call };
enum class Function { sin, cos, exp, sqrt, abs };

struct Expression::Node {
    NodeKind kind;
    double number = 0.0;
    Function function = Function::sin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make_leaf(NodeKind kind, double number = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->number = number;
    return n;
}

NodePtr make_node(NodeKind kind, NodePtr lhs, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr make_call(Function f, NodePtr arg) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = NodeKind::call;
    n->function = f;
    n->lhs = std::move(arg);
    return n;
}

constexpr std::array<std::pair<std::string_view, Function>, 5> function_names{{
    {"sin", Function::sin},
    {"cos", Function::cos},
    {"exp", Function::exp},
    {"sqrt", Function::sqrt},
    {"abs", Function::abs},
}};

std::string_view function_name(Function f) {
    for (const auto& [name, fn] : function_names) {
        if (fn == f) return name;
    }
    return "?";
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) {
            throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = make_node(NodeKind::add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = make_node(NodeKind::subtract, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_node(NodeKind::multiply, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = make_node(NodeKind::divide, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_node(NodeKind::negate, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_base();
        if (accept('^')) return make_node(NodeKind::power, base, parse_unary());
        return base;
    }

    NodePtr parse_base() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("expected expression", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        throw ParseError("expected expression, found '" + std::string(1, c) + "'", pos_);
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
            ++pos_;
        }
        // exponent part only when followed by digits, so "2e" is not swallowed
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
                pos_ = p;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        double value = 0.0;
        const auto* first = src_.data() + start;
        const auto* last = src_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) throw ParseError("malformed number", start);
        return make_leaf(NodeKind::number, value);
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "x") return make_leaf(NodeKind::variable);
        if (name == "pi") return make_leaf(NodeKind::pi);
        for (const auto& [fname, fn] : function_names) {
            if (name == fname) {
                expect('(');
                NodePtr arg = parse_expr();
                expect(')');
                return make_call(fn, arg);
            }
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// Scalar arithmetic shared by double and Jet2 evaluation.
double apply(Function f, double a) {
    switch (f) {
        case Function::sin: return std::sin(a);
        case Function::cos: return std::cos(a);
        case Function::exp: return std::exp(a);
        case Function::sqrt: return std::sqrt(a);
        case Function::abs: return std::abs(a);
    }
    return 0.0;
}

Jet2 apply(Function f, const Jet2& a) {
    // f(a(x)): f' a', f'' a'^2 + f' a''
    double f0 = 0.0, f1 = 0.0, f2 = 0.0;
    switch (f) {
        case Function::sin:
            f0 = std::sin(a.value);
            f1 = std::cos(a.value);
            f2 = -f0;
            break;
        case Function::cos:
            f0 = std::cos(a.value);
            f1 = -std::sin(a.value);
            f2 = -f0;
            break;
        case Function::exp:
            f0 = f1 = f2 = std::exp(a.value);
            break;
        case Function::sqrt:
            f0 = std::sqrt(a.value);
            f1 = 0.5 / f0;
            f2 = -0.25 / (f0 * a.value);
            break;
        case Function::abs:
            f0 = std::abs(a.value);
            f1 = a.value < 0.0 ? -1.0 : 1.0;
            f2 = 0.0;
            break;
    }
    return {f0, f1 * a.d1, f2 * a.d1 * a.d1 + f1 * a.d2};
}

Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2}; }
Jet2 operator-(const Jet2& a, const Jet2& b) { return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2}; }
Jet2 operator-(const Jet2& a) { return {-a.value, -a.d1, -a.d2}; }
Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.value * b.value, a.d1 * b.value + a.value * b.d1, a.d2 * b.value + 2.0 * a.d1 * b.d1 + a.value * b.d2};
}
Jet2 operator/(const Jet2& a, const Jet2& b) {
    const double q = a.value / b.value;
    const double q1 = (a.d1 - q * b.d1) / b.value;
    const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.value;
    return {q, q1, q2};
}

double power(double a, double b) { return std::pow(a, b); }

Jet2 power(const Jet2& a, const Jet2& b) {
    if (b.d1 == 0.0 && b.d2 == 0.0) {
        const double n = b.value;
        const double f0 = std::pow(a.value, n);
        const double f1 = n * std::pow(a.value, n - 1.0);
        const double f2 = n * (n - 1.0) * std::pow(a.value, n - 2.0);
        return {f0, f1 * a.d1, f2 * a.d1 * a.d1 + f1 * a.d2};
    }
    // a^b = exp(b log a), a > 0
    const Jet2 log_a{std::log(a.value), a.d1 / a.value, a.d2 / a.value - (a.d1 * a.d1) / (a.value * a.value)};
    return apply(Function::exp, b * log_a);
}

template <class T>
T lift(double c) {
    if constexpr (std::is_same_v<T, double>) {
        return c;
    } else {
        return T{c, 0.0, 0.0};
    }
}

template <class T>
T evaluate(const Expression::Node& n, const T& x) {
    switch (n.kind) {
        case NodeKind::number: return lift<T>(n.number);
        case NodeKind::variable: return x;
        case NodeKind::pi: return lift<T>(std::numbers::pi);
        case NodeKind::negate: return -evaluate(*n.lhs, x);
        case NodeKind::add: return evaluate(*n.lhs, x) + evaluate(*n.rhs, x);
        case NodeKind::subtract: return evaluate(*n.lhs, x) - evaluate(*n.rhs, x);
        case NodeKind::multiply: return evaluate(*n.lhs, x) * evaluate(*n.rhs, x);
        case NodeKind::divide: return evaluate(*n.lhs, x) / evaluate(*n.rhs, x);
        case NodeKind::power: return power(evaluate(*n.lhs, x), evaluate(*n.rhs, x));
        case NodeKind::call: return apply(n.function, evaluate(*n.lhs, x));
    }
    return lift<T>(0.0);
}

// Binding strength used by the printer.
int precedence(const Expression::Node& n) {
    switch (n.kind) {
        case NodeKind::add:
        case NodeKind::subtract: return 1;
        case NodeKind::multiply:
        case NodeKind::divide: return 2;
        case NodeKind::negate: return 3;
        case NodeKind::power: return 4;
        case NodeKind::number: return std::signbit(n.number) ? 3 : 5;
        default: return 5;
    }
}

void print(const Expression::Node& n, std::string& out);

void print_child(const Expression::Node& child, int min_prec, std::string& out) {
    if (precedence(child) < min_prec) {
        out += '(';
        print(child, out);
        out += ')';
    } else {
        print(child, out);
    }
}

void print(const Expression::Node& n, std::string& out) {
    switch (n.kind) {
        case NodeKind::number: {
            std::array<char, 64> buf{};
            auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n.number);
            out.append(buf.data(), ptr);
            return;
        }
        case NodeKind::variable: out += 'x'; return;
        case NodeKind::pi: out += "pi"; return;
        case NodeKind::negate:
            out += '-';
            print_child(*n.lhs, 3, out);
            return;
        case NodeKind::call:
            out += function_name(n.function);
            out += '(';
            print(*n.lhs, out);
            out += ')';
            return;
        case NodeKind::power:
            print_child(*n.lhs, 5, out);
            out += '^';
            print_child(*n.rhs, 3, out);
            return;
        default: break;
    }
    const int p = precedence(n);
    const char* op = n.kind == NodeKind::add        ? " + "
                     : n.kind == NodeKind::subtract ? " - "
                     : n.kind == NodeKind::multiply ? " * "
                                                    : " / ";
    print_child(*n.lhs, p, out);
    out += op;
    print_child(*n.rhs, p + 1, out);
}

bool uses_x(const Expression::Node& n) {
    if (n.kind == NodeKind::variable) return true;
    return (n.lhs && uses_x(*n.lhs)) || (n.rhs && uses_x(*n.rhs));
}

}  // namespace

Expression Expression::parse(std::string_view source) { return Expression(Parser(source).parse_all()); }

Expression Expression::constant(double value) { return Expression(make_leaf(NodeKind::number, value)); }

double Expression::operator()(double x) const { return evaluate<double>(*root_, x); }

Jet2 Expression::jet(double x) const { return evaluate<Jet2>(*root_, Jet2{x, 1.0, 0.0}); }

std::string Expression::to_string() const {
    std::string out;
    print(*root_, out);
    return out;
}

bool Expression::depends_on_x() const { return uses_x(*root_); }

}  // namespace qgraph
