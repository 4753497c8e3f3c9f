#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace qgraph {

/// Value together with its first and second derivative in x.
struct Jet2 {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Arithmetic expression in the single variable x.
///
/// Grammar (whitespace ignored):
///
///     expr   := term (('+' | '-') term)*
///     term   := unary (('*' | '/') unary)*
///     unary  := '-' unary | power
///     power  := base ('^' unary)?
///     base   := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
///     func   := 'sin' | 'cos' | 'exp' | 'sqrt' | 'abs'
///
/// so '^' is right-associative and binds tighter than unary minus
/// ("-x^2" is -(x^2), "2^-x" is 2^(-x)).
///
/// Expressions are immutable and cheap to copy (shared tree).
class Expression {
public:
    /// Throws ParseError (with byte offset) on malformed input or unknown identifiers.
    static Expression parse(std::string_view source);

    /// The constant expression `value`.
    static Expression constant(double value);

    [[nodiscard]] double operator()(double x) const;

    /// Value, first and second derivative at x by forward-mode differentiation.
    [[nodiscard]] Jet2 jet(double x) const;

    /// Canonical text; parsing it again yields a tree that prints identically.
    [[nodiscard]] std::string to_string() const;

    [[nodiscard]] bool depends_on_x() const;

    struct Node;

private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    std::shared_ptr<const Node> root_;
};

}  // namespace qgraph
