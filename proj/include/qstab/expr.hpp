#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qstab/quaternion.hpp"

namespace qstab {

/// Scalar real function of time.
using RealFn = std::function<double(double)>;

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, std::size_t position);
    [[nodiscard]] std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Domain failure during evaluation (ln of a non-positive value, division by zero, ...).
class EvalError : public std::runtime_error {
public:
    EvalError(const std::string& msg, double t);
    [[nodiscard]] double t() const { return t_; }

private:
    double t_;
};

namespace expr {

enum class UnaryFn { Sin, Cos, Exp, Ln, Abs, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

}  // namespace expr

/// Immutable expression tree in the time variable t with quaternion values.
///
/// Grammar:
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := unary ("^" factor)?
///   unary  := "-" unary | atom
///   atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
/// Identifiers: t, pi, e, qi, qj, qk; functions sin cos exp ln abs sqrt.
class Expression {
public:
    Expression();  // the constant 0

    static Expression parse(std::string_view source);
    static Expression constant(const Quaternion& q);
    static Expression variable();
    static Expression named(std::string name, const Quaternion& value);
    static Expression call(expr::UnaryFn fn, const Expression& arg);
    static Expression binary(expr::BinaryOp op, const Expression& lhs, const Expression& rhs);
    static Expression negate(const Expression& arg);

    [[nodiscard]] Quaternion eval(double t) const;
    /// Fully parenthesized source that parses back to an equivalent tree.
    [[nodiscard]] std::string render() const;
    /// True if the tree contains no reference to t.
    [[nodiscard]] bool isConstant() const;

    [[nodiscard]] const expr::NodePtr& root() const { return root_; }

private:
    explicit Expression(expr::NodePtr root) : root_(std::move(root)) {}
    expr::NodePtr root_;
};

Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);

/// Expression bound to the half-line [domainStart, inf).
class TimeFunction {
public:
    TimeFunction() = default;
    TimeFunction(Expression e, double domainStart) : expr_(std::move(e)), start_(domainStart) {}
    static TimeFunction parse(std::string_view source, double domainStart);
    static TimeFunction constant(const Quaternion& q, double domainStart = -1e300);

    /// Throws EvalError for t before the domain start or a non-finite value.
    [[nodiscard]] Quaternion eval(double t) const;
    [[nodiscard]] Quaternion operator()(double t) const { return eval(t); }
    /// Real part, as a RealFn.
    [[nodiscard]] RealFn realPart() const;

    [[nodiscard]] const Expression& expression() const { return expr_; }
    [[nodiscard]] double domainStart() const { return start_; }
    [[nodiscard]] std::string render() const { return expr_.render(); }

private:
    Expression expr_;
    double start_ = 0.0;
};

}  // namespace qstab
