#include "qstab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <variant>

namespace qstab {

ParseError::ParseError(const std::string& msg, std::size_t position)
    : std::runtime_error(msg + " at position " + std::to_string(position)), position_(position) {}

namespace {
std::string withTime(const std::string& msg, double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (t = %.17g)", t);
    return msg + buf;
}
}  // namespace

EvalError::EvalError(const std::string& msg, double t) : std::runtime_error(withTime(msg, t)), t_(t) {}

namespace expr {

struct Number {
    Quaternion value;
};
struct Named {
    std::string name;
    Quaternion value;
};
struct Variable {};
struct Negate {
    NodePtr arg;
};
struct Call {
    UnaryFn fn;
    NodePtr arg;
};
struct Binary {
    BinaryOp op;
    NodePtr lhs;
    NodePtr rhs;
};

struct Node {
    std::variant<Number, Named, Variable, Negate, Call, Binary> v;
};

namespace {

const char* fnName(UnaryFn fn) {
    switch (fn) {
        case UnaryFn::Sin: return "sin";
        case UnaryFn::Cos: return "cos";
        case UnaryFn::Exp: return "exp";
        case UnaryFn::Ln: return "ln";
        case UnaryFn::Abs: return "abs";
        case UnaryFn::Sqrt: return "sqrt";
    }
    return "?";
}

char opChar(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return '+';
        case BinaryOp::Sub: return '-';
        case BinaryOp::Mul: return '*';
        case BinaryOp::Div: return '/';
        case BinaryOp::Pow: return '^';
    }
    return '?';
}

double requireReal(const Quaternion& q, const char* what, double t) {
    if (!q.isReal()) throw EvalError(std::string("non-real argument to ") + what, t);
    return q.w;
}

Quaternion power(const Quaternion& base, const Quaternion& exponent, double t) {
    const double p = requireReal(exponent, "^ exponent", t);
    if (base.isReal()) {
        if (base.w < 0.0 && p != std::floor(p)) throw EvalError("negative base with non-integer exponent", t);
        if (base.w == 0.0 && p < 0.0) throw EvalError("zero raised to a negative power", t);
        return std::pow(base.w, p);
    }
    if (p != std::floor(p) || std::abs(p) > 1e6) throw EvalError("quaternion base needs an integer exponent", t);
    if (p < 0.0 && base.norm2() == 0.0) throw EvalError("division by zero", t);
    Quaternion b = p < 0.0 ? base.inverse() : base;
    auto n = static_cast<long>(std::abs(p));
    Quaternion acc = 1.0;
    while (n > 0) {
        if (n & 1) acc = acc * b;
        b = b * b;
        n >>= 1;
    }
    return acc;
}

Quaternion evalNode(const Node& node, double t);

struct Evaluator {
    double t;
    Quaternion operator()(const Number& n) const { return n.value; }
    Quaternion operator()(const Named& n) const { return n.value; }
    Quaternion operator()(const Variable&) const { return t; }
    Quaternion operator()(const Negate& n) const { return -evalNode(*n.arg, t); }
    Quaternion operator()(const Call& c) const {
        const Quaternion a = evalNode(*c.arg, t);
        switch (c.fn) {
            case UnaryFn::Sin: return std::sin(requireReal(a, "sin", t));
            case UnaryFn::Cos: return std::cos(requireReal(a, "cos", t));
            case UnaryFn::Exp: return qstab::exp(a);
            case UnaryFn::Abs: return a.norm();
            case UnaryFn::Ln: {
                const double x = requireReal(a, "ln", t);
                if (x <= 0.0) throw EvalError("ln of a non-positive value", t);
                return std::log(x);
            }
            case UnaryFn::Sqrt: {
                const double x = requireReal(a, "sqrt", t);
                if (x < 0.0) throw EvalError("sqrt of a negative value", t);
                return std::sqrt(x);
            }
        }
        return {};
    }
    Quaternion operator()(const Binary& b) const {
        const Quaternion l = evalNode(*b.lhs, t);
        const Quaternion r = evalNode(*b.rhs, t);
        switch (b.op) {
            case BinaryOp::Add: return l + r;
            case BinaryOp::Sub: return l - r;
            case BinaryOp::Mul: return l * r;
            case BinaryOp::Div:
                if (r.norm2() == 0.0) throw EvalError("division by zero", t);
                return l / r;
            case BinaryOp::Pow: return power(l, r, t);
        }
        return {};
    }
};

Quaternion evalNode(const Node& node, double t) { return std::visit(Evaluator{t}, node.v); }

std::string renderNumber(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (s == "inf" || s == "-inf" || s == "nan") return "(" + s + ")";
    return x < 0.0 || s.front() == '-' ? "(" + s + ")" : s;
}

std::string renderQuaternion(const Quaternion& q) {
    if (q.isReal()) return renderNumber(q.w);
    return "(" + renderNumber(q.w) + "+" + renderNumber(q.x) + "*qi+" + renderNumber(q.y) + "*qj+" +
           renderNumber(q.z) + "*qk)";
}

std::string renderNode(const Node& node) {
    struct R {
        std::string operator()(const Number& n) const { return renderQuaternion(n.value); }
        std::string operator()(const Named& n) const { return n.name; }
        std::string operator()(const Variable&) const { return "t"; }
        std::string operator()(const Negate& n) const { return "(-" + renderNode(*n.arg) + ")"; }
        std::string operator()(const Call& c) const { return std::string(fnName(c.fn)) + "(" + renderNode(*c.arg) + ")"; }
        std::string operator()(const Binary& b) const {
            return "(" + renderNode(*b.lhs) + opChar(b.op) + renderNode(*b.rhs) + ")";
        }
    };
    return std::visit(R{}, node.v);
}

bool constantNode(const Node& node) {
    struct C {
        bool operator()(const Number&) const { return true; }
        bool operator()(const Named&) const { return true; }
        bool operator()(const Variable&) const { return false; }
        bool operator()(const Negate& n) const { return constantNode(*n.arg); }
        bool operator()(const Call& c) const { return constantNode(*c.arg); }
        bool operator()(const Binary& b) const { return constantNode(*b.lhs) && constantNode(*b.rhs); }
    };
    return std::visit(C{}, node.v);
}

NodePtr make(auto&& alt) { return std::make_shared<const Node>(Node{std::forward<decltype(alt)>(alt)}); }

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parseAll() {
        NodePtr e = parseExpr();
        skipSpace();
        if (pos_ != src_.size()) throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    void skipSpace() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skipSpace();
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

    NodePtr parseExpr() {
        NodePtr lhs = parseTerm();
        for (;;) {
            if (accept('+')) {
                lhs = make(Binary{BinaryOp::Add, lhs, parseTerm()});
            } else if (accept('-')) {
                lhs = make(Binary{BinaryOp::Sub, lhs, parseTerm()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr parseTerm() {
        NodePtr lhs = parseFactor();
        for (;;) {
            if (accept('*')) {
                lhs = make(Binary{BinaryOp::Mul, lhs, parseFactor()});
            } else if (accept('/')) {
                lhs = make(Binary{BinaryOp::Div, lhs, parseFactor()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr parseFactor() {
        NodePtr base = parseUnary();
        if (accept('^')) return make(Binary{BinaryOp::Pow, base, parseFactor()});
        return base;
    }

    NodePtr parseUnary() {
        if (accept('-')) return make(Negate{parseUnary()});
        return parseAtom();
    }

    NodePtr parseAtom() {
        skipSpace();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parseExpr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parseNumber();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parseIdentifier();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    NodePtr parseNumber() {
        const std::size_t start = pos_;
        std::string buf(src_.substr(start));
        char* end = nullptr;
        const double v = std::strtod(buf.c_str(), &end);
        const auto used = static_cast<std::size_t>(end - buf.c_str());
        if (used == 0) throw ParseError("malformed number", start);
        pos_ = start + used;
        return make(Number{v});
    }

    NodePtr parseIdentifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
        const std::string name(src_.substr(start, pos_ - start));

        static const std::pair<const char*, UnaryFn> functions[] = {
            {"sin", UnaryFn::Sin}, {"cos", UnaryFn::Cos}, {"exp", UnaryFn::Exp},
            {"ln", UnaryFn::Ln},   {"abs", UnaryFn::Abs}, {"sqrt", UnaryFn::Sqrt},
        };
        for (const auto& [fname, fn] : functions) {
            if (name == fname) {
                if (!accept('(')) throw ParseError("function '" + name + "' requires an argument", pos_);
                NodePtr arg = parseExpr();
                expect(')');
                return make(Call{fn, arg});
            }
        }
        if (name == "t") return make(Variable{});
        if (name == "pi") return make(Named{name, std::numbers::pi});
        if (name == "e") return make(Named{name, std::numbers::e});
        if (name == "qi") return make(Named{name, Quaternion::i()});
        if (name == "qj") return make(Named{name, Quaternion::j()});
        if (name == "qk") return make(Named{name, Quaternion::k()});
        throw ParseError("unknown identifier '" + name + "'", start);
    }
};

}  // namespace
}  // namespace expr

using namespace expr;

Expression::Expression() : root_(make(Number{0.0})) {}

Expression Expression::parse(std::string_view source) { return Expression(Parser(source).parseAll()); }
Expression Expression::constant(const Quaternion& q) { return Expression(make(Number{q})); }
Expression Expression::variable() { return Expression(make(Variable{})); }
Expression Expression::named(std::string name, const Quaternion& value) {
    return Expression(make(Named{std::move(name), value}));
}
Expression Expression::call(UnaryFn fn, const Expression& arg) { return Expression(make(Call{fn, arg.root_})); }
Expression Expression::binary(BinaryOp op, const Expression& lhs, const Expression& rhs) {
    return Expression(make(Binary{op, lhs.root_, rhs.root_}));
}
Expression Expression::negate(const Expression& arg) { return Expression(make(Negate{arg.root_})); }

Quaternion Expression::eval(double t) const { return evalNode(*root_, t); }
std::string Expression::render() const { return renderNode(*root_); }
bool Expression::isConstant() const { return constantNode(*root_); }

Expression operator+(const Expression& a, const Expression& b) { return Expression::binary(BinaryOp::Add, a, b); }
Expression operator-(const Expression& a, const Expression& b) { return Expression::binary(BinaryOp::Sub, a, b); }
Expression operator*(const Expression& a, const Expression& b) { return Expression::binary(BinaryOp::Mul, a, b); }
Expression operator/(const Expression& a, const Expression& b) { return Expression::binary(BinaryOp::Div, a, b); }
Expression operator-(const Expression& a) { return Expression::negate(a); }

TimeFunction TimeFunction::parse(std::string_view source, double domainStart) {
    return {Expression::parse(source), domainStart};
}

TimeFunction TimeFunction::constant(const Quaternion& q, double domainStart) {
    return {Expression::constant(q), domainStart};
}

Quaternion TimeFunction::eval(double t) const {
    if (t < start_ - 1e-12 * std::max(1.0, std::abs(start_))) throw EvalError("time before domain start", t);
    const Quaternion q = expr_.eval(t);
    if (!q.isFinite()) throw EvalError("non-finite value", t);
    return q;
}

RealFn TimeFunction::realPart() const {
    return [f = *this](double t) { return f.eval(t).w; };
}

}  // namespace qstab
