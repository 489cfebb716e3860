#include "genfn/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include <fmt/format.h>

#include "genfn/kernels.hpp"
#include "genfn/quadrature.hpp"

namespace genfn::expr {

ParseError::ParseError(const std::string& message, std::size_t offset, std::vector<std::string> expected)
    : Error(fmt::format("parse error at byte {}: {}", offset, message)), offset_(offset), expected_(std::move(expected)) {}

ExprError::ExprError(const std::string& message, Span span)
    : Error(fmt::format("{} (bytes {}..{})", message, span.begin, span.end)), span_(span) {}

std::string to_string(ValueType t) {
    switch (t) {
        case ValueType::function: return "function";
        case ValueType::number: return "number";
        case ValueType::scalar: return "scalar";
    }
    return "?";
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    if (a.kind == Kind::constant && a.number != b.number) return false;
    if ((a.kind == Kind::pow || a.kind == Kind::pair) && a.integer != b.integer) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(a.args[i], b.args[i])) return false;
    return true;
}

namespace {

const std::vector<std::string> kAtomStart{"'H'", "'D'", "'x'", "number", "'('", "'int'", "'pair'"};

Expr make(Kind kind, Span span, std::vector<Expr> args = {}) {
    Expr e;
    e.kind = kind;
    e.span = span;
    e.args = std::move(args);
    return e;
}

class Parser {
public:
    explicit Parser(const std::string& src) : src_(src) {}

    Expr parse_all() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError(fmt::format("unexpected '{}'", src_[pos_]), pos_,
                             {"'+'", "'-'", "'*'", "'^'", "'''", "end of input"});
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

    void expect(char c, std::vector<std::string> expected) {
        if (!accept(c)) {
            const std::string found = pos_ < src_.size() ? fmt::format("'{}'", src_[pos_]) : "end of input";
            throw ParseError(fmt::format("expected '{}', found {}", c, found), pos_, std::move(expected));
        }
    }

    Expr parse_expr() {
        skip_ws();
        const std::size_t start = pos_;
        Expr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (pos_ >= src_.size()) break;
            const char c = src_[pos_];
            if (c != '+' && c != '-') break;
            ++pos_;
            Expr rhs = parse_term();
            lhs = make(c == '+' ? Kind::add : Kind::sub, {start, pos_}, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    Expr parse_term() {
        skip_ws();
        const std::size_t start = pos_;
        Expr lhs = parse_factor();
        while (accept('*')) {
            Expr rhs = parse_factor();
            lhs = make(Kind::mul, {start, pos_}, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    Expr parse_factor() {
        skip_ws();
        const std::size_t start = pos_;
        Expr e = parse_atom();
        if (accept('^')) {
            skip_ws();
            const int n = parse_int("integer exponent >= 1");
            if (n < 1) throw ParseError("exponent must be >= 1", pos_, {"integer exponent >= 1"});
            e = make(Kind::pow, {start, pos_}, {std::move(e)});
            e.integer = n;
        }
        while (accept('\'')) e = make(Kind::prime, {start, pos_}, {std::move(e)});
        return e;
    }

    int parse_int(const std::string& what) {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        int v = 0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (start == pos_ || ec != std::errc() || ptr != src_.data() + pos_) {
            pos_ = start;
            throw ParseError(fmt::format("expected {}", what), start, {what});
        }
        return v;
    }

    bool at_number() const {
        if (pos_ >= src_.size()) return false;
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return true;
        return c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]));
    }

    double parse_number(std::size_t start) {
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        };
        digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                digits();
            else
                throw ParseError("malformed exponent in number", mark, {"digit"});
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
        if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(v))
            throw ParseError("number out of range", start, {"finite number"});
        return v;
    }

    Expr parse_atom() {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_, kAtomStart);

        if (src_[pos_] == '-' && pos_ + 1 < src_.size()) {
            ++pos_;
            if (at_number()) {
                Expr e = make(Kind::constant, {start, 0});
                e.number = parse_number(start);
                e.span.end = pos_;
                return e;
            }
            pos_ = start;
        }
        if (at_number()) {
            Expr e = make(Kind::constant, {start, 0});
            e.number = parse_number(start);
            e.span.end = pos_;
            return e;
        }
        if (accept('(')) {
            Expr inner = parse_expr();
            expect(')', {"')'", "'+'", "'-'", "'*'"});
            inner.span = {start, pos_};
            return inner;
        }
        std::size_t end = pos_;
        while (end < src_.size() && (std::isalpha(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) ++end;
        const std::string word = src_.substr(pos_, end - pos_);
        if (word.empty()) throw ParseError(fmt::format("unexpected '{}'", src_[pos_]), pos_, kAtomStart);
        pos_ = end;
        if (word == "H") return make(Kind::heaviside, {start, pos_});
        if (word == "D") return make(Kind::delta, {start, pos_});
        if (word == "x") return make(Kind::variable, {start, pos_});
        if (word == "int") {
            expect('(', {"'('"});
            Expr inner = parse_expr();
            expect(')', {"')'", "'+'", "'-'", "'*'"});
            return make(Kind::integral, {start, pos_}, {std::move(inner)});
        }
        if (word == "pair") {
            expect('(', {"'('"});
            Expr inner = parse_expr();
            expect(',', {"','", "'+'", "'-'", "'*'"});
            skip_ws();
            const int index = parse_int("test function index");
            expect(')', {"')'"});
            Expr e = make(Kind::pair, {start, pos_}, {std::move(inner)});
            e.integer = index;
            return e;
        }
        throw ParseError(fmt::format("unknown name '{}'", word), start, kAtomStart);
    }

    const std::string& src_;
    std::size_t pos_ = 0;
};

bool is_atomic(Kind k) {
    switch (k) {
        case Kind::heaviside:
        case Kind::delta:
        case Kind::variable:
        case Kind::integral:
        case Kind::pair:
        case Kind::add:  // printed fully parenthesized
        case Kind::sub:
        case Kind::mul: return true;
        default: return false;
    }
}

std::string number_text(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

ValueType type_of(const Expr& e) {
    switch (e.kind) {
        case Kind::heaviside:
        case Kind::delta:
        case Kind::variable: return ValueType::function;
        case Kind::constant: return ValueType::scalar;
        case Kind::add:
        case Kind::sub:
        case Kind::mul: {
            const ValueType a = type_of(e.args[0]);
            const ValueType b = type_of(e.args[1]);
            if ((a == ValueType::function && b == ValueType::number) ||
                (a == ValueType::number && b == ValueType::function))
                throw ExprError("cannot combine a number-valued and a function-valued operand", e.span);
            if (a == ValueType::function || b == ValueType::function) return ValueType::function;
            if (a == ValueType::number || b == ValueType::number) return ValueType::number;
            return ValueType::scalar;
        }
        case Kind::pow: return type_of(e.args[0]);
        case Kind::prime:
            if (type_of(e.args[0]) == ValueType::number)
                throw ExprError("derivative applies only to generalized functions", e.span);
            return ValueType::function;
        case Kind::integral:
        case Kind::pair:
            if (type_of(e.args[0]) == ValueType::number)
                throw ExprError(fmt::format("{} needs a function-valued argument", e.kind == Kind::pair ? "pair" : "int"),
                                e.span);
            return ValueType::number;
    }
    throw ExprError("unknown node", e.span);
}

Expr parse(const std::string& text) {
    Parser p(text);
    Expr e = p.parse_all();
    type_of(e);
    return e;
}

std::string to_string(const Expr& e) {
    auto operand = [](const Expr& a) {
        const std::string s = to_string(a);
        if (is_atomic(a.kind) || (a.kind == Kind::constant && a.number >= 0.0)) return s;
        return "(" + s + ")";
    };
    switch (e.kind) {
        case Kind::heaviside: return "H";
        case Kind::delta: return "D";
        case Kind::variable: return "x";
        case Kind::constant: return number_text(e.number);
        case Kind::add: return "(" + to_string(e.args[0]) + " + " + to_string(e.args[1]) + ")";
        case Kind::sub: return "(" + to_string(e.args[0]) + " - " + to_string(e.args[1]) + ")";
        case Kind::mul: return "(" + to_string(e.args[0]) + " * " + to_string(e.args[1]) + ")";
        case Kind::pow: return operand(e.args[0]) + "^" + std::to_string(e.integer);
        case Kind::prime: {
            const Expr& a = e.args[0];
            if (a.kind == Kind::pow || a.kind == Kind::prime) return to_string(a) + "'";
            return operand(a) + "'";
        }
        case Kind::integral: return "int(" + to_string(e.args[0]) + ")";
        case Kind::pair: return "pair(" + to_string(e.args[0]) + ", " + std::to_string(e.integer) + ")";
    }
    return "?";
}

GenFunction to_gen_function(const Expr& e, const Mollifier& m) {
    switch (e.kind) {
        case Kind::heaviside: return embed_heaviside(m);
        case Kind::delta: return embed_delta(m);
        case Kind::variable: return embed_polynomial({0.0, 1.0});
        case Kind::constant: return constant_function(e.number);
        case Kind::add: return to_gen_function(e.args[0], m) + to_gen_function(e.args[1], m);
        case Kind::sub: return to_gen_function(e.args[0], m) - to_gen_function(e.args[1], m);
        case Kind::mul: return to_gen_function(e.args[0], m) * to_gen_function(e.args[1], m);
        case Kind::pow: {
            std::vector<double> coeffs(static_cast<std::size_t>(e.integer) + 1, 0.0);
            coeffs.back() = 1.0;
            return compose_polynomial(std::move(coeffs), to_gen_function(e.args[0], m));
        }
        case Kind::prime: return derivative(to_gen_function(e.args[0], m));
        case Kind::integral:
        case Kind::pair: break;
    }
    throw ExprError("number-valued node used where a generalized function is required", e.span);
}

namespace {

struct NumValue {
    double value;
    double error;
};

NumValue eval_number(const Expr& e, const EvalContext& ctx, Epsilon eps) {
    try {
        switch (e.kind) {
            case Kind::constant: return {e.number, 0.0};
            case Kind::integral: {
                QuadratureOptions opts;
                opts.abs_tol = ctx.tol;
                opts.rel_tol = ctx.tol;
                const auto r = integrate_at(to_gen_function(e.args[0], ctx.mollifier), {-kInf, kInf}, eps, opts);
                return {r.value, r.error_estimate};
            }
            case Kind::pair: {
                if (e.integer < 0 || static_cast<std::size_t>(e.integer) >= ctx.suite.size())
                    throw ExprError(fmt::format("test function index {} outside suite of {}", e.integer, ctx.suite.size()),
                                    e.span);
                const auto r = pair_detailed(to_gen_function(e.args[0], ctx.mollifier),
                                             ctx.suite[static_cast<std::size_t>(e.integer)], eps, ctx.tol);
                return {r.value, r.error_estimate};
            }
            case Kind::add:
            case Kind::sub: {
                const NumValue a = eval_number(e.args[0], ctx, eps);
                const NumValue b = eval_number(e.args[1], ctx, eps);
                return {e.kind == Kind::add ? a.value + b.value : a.value - b.value, a.error + b.error};
            }
            case Kind::mul: {
                const NumValue a = eval_number(e.args[0], ctx, eps);
                const NumValue b = eval_number(e.args[1], ctx, eps);
                return {a.value * b.value, std::abs(a.value) * b.error + std::abs(b.value) * a.error};
            }
            case Kind::pow: {
                const NumValue a = eval_number(e.args[0], ctx, eps);
                const double v = std::pow(a.value, e.integer);
                const double d = e.integer * std::pow(std::abs(a.value), e.integer - 1);
                return {v, d * a.error};
            }
            default: break;
        }
    } catch (const ExprError&) {
        throw;
    } catch (const Error& err) {
        throw ExprError(err.what(), e.span);
    }
    throw ExprError("function-valued node used where a number is required", e.span);
}

}  // namespace

EvalReport evaluate(const Expr& e, const EvalContext& ctx) {
    EvalReport report;
    report.expression = to_string(e);
    report.type = type_of(e);
    const auto eps = ctx.grid.values();

    if (report.type == ValueType::function) {
        const GenFunction u = to_gen_function(e, ctx.mollifier);
        const double r = ctx.mollifier.support_radius();
        constexpr int kPoints = 31;
        const auto tables = kernels::map_cells(eps.size(), [&](std::size_t i) {
            std::vector<FunctionRow> rows;
            const auto rep = u.at(Epsilon(eps[i]));
            for (int k = 0; k < kPoints; ++k) {
                const double x = eps[i] * (-1.5 * r + 3.0 * r * k / (kPoints - 1));
                try {
                    rows.push_back({eps[i], x, rep.value(x)});
                } catch (const Error& err) {
                    throw ExprError(err.what(), e.span);
                }
            }
            return rows;
        });
        for (const auto& t : tables) report.functions.insert(report.functions.end(), t.begin(), t.end());
        return report;
    }

    const auto values = kernels::map_cells(eps.size(), [&](std::size_t i) {
        const NumValue v = eval_number(e, ctx, Epsilon(eps[i]));
        return NumberRow{eps[i], v.value, v.error};
    });
    report.numbers = values;
    SampleTable samples;
    for (const auto& row : values) samples.push_back({row.eps, row.value});
    report.classification = classify(samples, ctx.thresholds);
    return report;
}

}  // namespace genfn::expr
