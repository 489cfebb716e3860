#include "genfn/gen_function.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace genfn {

Epsilon::Epsilon(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw ConstructionError(fmt::format("epsilon must be positive and finite, got {}", value));
}

SupportHint SupportHint::join(const SupportHint& a, const SupportHint& b) {
    if (a.kind_ == Kind::unbounded || b.kind_ == Kind::unbounded) return unbounded();
    if (a.kind_ == Kind::constant) return b;
    if (b.kind_ == Kind::constant) return a;
    return bounded(std::min(a.interval_.lo, b.interval_.lo), std::max(a.interval_.hi, b.interval_.hi));
}

Jet SmoothRepresentative::jet(double x, int order) const {
    if (order < 0 || order > Jet::kMaxOrder)
        throw EvaluationError(fmt::format("derivative order {} outside [0, {}]", order, Jet::kMaxOrder));
    Jet j = node_->eval(eps_, x, order);
    if (!j.all_finite())
        throw EvaluationError(fmt::format("non-finite value of '{}' at eps={}, x={}", node_->description(), eps_, x));
    return j;
}

double SmoothRepresentative::value(double x) const { return jet(x, 0).value(); }

double SmoothRepresentative::deriv(double x) const { return jet(x, 1)[1]; }

double evaluate(const GenFunction& u, Epsilon eps, double x) { return u.at(eps).value(x); }

namespace {

using detail::Node;
using NodePtr = std::shared_ptr<const Node>;

class ConstantNode final : public Node {
public:
    explicit ConstantNode(double c) : Node(fmt::format("{}", c)), c_(c) {}
    Jet eval(double, double, int order) const override { return Jet::constant(c_, order); }
    SupportHint support(double) const override { return SupportHint::constant(); }

private:
    double c_;
};

class BinaryNode final : public Node {
public:
    BinaryNode(BinaryOp op, NodePtr a, NodePtr b)
        : Node(fmt::format("({} {} {})", a->description(), symbol(op), b->description())),
          op_(op), a_(std::move(a)), b_(std::move(b)) {}

    Jet eval(double eps, double x, int order) const override {
        const Jet ja = a_->eval(eps, x, order);
        const Jet jb = b_->eval(eps, x, order);
        switch (op_) {
            case BinaryOp::add: return ja + jb;
            case BinaryOp::sub: return ja - jb;
            case BinaryOp::mul: return ja * jb;
        }
        return ja;
    }

    SupportHint support(double eps) const override {
        return SupportHint::join(a_->support(eps), b_->support(eps));
    }

private:
    static const char* symbol(BinaryOp op) {
        switch (op) {
            case BinaryOp::add: return "+";
            case BinaryOp::sub: return "-";
            case BinaryOp::mul: return "*";
        }
        return "?";
    }

    BinaryOp op_;
    NodePtr a_;
    NodePtr b_;
};

class ScaledNode final : public Node {
public:
    ScaledNode(double c, NodePtr a) : Node(fmt::format("{}*{}", c, a->description())), c_(c), a_(std::move(a)) {}
    Jet eval(double eps, double x, int order) const override { return c_ * a_->eval(eps, x, order); }
    SupportHint support(double eps) const override {
        return c_ == 0.0 ? SupportHint::constant() : a_->support(eps);
    }

private:
    double c_;
    NodePtr a_;
};

class WeightedNode final : public Node {
public:
    WeightedNode(GenNumber w, NodePtr a)
        : Node(fmt::format("[{}]*{}", w.description(), a->description())), w_(std::move(w)), a_(std::move(a)) {}
    Jet eval(double eps, double x, int order) const override {
        return w_.at(Epsilon(eps)) * a_->eval(eps, x, order);
    }
    SupportHint support(double eps) const override { return a_->support(eps); }

private:
    GenNumber w_;
    NodePtr a_;
};

class DerivativeNode final : public Node {
public:
    explicit DerivativeNode(NodePtr a) : Node(a->description() + "'"), a_(std::move(a)) {}
    Jet eval(double eps, double x, int order) const override {
        if (order + 1 > Jet::kMaxOrder)
            throw EvaluationError(fmt::format("'{}' needs derivative order beyond {}", description(), Jet::kMaxOrder));
        return a_->eval(eps, x, order + 1).differentiated();
    }
    SupportHint support(double eps) const override {
        // u' vanishes wherever u is locally constant
        return a_->support(eps);
    }

private:
    NodePtr a_;
};

std::string polynomial_description(const std::vector<double>& coeffs, const std::string& arg) {
    std::string s = "p[";
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += fmt::format("{}{}", i ? "," : "", coeffs[i]);
    return s + "](" + arg + ")";
}

class PolynomialNode final : public Node {
public:
    PolynomialNode(std::vector<double> coeffs, NodePtr a)
        : Node(polynomial_description(coeffs, a->description())), coeffs_(std::move(coeffs)), a_(std::move(a)) {}
    Jet eval(double eps, double x, int order) const override { return polyval(coeffs_, a_->eval(eps, x, order)); }
    SupportHint support(double eps) const override {
        if (coeffs_.size() <= 1) return SupportHint::constant();
        return a_->support(eps);
    }

private:
    std::vector<double> coeffs_;
    NodePtr a_;
};

}  // namespace

GenNumber GenNumber::constant(double c) {
    return GenNumber([c](Epsilon) { return c; }, fmt::format("{}", c));
}

GenNumber GenNumber::power(double c, double exponent) {
    return GenNumber([c, exponent](Epsilon e) { return c * std::pow(e.value(), exponent); },
                     fmt::format("{}*eps^{}", c, exponent));
}

GenNumber GenNumber::log_inverse(double c) {
    return GenNumber([c](Epsilon e) { return c * std::log(1.0 / e.value()); }, fmt::format("{}*log(1/eps)", c));
}

GenNumber operator+(const GenNumber& a, const GenNumber& b) {
    return GenNumber([a, b](Epsilon e) { return a.at(e) + b.at(e); },
                     fmt::format("({} + {})", a.description(), b.description()));
}

GenNumber operator-(const GenNumber& a, const GenNumber& b) {
    return GenNumber([a, b](Epsilon e) { return a.at(e) - b.at(e); },
                     fmt::format("({} - {})", a.description(), b.description()));
}

GenNumber operator*(const GenNumber& a, const GenNumber& b) {
    return GenNumber([a, b](Epsilon e) { return a.at(e) * b.at(e); },
                     fmt::format("({} * {})", a.description(), b.description()));
}

GenNumber operator*(double c, const GenNumber& a) {
    return GenNumber([c, a](Epsilon e) { return c * a.at(e); }, fmt::format("{}*{}", c, a.description()));
}

GenFunction combine(BinaryOp op, const GenFunction& u, const GenFunction& v) {
    return GenFunction(std::make_shared<BinaryNode>(op, u.node(), v.node()));
}

GenFunction scale(double c, const GenFunction& u) {
    if (!std::isfinite(c)) throw ConstructionError("scale factor must be finite");
    return GenFunction(std::make_shared<ScaledNode>(c, u.node()));
}

GenFunction scale(const GenNumber& w, const GenFunction& u) {
    return GenFunction(std::make_shared<WeightedNode>(w, u.node()));
}

GenFunction derivative(const GenFunction& u) { return GenFunction(std::make_shared<DerivativeNode>(u.node())); }

GenFunction compose_polynomial(std::vector<double> coeffs, const GenFunction& u) {
    for (double c : coeffs)
        if (!std::isfinite(c)) throw ConstructionError("polynomial coefficients must be finite");
    return GenFunction(std::make_shared<PolynomialNode>(std::move(coeffs), u.node()));
}

GenFunction constant_function(double c) { return GenFunction(std::make_shared<ConstantNode>(c)); }

}  // namespace genfn
