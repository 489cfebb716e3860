#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "genfn/errors.hpp"
#include "genfn/jet.hpp"

namespace genfn {

/// Regularization scale. Always strictly positive.
class Epsilon {
public:
    explicit Epsilon(double value);
    double value() const { return value_; }

private:
    double value_;
};

struct Interval {
    double lo;
    double hi;

    double length() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Where a representative may differ from a constant.
///
/// `constant`: the function is constant on all of R. `bounded`: constant on
/// each side of `interval()` (possibly different constants). `unbounded`: no
/// information.
class SupportHint {
public:
    enum class Kind { constant, bounded, unbounded };

    static SupportHint constant() { return SupportHint(Kind::constant, {0.0, 0.0}); }
    static SupportHint bounded(double lo, double hi) { return SupportHint(Kind::bounded, {lo, hi}); }
    static SupportHint unbounded() { return SupportHint(Kind::unbounded, {0.0, 0.0}); }

    /// Region of non-constancy of a function built from two operands.
    static SupportHint join(const SupportHint& a, const SupportHint& b);

    Kind kind() const { return kind_; }
    bool is_bounded() const { return kind_ == Kind::bounded; }
    const Interval& interval() const { return interval_; }

private:
    SupportHint(Kind k, Interval i) : kind_(k), interval_(i) {}
    Kind kind_;
    Interval interval_;
};

namespace detail {

class Node {
public:
    explicit Node(std::string description) : description_(std::move(description)) {}
    virtual ~Node() = default;

    /// Taylor jet of the representative at scale eps around x.
    virtual Jet eval(double eps, double x, int order) const = 0;
    virtual SupportHint support(double eps) const = 0;

    const std::string& description() const { return description_; }

private:
    std::string description_;
};

}  // namespace detail

/// One member of an eps-family: a smooth function with exact derivatives.
class SmoothRepresentative {
public:
    SmoothRepresentative(std::shared_ptr<const detail::Node> node, double eps)
        : node_(std::move(node)), eps_(eps) {}

    double operator()(double x) const { return value(x); }
    double value(double x) const;
    double deriv(double x) const;
    Jet jet(double x, int order) const;
    SupportHint support_hint() const { return node_->support(eps_); }
    double epsilon() const { return eps_; }

private:
    std::shared_ptr<const detail::Node> node_;
    double eps_;
};

/// An eps-indexed family of smooth representatives. Immutable; cheap to copy.
class GenFunction {
public:
    explicit GenFunction(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

    SmoothRepresentative at(Epsilon eps) const { return SmoothRepresentative(node_, eps.value()); }
    const std::string& description() const { return node_->description(); }
    const std::shared_ptr<const detail::Node>& node() const { return node_; }

private:
    std::shared_ptr<const detail::Node> node_;
};

/// An eps-indexed family of reals, evaluated lazily.
class GenNumber {
public:
    using Fn = std::function<double(Epsilon)>;

    GenNumber(Fn fn, std::string description) : fn_(std::move(fn)), description_(std::move(description)) {}

    static GenNumber constant(double c);
    /// c * eps^exponent
    static GenNumber power(double c, double exponent);
    /// c * log(1 / eps)
    static GenNumber log_inverse(double c);

    double at(Epsilon eps) const { return fn_(eps); }
    double operator()(Epsilon eps) const { return fn_(eps); }
    const std::string& description() const { return description_; }

    friend GenNumber operator+(const GenNumber& a, const GenNumber& b);
    friend GenNumber operator-(const GenNumber& a, const GenNumber& b);
    friend GenNumber operator*(const GenNumber& a, const GenNumber& b);
    friend GenNumber operator*(double c, const GenNumber& a);

private:
    Fn fn_;
    std::string description_;
};

enum class BinaryOp { add, sub, mul };

/// Pointwise value of u at (eps, x). Throws EvaluationError on a non-finite result.
double evaluate(const GenFunction& u, Epsilon eps, double x);

GenFunction combine(BinaryOp op, const GenFunction& u, const GenFunction& v);
GenFunction scale(double c, const GenFunction& u);
/// eps-dependent weight: representative at eps is w(eps) * u_eps.
GenFunction scale(const GenNumber& w, const GenFunction& u);
GenFunction derivative(const GenFunction& u);
/// p(u) with p given by ascending coefficients.
GenFunction compose_polynomial(std::vector<double> coeffs, const GenFunction& u);

/// The constant function c (eps-independent).
GenFunction constant_function(double c);

inline GenFunction operator+(const GenFunction& u, const GenFunction& v) { return combine(BinaryOp::add, u, v); }
inline GenFunction operator-(const GenFunction& u, const GenFunction& v) { return combine(BinaryOp::sub, u, v); }
inline GenFunction operator*(const GenFunction& u, const GenFunction& v) { return combine(BinaryOp::mul, u, v); }
inline GenFunction operator*(double c, const GenFunction& u) { return scale(c, u); }

}  // namespace genfn
