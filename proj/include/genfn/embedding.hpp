#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "genfn/gen_function.hpp"

namespace genfn {

enum class MollifierKind { bump, cosine_power, truncated_gaussian };

struct MollifierParams {
    double radius = 1.0;
    /// cosine_power only: integer exponent k >= 2
    int exponent = 4;
    /// truncated_gaussian only
    double sigma = 0.4;
    /// profile is multiplied by (1 + skew * y / radius); |skew| < 1, 0 means symmetric
    double skew = 0.0;
};

/// Normalized, compactly supported kernel rho with its exact antiderivative P.
///
/// rho vanishes for |y| >= radius. P(-radius) = 0, P(radius) = 1, and P is
/// tabulated once at construction as a piecewise Chebyshev interpolant of the
/// integral of rho, so that H_eps(x) = P(x / eps) costs one Clenshaw sum.
/// For symmetric profiles P is built from 0 outward, which makes P(0) = 1/2
/// exactly. The truncated Gaussian jumps at +-radius; its derivatives there
/// are one-sided, which no in-scope integral sees because quadrature is
/// clipped to the open support.
class Mollifier {
public:
    MollifierKind kind() const;
    const MollifierParams& params() const;
    double support_radius() const;
    bool is_symmetric() const;
    /// "bump", "cosine_power:k=4", ... (round-trips through parse_mollifier)
    std::string name() const;

    double operator()(double y) const;
    Jet jet(double y, int order) const;
    double primitive(double y) const;
    Jet primitive_jet(double y, int order) const;
    /// 1 / integral of the unnormalized profile.
    double normalization() const;

    struct Impl;

private:
    friend Mollifier make_mollifier(MollifierKind, const MollifierParams&);
    explicit Mollifier(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Throws ConstructionError for parameters that do not give a positive, normalizable profile.
Mollifier make_mollifier(MollifierKind kind, const MollifierParams& params = {});

/// "bump", "bump:R=2", "cosine_power:k=6", "truncated_gaussian:sigma=0.3,skew=0.2"
Mollifier parse_mollifier(const std::string& text);
std::string to_string(MollifierKind kind);

/// A compactly supported smooth probe psi.
struct TestFunction {
    int id = 0;
    std::function<double(double)> eval;
    Interval support{0.0, 0.0};
    double value_at_zero = 0.0;
    std::string description;

    double operator()(double x) const { return support.contains(x) ? eval(x) : 0.0; }
};

/// delta_eps(x) = rho(x / eps) / eps
GenFunction embed_delta(const Mollifier& m);
/// H_eps(x) = P(x / eps)
GenFunction embed_heaviside(const Mollifier& m);

/// A smooth, eps-independent function written over jets, e.g. [](const Jet& x) { return x * x; }.
using JetFunction = std::function<Jet(const Jet&)>;
GenFunction embed_smooth(JetFunction f, std::string description);
GenFunction embed_constant(double c);
GenFunction embed_polynomial(std::vector<double> coeffs);

/// Deterministic probes: bumps of random width/center times low-degree
/// polynomials. Member 0 is nonnegative with psi(0) > 0; member 1 (when
/// count >= 2) has psi(0) = 0.
std::vector<TestFunction> standard_test_suite(int count, std::uint64_t seed);

}  // namespace genfn
