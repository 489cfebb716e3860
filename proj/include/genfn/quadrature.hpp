#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "genfn/embedding.hpp"
#include "genfn/errors.hpp"
#include "genfn/gen_function.hpp"

namespace genfn {

/// Tolerance for exact-identity checks.
inline constexpr double kIdentityTol = 1e-11;
/// Tolerance for parameter sweeps.
inline constexpr double kSweepTol = 1e-9;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadratureOptions {
    double abs_tol = kIdentityTol;
    /// Accept when error <= max(abs_tol, rel_tol * |value|).
    double rel_tol = 0.0;
    std::size_t max_intervals = 1'000'000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t subdivisions = 0;
};

/// Adaptive integration did not reach its tolerance. Carries the best estimate.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, QuadratureResult best) : Error(what), best_(best) {}
    const QuadratureResult& best() const { return best_; }

private:
    QuadratureResult best_;
};

using RealFunction = std::function<double(double)>;

/// Adaptive Gauss-Kronrod 7/15 on [a, b]. Local error is |K15 - G7|; the
/// interval with the largest error is bisected first (ties broken by
/// position), so the result is deterministic.
QuadratureResult integrate(const RealFunction& f, double a, double b, const QuadratureOptions& opts);
QuadratureResult integrate(const RealFunction& f, double a, double b, double tol);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], computed once per n.
const GaussRule& gauss_legendre(int n);
double integrate_fixed(const RealFunction& f, double a, double b, const GaussRule& rule);

/// Integral of u_eps over [lo, hi] (either end may be infinite). The
/// integration range is clipped to the support hint; the constant tails
/// outside it are added in closed form, and a nonzero constant tail on an
/// infinite side is a divergence error.
QuadratureResult integrate_at(const GenFunction& u, Interval domain, Epsilon eps, const QuadratureOptions& opts);

/// eps -> integral of u_eps over [a, b] to error <= tol * max(1, |value|);
/// quadrature failures surface when sampled.
GenNumber integrate_gf(const GenFunction& u, double a, double b, double tol = kSweepTol);
inline GenNumber integrate_gf(const GenFunction& u, double tol = kSweepTol) { return integrate_gf(u, -kInf, kInf, tol); }

/// <u_eps, psi>, split at the edges of u's active region so cost does not
/// depend on eps.
QuadratureResult pair_detailed(const GenFunction& u, const TestFunction& psi, Epsilon eps, double tol);
double pair(const GenFunction& u, const TestFunction& psi, Epsilon eps, double tol = kIdentityTol);
GenNumber pairing(const GenFunction& u, const TestFunction& psi, double tol = kIdentityTol);

}  // namespace genfn
