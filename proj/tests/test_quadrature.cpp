#include <doctest.h>

#include <cmath>
#include <numbers>

#include "genfn/embedding.hpp"
#include "genfn/quadrature.hpp"

using namespace genfn;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
    for (int n : {5, 10, 20}) {
        const auto& rule = gauss_legendre(n);
        double sum = 0.0;
        for (double w : rule.weights) sum += w;
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-15));
        for (int k = 0; k <= 2 * n - 1; ++k) {
            const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
            CHECK(integrate_fixed([&](double x) { return std::pow(x, k); }, -1.0, 1.0, rule) ==
                  doctest::Approx(exact).epsilon(1e-14));
        }
    }
}

TEST_CASE("adaptive integration meets the requested tolerance") {
    const auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 1e-13);
    CHECK(std::abs(r.value - 2.0) <= 1e-13);
    CHECK(r.error_estimate <= 1e-13);

    const auto peaked = integrate([](double x) { return 1e-3 / (x * x + 1e-6); }, -1.0, 1.0, 1e-11);
    CHECK(std::abs(peaked.value - 2.0 * std::atan(1e3)) <= 1e-10);
    CHECK(peaked.subdivisions > 1);
}

TEST_CASE("integration is deterministic") {
    auto f = [](double x) { return std::exp(-x * x) * std::cos(5 * x); };
    const auto a = integrate(f, -3.0, 2.0, 1e-12);
    const auto b = integrate(f, -3.0, 2.0, 1e-12);
    CHECK(a.value == b.value);
    CHECK(a.subdivisions == b.subdivisions);
}

TEST_CASE("an exhausted interval budget raises with the best estimate") {
    QuadratureOptions opts;
    opts.abs_tol = 1e-14;
    opts.max_intervals = 3;
    try {
        integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, opts);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        CHECK(e.best().value == doctest::Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("integrals over R use the support hint") {
    const auto m = parse_mollifier("bump");
    const auto d = embed_delta(m);
    const auto h = embed_heaviside(m);
    for (double eps : {0.5, 1e-3, 1e-9}) {
        CHECK(std::abs(integrate_gf(d, 1e-13).at(Epsilon(eps)) - 1.0) <= 1e-12);
        CHECK(std::abs(integrate_gf(derivative(h), 1e-13).at(Epsilon(eps)) - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(integrate_at(h, {-kInf, kInf}, Epsilon(0.1), {}), QuadratureError);
    CHECK(integrate_at(h, {-1.0, 1.0}, Epsilon(0.1), {1e-13, 0.0}).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integration is additive") {
    const auto m = parse_mollifier("cosine_power:k=4");
    const auto h = embed_heaviside(m);
    const auto d = embed_delta(m);
    const auto u = (h * h - h) * d;
    const auto v = h * d * d;
    const double tol = 1e-11;
    for (double eps : {0.1, 0.01}) {
        const QuadratureOptions opts{tol, 0.0};
        const Epsilon e(eps);
        const double whole = integrate_at(u + v, {-kInf, kInf}, e, opts).value;
        const double parts = integrate_at(u, {-kInf, kInf}, e, opts).value + integrate_at(v, {-kInf, kInf}, e, opts).value;
        CHECK(std::abs(whole - parts) <= 3 * tol * std::max(1.0, std::abs(whole)));
        const double left = integrate_at(u, {-kInf, 0.0}, e, opts).value;
        const double right = integrate_at(u, {0.0, kInf}, e, opts).value;
        CHECK(std::abs(left + right - integrate_at(u, {-kInf, kInf}, e, opts).value) <= 3 * tol);
    }
}

TEST_CASE("pairing cost does not grow as eps shrinks") {
    const auto m = parse_mollifier("bump");
    const auto h = embed_heaviside(m);
    const auto suite = standard_test_suite(4, 1);
    for (const auto& psi : suite) {
        std::size_t coarse = 0, fine = 0;
        coarse = pair_detailed(h * h - h, psi, Epsilon(0.1), kIdentityTol).subdivisions;
        fine = pair_detailed(h * h - h, psi, Epsilon(1e-6), kIdentityTol).subdivisions;
        CHECK(fine <= coarse + 2);
    }
}

TEST_CASE("pairing the delta samples the probe at the origin") {
    const auto m = parse_mollifier("truncated_gaussian:sigma=0.4");
    const auto d = embed_delta(m);
    const auto suite = standard_test_suite(6, 3);
    for (const auto& psi : suite) {
        const double v = pair(d, psi, Epsilon(1e-5));
        CHECK(std::abs(v - psi.value_at_zero) <= 1e-8);
    }
}
