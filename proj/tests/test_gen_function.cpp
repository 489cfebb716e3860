#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "genfn/embedding.hpp"
#include "genfn/gen_function.hpp"

using namespace genfn;

namespace {

struct Family {
    GenFunction h, d, s;
};

Family family(const Mollifier& m) {
    return {embed_heaviside(m), embed_delta(m), embed_smooth([](const Jet& x) { return sin(x) * x + 1.0; }, "x sin x + 1")};
}

// 10^3 points spread over a few support widths around the origin
std::vector<double> points(double eps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> y(-2.0, 2.0);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = eps * y(rng);
    return xs;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b))); }

const std::vector<double> kEps{0.5, 0.1, 0.01, 1e-3};

}  // namespace

TEST_CASE("Epsilon rejects non-positive values") {
    CHECK_THROWS_AS(Epsilon(0.0), ConstructionError);
    CHECK_THROWS_AS(Epsilon(-1e-3), ConstructionError);
    CHECK_THROWS_AS(Epsilon(std::nan("")), ConstructionError);
}

TEST_CASE("ring laws hold pointwise") {
    for (const auto& spec : {"bump", "cosine_power:k=4", "truncated_gaussian:sigma=0.4,skew=0.3"}) {
        const auto [h, d, s] = family(parse_mollifier(spec));
        const auto lhs_comm = h * d, rhs_comm = d * h;
        const auto lhs_assoc = (h * d) * s, rhs_assoc = h * (d * s);
        const auto lhs_dist = h * (d + s), rhs_dist = h * d + h * s;
        const auto lhs_add = (h + d) + s, rhs_add = h + (d + s);
        for (double eps : kEps) {
            const Epsilon e(eps);
            for (double x : points(eps, 7)) {
                CHECK(close(evaluate(lhs_comm, e, x), evaluate(rhs_comm, e, x), 1e-12));
                CHECK(close(evaluate(lhs_assoc, e, x), evaluate(rhs_assoc, e, x), 1e-12));
                CHECK(close(evaluate(lhs_dist, e, x), evaluate(rhs_dist, e, x), 1e-12));
                CHECK(close(evaluate(lhs_add, e, x), evaluate(rhs_add, e, x), 1e-12));
                CHECK(close(evaluate(h - h, e, x), 0.0, 1e-12));
            }
        }
    }
}

TEST_CASE("Leibniz rule at 10^3 points") {
    for (const auto& spec : {"bump", "cosine_power:k=6", "truncated_gaussian"}) {
        const auto [h, d, s] = family(parse_mollifier(spec));
        for (const auto& [u, v] : {std::pair{h, d}, std::pair{h, s}, std::pair{d, s}, std::pair{h, h}}) {
            const auto lhs = derivative(u * v);
            const auto rhs = derivative(u) * v + u * derivative(v);
            for (double eps : kEps) {
                const Epsilon e(eps);
                for (double x : points(eps, 11)) CHECK(close(evaluate(lhs, e, x), evaluate(rhs, e, x), 1e-10));
            }
        }
    }
}

TEST_CASE("analytic derivative matches central differences away from support edges") {
    for (const auto& spec : {"bump", "cosine_power:k=4", "truncated_gaussian:sigma=0.4"}) {
        const auto m = parse_mollifier(spec);
        const auto [h, d, s] = family(m);
        const auto r = m.support_radius();
        for (const auto& u : {h, d, h * h - h, s * d, derivative(d)}) {
            for (double eps : {0.3, 0.05, 0.004}) {
                const auto rep = u.at(Epsilon(eps));
                const double step = 1e-5 * eps;
                std::mt19937_64 rng(3);
                std::uniform_real_distribution<double> y(-0.9 * r, 0.9 * r);
                for (int i = 0; i < 200; ++i) {
                    const double x = eps * y(rng);
                    const double fd = (rep(x + step) - rep(x - step)) / (2 * step);
                    const double exact = rep.deriv(x);
                    CHECK(std::abs(fd - exact) <= std::max(1e-6, 1e-6 * std::abs(exact)));
                }
            }
        }
    }
}

TEST_CASE("outside the support hint the derivative vanishes") {
    const auto m = parse_mollifier("bump");
    const auto h = embed_heaviside(m);
    const auto u = h * h - h;
    for (double eps : kEps) {
        const auto rep = u.at(Epsilon(eps));
        const auto hint = rep.support_hint();
        REQUIRE(hint.is_bounded());
        for (double x : {hint.interval().lo - eps, hint.interval().hi + eps, 10.0, -10.0}) {
            CHECK(rep.deriv(x) == 0.0);
            CHECK(rep.value(x) == 0.0);
        }
    }
}

TEST_CASE("evaluation is deterministic") {
    const auto [h, d, s] = family(parse_mollifier("cosine_power:k=4"));
    const auto u = (h * h - h) * derivative(h) + s * d;
    for (double x : points(0.01, 5)) CHECK(evaluate(u, Epsilon(0.01), x) == evaluate(u, Epsilon(0.01), x));
}

TEST_CASE("compose_polynomial and scaling agree with arithmetic") {
    const auto h = embed_heaviside(parse_mollifier("bump"));
    const auto poly = compose_polynomial({0.0, -1.0, 1.0}, h);
    const auto prod = h * h - h;
    const auto scaled = scale(GenNumber::power(2.0, 1.0), h);
    for (double eps : kEps)
        for (double x : points(eps, 13)) {
            CHECK(close(evaluate(poly, Epsilon(eps), x), evaluate(prod, Epsilon(eps), x), 1e-14));
            CHECK(evaluate(scaled, Epsilon(eps), x) == doctest::Approx(2.0 * eps * evaluate(h, Epsilon(eps), x)));
            CHECK(evaluate(3.0 * h, Epsilon(eps), x) == doctest::Approx(3.0 * evaluate(h, Epsilon(eps), x)));
        }
}

TEST_CASE("jets beyond the carried order are an error") {
    auto d = embed_delta(parse_mollifier("bump"));
    for (int k = 0; k < Jet::kMaxOrder; ++k) d = derivative(d);
    CHECK_NOTHROW(d.at(Epsilon(0.1)).value(0.0));
    CHECK_THROWS_AS(derivative(d).at(Epsilon(0.1)).value(0.0), EvaluationError);
}

TEST_CASE("non-finite representatives are reported") {
    const auto blow = embed_smooth([](const Jet& x) { return Jet::constant(1.0, x.order()) / x; }, "1/x");
    CHECK_THROWS_AS(blow.at(Epsilon(0.1)).value(0.0), EvaluationError);
}

TEST_CASE("GenNumber arithmetic") {
    const Epsilon e(0.01);
    CHECK(GenNumber::constant(3.0).at(e) == 3.0);
    CHECK(GenNumber::power(2.0, -1.0).at(e) == doctest::Approx(200.0));
    CHECK(GenNumber::log_inverse(1.0).at(e) == doctest::Approx(std::log(100.0)));
    const auto g = GenNumber::constant(1.0) + 2.0 * GenNumber::power(1.0, 1.0);
    CHECK(g.at(e) == doctest::Approx(1.02));
    CHECK((g * g - g).at(e) == doctest::Approx(1.02 * 1.02 - 1.02));
}
