#include <doctest.h>

#include <cmath>

#include "genfn/asymptotics.hpp"
#include "genfn/embedding.hpp"

using namespace genfn;

namespace {

SampleTable table(const EpsilonGrid& grid, auto f) {
    SampleTable t;
    for (double e : grid.values()) t.push_back({e, f(e)});
    return t;
}

}  // namespace

TEST_CASE("grid validation") {
    CHECK_NOTHROW(EpsilonGrid{}.validate());
    CHECK(EpsilonGrid{}.values().size() == 10);
    CHECK(EpsilonGrid{}.values().front() == 0.125);
    CHECK_THROWS_AS((EpsilonGrid{0.1, 1.0, 10}.validate()), ConstructionError);
    CHECK_THROWS_AS((EpsilonGrid{0.1, 0.5, 3}.validate()), ConstructionError);
    CHECK_THROWS_AS((EpsilonGrid{2.0, 0.5, 10}.validate()), ConstructionError);
    CHECK_THROWS_AS((EpsilonGrid{0.1, 0.01, 10}.validate()), ConstructionError);
}

TEST_CASE("power-law fits") {
    const EpsilonGrid grid;
    const auto inv = fit_power_law(table(grid, [](double e) { return 1.0 / e; }));
    REQUIRE(inv.ok);
    CHECK(inv.exponent == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(inv.coefficient == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(inv.r_squared > 0.9999);

    const auto flat = fit_power_law(GenNumber::constant(7.0), grid);
    REQUIRE(flat.ok);
    CHECK(std::abs(flat.exponent) <= 0.01);
    CHECK(flat.coefficient == doctest::Approx(7.0));

    CHECK_FALSE(fit_power_law(table(grid, [](double e) { return e - 0.01; })).ok);
    CHECK_FALSE(fit_power_law(table(grid, [](double) { return 0.0; })).ok);
}

TEST_CASE("limit extrapolation") {
    const EpsilonGrid grid;
    const auto a = limit_estimate(table(grid, [](double e) { return 3.0 + 2.0 * e; }));
    REQUIRE(a.converged);
    CHECK(std::abs(a.limit - 3.0) <= 1e-6);
    for (double p : {1.0, 2.0}) {
        const auto b = limit_estimate(table(grid, [p](double e) { return -0.4 + 1.7 * std::pow(e, p) + 0.3 * std::pow(e, p + 1); }));
        REQUIRE(b.converged);
        CHECK(std::abs(b.limit + 0.4) <= 1e-8);
        CHECK(b.leading_order == p);
    }
    const auto c = limit_estimate(table(grid, [](double e) { return std::log(1.0 / e); }));
    CHECK_FALSE(c.converged);
}

TEST_CASE("classification verdicts") {
    const EpsilonGrid grid;
    const auto inf = classify(GenNumber::power(0.7, -1.0), grid);
    CHECK(inf.verdict == Verdict::infinite_of_order);
    CHECK(inf.order == doctest::Approx(1.0));
    CHECK(inf.coefficient == doctest::Approx(0.7));

    const auto fin = classify(GenNumber::constant(-0.25) + GenNumber::power(1.0, 1.0), grid);
    CHECK(fin.verdict == Verdict::finite_limit);
    CHECK(fin.limit == doctest::Approx(-0.25).epsilon(1e-10));

    const auto dec = classify(GenNumber::power(3.0, 2.0), grid);
    CHECK(dec.verdict == Verdict::decays_with_order);
    CHECK(dec.order == doctest::Approx(2.0));

    // log growth is not a power law and has no limit
    const auto lg = classify(GenNumber::log_inverse(1.0), grid);
    CHECK(lg.verdict != Verdict::finite_limit);

    const auto osc = classify(GenNumber([](Epsilon e) { return 0.5 + 0.3 * std::sin(std::log(e.value()) * 7.0); }, "osc"), grid);
    CHECK(osc.verdict == Verdict::unclassifiable);
}

TEST_CASE("classification is scale-equivariant in the coefficient") {
    const EpsilonGrid grid;
    const auto g = GenNumber::power(0.9, -1.0) + GenNumber::constant(0.2);
    const auto base = classify(g, grid);
    for (double c : {2.0, -3.0}) {
        const auto scaled = classify(c * g, grid);
        CHECK(scaled.verdict == base.verdict);
        CHECK(scaled.order == doctest::Approx(base.order).epsilon(1e-12));
        CHECK(scaled.coefficient == doctest::Approx(c * base.coefficient).epsilon(1e-12));
    }
    const auto h = GenNumber::constant(1.5) + GenNumber::power(0.3, 1.0);
    for (double c : {2.0, -3.0}) CHECK(classify(c * h, grid).limit == doctest::Approx(c * 1.5).epsilon(1e-10));
}

TEST_CASE("classification of int D^2 is robust to the grid") {
    const auto m = parse_mollifier("cosine_power:k=4");
    const auto d = embed_delta(m);
    const auto g = integrate_gf(d * d, 1e-11);
    for (const EpsilonGrid& grid : {EpsilonGrid{0.125, 0.5, 8}, EpsilonGrid{0.125, 0.5, 12}, EpsilonGrid{0.125, 0.25, 8},
                                    EpsilonGrid{0.125, 0.25, 12}}) {
        const auto cls = classify(g, grid);
        CHECK(cls.verdict == Verdict::infinite_of_order);
        CHECK(std::abs(cls.order - 1.0) <= 0.05);
        CHECK(cls.coefficient == doctest::Approx(35.0 / 36.0).epsilon(1e-6));
    }
}

TEST_CASE("negligibility and association are separate verdicts") {
    const auto m = parse_mollifier("bump");
    const auto h = embed_heaviside(m);
    const EpsilonGrid grid;
    const auto suite = standard_test_suite(6, 1);

    const auto tiny = scale(GenNumber::power(1.0, 3.0), h);
    CHECK(is_negligible(tiny, {-1.0, 1.0}, grid).negligible);

    const auto report = is_associated(h * h, h, suite, grid);
    CHECK(report.all_pairings_vanish);
    CHECK_FALSE(report.negligible);
    CHECK(report.implication_fails());
    for (const auto& s : report.negligibility.supnorm_by_eps) CHECK(std::abs(s.value - 0.25) <= 1e-6);

    const auto same = is_associated(h * h * h, h * h * h, suite, grid);
    CHECK(same.all_pairings_vanish);
    CHECK(same.negligible);
    CHECK_FALSE(same.implication_fails());

    // H^2 is not associated with H/2
    const auto off = is_associated(h * h, 0.5 * h, suite, grid);
    CHECK_FALSE(off.all_pairings_vanish);
}

TEST_CASE("sup norm finds interior extrema") {
    const auto s = embed_smooth([](const Jet& x) { return sin(3.0 * x); }, "sin 3x");
    CHECK(sup_norm(s.at(Epsilon(0.1)), {0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-12));
}
