#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "genfn/asymptotics.hpp"
#include "genfn/embedding.hpp"
#include "genfn/kernels.hpp"
#include "genfn/quadrature.hpp"

using namespace genfn;

TEST_CASE("parallel cells match the serial reference bit for bit") {
    const auto m = parse_mollifier("bump");
    const auto h = embed_heaviside(m);
    const auto u = h * h - h;
    const auto suite = standard_test_suite(8, 1);
    const auto eps = EpsilonGrid{}.values();
    auto cell = [&](std::size_t c) { return pair(u, suite[c / eps.size()], Epsilon(eps[c % eps.size()])); };
    const auto par = kernels::map_cells(suite.size() * eps.size(), cell);
    const auto ser = kernels::serial::map_cells(suite.size() * eps.size(), cell);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK(par[i] == ser[i]);

    const auto g = integrate_gf(embed_delta(m) * embed_delta(m));
    const auto a = kernels::sample_values(g, eps);
    const auto b = kernels::serial::sample_values(g, eps);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("the lowest failing cell's exception surfaces") {
    try {
        kernels::map_cells(64, [](std::size_t i) -> int {
            if (i == 17 || i == 40) throw std::runtime_error("cell " + std::to_string(i));
            return static_cast<int>(i);
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "cell 17");
    }
}

TEST_CASE("results come back in cell order") {
    const auto out = kernels::map_cells(1000, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
    CHECK(kernels::max_threads() >= 1);
}
