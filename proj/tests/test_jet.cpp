#include <doctest.h>

#include <cmath>
#include <vector>

#include "genfn/jet.hpp"

using genfn::Jet;

TEST_CASE("variable jet differentiates like x") {
    const auto x = Jet::variable(0.7, 4);
    CHECK(x.value() == 0.7);
    CHECK(x.derivative(1) == 1.0);
    CHECK(x.derivative(2) == 0.0);
}

TEST_CASE("product and power agree") {
    const auto x = Jet::variable(-0.3, 6);
    const auto u = x * x + 2.0 * x - 1.0;
    const auto cube = u * u * u;
    const auto p = pow(u, 3);
    for (int k = 0; k <= 6; ++k) CHECK(cube[k] == doctest::Approx(p[k]).epsilon(1e-14));
}

TEST_CASE("exp(sin x) derivatives match closed forms") {
    const double x0 = 0.4;
    const auto f = exp(sin(Jet::variable(x0, 3)));
    const double s = std::sin(x0), c = std::cos(x0), e = std::exp(s);
    CHECK(f.derivative(0) == doctest::Approx(e).epsilon(1e-15));
    CHECK(f.derivative(1) == doctest::Approx(e * c).epsilon(1e-15));
    CHECK(f.derivative(2) == doctest::Approx(e * (c * c - s)).epsilon(1e-14));
    CHECK(f.derivative(3) == doctest::Approx(e * (c * c * c - 3 * s * c - c)).epsilon(1e-14));
}

TEST_CASE("division inverts multiplication") {
    const auto x = Jet::variable(1.3, 8);
    const auto a = exp(x) + 1.0;
    const auto b = cos(x) + 2.0;
    const auto back = (a / b) * b;
    for (int k = 0; k <= 8; ++k) CHECK(back[k] == doctest::Approx(a[k]).epsilon(1e-13));
}

TEST_CASE("integrated then differentiated is the identity") {
    const auto f = sin(Jet::variable(0.2, 5));
    const auto F = f.integrated(3.0, 6);
    CHECK(F.value() == 3.0);
    const auto back = F.differentiated();
    for (int k = 0; k <= 5; ++k) CHECK(back[k] == doctest::Approx(f[k]).epsilon(1e-15));
}

TEST_CASE("rescaled applies the chain rule for x / eps") {
    const double eps = 0.01, x = 0.003;
    const auto inner = sin(Jet::variable(x / eps, 3));
    const auto g = inner.rescaled(1.0 / eps);
    CHECK(g.derivative(1) == doctest::Approx(std::cos(x / eps) / eps).epsilon(1e-14));
    CHECK(g.derivative(2) == doctest::Approx(-std::sin(x / eps) / (eps * eps)).epsilon(1e-14));
}

TEST_CASE("polyval is Horner on jets") {
    const std::vector<double> c{1.0, -2.0, 0.5};
    const auto x = Jet::variable(2.0, 2);
    const auto p = genfn::polyval(c, x);
    CHECK(p.value() == doctest::Approx(1.0 - 4.0 + 2.0));
    CHECK(p.derivative(1) == doctest::Approx(-2.0 + 2.0));
    CHECK(p.derivative(2) == doctest::Approx(1.0));
}
