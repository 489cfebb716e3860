#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace genfn {

/// Truncated Taylor expansion f(x0 + h) = sum_k c[k] h^k, k = 0..order.
///
/// Every representative in the library is evaluated as a jet, so derivatives
/// of any order up to kMaxOrder are exact consequences of the arithmetic
/// (Leibniz, chain rule) rather than finite differences.
class Jet {
public:
    static constexpr int kMaxOrder = 8;

    Jet() = default;

    static Jet constant(double value, int order) {
        Jet j(order);
        j.c_[0] = value;
        return j;
    }

    /// The independent variable expanded at x.
    static Jet variable(double x, int order) {
        Jet j(order);
        j.c_[0] = x;
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    static Jet zero(int order) { return Jet(order); }

    int order() const { return order_; }
    double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

    double value() const { return c_[0]; }

    /// k-th derivative, k! * c[k].
    double derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return f * c_[static_cast<std::size_t>(k)];
    }

    /// Jet of f' from the jet of f; loses one order.
    Jet differentiated() const {
        Jet d(order_ > 0 ? order_ - 1 : 0);
        for (int k = 0; k + 1 <= order_; ++k) d.c_[k] = (k + 1) * c_[k + 1];
        return d;
    }

    /// Jet of F with F' = f and F(x0) = value_at_point; gains one order up to `order`.
    Jet integrated(double value_at_point, int order) const {
        Jet p(order);
        p.c_[0] = value_at_point;
        for (int k = 1; k <= order; ++k) p.c_[k] = c_[k - 1] / k;
        return p;
    }

    /// Jet of g(x) = f(x / eps) expressed in x, given the jet of f at x / eps.
    Jet rescaled(double inv_eps) const {
        Jet r = *this;
        double s = 1.0;
        for (int k = 1; k <= order_; ++k) {
            s *= inv_eps;
            r.c_[k] *= s;
        }
        return r;
    }

    bool all_finite() const {
        for (int k = 0; k <= order_; ++k)
            if (!std::isfinite(c_[k])) return false;
        return true;
    }

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator-(Jet a) { return a *= -1.0; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

    friend Jet operator+(Jet a, double s) { a.c_[0] += s; return a; }
    friend Jet operator+(double s, Jet a) { a.c_[0] += s; return a; }
    friend Jet operator-(Jet a, double s) { a.c_[0] -= s; return a; }
    friend Jet operator-(double s, const Jet& a) { return -a + s; }

private:
    explicit Jet(int order) : order_(order) { c_.fill(0.0); }

    int order_ = 0;
    std::array<double, kMaxOrder + 1> c_{};
};

Jet exp(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet pow(const Jet& a, int n);

/// p(a) for p given by ascending coefficients.
Jet polyval(std::span<const double> coeffs, const Jet& a);

}  // namespace genfn
