#include "genfn/jet.hpp"

#include <algorithm>

namespace genfn {

Jet& Jet::operator+=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] += o.c_[k];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    order_ = std::min(order_, o.order_);
    for (int k = 0; k <= order_; ++k) c_[k] -= o.c_[k];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (int k = 0; k <= order_; ++k) c_[k] *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    Jet r(std::min(a.order_, b.order_));
    for (int k = 0; k <= r.order_; ++k) {
        double s = 0.0;
        for (int i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
        r.c_[k] = s;
    }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    Jet q(std::min(a.order_, b.order_));
    for (int k = 0; k <= q.order_; ++k) {
        double s = a.c_[k];
        for (int i = 1; i <= k; ++i) s -= b.c_[i] * q.c_[k - i];
        q.c_[k] = s / b.c_[0];
    }
    return q;
}

Jet exp(const Jet& a) {
    Jet e = Jet::zero(a.order());
    e[0] = std::exp(a[0]);
    for (int k = 1; k <= a.order(); ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * a[j] * e[k - j];
        e[k] = s / k;
    }
    return e;
}

namespace {

void sin_cos(const Jet& a, Jet& s, Jet& c) {
    s = Jet::zero(a.order());
    c = Jet::zero(a.order());
    s[0] = std::sin(a[0]);
    c[0] = std::cos(a[0]);
    for (int k = 1; k <= a.order(); ++k) {
        double ss = 0.0;
        double cc = 0.0;
        for (int j = 1; j <= k; ++j) {
            ss += j * a[j] * c[k - j];
            cc += j * a[j] * s[k - j];
        }
        s[k] = ss / k;
        c[k] = -cc / k;
    }
}

}  // namespace

Jet sin(const Jet& a) {
    Jet s, c;
    sin_cos(a, s, c);
    return s;
}

Jet cos(const Jet& a) {
    Jet s, c;
    sin_cos(a, s, c);
    return c;
}

Jet pow(const Jet& a, int n) {
    Jet r = Jet::constant(1.0, a.order());
    Jet base = a;
    while (n > 0) {
        if (n & 1) r = r * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return r;
}

Jet polyval(std::span<const double> coeffs, const Jet& a) {
    Jet r = Jet::zero(a.order());
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * a + *it;
    return r;
}

}  // namespace genfn
