#include "genfn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

#include <fmt/format.h>

namespace genfn {

namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool splittable;
};

struct LargerError {
    bool operator()(const Segment& x, const Segment& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;
    }
};

double checked(const RealFunction& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v))
        throw QuadratureError(fmt::format("integrand is not finite at x={}", x), {});
    return v;
}

Segment gauss_kronrod(const RealFunction& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = checked(f, center);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    double abs_sum = std::abs(kronrod);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = checked(f, center - dx);
        const double f2 = checked(f, center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        abs_sum += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    Segment s{a, b, kronrod * half, std::abs((kronrod - gauss) * half), true};
    const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::abs(half);
    const double mid = 0.5 * (a + b);
    if (s.error <= roundoff || mid <= a || mid >= b) s.splittable = false;
    return s;
}

}  // namespace

QuadratureResult integrate(const RealFunction& f, double a, double b, const QuadratureOptions& opts) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw QuadratureError(fmt::format("invalid integration range [{}, {}]", a, b), {});
    if (!(opts.abs_tol > 0.0)) throw QuadratureError("tolerance must be positive", {});

    std::priority_queue<Segment, std::vector<Segment>, LargerError> open;
    std::vector<Segment> closed;
    double value = 0.0;
    double error = 0.0;
    std::size_t count = 1;

    auto push = [&](const Segment& s) {
        value += s.value;
        error += s.error;
        if (s.splittable)
            open.push(s);
        else
            closed.push_back(s);
    };
    push(gauss_kronrod(f, a, b));

    auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(value)); };
    auto summarize = [&] {
        std::vector<Segment> all = closed;
        auto copy = open;
        while (!copy.empty()) {
            all.push_back(copy.top());
            copy.pop();
        }
        std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
        QuadratureResult r{0.0, 0.0, count};
        for (const auto& s : all) {
            r.value += s.value;
            r.error_estimate += s.error;
        }
        return r;
    };

    while (error > target()) {
        if (open.empty()) {
            auto best = summarize();
            throw QuadratureError(
                fmt::format("roundoff limit reached on [{}, {}]: error {} > tol {}", a, b, best.error_estimate, target()),
                best);
        }
        if (count >= opts.max_intervals) {
            auto best = summarize();
            throw QuadratureError(
                fmt::format("subdivision budget of {} intervals exhausted on [{}, {}]: error {}", opts.max_intervals, a,
                            b, best.error_estimate),
                best);
        }
        const Segment worst = open.top();
        open.pop();
        value -= worst.value;
        error -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        push(gauss_kronrod(f, worst.a, mid));
        push(gauss_kronrod(f, mid, worst.b));
        ++count;
    }
    auto r = summarize();
    // running sums drift; the re-summed estimate is authoritative
    if (r.error_estimate > target() && open.empty())
        throw QuadratureError(fmt::format("roundoff limit reached on [{}, {}]", a, b), r);
    return r;
}

QuadratureResult integrate(const RealFunction& f, double a, double b, double tol) {
    QuadratureOptions opts;
    opts.abs_tol = tol;
    return integrate(f, a, b, opts);
}

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double pi = std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

double integrate_fixed(const RealFunction& f, double a, double b, const GaussRule& rule) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(c + h * rule.nodes[i]);
    return s * h;
}

QuadratureResult integrate_at(const GenFunction& u, Interval domain, Epsilon eps, const QuadratureOptions& opts) {
    if (!(domain.lo < domain.hi)) throw QuadratureError("empty integration domain", {});
    const SmoothRepresentative rep = u.at(eps);
    const SupportHint hint = rep.support_hint();
    const RealFunction f = [&rep](double x) { return rep.value(x); };

    const bool infinite = !std::isfinite(domain.lo) || !std::isfinite(domain.hi);
    if (hint.kind() == SupportHint::Kind::unbounded) {
        if (infinite)
            throw QuadratureError(fmt::format("'{}' has no bounded support; cannot integrate over an infinite range",
                                              u.description()),
                                  {});
        return integrate(f, domain.lo, domain.hi, opts);
    }

    auto tail = [&](double constant, double length) {
        if (constant == 0.0) return 0.0;
        if (!std::isfinite(length))
            throw QuadratureError(fmt::format("'{}' has a nonzero constant tail ({}) on an infinite range",
                                              u.description(), constant),
                                  {});
        return constant * length;
    };

    if (hint.kind() == SupportHint::Kind::constant) {
        const double c = rep.value(0.0);
        return {tail(c, domain.length()), 0.0, 0};
    }

    const Interval active = hint.interval();
    const double lo = std::max(domain.lo, active.lo);
    const double hi = std::min(domain.hi, active.hi);
    QuadratureResult r{0.0, 0.0, 0};
    if (domain.lo < active.lo) r.value += tail(rep.value(active.lo), std::min(domain.hi, active.lo) - domain.lo);
    if (domain.hi > active.hi) r.value += tail(rep.value(active.hi), domain.hi - std::max(domain.lo, active.hi));
    if (lo < hi) {
        const auto inner = integrate(f, lo, hi, opts);
        r.value += inner.value;
        r.error_estimate = inner.error_estimate;
        r.subdivisions = inner.subdivisions;
    }
    return r;
}

GenNumber integrate_gf(const GenFunction& u, double a, double b, double tol) {
    QuadratureOptions opts;
    opts.abs_tol = tol;
    opts.rel_tol = tol;
    const Interval domain{a, b};
    return GenNumber([u, domain, opts](Epsilon eps) { return integrate_at(u, domain, eps, opts).value; },
                     fmt::format("int[{}, {}] {}", a, b, u.description()));
}

QuadratureResult pair_detailed(const GenFunction& u, const TestFunction& psi, Epsilon eps, double tol) {
    const SmoothRepresentative rep = u.at(eps);
    const SupportHint hint = rep.support_hint();
    const Interval s = psi.support;

    std::vector<double> cuts{s.lo};
    if (hint.is_bounded()) {
        for (double c : {hint.interval().lo, hint.interval().hi})
            if (c > cuts.back() && c < s.hi) cuts.push_back(c);
    }
    cuts.push_back(s.hi);

    const RealFunction f = [&](double x) { return rep.value(x) * psi(x); };
    QuadratureOptions opts;
    opts.abs_tol = tol / static_cast<double>(cuts.size() - 1);
    QuadratureResult r{0.0, 0.0, 0};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto piece = integrate(f, cuts[i], cuts[i + 1], opts);
        r.value += piece.value;
        r.error_estimate += piece.error_estimate;
        r.subdivisions += piece.subdivisions;
    }
    return r;
}

double pair(const GenFunction& u, const TestFunction& psi, Epsilon eps, double tol) {
    return pair_detailed(u, psi, eps, tol).value;
}

GenNumber pairing(const GenFunction& u, const TestFunction& psi, double tol) {
    return GenNumber([u, psi, tol](Epsilon eps) { return pair(u, psi, eps, tol); },
                     fmt::format("<{}, psi{}>", u.description(), psi.id));
}

}  // namespace genfn
