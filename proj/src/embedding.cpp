#include "genfn/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "genfn/quadrature.hpp"

namespace genfn {

namespace {

constexpr int kPanels = 64;
constexpr int kDegree = 24;
constexpr int kPanelGauss = 20;

/// Unnormalized profile as a jet in y; zero outside the open support.
Jet raw_profile(MollifierKind kind, const MollifierParams& p, double y, int order) {
    const double t = y / p.radius;
    if (!(std::abs(t) < 1.0)) return Jet::zero(order);
    const Jet yj = Jet::variable(y, order);
    const Jet tj = yj * (1.0 / p.radius);
    Jet base;
    switch (kind) {
        case MollifierKind::bump: {
            const Jet u = 1.0 - tj * tj;
            // exp(-1/u) underflows long before u reaches 0
            if (1.0 / u.value() > 745.0) return Jet::zero(order);
            base = exp(-(Jet::constant(1.0, order) / u));
            break;
        }
        case MollifierKind::cosine_power: {
            const double half_pi = 0.5 * std::acos(-1.0);
            base = pow(cos(tj * half_pi), p.exponent);
            break;
        }
        case MollifierKind::truncated_gaussian: {
            base = exp(-(yj * yj) * (0.5 / (p.sigma * p.sigma)));
            break;
        }
    }
    if (p.skew != 0.0) base = base * (1.0 + p.skew * tj);
    return base;
}

double raw_value(MollifierKind kind, const MollifierParams& p, double y) { return raw_profile(kind, p, y, 0).value(); }

/// Chebyshev series on one panel, evaluated with Clenshaw.
struct Panel {
    double a;
    double b;
    std::vector<double> coeffs;

    double operator()(double y) const {
        const double t = (2.0 * y - a - b) / (b - a);
        double b1 = 0.0;
        double b2 = 0.0;
        for (std::size_t k = coeffs.size() - 1; k >= 1; --k) {
            const double b0 = 2.0 * t * b1 - b2 + coeffs[k];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + coeffs[0];
    }
};

}  // namespace

struct Mollifier::Impl {
    MollifierKind kind;
    MollifierParams params;
    bool symmetric;
    /// integral of rho from `anchor` to y, normalized, one panel per slice of [anchor, R]
    double anchor;
    double anchor_value;
    std::vector<Panel> panels;
    double normalization;

    double raw(double y) const { return raw_value(kind, params, y); }

    double primitive(double y) const {
        const double r = params.radius;
        if (y <= -r) return 0.0;
        if (y >= r) return 1.0;
        if (symmetric) {
            if (y == 0.0) return 0.5;
            const double q = integral_from_anchor(std::abs(y));
            return y > 0.0 ? 0.5 + q : 0.5 - q;
        }
        return integral_from_anchor(y);
    }

    double integral_from_anchor(double y) const {
        const double width = (params.radius - anchor) / kPanels;
        auto i = static_cast<int>((y - anchor) / width);
        i = std::clamp(i, 0, kPanels - 1);
        return panels[static_cast<std::size_t>(i)](y);
    }
};

namespace {

void validate(MollifierKind kind, const MollifierParams& p) {
    if (!(p.radius > 0.0) || !std::isfinite(p.radius))
        throw ConstructionError(fmt::format("mollifier radius must be positive, got {}", p.radius));
    if (!(std::abs(p.skew) < 1.0))
        throw ConstructionError(fmt::format("mollifier skew must lie in (-1, 1), got {}", p.skew));
    if (kind == MollifierKind::cosine_power && p.exponent < 2)
        throw ConstructionError(fmt::format("cosine_power exponent must be >= 2, got {}", p.exponent));
    if (kind == MollifierKind::truncated_gaussian && (!(p.sigma > 0.0) || !std::isfinite(p.sigma)))
        throw ConstructionError(fmt::format("truncated_gaussian sigma must be positive, got {}", p.sigma));
}

}  // namespace

Mollifier make_mollifier(MollifierKind kind, const MollifierParams& params) {
    validate(kind, params);
    auto impl = std::make_shared<Mollifier::Impl>();
    impl->kind = kind;
    impl->params = params;
    impl->symmetric = params.skew == 0.0;
    impl->anchor = impl->symmetric ? 0.0 : -params.radius;
    impl->anchor_value = impl->symmetric ? 0.5 : 0.0;

    const GaussRule& gauss = gauss_legendre(kPanelGauss);
    const RealFunction raw = [&](double y) { return impl->raw(y); };
    const double pi = std::acos(-1.0);
    const double width = (params.radius - impl->anchor) / kPanels;

    // Unnormalized cumulative integral on each panel, sampled at Chebyshev points.
    std::vector<std::vector<double>> samples;
    double start = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        const double a = impl->anchor + i * width;
        const double b = (i + 1 == kPanels) ? params.radius : a + width;
        std::vector<double> f(kDegree + 1);
        for (int j = 0; j <= kDegree; ++j) {
            const double t = std::cos(pi * (j + 0.5) / (kDegree + 1));
            const double y = 0.5 * (a + b) + 0.5 * (b - a) * t;
            f[static_cast<std::size_t>(j)] = start + integrate_fixed(raw, a, y, gauss);
        }
        samples.push_back(std::move(f));
        impl->panels.push_back(Panel{a, b, {}});
        start += integrate_fixed(raw, a, b, gauss);
    }
    const double total = impl->symmetric ? 2.0 * start : start;
    if (!(total > 0.0) || !std::isfinite(total))
        throw ConstructionError(fmt::format("mollifier profile is not normalizable (mass {})", total));
    impl->normalization = 1.0 / total;

    for (int i = 0; i < kPanels; ++i) {
        auto& f = samples[static_cast<std::size_t>(i)];
        for (double& v : f) v *= impl->normalization;
        std::vector<double> c(kDegree + 1);
        for (int k = 0; k <= kDegree; ++k) {
            double s = 0.0;
            for (int j = 0; j <= kDegree; ++j)
                s += f[static_cast<std::size_t>(j)] * std::cos(pi * k * (j + 0.5) / (kDegree + 1));
            c[static_cast<std::size_t>(k)] = 2.0 * s / (kDegree + 1);
        }
        c[0] *= 0.5;
        if (!impl->symmetric) c[0] += impl->anchor_value;
        impl->panels[static_cast<std::size_t>(i)].coeffs = std::move(c);
    }

    return Mollifier(std::move(impl));
}

MollifierKind Mollifier::kind() const { return impl_->kind; }
const MollifierParams& Mollifier::params() const { return impl_->params; }
double Mollifier::support_radius() const { return impl_->params.radius; }
bool Mollifier::is_symmetric() const { return impl_->symmetric; }
double Mollifier::normalization() const { return impl_->normalization; }

std::string Mollifier::name() const {
    const auto& p = impl_->params;
    std::vector<std::string> parts;
    if (p.radius != 1.0) parts.push_back(fmt::format("R={}", p.radius));
    if (impl_->kind == MollifierKind::cosine_power) parts.push_back(fmt::format("k={}", p.exponent));
    if (impl_->kind == MollifierKind::truncated_gaussian) parts.push_back(fmt::format("sigma={}", p.sigma));
    if (p.skew != 0.0) parts.push_back(fmt::format("skew={}", p.skew));
    std::string s = to_string(impl_->kind);
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i == 0 ? ":" : ",") + parts[i];
    return s;
}

double Mollifier::operator()(double y) const { return impl_->raw(y) * impl_->normalization; }

Jet Mollifier::jet(double y, int order) const {
    return raw_profile(impl_->kind, impl_->params, y, order) * impl_->normalization;
}

double Mollifier::primitive(double y) const { return impl_->primitive(y); }

Jet Mollifier::primitive_jet(double y, int order) const {
    const double p = impl_->primitive(y);
    if (order == 0) return Jet::constant(p, 0);
    return jet(y, order - 1).integrated(p, order);
}

std::string to_string(MollifierKind kind) {
    switch (kind) {
        case MollifierKind::bump: return "bump";
        case MollifierKind::cosine_power: return "cosine_power";
        case MollifierKind::truncated_gaussian: return "truncated_gaussian";
    }
    return "unknown";
}

Mollifier parse_mollifier(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind_name = text.substr(0, colon);
    MollifierKind kind;
    if (kind_name == "bump")
        kind = MollifierKind::bump;
    else if (kind_name == "cosine_power")
        kind = MollifierKind::cosine_power;
    else if (kind_name == "truncated_gaussian")
        kind = MollifierKind::truncated_gaussian;
    else
        throw ConstructionError(fmt::format("unknown mollifier kind '{}'", kind_name));

    MollifierParams params;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ConstructionError(fmt::format("malformed mollifier parameter '{}'", item));
            const std::string key = item.substr(0, eq);
            const std::string val = item.substr(eq + 1);
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(val, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != val.size() || val.empty())
                throw ConstructionError(fmt::format("mollifier parameter '{}' is not a number", item));
            if (key == "R")
                params.radius = v;
            else if (key == "k" && kind == MollifierKind::cosine_power) {
                if (v != std::floor(v)) throw ConstructionError("cosine_power exponent must be an integer");
                params.exponent = static_cast<int>(v);
            } else if (key == "sigma" && kind == MollifierKind::truncated_gaussian)
                params.sigma = v;
            else if (key == "skew")
                params.skew = v;
            else
                throw ConstructionError(fmt::format("unknown parameter '{}' for mollifier {}", key, kind_name));
        }
    }
    return make_mollifier(kind, params);
}

namespace {

using detail::Node;

class DeltaNode final : public Node {
public:
    explicit DeltaNode(Mollifier m) : Node("D"), m_(std::move(m)) {}
    Jet eval(double eps, double x, int order) const override {
        const double inv = 1.0 / eps;
        return m_.jet(x * inv, order).rescaled(inv) * inv;
    }
    SupportHint support(double eps) const override {
        const double r = m_.support_radius();
        return SupportHint::bounded(-eps * r, eps * r);
    }

private:
    Mollifier m_;
};

class HeavisideNode final : public Node {
public:
    explicit HeavisideNode(Mollifier m) : Node("H"), m_(std::move(m)) {}
    Jet eval(double eps, double x, int order) const override {
        const double inv = 1.0 / eps;
        return m_.primitive_jet(x * inv, order).rescaled(inv);
    }
    SupportHint support(double eps) const override {
        const double r = m_.support_radius();
        return SupportHint::bounded(-eps * r, eps * r);
    }

private:
    Mollifier m_;
};

class SmoothNode final : public Node {
public:
    SmoothNode(JetFunction f, std::string description) : Node(std::move(description)), f_(std::move(f)) {}
    Jet eval(double, double x, int order) const override { return f_(Jet::variable(x, order)); }
    SupportHint support(double) const override { return SupportHint::unbounded(); }

private:
    JetFunction f_;
};

double bump(double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; }

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace

GenFunction embed_delta(const Mollifier& m) { return GenFunction(std::make_shared<DeltaNode>(m)); }

GenFunction embed_heaviside(const Mollifier& m) { return GenFunction(std::make_shared<HeavisideNode>(m)); }

GenFunction embed_smooth(JetFunction f, std::string description) {
    return GenFunction(std::make_shared<SmoothNode>(std::move(f), std::move(description)));
}

GenFunction embed_constant(double c) { return constant_function(c); }

GenFunction embed_polynomial(std::vector<double> coeffs) {
    std::string desc = "poly[";
    for (std::size_t i = 0; i < coeffs.size(); ++i) desc += fmt::format("{}{}", i ? "," : "", coeffs[i]);
    desc += "](x)";
    return embed_smooth([coeffs](const Jet& x) { return polyval(coeffs, x); }, desc);
}

std::vector<TestFunction> standard_test_suite(int count, std::uint64_t seed) {
    if (count < 1) throw ConstructionError("test suite needs at least one function");
    std::mt19937_64 rng(seed);
    std::vector<TestFunction> suite;
    suite.reserve(static_cast<std::size_t>(count));
    for (int id = 0; id < count; ++id) {
        const double width = uniform(rng, 0.8, 1.6);
        const double center = id < 2 ? 0.0 : uniform(rng, -0.4, 0.4);
        double a0 = 1.0;
        double a1 = uniform(rng, -0.5, 0.5);
        double a2 = uniform(rng, -0.5, 0.5);
        std::string kind;
        if (id == 0) {
            a1 = 0.0;
            a2 = 0.0;
            kind = "bump";
        } else if (id == 1) {
            // x (x + 0.3): vanishes at 0 with psi''(0) != 0
            a0 = 0.0;
            a1 = 0.3;
            a2 = 1.0;
            kind = "zero-at-origin";
        } else {
            kind = "bump*quadratic";
        }

        TestFunction psi;
        psi.id = id;
        psi.support = {center - width, center + width};
        psi.eval = [=](double x) { return bump((x - center) / width) * (a0 + a1 * x + a2 * x * x); };
        psi.value_at_zero = psi(0.0);
        psi.description = fmt::format("psi{} {}: bump((x-{:.6g})/{:.6g})*({:.6g}+{:.6g}x+{:.6g}x^2)", id, kind, center,
                                      width, a0, a1, a2);
        suite.push_back(std::move(psi));
    }
    return suite;
}

}  // namespace genfn
