#include "genfn/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "genfn/kernels.hpp"

namespace genfn {

void EpsilonGrid::validate() const {
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConstructionError(fmt::format("grid ratio must lie in (0, 1), got {}", ratio));
    if (count < 4) throw ConstructionError(fmt::format("grid needs at least 4 points, got {}", count));
    if (!(eps0 > 0.0 && eps0 <= 1.0)) throw ConstructionError(fmt::format("grid eps0 must lie in (0, 1], got {}", eps0));
    const double last = eps0 * std::pow(ratio, count - 1);
    if (last < 0x1p-40) throw ConstructionError(fmt::format("grid reaches eps={} below 2^-40", last));
}

std::vector<double> EpsilonGrid::values() const {
    validate();
    std::vector<double> v(static_cast<std::size_t>(count));
    double e = eps0;
    for (auto& x : v) {
        x = e;
        e *= ratio;
    }
    return v;
}

SampleTable sample(const GenNumber& g, const EpsilonGrid& grid) {
    const auto eps = grid.values();
    const auto values = kernels::sample_values(g, eps);
    SampleTable t(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) t[i] = {eps[i], values[i]};
    return t;
}

PowerLawFit fit_power_law(const SampleTable& samples) {
    PowerLawFit fit;
    if (samples.size() < 2) {
        fit.reason = "fewer than 2 samples";
        return fit;
    }
    const double sign = samples.front().value < 0.0 ? -1.0 : 1.0;
    for (const auto& s : samples) {
        if (s.value == 0.0 || !std::isfinite(s.value)) {
            fit.reason = fmt::format("zero or non-finite sample at eps={}", s.eps);
            return fit;
        }
        if ((s.value < 0.0 ? -1.0 : 1.0) != sign) {
            fit.reason = fmt::format("sign change at eps={}", s.eps);
            return fit;
        }
    }
    const double n = static_cast<double>(samples.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& s : samples) {
        mx += std::log(s.eps);
        my += std::log(std::abs(s.value));
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& s : samples) {
        const double dx = std::log(s.eps) - mx;
        const double dy = std::log(std::abs(s.value)) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        fit.reason = "all samples at the same eps";
        return fit;
    }
    fit.ok = true;
    fit.exponent = sxy / sxx;
    fit.coefficient = sign * std::exp(my - fit.exponent * mx);
    const double ss_res = std::max(0.0, syy - fit.exponent * sxy);
    // log-values flat to ~1e-10: a constant, perfectly fitted by exponent 0
    fit.r_squared = syy <= 1e-20 * n ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

PowerLawFit fit_power_law(const GenNumber& g, const EpsilonGrid& grid) { return fit_power_law(sample(g, grid)); }

LimitEstimate limit_estimate(const SampleTable& samples) {
    LimitEstimate est;
    const std::size_t n = samples.size();
    if (n < 3) {
        est.reason = "fewer than 3 samples";
        return est;
    }
    for (const auto& s : samples)
        if (!std::isfinite(s.value)) {
            est.reason = fmt::format("non-finite sample at eps={}", s.eps);
            return est;
        }

    double scale = 0.0;
    for (const auto& s : samples) scale = std::max(scale, std::abs(s.value));
    const double last_d = samples[n - 2].value - samples[n - 1].value;
    const double prev_d = samples[n - 3].value - samples[n - 2].value;

    const double flat = std::max(1e-13 * scale, std::numeric_limits<double>::min());
    if (std::abs(last_d) <= flat && std::abs(prev_d) <= flat) {
        est.converged = true;
        est.limit = samples[n - 1].value;
        est.error_estimate = std::max(std::abs(last_d), std::abs(prev_d));
        return est;
    }
    const double diff_ratio = last_d / prev_d;
    if (!(std::abs(diff_ratio) < 1.0)) {
        est.reason = fmt::format("differences not shrinking (ratio {:.4g}); no limit on this grid", diff_ratio);
        return est;
    }
    const double r = samples[n - 1].eps / samples[n - 2].eps;
    double p = std::log(std::abs(diff_ratio)) / std::log(r);
    // all in-scope expansions have integer orders; snap when the data agrees
    if (std::abs(p - std::round(p)) < 0.05 && std::round(p) >= 1.0) p = std::round(p);
    if (p < 0.05) {
        est.reason = fmt::format("differences shrink like eps^{:.3g}; no limit on this grid", p);
        return est;
    }
    est.leading_order = p;

    const std::size_t m = std::min<std::size_t>(n, 5);
    std::vector<std::vector<double>> table(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) table[i][0] = samples[n - m + i].value;
    for (std::size_t j = 1; j < m; ++j) {
        const double rq = std::pow(r, p + static_cast<double>(j - 1));
        for (std::size_t i = j; i < m; ++i)
            table[i][j] = (table[i][j - 1] - rq * table[i - 1][j - 1]) / (1.0 - rq);
    }
    est.converged = true;
    est.limit = table[m - 1][m - 1];
    est.error_estimate = std::max(std::abs(table[m - 1][m - 1] - table[m - 1][m - 2]),
                                  std::abs(table[m - 1][m - 1] - table[m - 2][m - 2]));
    if (diff_ratio < 0.0) est.reason = "alternating differences; extrapolated with |ratio|";
    return est;
}

LimitEstimate limit_estimate(const GenNumber& g, const EpsilonGrid& grid) { return limit_estimate(sample(g, grid)); }

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::infinite_of_order: return "InfiniteOfOrder";
        case Verdict::finite_limit: return "FiniteLimit";
        case Verdict::decays_with_order: return "DecaysWithOrder";
        case Verdict::unclassifiable: return "Unclassifiable";
    }
    return "Unclassifiable";
}

AsymptoticClass classify(const SampleTable& samples, const Thresholds& thresholds) {
    AsymptoticClass c;
    c.samples = samples;
    c.fit = fit_power_law(samples);
    c.fit_quality = c.fit.r_squared;

    auto from_limit = [&](const std::string& why) {
        const auto lim = limit_estimate(samples);
        const bool settled = lim.error_estimate <= thresholds.limit_tol * std::max(1.0, std::abs(lim.limit));
        if (lim.converged && settled) {
            c.verdict = Verdict::finite_limit;
            c.limit = lim.limit;
            c.limit_error = lim.error_estimate;
            c.order = lim.leading_order;
            c.reason = why;
        } else {
            c.verdict = Verdict::unclassifiable;
            const std::string detail =
                lim.converged ? fmt::format("extrapolated limit {:.6g} unstable (error {:.3g})", lim.limit, lim.error_estimate)
                              : lim.reason;
            c.reason = why.empty() ? detail : why + "; " + detail;
        }
    };

    if (!c.fit.ok) {
        from_limit("power-law fit unavailable: " + c.fit.reason);
        return c;
    }
    if (c.fit.r_squared < thresholds.min_r_squared) {
        from_limit(fmt::format("power-law fit poor (R^2={:.6f})", c.fit.r_squared));
        return c;
    }
    const double a = c.fit.exponent;
    if (a < -thresholds.finite_exponent) {
        c.verdict = Verdict::infinite_of_order;
        c.order = -a;
        c.coefficient = c.fit.coefficient;
    } else if (a > thresholds.finite_exponent) {
        c.verdict = Verdict::decays_with_order;
        c.order = a;
        c.coefficient = c.fit.coefficient;
    } else {
        from_limit("");
        c.coefficient = c.fit.coefficient;
    }
    return c;
}

AsymptoticClass classify(const GenNumber& g, const EpsilonGrid& grid, const Thresholds& thresholds) {
    return classify(sample(g, grid), thresholds);
}

namespace {

double golden_max(const SmoothRepresentative& u, double a, double b) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = std::abs(u.value(x1));
    double f2 = std::abs(u.value(x2));
    for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = std::abs(u.value(x2));
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = std::abs(u.value(x1));
        }
    }
    return std::max(f1, f2);
}

void add_uniform(std::vector<double>& pts, double lo, double hi, int n) {
    for (int i = 0; i <= n; ++i) pts.push_back(lo + (hi - lo) * i / n);
}

}  // namespace

double sup_norm(const SmoothRepresentative& u, Interval region) {
    if (!std::isfinite(region.lo) || !std::isfinite(region.hi) || !(region.lo < region.hi))
        throw ConstructionError("sup-norm region must be a finite, nonempty interval");
    std::vector<double> pts;
    add_uniform(pts, region.lo, region.hi, 4000);
    const SupportHint hint = u.support_hint();
    if (hint.is_bounded()) {
        const double lo = std::max(region.lo, hint.interval().lo);
        const double hi = std::min(region.hi, hint.interval().hi);
        if (lo < hi) {
            add_uniform(pts, lo, hi, 2000);
            const double w = hi - lo;
            for (int k = 1; k <= 40; ++k) {
                const double h = w * std::ldexp(1.0, -k);
                pts.push_back(lo + h);
                pts.push_back(hi - h);
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::size_t best = 0;
    double best_val = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = std::abs(u.value(pts[i]));
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = pts[best > 0 ? best - 1 : best];
    const double b = pts[best + 1 < pts.size() ? best + 1 : best];
    if (a < b) best_val = std::max(best_val, golden_max(u, a, b));
    return best_val;
}

NegligibilityReport is_negligible(const GenFunction& u, Interval region, const EpsilonGrid& grid,
                                  const Thresholds& thresholds) {
    const auto eps = grid.values();
    const auto sups = kernels::map_cells(eps.size(), [&](std::size_t i) { return sup_norm(u.at(Epsilon(eps[i])), region); });
    NegligibilityReport r;
    for (std::size_t i = 0; i < eps.size(); ++i) r.supnorm_by_eps.push_back({eps[i], sups[i]});
    if (std::all_of(sups.begin(), sups.end(), [](double s) { return s == 0.0; })) {
        r.negligible = true;
        r.decay.reason = "identically zero on every sample";
        return r;
    }
    r.decay = fit_power_law(r.supnorm_by_eps);
    r.negligible = r.decay.ok && r.decay.r_squared >= thresholds.min_r_squared &&
                   r.decay.exponent >= thresholds.negligible_order;
    return r;
}

AssociationReport is_associated(const GenFunction& u, const GenFunction& v, const std::vector<TestFunction>& suite,
                                const EpsilonGrid& grid, const Thresholds& thresholds, double quad_tol) {
    if (suite.empty()) throw ConstructionError("association needs a nonempty test suite");
    const GenFunction diff = u - v;
    const auto eps = grid.values();
    const std::size_t ne = eps.size();
    const auto values = kernels::map_cells(suite.size() * ne, [&](std::size_t cell) {
        return pair_detailed(diff, suite[cell / ne], Epsilon(eps[cell % ne]), quad_tol);
    });

    AssociationReport report;
    report.all_pairings_vanish = true;
    Interval hull = suite.front().support;
    for (std::size_t k = 0; k < suite.size(); ++k) {
        PairingLimit p;
        p.psi_id = suite[k].id;
        p.psi_at_zero = suite[k].value_at_zero;
        for (std::size_t i = 0; i < ne; ++i) {
            p.samples.push_back({eps[i], values[k * ne + i].value});
            p.errors.push_back(values[k * ne + i].error_estimate);
        }
        p.limit = limit_estimate(p.samples);
        p.decay = fit_power_law(p.samples);
        p.vanishes = p.limit.converged && std::abs(p.limit.limit) <= thresholds.association_tol;
        if (!p.vanishes) {
            report.all_pairings_vanish = false;
            if (report.reason.empty())
                report.reason = p.limit.converged
                                    ? fmt::format("psi{}: limit {} is not within {} of 0", p.psi_id, p.limit.limit,
                                                  thresholds.association_tol)
                                    : fmt::format("psi{}: {}", p.psi_id, p.limit.reason);
        }
        hull.lo = std::min(hull.lo, suite[k].support.lo);
        hull.hi = std::max(hull.hi, suite[k].support.hi);
        report.pairings.push_back(std::move(p));
    }
    report.negligibility = is_negligible(diff, hull, grid, thresholds);
    report.negligible = report.negligibility.negligible;
    return report;
}

}  // namespace genfn
