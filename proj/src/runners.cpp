#include "genfn/runners.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "genfn/kernels.hpp"

namespace genfn {

using nlohmann::json;

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    return fmt::format("{:.17g}", v);
}

json to_json(const AsymptoticClass& c) {
    json j;
    j["verdict"] = to_string(c.verdict);
    j["order"] = c.order;
    j["coefficient"] = c.coefficient;
    j["limit"] = c.limit;
    j["limit_error"] = c.limit_error;
    j["fit_exponent"] = c.fit.exponent;
    j["fit_quality"] = c.fit_quality;
    j["reason"] = c.reason;
    json samples = json::array();
    for (const auto& s : c.samples) samples.push_back({{"epsilon", s.eps}, {"value", s.value}});
    j["samples"] = samples;
    return j;
}

json to_json(const AssociationReport& r) {
    json j;
    j["all_pairings_vanish"] = r.all_pairings_vanish;
    j["negligible"] = r.negligible;
    j["implication_fails"] = r.implication_fails();
    j["reason"] = r.reason;
    json pairings = json::array();
    for (const auto& p : r.pairings) {
        pairings.push_back({{"psi_id", p.psi_id},
                            {"psi_at_zero", p.psi_at_zero},
                            {"limit", p.limit.limit},
                            {"limit_error", p.limit.error_estimate},
                            {"limit_converged", p.limit.converged},
                            {"leading_order", p.limit.leading_order},
                            {"decay_order", p.decay.ok ? json(p.decay.exponent) : json(nullptr)},
                            {"fit_quality", p.decay.r_squared},
                            {"vanishes", p.vanishes}});
    }
    j["pairings"] = pairings;
    json sup = json::array();
    for (const auto& s : r.negligibility.supnorm_by_eps) sup.push_back({{"epsilon", s.eps}, {"supnorm", s.value}});
    j["supnorm_by_eps"] = sup;
    j["supnorm_decay_order"] = r.negligibility.decay.ok ? json(r.negligibility.decay.exponent) : json(nullptr);
    return j;
}

json to_json(const std::vector<Gate>& gates) {
    json j = json::array();
    for (const auto& g : gates) j.push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
    return j;
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write '{}'", path.string()));
    f << content;
    if (!f) throw Error(fmt::format("failed writing '{}'", path.string()));
}

namespace {

struct CsvWriter {
    std::string text;

    explicit CsvWriter(const std::string& header) : text(header + "\n") {}

    template <class... Fields>
    void row(const Fields&... fields) {
        std::string line;
        ((line += cell(fields) + ","), ...);
        line.back() = '\n';
        text += line;
    }

    static std::string cell(double v) { return format_real(v); }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(const std::string& v) { return v; }
    static std::string cell(const char* v) { return v; }
};

void finish(std::vector<Gate>& gates, json& summary, bool& passed) {
    passed = std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.passed; });
    summary["gates"] = to_json(gates);
    json failures = json::array();
    for (const auto& g : gates)
        if (!g.passed) failures.push_back({{"name", g.name}, {"detail", g.detail}});
    summary["failures"] = failures;
    summary["passed"] = passed;
}

GenFunction power_of(const GenFunction& u, int n) {
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c.back() = 1.0;
    return compose_polynomial(std::move(c), u);
}

}  // namespace

ReproduceOutput run_reproduce(const RunConfig& config) {
    config.validate();
    std::vector<Mollifier> mollifiers;
    for (const auto& m : config.mollifiers) mollifiers.push_back(parse_mollifier(m));
    const auto eps = config.grid.values();
    const auto suite = standard_test_suite(config.suite_count, config.seed);
    const std::size_t nm = mollifiers.size();
    const std::size_t ne = eps.size();
    const Interval line{-kInf, kInf};

    QuadratureOptions identity;
    identity.abs_tol = config.identity_tol;
    QuadratureOptions sweep;
    sweep.abs_tol = config.sweep_tol;
    sweep.rel_tol = config.sweep_tol;

    std::vector<GenFunction> heaviside;
    std::vector<GenFunction> delta;
    for (const auto& m : mollifiers) {
        heaviside.push_back(embed_heaviside(m));
        delta.push_back(embed_delta(m));
    }

    // (H^2 - H) H'
    const auto eq2 = kernels::map_cells(nm * ne, [&](std::size_t c) {
        const auto& h = heaviside[c / ne];
        return integrate_at((h * h - h) * derivative(h), line, Epsilon(eps[c % ne]), identity);
    });

    constexpr int kMaxPower = 6;
    const auto powers = kernels::map_cells(nm * kMaxPower * ne, [&](std::size_t c) {
        const std::size_t mi = c / (kMaxPower * ne);
        const int n = static_cast<int>((c / ne) % kMaxPower) + 1;
        const auto& h = heaviside[mi];
        return integrate_at(power_of(h, n) * derivative(h), line, Epsilon(eps[c % ne]), identity);
    });

    const auto delta_sq = kernels::map_cells(nm * ne, [&](std::size_t c) {
        const auto& d = delta[c / ne];
        return integrate_at(d * d, line, Epsilon(eps[c % ne]), sweep);
    });

    const auto h2h_integral = kernels::map_cells(nm * ne, [&](std::size_t c) {
        const auto& h = heaviside[c / ne];
        return integrate_at(h * h - h, {-1.0, 1.0}, Epsilon(eps[c % ne]), sweep);
    });

    // Oracles straight from the profile, not through the embedded families.
    std::vector<double> rho_sq(nm);
    std::vector<double> c_rho(nm);
    for (std::size_t i = 0; i < nm; ++i) {
        const auto& m = mollifiers[i];
        const double r = m.support_radius();
        rho_sq[i] = integrate([&](double y) { return m(y) * m(y); }, -r, r, 1e-14).value;
        c_rho[i] = integrate([&](double y) { const double p = m.primitive(y); return p * p - p; }, -r, r, 1e-14).value;
    }

    std::vector<AssociationReport> assoc;
    for (std::size_t i = 0; i < nm; ++i)
        assoc.push_back(
            is_associated(heaviside[i] * heaviside[i], heaviside[i], suite, config.grid, config.thresholds,
                          config.identity_tol));

    ReproduceOutput out;
    CsvWriter csv("experiment,mollifier,epsilon,psi_id,value,error_estimate");
    json summary;
    summary["schema_version"] = kSummarySchemaVersion;
    summary["config"] = {{"mollifiers", config.mollifiers},
                         {"grid", {{"eps0", config.grid.eps0}, {"ratio", config.grid.ratio}, {"count", config.grid.count}}},
                         {"suite", {{"count", config.suite_count}, {"seed", config.seed}}},
                         {"identity_tol", config.identity_tol},
                         {"sweep_tol", config.sweep_tol},
                         {"association_tol", config.thresholds.association_tol}};
    json suite_json = json::array();
    for (const auto& psi : suite)
        suite_json.push_back({{"psi_id", psi.id}, {"psi_at_zero", psi.value_at_zero}, {"description", psi.description}});
    summary["test_suite"] = suite_json;

    // Eq. value -1/6
    json eq2_json = json::array();
    double eq2_max_dev = 0.0;
    for (std::size_t c = 0; c < nm * ne; ++c) {
        const std::string name = mollifiers[c / ne].name();
        const auto& r = eq2[c];
        const double dev = std::abs(r.value + 1.0 / 6.0);
        eq2_max_dev = std::max(eq2_max_dev, dev);
        csv.row("eq2", name, eps[c % ne], "", r.value, r.error_estimate);
        eq2_json.push_back({{"mollifier", name},
                            {"epsilon", eps[c % ne]},
                            {"Eq2_value", r.value},
                            {"error_estimate", r.error_estimate},
                            {"deviation", dev}});
    }
    summary["eq2"] = eq2_json;
    summary["eq2_max_deviation"] = eq2_max_dev;
    out.gates.push_back({"eq2_minus_one_sixth", eq2_max_dev <= 1e-10,
                         fmt::format("{} cells, max |value + 1/6| = {:.3e} (gate 1e-10)", nm * ne, eq2_max_dev)});

    // pairings of H^2 - H
    json eq1_json = json::array();
    bool eq1_ok = true;
    std::string eq1_detail;
    for (std::size_t i = 0; i < nm; ++i) {
        const std::string name = mollifiers[i].name();
        int decaying = 0;
        for (const auto& p : assoc[i].pairings) {
            for (std::size_t k = 0; k < ne; ++k)
                csv.row("eq1_pairing", name, eps[k], p.psi_id, p.samples[k].value, p.errors[k]);
            const bool nonzero_at_origin = std::abs(p.psi_at_zero) > 1e-12;
            const bool order_ok = p.decay.ok && std::abs(p.decay.exponent - 1.0) <= 0.1;
            const bool limit_ok = p.limit.converged && std::abs(p.limit.limit) < 1e-8;
            if (nonzero_at_origin && order_ok) ++decaying;
            if ((nonzero_at_origin && !order_ok) || !limit_ok) {
                eq1_ok = false;
                eq1_detail += fmt::format("{} psi{}: order {} limit {}; ", name, p.psi_id,
                                          p.decay.ok ? fmt::format("{:.4f}", p.decay.exponent) : "unfit", p.limit.limit);
            }
            eq1_json.push_back({{"mollifier", name},
                                {"psi_id", p.psi_id},
                                {"psi_at_zero", p.psi_at_zero},
                                {"limit", p.limit.limit},
                                {"limit_error", p.limit.error_estimate},
                                {"decay_order", p.decay.ok ? json(p.decay.exponent) : json(nullptr)},
                                {"fit_quality", p.decay.r_squared}});
        }
        if (decaying < 5) {
            eq1_ok = false;
            eq1_detail += fmt::format("{}: only {} probes with psi(0) != 0 decay with order 1; ", name, decaying);
        }
    }
    summary["eq1"] = eq1_json;
    out.gates.push_back({"eq1_pairings_vanish_order_one", eq1_ok,
                         eq1_ok ? "order 1 +- 0.1 for every psi(0) != 0 probe, |limit| < 1e-8 for all" : eq1_detail});

    // association vs negligibility
    json imp_json = json::array();
    bool imp_ok = true;
    bool implication_fails = true;
    std::string imp_detail;
    for (std::size_t i = 0; i < nm; ++i) {
        const std::string name = mollifiers[i].name();
        double worst = 0.0;
        for (const auto& s : assoc[i].negligibility.supnorm_by_eps) {
            csv.row("supnorm", name, s.eps, "", s.value, 0.0);
            worst = std::max(worst, std::abs(s.value - 0.25));
        }
        const bool fails = assoc[i].implication_fails();
        implication_fails = implication_fails && fails;
        if (!fails || worst > 1e-6) {
            imp_ok = false;
            imp_detail += fmt::format("{}: vanish={} negligible={} max|sup-1/4|={:.3e}; ", name,
                                      assoc[i].all_pairings_vanish, assoc[i].negligible, worst);
        }
        json j = to_json(assoc[i]);
        j["mollifier"] = name;
        j["supnorm_max_deviation"] = worst;
        imp_json.push_back(j);
    }
    summary["implication3"] = imp_json;
    summary["implication3_fails"] = implication_fails;
    out.gates.push_back({"implication3_fails", imp_ok,
                         imp_ok ? "all pairings vanish while sup|H^2-H| = 1/4 at every eps" : imp_detail});

    // int D^2
    json dsq_json = json::array();
    bool dsq_ok = true;
    std::string dsq_detail;
    for (std::size_t i = 0; i < nm; ++i) {
        const std::string name = mollifiers[i].name();
        SampleTable samples;
        for (std::size_t k = 0; k < ne; ++k) {
            const auto& r = delta_sq[i * ne + k];
            csv.row("delta_squared", name, eps[k], "", r.value, r.error_estimate);
            samples.push_back({eps[k], r.value});
        }
        const auto cls = classify(samples, config.thresholds);
        const double rel = std::abs(cls.coefficient / rho_sq[i] - 1.0);
        const bool ok = cls.verdict == Verdict::infinite_of_order && std::abs(cls.fit.exponent + 1.0) <= 0.05 && rel <= 0.01;
        if (!ok) {
            dsq_ok = false;
            dsq_detail += fmt::format("{}: {} exponent {:.4f} coefficient error {:.3e}; ", name, to_string(cls.verdict),
                                      cls.fit.exponent, rel);
        }
        json j = to_json(cls);
        j["mollifier"] = name;
        j["rho_squared_integral"] = rho_sq[i];
        j["coefficient_relative_error"] = rel;
        dsq_json.push_back(j);
    }
    summary["delta_squared"] = dsq_json;
    out.gates.push_back({"delta_squared_infinite_order_one", dsq_ok,
                         dsq_ok ? "InfiniteOfOrder, exponent -1 +- 0.05, coefficient within 1% of int rho^2" : dsq_detail});

    // int H^n H' = 1/(n+1)
    json pow_json = json::array();
    double pow_max_dev = 0.0;
    for (std::size_t i = 0; i < nm; ++i) {
        const std::string name = mollifiers[i].name();
        for (int n = 1; n <= kMaxPower; ++n) {
            double dev = 0.0;
            for (std::size_t k = 0; k < ne; ++k) {
                const auto& r = powers[(i * kMaxPower + static_cast<std::size_t>(n - 1)) * ne + k];
                csv.row(fmt::format("power_n{}", n), name, eps[k], "", r.value, r.error_estimate);
                dev = std::max(dev, std::abs(r.value - 1.0 / (n + 1)));
            }
            pow_max_dev = std::max(pow_max_dev, dev);
            pow_json.push_back({{"mollifier", name}, {"n", n}, {"expected", 1.0 / (n + 1)}, {"max_deviation", dev}});
        }
    }
    summary["power_family"] = pow_json;
    out.gates.push_back({"power_family", pow_max_dev <= 1e-10,
                         fmt::format("max |int H^n H' - 1/(n+1)| = {:.3e} (gate 1e-10)", pow_max_dev)});

    // int_{-1}^{1} (H^2 - H): reported, not gated
    json h2h_json = json::array();
    for (std::size_t i = 0; i < nm; ++i) {
        const std::string name = mollifiers[i].name();
        SampleTable samples;
        for (std::size_t k = 0; k < ne; ++k) {
            const auto& r = h2h_integral[i * ne + k];
            csv.row("h2_minus_h_integral", name, eps[k], "", r.value, r.error_estimate);
            samples.push_back({eps[k], r.value});
        }
        json j = to_json(classify(samples, config.thresholds));
        j["mollifier"] = name;
        j["oracle_coefficient"] = c_rho[i];
        h2h_json.push_back(j);
    }
    summary["h2_minus_h_integral"] = h2h_json;

    out.csv = std::move(csv.text);
    out.summary = std::move(summary);
    finish(out.gates, out.summary, out.passed);
    return out;
}

namespace {

struct QftCell {
    double eps = 0.0;
    int dimension = 0;
    double time = 0.0;
    bool ok = false;
    qft::Transition result;
    std::string error;
};

double rabi_probability(double g, double t) {
    const double s = std::sin(g * t);
    return s * s;
}

}  // namespace

QftOutput run_qft(const RunConfig& config) {
    config.validate();
    const auto grid_eps = config.grid.values();
    QftOutput out;
    CsvWriter qft_csv("problem,epsilon,N,time,probability,unitarity_defect");
    CsvWriter dyson_csv("problem,order,partial_sum_probability,exact_probability");
    json blocks = json::array();

    for (const auto& block : config.qft) {
        const auto& base = block.problem;
        const std::vector<double> eps = block.sweep ? grid_eps : std::vector<double>{block.epsilon};
        const std::size_t nd = block.dims.size();
        const std::size_t nt = block.times.size();
        const auto cells = kernels::map_cells(eps.size() * nd * nt, [&](std::size_t c) {
            QftCell cell;
            cell.eps = eps[c / (nd * nt)];
            cell.dimension = block.dims[(c / nt) % nd];
            cell.time = block.times[c % nt];
            try {
                auto p = base.with_dimension(cell.dimension);
                p.time = cell.time;
                cell.result = qft::transition(p, Epsilon(cell.eps));
                cell.ok = true;
            } catch (const Error& e) {
                cell.error = e.what();
            }
            return cell;
        });

        json bj;
        bj["name"] = base.name;
        bj["potential"] = base.interaction.potential.describe();
        bj["coupling"] = base.interaction.coupling.description();
        bj["counterterm"] = base.interaction.counterterm ? json(base.interaction.counterterm->description()) : json(nullptr);
        bj["omega"] = base.fock.omega;
        bj["sweep"] = block.sweep;

        bool range_ok = true;
        double worst_defect = 0.0;
        double worst_oracle = 0.0;
        std::string range_detail;
        for (const auto& cell : cells) {
            if (!cell.ok) {
                range_ok = false;
                range_detail += fmt::format("eps={} N={} t={}: {}; ", cell.eps, cell.dimension, cell.time, cell.error);
                continue;
            }
            qft_csv.row(base.name, cell.eps, cell.dimension, cell.time, cell.result.probability,
                        cell.result.unitarity_defect);
            worst_defect = std::max(worst_defect, cell.result.unitarity_defect);
            const double p = cell.result.probability;
            if (!(p >= 0.0 && p <= 1.0)) range_ok = false;
            if (block.oracle == "rabi") {
                const double g = base.interaction.coupling.at(Epsilon(cell.eps));
                worst_oracle = std::max(worst_oracle, std::abs(p - rabi_probability(g, cell.time)));
            }
        }
        const bool unitary = worst_defect < 1e-10;
        out.gates.push_back({"qft_range_unitarity:" + base.name, range_ok && unitary,
                             range_ok ? fmt::format("probabilities in [0,1], max unitarity defect {:.3e}", worst_defect)
                                      : range_detail});
        bj["max_unitarity_defect"] = worst_defect;
        if (block.oracle == "rabi") {
            out.gates.push_back({"qft_rabi_oracle:" + base.name, worst_oracle <= 1e-8,
                                 fmt::format("max |P - sin^2(gt)| = {:.3e} (gate 1e-8)", worst_oracle)});
            bj["rabi_max_deviation"] = worst_oracle;
        }

        // completeness on the first cell: sum over the whole final basis
        {
            auto p = base.with_dimension(block.dims.front());
            p.time = block.times.front();
            const auto h = qft::build_hamiltonian(p.fock, p.interaction, Epsilon(eps.front()));
            const auto psi_t = qft::evolve(h, p.time, p.initial.amplitudes());
            double total = 0.0;
            for (int n = 0; n < p.fock.dimension; ++n) total += std::norm(psi_t(n));
            bj["completeness_defect"] = std::abs(total - 1.0);
            out.gates.push_back({"qft_completeness:" + base.name, std::abs(total - 1.0) <= 1e-9,
                                 fmt::format("|sum_n P(n) - 1| = {:.3e}", std::abs(total - 1.0))});
        }

        if (block.sweep) {
            json sweeps = json::array();
            double spread = 0.0;
            for (std::size_t d = 0; d < nd; ++d)
                for (std::size_t t = 0; t < nt; ++t) {
                    SampleTable samples;
                    for (std::size_t e = 0; e < eps.size(); ++e) {
                        const auto& cell = cells[(e * nd + d) * nt + t];
                        if (cell.ok) samples.push_back({cell.eps, cell.result.probability});
                    }
                    if (samples.empty()) continue;
                    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                                              [](const Sample& a, const Sample& b) { return a.value < b.value; });
                    spread = std::max(spread, hi->value - lo->value);
                    const auto cls = classify(samples, config.thresholds);
                    json sj = to_json(cls);
                    sj["N"] = block.dims[d];
                    sj["time"] = block.times[t];
                    sj["limit_exists"] = cls.verdict == Verdict::finite_limit || cls.verdict == Verdict::decays_with_order;
                    sweeps.push_back(sj);
                }
            bj["eps_sweep"] = sweeps;
            bj["eps_spread"] = spread;
            if (block.expect_eps_independent)
                out.gates.push_back({"qft_eps_independent:" + base.name, spread < 1e-10,
                                     fmt::format("max spread over eps = {:.3e} (gate 1e-10)", spread)});
        }

        if (nd > 1) {
            json rows = json::array();
            std::optional<int> converged_at;
            double previous = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t d = 0; d < nd; ++d) {
                const auto& cell = cells[d * nt];
                if (!cell.ok) continue;
                const double diff = std::isnan(previous) ? previous : std::abs(cell.result.probability - previous);
                if (!converged_at && !std::isnan(diff) && diff < 1e-6) converged_at = cell.dimension;
                rows.push_back({{"N", cell.dimension}, {"probability", cell.result.probability},
                                {"difference", std::isnan(diff) ? json(nullptr) : json(diff)}});
                previous = cell.result.probability;
            }
            bj["truncation"] = rows;
            bj["truncation_converged_at"] = converged_at ? json(*converged_at) : json(nullptr);
        }

        if (block.dyson_order > 0) {
            auto p = base.with_dimension(block.dims.front());
            p.time = block.dyson_time;
            json dj;
            try {
                const auto d = qft::dyson_partial_sums(p, Epsilon(eps.front()), block.dyson_order, block.time_steps);
                for (std::size_t k = 0; k < d.probabilities.size(); ++k)
                    dyson_csv.row(base.name, static_cast<int>(k), d.probabilities[k], d.exact_probability);
                dj["time"] = p.time;
                dj["time_steps"] = d.time_steps;
                dj["exact_probability"] = d.exact_probability;
                dj["first_divergence_order"] = d.first_divergence_order ? json(*d.first_divergence_order) : json(nullptr);
                dj["max_partial_sum_probability"] = *std::max_element(d.probabilities.begin(), d.probabilities.end());
                const bool exact_ok = d.exact_probability >= 0.0 && d.exact_probability <= 1.0;
                out.gates.push_back({"qft_dyson_exact_in_range:" + base.name, exact_ok,
                                     fmt::format("exact probability {}", d.exact_probability)});
            } catch (const Error& e) {
                dj["error"] = e.what();
                out.gates.push_back({"qft_dyson:" + base.name, false, e.what()});
            }
            bj["dyson"] = dj;
        }
        blocks.push_back(bj);
    }

    out.qft_csv = std::move(qft_csv.text);
    out.dyson_csv = std::move(dyson_csv.text);
    out.summary["schema_version"] = kSummarySchemaVersion;
    out.summary["problems"] = blocks;
    finish(out.gates, out.summary, out.passed);
    return out;
}

}  // namespace genfn
