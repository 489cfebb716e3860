#include "genfn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace genfn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const std::string t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError(fmt::format("{}: '{}' is not a finite number", where, s));
    return v;
}

long long to_integer(const std::string& s, const std::string& where) {
    long long v = 0;
    const std::string t = trim(s);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError(fmt::format("{}: '{}' is not an integer", where, s));
    return v;
}

bool to_bool(const std::string& s, const std::string& where) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", where, s));
}

std::vector<double> to_doubles(const std::string& s, const std::string& where) {
    std::vector<double> v;
    for (const auto& item : split(s, ',')) v.push_back(to_double(item, where));
    return v;
}

using Section = std::map<std::string, std::pair<std::string, int>>;  // key -> (value, line)

/// Reads the keys of one section, rejecting any not in `allowed`.
class SectionReader {
public:
    SectionReader(std::string name, const Section& section, std::set<std::string> allowed)
        : name_(std::move(name)), section_(section) {
        for (const auto& [key, value] : section_)
            if (!allowed.count(key))
                throw ConfigError(fmt::format("line {}: unknown key '{}' in [{}]", value.second, key, name_));
    }

    std::optional<std::string> get(const std::string& key) const {
        auto it = section_.find(key);
        if (it == section_.end()) return std::nullopt;
        return it->second.first;
    }

    std::string where(const std::string& key) const {
        auto it = section_.find(key);
        return fmt::format("line {} [{}] {}", it == section_.end() ? 0 : it->second.second, name_, key);
    }

    void read(const std::string& key, double& out) const {
        if (auto v = get(key)) out = to_double(*v, where(key));
    }
    void read(const std::string& key, int& out) const {
        if (auto v = get(key)) out = static_cast<int>(to_integer(*v, where(key)));
    }
    void read(const std::string& key, bool& out) const {
        if (auto v = get(key)) out = to_bool(*v, where(key));
    }
    void read(const std::string& key, std::string& out) const {
        if (auto v = get(key)) out = *v;
    }

private:
    std::string name_;
    const Section& section_;
};

qft::Potential parse_potential(const std::string& text, const std::string& where) {
    if (text == "two_level") return qft::Potential::two_level();
    if (text.rfind("poly:", 0) == 0) {
        try {
            return qft::Potential::polynomial(to_doubles(text.substr(5), where));
        } catch (const ConstructionError& e) {
            throw ConfigError(fmt::format("{}: {}", where, e.what()));
        }
    }
    throw ConfigError(fmt::format("{}: potential must be 'two_level' or 'poly:c0,c1,...', got '{}'", where, text));
}

QftBlock parse_qft_block(const std::string& name, const SectionReader& r) {
    QftBlock b;
    b.problem.name = name;
    auto& p = b.problem;

    int dimension = 0;
    r.read("dimension", dimension);
    if (auto v = r.get("dims"))
        for (const auto& item : split(*v, ',')) b.dims.push_back(static_cast<int>(to_integer(item, r.where("dims"))));
    if (dimension == 0 && !b.dims.empty()) dimension = b.dims.front();
    if (dimension == 0) throw ConfigError(fmt::format("[qft.{}]: 'dimension' or 'dims' is required", name));
    if (b.dims.empty()) b.dims.push_back(dimension);
    p.fock.dimension = dimension;
    r.read("omega", p.fock.omega);

    if (auto v = r.get("potential")) p.interaction.potential = parse_potential(*v, r.where("potential"));
    else throw ConfigError(fmt::format("[qft.{}]: 'potential' is required", name));
    try {
        if (auto v = r.get("coupling")) p.interaction.coupling = parse_scalar_family(*v);
        if (auto v = r.get("counterterm")) p.interaction.counterterm = parse_scalar_family(*v);
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("[qft.{}]: {}", name, e.what()));
    }

    if (auto v = r.get("times")) b.times = to_doubles(*v, r.where("times"));
    if (auto v = r.get("time")) b.times.insert(b.times.begin(), to_double(*v, r.where("time")));
    if (b.times.empty()) throw ConfigError(fmt::format("[qft.{}]: 'time' or 'times' is required", name));
    p.time = b.times.front();
    b.dyson_time = p.time;

    int initial = 0;
    int final_state = 0;
    r.read("initial", initial);
    r.read("final", final_state);
    r.read("sweep", b.sweep);
    r.read("epsilon", b.epsilon);
    r.read("dyson_order", b.dyson_order);
    r.read("time_steps", b.time_steps);
    r.read("dyson_time", b.dyson_time);
    r.read("oracle", b.oracle);
    r.read("expect_eps_independent", b.expect_eps_independent);
    if (!b.oracle.empty() && b.oracle != "rabi")
        throw ConfigError(fmt::format("[qft.{}]: unknown oracle '{}'", name, b.oracle));

    try {
        p.initial = qft::StateVector::basis(dimension, initial);
        p.final_state = qft::StateVector::basis(dimension, final_state);
        p.validate();
        for (int d : b.dims) p.with_dimension(d).validate();
        Epsilon check(b.epsilon);
        (void)check;
    } catch (const ConstructionError& e) {
        throw ConfigError(fmt::format("[qft.{}]: {}", name, e.what()));
    }
    return b;
}

}  // namespace

GenNumber parse_scalar_family(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError(fmt::format("scalar family '{}' must look like const:v, log:c or power:c,a", text));
    const std::string kind = trim(text.substr(0, colon));
    const auto args = to_doubles(text.substr(colon + 1), "scalar family '" + text + "'");
    if (kind == "const" && args.size() == 1) return GenNumber::constant(args[0]);
    if (kind == "log" && args.size() == 1) return GenNumber::log_inverse(args[0]);
    if (kind == "power" && args.size() == 2) return GenNumber::power(args[0], args[1]);
    throw ConfigError(fmt::format("scalar family '{}' must look like const:v, log:c or power:c,a", text));
}

EpsilonGrid parse_grid(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) throw ConfigError(fmt::format("grid '{}' must be eps0,ratio,count", text));
    EpsilonGrid g;
    g.eps0 = to_double(parts[0], "grid eps0");
    g.ratio = to_double(parts[1], "grid ratio");
    g.count = static_cast<int>(to_integer(parts[2], "grid count"));
    try {
        g.validate();
    } catch (const ConstructionError& e) {
        throw ConfigError(e.what());
    }
    return g;
}

std::vector<QftBlock> RunConfig::default_qft_blocks() {
    const double pi = std::acos(-1.0);
    std::vector<QftBlock> blocks;

    auto block = [](std::string name, int dim, double omega, qft::Potential v, GenNumber g, std::vector<double> times,
                    int initial, int final_state) {
        QftBlock b;
        b.problem.name = std::move(name);
        b.problem.fock = {dim, omega};
        b.problem.interaction.potential = std::move(v);
        b.problem.interaction.coupling = std::move(g);
        b.problem.initial = qft::StateVector::basis(dim, initial);
        b.problem.final_state = qft::StateVector::basis(dim, final_state);
        b.times = std::move(times);
        b.problem.time = b.times.front();
        b.dyson_time = b.problem.time;
        b.dims = {dim};
        return b;
    };

    auto rabi = block("rabi", 2, 0.0, qft::Potential::two_level(), GenNumber::constant(1.0),
                      {0.1, pi / 8, pi / 4, pi / 2, 1.0, 2.0, 3.0}, 0, 1);
    rabi.oracle = "rabi";
    rabi.dyson_order = 4;
    blocks.push_back(rabi);

    auto displaced = block("displaced", 8, 1.0, qft::Potential::polynomial({0.0, 1.0}), GenNumber::constant(0.3),
                           {1.0}, 0, 0);
    displaced.dims = {8, 16, 24, 32, 64};
    blocks.push_back(displaced);

    auto quartic = block("quartic", 20, 1.0, qft::Potential::polynomial({0, 0, 0, 0, 1}), GenNumber::constant(0.8),
                         {1.0}, 0, 0);
    quartic.dyson_order = 12;
    blocks.push_back(quartic);

    // survival of |0> converges only algebraically in N at this coupling
    auto truncation = block("quartic_truncation", 16, 1.0, qft::Potential::polynomial({0, 0, 0, 0, 1}),
                            GenNumber::constant(0.2), {1.0}, 0, 0);
    truncation.dims = {16, 32, 64, 96, 128, 160, 192, 224};
    blocks.push_back(truncation);

    auto counterterm = block("quartic_counterterm_sweep", 12, 1.0, qft::Potential::polynomial({0, 0, 0, 0, 1}),
                             GenNumber::constant(0.2), {1.0}, 0, 2);
    counterterm.problem.interaction.counterterm = GenNumber::log_inverse(1.0);
    counterterm.sweep = true;
    counterterm.expect_eps_independent = true;
    blocks.push_back(counterterm);

    // stand-in for a coupling that "looks nonrenormalizable": grows like log(1/eps)
    auto growing = block("quartic_log_coupling_sweep", 12, 1.0, qft::Potential::polynomial({0, 0, 0, 0, 1}),
                         GenNumber::log_inverse(0.1), {1.0}, 0, 0);
    growing.sweep = true;
    blocks.push_back(growing);
    return blocks;
}

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.qft = default_qft_blocks();
    return c;
}

void RunConfig::validate() const {
    try {
        grid.validate();
        if (mollifiers.empty()) throw ConfigError("at least one mollifier is required");
        for (const auto& m : mollifiers) parse_mollifier(m);
    } catch (const ConstructionError& e) {
        throw ConfigError(e.what());
    }
    if (suite_count < 1) throw ConfigError("suite count must be >= 1");
    if (!(identity_tol > 0.0) || !(sweep_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (!(thresholds.association_tol > 0.0) || !(thresholds.limit_tol > 0.0))
        throw ConfigError("association and limit tolerances must be positive");
    std::set<std::string> names;
    for (const auto& b : qft) {
        if (!names.insert(b.problem.name).second) throw ConfigError(fmt::format("duplicate qft block '{}'", b.problem.name));
        if (b.dyson_order < 0 || b.dyson_order > 16)
            throw ConfigError(fmt::format("[qft.{}]: dyson_order must lie in [0, 16]", b.problem.name));
        if (b.dyson_order > 0 && b.time_steps < 1000)
            throw ConfigError(fmt::format("[qft.{}]: time_steps must be >= 1000", b.problem.name));
        if (!std::is_sorted(b.dims.begin(), b.dims.end()) ||
            std::adjacent_find(b.dims.begin(), b.dims.end()) != b.dims.end())
            throw ConfigError(fmt::format("[qft.{}]: dims must be strictly increasing", b.problem.name));
    }
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, Section> sections;
    std::vector<std::string> order;
    std::string current;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(fmt::format("line {}: malformed section header", lineno));
            current = trim(line.substr(1, line.size() - 2));
            if (sections.count(current)) throw ConfigError(fmt::format("line {}: duplicate section [{}]", lineno, current));
            sections[current];
            order.push_back(current);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
        if (current.empty()) throw ConfigError(fmt::format("line {}: key outside of any section", lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!sections[current].emplace(key, std::make_pair(value, lineno)).second)
            throw ConfigError(fmt::format("line {}: duplicate key '{}' in [{}]", lineno, key, current));
    }

    RunConfig c;
    bool any_qft = false;
    for (const auto& name : order) {
        const Section& s = sections[name];
        if (name == "mollifiers") {
            SectionReader r(name, s, {"kinds"});
            if (auto v = r.get("kinds")) {
                c.mollifiers.clear();
                // ';'-separated, since parameters use ','
                for (const auto& item : split(*v, ';'))
                    if (!item.empty()) c.mollifiers.push_back(item);
            }
        } else if (name == "grid") {
            SectionReader r(name, s, {"eps0", "ratio", "count"});
            r.read("eps0", c.grid.eps0);
            r.read("ratio", c.grid.ratio);
            r.read("count", c.grid.count);
        } else if (name == "suite") {
            SectionReader r(name, s, {"count", "seed"});
            r.read("count", c.suite_count);
            if (auto v = r.get("seed")) c.seed = static_cast<std::uint64_t>(to_integer(*v, r.where("seed")));
        } else if (name == "tolerance") {
            SectionReader r(name, s, {"identity", "sweep", "association"});
            r.read("identity", c.identity_tol);
            r.read("sweep", c.sweep_tol);
            r.read("association", c.thresholds.association_tol);
        } else if (name == "thresholds") {
            SectionReader r(name, s, {"finite_exponent", "min_r_squared", "negligible_order", "limit_tol"});
            r.read("finite_exponent", c.thresholds.finite_exponent);
            r.read("min_r_squared", c.thresholds.min_r_squared);
            r.read("negligible_order", c.thresholds.negligible_order);
            r.read("limit_tol", c.thresholds.limit_tol);
        } else if (name == "output") {
            SectionReader r(name, s, {"dir"});
            r.read("dir", c.out_dir);
        } else if (name.rfind("qft.", 0) == 0 && name.size() > 4) {
            SectionReader r(name, s,
                            {"potential", "dimension", "dims", "omega", "coupling", "counterterm", "time", "times",
                             "initial", "final", "sweep", "epsilon", "dyson_order", "time_steps", "dyson_time",
                             "oracle", "expect_eps_independent"});
            c.qft.push_back(parse_qft_block(name.substr(4), r));
            any_qft = true;
        } else {
            throw ConfigError(fmt::format("unknown section [{}]", name));
        }
    }
    if (!any_qft) c.qft = RunConfig::default_qft_blocks();
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(fmt::format("cannot read config file '{}'", path));
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace genfn
