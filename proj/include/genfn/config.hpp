#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "genfn/asymptotics.hpp"
#include "genfn/errors.hpp"
#include "genfn/qft_toy.hpp"

namespace genfn {

/// Malformed or unknown configuration; maps to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// One [qft.<name>] section.
struct QftBlock {
    qft::TransitionProblem problem;
    /// evolution times; problem.time is the first one
    std::vector<double> times;
    /// Fock dimensions to run (truncation study when more than one)
    std::vector<int> dims;
    /// run every grid eps instead of the single `epsilon`
    bool sweep = false;
    double epsilon = 0.125;
    /// 0 disables the Dyson table
    int dyson_order = 0;
    int time_steps = 10000;
    double dyson_time = 0.0;
    /// "rabi": gate probabilities against sin^2(g t)
    std::string oracle;
    /// gate: probabilities do not depend on eps (spread < 1e-10)
    bool expect_eps_independent = false;
};

struct RunConfig {
    std::vector<std::string> mollifiers{"bump", "cosine_power:k=4", "truncated_gaussian:sigma=0.4"};
    EpsilonGrid grid;
    int suite_count = 8;
    std::uint64_t seed = 1;
    double identity_tol = 1e-11;
    double sweep_tol = 1e-9;
    Thresholds thresholds;
    std::string out_dir = ".";
    std::vector<QftBlock> qft;

    /// Built-in problems: Rabi, displaced oscillator, quartic (Dyson),
    /// quartic truncation study, identity-counterterm sweep,
    /// log-growing-coupling sweep.
    static std::vector<QftBlock> default_qft_blocks();
    static RunConfig defaults();

    /// Throws ConfigError if anything is out of range.
    void validate() const;
};

/// Sectioned `key = value` text; '#' starts a comment. Unknown
/// sections or keys and duplicate keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// "const:v", "log:c" (c log(1/eps)), "power:c,a" (c eps^a)
GenNumber parse_scalar_family(const std::string& text);
/// "eps0,ratio,count"
EpsilonGrid parse_grid(const std::string& text);

}  // namespace genfn
