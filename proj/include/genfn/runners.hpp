#pragma once

// Drivers behind the `reproduce` and `qft` subcommands. They compute every
// table in memory (cells in parallel, rows in declared order) and leave
// writing files to the caller, so tests can inspect the exact bytes.

#include <string>
#include <vector>

#include <json.hpp>

#include "genfn/config.hpp"

namespace genfn {

inline constexpr int kSummarySchemaVersion = 1;

struct Gate {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ReproduceOutput {
    /// experiment,mollifier,epsilon,psi_id,value,error_estimate
    std::string csv;
    nlohmann::json summary;
    std::vector<Gate> gates;
    bool passed = false;
};

/// Multiplication identities: the -1/6 integral, the pairing limits of
/// H^2 - H, the sup-norm of H^2 - H, the divergence of int D^2 and the
/// int H^n H' = 1/(n+1) family, for every configured mollifier.
ReproduceOutput run_reproduce(const RunConfig& config);

struct QftOutput {
    /// problem,epsilon,N,time,probability,unitarity_defect
    std::string qft_csv;
    /// problem,order,partial_sum_probability,exact_probability
    std::string dyson_csv;
    nlohmann::json summary;
    std::vector<Gate> gates;
    bool passed = false;
};

QftOutput run_qft(const RunConfig& config);

/// 17 significant digits; NaN as "nan".
std::string format_real(double v);

nlohmann::json to_json(const AsymptoticClass& c);
nlohmann::json to_json(const AssociationReport& r);
nlohmann::json to_json(const std::vector<Gate>& gates);

/// Writes `content` to dir/name, creating dir. Throws Error on I/O failure.
void write_file(const std::string& dir, const std::string& name, const std::string& content);

}  // namespace genfn
