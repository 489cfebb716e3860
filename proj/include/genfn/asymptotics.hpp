#pragma once

#include <string>
#include <vector>

#include "genfn/embedding.hpp"
#include "genfn/gen_function.hpp"
#include "genfn/quadrature.hpp"

namespace genfn {

/// Geometric grid eps_k = eps0 * ratio^k, k = 0..count-1.
struct EpsilonGrid {
    double eps0 = 0x1p-3;
    double ratio = 0.5;
    int count = 10;

    /// Throws ConstructionError unless 0 < ratio < 1, count >= 4 and all
    /// points lie in [2^-40, 1].
    void validate() const;
    std::vector<double> values() const;
};

struct Sample {
    double eps;
    double value;
};
using SampleTable = std::vector<Sample>;

/// g at every grid point, largest eps first. Cells run in parallel.
SampleTable sample(const GenNumber& g, const EpsilonGrid& grid);

struct Thresholds {
    /// |exponent| <= this counts as eps^0
    double finite_exponent = 0.1;
    double min_r_squared = 0.99;
    /// sup-norm decay order that counts as negligible on a finite grid
    double negligible_order = 2.0;
    /// FiniteLimit needs an extrapolation error <= limit_tol * max(1, |L|)
    double limit_tol = 1e-6;
    /// |limit| <= this counts as vanishing in association checks
    double association_tol = 1e-8;
};

/// log|g| = log|c| + exponent * log(eps), least squares.
struct PowerLawFit {
    bool ok = false;
    double exponent = 0.0;
    double coefficient = 0.0;
    double r_squared = 0.0;
    std::string reason;
};

PowerLawFit fit_power_law(const SampleTable& samples);
PowerLawFit fit_power_law(const GenNumber& g, const EpsilonGrid& grid);

struct LimitEstimate {
    bool converged = false;
    double limit = 0.0;
    double error_estimate = 0.0;
    /// fitted p of the leading correction c * eps^p (0 when the data is flat)
    double leading_order = 0.0;
    std::string reason;
};

/// Richardson extrapolation on the geometric grid. The leading correction
/// order p comes from the ratio of successive differences on the tail;
/// later columns remove eps^(p+1), eps^(p+2), ... The error estimate is the
/// spread of the last two extrapolants.
LimitEstimate limit_estimate(const SampleTable& samples);
LimitEstimate limit_estimate(const GenNumber& g, const EpsilonGrid& grid);

enum class Verdict { infinite_of_order, finite_limit, decays_with_order, unclassifiable };
std::string to_string(Verdict v);

struct AsymptoticClass {
    Verdict verdict = Verdict::unclassifiable;
    /// a in eps^-a for infinite_of_order, p in eps^p for decays_with_order
    double order = 0.0;
    /// leading coefficient (power-law verdicts)
    double coefficient = 0.0;
    /// finite_limit (0 for decays_with_order)
    double limit = 0.0;
    double limit_error = 0.0;
    double fit_quality = 0.0;
    PowerLawFit fit;
    SampleTable samples;
    std::string reason;
};

AsymptoticClass classify(const SampleTable& samples, const Thresholds& thresholds = {});
AsymptoticClass classify(const GenNumber& g, const EpsilonGrid& grid, const Thresholds& thresholds = {});

struct PairingLimit {
    int psi_id = 0;
    double psi_at_zero = 0.0;
    SampleTable samples;
    /// quadrature error estimate per sample
    std::vector<double> errors;
    LimitEstimate limit;
    PowerLawFit decay;
    bool vanishes = false;
};

struct NegligibilityReport {
    bool negligible = false;
    SampleTable supnorm_by_eps;
    PowerLawFit decay;
};

struct AssociationReport {
    std::vector<PairingLimit> pairings;
    bool all_pairings_vanish = false;
    std::string reason;
    NegligibilityReport negligibility;
    bool negligible = false;

    /// "every pairing vanishes, yet the family is not negligible"
    bool implication_fails() const { return all_pairings_vanish && !negligible; }
};

/// sup |u| over a dense deterministic sample of `region`, refined near the
/// support-hint edges and around the best sample.
double sup_norm(const SmoothRepresentative& u, Interval region);

NegligibilityReport is_negligible(const GenFunction& u, Interval region, const EpsilonGrid& grid,
                                  const Thresholds& thresholds = {});

/// Pairings of u - v against every probe, extrapolated to eps -> 0, plus the
/// independent sup-norm negligibility test of u - v over the hull of the
/// probes' supports. The two verdicts are never merged.
AssociationReport is_associated(const GenFunction& u, const GenFunction& v, const std::vector<TestFunction>& suite,
                                const EpsilonGrid& grid, const Thresholds& thresholds = {},
                                double quad_tol = kIdentityTol);

}  // namespace genfn
