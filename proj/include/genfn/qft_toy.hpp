#pragma once

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "genfn/asymptotics.hpp"
#include "genfn/gen_function.hpp"

namespace genfn::qft {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Single mode truncated to number states 0..dimension-1.
struct FockSpec {
    int dimension = 2;
    /// omega = 0 is allowed (pure two-level Rabi problems)
    double omega = 1.0;

    void validate() const;
};

/// The operator multiplying the coupling.
struct Potential {
    enum class Kind { polynomial, two_level };

    Kind kind = Kind::polynomial;
    /// ascending coefficients of a polynomial in X = a + a^dagger, degree <= 6
    std::vector<double> coeffs;

    static Potential polynomial(std::vector<double> coeffs);
    /// |0><1| + |1><0|, independent of the truncation
    static Potential two_level();

    std::string describe() const;
};

struct InteractionSpec {
    Potential potential;
    GenNumber coupling = GenNumber::constant(0.0);
    /// multiple of the identity added to H
    std::optional<GenNumber> counterterm;
};

class StateVector {
public:
    StateVector() = default;
    /// Normalizes; throws ConstructionError for a zero or non-finite vector.
    explicit StateVector(Vector amplitudes);

    static StateVector basis(int dimension, int n);

    const Vector& amplitudes() const { return amplitudes_; }
    int dimension() const { return static_cast<int>(amplitudes_.size()); }

    /// Zero-padded (or truncated, if the dropped amplitudes are all zero) copy.
    StateVector with_dimension(int dimension) const;

private:
    Vector amplitudes_;
};

struct TransitionProblem {
    std::string name;
    FockSpec fock;
    InteractionSpec interaction;
    StateVector initial;
    StateVector final_state;
    double time = 0.0;

    void validate() const;
    TransitionProblem with_dimension(int dimension) const;
};

/// (lowering, raising) on the truncated number basis.
std::pair<Matrix, Matrix> ladder_matrices(int dimension);

Matrix potential_matrix(const Potential& potential, int dimension);

/// omega (n + 1/2) + g(eps) V + c(eps) I, symmetrized to be exactly Hermitian.
Matrix build_hamiltonian(const FockSpec& fock, const InteractionSpec& interaction, Epsilon eps);

/// exp(-i H t) psi0 via the eigendecomposition of H. Throws Error if the eigensolver fails.
Vector evolve(const Matrix& hamiltonian, double t, const Vector& psi0);

struct Transition {
    double probability = 0.0;
    /// | ||psi_t|| - ||psi_0|| |
    double unitarity_defect = 0.0;
    Complex amplitude;
};

/// |<final| exp(-i H(eps) t) |initial>|^2. Values outside [-1e-12, 1 + 1e-12]
/// throw; values inside that slack are clamped to [0, 1].
Transition transition(const TransitionProblem& problem, Epsilon eps);
double transition_probability(const TransitionProblem& problem, Epsilon eps);

struct DysonResult {
    /// Schroedinger-picture amplitude of the partial sum through order k, k = 0..K
    std::vector<Complex> partial_sums;
    std::vector<double> probabilities;
    Complex exact_amplitude;
    double exact_probability = 0.0;
    /// first k whose partial sum exceeds 10x the exact amplitude or has probability > 1
    std::optional<int> first_divergence_order;
    int time_steps = 0;
};

/// Dyson series in the coupling around H0 = omega (n + 1/2) + c(eps) I.
/// psi_k(t) = -i int_0^t V~(s) psi_{k-1}(s) ds, V~(s) = e^{i H0 s} V e^{-i H0 s},
/// accumulated with the trapezoidal rule on a uniform grid (O(dt^2) per order).
DysonResult dyson_partial_sums(const TransitionProblem& problem, Epsilon eps, int max_order, int time_steps);

struct SweepResult {
    SampleTable probabilities;
    AsymptoticClass classification;
    bool limit_exists = false;
};

SweepResult sweep_epsilon(const TransitionProblem& problem, const EpsilonGrid& grid,
                          const Thresholds& thresholds = {});

struct TruncationRow {
    int dimension = 0;
    double probability = 0.0;
    /// |P(N) - P(previous N)|; NaN for the first row
    double difference = 0.0;
};

std::vector<TruncationRow> truncation_study(const TransitionProblem& problem, const std::vector<int>& dimensions,
                                            Epsilon eps);

}  // namespace genfn::qft
