#include "genfn/qft_toy.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "genfn/kernels.hpp"

namespace genfn::qft {

void FockSpec::validate() const {
    if (dimension < 2) throw ConstructionError(fmt::format("Fock dimension must be >= 2, got {}", dimension));
    if (!(omega >= 0.0) || !std::isfinite(omega))
        throw ConstructionError(fmt::format("omega must be finite and >= 0, got {}", omega));
}

Potential Potential::polynomial(std::vector<double> coeffs) {
    if (coeffs.size() > 7) throw ConstructionError("potential polynomial degree must be <= 6");
    Potential p;
    p.kind = Kind::polynomial;
    p.coeffs = std::move(coeffs);
    return p;
}

Potential Potential::two_level() {
    Potential p;
    p.kind = Kind::two_level;
    return p;
}

std::string Potential::describe() const {
    if (kind == Kind::two_level) return "two_level";
    std::string s;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] == 0.0) continue;
        if (!s.empty()) s += " + ";
        s += fmt::format("{}*X^{}", coeffs[k], k);
    }
    return s.empty() ? "0" : s;
}

StateVector::StateVector(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
    const double norm = amplitudes_.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ConstructionError("state vector must have finite nonzero norm");
    amplitudes_ /= norm;
}

StateVector StateVector::basis(int dimension, int n) {
    if (n < 0 || n >= dimension)
        throw ConstructionError(fmt::format("basis state {} outside dimension {}", n, dimension));
    Vector v = Vector::Zero(dimension);
    v(n) = 1.0;
    return StateVector(std::move(v));
}

StateVector StateVector::with_dimension(int dimension) const {
    const int old = this->dimension();
    for (int i = dimension; i < old; ++i)
        if (amplitudes_(i) != Complex(0.0))
            throw ConstructionError(fmt::format("cannot truncate state to dimension {}: amplitude {} is nonzero", dimension, i));
    Vector v = Vector::Zero(dimension);
    const int keep = std::min(old, dimension);
    v.head(keep) = amplitudes_.head(keep);
    StateVector s;
    s.amplitudes_ = std::move(v);
    return s;
}

void TransitionProblem::validate() const {
    fock.validate();
    if (initial.dimension() != fock.dimension || final_state.dimension() != fock.dimension)
        throw ConstructionError(fmt::format("problem '{}': state dimensions ({}, {}) do not match Fock dimension {}", name,
                                            initial.dimension(), final_state.dimension(), fock.dimension));
    if (!std::isfinite(time)) throw ConstructionError(fmt::format("problem '{}': time must be finite", name));
}

TransitionProblem TransitionProblem::with_dimension(int dimension) const {
    TransitionProblem p = *this;
    p.fock.dimension = dimension;
    p.initial = initial.with_dimension(dimension);
    p.final_state = final_state.with_dimension(dimension);
    return p;
}

std::pair<Matrix, Matrix> ladder_matrices(int dimension) {
    if (dimension < 2) throw ConstructionError(fmt::format("Fock dimension must be >= 2, got {}", dimension));
    Matrix lower = Matrix::Zero(dimension, dimension);
    for (int n = 1; n < dimension; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
    Matrix raise = lower.adjoint();
    return {std::move(lower), std::move(raise)};
}

Matrix potential_matrix(const Potential& potential, int dimension) {
    if (potential.kind == Potential::Kind::two_level) {
        Matrix v = Matrix::Zero(dimension, dimension);
        v(0, 1) = 1.0;
        v(1, 0) = 1.0;
        return v;
    }
    const auto [lower, raise] = ladder_matrices(dimension);
    const Matrix x = lower + raise;
    Matrix v = Matrix::Zero(dimension, dimension);
    Matrix power = Matrix::Identity(dimension, dimension);
    for (std::size_t k = 0; k < potential.coeffs.size(); ++k) {
        if (k > 0) power = power * x;
        if (potential.coeffs[k] != 0.0) v += potential.coeffs[k] * power;
    }
    return v;
}

namespace {

Vector free_energies(const FockSpec& fock, double counterterm) {
    Vector e(fock.dimension);
    for (int n = 0; n < fock.dimension; ++n) e(n) = fock.omega * (n + 0.5) + counterterm;
    return e;
}

double finite_scalar(const GenNumber& g, Epsilon eps, const char* what) {
    const double v = g.at(eps);
    if (!std::isfinite(v))
        throw ConstructionError(fmt::format("{} '{}' is not finite at eps={}", what, g.description(), eps.value()));
    return v;
}

double counterterm_at(const InteractionSpec& in, Epsilon eps) {
    return in.counterterm ? finite_scalar(*in.counterterm, eps, "counterterm") : 0.0;
}

}  // namespace

Matrix build_hamiltonian(const FockSpec& fock, const InteractionSpec& interaction, Epsilon eps) {
    fock.validate();
    const double g = finite_scalar(interaction.coupling, eps, "coupling");
    const double c = counterterm_at(interaction, eps);
    Matrix h = Matrix::Zero(fock.dimension, fock.dimension);
    h.diagonal() = free_energies(fock, c);
    if (g != 0.0) h += g * potential_matrix(interaction.potential, fock.dimension);
    Matrix sym = 0.5 * (h + h.adjoint());
    return sym;
}

Vector evolve(const Matrix& hamiltonian, double t, const Vector& psi0) {
    if (hamiltonian.rows() != hamiltonian.cols() || hamiltonian.rows() != psi0.size())
        throw Error("evolve: dimension mismatch between Hamiltonian and state");
    if (t == 0.0) return psi0;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian);
    if (solver.info() != Eigen::Success) throw Error("evolve: Hermitian eigensolver failed");
    const Matrix& u = solver.eigenvectors();
    Vector coeffs = u.adjoint() * psi0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k)
        coeffs(k) *= std::exp(Complex(0.0, -solver.eigenvalues()(k) * t));
    return u * coeffs;
}

Transition transition(const TransitionProblem& problem, Epsilon eps) {
    problem.validate();
    const Matrix h = build_hamiltonian(problem.fock, problem.interaction, eps);
    const Vector& psi0 = problem.initial.amplitudes();
    const Vector psi_t = evolve(h, problem.time, psi0);
    Transition r;
    r.amplitude = problem.final_state.amplitudes().dot(psi_t);
    r.unitarity_defect = std::abs(psi_t.norm() - psi0.norm());
    double p = std::norm(r.amplitude);
    constexpr double slack = 1e-12;
    if (!(p >= -slack && p <= 1.0 + slack))
        throw Error(fmt::format("problem '{}': probability {} outside [0, 1] at eps={}", problem.name, p, eps.value()));
    r.probability = std::clamp(p, 0.0, 1.0);
    return r;
}

double transition_probability(const TransitionProblem& problem, Epsilon eps) {
    return transition(problem, eps).probability;
}

DysonResult dyson_partial_sums(const TransitionProblem& problem, Epsilon eps, int max_order, int time_steps) {
    problem.validate();
    if (max_order < 0 || max_order > 16) throw ConstructionError(fmt::format("Dyson order must lie in [0, 16], got {}", max_order));
    if (time_steps < 1000) throw ConstructionError(fmt::format("Dyson series needs >= 1000 time steps, got {}", time_steps));

    const int n = problem.fock.dimension;
    const double g = finite_scalar(problem.interaction.coupling, eps, "coupling");
    const Vector energies = free_energies(problem.fock, counterterm_at(problem.interaction, eps));
    const Matrix v = potential_matrix(problem.interaction.potential, n);
    const double t = problem.time;
    const double dt = t / time_steps;
    const auto steps = static_cast<std::size_t>(time_steps);

    // phase(j) = exp(-i E s_j) on the grid
    std::vector<Vector> phase(steps + 1, Vector(n));
    for (std::size_t j = 0; j <= steps; ++j) {
        const double s = static_cast<double>(j) * dt;
        for (int m = 0; m < n; ++m) phase[j](m) = std::exp(Complex(0.0, -energies(m).real() * s));
    }

    auto schroedinger_amplitude = [&](const Vector& interaction_state) {
        return problem.final_state.amplitudes().dot(phase[steps].cwiseProduct(interaction_state));
    };

    DysonResult result;
    result.time_steps = time_steps;
    const Transition exact = transition(problem, eps);
    result.exact_amplitude = exact.amplitude;
    result.exact_probability = exact.probability;

    std::vector<Vector> previous(steps + 1, problem.initial.amplitudes());
    Vector partial = problem.initial.amplitudes();
    double g_power = 1.0;

    auto record = [&](int order) {
        const Complex amp = schroedinger_amplitude(partial);
        if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag()))
            throw Error(fmt::format("problem '{}': Dyson partial sum is not finite at order {}", problem.name, order));
        result.partial_sums.push_back(amp);
        result.probabilities.push_back(std::norm(amp));
        if (!result.first_divergence_order &&
            (std::abs(amp) > 10.0 * std::abs(result.exact_amplitude) || std::norm(amp) > 1.0))
            result.first_divergence_order = order;
    };
    record(0);

    std::vector<Vector> current(steps + 1, Vector::Zero(n));
    for (int order = 1; order <= max_order; ++order) {
        // integrand V~(s_j) psi_{k-1}(s_j) = conj(phase) .* (V (phase .* psi))
        Vector prev_f = phase[0].conjugate().cwiseProduct(v * phase[0].cwiseProduct(previous[0]));
        current[0].setZero();
        for (std::size_t j = 1; j <= steps; ++j) {
            Vector f = phase[j].conjugate().cwiseProduct(v * phase[j].cwiseProduct(previous[j]));
            current[j] = current[j - 1] + Complex(0.0, -0.5 * dt) * (prev_f + f);
            prev_f = std::move(f);
        }
        if (!current[steps].allFinite())
            throw Error(fmt::format("problem '{}': Dyson term is not finite at order {}", problem.name, order));
        g_power *= g;
        partial += g_power * current[steps];
        record(order);
        std::swap(previous, current);
    }
    return result;
}

SweepResult sweep_epsilon(const TransitionProblem& problem, const EpsilonGrid& grid, const Thresholds& thresholds) {
    problem.validate();
    const auto eps = grid.values();
    const auto probs =
        kernels::map_cells(eps.size(), [&](std::size_t i) { return transition_probability(problem, Epsilon(eps[i])); });
    SweepResult r;
    for (std::size_t i = 0; i < eps.size(); ++i) r.probabilities.push_back({eps[i], probs[i]});
    r.classification = classify(r.probabilities, thresholds);
    r.limit_exists = r.classification.verdict == Verdict::finite_limit ||
                     r.classification.verdict == Verdict::decays_with_order;
    return r;
}

std::vector<TruncationRow> truncation_study(const TransitionProblem& problem, const std::vector<int>& dimensions,
                                            Epsilon eps) {
    for (std::size_t i = 1; i < dimensions.size(); ++i)
        if (dimensions[i] <= dimensions[i - 1]) throw ConstructionError("truncation dimensions must be increasing");
    const auto probs = kernels::map_cells(dimensions.size(), [&](std::size_t i) {
        return transition_probability(problem.with_dimension(dimensions[i]), eps);
    });
    std::vector<TruncationRow> rows;
    for (std::size_t i = 0; i < dimensions.size(); ++i)
        rows.push_back({dimensions[i], probs[i],
                        i == 0 ? std::numeric_limits<double>::quiet_NaN() : std::abs(probs[i] - probs[i - 1])});
    return rows;
}

}  // namespace genfn::qft
