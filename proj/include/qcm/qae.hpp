#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qcm/cascade.hpp"
#include "qcm/graph.hpp"
#include "qcm/qsim.hpp"

/// Amplitude estimation of the normalised influence sigma / |V|.
///
/// Work register layout: qubit e (0 <= e < |E|) holds the live/blocked state
/// of arc e, qubit |E| is the ancilla. Evaluation qubits sit above the work
/// register, evaluation qubit j controlling Q^(2^j).
namespace qcm::qae {

enum class QaeMode { statevector, analytic };

std::string_view to_string(QaeMode mode);
QaeMode parse_qae_mode(std::string_view text);

struct AOperatorSpec {
    ProblemInstance instance;          // removal already applied
    int edge_qubits = 0;
    std::vector<double> edge_angles;     // 2 asin(sqrt(p_e))
    std::vector<double> ancilla_angles;  // per live-edge configuration: 2 asin(sqrt(f(x)))

    int ancilla() const noexcept { return edge_qubits; }
    int work_qubits() const noexcept { return edge_qubits + 1; }
};

/// Throws qsim::CapacityError when |E| + 1 + evaluation_qubits exceeds the cap.
AOperatorSpec build_a_operator(const ProblemInstance& instance, std::span<const EdgeIndex> removal,
                               int evaluation_qubits = 0, int qubit_cap = qsim::kDefaultQubitCap);

/// The operators below act on one work-register slice of 2^(|E|+1) amplitudes.
void apply_a(qsim::AmplitudeSpan work, const AOperatorSpec& spec);
void apply_a_adjoint(qsim::AmplitudeSpan work, const AOperatorSpec& spec);
/// Q = -A S0 A^dagger S_f. The overall sign puts the eigenvalues at
/// exp(+-2i theta), so the readout sin^2(pi y / 2^m) estimates a rather than 1 - a.
void apply_q(qsim::AmplitudeSpan work, const AOperatorSpec& spec);

/// Ancilla P(1) after A|0>, from the statevector.
double ancilla_probability(const AOperatorSpec& spec);

/// The amplitude the analytic mode works from: exact sigma / |V| after removal.
/// Throws qsim::CapacityError beyond the exact oracle's edge cap.
double analytic_amplitude(const ProblemInstance& instance, std::span<const EdgeIndex> removal);

/// pi / 2^m + pi^2 / 4^m.
double qpe_error_bound(int m);

/// Closed-form QPE outcome distribution for amplitude a.
std::vector<double> analytic_outcome_distribution(double a, int m);

/// Distribution of the m-qubit evaluation register after QPE on Q.
std::vector<double> qae_outcome_distribution(const ProblemInstance& instance, std::span<const EdgeIndex> removal,
                                             int m, QaeMode mode);

struct AmplitudeEstimate {
    double a_hat = 0.0;
    double theta_hat = 0.0;  // pi * y / 2^m
    int m = 0;
    std::uint64_t outcome = 0;
    std::uint64_t q_applications = 0;  // 2^m - 1
    std::uint64_t a_applications = 0;  // 2 q + 1
    QaeMode mode = QaeMode::statevector;
};

/// Draws one readout from a precomputed outcome distribution.
AmplitudeEstimate sample_estimate(std::span<const double> distribution, int m, std::uint64_t rng_seed, QaeMode mode);

AmplitudeEstimate qae_estimate(const ProblemInstance& instance, std::span<const EdgeIndex> removal, int m,
                               std::uint64_t rng_seed, QaeMode mode);

/// ceil(log2(pi / epsilon)) + 2. Requires 0 < epsilon < 1.
int qae_evaluation_qubits(double epsilon);

/// Median of three readouts at the precision implied by epsilon.
/// std_error carries the QPE bound scaled to node counts.
InfluenceEstimate qae_influence(const ProblemInstance& instance, std::span<const EdgeIndex> removal,
                                double epsilon, std::uint64_t rng_seed, QaeMode mode = QaeMode::statevector);

}  // namespace qcm::qae
