#include "qcm/qae.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qcm::qae {

using qsim::AmplitudeSpan;

std::string_view to_string(QaeMode mode) {
    return mode == QaeMode::statevector ? "statevector" : "analytic";
}

QaeMode parse_qae_mode(std::string_view text) {
    if (text == "statevector") return QaeMode::statevector;
    if (text == "analytic") return QaeMode::analytic;
    throw std::invalid_argument("unknown QAE mode '" + std::string(text) + "'");
}

AOperatorSpec build_a_operator(const ProblemInstance& instance, std::span<const EdgeIndex> removal,
                               int evaluation_qubits, int qubit_cap) {
    AOperatorSpec spec{with_graph(instance, remove_edges(instance.graph, removal)), 0, {}, {}};
    const Graph& g = spec.instance.graph;
    const std::size_t total = g.edge_count() + 1 + static_cast<std::size_t>(std::max(evaluation_qubits, 0));
    if (total > static_cast<std::size_t>(qubit_cap))
        throw qsim::CapacityError("statevector QAE needs " + std::to_string(total) + " qubits (" +
                                  std::to_string(g.edge_count()) + " edges + ancilla + " +
                                  std::to_string(evaluation_qubits) + " evaluation), cap is " +
                                  std::to_string(qubit_cap) + "; use analytic mode (--analytic)");
    spec.edge_qubits = static_cast<int>(g.edge_count());
    for (const Edge& e : g.edges()) spec.edge_angles.push_back(2.0 * std::asin(std::sqrt(e.p)));

    const std::uint64_t configs = std::uint64_t{1} << g.edge_count();
    const double n = static_cast<double>(g.node_count());
    spec.ancilla_angles.resize(configs);
    for (std::uint64_t x = 0; x < configs; ++x) {
        const double f = static_cast<double>(live_edge_reach(spec.instance, x)) / n;
        spec.ancilla_angles[x] = 2.0 * std::asin(std::sqrt(std::min(f, 1.0)));
    }
    return spec;
}

namespace {

void check_slice(AmplitudeSpan work, const AOperatorSpec& spec) {
    if (qsim::qubits_of(work) != spec.work_qubits())
        throw std::invalid_argument("work slice does not match the A operator width");
}

void rotate_ancilla(AmplitudeSpan work, const AOperatorSpec& spec, double sign) {
    const std::uint64_t edge_mask = (std::uint64_t{1} << spec.edge_qubits) - 1;
    qsim::apply_controlled_ry(work, spec.ancilla(),
                              [&](std::uint64_t i) { return sign * spec.ancilla_angles[i & edge_mask]; });
}

}  // namespace

void apply_a(AmplitudeSpan work, const AOperatorSpec& spec) {
    check_slice(work, spec);
    for (int e = 0; e < spec.edge_qubits; ++e) qsim::apply_ry(work, e, spec.edge_angles[e]);
    rotate_ancilla(work, spec, 1.0);
}

void apply_a_adjoint(AmplitudeSpan work, const AOperatorSpec& spec) {
    check_slice(work, spec);
    rotate_ancilla(work, spec, -1.0);
    for (int e = spec.edge_qubits - 1; e >= 0; --e) qsim::apply_ry(work, e, -spec.edge_angles[e]);
}

void apply_q(AmplitudeSpan work, const AOperatorSpec& spec) {
    check_slice(work, spec);
    const std::uint64_t ancilla_bit = std::uint64_t{1} << spec.ancilla();
    qsim::apply_phase_flip_if(work, [&](std::uint64_t i) { return (i & ancilla_bit) != 0; });  // S_f
    apply_a_adjoint(work, spec);
    work[0] = -work[0];  // S0
    apply_a(work, spec);
    for (auto& amp : work) amp = -amp;
}

double ancilla_probability(const AOperatorSpec& spec) {
    qsim::StateVector state(spec.work_qubits());
    apply_a(state.amplitudes(), spec);
    return qsim::probability_of(state, spec.ancilla(), 1);
}

double qpe_error_bound(int m) {
    const double grid = std::ldexp(1.0, m);
    return std::numbers::pi / grid + std::numbers::pi * std::numbers::pi / (grid * grid);
}

namespace {

void check_m(int m) {
    if (m < 1 || m > 30) throw std::invalid_argument("evaluation qubit count m must be in [1, 30]");
}

/// sin^2(M pi d) / (M^2 sin^2(pi d)), with value 1 at integer d.
double fejer(double d, double grid) {
    const double den = std::sin(std::numbers::pi * d);
    if (std::abs(den) < 1e-12) return 1.0;
    const double num = std::sin(grid * std::numbers::pi * d);
    return (num * num) / (grid * grid * den * den);
}

std::vector<double> statevector_distribution(const AOperatorSpec& spec, int m) {
    const int w = spec.work_qubits();
    qsim::StateVector state(w + m);
    AmplitudeSpan amps = state.amplitudes();
    const std::size_t dim = std::size_t{1} << w;
    const std::size_t slices = std::size_t{1} << m;
    std::vector<int> eval(m);
    std::iota(eval.begin(), eval.end(), w);

    // H on every evaluation qubit followed by the controlled Q^(2^j) ladder leaves
    // slice c holding Q^c A|0> / sqrt(2^m), so build the slices by repeated Q.
    AmplitudeSpan first = amps.subspan(0, dim);
    apply_a(first, spec);
    const double scale = 1.0 / std::sqrt(static_cast<double>(slices));
    for (auto& amp : first) amp *= scale;
    for (std::size_t c = 1; c < slices; ++c) {
        AmplitudeSpan slice = amps.subspan(c * dim, dim);
        std::copy_n(amps.begin() + static_cast<std::ptrdiff_t>((c - 1) * dim), dim, slice.begin());
        apply_q(slice, spec);
    }
    qsim::inverse_qft(amps, eval);
    return qsim::register_distribution(amps, eval);
}

}  // namespace

double analytic_amplitude(const ProblemInstance& instance, std::span<const EdgeIndex> removal) {
    const ProblemInstance reduced = with_graph(instance, remove_edges(instance.graph, removal));
    try {
        return exact_influence(reduced).sigma / static_cast<double>(reduced.graph.node_count());
    } catch (const std::length_error& ex) {
        throw qsim::CapacityError(std::string("analytic QAE: ") + ex.what());
    }
}

std::vector<double> analytic_outcome_distribution(double a, int m) {
    check_m(m);
    if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("amplitude must lie in [0, 1]");
    const double grid = std::ldexp(1.0, m);
    const double phase = std::asin(std::sqrt(a)) / std::numbers::pi;
    std::vector<double> dist(std::size_t{1} << m);
    double total = 0.0;
    for (std::size_t y = 0; y < dist.size(); ++y) {
        const double frac = static_cast<double>(y) / grid;
        dist[y] = 0.5 * fejer(phase - frac, grid) + 0.5 * fejer(1.0 - phase - frac, grid);
        total += dist[y];
    }
    for (double& p : dist) p /= total;
    return dist;
}

std::vector<double> qae_outcome_distribution(const ProblemInstance& instance, std::span<const EdgeIndex> removal,
                                             int m, QaeMode mode) {
    check_m(m);
    if (mode == QaeMode::analytic)
        return analytic_outcome_distribution(analytic_amplitude(instance, removal), m);
    return statevector_distribution(build_a_operator(instance, removal, m), m);
}

AmplitudeEstimate sample_estimate(std::span<const double> distribution, int m, std::uint64_t rng_seed,
                                  QaeMode mode) {
    check_m(m);
    if (distribution.size() != (std::size_t{1} << m))
        throw std::invalid_argument("distribution size does not match 2^m");
    SplitMix64 rng(rng_seed);
    AmplitudeEstimate est;
    est.m = m;
    est.mode = mode;
    est.outcome = sample_discrete(rng, distribution);
    est.theta_hat = std::numbers::pi * static_cast<double>(est.outcome) / std::ldexp(1.0, m);
    const double s = std::sin(est.theta_hat);
    est.a_hat = std::clamp(s * s, 0.0, 1.0);
    est.q_applications = (std::uint64_t{1} << m) - 1;
    est.a_applications = 2 * est.q_applications + 1;
    return est;
}

AmplitudeEstimate qae_estimate(const ProblemInstance& instance, std::span<const EdgeIndex> removal, int m,
                               std::uint64_t rng_seed, QaeMode mode) {
    const auto dist = qae_outcome_distribution(instance, removal, m, mode);
    return sample_estimate(dist, m, rng_seed, mode);
}

int qae_evaluation_qubits(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    return static_cast<int>(std::ceil(std::log2(std::numbers::pi / epsilon))) + 2;
}

InfluenceEstimate qae_influence(const ProblemInstance& instance, std::span<const EdgeIndex> removal,
                                double epsilon, std::uint64_t rng_seed, QaeMode mode) {
    const int m = qae_evaluation_qubits(epsilon);
    const auto dist = qae_outcome_distribution(instance, removal, m, mode);
    std::array<AmplitudeEstimate, 3> runs;
    for (std::size_t r = 0; r < runs.size(); ++r) runs[r] = sample_estimate(dist, m, substream(rng_seed, r)(), mode);
    std::array<double, 3> a{runs[0].a_hat, runs[1].a_hat, runs[2].a_hat};
    std::sort(a.begin(), a.end());

    const double n = static_cast<double>(instance.graph.node_count());
    InfluenceEstimate est;
    est.sigma_normalized = a[1];
    est.sigma = a[1] * n;
    est.std_error = qpe_error_bound(m) * n;
    est.method = EstimateMethod::qae;
    for (const auto& run : runs) {
        est.trials_or_calls += run.q_applications;
        est.a_applications += run.a_applications;
    }
    return est;
}

}  // namespace qcm::qae
