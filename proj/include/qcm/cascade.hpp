#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qcm/graph.hpp"
#include "qcm/random.hpp"

namespace qcm {

/// One realisation of the Independent Cascade process.
struct CascadeTrial {
    std::vector<NodeId> infected;  // sorted
    int steps = 0;                 // diffusion rounds that activated at least one node
};

enum class EstimateMethod { monte_carlo, exact, qae };

std::string_view to_string(EstimateMethod method);

struct InfluenceEstimate {
    double sigma = 0.0;             // expected number of infected nodes
    double sigma_normalized = 0.0;  // sigma / |V|
    std::optional<double> std_error;
    std::uint64_t trials_or_calls = 0;  // MC trials, or Q applications for QAE
    std::uint64_t a_applications = 0;   // QAE only
    EstimateMethod method = EstimateMethod::exact;
};

struct ExactInfluence {
    double sigma = 0.0;
    std::vector<double> node_probs;  // P(v infected) per node
};

inline constexpr std::size_t kExactEdgeCap = 24;

/// Runs IC once. Each newly activated node tries every inactive
/// out-neighbour exactly once in the following round.
CascadeTrial simulate_ic(const ProblemInstance& instance, SplitMix64& rng);

/// Mean infected count over `trials` independent cascades. Trial t draws
/// from substream(rng_seed, t). Throws std::invalid_argument if trials == 0.
InfluenceEstimate mc_influence(const ProblemInstance& instance, std::uint64_t trials,
                               std::uint64_t rng_seed);

/// Influence by enumerating every live-edge configuration (2^|E| of them).
/// Throws std::length_error when |E| > max_edges.
ExactInfluence exact_influence(const ProblemInstance& instance, std::size_t max_edges = kExactEdgeCap);

InfluenceEstimate exact_estimate(const ProblemInstance& instance, std::size_t max_edges = kExactEdgeCap);

/// Number of nodes reachable from the seeds through arcs whose bit is set
/// in `live_mask` (bit e = arc e). Requires |E| <= 64.
std::size_t live_edge_reach(const ProblemInstance& instance, std::uint64_t live_mask);

/// Seeds plus everything reachable from them through any arc.
std::vector<bool> reachable_from_seeds(const ProblemInstance& instance);

}  // namespace qcm
