#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "qcm/cascade.hpp"
#include "qcm/graph.hpp"

namespace qcm {

/// Work counters accumulated over one containment run.
struct RunAccounting {
    std::uint64_t mc_trials = 0;
    std::uint64_t a_applications = 0;
    std::uint64_t q_applications = 0;
    std::uint64_t grover_oracle_calls = 0;
    std::uint64_t linear_steps = 0;
    std::uint64_t diffusion_simulations = 0;

    RunAccounting& operator+=(const RunAccounting& other);
    bool operator==(const RunAccounting&) const = default;
};

/// Adds the cost reported by one influence estimate.
void charge(RunAccounting& accounting, const InfluenceEstimate& estimate);

struct ObjectiveValue {
    double total = 0.0;
    double influence_term = 0.0;  // lambda * sigma
    double impact_term = 0.0;     // (1 - lambda) * OI
    double sigma_used = 0.0;
    double oi_used = 0.0;
};

/// Sum of importance over the removed connections; an undirected
/// connection counts once even if both arcs are listed.
double operational_impact(std::span<const EdgeIndex> edges, const Graph& graph);

ObjectiveValue objective(const ProblemInstance& instance, std::span<const EdgeIndex> removal,
                         double sigma);

enum class CandidateStrategy { all, frontier, top_p };

std::string_view to_string(CandidateStrategy strategy);
CandidateStrategy parse_candidate_strategy(std::string_view text);

struct CandidateOptions {
    CandidateStrategy strategy = CandidateStrategy::all;
    std::size_t top_count = 8;  // used by top_p
};

/// Candidate arcs, ascending by index, one arc per logical connection.
///   all      - every connection
///   frontier - connections whose source is reachable from the seeds
///   top_p    - the `top_count` connections with the largest p (ties by index)
CandidateSet candidate_edges(const ProblemInstance& instance, const CandidateOptions& options = {});

/// Estimates influence on an instance whose graph already has the removal applied.
using Estimator = std::function<InfluenceEstimate(const ProblemInstance&)>;

/// Returns the position of the minimum score, charging its work to `accounting`.
using Finder = std::function<std::size_t(std::span<const double> scores, RunAccounting& accounting)>;

/// Exhaustive scan; lowest position wins ties. Charges |scores| linear steps.
Finder linear_finder();

struct PlanStep {
    int iteration = 0;    // 1-based
    EdgeIndex edge = 0;   // arc index in the original graph
    ObjectiveValue value; // objective after this removal
};

struct ContainmentPlan {
    std::vector<EdgeIndex> removed;  // arc indices in the original graph, in removal order
    std::vector<PlanStep> trace;
    ObjectiveValue initial;
    RunAccounting accounting;
};

struct GreedyOptions {
    CandidateOptions candidates;
    int k_max = 1;
    double exact_tolerance = 1e-9;
};

/// Raised when the estimator fails on a particular candidate.
class EstimatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Greedy edge removal over the combined objective
///   lambda * sigma(G \ E') + (1 - lambda) * OI(E').
/// Each round scores every candidate, asks `finder` for the argmin and
/// commits it only if it beats the current objective by more than the
/// improvement tolerance (exact_tolerance for exact estimates, otherwise
/// twice the larger reported std_error).
ContainmentPlan greedy_contain(const ProblemInstance& instance, const Estimator& estimator,
                               const Finder& finder, const GreedyOptions& options);

}  // namespace qcm
