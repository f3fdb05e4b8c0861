#include "qcm/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcm {

std::string_view to_string(EstimateMethod method) {
    switch (method) {
        case EstimateMethod::monte_carlo: return "monte_carlo";
        case EstimateMethod::exact: return "exact";
        case EstimateMethod::qae: return "qae";
    }
    return "unknown";
}

namespace {

/// Reusable scratch buffers for repeated cascades on one instance.
class IcSimulator {
public:
    explicit IcSimulator(const ProblemInstance& instance)
        : instance_(instance), active_(instance.graph.node_count(), 0) {}

    /// Returns the number of infected nodes; `infected_` holds them afterwards.
    std::size_t run(SplitMix64& rng, int* steps_out = nullptr) {
        const Graph& g = instance_.graph;
        for (NodeId v : infected_) active_[v] = 0;
        infected_.clear();
        for (NodeId s : instance_.seeds) {
            active_[s] = 1;
            infected_.push_back(s);
        }
        std::size_t frontier_begin = 0;
        int steps = 0;
        while (frontier_begin < infected_.size()) {
            const std::size_t frontier_end = infected_.size();
            for (std::size_t k = frontier_begin; k < frontier_end; ++k) {
                for (EdgeIndex e : g.out_edges(infected_[k])) {
                    const Edge& edge = g.edges()[e];
                    if (active_[edge.dst]) continue;
                    if (uniform01(rng) < edge.p) {
                        active_[edge.dst] = 1;
                        infected_.push_back(edge.dst);
                    }
                }
            }
            if (infected_.size() > frontier_end) ++steps;
            frontier_begin = frontier_end;
        }
        if (steps_out) *steps_out = steps;
        return infected_.size();
    }

    const std::vector<NodeId>& infected() const { return infected_; }

private:
    const ProblemInstance& instance_;
    std::vector<char> active_;
    std::vector<NodeId> infected_;
};

}  // namespace

CascadeTrial simulate_ic(const ProblemInstance& instance, SplitMix64& rng) {
    IcSimulator sim(instance);
    CascadeTrial trial;
    sim.run(rng, &trial.steps);
    trial.infected = sim.infected();
    std::sort(trial.infected.begin(), trial.infected.end());
    return trial;
}

InfluenceEstimate mc_influence(const ProblemInstance& instance, std::uint64_t trials,
                               std::uint64_t rng_seed) {
    if (trials == 0) throw std::invalid_argument("mc_influence: trials must be positive");
    IcSimulator sim(instance);
    // Welford accumulation
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        SplitMix64 rng = substream(rng_seed, t);
        const auto x = static_cast<double>(sim.run(rng));
        const double delta = x - mean;
        mean += delta / static_cast<double>(t + 1);
        m2 += delta * (x - mean);
    }
    const double variance = trials > 1 ? m2 / static_cast<double>(trials - 1) : 0.0;
    InfluenceEstimate est;
    est.sigma = mean;
    est.sigma_normalized = mean / static_cast<double>(instance.graph.node_count());
    est.std_error = std::sqrt(variance / static_cast<double>(trials));
    est.trials_or_calls = trials;
    est.method = EstimateMethod::monte_carlo;
    return est;
}

std::size_t live_edge_reach(const ProblemInstance& instance, std::uint64_t live_mask) {
    const Graph& g = instance.graph;
    if (g.edge_count() > 64) throw std::length_error("live_edge_reach: more than 64 edges");
    std::vector<char> seen(g.node_count(), 0);
    std::vector<NodeId> stack;
    for (NodeId s : instance.seeds) {
        seen[s] = 1;
        stack.push_back(s);
    }
    std::size_t count = stack.size();
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (EdgeIndex e : g.out_edges(v)) {
            if (!((live_mask >> e) & 1U)) continue;
            const NodeId u = g.edges()[e].dst;
            if (seen[u]) continue;
            seen[u] = 1;
            ++count;
            stack.push_back(u);
        }
    }
    return count;
}

ExactInfluence exact_influence(const ProblemInstance& instance, std::size_t max_edges) {
    const Graph& g = instance.graph;
    const std::size_t m = g.edge_count();
    if (m > max_edges || m > 63) throw std::length_error("instance too large for exact oracle");

    ExactInfluence out;
    out.node_probs.assign(g.node_count(), 0.0);
    std::vector<char> seen(g.node_count(), 0);
    std::vector<NodeId> stack, visited;
    const std::uint64_t configs = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < configs; ++mask) {
        double weight = 1.0;
        for (std::size_t e = 0; e < m; ++e) {
            const double p = g.edges()[e].p;
            weight *= ((mask >> e) & 1U) ? p : 1.0 - p;
        }
        if (weight == 0.0) continue;

        visited.clear();
        for (NodeId s : instance.seeds) {
            seen[s] = 1;
            stack.push_back(s);
            visited.push_back(s);
        }
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            for (EdgeIndex e : g.out_edges(v)) {
                if (!((mask >> e) & 1U)) continue;
                const NodeId u = g.edges()[e].dst;
                if (seen[u]) continue;
                seen[u] = 1;
                stack.push_back(u);
                visited.push_back(u);
            }
        }
        for (NodeId v : visited) {
            out.node_probs[v] += weight;
            seen[v] = 0;
        }
    }
    for (NodeId s : instance.seeds) out.node_probs[s] = 1.0;
    for (double p : out.node_probs) out.sigma += p;
    return out;
}

InfluenceEstimate exact_estimate(const ProblemInstance& instance, std::size_t max_edges) {
    const ExactInfluence exact = exact_influence(instance, max_edges);
    InfluenceEstimate est;
    est.sigma = exact.sigma;
    est.sigma_normalized = exact.sigma / static_cast<double>(instance.graph.node_count());
    est.std_error = 0.0;
    est.method = EstimateMethod::exact;
    return est;
}

std::vector<bool> reachable_from_seeds(const ProblemInstance& instance) {
    const Graph& g = instance.graph;
    std::vector<bool> seen(g.node_count(), false);
    std::vector<NodeId> stack(instance.seeds.begin(), instance.seeds.end());
    for (NodeId s : stack) seen[s] = true;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (EdgeIndex e : g.out_edges(v)) {
            const NodeId u = g.edges()[e].dst;
            if (!seen[u]) {
                seen[u] = true;
                stack.push_back(u);
            }
        }
    }
    return seen;
}

}  // namespace qcm
