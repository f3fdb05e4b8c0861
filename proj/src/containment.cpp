#include "qcm/containment.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace qcm {

RunAccounting& RunAccounting::operator+=(const RunAccounting& other) {
    mc_trials += other.mc_trials;
    a_applications += other.a_applications;
    q_applications += other.q_applications;
    grover_oracle_calls += other.grover_oracle_calls;
    linear_steps += other.linear_steps;
    diffusion_simulations += other.diffusion_simulations;
    return *this;
}

void charge(RunAccounting& accounting, const InfluenceEstimate& estimate) {
    switch (estimate.method) {
        case EstimateMethod::monte_carlo:
            accounting.mc_trials += estimate.trials_or_calls;
            accounting.diffusion_simulations += estimate.trials_or_calls;
            break;
        case EstimateMethod::qae:
            accounting.q_applications += estimate.trials_or_calls;
            accounting.a_applications += estimate.a_applications;
            break;
        case EstimateMethod::exact:
            break;
    }
}

double operational_impact(std::span<const EdgeIndex> edges, const Graph& graph) {
    std::set<std::size_t> links;
    double total = 0.0;
    for (EdgeIndex e : edges) {
        if (e >= graph.edge_count())
            throw std::out_of_range("edge index " + std::to_string(e) + " out of range");
        const Edge& edge = graph.edges()[e];
        if (links.insert(edge.link).second) total += edge.importance;
    }
    return total;
}

ObjectiveValue objective(const ProblemInstance& instance, std::span<const EdgeIndex> removal,
                         double sigma) {
    ObjectiveValue v;
    v.sigma_used = sigma;
    v.oi_used = operational_impact(removal, instance.graph);
    v.influence_term = instance.lambda * sigma;
    v.impact_term = (1.0 - instance.lambda) * v.oi_used;
    v.total = v.influence_term + v.impact_term;
    return v;
}

std::string_view to_string(CandidateStrategy strategy) {
    switch (strategy) {
        case CandidateStrategy::all: return "all";
        case CandidateStrategy::frontier: return "frontier";
        case CandidateStrategy::top_p: return "top_p";
    }
    return "unknown";
}

CandidateStrategy parse_candidate_strategy(std::string_view text) {
    if (text == "all") return CandidateStrategy::all;
    if (text == "frontier") return CandidateStrategy::frontier;
    if (text == "top_p" || text == "top-p") return CandidateStrategy::top_p;
    throw std::invalid_argument("unknown candidate strategy '" + std::string(text) + "'");
}

CandidateSet candidate_edges(const ProblemInstance& instance, const CandidateOptions& options) {
    const Graph& g = instance.graph;
    CandidateSet representatives;
    representatives.reserve(g.link_count());
    for (std::size_t l = 0; l < g.link_count(); ++l) representatives.push_back(g.link_arcs(l).front());

    switch (options.strategy) {
        case CandidateStrategy::all:
            break;
        case CandidateStrategy::frontier: {
            const auto reach = reachable_from_seeds(instance);
            std::erase_if(representatives, [&](EdgeIndex e) {
                for (EdgeIndex arc : g.link_arcs(g.edges()[e].link))
                    if (reach[g.edges()[arc].src]) return false;
                return true;
            });
            break;
        }
        case CandidateStrategy::top_p: {
            std::stable_sort(representatives.begin(), representatives.end(),
                             [&](EdgeIndex a, EdgeIndex b) { return g.edges()[a].p > g.edges()[b].p; });
            if (representatives.size() > options.top_count) representatives.resize(options.top_count);
            break;
        }
    }
    std::sort(representatives.begin(), representatives.end());
    return representatives;
}

Finder linear_finder() {
    return [](std::span<const double> scores, RunAccounting& accounting) -> std::size_t {
        if (scores.empty()) throw std::invalid_argument("linear_finder: no candidates");
        accounting.linear_steps += scores.size();
        std::size_t best = 0;
        for (std::size_t i = 1; i < scores.size(); ++i)
            if (scores[i] < scores[best]) best = i;
        return best;
    };
}

namespace {

double improvement_tolerance(const InfluenceEstimate& a, const InfluenceEstimate& b, double exact_tol) {
    if (a.method == EstimateMethod::exact && b.method == EstimateMethod::exact) return exact_tol;
    const double se = std::max(a.std_error.value_or(0.0), b.std_error.value_or(0.0));
    return std::max(exact_tol, 2.0 * se);
}

}  // namespace

ContainmentPlan greedy_contain(const ProblemInstance& instance, const Estimator& estimator,
                               const Finder& finder, const GreedyOptions& options) {
    if (options.k_max < 0) throw std::invalid_argument("k_max must be non-negative");
    validate(instance);

    ContainmentPlan plan;
    if (options.k_max == 0) return plan;

    const Graph& original = instance.graph;
    InfluenceEstimate current_estimate;
    try {
        current_estimate = estimator(instance);
    } catch (const std::exception& ex) {
        throw EstimatorError(std::string("estimating the unmodified graph: ") + ex.what());
    }
    charge(plan.accounting, current_estimate);
    plan.initial = objective(instance, plan.removed, current_estimate.sigma);
    ObjectiveValue current = plan.initial;

    for (int k = 1; k <= options.k_max; ++k) {
        const ProblemInstance reduced = with_graph(instance, remove_edges(original, plan.removed));
        const CandidateSet candidates = candidate_edges(reduced, options.candidates);
        if (candidates.empty()) break;

        std::vector<EdgeIndex> original_index;
        std::vector<double> scores;
        std::vector<ObjectiveValue> values;
        std::vector<InfluenceEstimate> estimates;
        for (EdgeIndex c : candidates) {
            const Edge& arc = reduced.graph.edges()[c];
            const EdgeIndex orig = original.find_edge(arc.src, arc.dst);
            std::vector<EdgeIndex> trial = plan.removed;
            trial.push_back(orig);
            InfluenceEstimate est;
            try {
                est = estimator(with_graph(instance, remove_edges(original, trial)));
            } catch (const std::exception& ex) {
                throw EstimatorError("estimating candidate edge " + std::to_string(orig) + " (" +
                                     std::to_string(arc.src) + "->" + std::to_string(arc.dst) +
                                     "): " + ex.what());
            }
            charge(plan.accounting, est);
            original_index.push_back(orig);
            values.push_back(objective(instance, trial, est.sigma));
            scores.push_back(values.back().total);
            estimates.push_back(est);
        }

        const std::size_t pick = finder(scores, plan.accounting);
        if (pick >= scores.size()) throw std::logic_error("finder returned an out-of-range position");

        const double tol = improvement_tolerance(current_estimate, estimates[pick], options.exact_tolerance);
        if (!(values[pick].total < current.total - tol)) break;

        plan.removed.push_back(original_index[pick]);
        plan.trace.push_back({k, original_index[pick], values[pick]});
        current = values[pick];
        current_estimate = estimates[pick];
    }
    return plan;
}

}  // namespace qcm
