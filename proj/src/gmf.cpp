#include "qcm/gmf.hpp"

#include <bit>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qcm/qsim.hpp"

namespace qcm::gmf {

std::string_view to_string(Backend backend) {
    return backend == Backend::statevector ? "statevector" : "analytic";
}

Backend parse_backend(std::string_view text) {
    if (text == "statevector") return Backend::statevector;
    if (text == "analytic") return Backend::analytic;
    throw std::invalid_argument("unknown backend '" + std::string(text) + "'");
}

std::size_t padded_size(std::size_t n_items) { return std::max<std::size_t>(2, std::bit_ceil(n_items)); }

double grover_success_probability(std::size_t n_padded, std::size_t marked_count, int iterations) {
    if (n_padded == 0 || marked_count > n_padded) throw std::invalid_argument("invalid Grover problem size");
    if (iterations < 0) throw std::invalid_argument("iterations must be non-negative");
    const double theta = std::asin(std::sqrt(static_cast<double>(marked_count) / static_cast<double>(n_padded)));
    const double s = std::sin((2.0 * iterations + 1.0) * theta);
    return s * s;
}

namespace {

void check_search(std::size_t n_items, int iterations) {
    if (n_items == 0) throw std::invalid_argument("grover_search: n_items must be >= 1");
    if (iterations < 0) throw std::invalid_argument("grover_search: iterations must be non-negative");
}

qsim::StateVector evolve(std::size_t n_items, const MarkedPredicate& marked, int iterations) {
    const std::size_t npad = padded_size(n_items);
    const int n_qubits = std::countr_zero(npad);
    qsim::StateVector state(n_qubits);
    std::vector<int> all(n_qubits);
    std::iota(all.begin(), all.end(), 0);
    for (int q : all) qsim::apply_h(state.amplitudes(), q);
    std::vector<char> is_marked(npad, 0);
    for (std::size_t i = 0; i < n_items; ++i) is_marked[i] = marked(i) ? 1 : 0;
    for (int k = 0; k < iterations; ++k) {
        qsim::apply_phase_flip_if(state.amplitudes(), [&](std::uint64_t i) { return is_marked[i] != 0; });
        qsim::diffusion(state, all);
    }
    return state;
}

}  // namespace

double statevector_success_probability(std::size_t n_items, const MarkedPredicate& marked, int iterations) {
    check_search(n_items, iterations);
    const qsim::StateVector state = evolve(n_items, marked, iterations);
    double total = 0.0;
    for (std::size_t i = 0; i < n_items; ++i)
        if (marked(i)) total += std::norm(state[i]);
    return total;
}

GroverRun grover_search(std::size_t n_items, const MarkedPredicate& marked, int iterations, SplitMix64& rng,
                        Backend backend) {
    check_search(n_items, iterations);
    GroverRun run;
    run.iterations_used = iterations;
    run.oracle_calls = static_cast<std::uint64_t>(iterations);
    run.backend = backend;

    if (backend == Backend::statevector) {
        const qsim::StateVector state = evolve(n_items, marked, iterations);
        std::vector<double> probs(n_items);
        double total = 0.0;
        for (std::size_t i = 0; i < n_items; ++i) total += probs[i] = std::norm(state[i]);
        if (total <= 0.0) return run;
        const std::size_t outcome = sample_discrete(rng, probs);
        if (marked(outcome)) run.found_index = outcome;
        return run;
    }

    std::vector<std::size_t> marked_items;
    for (std::size_t i = 0; i < n_items; ++i)
        if (marked(i)) marked_items.push_back(i);
    const std::size_t npad = padded_size(n_items);
    const std::size_t m = marked_items.size();
    const double p_marked = grover_success_probability(npad, m, iterations);
    // Unmarked mass is spread evenly over the npad - m unmarked indices;
    // only the real ones among them survive the redraw.
    const double p_real_unmarked =
        m < npad ? (1.0 - p_marked) * static_cast<double>(n_items - m) / static_cast<double>(npad - m) : 0.0;
    const double total = p_marked + p_real_unmarked;
    if (m == 0 || total <= 0.0) return run;
    if (uniform01(rng) * total < p_marked) run.found_index = marked_items[uniform_below(rng, m)];
    return run;
}

GroverRun grover_search(std::size_t n_items, const MarkedPredicate& marked, int iterations, std::uint64_t rng_seed,
                        Backend backend) {
    SplitMix64 rng(rng_seed);
    return grover_search(n_items, marked, iterations, rng, backend);
}

MinFindResult durr_hoyer_min(const ValueAccessor& values, std::size_t n_items, std::uint64_t rng_seed,
                             const MinFindOptions& options) {
    if (n_items == 0) throw std::invalid_argument("durr_hoyer_min: n_items must be >= 1");
    if (!(options.growth > 1.0)) throw std::invalid_argument("durr_hoyer_min: growth must exceed 1");
    SplitMix64 rng(rng_seed);

    MinFindResult result;
    std::size_t best = n_items == 1 ? 0 : uniform_below(rng, n_items);
    double best_value = values(best);
    result.rounds.push_back({best_value, {}});
    if (n_items == 1) {
        result.min_index = best;
        result.min_value = best_value;
        return result;
    }

    const double sqrt_n = std::sqrt(static_cast<double>(n_items));
    const std::uint64_t budget = options.call_budget.value_or(
        static_cast<std::uint64_t>(std::ceil(options.budget_factor * sqrt_n)));
    const auto depth_cap = static_cast<std::uint64_t>(
        std::ceil(std::numbers::pi / 4.0 * std::sqrt(static_cast<double>(padded_size(n_items)))));

    std::uint64_t calls = 0;
    int failures = 0;         // since the last improvement
    int failed_full = 0;      // consecutive failures with the schedule at depth_cap
    while (calls < budget) {
        const double grown = std::ceil(std::pow(options.growth, failures));
        const std::uint64_t limit = grown >= static_cast<double>(depth_cap) ? depth_cap
                                                                            : static_cast<std::uint64_t>(grown);
        const std::uint64_t k = std::min(uniform_below(rng, limit + 1), budget - calls);
        const double threshold = best_value;
        GroverRun run = grover_search(
            n_items, [&](std::size_t i) { return values(i) < threshold; }, static_cast<int>(k), rng,
            options.backend);
        calls += run.oracle_calls;
        result.rounds.back().attempts.push_back(run);

        if (run.found_index) {
            best = *run.found_index;
            best_value = values(best);
            ++calls;  // classical verification of the new candidate
            failures = 0;
            failed_full = 0;
            result.rounds.push_back({best_value, {}});
        } else {
            ++failures;
            if (limit == depth_cap && ++failed_full >= options.max_failed_full_rounds) break;
        }
    }
    if (result.rounds.back().attempts.empty() && result.rounds.size() > 1) result.rounds.pop_back();

    result.min_index = best;
    result.min_value = best_value;
    result.total_oracle_calls = calls;
    return result;
}

MinFindResult durr_hoyer_min(std::span<const double> values, std::uint64_t rng_seed, const MinFindOptions& options) {
    return durr_hoyer_min([values](std::size_t i) { return values[i]; }, values.size(), rng_seed, options);
}

Finder gmf_edge_finder(std::uint64_t rng_seed, const MinFindOptions& options) {
    auto invocation = std::make_shared<std::uint64_t>(0);
    return [rng_seed, options, invocation](std::span<const double> scores, RunAccounting& accounting) {
        if (scores.empty()) throw std::invalid_argument("gmf finder: no candidates");
        const MinFindResult r = durr_hoyer_min(scores, substream(rng_seed, (*invocation)++)(), options);
        accounting.grover_oracle_calls += r.total_oracle_calls;
        return r.min_index;
    };
}

}  // namespace qcm::gmf
