#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qcm/containment.hpp"
#include "qcm/random.hpp"

/// Grover search and Durr-Hoyer minimum finding.
namespace qcm::gmf {

enum class Backend { statevector, analytic };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view text);

using MarkedPredicate = std::function<bool(std::size_t)>;

struct GroverRun {
    std::optional<std::size_t> found_index;
    int iterations_used = 0;
    std::uint64_t oracle_calls = 0;  // one per iteration
    Backend backend = Backend::analytic;
};

/// Next power of two >= n, and at least 2.
std::size_t padded_size(std::size_t n_items);

/// sin^2((2k + 1) asin(sqrt(M / N))).
double grover_success_probability(std::size_t n_padded, std::size_t marked_count, int iterations);

/// Marked-state probability mass after (D O_f)^iterations on the padded space.
double statevector_success_probability(std::size_t n_items, const MarkedPredicate& marked, int iterations);

/// Padded indices are never marked; a measurement that lands on one is
/// redrawn, so both backends sample from the distribution conditioned on
/// a real index. Throws std::invalid_argument for n_items == 0 or
/// negative iterations.
GroverRun grover_search(std::size_t n_items, const MarkedPredicate& marked, int iterations, SplitMix64& rng,
                        Backend backend);
GroverRun grover_search(std::size_t n_items, const MarkedPredicate& marked, int iterations, std::uint64_t rng_seed,
                        Backend backend);

/// All searches made against one threshold.
struct MinFindRound {
    double threshold = 0.0;
    std::vector<GroverRun> attempts;
};

struct MinFindResult {
    std::size_t min_index = 0;
    double min_value = 0.0;
    std::uint64_t total_oracle_calls = 0;  // Grover iterations plus one per accepted update
    std::vector<MinFindRound> rounds;       // thresholds strictly decreasing
};

struct MinFindOptions {
    Backend backend = Backend::analytic;
    double budget_factor = 4.0;  // budget = ceil(budget_factor * sqrt(N))
    double growth = 8.0 / 7.0;
    int max_failed_full_rounds = 5;
    std::optional<std::uint64_t> call_budget;  // overrides budget_factor
};

using ValueAccessor = std::function<double(std::size_t)>;

MinFindResult durr_hoyer_min(const ValueAccessor& values, std::size_t n_items, std::uint64_t rng_seed,
                             const MinFindOptions& options = {});
MinFindResult durr_hoyer_min(std::span<const double> values, std::uint64_t rng_seed,
                             const MinFindOptions& options = {});

/// Finder for greedy_contain. Invocation i uses substream(rng_seed, i).
Finder gmf_edge_finder(std::uint64_t rng_seed, const MinFindOptions& options = {});

}  // namespace qcm::gmf
