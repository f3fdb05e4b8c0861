#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "qcm/cascade.hpp"
#include "qcm/containment.hpp"
#include "qcm/gmf.hpp"
#include "qcm/graph.hpp"
#include "qcm/qae.hpp"

namespace qcm::cli {

namespace {

/// Bad flags or missing inputs detected after parsing.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::size_t kReferenceEdgeCap = 20;

struct Globals {
    std::uint64_t rng = 0;
    std::string out;
    std::string instance;
};

std::string fmt(double x) { return format_double(x); }

ProblemInstance require_instance(const Globals& g) {
    if (g.instance.empty()) throw UsageError("--instance <path> is required");
    return load_instance(g.instance);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("failed writing '" + path + "'");
}

/// Main command output goes to --out when given, otherwise to stdout.
void emit(const Globals& g, const std::string& text, std::ostream& out) {
    if (g.out.empty())
        out << text;
    else
        write_file(g.out, text);
}

// gen ---------------------------------------------------------------------

struct GenArgs {
    GeneratorParams params;
};

void run_gen(const Globals& g, GenArgs args, std::ostream& out, std::ostream& err) {
    args.params.rng_seed = g.rng;
    const ProblemInstance inst = generate_random_instance(args.params);
    emit(g, serialize_instance(inst), out);
    std::ostream& summary = g.out.empty() ? err : out;
    summary << "generated instance: nodes " << inst.graph.node_count() << ", edges " << inst.graph.link_count()
            << ", seeds " << inst.seeds.size() << "\n";
}

// estimate ----------------------------------------------------------------

struct EstimateArgs {
    std::string method = "exact";
    std::uint64_t trials = 10000;
    double epsilon = 0.05;
    int m = 0;
    bool analytic = false;
    std::string csv;
};

struct EstimatorArgs {
    std::string method;
    std::uint64_t trials;
    double epsilon;
    bool analytic;
};

Estimator make_estimator(const EstimatorArgs& a, std::uint64_t seed) {
    if (a.method == "exact") return [](const ProblemInstance& inst) { return exact_estimate(inst); };
    if (a.method == "mc") {
        if (a.trials == 0) throw UsageError("--trials must be positive");
        return [trials = a.trials, seed](const ProblemInstance& inst) { return mc_influence(inst, trials, seed); };
    }
    if (a.method == "qae") {
        qae::qae_evaluation_qubits(a.epsilon);  // validates epsilon
        const auto mode = a.analytic ? qae::QaeMode::analytic : qae::QaeMode::statevector;
        return [eps = a.epsilon, seed, mode](const ProblemInstance& inst) {
            return qae::qae_influence(inst, {}, eps, seed, mode);
        };
    }
    throw UsageError("unknown estimator '" + a.method + "' (expected exact, mc or qae)");
}

void run_estimate(const Globals& g, const EstimateArgs& args, std::ostream& out) {
    const ProblemInstance inst = require_instance(g);
    const double n = static_cast<double>(inst.graph.node_count());

    InfluenceEstimate est;
    std::string detail;
    if (args.method == "qae" && args.m > 0) {
        const auto mode = args.analytic ? qae::QaeMode::analytic : qae::QaeMode::statevector;
        const qae::AmplitudeEstimate a = qae::qae_estimate(inst, {}, args.m, g.rng, mode);
        est.sigma_normalized = a.a_hat;
        est.sigma = a.a_hat * n;
        est.std_error = qae::qpe_error_bound(args.m) * n;
        est.trials_or_calls = a.q_applications;
        est.a_applications = a.a_applications;
        est.method = EstimateMethod::qae;
        detail = "m " + std::to_string(args.m) + ", mode " + std::string(qae::to_string(mode));
    } else {
        est = make_estimator({args.method, args.trials, args.epsilon, args.analytic}, g.rng)(inst);
        if (args.method == "mc") detail = "trials " + std::to_string(args.trials);
        if (args.method == "qae")
            detail = "epsilon " + fmt(args.epsilon) + ", m " + std::to_string(qae::qae_evaluation_qubits(args.epsilon)) +
                     ", median of 3, mode " + (args.analytic ? "analytic" : "statevector");
    }

    std::optional<double> reference;
    if (inst.graph.edge_count() <= kReferenceEdgeCap) reference = exact_influence(inst).sigma;

    std::ostringstream text;
    text << "method: " << to_string(est.method) << "\n";
    if (!detail.empty()) text << "parameters: " << detail << "\n";
    text << "sigma: " << fmt(est.sigma) << "\n";
    text << "sigma_normalized: " << fmt(est.sigma_normalized) << "\n";
    if (est.std_error) text << "std_error: " << fmt(*est.std_error) << "\n";
    text << "work_units: " << est.trials_or_calls << "\n";
    if (est.method == EstimateMethod::qae) text << "a_applications: " << est.a_applications << "\n";
    if (reference) {
        const double abs_err = std::abs(est.sigma - *reference);
        text << "reference_sigma: " << fmt(*reference) << "\n";
        text << "relative_error: " << fmt(*reference > 0 ? abs_err / *reference : 0.0) << "\n";
        text << "normalized_error: " << fmt(abs_err / n) << "\n";
    }
    emit(g, text.str(), out);

    if (!args.csv.empty()) {
        std::ostringstream csv;
        csv << "method,sigma,sigma_normalized,std_error,work_units,a_applications,reference_sigma,rng_seed\n";
        csv << to_string(est.method) << ',' << fmt(est.sigma) << ',' << fmt(est.sigma_normalized) << ','
            << (est.std_error ? fmt(*est.std_error) : "") << ',' << est.trials_or_calls << ','
            << est.a_applications << ',' << (reference ? fmt(*reference) : "") << ',' << g.rng << "\n";
        write_file(args.csv, csv.str());
    }
}

// contain -----------------------------------------------------------------

struct ContainArgs {
    std::string estimator = "exact";
    std::uint64_t trials = 10000;
    double epsilon = 0.05;
    bool analytic = false;
    std::string finder = "linear";
    std::string backend = "analytic";
    std::string candidates = "all";
    std::size_t top_count = 8;
    int k_max = 1;
    std::string csv;
};

void run_contain(const Globals& g, const ContainArgs& args, std::ostream& out) {
    const ProblemInstance inst = require_instance(g);
    if (args.k_max < 0) throw UsageError("--k-max must be non-negative");

    // Every estimator call reuses the same seed (common random numbers),
    // so candidate comparisons are not swamped by independent noise.
    const Estimator estimator =
        make_estimator({args.estimator, args.trials, args.epsilon, args.analytic}, g.rng);
    Finder finder;
    if (args.finder == "linear") {
        finder = linear_finder();
    } else if (args.finder == "gmf") {
        gmf::MinFindOptions finder_options;
        finder_options.backend = gmf::parse_backend(args.backend);
        finder = gmf::gmf_edge_finder(g.rng, finder_options);
    } else {
        throw UsageError("unknown finder '" + args.finder + "' (expected linear or gmf)");
    }

    GreedyOptions options;
    options.k_max = args.k_max;
    options.candidates.strategy = parse_candidate_strategy(args.candidates);
    options.candidates.top_count = args.top_count;
    const ContainmentPlan plan = greedy_contain(inst, estimator, finder, options);

    const Graph& graph = inst.graph;
    std::ostringstream text;
    text << "estimator: " << args.estimator << ", finder: " << args.finder << ", candidates: " << args.candidates
         << ", k_max: " << args.k_max << "\n";
    text << "initial objective: " << fmt(plan.initial.total) << " (sigma " << fmt(plan.initial.sigma_used)
         << ")\n";
    text << "k,edge,src,dst,objective,sigma,operational_impact\n";
    for (const PlanStep& step : plan.trace) {
        const Edge& e = graph.edge(step.edge);
        text << step.iteration << ',' << step.edge << ',' << e.src << ',' << e.dst << ',' << fmt(step.value.total)
             << ',' << fmt(step.value.sigma_used) << ',' << fmt(step.value.oi_used) << "\n";
    }
    const ObjectiveValue& final_value = plan.trace.empty() ? plan.initial : plan.trace.back().value;
    text << "removed edges: " << plan.removed.size() << "\n";
    text << "final objective: " << fmt(final_value.total) << "\n";
    const RunAccounting& a = plan.accounting;
    text << "accounting: mc_trials " << a.mc_trials << ", a_applications " << a.a_applications
         << ", q_applications " << a.q_applications << ", grover_oracle_calls " << a.grover_oracle_calls
         << ", linear_steps " << a.linear_steps << ", diffusion_simulations " << a.diffusion_simulations << "\n";
    emit(g, text.str(), out);

    if (!args.csv.empty()) {
        std::ostringstream csv;
        csv << "# initial_objective=" << fmt(plan.initial.total) << "\n";
        csv << "# grover_oracle_calls=" << a.grover_oracle_calls << " linear_steps=" << a.linear_steps
            << " mc_trials=" << a.mc_trials << " q_applications=" << a.q_applications << "\n";
        csv << "k,edge,src,dst,objective,sigma,operational_impact\n";
        for (const PlanStep& step : plan.trace) {
            const Edge& e = graph.edge(step.edge);
            csv << step.iteration << ',' << step.edge << ',' << e.src << ',' << e.dst << ','
                << fmt(step.value.total) << ',' << fmt(step.value.sigma_used) << ',' << fmt(step.value.oi_used)
                << "\n";
        }
        write_file(args.csv, csv.str());
    }
}

// benchmarks --------------------------------------------------------------

struct BenchRow {
    std::string method;
    std::uint64_t work_units;
    std::uint64_t rng_seed;
    std::string rest;  // remaining columns, already formatted

    auto key() const { return std::tie(method, work_units, rng_seed, rest); }
};

void sort_rows(std::vector<BenchRow>& rows) {
    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) { return a.key() < b.key(); });
}

struct BenchEstimationArgs {
    std::vector<std::uint64_t> trials_grid{100, 400, 1600, 6400};
    std::vector<int> m_grid{4, 6, 8, 10};
    std::uint64_t reps = 50;
    bool statevector = false;
};

void run_bench_estimation(const Globals& g, const BenchEstimationArgs& args, std::ostream& out) {
    const ProblemInstance inst = require_instance(g);
    if (args.reps == 0) throw UsageError("--reps must be positive");
    const double n = static_cast<double>(inst.graph.node_count());
    const double truth = exact_influence(inst).sigma;  // throws on oversized instances
    const double a_true = truth / n;
    const auto mode = args.statevector ? qae::QaeMode::statevector : qae::QaeMode::analytic;

    std::vector<BenchRow> rows;
    for (std::uint64_t trials : args.trials_grid) {
        if (trials == 0) throw UsageError("trial counts must be positive");
        for (std::uint64_t r = 0; r < args.reps; ++r) {
            const std::uint64_t seed = g.rng + r;
            const double err = std::abs(mc_influence(inst, trials, seed).sigma - truth) / n;
            rows.push_back({"mc", trials, seed, fmt(err)});
        }
    }
    for (int m : args.m_grid) {
        const auto dist = qae::qae_outcome_distribution(inst, {}, m, mode);
        for (std::uint64_t r = 0; r < args.reps; ++r) {
            const std::uint64_t seed = g.rng + r;
            const qae::AmplitudeEstimate est = qae::sample_estimate(dist, m, seed, mode);
            rows.push_back({"qae", est.q_applications, seed, fmt(std::abs(est.a_hat - a_true))});
        }
    }
    sort_rows(rows);

    std::ostringstream csv;
    csv << "# bench-estimation nodes=" << inst.graph.node_count() << " edges=" << inst.graph.edge_count()
        << " seeds=" << inst.seeds.size() << " lambda=" << fmt(inst.lambda) << "\n";
    csv << "# exact_sigma=" << fmt(truth) << " reps=" << args.reps << " qae_mode=" << qae::to_string(mode) << "\n";
    csv << "# work_units: mc = independent cascade trials; qae = Q applications in one phase estimation (2^m - 1)\n";
    csv << "# error = |estimate - exact| / |V|; rng_seed = --rng + repetition\n";
    csv << "method,work_units,error,rng_seed\n";
    for (const BenchRow& row : rows) csv << row.method << ',' << row.work_units << ',' << row.rest << ',' << row.rng_seed << "\n";
    emit(g, csv.str(), out);
}

struct BenchMinfindArgs {
    std::vector<std::size_t> sizes{4, 16, 64, 256};
    std::uint64_t reps = 50;
    std::string backend = "analytic";
};

void run_bench_minfind(const Globals& g, const BenchMinfindArgs& args, std::ostream& out) {
    if (args.reps == 0) throw UsageError("--reps must be positive");
    gmf::MinFindOptions options;
    options.backend = gmf::parse_backend(args.backend);

    std::vector<BenchRow> rows;
    for (std::size_t n : args.sizes) {
        if (n == 0) throw UsageError("list sizes must be positive");
        for (std::uint64_t r = 0; r < args.reps; ++r) {
            const std::uint64_t seed = g.rng + r;
            SplitMix64 list_rng = substream(seed, 2 * n);
            std::vector<double> values(n);
            for (double& v : values) v = uniform01(list_rng);
            const double true_min = *std::min_element(values.begin(), values.end());
            const gmf::MinFindResult res = gmf::durr_hoyer_min(values, substream(seed, 2 * n + 1)(), options);
            const std::string size = std::to_string(n);
            rows.push_back({"gmf", res.total_oracle_calls, seed,
                            size + ',' + std::to_string(res.total_oracle_calls) + ',' + fmt(res.min_value) + ',' +
                                fmt(true_min)});
            rows.push_back({"linear", n, seed,
                            size + ',' + std::to_string(n) + ',' + fmt(true_min) + ',' + fmt(true_min)});
        }
    }
    // Sort by method, then list size, then seed.
    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
        const auto size_of = [](const BenchRow& r) { return std::stoull(r.rest.substr(0, r.rest.find(','))); };
        return std::make_tuple(a.method, size_of(a), a.rng_seed) < std::make_tuple(b.method, size_of(b), b.rng_seed);
    });

    std::ostringstream csv;
    csv << "# bench-minfind reps=" << args.reps << " backend=" << args.backend << "\n";
    csv << "# work_units: linear = comparisons (N); gmf = Grover oracle calls plus one per accepted candidate\n";
    csv << "# values uniform in [0,1); rng_seed = --rng + repetition\n";
    csv << "method,n_items,work_units,found_value,true_min,rng_seed\n";
    for (const BenchRow& row : rows) csv << row.method << ',' << row.rest << ',' << row.rng_seed << "\n";
    emit(g, csv.str(), out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Malware containment by influence minimisation: classical and quantum-simulated pipelines", "qcm"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--rng", g.rng, "Random seed (u64)");
    app.add_option("--out", g.out, "Write the main output to this file instead of stdout");
    app.add_option("--instance", g.instance, "Instance file");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance");
    gen_cmd->add_option("--nodes", gen.params.n_nodes, "Node count")->capture_default_str();
    gen_cmd->add_option("--edge-prob", gen.params.edge_prob, "Probability of each possible edge")->capture_default_str();
    gen_cmd->add_option("--p-min", gen.params.p_min)->capture_default_str();
    gen_cmd->add_option("--p-max", gen.params.p_max)->capture_default_str();
    gen_cmd->add_option("--i-min", gen.params.i_min)->capture_default_str();
    gen_cmd->add_option("--i-max", gen.params.i_max)->capture_default_str();
    gen_cmd->add_option("--seeds", gen.params.n_seeds, "Number of seed nodes")->capture_default_str();
    gen_cmd->add_option("--lambda", gen.params.lambda, "Objective weight on influence")->capture_default_str();
    gen_cmd->add_flag("--undirected", gen.params.undirected);

    EstimateArgs est;
    auto* est_cmd = app.add_subcommand("estimate", "Estimate expected influence");
    est_cmd->add_option("--method", est.method, "exact | mc | qae")->capture_default_str();
    est_cmd->add_option("--trials", est.trials, "Monte Carlo trials")->capture_default_str();
    est_cmd->add_option("--epsilon", est.epsilon, "QAE target error (normalised influence)")->capture_default_str();
    est_cmd->add_option("--m", est.m, "QAE evaluation qubits; single run, overrides --epsilon");
    est_cmd->add_flag("--analytic", est.analytic, "QAE without a statevector");
    est_cmd->add_option("--csv", est.csv, "Also write a CSV row to this file");

    ContainArgs con;
    auto* con_cmd = app.add_subcommand("contain", "Greedy edge removal");
    con_cmd->add_option("--estimator", con.estimator, "exact | mc | qae")->capture_default_str();
    con_cmd->add_option("--trials", con.trials)->capture_default_str();
    con_cmd->add_option("--epsilon", con.epsilon)->capture_default_str();
    con_cmd->add_flag("--analytic", con.analytic);
    con_cmd->add_option("--finder", con.finder, "linear | gmf")->capture_default_str();
    con_cmd->add_option("--backend", con.backend, "GMF backend: analytic | statevector")->capture_default_str();
    con_cmd->add_option("--candidates", con.candidates, "all | frontier | top_p")->capture_default_str();
    con_cmd->add_option("--top-count", con.top_count)->capture_default_str();
    con_cmd->add_option("--k-max", con.k_max, "Maximum removals")->capture_default_str();
    con_cmd->add_option("--csv", con.csv, "Also write the trace as CSV");

    BenchEstimationArgs be;
    auto* be_cmd = app.add_subcommand("bench-estimation", "MC versus QAE error against the exact oracle");
    be_cmd->add_option("--trials-grid", be.trials_grid)->delimiter(',')->capture_default_str();
    be_cmd->add_option("--m-grid", be.m_grid)->delimiter(',')->capture_default_str();
    be_cmd->add_option("--reps", be.reps, "Repetitions per grid point")->capture_default_str();
    be_cmd->add_flag("--statevector", be.statevector, "QAE via full statevector instead of the analytic path");

    BenchMinfindArgs bm;
    auto* bm_cmd = app.add_subcommand("bench-minfind", "Linear scan versus Grover minimum finding");
    bm_cmd->add_option("--sizes", bm.sizes)->delimiter(',')->capture_default_str();
    bm_cmd->add_option("--reps", bm.reps)->capture_default_str();
    bm_cmd->add_option("--backend", bm.backend, "analytic | statevector")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen_cmd) run_gen(g, gen, out, err);
        else if (*est_cmd) run_estimate(g, est, out);
        else if (*con_cmd) run_contain(g, con, out);
        else if (*be_cmd) run_bench_estimation(g, be, out);
        else if (*bm_cmd) run_bench_minfind(g, bm, out);
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        err << "error: " << g.instance << ": " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::length_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace qcm::cli
