#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcm {

using NodeId = std::uint32_t;
using EdgeIndex = std::size_t;

/// Edge indices into `Graph::edges()`.
using CandidateSet = std::vector<EdgeIndex>;

/// A directed arc. In an undirected graph every connection is stored as two
/// arcs sharing the same `link` id, p and importance.
struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    double p = 0.0;           // activation probability
    double importance = 0.0;  // operational importance
    std::size_t link = 0;     // logical connection id, dense in [0, link_count)

    bool operator==(const Edge&) const = default;
};

/// One connection as written in an instance file.
struct EdgeSpec {
    NodeId src = 0;
    NodeId dst = 0;
    double p = 0.0;
    double importance = 0.0;
};

/// Immutable directed graph with per-arc activation probability and
/// operational importance.
class Graph {
public:
    Graph() = default;

    /// Validates and builds. Undirected graphs expand each spec into two arcs.
    /// Throws std::invalid_argument on self-loops, duplicates, out-of-range
    /// node ids or values outside [0, 1].
    Graph(std::size_t node_count, std::span<const EdgeSpec> specs, bool undirected = false);

    std::size_t node_count() const noexcept { return node_count_; }
    bool undirected() const noexcept { return undirected_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::size_t link_count() const noexcept { return link_count_; }

    /// Indices of arcs leaving `v`, ascending.
    std::span<const EdgeIndex> out_edges(NodeId v) const;

    /// Arcs belonging to logical connection `link`, ascending.
    std::span<const EdgeIndex> link_arcs(std::size_t link) const;

    /// Index of the arc src->dst, or `npos` when absent.
    EdgeIndex find_edge(NodeId src, NodeId dst) const noexcept;

    /// One spec per logical connection, in link order.
    std::vector<EdgeSpec> specs() const;

    static constexpr EdgeIndex npos = static_cast<EdgeIndex>(-1);

    bool operator==(const Graph& other) const {
        return node_count_ == other.node_count_ && undirected_ == other.undirected_ &&
               edges_ == other.edges_;
    }

private:
    void build_index();

    std::size_t node_count_ = 0;
    bool undirected_ = false;
    std::vector<Edge> edges_;
    std::size_t link_count_ = 0;
    // CSR adjacency over outgoing arcs
    std::vector<std::size_t> out_offsets_;
    std::vector<EdgeIndex> out_arcs_;
    std::vector<std::size_t> link_offsets_;
    std::vector<EdgeIndex> link_arc_list_;
};

struct ProblemInstance {
    Graph graph;
    std::vector<NodeId> seeds;  // sorted, distinct, non-empty
    double lambda = 1.0;

    bool operator==(const ProblemInstance&) const = default;
};

/// Checks seeds and lambda against the graph. Throws std::invalid_argument.
void validate(const ProblemInstance& instance);

/// Returns `instance` with `graph` replaced.
ProblemInstance with_graph(const ProblemInstance& instance, Graph graph);

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

ProblemInstance parse_instance(std::string_view text);
std::string serialize_instance(const ProblemInstance& instance);

ProblemInstance load_instance(const std::filesystem::path& path);
void save_instance(const ProblemInstance& instance, const std::filesystem::path& path);

/// G \ E'. Removing any arc of an undirected connection removes the whole
/// connection. Throws std::out_of_range on an invalid index.
Graph remove_edges(const Graph& graph, std::span<const EdgeIndex> removal);

struct GeneratorParams {
    std::size_t n_nodes = 10;
    double edge_prob = 0.2;
    double p_min = 0.0, p_max = 1.0;
    double i_min = 0.0, i_max = 1.0;
    std::size_t n_seeds = 1;
    double lambda = 1.0;
    bool undirected = false;
    std::uint64_t rng_seed = 0;
};

/// Erdős–Rényi instance: every ordered pair (unordered when undirected) is
/// an edge with probability `edge_prob`; p and importance uniform in their
/// ranges; seeds uniform without replacement.
ProblemInstance generate_random_instance(const GeneratorParams& params);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace qcm
