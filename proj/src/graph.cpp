#include "qcm/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include "qcm/random.hpp"

namespace qcm {

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

std::pair<NodeId, NodeId> link_key(NodeId a, NodeId b, bool undirected) {
    if (undirected && b < a) std::swap(a, b);
    return {a, b};
}

}  // namespace

Graph::Graph(std::size_t node_count, std::span<const EdgeSpec> specs, bool undirected)
    : node_count_(node_count), undirected_(undirected) {
    if (node_count == 0) throw std::invalid_argument("graph must have at least one node");
    std::set<std::pair<NodeId, NodeId>> seen;
    edges_.reserve(specs.size() * (undirected ? 2 : 1));
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const EdgeSpec& s = specs[k];
        if (s.src >= node_count || s.dst >= node_count)
            throw std::invalid_argument("unknown node in edge " + std::to_string(s.src) + " " +
                                        std::to_string(s.dst));
        if (s.src == s.dst) throw std::invalid_argument("self-loop on node " + std::to_string(s.src));
        if (!in_unit_interval(s.p)) throw std::invalid_argument("probability out of range");
        if (!in_unit_interval(s.importance)) throw std::invalid_argument("importance out of range");
        const auto key = link_key(s.src, s.dst, undirected);
        if (!seen.insert(key).second)
            throw std::invalid_argument("duplicate edge " + std::to_string(s.src) + " " +
                                        std::to_string(s.dst));
        edges_.push_back({s.src, s.dst, s.p, s.importance, k});
        if (undirected) edges_.push_back({s.dst, s.src, s.p, s.importance, k});
    }
    link_count_ = specs.size();
    build_index();
}

void Graph::build_index() {
    out_offsets_.assign(node_count_ + 1, 0);
    for (const Edge& e : edges_) ++out_offsets_[e.src + 1];
    for (std::size_t v = 0; v < node_count_; ++v) out_offsets_[v + 1] += out_offsets_[v];
    out_arcs_.assign(edges_.size(), 0);
    std::vector<std::size_t> fill(out_offsets_.begin(), out_offsets_.end() - 1);
    for (EdgeIndex i = 0; i < edges_.size(); ++i) out_arcs_[fill[edges_[i].src]++] = i;

    link_offsets_.assign(link_count_ + 1, 0);
    for (const Edge& e : edges_) ++link_offsets_[e.link + 1];
    for (std::size_t l = 0; l < link_count_; ++l) link_offsets_[l + 1] += link_offsets_[l];
    link_arc_list_.assign(edges_.size(), 0);
    fill.assign(link_offsets_.begin(), link_offsets_.end() - 1);
    for (EdgeIndex i = 0; i < edges_.size(); ++i) link_arc_list_[fill[edges_[i].link]++] = i;
}

std::span<const EdgeIndex> Graph::out_edges(NodeId v) const {
    if (v >= node_count_) throw std::out_of_range("node id out of range");
    return std::span<const EdgeIndex>(out_arcs_).subspan(out_offsets_[v],
                                                         out_offsets_[v + 1] - out_offsets_[v]);
}

std::span<const EdgeIndex> Graph::link_arcs(std::size_t link) const {
    if (link >= link_count_) throw std::out_of_range("link id out of range");
    return std::span<const EdgeIndex>(link_arc_list_)
        .subspan(link_offsets_[link], link_offsets_[link + 1] - link_offsets_[link]);
}

EdgeIndex Graph::find_edge(NodeId src, NodeId dst) const noexcept {
    if (src >= node_count_) return npos;
    for (std::size_t k = out_offsets_[src]; k < out_offsets_[src + 1]; ++k)
        if (edges_[out_arcs_[k]].dst == dst) return out_arcs_[k];
    return npos;
}

std::vector<EdgeSpec> Graph::specs() const {
    std::vector<EdgeSpec> out;
    out.reserve(link_count_);
    for (std::size_t l = 0; l < link_count_; ++l) {
        const Edge& e = edges_[link_arcs(l).front()];
        out.push_back({e.src, e.dst, e.p, e.importance});
    }
    return out;
}

void validate(const ProblemInstance& instance) {
    if (instance.seeds.empty()) throw std::invalid_argument("empty seed set");
    for (std::size_t k = 0; k < instance.seeds.size(); ++k) {
        if (instance.seeds[k] >= instance.graph.node_count())
            throw std::invalid_argument("unknown seed node " + std::to_string(instance.seeds[k]));
        if (k > 0 && instance.seeds[k] <= instance.seeds[k - 1])
            throw std::invalid_argument("seeds must be sorted and distinct");
    }
    if (!in_unit_interval(instance.lambda)) throw std::invalid_argument("lambda out of range");
}

ProblemInstance with_graph(const ProblemInstance& instance, Graph graph) {
    return ProblemInstance{std::move(graph), instance.seeds, instance.lambda};
}

Graph remove_edges(const Graph& graph, std::span<const EdgeIndex> removal) {
    std::vector<bool> drop(graph.link_count(), false);
    for (EdgeIndex e : removal) {
        if (e >= graph.edge_count())
            throw std::out_of_range("edge index " + std::to_string(e) + " out of range");
        drop[graph.edges()[e].link] = true;
    }
    std::vector<EdgeSpec> kept;
    const auto specs = graph.specs();
    for (std::size_t l = 0; l < specs.size(); ++l)
        if (!drop[l]) kept.push_back(specs[l]);
    return Graph(graph.node_count(), kept, graph.undirected());
}

// ---------------------------------------------------------------------------
// Text format

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::vector<std::string_view> split_tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <class T>
bool parse_number(std::string_view token, T& out) {
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc() && ptr == token.data() + token.size();
}

/// Resolves node tokens. Files use either numeric ids or names throughout;
/// names receive dense ids in order of first appearance.
class NodeTable {
public:
    explicit NodeTable(std::size_t n) : n_(n) {}

    NodeId resolve(std::string_view token, std::size_t line) {
        std::uint64_t id = 0;
        const bool numeric = parse_number(token, id);
        if (mode_ == Mode::unset) mode_ = numeric ? Mode::numeric : Mode::named;
        if ((mode_ == Mode::numeric) != numeric)
            throw ParseError(line, "mixed numeric and named node ids");
        if (numeric) {
            if (id >= n_) throw ParseError(line, "unknown node " + std::string(token));
            return static_cast<NodeId>(id);
        }
        const auto it = names_.find(std::string(token));
        if (it != names_.end()) return it->second;
        if (names_.size() >= n_)
            throw ParseError(line, "unknown node " + std::string(token) + " (more names than nodes)");
        const auto id_new = static_cast<NodeId>(names_.size());
        names_.emplace(std::string(token), id_new);
        return id_new;
    }

private:
    enum class Mode { unset, numeric, named };
    std::size_t n_;
    Mode mode_ = Mode::unset;
    std::map<std::string, NodeId> names_;
};

}  // namespace

ProblemInstance parse_instance(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t node_count = 0;
    bool have_nodes = false, undirected = false, have_lambda = false, have_seeds = false;
    double lambda = 1.0;
    std::vector<EdgeSpec> specs;
    std::vector<std::size_t> spec_lines;
    std::vector<NodeId> seeds;
    std::optional<NodeTable> table;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto tokens = split_tokens(line);
        if (tokens.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        const std::string_view key = tokens[0];
        if (key == "nodes") {
            if (have_nodes) throw ParseError(line_no, "repeated nodes header");
            std::uint64_t n = 0;
            if (tokens.size() != 2 || !parse_number(tokens[1], n) || n == 0)
                throw ParseError(line_no, "malformed nodes header");
            node_count = static_cast<std::size_t>(n);
            have_nodes = true;
            table.emplace(node_count);
        } else if (key == "undirected") {
            if (tokens.size() != 1) throw ParseError(line_no, "malformed undirected flag");
            if (!specs.empty()) throw ParseError(line_no, "undirected flag must precede edges");
            undirected = true;
        } else if (key == "seeds") {
            if (!have_nodes) throw ParseError(line_no, "seeds before nodes header");
            if (have_seeds) throw ParseError(line_no, "repeated seeds line");
            if (tokens.size() < 2) throw ParseError(line_no, "empty seed set");
            for (std::size_t k = 1; k < tokens.size(); ++k) seeds.push_back(table->resolve(tokens[k], line_no));
            std::sort(seeds.begin(), seeds.end());
            if (std::adjacent_find(seeds.begin(), seeds.end()) != seeds.end())
                throw ParseError(line_no, "duplicate seed");
            have_seeds = true;
        } else if (key == "lambda") {
            if (have_lambda) throw ParseError(line_no, "repeated lambda line");
            if (tokens.size() != 2 || !parse_number(tokens[1], lambda))
                throw ParseError(line_no, "malformed lambda line");
            if (!in_unit_interval(lambda)) throw ParseError(line_no, "lambda out of range");
            have_lambda = true;
        } else {
            if (!have_nodes) throw ParseError(line_no, "edge before nodes header");
            if (tokens.size() != 4) throw ParseError(line_no, "malformed edge line");
            EdgeSpec s;
            s.src = table->resolve(tokens[0], line_no);
            s.dst = table->resolve(tokens[1], line_no);
            if (!parse_number(tokens[2], s.p) || !parse_number(tokens[3], s.importance))
                throw ParseError(line_no, "malformed edge line");
            if (!in_unit_interval(s.p)) throw ParseError(line_no, "probability out of range");
            if (!in_unit_interval(s.importance)) throw ParseError(line_no, "importance out of range");
            if (s.src == s.dst) throw ParseError(line_no, "self-loop");
            specs.push_back(s);
            spec_lines.push_back(line_no);
        }
        if (eol == text.size()) break;
    }

    if (!have_nodes) throw ParseError(line_no, "missing nodes header");
    if (!have_seeds) throw ParseError(line_no, "empty seed set");
    if (!have_lambda) throw ParseError(line_no, "missing lambda line");

    std::set<std::pair<NodeId, NodeId>> seen;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto key = link_key(specs[k].src, specs[k].dst, undirected);
        if (!seen.insert(key).second) throw ParseError(spec_lines[k], "duplicate edge");
    }

    ProblemInstance instance{Graph(node_count, specs, undirected), std::move(seeds), lambda};
    validate(instance);
    return instance;
}

std::string format_double(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, result.ptr);
}

std::string serialize_instance(const ProblemInstance& instance) {
    std::ostringstream out;
    out << "nodes " << instance.graph.node_count() << '\n';
    if (instance.graph.undirected()) out << "undirected\n";
    for (const EdgeSpec& s : instance.graph.specs())
        out << s.src << ' ' << s.dst << ' ' << format_double(s.p) << ' ' << format_double(s.importance)
            << '\n';
    out << "seeds";
    for (NodeId s : instance.seeds) out << ' ' << s;
    out << '\n' << "lambda " << format_double(instance.lambda) << '\n';
    return out.str();
}

ProblemInstance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open instance file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_instance(buffer.str());
}

void save_instance(const ProblemInstance& instance, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write instance file " + path.string());
    out << serialize_instance(instance);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

ProblemInstance generate_random_instance(const GeneratorParams& params) {
    if (params.n_nodes == 0) throw std::invalid_argument("n_nodes must be positive");
    if (params.n_seeds == 0) throw std::invalid_argument("n_seeds must be positive");
    if (params.n_seeds > params.n_nodes) throw std::invalid_argument("n_seeds > n_nodes");
    if (!in_unit_interval(params.edge_prob)) throw std::invalid_argument("edge_prob out of range");
    if (!in_unit_interval(params.p_min) || !in_unit_interval(params.p_max) || params.p_min > params.p_max)
        throw std::invalid_argument("invalid probability range");
    if (!in_unit_interval(params.i_min) || !in_unit_interval(params.i_max) || params.i_min > params.i_max)
        throw std::invalid_argument("invalid importance range");
    if (!in_unit_interval(params.lambda)) throw std::invalid_argument("lambda out of range");

    SplitMix64 rng(params.rng_seed);
    const auto n = static_cast<NodeId>(params.n_nodes);
    std::vector<EdgeSpec> specs;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = params.undirected ? u + 1 : 0; v < n; ++v) {
            if (u == v) continue;
            if (!(uniform01(rng) < params.edge_prob)) continue;
            EdgeSpec s{u, v, 0.0, 0.0};
            s.p = params.p_min + (params.p_max - params.p_min) * uniform01(rng);
            s.importance = params.i_min + (params.i_max - params.i_min) * uniform01(rng);
            specs.push_back(s);
        }
    }

    std::vector<NodeId> pool(n);
    for (NodeId v = 0; v < n; ++v) pool[v] = v;
    for (std::size_t k = 0; k < params.n_seeds; ++k) {
        const auto j = k + uniform_below(rng, pool.size() - k);
        std::swap(pool[k], pool[j]);
    }
    std::vector<NodeId> seeds(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(params.n_seeds));
    std::sort(seeds.begin(), seeds.end());

    ProblemInstance instance{Graph(params.n_nodes, specs, params.undirected), std::move(seeds), params.lambda};
    validate(instance);
    return instance;
}

}  // namespace qcm
