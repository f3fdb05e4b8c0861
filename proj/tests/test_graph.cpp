#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>

#include "qcm/graph.hpp"

using namespace qcm;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_instance(text);
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

bool has_edge(const Graph& g, NodeId s, NodeId d) { return g.find_edge(s, d) != Graph::npos; }

}  // namespace

TEST_CASE("parse maps fields directly") {
    const ProblemInstance inst = parse_instance("nodes 2\n0 1 0.5 0.3\nseeds 0\nlambda 1.0\n");
    CHECK(inst.graph.node_count() == 2);
    REQUIRE(inst.graph.edge_count() == 1);
    CHECK(inst.graph.edge(0).src == 0);
    CHECK(inst.graph.edge(0).dst == 1);
    CHECK(inst.graph.edge(0).p == 0.5);
    CHECK(inst.graph.edge(0).importance == 0.3);
    CHECK(inst.seeds == std::vector<NodeId>{0});
    CHECK(inst.lambda == 1.0);
    CHECK_FALSE(inst.graph.undirected());
}

TEST_CASE("parse accepts comments and blank lines") {
    const auto inst = parse_instance("# header\n\nnodes 3  # three\n0 1 1 0\n1 2 0.25 0.5\nseeds 2 0\nlambda 0.5\n");
    CHECK(inst.graph.edge_count() == 2);
    CHECK(inst.seeds == std::vector<NodeId>{0, 2});
    CHECK(inst.lambda == 0.5);
}

TEST_CASE("parse errors name the line") {
    CHECK(error_of("nodes 2\n0 1 1.5 0.3\nseeds 0\nlambda 1\n").find("probability out of range") != std::string::npos);
    CHECK(error_of("nodes 2\n0 1 1.5 0.3\nseeds 0\nlambda 1\n").find("line 2") != std::string::npos);

    const std::string dup = error_of("nodes 2\n0 1 0.5 0.3\n0 1 0.2 0.1\nseeds 0\nlambda 1\n");
    CHECK(dup.find("duplicate edge") != std::string::npos);
    CHECK(dup.find("line 3") != std::string::npos);

    CHECK(error_of("nodes 2\n0 5 0.5 0.3\nseeds 0\nlambda 1\n").find("unknown node") != std::string::npos);
    CHECK(error_of("nodes 2\n0 1 0.5 0.3\nseeds\nlambda 1\n").find("empty seed set") != std::string::npos);
    CHECK(error_of("nodes 2\n0 1 0.5\nseeds 0\nlambda 1\n").find("line 2") != std::string::npos);
    CHECK(error_of("nodes 2\n0 1 0.5 0.3\nseeds 0\n").find("lambda") != std::string::npos);
    CHECK_THROWS_AS(parse_instance("nodes 2\n0 1 x 0.3\nseeds 0\nlambda 1\n"), ParseError);
}

TEST_CASE("named nodes map to dense ids in order of appearance") {
    const auto inst = parse_instance("nodes 3\nweb db 0.5 0.1\ndb cache 0.2 0.3\nseeds web\nlambda 1\n");
    CHECK(has_edge(inst.graph, 0, 1));
    CHECK(has_edge(inst.graph, 1, 2));
    CHECK(inst.seeds == std::vector<NodeId>{0});
}

TEST_CASE("undirected edges expand into two arcs sharing a link") {
    const auto inst = parse_instance("nodes 3\nundirected\n0 1 0.5 0.2\n1 2 0.4 0.3\nseeds 0\nlambda 1\n");
    const Graph& g = inst.graph;
    CHECK(g.edge_count() == 4);
    CHECK(g.link_count() == 2);
    CHECK(has_edge(g, 0, 1));
    CHECK(has_edge(g, 1, 0));
    CHECK(g.edge(g.find_edge(1, 0)).link == g.edge(g.find_edge(0, 1)).link);
    CHECK(g.edge(g.find_edge(2, 1)).p == 0.4);

    CHECK(error_of("nodes 2\nundirected\n0 1 0.5 0.2\n1 0 0.5 0.2\nseeds 0\nlambda 1\n").find("duplicate edge") !=
          std::string::npos);
}

TEST_CASE("serialize then parse round-trips") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        GeneratorParams params;
        params.n_nodes = 1 + seed % 7;
        params.edge_prob = 0.4;
        params.n_seeds = 1;
        params.lambda = 0.3;
        params.undirected = seed % 2 == 1;
        params.rng_seed = seed;
        const ProblemInstance inst = generate_random_instance(params);
        const ProblemInstance back = parse_instance(serialize_instance(inst));
        CHECK(back == inst);
        CHECK(serialize_instance(back) == serialize_instance(inst));
    }
}

TEST_CASE("remove_edges examples") {
    const auto two = parse_instance("nodes 2\n0 1 0.5 0.3\nseeds 0\nlambda 1\n");
    CHECK(remove_edges(two.graph, {}) == two.graph);
    const std::vector<EdgeIndex> first{0};
    const Graph empty = remove_edges(two.graph, first);
    CHECK(empty.edge_count() == 0);
    CHECK(empty.node_count() == 2);
    CHECK(two.graph.edge_count() == 1);

    const auto tri = parse_instance("nodes 3\n0 1 0.1 0.1\n1 2 0.2 0.2\n0 2 0.3 0.3\nseeds 0\nlambda 1\n");
    const std::vector<EdgeIndex> mid{tri.graph.find_edge(1, 2)};
    const Graph g = remove_edges(tri.graph, mid);
    CHECK(g.edge_count() == 2);
    CHECK(has_edge(g, 0, 1));
    CHECK(has_edge(g, 0, 2));
    CHECK_FALSE(has_edge(g, 1, 2));

    const std::vector<EdgeIndex> bad{7};
    CHECK_THROWS_AS(remove_edges(tri.graph, bad), std::out_of_range);
}

TEST_CASE("removing either arc removes the whole undirected link") {
    const auto inst = parse_instance("nodes 3\nundirected\n0 1 0.5 0.2\n1 2 0.4 0.3\nseeds 0\nlambda 1\n");
    const std::vector<EdgeIndex> rm{inst.graph.find_edge(2, 1)};
    const Graph g = remove_edges(inst.graph, rm);
    CHECK(g.edge_count() == 2);
    CHECK_FALSE(has_edge(g, 1, 2));
    CHECK_FALSE(has_edge(g, 2, 1));
}

TEST_CASE("remove_edges is idempotent in effect") {
    GeneratorParams params;
    params.n_nodes = 6;
    params.edge_prob = 0.5;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        params.rng_seed = seed;
        const Graph g = generate_random_instance(params).graph;
        std::vector<EdgeIndex> rm;
        for (EdgeIndex e = 0; e < g.edge_count(); e += 2) rm.push_back(e);
        const Graph once = remove_edges(g, rm);
        // Indices in `once` of the arcs from rm that survived: none should.
        std::vector<EdgeIndex> again;
        for (EdgeIndex e : rm) {
            const auto idx = once.find_edge(g.edge(e).src, g.edge(e).dst);
            if (idx != Graph::npos) again.push_back(idx);
        }
        CHECK(again.empty());
        CHECK(remove_edges(once, again) == once);
    }
}

TEST_CASE("generator examples") {
    GeneratorParams one;
    one.n_nodes = 1;
    const auto single = generate_random_instance(one);
    CHECK(single.graph.edge_count() == 0);
    CHECK(single.seeds == std::vector<NodeId>{0});

    GeneratorParams none;
    none.n_nodes = 8;
    none.edge_prob = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
        none.rng_seed = s;
        CHECK(generate_random_instance(none).graph.edge_count() == 0);
    }

    GeneratorParams p;
    p.n_nodes = 9;
    p.edge_prob = 0.3;
    p.n_seeds = 3;
    p.p_min = 0.2;
    p.p_max = 0.4;
    p.rng_seed = 42;
    const auto a = generate_random_instance(p);
    const auto b = generate_random_instance(p);
    CHECK(serialize_instance(a) == serialize_instance(b));
    CHECK(a.seeds.size() == 3);
    CHECK(std::is_sorted(a.seeds.begin(), a.seeds.end()));
    for (const Edge& e : a.graph.edges()) {
        CHECK(e.p >= 0.2);
        CHECK(e.p <= 0.4);
        CHECK(e.src != e.dst);
    }

    GeneratorParams bad;
    bad.n_nodes = 5;
    bad.n_seeds = 6;
    CHECK_THROWS_WITH_AS(generate_random_instance(bad), doctest::Contains("n_seeds > n_nodes"), std::invalid_argument);
}

TEST_CASE("generator edge frequency matches edge_prob") {
    GeneratorParams p;
    p.n_nodes = 40;
    p.edge_prob = 0.25;
    p.rng_seed = 7;
    const auto inst = generate_random_instance(p);
    const double pairs = 40.0 * 39.0;
    const double freq = static_cast<double>(inst.graph.edge_count()) / pairs;
    CHECK(freq == doctest::Approx(0.25).epsilon(0.2));
}

TEST_CASE("format_double round-trips") {
    for (double x : {0.1, 1.0 / 3.0, 0.5, 1e-300, 123456.789, 0.0}) CHECK(std::stod(format_double(x)) == x);
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
}
