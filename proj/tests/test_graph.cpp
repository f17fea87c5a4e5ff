#include "doctest.h"

#include <sstream>
#include <vector>

#include "ppr/graph.hpp"
#include "support/oracle.hpp"

using namespace ppr;

TEST_SUITE("graph") {

TEST_CASE("fan graph loads with the expected shape") {
    Graph g = oracle::fan_graph();
    CHECK(g.num_vertices() == 8);
    CHECK(g.num_edges() == 10);
    auto n0 = g.out_neighbors(0);
    REQUIRE(n0.size() == 2);
    CHECK(n0[0] == 1);
    CHECK(n0[1] == 2);
    CHECK(g.dangling_vertices() == std::vector<VertexId>{3, 4, 5, 6, 7});
}

TEST_CASE("empty stream gives the empty graph") {
    std::istringstream in("");
    Graph g = Graph::load_edge_list(in);
    CHECK(g.num_vertices() == 0);
    CHECK(g.num_edges() == 0);
}

TEST_CASE("single edge marks the target dangling") {
    std::istringstream in("0 1\n");
    Graph g = Graph::load_edge_list(in);
    CHECK(g.num_vertices() == 2);
    CHECK(g.num_edges() == 1);
    CHECK_FALSE(g.is_dangling(0));
    CHECK(g.is_dangling(1));
}

TEST_CASE("comments, blank lines, CRLF, and id gaps are handled") {
    std::istringstream in("# header\n\n  \n5 2\r\n2 5\n# trailing comment\n");
    Graph g = Graph::load_edge_list(in);
    CHECK(g.num_vertices() == 6);
    CHECK(g.num_edges() == 2);
    // ids 0, 1, 3, 4 never appear: isolated dangling vertices
    CHECK(g.is_dangling(0));
    CHECK(g.is_dangling(3));
    CHECK_FALSE(g.is_dangling(5));
}

TEST_CASE("parallel edges and self-loops are preserved") {
    std::istringstream in("0 1\n0 1\n1 1\n1 0\n");
    Graph g = Graph::load_edge_list(in);
    CHECK(g.num_edges() == 4);
    CHECK(g.out_degree(0) == 2);
    auto n1 = g.out_neighbors(1);
    REQUIRE(n1.size() == 2);
    CHECK(n1[0] == 0);
    CHECK(n1[1] == 1);
}

TEST_CASE("malformed input reports the offending line") {
    auto expect_error_line = [](const std::string& text, std::size_t line) {
        std::istringstream in(text);
        try {
            Graph::load_edge_list(in);
            FAIL("expected ParseError for: " << text);
        } catch (const ParseError& e) {
            CHECK(e.line() == line);
        }
    };
    expect_error_line("0 1\nx 2\n", 2);
    expect_error_line("0 1\n2\n", 2);
    expect_error_line("0 1\n1 2 3\n", 2);
    expect_error_line("-1 2\n", 1);
    expect_error_line("0 1\n3 4x\n", 2);
    expect_error_line("99999999999 1\n", 1);
}

TEST_CASE("out_neighbors rejects out-of-range vertices") {
    Graph g = oracle::two_cycle();
    CHECK_THROWS_AS((void)g.out_neighbors(2), std::out_of_range);
    CHECK_THROWS_AS((void)g.out_degree(1000), std::out_of_range);
}

TEST_CASE("round trip preserves the edge multiset") {
    Graph g = oracle::random_graph(60, 3.0, 7);
    std::ostringstream out;
    g.write_edge_list(out);
    std::istringstream in(out.str());
    Graph h = Graph::load_edge_list(in);
    CHECK(h.num_edges() == g.num_edges());
    std::uint64_t degree_sum = 0;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
        auto a = g.out_neighbors(v);
        auto b = h.out_neighbors(v);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
        degree_sum += a.size();
    }
    CHECK(degree_sum == g.num_edges());
}

TEST_CASE("degree buckets follow powers of two") {
    // one vertex per degree of interest: 0,1,2,3,4,512,600
    std::vector<std::pair<VertexId, VertexId>> edges;
    auto add_fan = [&](VertexId src, int degree) {
        for (int i = 0; i < degree; ++i) edges.emplace_back(src, (src + 1 + i) % 700);
    };
    add_fan(1, 1);
    add_fan(2, 2);
    add_fan(3, 3);
    add_fan(4, 4);
    add_fan(5, 512);
    add_fan(6, 600);
    Graph g = Graph::from_edges(edges, 700);

    CHECK_FALSE(degree_bucket(g, 0, 10).has_value());
    CHECK(degree_bucket(g, 1, 10) == 1);
    CHECK(degree_bucket(g, 2, 10) == 2);
    CHECK(degree_bucket(g, 3, 10) == 2);
    CHECK(degree_bucket(g, 4, 10) == 3);
    CHECK(degree_bucket(g, 5, 10) == 10);
    CHECK(degree_bucket(g, 6, 10) == 10);

    // monotone in degree
    int last = 1;
    for (VertexId v = 1; v <= 6; ++v) {
        int b = *degree_bucket(g, v, 10);
        CHECK(b >= last);
        last = b;
    }

    // with a single bucket everything positive collapses to bucket 1
    CHECK(degree_bucket(g, 5, 1) == 1);
    CHECK_THROWS_AS((void)degree_bucket(g, 1, 0), std::invalid_argument);
}

TEST_CASE("random suite graphs have the promised shape") {
    for (const auto& params : oracle::random_suite()) {
        Graph g = oracle::random_graph(params.n, params.edge_factor, params.seed);
        REQUIRE(g.num_vertices() == params.n);
        REQUIRE(!g.dangling_vertices().empty());
        std::uint64_t degree_sum = 0;
        for (VertexId v = 0; v < g.num_vertices(); ++v) degree_sum += g.out_degree(v);
        REQUIRE(degree_sum == g.num_edges());
    }
}

} // TEST_SUITE
