#include "shapeform/error.hpp"
#include "shapeform/graph.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

using namespace shapeform;

namespace {

Graph four_agent_a() { return Graph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {2, 4}}); }

Graph random_connected_graph(std::mt19937_64& rng, int n, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<Edge> edges;
    // Random spanning path keeps the graph connected.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i + 1;
    std::shuffle(order.begin(), order.end(), rng);
    std::set<Edge> seen;
    for (int i = 0; i + 1 < n; ++i) seen.insert(Edge(order[i], order[i + 1]));
    for (int a = 1; a <= n; ++a)
        for (int b = a + 1; b <= n; ++b)
            if (coin(rng)) seen.insert(Edge(a, b));
    edges.assign(seen.begin(), seen.end());
    std::shuffle(edges.begin(), edges.end(), rng);
    return Graph(n, edges);
}

Eigen::MatrixXi adjacency_matrix(const Graph& g) {
    Eigen::MatrixXi a = Eigen::MatrixXi::Zero(g.vertex_count(), g.vertex_count());
    for (const auto& e : g.edges()) a(e.u - 1, e.v - 1) = a(e.v - 1, e.u - 1) = 1;
    return a;
}

}  // namespace

TEST_CASE("edges are stored with the lower label first") {
    const Edge e(4, 2);
    CHECK(e.u == 2);
    CHECK(e.v == 4);
    CHECK(Edge(2, 4) == e);
}

TEST_CASE("graph validation rejects malformed edge lists") {
    CHECK_THROWS_AS(Graph(1, {}), TopologyError);
    CHECK_THROWS_AS(Graph(3, {{1, 1}}), TopologyError);
    CHECK_THROWS_AS(Graph(3, {{1, 4}}), TopologyError);
    CHECK_THROWS_AS(Graph(3, {{1, 2}, {2, 1}}), TopologyError);
    CHECK_NOTHROW(Graph(2, {{1, 2}}));
}

TEST_CASE("canonical ordering sorts edges") {
    const Graph g = Graph::canonical(4, {{3, 4}, {1, 2}, {2, 4}});
    REQUIRE(g.edge_count() == 3);
    CHECK(g.edge(0) == Edge(1, 2));
    CHECK(g.edge(1) == Edge(2, 4));
    CHECK(g.edge(2) == Edge(3, 4));
    CHECK(g.find_edge(4, 2) == std::optional<std::size_t>(1));
    CHECK_FALSE(g.find_edge(1, 3).has_value());
}

TEST_CASE("oriented incidence points from lower to higher label") {
    const Graph g = four_agent_a();
    const auto inc = oriented_incidence(g);
    REQUIRE(inc.matrix.rows() == 5);
    REQUIRE(inc.matrix.cols() == 4);
    for (std::size_t k = 0; k < g.edge_count(); ++k) {
        const auto& e = g.edge(k);
        CHECK(inc.matrix(k, e.u - 1) == -1.0);
        CHECK(inc.matrix(k, e.v - 1) == 1.0);
        CHECK(inc.matrix.row(k).sum() == 0.0);
    }
    CHECK(inc.expanded.rows() == 10);
    CHECK(inc.expanded.cols() == 8);
    CHECK(inc.expanded(2 * 4 + 1, 2 * 3 + 1) == 1.0);
    CHECK_THROWS_AS(oriented_incidence(Graph(4, {{1, 2}, {3, 4}})), TopologyError);
}

TEST_CASE("BFS distances and connectivity") {
    const Graph path(4, {{1, 2}, {2, 3}, {3, 4}});
    const auto d = path.distances_from(1);
    CHECK(d[1] == 0);
    CHECK(d[2] == 1);
    CHECK(d[4] == 3);
    CHECK(path.is_connected());
    CHECK_FALSE(Graph(4, {{1, 2}, {3, 4}}).is_connected());
    CHECK(path.degrees() == std::vector<int>{1, 2, 2, 1});
}

TEST_CASE("triangular complement of the four-agent graph is the missing diagonal") {
    const Graph gc = triangular_complement(four_agent_a());
    REQUIRE(gc.edge_count() == 1);
    CHECK(gc.edge(0) == Edge(1, 3));
    const Graph tri(3, {{1, 2}, {2, 3}, {1, 3}});
    CHECK(triangular_complement(tri).edge_count() == 0);
}

TEST_CASE("triangular complement matches the squared adjacency oracle on random graphs") {
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> size(3, 9);
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = random_connected_graph(rng, size(rng), 0.25);
        const Eigen::MatrixXi a = adjacency_matrix(g);
        const Eigen::MatrixXi a2 = a * a;
        std::vector<Edge> expected;
        for (int i = 0; i < g.vertex_count(); ++i)
            for (int j = i + 1; j < g.vertex_count(); ++j)
                if (a(i, j) == 0 && a2(i, j) > 0) expected.emplace_back(i + 1, j + 1);
        const Graph gc = triangular_complement(g);
        CHECK(gc.edges() == expected);
        CHECK(std::is_sorted(gc.edges().begin(), gc.edges().end()));
    }
}

TEST_CASE("graph sum keeps base edges first") {
    const Graph g = four_agent_a();
    const Graph gc = triangular_complement(g);
    const Graph gs = graph_sum(g, gc);
    REQUIRE(gs.edge_count() == 6);
    for (std::size_t k = 0; k < 5; ++k) CHECK(gs.edge(k) == g.edge(k));
    CHECK(gs.edge(5) == Edge(1, 3));
    CHECK_THROWS_AS(graph_sum(g, Graph(3, {{1, 2}})), TopologyError);
}

TEST_CASE("triangle enumeration matches the clique oracle with composition signs") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> size(3, 8);
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = random_connected_graph(rng, size(rng), 0.3);
        const Graph gs = graph_sum(g, triangular_complement(g));
        const std::size_t m = g.edge_count();
        const TriangleSet tris = enumerate_triangles(gs, m);

        std::set<std::tuple<std::size_t, std::size_t, std::size_t>> expected;
        const int n = g.vertex_count();
        for (int a = 1; a <= n; ++a)
            for (int b = a + 1; b <= n; ++b)
                for (int c = b + 1; c <= n; ++c) {
                    const auto ab = gs.find_edge(a, b);
                    const auto bc = gs.find_edge(b, c);
                    const auto ac = gs.find_edge(a, c);
                    if (!ab || !bc || !ac) continue;
                    std::array<std::size_t, 3> ks{*ab, *bc, *ac};
                    std::sort(ks.begin(), ks.end());
                    const int base = static_cast<int>(*ab < m) + static_cast<int>(*bc < m) + static_cast<int>(*ac < m);
                    if (base >= 2) expected.insert({ks[0], ks[1], ks[2]});
                }

        std::set<std::tuple<std::size_t, std::size_t, std::size_t>> found;
        const auto inc = oriented_incidence(gs);
        const Eigen::VectorXd z = testsupport::random_points(rng, n);
        const Eigen::VectorXd e = inc.expanded * z;
        for (const auto& t : tris.triangles) {
            CHECK(t.first < t.second);
            CHECK(t.first < m);
            CHECK(t.second < m);
            std::array<std::size_t, 3> ks{t.first, t.second, t.closing};
            std::sort(ks.begin(), ks.end());
            CHECK(found.insert({ks[0], ks[1], ks[2]}).second);
            const Eigen::Vector2d lhs = e.segment<2>(2 * t.closing);
            const Eigen::Vector2d rhs = t.first_sign * e.segment<2>(2 * t.first) +
                                        t.second_sign * e.segment<2>(2 * t.second);
            CHECK((lhs - rhs).norm() < 1e-12);
        }
        CHECK(found == expected);
    }
}

TEST_CASE("minimal rigidity") {
    Eigen::VectorXd z(8);
    z << 0, 0, 1, 0, 1, 2, 0, 2;
    CHECK(is_minimally_rigid(four_agent_a(), z));
    CHECK_FALSE(is_minimally_rigid(Graph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}), z));
    const Graph k4(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 3}, {2, 4}});
    CHECK_FALSE(is_minimally_rigid(k4, z));
    Eigen::VectorXd line(8);
    line << 0, 0, 1, 0, 2, 0, 3, 0;
    CHECK_THROWS_AS(is_minimally_rigid(four_agent_a(), line), PreconditionError);
}

TEST_CASE("numerical rank") {
    Eigen::MatrixXd a(3, 3);
    a << 1, 2, 3, 2, 4, 6, 0, 1, 1;
    CHECK(numerical_rank(a) == 2);
    CHECK(numerical_rank(Eigen::MatrixXd::Identity(4, 4)) == 4);
}
