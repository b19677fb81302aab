#include "shapeform/graph.hpp"

#include "shapeform/error.hpp"
#include "shapeform/geometry.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <deque>
#include <set>
#include <string>

namespace shapeform {

Edge::Edge(int a, int b) : u(std::min(a, b)), v(std::max(a, b)) {}

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n < 2) throw TopologyError("graph needs at least two vertices");
    std::set<Edge> seen;
    for (const auto& e : edges_) {
        if (e.u == e.v) throw TopologyError("self-loop at vertex " + std::to_string(e.u));
        if (e.u < 1 || e.v > n)
            throw TopologyError("edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") outside [1," +
                                std::to_string(n) + "]");
        if (!seen.insert(e).second)
            throw TopologyError("duplicate edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ")");
    }
}

Graph Graph::canonical(int n, std::vector<Edge> edges) {
    std::sort(edges.begin(), edges.end());
    return Graph(n, std::move(edges));
}

std::optional<std::size_t> Graph::find_edge(int a, int b) const {
    const Edge key(a, b);
    for (std::size_t k = 0; k < edges_.size(); ++k)
        if (edges_[k] == key) return k;
    return std::nullopt;
}

std::vector<std::vector<int>> Graph::adjacency() const {
    std::vector<std::vector<int>> adj(n_ + 1);
    for (const auto& e : edges_) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    return adj;
}

std::vector<int> Graph::distances_from(int source) const {
    const auto adj = adjacency();
    std::vector<int> dist(n_ + 1, -1);
    dist[source] = 0;
    std::deque<int> queue{source};
    while (!queue.empty()) {
        const int x = queue.front();
        queue.pop_front();
        for (int y : adj[x]) {
            if (dist[y] < 0) {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    return dist;
}

bool Graph::is_connected() const {
    const auto dist = distances_from(1);
    return std::all_of(dist.begin() + 1, dist.end(), [](int d) { return d >= 0; });
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(n_, 0);
    for (const auto& e : edges_) {
        ++deg[e.u - 1];
        ++deg[e.v - 1];
    }
    return deg;
}

OrientedIncidence oriented_incidence(const Graph& g) {
    if (!g.is_connected()) throw TopologyError("oriented incidence requires a connected graph");
    const auto m = static_cast<Eigen::Index>(g.edge_count());
    OrientedIncidence inc;
    inc.matrix = Eigen::MatrixXd::Zero(m, g.vertex_count());
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto& e = g.edge(static_cast<std::size_t>(k));
        inc.matrix(k, e.u - 1) = -1.0;
        inc.matrix(k, e.v - 1) = 1.0;
    }
    inc.expanded = Eigen::kroneckerProduct(inc.matrix, Eigen::Matrix2d::Identity());
    return inc;
}

Graph triangular_complement(const Graph& g) {
    if (!g.is_connected()) throw TopologyError("triangular complement requires a connected graph");
    std::vector<Edge> out;
    for (int i = 1; i <= g.vertex_count(); ++i) {
        const auto dist = g.distances_from(i);
        for (int j = i + 1; j <= g.vertex_count(); ++j)
            if (dist[j] == 2) out.emplace_back(i, j);
    }
    return Graph(g.vertex_count(), std::move(out));
}

Graph graph_sum(const Graph& g, const Graph& gc) {
    if (g.vertex_count() != gc.vertex_count()) throw TopologyError("graph sum needs identical vertex sets");
    auto edges = g.edges();
    edges.insert(edges.end(), gc.edges().begin(), gc.edges().end());
    return Graph(g.vertex_count(), std::move(edges));
}

std::pair<int, int> composition_signs(const Edge& first, const Edge& second, const Edge& closing) {
    // Walk closing.u -> shared -> closing.v.
    const bool first_has_u = first.u == closing.u || first.v == closing.u;
    const Edge& from_u = first_has_u ? first : second;
    const Edge& to_v = first_has_u ? second : first;
    const int shared = (from_u.u == closing.u) ? from_u.v : from_u.u;
    const int sign_u = (from_u.v == shared) ? 1 : -1;
    const int sign_v = (to_v.v == closing.v) ? 1 : -1;
    return first_has_u ? std::pair{sign_u, sign_v} : std::pair{sign_v, sign_u};
}

std::vector<std::size_t> TriangleSet::containing(std::size_t k) const {
    std::vector<std::size_t> out;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        if (tri.first == k || tri.second == k || tri.closing == k) out.push_back(t);
    }
    return out;
}

TriangleSet enumerate_triangles(const Graph& gsum, std::size_t base_edge_count) {
    if (base_edge_count > gsum.edge_count()) throw DimensionError("base edge count exceeds graph size");
    TriangleSet set;
    set.base_edge_count = base_edge_count;
    const auto& edges = gsum.edges();
    for (std::size_t i = 0; i < base_edge_count; ++i) {
        for (std::size_t j = i + 1; j < base_edge_count; ++j) {
            const Edge& a = edges[i];
            const Edge& b = edges[j];
            int shared = 0;
            int ea = 0;
            int eb = 0;
            if (a.u == b.u) { shared = a.u; ea = a.v; eb = b.v; }
            else if (a.u == b.v) { shared = a.u; ea = a.v; eb = b.u; }
            else if (a.v == b.u) { shared = a.v; ea = a.u; eb = b.v; }
            else if (a.v == b.v) { shared = a.v; ea = a.u; eb = b.u; }
            else continue;
            const auto gamma = gsum.find_edge(ea, eb);
            if (!gamma) continue;
            // A triangle of three base edges is recorded once, from its two lowest edges.
            if (*gamma < base_edge_count && *gamma < j) continue;
            const auto [sa, sb] = composition_signs(a, b, edges[*gamma]);
            set.triangles.push_back({i, j, *gamma, sa, sb, shared});
        }
    }
    return set;
}

int numerical_rank(const Eigen::MatrixXd& a, double relative_threshold) {
    if (a.size() == 0) return 0;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cut = relative_threshold * sv(0);
    return static_cast<int>((sv.array() > cut).count());
}

bool is_minimally_rigid(const Graph& g, const Eigen::VectorXd& z) {
    if (z.size() != 2 * g.vertex_count()) throw DimensionError("realization length must be 2n");
    if (is_collinear(z)) throw PreconditionError("collinear realization; rank test unreliable");
    const int target = 2 * g.vertex_count() - 3;
    if (static_cast<int>(g.edge_count()) != target) return false;
    if (!g.is_connected()) return false;
    const auto inc = oriented_incidence(g);
    return numerical_rank(rigidity_matrix(edge_vector(z, inc), inc)) == target;
}

}  // namespace shapeform
