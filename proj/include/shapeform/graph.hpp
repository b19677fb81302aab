#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace shapeform {

// Undirected edge with 1-based labels, stored as (lower, higher).
struct Edge {
    int u = 0;
    int v = 0;

    Edge() = default;
    Edge(int a, int b);

    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
};

class Graph {
public:
    Graph() = default;
    // Keeps the supplied edge order.
    Graph(int n, std::vector<Edge> edges);

    // Sorts edges lexicographically by (lower, higher).
    static Graph canonical(int n, std::vector<Edge> edges);

    int vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(std::size_t k) const { return edges_.at(k); }

    std::optional<std::size_t> find_edge(int a, int b) const;
    std::vector<std::vector<int>> adjacency() const;
    // BFS hop counts indexed by label (entry 0 unused), -1 when unreachable.
    std::vector<int> distances_from(int source) const;
    bool is_connected() const;
    std::vector<int> degrees() const;

private:
    int n_ = 0;
    std::vector<Edge> edges_;
};

struct OrientedIncidence {
    Eigen::MatrixXd matrix;    // |E| x n
    Eigen::MatrixXd expanded;  // H kron I2
};

// Each edge points from its lower label to its higher label.
OrientedIncidence oriented_incidence(const Graph& g);

// Pairs at hop distance exactly two, in lexicographic order.
Graph triangular_complement(const Graph& g);

// Edges of g followed by edges of gc.
Graph graph_sum(const Graph& g, const Graph& gc);

// e_closing = first_sign * e_first + second_sign * e_second.
struct Triangle {
    std::size_t first = 0;
    std::size_t second = 0;
    std::size_t closing = 0;
    int first_sign = 1;
    int second_sign = 1;
    int shared_vertex = 0;
};

struct TriangleSet {
    std::vector<Triangle> triangles;
    std::size_t base_edge_count = 0;

    std::size_t size() const { return triangles.size(); }
    // Triangles that contain edge k.
    std::vector<std::size_t> containing(std::size_t k) const;
};

// One entry per triangle of gsum with at least two edges among the first
// base_edge_count. first < second are base edges; closing is the remaining edge.
TriangleSet enumerate_triangles(const Graph& gsum, std::size_t base_edge_count);

// Signs (a, b) with z_closing_sink - z_closing_source = a e_first + b e_second.
std::pair<int, int> composition_signs(const Edge& first, const Edge& second, const Edge& closing);

bool is_minimally_rigid(const Graph& g, const Eigen::VectorXd& z);

// Numerical rank with threshold 1e-9 times the largest singular value.
int numerical_rank(const Eigen::MatrixXd& a, double relative_threshold = 1e-9);

}  // namespace shapeform
