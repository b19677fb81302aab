#pragma once

#include "shapeform/geometry.hpp"
#include "shapeform/graph.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace shapeform {

double optimal_constant_scale(const Geometry& e0, const ShapeVector& s);

double constant_cost_closed_form(const Geometry& e0, const ShapeVector& s, double sc);

Eigen::VectorXd control_constant(const Geometry& e, const ShapeVector& s, double sc, const OrientedIncidence& inc);

// Rows of complement edges are zero; base rows follow the triangle table.
Eigen::MatrixXd build_dhat(const Graph& gsum, const TriangleSet& triangles, const ShapeVector& s);

class ControllerArtifacts {
public:
    static ControllerArtifacts build(const Graph& g, const ShapeVector& s);

    const Graph& graph() const { return graph_; }
    const Graph& complement() const { return complement_; }
    const Graph& graph_sum() const { return sum_; }
    const OrientedIncidence& incidence() const { return inc_; }
    const OrientedIncidence& sum_incidence() const { return sum_inc_; }
    const TriangleSet& triangles() const { return triangles_; }
    const ShapeVector& shape() const { return shape_; }
    const Eigen::MatrixXd& dhat() const { return dhat_; }
    const Eigen::VectorXd& shat() const { return shat_; }
    // Designated triangle for each complement edge, indexed from zero.
    const std::vector<std::size_t>& parents() const { return parents_; }

    std::size_t base_edges() const { return graph_.edge_count(); }
    std::size_t sum_edges() const { return sum_.edge_count(); }

private:
    Graph graph_;
    Graph complement_;
    Graph sum_;
    OrientedIncidence inc_;
    OrientedIncidence sum_inc_;
    TriangleSet triangles_;
    ShapeVector shape_;
    Eigen::MatrixXd dhat_;
    Eigen::VectorXd shat_;
    std::vector<std::size_t> parents_;
};

// Half squared lengths over the summed graph.
Eigen::VectorXd rigidity_function_hat(const Realization& z, const ControllerArtifacts& art);

struct ScaleState {
    double numerator = 0.0;
    double denominator = 0.0;
    double scale = 0.0;
    double variational = 0.0;
};

ScaleState scale_function(const Realization& z, const ControllerArtifacts& art);

// Least-squares minimizer of ||R^T (r - theta S)||^2 over theta.
double variational_scale(const Realization& z, const ControllerArtifacts& art);

// |E| x |E_sum|.
Eigen::MatrixXd gain_matrix(const Realization& z, const ControllerArtifacts& art, const ScaleState& state);

// 2|E| x |E_sum|.
Eigen::MatrixXd lambda_hat(const Realization& z, const ControllerArtifacts& art);

// -H^T Lambda_hat (M / sD^2)^T (r - s S), the descent direction of ||r - s S||^2 / 2.
Eigen::VectorXd control_varying(const Realization& z, const ControllerArtifacts& art);

struct ControllabilityOptions {
    int max_iterations = 40;
    double scale_tolerance = 1e-3;  // relative
    double min_gain = 1e-3;
    double dt = 1e-3;
    double t_max = 50.0;
    double convergence_tol = 1e-6;
};

struct ControllabilityResult {
    Eigen::VectorXd gains;
    Eigen::Vector2d offset = Eigen::Vector2d::Zero();
    double linear_residual = 0.0;
    double final_scale = 0.0;
    double scale_error = 0.0;
    int iterations = 0;
    bool feasible = false;
    std::string diagnostic;
};

// Positive per-coordinate gains steering the final scale toward lambda.
ControllabilityResult solve_controllability_gains(const Realization& z0, const Realization& zf_target, double lambda,
                                                  const ControllerArtifacts& art,
                                                  const ControllabilityOptions& options = {});

// Residual of H diag(delta) a = H (zf + 1 kron t) - H z0.
double controllability_linear_residual(const Realization& z0, const Realization& zf_target, const Eigen::VectorXd& delta,
                                       const Eigen::VectorXd& gains, const OrientedIncidence& inc);

}  // namespace shapeform
