#pragma once

#include "shapeform/graph.hpp"

#include <Eigen/Dense>

namespace shapeform {

// Stacked planar positions, node i at entries 2(i-1), 2(i-1)+1.
using Realization = Eigen::VectorXd;
// Stacked edge vectors in the graph's edge order.
using Geometry = Eigen::VectorXd;

class ShapeVector {
public:
    static ShapeVector from_lengths(const Eigen::VectorXd& lengths);
    static ShapeVector from_squared(const Eigen::VectorXd& squared);

    const Eigen::VectorXd& lengths() const { return s_; }
    const Eigen::VectorXd& squared() const { return sbar_; }
    Eigen::Index size() const { return s_.size(); }

private:
    Eigen::VectorXd s_;
    Eigen::VectorXd sbar_;
};

Geometry edge_vector(const Realization& z, const OrientedIncidence& inc);

Eigen::VectorXd rigidity_function(const Geometry& e);

// Block-diagonal of edge vectors, 2|E| x |E|.
Eigen::MatrixXd edge_block_diagonal(const Geometry& e);

Eigen::MatrixXd rigidity_matrix(const Geometry& e, const OrientedIncidence& inc);

double shape_scale(const Geometry& e, const ShapeVector& s);

// Max triple area below 1e-9 of the squared diameter.
bool is_collinear(const Realization& z, double relative_tolerance = 1e-9);

bool is_similar(const Realization& z, const Realization& zd, double tol = 1e-8);

struct DosResult {
    Eigen::VectorXd rho;
    double rho_norm_sq = 0.0;
    bool similar = false;

    // Infinity when similar.
    double value() const;
};

DosResult dos(const Geometry& e, const Geometry& eref, double theta, const OrientedIncidence& inc);

double cost_integrand(const Geometry& e, const ShapeVector& s, double theta, const OrientedIncidence& inc);

Eigen::Vector2d node(const Realization& z, int label);

}  // namespace shapeform
