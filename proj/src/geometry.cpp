#include "shapeform/geometry.hpp"

#include "shapeform/error.hpp"

#include <cmath>
#include <limits>

namespace shapeform {

ShapeVector ShapeVector::from_lengths(const Eigen::VectorXd& lengths) {
    if (lengths.size() == 0 || (lengths.array() <= 0.0).any() || !lengths.allFinite())
        throw PreconditionError("shape lengths must be positive and finite");
    ShapeVector s;
    s.s_ = lengths;
    s.sbar_ = lengths.array().square();
    return s;
}

ShapeVector ShapeVector::from_squared(const Eigen::VectorXd& squared) {
    if (squared.size() == 0 || (squared.array() <= 0.0).any() || !squared.allFinite())
        throw PreconditionError("squared shape lengths must be positive and finite");
    ShapeVector s;
    s.s_ = squared.array().sqrt();
    s.sbar_ = squared;
    return s;
}

Eigen::Vector2d node(const Realization& z, int label) { return z.segment<2>(2 * (label - 1)); }

Geometry edge_vector(const Realization& z, const OrientedIncidence& inc) {
    if (z.size() != inc.expanded.cols()) throw DimensionError("realization length does not match incidence");
    return inc.expanded * z;
}

Eigen::VectorXd rigidity_function(const Geometry& e) {
    if (e.size() % 2 != 0) throw DimensionError("geometry length must be even");
    const Eigen::Index m = e.size() / 2;
    Eigen::VectorXd r(m);
    for (Eigen::Index k = 0; k < m; ++k) r(k) = 0.5 * e.segment<2>(2 * k).squaredNorm();
    return r;
}

Eigen::MatrixXd edge_block_diagonal(const Geometry& e) {
    const Eigen::Index m = e.size() / 2;
    Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(2 * m, m);
    for (Eigen::Index k = 0; k < m; ++k) lam.block<2, 1>(2 * k, k) = e.segment<2>(2 * k);
    return lam;
}

Eigen::MatrixXd rigidity_matrix(const Geometry& e, const OrientedIncidence& inc) {
    if (e.size() != inc.expanded.rows()) throw DimensionError("geometry length does not match incidence");
    return edge_block_diagonal(e).transpose() * inc.expanded;
}

double shape_scale(const Geometry& e, const ShapeVector& s) {
    return e.segment<2>(0).squaredNorm() / (2.0 * s.squared()(0));
}

bool is_collinear(const Realization& z, double relative_tolerance) {
    const Eigen::Index n = z.size() / 2;
    double diam_sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            diam_sq = std::max(diam_sq, (z.segment<2>(2 * i) - z.segment<2>(2 * j)).squaredNorm());
    if (diam_sq == 0.0) return true;
    double max_area = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Eigen::Vector2d a = z.segment<2>(2 * j) - z.segment<2>(2 * i);
            for (Eigen::Index k = j + 1; k < n; ++k) {
                const Eigen::Vector2d b = z.segment<2>(2 * k) - z.segment<2>(2 * i);
                max_area = std::max(max_area, 0.5 * std::abs(a.x() * b.y() - a.y() * b.x()));
            }
        }
    }
    return max_area <= relative_tolerance * diam_sq;
}

bool is_similar(const Realization& z, const Realization& zd, double tol) {
    if (z.size() != zd.size()) throw DimensionError("realizations differ in length");
    if (is_collinear(z) || is_collinear(zd)) throw PreconditionError("similarity test needs non-collinear input");
    const Eigen::Index n = z.size() / 2;
    const double base = (z.segment<2>(2) - z.segment<2>(0)).norm();
    const double base_d = (zd.segment<2>(2) - zd.segment<2>(0)).norm();
    if (base == 0.0 || base_d == 0.0) return false;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double a = (z.segment<2>(2 * j) - z.segment<2>(2 * i)).norm() / base;
            const double b = (zd.segment<2>(2 * j) - zd.segment<2>(2 * i)).norm() / base_d;
            if (std::abs(a - b) > tol) return false;
        }
    }
    return true;
}

double DosResult::value() const {
    return similar ? std::numeric_limits<double>::infinity() : 1.0 / rho_norm_sq;
}

DosResult dos(const Geometry& e, const Geometry& eref, double theta, const OrientedIncidence& inc) {
    if (theta <= 0.0) throw PreconditionError("dos needs a positive scale");
    if (e.size() != eref.size() || e.size() != inc.expanded.rows())
        throw DimensionError("geometry lengths do not match");
    const Eigen::VectorXd r = rigidity_function(e);
    const Eigen::VectorXd rr = rigidity_function(eref);
    Eigen::VectorXd weighted(e.size());
    for (Eigen::Index k = 0; k < r.size(); ++k)
        weighted.segment<2>(2 * k) = (r(k) - theta * rr(k)) * e.segment<2>(2 * k);
    DosResult out;
    out.rho = inc.expanded.transpose() * weighted;
    out.rho_norm_sq = out.rho.squaredNorm();
    const double size = std::max(1.0, e.squaredNorm());
    out.similar = out.rho_norm_sq <= std::pow(64.0 * std::numeric_limits<double>::epsilon(), 2) * size * size * size;
    return out;
}

double cost_integrand(const Geometry& e, const ShapeVector& s, double theta, const OrientedIncidence& inc) {
    if (theta < 0.0) throw PreconditionError("scale must be non-negative");
    if (s.size() * 2 != e.size()) throw DimensionError("shape length does not match geometry");
    const Eigen::VectorXd diff = rigidity_function(e) - theta * s.squared();
    return (rigidity_matrix(e, inc).transpose() * diff).squaredNorm();
}

}  // namespace shapeform
