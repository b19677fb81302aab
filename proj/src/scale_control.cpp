#include "shapeform/scale_control.hpp"

#include "shapeform/error.hpp"
#include "shapeform/simulation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <sstream>

namespace shapeform {

double optimal_constant_scale(const Geometry& e0, const ShapeVector& s) {
    if (2 * s.size() != e0.size()) throw DimensionError("shape length does not match geometry");
    const Eigen::VectorXd sq = 2.0 * rigidity_function(e0);
    const double denom = 2.0 * s.squared().squaredNorm();
    if (denom == 0.0) throw PreconditionError("zero shape vector");
    return sq.dot(s.squared()) / denom;
}

double constant_cost_closed_form(const Geometry& e0, const ShapeVector& s, double sc) {
    if (sc <= 0.0) throw PreconditionError("constant scale must be positive");
    if (2 * s.size() != e0.size()) throw DimensionError("shape length does not match geometry");
    const Eigen::VectorXd sq = 2.0 * rigidity_function(e0);
    return 0.125 * (sq - 2.0 * sc * s.squared()).squaredNorm();
}

Eigen::VectorXd control_constant(const Geometry& e, const ShapeVector& s, double sc, const OrientedIncidence& inc) {
    if (2 * s.size() != e.size()) throw DimensionError("shape length does not match geometry");
    return -rigidity_matrix(e, inc).transpose() * (rigidity_function(e) - sc * s.squared());
}

Eigen::MatrixXd build_dhat(const Graph& gsum, const TriangleSet& triangles, const ShapeVector& s) {
    const auto m = static_cast<Eigen::Index>(triangles.base_edge_count);
    const auto md = static_cast<Eigen::Index>(gsum.edge_count());
    if (s.size() != m) throw DimensionError("shape length does not match base edge count");
    Eigen::VectorXd sh = Eigen::VectorXd::Zero(md);
    sh.head(m) = s.squared();

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(md, md);
    std::vector<std::set<Eigen::Index>> neighbours(static_cast<std::size_t>(md));
    for (const auto& tri : triangles.triangles) {
        const std::array<Eigen::Index, 3> idx{static_cast<Eigen::Index>(tri.first),
                                              static_cast<Eigen::Index>(tri.second),
                                              static_cast<Eigen::Index>(tri.closing)};
        for (auto k : idx)
            if (k < 0 || k >= md) throw DimensionError("triangle edge index out of range");
        for (int a = 0; a < 3; ++a) {
            const Eigen::Index p = idx[a];
            if (p >= m) continue;
            for (int b = 0; b < 3; ++b) {
                if (a == b) continue;
                const Eigen::Index q = idx[b];
                const Eigen::Index third = idx[3 - a - b];
                neighbours[p].insert(q);
                if (q >= m) continue;
                d(p, q) = sh(q) - sh(third);
                if (third >= m) d(p, third) = -sh(q);
            }
        }
    }
    for (Eigen::Index p = 0; p < m; ++p) {
        double sum = 0.0;
        for (auto k : neighbours[p]) sum += sh(k);
        d(p, p) = sum - 4.0 * sh(p);
    }
    return d;
}

ControllerArtifacts ControllerArtifacts::build(const Graph& g, const ShapeVector& s) {
    if (!g.is_connected()) throw TopologyError("controller needs a connected graph");
    if (s.size() != static_cast<Eigen::Index>(g.edge_count()))
        throw DimensionError("shape length must equal the edge count");
    ControllerArtifacts art;
    art.graph_ = g;
    art.complement_ = triangular_complement(g);
    art.sum_ = shapeform::graph_sum(g, art.complement_);
    art.inc_ = oriented_incidence(g);
    art.sum_inc_ = oriented_incidence(art.sum_);
    art.triangles_ = enumerate_triangles(art.sum_, g.edge_count());
    art.shape_ = s;
    art.dhat_ = build_dhat(art.sum_, art.triangles_, s);
    art.shat_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(art.sum_.edge_count()));
    art.shat_.head(s.size()) = s.squared();

    const std::size_t m = g.edge_count();
    art.parents_.assign(art.complement_.edge_count(), art.triangles_.size());
    for (std::size_t t = 0; t < art.triangles_.size(); ++t) {
        const auto c = art.triangles_.triangles[t].closing;
        if (c >= m && art.parents_[c - m] == art.triangles_.size()) art.parents_[c - m] = t;
    }
    for (auto p : art.parents_)
        if (p == art.triangles_.size()) throw TopologyError("complement edge without a parent triangle");
    return art;
}

Eigen::VectorXd rigidity_function_hat(const Realization& z, const ControllerArtifacts& art) {
    return rigidity_function(edge_vector(z, art.sum_incidence()));
}

double variational_scale(const Realization& z, const ControllerArtifacts& art) {
    const Geometry e = edge_vector(z, art.incidence());
    const Eigen::MatrixXd r_mat = rigidity_matrix(e, art.incidence());
    const Eigen::VectorXd rs = r_mat.transpose() * art.shape().squared();
    const Eigen::VectorXd rr = r_mat.transpose() * rigidity_function(e);
    return rs.dot(rr) / rs.squaredNorm();
}

ScaleState scale_function(const Realization& z, const ControllerArtifacts& art) {
    const Eigen::VectorXd rh = rigidity_function_hat(z, art);
    const Eigen::VectorXd drh = art.dhat() * rh;
    ScaleState st;
    st.numerator = rh.dot(drh);
    st.denominator = art.shat().dot(drh);
    const double floor = 1e-12 * art.shat().norm() * art.dhat().norm() * rh.norm();
    if (!(std::abs(st.denominator) > floor))
        throw DegenerateConfigurationError("scale denominator vanishes");
    st.scale = st.numerator / st.denominator;
    st.variational = variational_scale(z, art);
    return st;
}

Eigen::MatrixXd gain_matrix(const Realization& z, const ControllerArtifacts& art, const ScaleState& state) {
    const auto m = static_cast<Eigen::Index>(art.base_edges());
    const auto md = static_cast<Eigen::Index>(art.sum_edges());
    const Eigen::VectorXd rh = rigidity_function_hat(z, art);
    const Eigen::MatrixXd& d = art.dhat();
    const Eigen::VectorXd& sbar = art.shape().squared();
    const double sd = state.denominator;

    Eigen::MatrixXd gain = Eigen::MatrixXd::Zero(m, md);
    gain.leftCols(m).diagonal().setConstant(sd * sd);
    gain -= sd * sbar * (rh.transpose() * (d + d.transpose()));
    gain += state.numerator * sbar * (art.shat().transpose() * d);
    return gain;
}

Eigen::MatrixXd lambda_hat(const Realization& z, const ControllerArtifacts& art) {
    const auto m = static_cast<Eigen::Index>(art.base_edges());
    const auto md = static_cast<Eigen::Index>(art.sum_edges());
    const Geometry eh = edge_vector(z, art.sum_incidence());
    Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(2 * m, md);
    lam.leftCols(m) = edge_block_diagonal(eh.head(2 * m));
    for (Eigen::Index q = 0; q < md - m; ++q) {
        const auto& tri = art.triangles().triangles[art.parents()[static_cast<std::size_t>(q)]];
        const Eigen::Vector2d eg = eh.segment<2>(2 * (m + q));
        lam.block<2, 1>(2 * static_cast<Eigen::Index>(tri.first), m + q) += tri.first_sign * eg;
        lam.block<2, 1>(2 * static_cast<Eigen::Index>(tri.second), m + q) += tri.second_sign * eg;
    }
    return lam;
}

Eigen::VectorXd control_varying(const Realization& z, const ControllerArtifacts& art) {
    const ScaleState st = scale_function(z, art);
    const auto m = static_cast<Eigen::Index>(art.base_edges());
    const Eigen::VectorXd r = rigidity_function_hat(z, art).head(m);
    const Eigen::VectorXd res = r - st.scale * art.shape().squared();
    const Eigen::MatrixXd gain = gain_matrix(z, art, st) / (st.denominator * st.denominator);
    return -art.incidence().expanded.transpose() * (lambda_hat(z, art) * (gain.transpose() * res));
}

double controllability_linear_residual(const Realization& z0, const Realization& zf_target, const Eigen::VectorXd& delta,
                                       const Eigen::VectorXd& gains, const OrientedIncidence& inc) {
    const Eigen::VectorXd lhs = inc.expanded * delta.cwiseProduct(gains);
    const Eigen::VectorXd rhs = inc.expanded * (zf_target - z0);
    return (lhs - rhs).norm();
}

namespace {

struct GainSolve {
    Eigen::VectorXd gains;
    Eigen::Vector2d offset = Eigen::Vector2d::Zero();
    bool ok = true;
    std::string why;
};

// Per axis, a_k = (c_k + t) / delta_k with t nearest to a = 1 subject to a_k >= min_gain.
GainSolve solve_gains(const Realization& z0, const Realization& target, const Eigen::VectorXd& delta,
                      double min_gain) {
    GainSolve out;
    out.gains = Eigen::VectorXd::Ones(z0.size());
    const double tiny = 1e-12 * std::max(1.0, delta.cwiseAbs().maxCoeff());
    for (int axis = 0; axis < 2; ++axis) {
        double num = 0.0;
        double den = 0.0;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = axis; k < z0.size(); k += 2) {
            const double d = delta(k);
            if (std::abs(d) <= tiny) continue;
            const double c = target(k) - z0(k);
            num += 1.0 / d - c / (d * d);
            den += 1.0 / (d * d);
            const double bound = min_gain * d - c;
            if (d > 0.0) lo = std::max(lo, bound);
            else hi = std::min(hi, bound);
        }
        if (den == 0.0) continue;
        if (lo > hi) {
            out.ok = false;
            out.why = "no positive gains along axis " + std::to_string(axis);
            return out;
        }
        const double t = std::clamp(num / den, lo, hi);
        out.offset(axis) = t;
        for (Eigen::Index k = axis; k < z0.size(); k += 2) {
            if (std::abs(delta(k)) <= tiny) continue;
            out.gains(k) = (target(k) - z0(k) + t) / delta(k);
        }
    }
    return out;
}

}  // namespace

ControllabilityResult solve_controllability_gains(const Realization& z0, const Realization& zf_target, double lambda,
                                                  const ControllerArtifacts& art,
                                                  const ControllabilityOptions& options) {
    const auto n2 = static_cast<Eigen::Index>(2 * art.graph().vertex_count());
    if (z0.size() != n2 || zf_target.size() != n2) throw DimensionError("realization length must be 2n");
    if (lambda <= 0.0) throw PreconditionError("target scale must be positive");
    const Eigen::VectorXd rt = rigidity_function(edge_vector(zf_target, art.incidence()));
    const Eigen::VectorXd want = lambda * art.shape().squared();
    if ((rt - want).cwiseAbs().maxCoeff() > 1e-4 * want.cwiseAbs().maxCoeff())
        throw PreconditionError("target is not similar to the shape at the requested scale");

    SimConfig cfg;
    cfg.dt = options.dt;
    cfg.t_max = options.t_max;
    cfg.convergence_tol = options.convergence_tol;
    cfg.record_stride = 1000;
    auto shared = std::make_shared<const ControllerArtifacts>(art);

    ControllabilityResult result;
    const Trajectory reference = integrate(z0, VaryingScaleController(shared), cfg);
    if (!reference.converged()) {
        result.diagnostic = "reference run did not converge: " + to_string(reference.termination);
        return result;
    }
    Eigen::VectorXd delta = reference.final().z - z0;

    for (int it = 1; it <= options.max_iterations; ++it) {
        result.iterations = it;
        const GainSolve gs = solve_gains(z0, zf_target, delta, options.min_gain);
        if (!gs.ok) {
            result.diagnostic = gs.why;
            return result;
        }
        result.gains = gs.gains;
        result.offset = gs.offset;
        Eigen::VectorXd shifted = zf_target;
        for (Eigen::Index k = 0; k < shifted.size(); ++k) shifted(k) += gs.offset(k % 2);
        result.linear_residual = controllability_linear_residual(z0, shifted, delta, gs.gains, art.incidence());

        const Trajectory run = integrate(z0, VaryingScaleController(shared, gs.gains), cfg);
        if (!run.converged()) {
            result.diagnostic = "closed loop did not converge: " + to_string(run.termination);
            return result;
        }
        result.final_scale = run.final().scale;
        result.scale_error = std::abs(result.final_scale - lambda) / lambda;
        if (result.scale_error <= options.scale_tolerance) {
            result.feasible = true;
            std::ostringstream msg;
            msg << "scale " << result.final_scale << " after " << it << " iteration(s)";
            result.diagnostic = msg.str();
            return result;
        }
        delta = (run.final().z - z0).cwiseQuotient(gs.gains);
    }
    result.diagnostic = "scale target not reached within the iteration budget";
    return result;
}

}  // namespace shapeform
