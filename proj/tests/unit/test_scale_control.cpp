#include "shapeform/error.hpp"
#include "shapeform/scale_control.hpp"
#include "shapeform/simulation.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

using namespace shapeform;

namespace {

Graph four_a() { return Graph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {2, 4}}); }
ShapeVector four_a_shape() { return ShapeVector::from_squared((Eigen::VectorXd(5) << 3, 3, 3, 2, 3).finished()); }
Eigen::VectorXd four_z0() { return (Eigen::VectorXd(8) << 0, 0, 1, 0, 1, 2, 0, 2).finished(); }

double golden_section(const std::function<double(double)>& f, double a, double b) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    while (b - a > 1e-12) {
        if (f(c) < f(d)) b = d;
        else a = c;
        c = b - ratio * (b - a);
        d = a + ratio * (b - a);
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("optimal constant scale equals 41/80 on the four-agent square") {
    const auto inc = oriented_incidence(four_a());
    const double sc = optimal_constant_scale(edge_vector(four_z0(), inc), four_a_shape());
    CHECK(sc == 41.0 / 80.0);
}

TEST_CASE("optimal constant scale minimizes the closed-form cost") {
    std::mt19937_64 rng(5);
    const auto inc = oriented_incidence(four_a());
    for (int trial = 0; trial < 10; ++trial) {
        const Geometry e0 = edge_vector(testsupport::random_points(rng, 4), inc);
        const auto f = [&](double sc) { return constant_cost_closed_form(e0, four_a_shape(), sc); };
        const double oracle = golden_section(f, 1e-6, 20.0);
        CHECK(optimal_constant_scale(e0, four_a_shape()) == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("closed-form constant cost") {
    const auto inc = oriented_incidence(four_a());
    const Geometry e0 = edge_vector(four_z0(), inc);
    CHECK(constant_cost_closed_form(e0, four_a_shape(), 0.1) == doctest::Approx(5.525).epsilon(1e-12));
    CHECK(constant_cost_closed_form(e0, four_a_shape(), 0.5) == doctest::Approx(2.125).epsilon(1e-12));
    CHECK_THROWS_AS(constant_cost_closed_form(e0, four_a_shape(), 0.0), PreconditionError);
}

TEST_CASE("controller artifacts for the four-agent graph") {
    const auto art = ControllerArtifacts::build(four_a(), four_a_shape());
    CHECK(art.complement().edge_count() == 1);
    CHECK(art.sum_edges() == 6);
    CHECK(art.triangles().size() == 4);
    REQUIRE(art.parents().size() == 1);
    const auto& parent = art.triangles().triangles[art.parents()[0]];
    CHECK(parent.closing == 5);
    CHECK(art.dhat().row(5).isZero());
    CHECK(art.shat()(5) == 0.0);
    CHECK_THROWS_AS(ControllerArtifacts::build(four_a(), ShapeVector::from_squared(Eigen::Vector3d::Ones())),
                    DimensionError);
}

TEST_CASE("D hat diagonal and off-diagonal entries on the triangle") {
    const Graph tri(3, {{1, 2}, {2, 3}, {1, 3}});
    const auto s = ShapeVector::from_squared(Eigen::Vector3d(1.0, 2.0, 4.0));
    const auto art = ControllerArtifacts::build(tri, s);
    const Eigen::MatrixXd& d = art.dhat();
    CHECK(d(0, 0) == doctest::Approx(2.0 + 4.0 - 4.0 * 1.0));
    CHECK(d(0, 1) == doctest::Approx(2.0 - 4.0));
    CHECK(d(0, 2) == doctest::Approx(4.0 - 2.0));
    CHECK(d(2, 1) == doctest::Approx(2.0 - 1.0));
}

TEST_CASE("scale function is invariant to rigid motions and homogeneous of degree two") {
    const auto art = ControllerArtifacts::build(four_a(), four_a_shape());
    const Eigen::VectorXd z = four_z0();
    const double s0 = scale_function(z, art).scale;
    Eigen::VectorXd zr(8);
    const double c = std::cos(0.4);
    const double sn = std::sin(0.4);
    for (int i = 0; i < 4; ++i)
        zr.segment<2>(2 * i) << c * z(2 * i) - sn * z(2 * i + 1) + 3.0, sn * z(2 * i) + c * z(2 * i + 1) - 1.0;
    CHECK(scale_function(zr, art).scale == doctest::Approx(s0).epsilon(1e-12));
    CHECK(scale_function(2.0 * z, art).scale == doctest::Approx(4.0 * s0).epsilon(1e-12));
}

TEST_CASE("scale function returns the exact scale on similar realizations") {
    const Graph tri(3, {{1, 2}, {2, 3}, {1, 3}});
    const auto s = ShapeVector::from_lengths(Eigen::Vector3d(3, 5, 4));
    const auto art = ControllerArtifacts::build(tri, s);
    Eigen::VectorXd z(6);
    z << 0, 0, 6, 0, 0, 8;
    CHECK(scale_function(z, art).scale == doctest::Approx(2.0));
    CHECK(variational_scale(z, art) == doctest::Approx(2.0));
}

TEST_CASE("Lambda hat reproduces the finite-difference Jacobian of the summed rigidity function") {
    std::mt19937_64 rng(99);
    const Graph g6(6, {{1, 2}, {2, 3}, {3, 4}, {1, 4}, {1, 5}, {4, 5}, {2, 6}, {3, 6}, {5, 6}});
    const auto s6 = ShapeVector::from_squared(Eigen::VectorXd::Ones(9));
    const ControllerArtifacts arts[] = {ControllerArtifacts::build(four_a(), four_a_shape()),
                                        ControllerArtifacts::build(g6, s6)};
    for (const auto& art : arts) {
        const int n = art.graph().vertex_count();
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::VectorXd z = testsupport::random_points(rng, n);
            const auto f = [&](const Eigen::VectorXd& x) { return rigidity_function_hat(x, art); };
            const Eigen::MatrixXd fd = testsupport::fd_jacobian(f, z);
            const Eigen::MatrixXd analytic = lambda_hat(z, art).transpose() * art.incidence().expanded;
            CHECK((analytic - fd).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("varying-scale control is the negative gradient of the scaled residual") {
    std::mt19937_64 rng(3);
    const auto art = ControllerArtifacts::build(four_a(), four_a_shape());
    const auto m = static_cast<Eigen::Index>(art.base_edges());
    const auto potential = [&](const Eigen::VectorXd& z) {
        const double s = scale_function(z, art).scale;
        const Eigen::VectorXd r = rigidity_function_hat(z, art).head(m);
        return Eigen::VectorXd::Constant(1, 0.5 * (r - s * art.shape().squared()).squaredNorm());
    };
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::VectorXd z = four_z0() + 0.3 * testsupport::random_points(rng, 4);
        const Eigen::VectorXd grad = testsupport::fd_jacobian(potential, z).transpose();
        const Eigen::VectorXd u = control_varying(z, art);
        CHECK((u + grad).cwiseAbs().maxCoeff() < 1e-6 * std::max(1.0, grad.norm()));
    }
}

TEST_CASE("constant-scale control is the negative gradient of its potential") {
    const auto inc = oriented_incidence(four_a());
    const auto potential = [&](const Eigen::VectorXd& z) {
        const Eigen::VectorXd r = rigidity_function(edge_vector(z, inc));
        return Eigen::VectorXd::Constant(1, 0.5 * (r - 0.4 * four_a_shape().squared()).squaredNorm());
    };
    const Eigen::VectorXd grad = testsupport::fd_jacobian(potential, four_z0()).transpose();
    const Eigen::VectorXd u = control_constant(edge_vector(four_z0(), inc), four_a_shape(), 0.4, inc);
    CHECK((u + grad).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("gain matrix is singular exactly when r is proportional to the shape") {
    const Graph tri(3, {{1, 2}, {2, 3}, {1, 3}});
    const auto art = ControllerArtifacts::build(tri, ShapeVector::from_squared(Eigen::Vector3d::Ones()));
    Eigen::VectorXd eq(6);
    eq << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;
    const Eigen::MatrixXd at_eq = gain_matrix(eq, art, scale_function(eq, art));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_eq(at_eq);
    CHECK(svd_eq.singularValues().minCoeff() < 1e-8 * at_eq.norm());

    Eigen::VectorXd skew(6);
    skew << 0, 0, 2, 0, 0.3, 1.0;
    const Eigen::MatrixXd at_skew = gain_matrix(skew, art, scale_function(skew, art));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_skew(at_skew);
    CHECK(svd_skew.singularValues().minCoeff() > 1e-4 * at_skew.norm());
}

TEST_CASE("controllability gains reach a scaled target") {
    auto art = std::make_shared<const ControllerArtifacts>(ControllerArtifacts::build(four_a(), four_a_shape()));
    const Eigen::VectorXd z0 = four_z0();
    const Trajectory ref = integrate(z0, VaryingScaleController(art));
    REQUIRE(ref.converged());
    const double lambda = 1.2 * ref.final().scale;
    const double k = std::sqrt(lambda / ref.final().scale);
    const Eigen::VectorXd target = k * ref.final().z;
    const auto result = solve_controllability_gains(z0, target, lambda, *art);
    REQUIRE(result.feasible);
    CHECK((result.gains.array() > 0.0).all());
    CHECK(result.linear_residual < 1e-8);
    CHECK(result.scale_error <= 1e-3);
    CHECK_THROWS_AS(solve_controllability_gains(z0, z0, lambda, *art), PreconditionError);
}
