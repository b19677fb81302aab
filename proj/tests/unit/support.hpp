#pragma once

#include <Eigen/Dense>

#include <functional>
#include <random>

namespace testsupport {

// Central-difference Jacobian of f at x.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    const Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd jac(f0.size(), x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp(k) += h;
        xm(k) -= h;
        jac.col(k) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return jac;
}

inline Eigen::VectorXd random_points(std::mt19937_64& rng, int n, double lo = -2.0, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd z(2 * n);
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = u(rng);
    return z;
}

}  // namespace testsupport
