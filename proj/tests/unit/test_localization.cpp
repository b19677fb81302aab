#include "shapeform/error.hpp"
#include "shapeform/localization.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace shapeform;

namespace {

constexpr double kPi = std::numbers::pi;

SensorScene scene_from_bearings(double a, double b, double c, double r = 1.0) {
    SensorScene s;
    s.sensors = {Eigen::Vector2d(r * std::cos(a), r * std::sin(a)), Eigen::Vector2d(r * std::cos(b), r * std::sin(b)),
                 Eigen::Vector2d(r * std::cos(c), r * std::sin(c))};
    return s;
}

double sin_sq_sum(const std::array<double, 3>& a) {
    return std::pow(std::sin(a[0]), 2) + std::pow(std::sin(a[1]), 2) + std::pow(std::sin(a[2]), 2);
}

}  // namespace

TEST_CASE("equilateral sensors around the centroid subtend 2 pi / 3") {
    const SensorScene s = scene_from_bearings(0.3, 0.3 + 2 * kPi / 3, 0.3 + 4 * kPi / 3);
    const auto angles = subtended_angles(s);
    for (double a : angles) CHECK(a == doctest::Approx(2 * kPi / 3));
    CHECK(delta_inverse(angles) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("subtended angles sum to 2 pi") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int trial = 0; trial < 50; ++trial) {
        const auto angles = subtended_angles(scene_from_bearings(u(rng), u(rng), u(rng), 2.0));
        CHECK(angles[0] + angles[1] + angles[2] == doctest::Approx(2 * kPi).epsilon(1e-9));
    }
    CHECK_THROWS_AS(subtended_angles(scene_from_bearings(0.0, 1.0, 2.0, 0.0)), PreconditionError);
}

TEST_CASE("scene validation enforces equal ranges in strict mode") {
    SensorScene s = scene_from_bearings(0.0, 2.0, 4.0, 3.0);
    CHECK(validate_scene(s).range == doctest::Approx(3.0));
    s.sensors[0] *= 1.1;
    CHECK_THROWS_AS(validate_scene(s), PreconditionError);
    CHECK(validate_scene(s, RangeCheck::Relaxed).relative_spread > 0.09);
    s.sigma = 0.0;
    CHECK_THROWS_AS(validate_scene(s, RangeCheck::Relaxed), PreconditionError);
}

TEST_CASE("Fisher determinant at the optimal angles") {
    const auto opt = optimal_angles();
    CHECK(opt[0] + opt[1] + opt[2] == doctest::Approx(2 * kPi));
    CHECK(fisher_determinant(opt, 1.0, 1.0) == 2.25);
    CHECK(fisher_determinant(opt, 2.0, 0.5) == doctest::Approx(2.25));
    CHECK(fisher_determinant(opt, 2.0, 1.0) == doctest::Approx(2.25 / 16.0));
    CHECK_THROWS_AS(fisher_determinant(opt, 0.0, 1.0), PreconditionError);
}

TEST_CASE("grid maximum of the determinant equals 9/4") {
    double best = 0.0;
    const double step = kPi / 180.0;
    for (int i = 0; i <= 360; ++i)
        for (int j = 0; i + j <= 360; ++j) {
            const double a = i * step;
            const double b = j * step;
            best = std::max(best, fisher_determinant({a, b, 2 * kPi - a - b}, 1.0, 1.0));
        }
    CHECK(std::abs(best - 2.25) < 1e-4);
}

TEST_CASE("determinant gap matches the sine-squared oracle and relates affinely to the cosine sum") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, kPi);
    for (int trial = 0; trial < 100; ++trial) {
        double a = u(rng);
        double b = u(rng);
        if (a + b < kPi) continue;
        const std::array<double, 3> angles{a, b, 2 * kPi - a - b};
        const double gap = determinant_gap(angles, 1.0, 1.0);
        CHECK(std::abs(gap - (2.25 - sin_sq_sum(angles))) / std::max(1.0, std::abs(gap)) < 1e-6);
        CHECK(cosine_product_sum(angles) == doctest::Approx(2.0 * gap - 1.5).epsilon(1e-9));
    }
}

TEST_CASE("reflection and scale invariance") {
    const SensorScene s = scene_from_bearings(0.1, 1.9, 4.0, 2.0);
    SensorScene reflected = s;
    reflected.sensors[1] = -reflected.sensors[1];
    const auto base = subtended_angles(s);
    const auto refl = subtended_angles(reflected);
    CHECK(fisher_determinant(base, 2.0, 1.0) == doctest::Approx(fisher_determinant(refl, 2.0, 1.0)));

    const SensorScene big = scene_from_bearings(0.1, 1.9, 4.0, 6.0);
    const auto big_angles = subtended_angles(big);
    CHECK(delta_inverse(big_angles) == doctest::Approx(delta_inverse(base)));
    CHECK(fisher_determinant(big_angles, 6.0, 1.0) ==
          doctest::Approx(fisher_determinant(base, 2.0, 1.0) / 81.0));
}

TEST_CASE("angles from differences") {
    const auto a = angles_from_differences(0.1, 0.2);
    CHECK(a[0] + a[1] + a[2] == doctest::Approx(2 * kPi));
    CHECK(a[0] - a[1] == doctest::Approx(0.1));
    CHECK(a[2] - a[0] == doctest::Approx(0.2));
}

TEST_CASE("determinant gap is increasing on the admissible grid") {
    const MonotonicityReport rep = monotonicity_check(0.01);
    CHECK(rep.points > 100);
    CHECK(rep.passed());
    CHECK_THROWS_AS(monotonicity_check(0.0), PreconditionError);
}

TEST_CASE("circumcenter is equidistant") {
    const Eigen::Vector2d a(0, 0);
    const Eigen::Vector2d b(3, 1.5);
    const Eigen::Vector2d c(4, 0);
    const Eigen::Vector2d o = circumcenter(a, b, c);
    CHECK((o - a).norm() == doctest::Approx((o - b).norm()));
    CHECK((o - a).norm() == doctest::Approx((o - c).norm()));
    CHECK_THROWS_AS(circumcenter(a, Eigen::Vector2d(1, 0), Eigen::Vector2d(2, 0)), PreconditionError);
}

TEST_CASE("determinant dominance on synthetic series") {
    std::vector<LocalizationSample> upper{{0.0, 0, 0, 1.0}, {1.0, 0, 0, 2.0}, {2.0, 0, 0, 2.25}};
    std::vector<LocalizationSample> lower{{0.0, 0, 0, 1.5}, {1.5, 0, 0, 1.9}, {3.0, 0, 0, 2.2}};
    const auto rep = determinant_dominance(upper, lower, 0.3, 1e-12);
    CHECK(rep.compared == 4);
    CHECK(rep.violations == 0);
    const auto swapped = determinant_dominance(lower, upper, 0.3, 1e-12);
    CHECK(swapped.violations > 0);
}
