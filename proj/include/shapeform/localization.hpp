#pragma once

#include "shapeform/simulation.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <ostream>
#include <vector>

namespace shapeform {

struct SensorScene {
    std::array<Eigen::Vector2d, 3> sensors;
    Eigen::Vector2d target = Eigen::Vector2d::Zero();
    double sigma = 1.0;
};

enum class RangeCheck { Strict, Relaxed };

struct SceneInfo {
    double range = 0.0;          // mean sensor-target distance
    double relative_spread = 0.0;
};

// Strict mode rejects range spreads above 1e-6.
SceneInfo validate_scene(const SensorScene& scene, RangeCheck mode = RangeCheck::Strict);

// Angles at the target between consecutive bearings, ordered (12, 13, 23).
std::array<double, 3> subtended_angles(const SensorScene& scene);

std::array<double, 3> optimal_angles();

double delta_inverse(const std::array<double, 3>& angles);

double fisher_determinant(const std::array<double, 3>& angles, double r, double sigma);

// det at the optimum minus det at the given angles.
double determinant_gap(const std::array<double, 3>& angles, double r, double sigma);

// cos t23 cos(t12 - t13) + cos t13 cos(t12 - t23) + cos t12 cos(t23 - t13)
// on descending-sorted angles; equals 2 * gap - 3/2 at r = sigma = 1.
double cosine_product_sum(const std::array<double, 3>& angles);

// Sorted angles from the pair (d1, d2) with the three summing to 2 pi.
std::array<double, 3> angles_from_differences(double d1, double d2);

struct MonotonicityViolation {
    double d1 = 0.0;
    double d2 = 0.0;
    double slope_d1 = 0.0;
    double slope_d2 = 0.0;
};

struct MonotonicityReport {
    std::size_t points = 0;
    std::vector<MonotonicityViolation> violations;

    bool passed() const { return points > 0 && violations.empty(); }
};

// Region 0 < d2 - d1 < pi/2, 0 < 2 d1 + d2 < pi/2, d1, d2 > 0 on a grid of the given step.
MonotonicityReport monotonicity_check(double step = 0.01, double fd_step = 1e-5);

struct LocalizationSample {
    double t = 0.0;
    double delta_inv = 0.0;
    double dos_inv = 0.0;
    double fisher_det = 0.0;
};

struct LocalizationRun {
    Trajectory trajectory;
    std::vector<LocalizationSample> series;
};

// Target defaults to the circumcenter of the current sensor triangle. The
// determinant uses the fixed common range when given, else the measured mean range.
LocalizationRun localization_experiment(const Realization& z0, const Controller& controller, const SimConfig& config,
                                        std::optional<Eigen::Vector2d> target = std::nullopt, double sigma = 1.0,
                                        std::optional<double> range = 1.0);

struct DominanceReport {
    std::size_t compared = 0;
    std::size_t violations = 0;
    double worst_margin = 0.0;  // min of (upper - lower) / max(1, |lower|)
};

// Compares two determinant series at the union of their sample times past
// skip_fraction of the longer horizon; a finished run holds its last value.
DominanceReport determinant_dominance(const std::vector<LocalizationSample>& upper,
                                      const std::vector<LocalizationSample>& lower, double skip_fraction,
                                      double tolerance);

void write_localization_csv(std::ostream& os, const std::vector<LocalizationSample>& series);

Eigen::Vector2d circumcenter(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

}  // namespace shapeform
