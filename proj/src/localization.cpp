#include "shapeform/localization.hpp"

#include "shapeform/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iterator>
#include <limits>
#include <numbers>

namespace shapeform {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double sin_sq_sum(const std::array<double, 3>& a) {
    double s = 0.0;
    for (double x : a) s += std::sin(x) * std::sin(x);
    return s;
}

std::array<double, 3> sorted_descending(std::array<double, 3> a) {
    std::sort(a.begin(), a.end(), std::greater<>());
    return a;
}

}  // namespace

SceneInfo validate_scene(const SensorScene& scene, RangeCheck mode) {
    if (!(scene.sigma > 0.0)) throw PreconditionError("bearing noise must be positive");
    std::array<double, 3> ranges{};
    for (int i = 0; i < 3; ++i) {
        ranges[i] = (scene.sensors[i] - scene.target).norm();
        if (ranges[i] == 0.0) throw PreconditionError("target coincides with a sensor");
    }
    const auto [lo, hi] = std::minmax_element(ranges.begin(), ranges.end());
    SceneInfo info;
    info.range = (ranges[0] + ranges[1] + ranges[2]) / 3.0;
    info.relative_spread = (*hi - *lo) / info.range;
    if (mode == RangeCheck::Strict && info.relative_spread > 1e-6)
        throw PreconditionError("sensor ranges differ by more than the relative tolerance");
    return info;
}

std::array<double, 3> subtended_angles(const SensorScene& scene) {
    std::array<double, 3> bearing{};
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector2d d = scene.sensors[i] - scene.target;
        if (d.norm() == 0.0) throw PreconditionError("target coincides with a sensor");
        bearing[i] = std::atan2(d.y(), d.x());
    }
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return bearing[a] < bearing[b]; });

    // Arcs between cyclically consecutive bearings; they close to 2 pi.
    double arc[3][3] = {};
    for (int k = 0; k < 3; ++k) {
        const int a = order[k];
        const int b = order[(k + 1) % 3];
        double d = bearing[b] - bearing[a];
        if (k == 2) d += kTwoPi;
        arc[a][b] = arc[b][a] = d;
    }
    return {arc[0][1], arc[0][2], arc[1][2]};
}

std::array<double, 3> optimal_angles() {
    const double half = 0.5 * std::acos(-0.5);
    return {half, half, kTwoPi - 2.0 * half};
}

double delta_inverse(const std::array<double, 3>& angles) {
    const auto s = sorted_descending(angles);
    const double d1 = s[1] - s[2];
    const double d2 = s[0] - s[1];
    return d1 + d2;
}

double fisher_determinant(const std::array<double, 3>& angles, double r, double sigma) {
    if (!(r > 0.0) || !(sigma > 0.0)) throw PreconditionError("range and noise must be positive");
    return sin_sq_sum(angles) / std::pow(r * sigma, 4);
}

double determinant_gap(const std::array<double, 3>& angles, double r, double sigma) {
    if (!(r > 0.0) || !(sigma > 0.0)) throw PreconditionError("range and noise must be positive");
    return (2.25 - sin_sq_sum(angles)) / std::pow(r * sigma, 4);
}

double cosine_product_sum(const std::array<double, 3>& angles) {
    const auto s = sorted_descending(angles);
    const double t23 = s[0];
    const double t12 = s[1];
    const double t13 = s[2];
    return std::cos(t23) * std::cos(t12 - t13) + std::cos(t13) * std::cos(t12 - t23) +
           std::cos(t12) * std::cos(t23 - t13);
}

std::array<double, 3> angles_from_differences(double d1, double d2) {
    const double low = (kTwoPi - 2.0 * d1 - d2) / 3.0;
    const double mid = low + d1;
    return {mid, low, mid + d2};
}

MonotonicityReport monotonicity_check(double step, double fd_step) {
    if (!(step > 0.0) || !(fd_step > 0.0)) throw PreconditionError("grid steps must be positive");
    constexpr double quarter = std::numbers::pi / 2.0;
    auto gap = [](double d1, double d2) { return determinant_gap(angles_from_differences(d1, d2), 1.0, 1.0); };
    MonotonicityReport rep;
    for (int i = 1;; ++i) {
        const double d1 = i * step;
        if (2.0 * d1 >= quarter) break;
        for (int j = 1;; ++j) {
            const double d2 = j * step;
            if (2.0 * d1 + d2 >= quarter) break;
            if (!(d2 - d1 > 0.0 && d2 - d1 < quarter)) continue;
            ++rep.points;
            const double s1 = (gap(d1 + fd_step, d2) - gap(d1 - fd_step, d2)) / (2.0 * fd_step);
            const double s2 = (gap(d1, d2 + fd_step) - gap(d1, d2 - fd_step)) / (2.0 * fd_step);
            if (!(s1 > 0.0 && s2 > 0.0)) rep.violations.push_back({d1, d2, s1, s2});
        }
    }
    if (rep.points == 0) throw PreconditionError("empty admissible region");
    return rep;
}

Eigen::Vector2d circumcenter(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    const double d = 2.0 * (a.x() * (b.y() - c.y()) + b.x() * (c.y() - a.y()) + c.x() * (a.y() - b.y()));
    if (d == 0.0) throw PreconditionError("collinear sensors have no circumcenter");
    const double a2 = a.squaredNorm();
    const double b2 = b.squaredNorm();
    const double c2 = c.squaredNorm();
    return {(a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d,
            (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d};
}

LocalizationRun localization_experiment(const Realization& z0, const Controller& controller, const SimConfig& config,
                                        std::optional<Eigen::Vector2d> target, double sigma,
                                        std::optional<double> range) {
    if (controller.artifacts().graph().vertex_count() != 3)
        throw PreconditionError("localization experiment needs three agents");
    LocalizationRun run;
    run.trajectory = integrate(z0, controller, config);
    for (const auto& s : run.trajectory.samples) {
        SensorScene scene;
        for (int i = 0; i < 3; ++i) scene.sensors[i] = s.z.segment<2>(2 * i);
        scene.target = target ? *target : circumcenter(scene.sensors[0], scene.sensors[1], scene.sensors[2]);
        scene.sigma = sigma;
        const SceneInfo info = validate_scene(scene, RangeCheck::Relaxed);
        const auto angles = subtended_angles(scene);
        run.series.push_back({s.t, delta_inverse(angles), s.integrand, fisher_determinant(angles, range ? *range : info.range, sigma)});
    }
    return run;
}

namespace {

double det_at(const std::vector<LocalizationSample>& series, double t) {
    if (t >= series.back().t) return series.back().fisher_det;
    const auto it = std::lower_bound(series.begin(), series.end(), t,
                                     [](const LocalizationSample& s, double v) { return s.t < v; });
    if (it == series.begin()) return it->fisher_det;
    const auto prev = std::prev(it);
    const double w = (t - prev->t) / (it->t - prev->t);
    return (1.0 - w) * prev->fisher_det + w * it->fisher_det;
}

}  // namespace

DominanceReport determinant_dominance(const std::vector<LocalizationSample>& upper,
                                      const std::vector<LocalizationSample>& lower, double skip_fraction,
                                      double tolerance) {
    DominanceReport rep;
    if (upper.empty() || lower.empty()) return rep;
    const double start = skip_fraction * std::max(upper.back().t, lower.back().t);
    std::vector<double> times;
    for (const auto& s : upper) times.push_back(s.t);
    for (const auto& s : lower) times.push_back(s.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (double t : times) {
        if (t < start) continue;
        const double a = det_at(upper, t);
        const double b = det_at(lower, t);
        const double margin = (a - b) / std::max(1.0, std::abs(b));
        ++rep.compared;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -tolerance) ++rep.violations;
    }
    return rep;
}

void write_localization_csv(std::ostream& os, const std::vector<LocalizationSample>& series) {
    os << "t,deltaInv,dosInv,fisherDet\n" << std::setprecision(12);
    for (const auto& s : series) os << s.t << ',' << s.delta_inv << ',' << s.dos_inv << ',' << s.fisher_det << '\n';
}

}  // namespace shapeform
