#pragma once

#include "shapeform/geometry.hpp"
#include "shapeform/scale_control.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace shapeform {

struct SimConfig {
    double dt = 1e-3;
    double t_max = 50.0;
    double convergence_tol = 1e-6;
    int record_stride = 10;
    double divergence_factor = 1e6;
    double lyapunov_slack = 1e-6;

    void validate() const;
};

enum class Termination { Converged, MaxTime, Diverged, StabilityViolation, Degenerate };

std::string to_string(Termination t);

class Controller {
public:
    explicit Controller(std::shared_ptr<const ControllerArtifacts> art) : art_(std::move(art)) {}
    virtual ~Controller() = default;

    virtual Eigen::VectorXd velocity(const Realization& z) const = 0;
    virtual double scale(const Realization& z) const = 0;
    // Monitored function; must not increase along the flow.
    virtual double lyapunov(const Realization& z) const = 0;
    virtual std::string mode() const = 0;

    const ControllerArtifacts& artifacts() const { return *art_; }
    Eigen::VectorXd residual(const Realization& z, double theta) const;
    double integrand(const Realization& z, double theta) const;

protected:
    std::shared_ptr<const ControllerArtifacts> art_;
};

class ConstantScaleController : public Controller {
public:
    ConstantScaleController(std::shared_ptr<const ControllerArtifacts> art, double sc);

    Eigen::VectorXd velocity(const Realization& z) const override;
    double scale(const Realization&) const override { return sc_; }
    double lyapunov(const Realization& z) const override;
    std::string mode() const override { return "constant"; }

private:
    double sc_;
};

class VaryingScaleController : public Controller {
public:
    explicit VaryingScaleController(std::shared_ptr<const ControllerArtifacts> art,
                                    std::optional<Eigen::VectorXd> gains = std::nullopt,
                                    std::optional<std::pair<double, double>> clamp = std::nullopt);

    Eigen::VectorXd velocity(const Realization& z) const override;
    double scale(const Realization& z) const override;
    double lyapunov(const Realization& z) const override;
    std::string mode() const override { return gains_ ? "controllable" : "varying"; }

private:
    std::optional<Eigen::VectorXd> gains_;
    std::optional<std::pair<double, double>> clamp_;
};

struct Sample {
    double t = 0.0;
    Realization z;
    double scale = 0.0;
    double integrand = 0.0;
    double cumulative_cost = 0.0;
    double residual = 0.0;  // infinity norm
    double lyapunov = 0.0;
};

struct Trajectory {
    std::vector<Sample> samples;
    Termination termination = Termination::MaxTime;
    std::string diagnostic;
    int agents = 0;

    bool converged() const { return termination == Termination::Converged; }
    const Sample& final() const { return samples.back(); }
};

Trajectory integrate(const Realization& z0, const Controller& controller, const SimConfig& config = {});

struct CostResult {
    double value = 0.0;
    bool truncated = false;
};

// Composite trapezoid over the recorded integrand samples.
CostResult accumulate_cost(const Trajectory& traj);

struct PathLengths {
    std::vector<double> per_agent;
    double total = 0.0;
    int max_agent = 0;  // 1-based
};

PathLengths path_lengths(const Trajectory& traj);

struct ConvergenceReport {
    double final_scale = 0.0;
    double residual = 0.0;
    double rate = 0.0;
    double r_squared = 0.0;
    bool rate_defined = false;
    bool exponential = false;
};

ConvergenceReport convergence_report(const Trajectory& traj);

// Header t,z1x,z1y,...,scale,integrand,cumJ; 12 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace shapeform
