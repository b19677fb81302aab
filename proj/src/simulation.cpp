#include "shapeform/simulation.hpp"

#include "shapeform/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

namespace shapeform {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
    if (!(t_max >= dt)) throw PreconditionError("tMax must be at least dt");
    if (!(convergence_tol > 0.0)) throw PreconditionError("convergence tolerance must be positive");
    if (record_stride < 1) throw PreconditionError("record stride must be at least 1");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Converged: return "converged";
        case Termination::MaxTime: return "max_time";
        case Termination::Diverged: return "diverged";
        case Termination::StabilityViolation: return "stability_violation";
        case Termination::Degenerate: return "degenerate";
    }
    return "unknown";
}

Eigen::VectorXd Controller::residual(const Realization& z, double theta) const {
    return rigidity_function(edge_vector(z, art_->incidence())) - theta * art_->shape().squared();
}

double Controller::integrand(const Realization& z, double theta) const {
    const Geometry e = edge_vector(z, art_->incidence());
    return (rigidity_matrix(e, art_->incidence()).transpose() * residual(z, theta)).squaredNorm();
}

ConstantScaleController::ConstantScaleController(std::shared_ptr<const ControllerArtifacts> art, double sc)
    : Controller(std::move(art)), sc_(sc) {
    if (!(sc > 0.0)) throw PreconditionError("constant scale must be positive");
}

Eigen::VectorXd ConstantScaleController::velocity(const Realization& z) const {
    return control_constant(edge_vector(z, art_->incidence()), art_->shape(), sc_, art_->incidence());
}

double ConstantScaleController::lyapunov(const Realization& z) const { return 0.5 * residual(z, sc_).squaredNorm(); }

VaryingScaleController::VaryingScaleController(std::shared_ptr<const ControllerArtifacts> art,
                                               std::optional<Eigen::VectorXd> gains,
                                               std::optional<std::pair<double, double>> clamp)
    : Controller(std::move(art)), gains_(std::move(gains)), clamp_(clamp) {
    const auto n2 = 2 * art_->graph().vertex_count();
    if (gains_ && (gains_->size() != n2 || (gains_->array() <= 0.0).any()))
        throw PreconditionError("gains must be 2n strictly positive entries");
    if (clamp_ && !(clamp_->first > 0.0 && clamp_->first < clamp_->second))
        throw PreconditionError("scale clamp must satisfy 0 < min < max");
}

double VaryingScaleController::scale(const Realization& z) const {
    const double s = scale_function(z, *art_).scale;
    return clamp_ ? std::clamp(s, clamp_->first, clamp_->second) : s;
}

Eigen::VectorXd VaryingScaleController::velocity(const Realization& z) const {
    Eigen::VectorXd u;
    if (clamp_) {
        const double s = scale_function(z, *art_).scale;
        if (s < clamp_->first || s > clamp_->second) {
            const double bound = std::clamp(s, clamp_->first, clamp_->second);
            u = control_constant(edge_vector(z, art_->incidence()), art_->shape(), bound, art_->incidence());
        }
    }
    if (u.size() == 0) u = control_varying(z, *art_);
    if (gains_) u = u.cwiseProduct(*gains_);
    return u;
}

double VaryingScaleController::lyapunov(const Realization& z) const { return residual(z, scale(z)).squaredNorm(); }

namespace {

double diameter(const Realization& z) {
    double d = 0.0;
    const Eigen::Index n = z.size() / 2;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) d = std::max(d, (z.segment<2>(2 * i) - z.segment<2>(2 * j)).norm());
    return d;
}

Sample evaluate(const Controller& c, const Realization& z, double t) {
    Sample s;
    s.t = t;
    s.z = z;
    s.scale = c.scale(z);
    s.integrand = c.integrand(z, s.scale);
    s.residual = c.residual(z, s.scale).cwiseAbs().maxCoeff();
    s.lyapunov = c.lyapunov(z);
    return s;
}

}  // namespace

Trajectory integrate(const Realization& z0, const Controller& controller, const SimConfig& config) {
    config.validate();
    const int n = controller.artifacts().graph().vertex_count();
    if (z0.size() != 2 * n) throw DimensionError("initial realization length must be 2n");
    if (is_collinear(z0)) throw PreconditionError("initial realization is collinear");

    Trajectory traj;
    traj.agents = n;
    const double limit = config.divergence_factor * std::max(diameter(z0), 1e-300) + z0.cwiseAbs().maxCoeff();
    const auto steps = static_cast<long>(std::ceil(config.t_max / config.dt - 1e-9));

    Sample current;
    try {
        current = evaluate(controller, z0, 0.0);
    } catch (const DegenerateConfigurationError& ex) {
        traj.termination = Termination::Degenerate;
        traj.diagnostic = ex.what();
        return traj;
    }
    traj.samples.push_back(current);
    if (current.residual < config.convergence_tol) {
        traj.termination = Termination::Converged;
        return traj;
    }

    Realization z = z0;
    const double h = config.dt;
    for (long step = 1; step <= steps; ++step) {
        const double t = static_cast<double>(step) * h;
        Sample next;
        try {
            const Eigen::VectorXd k1 = controller.velocity(z);
            const Eigen::VectorXd k2 = controller.velocity(z + 0.5 * h * k1);
            const Eigen::VectorXd k3 = controller.velocity(z + 0.5 * h * k2);
            const Eigen::VectorXd k4 = controller.velocity(z + h * k3);
            z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!z.allFinite() || z.cwiseAbs().maxCoeff() > limit) {
                traj.termination = Termination::Diverged;
                traj.diagnostic = "state exceeded the divergence bound at t=" + std::to_string(t);
                break;
            }
            next = evaluate(controller, z, t);
        } catch (const DegenerateConfigurationError& ex) {
            traj.termination = Termination::Degenerate;
            traj.diagnostic = ex.what();
            break;
        }
        next.cumulative_cost = current.cumulative_cost + 0.5 * h * (current.integrand + next.integrand);

        const bool violated = next.lyapunov > current.lyapunov + h * config.lyapunov_slack;
        const bool done = next.residual < config.convergence_tol;
        current = next;
        if (violated || done || step == steps || step % config.record_stride == 0) traj.samples.push_back(current);
        if (violated) {
            traj.termination = Termination::StabilityViolation;
            traj.diagnostic = "Lyapunov function increased at t=" + std::to_string(t);
            break;
        }
        if (done) {
            traj.termination = Termination::Converged;
            break;
        }
        if (step == steps) traj.termination = Termination::MaxTime;
    }
    if (traj.samples.back().t != current.t) traj.samples.push_back(current);
    return traj;
}

CostResult accumulate_cost(const Trajectory& traj) {
    CostResult out;
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
        const auto& a = traj.samples[k - 1];
        const auto& b = traj.samples[k];
        out.value += 0.5 * (b.t - a.t) * (a.integrand + b.integrand);
    }
    out.truncated = !traj.converged();
    return out;
}

PathLengths path_lengths(const Trajectory& traj) {
    PathLengths out;
    out.per_agent.assign(static_cast<std::size_t>(traj.agents), 0.0);
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
        const Eigen::VectorXd d = traj.samples[k].z - traj.samples[k - 1].z;
        for (int i = 0; i < traj.agents; ++i) out.per_agent[i] += d.segment<2>(2 * i).norm();
    }
    out.max_agent = 1;
    for (int i = 0; i < traj.agents; ++i) {
        out.total += out.per_agent[i];
        if (out.per_agent[i] > out.per_agent[out.max_agent - 1]) out.max_agent = i + 1;
    }
    return out;
}

ConvergenceReport convergence_report(const Trajectory& traj) {
    ConvergenceReport rep;
    if (traj.samples.empty()) return rep;
    rep.final_scale = traj.final().scale;
    rep.residual = traj.final().residual;

    const std::size_t count = traj.samples.size();
    const std::size_t skip = count / 10;
    std::vector<double> ts;
    std::vector<double> ys;
    for (std::size_t k = skip; k + skip < count; ++k) {
        const auto& s = traj.samples[k];
        if (s.residual > 0.0) {
            ts.push_back(s.t);
            ys.push_back(std::log(s.residual));
        }
    }
    if (ts.size() < 3) return rep;
    const auto m = static_cast<double>(ts.size());
    double mt = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        mt += ts[k];
        my += ys[k];
    }
    mt /= m;
    my /= m;
    double stt = 0.0;
    double sty = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        stt += (ts[k] - mt) * (ts[k] - mt);
        sty += (ts[k] - mt) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    if (stt == 0.0) return rep;
    rep.rate = sty / stt;
    rep.r_squared = syy > 0.0 ? (sty * sty) / (stt * syy) : 1.0;
    rep.rate_defined = true;
    rep.exponential = rep.rate < 0.0 && rep.r_squared > 0.95;
    return rep;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t";
    for (int i = 1; i <= traj.agents; ++i) os << ",z" << i << "x,z" << i << "y";
    os << ",scale,integrand,cumJ\n";
    os << std::setprecision(12);
    for (const auto& s : traj.samples) {
        os << s.t;
        for (Eigen::Index k = 0; k < s.z.size(); ++k) os << ',' << s.z(k);
        os << ',' << s.scale << ',' << s.integrand << ',' << s.cumulative_cost << '\n';
    }
}

}  // namespace shapeform
