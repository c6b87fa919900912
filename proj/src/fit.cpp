#include "f3c/fit.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace f3c {

namespace {

constexpr double kPenalty = 1e6;

struct ParamRef {
    enum Kind { Energy, Gamma, G, Q, Vc, Scale, Baseline } kind;
    int level = 0;
};

ParamRef parse_name(const std::string& name) {
    if (name == "g") return {ParamRef::G};
    if (name == "v_c") return {ParamRef::Vc};
    if (name == "scale") return {ParamRef::Scale};
    if (name == "baseline") return {ParamRef::Baseline};
    if (name.size() == 2 && name[0] == 'e' && name[1] >= '1' && name[1] <= '3') {
        return {ParamRef::Energy, name[1] - '0'};
    }
    if (name.size() == 2 && name[0] == 'q' && name[1] >= '1' && name[1] <= '3') {
        return {ParamRef::Q, name[1] - '0'};
    }
    if (name.size() == 6 && name.rfind("gamma", 0) == 0 && name[5] >= '1' && name[5] <= '3') {
        return {ParamRef::Gamma, name[5] - '0'};
    }
    fail(ErrorCode::InvalidArgument, "unknown fit parameter '" + name + "'");
}

double read_param(const FitProblem& p, const std::string& name) {
    const ParamRef ref = parse_name(name);
    switch (ref.kind) {
        case ParamRef::Energy: return p.config.bound_energies.at(ref.level);
        case ParamRef::Gamma: return p.config.couplings.at(ref.level).gamma();
        case ParamRef::G: return p.config.g.value();
        case ParamRef::Q: return p.params.q.at(ref.level);
        case ParamRef::Vc: return p.params.v_c.value();
        case ParamRef::Scale: return p.scale;
        case ParamRef::Baseline: return p.baseline;
    }
    return 0.0;
}

void write_param(ModelConfig& config, LineShapeParams& params, double& scale, double& baseline,
                 const std::string& name, double value) {
    const ParamRef ref = parse_name(name);
    switch (ref.kind) {
        case ParamRef::Energy: config.bound_energies.at(ref.level) = value; break;
        case ParamRef::Gamma: config.couplings.at(ref.level) = Coupling::from_gamma(value); break;
        case ParamRef::G: config.g = value; break;
        case ParamRef::Q: params.q.at(ref.level) = value; break;
        case ParamRef::Vc: params.v_c = value; break;
        case ParamRef::Scale: scale = value; break;
        case ParamRef::Baseline: baseline = value; break;
    }
}

std::array<double, 2> bound_for(const FitProblem& p, const std::string& name) {
    const auto it = p.bounds.find(name);
    if (it != p.bounds.end()) {
        if (!(it->second[0] < it->second[1]) || !std::isfinite(it->second[0]) ||
            !std::isfinite(it->second[1])) {
            fail(ErrorCode::InvalidArgument, "bounds for '" + name + "' must be finite and ordered");
        }
        return it->second;
    }
    // linewidths stay strictly positive even without caller bounds
    if (parse_name(name).kind == ParamRef::Gamma) return {1e-9, 1e9};
    return {-1e9, 1e9};
}

double clamp_to(const std::array<double, 2>& b, double x) {
    return std::clamp(x, b[0], b[1]);
}

void validate_problem(const FitProblem& problem, const Spectrum& spectrum) {
    if (problem.free.empty()) {
        fail(ErrorCode::InvalidArgument, "fit problem has no free parameters");
    }
    if (spectrum.points.size() < problem.free.size() + 2) {
        fail(ErrorCode::InvalidArgument, "spectrum needs at least free-parameters + 2 points");
    }
    std::vector<double> xs;
    xs.reserve(spectrum.points.size());
    for (const auto& pt : spectrum.points) xs.push_back(pt.energy);
    std::sort(xs.begin(), xs.end());
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
        fail(ErrorCode::InvalidArgument, "spectrum energies must be distinct");
    }
}

}  // namespace

Eigen::VectorXd pack_parameters(const FitProblem& problem) {
    Eigen::VectorXd theta(static_cast<Eigen::Index>(problem.free.size()));
    for (std::size_t i = 0; i < problem.free.size(); ++i) {
        theta[static_cast<Eigen::Index>(i)] = read_param(problem, problem.free[i]);
    }
    return theta;
}

void unpack_parameters(const FitProblem& problem, const Eigen::VectorXd& theta,
                       ModelConfig& config, LineShapeParams& params, double& scale,
                       double& baseline) {
    config = problem.config;
    params = problem.params;
    scale = problem.scale;
    baseline = problem.baseline;
    for (std::size_t i = 0; i < problem.free.size(); ++i) {
        write_param(config, params, scale, baseline, problem.free[i],
                    theta[static_cast<Eigen::Index>(i)]);
    }
}

Eigen::VectorXd residuals(const FitProblem& problem, const Spectrum& spectrum,
                          const Eigen::VectorXd& theta) {
    ModelConfig config;
    LineShapeParams params;
    double scale, baseline;
    unpack_parameters(problem, theta, config, params, scale, baseline);

    Eigen::VectorXd r(static_cast<Eigen::Index>(spectrum.points.size()));
    for (std::size_t k = 0; k < spectrum.points.size(); ++k) {
        const auto& pt = spectrum.points[k];
        const double sigma = pt.sigma.value_or(1.0);
        double value;
        try {
            value = scale * line_shape(config, params, pt.energy) + baseline;
            value = (value - pt.value) / sigma;
        } catch (const Error&) {
            value = kPenalty;
        }
        r[static_cast<Eigen::Index>(k)] = value;
    }
    return r;
}

Eigen::MatrixXd jacobian(const FitProblem& problem, const Spectrum& spectrum,
                         const Eigen::VectorXd& theta) {
    const Eigen::VectorXd r0 = residuals(problem, spectrum, theta);
    Eigen::MatrixXd j(r0.size(), theta.size());
    for (Eigen::Index p = 0; p < theta.size(); ++p) {
        const double step = 1e-6 * std::max(std::abs(theta[p]), 1.0);
        Eigen::VectorXd shifted = theta;
        shifted[p] += step;
        j.col(p) = (residuals(problem, spectrum, shifted) - r0) / step;
    }
    return j;
}

FitResult solve(const FitProblem& problem, const Spectrum& spectrum) {
    validate_problem(problem, spectrum);
    const Eigen::Index n_free = static_cast<Eigen::Index>(problem.free.size());
    const Eigen::VectorXd theta_init = pack_parameters(problem);

    std::vector<std::array<double, 2>> box;
    for (const auto& name : problem.free) box.push_back(bound_for(problem, name));

    std::mt19937_64 rng(problem.seed);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);

    auto rms = [&](const Eigen::VectorXd& r) { return std::sqrt(r.squaredNorm() / r.size()); };

    FitResult best;
    bool have_best = false;

    const int starts = std::max(1, problem.starts);
    for (int start = 0; start < starts; ++start) {
        Eigen::VectorXd theta = theta_init;
        if (start > 0) {
            for (Eigen::Index p = 0; p < n_free; ++p) {
                const double base = theta[p];
                theta[p] = base + jitter(rng) * std::max(std::abs(base), 1.0);
            }
        }
        for (Eigen::Index p = 0; p < n_free; ++p) theta[p] = clamp_to(box[p], theta[p]);

        Eigen::VectorXd r = residuals(problem, spectrum, theta);
        double cost = r.squaredNorm();
        double lambda = 1e-3;
        bool converged = false;
        int iter = 0;
        std::vector<double> history{rms(r)};

        for (; iter < 500 && !converged; ++iter) {
            const Eigen::MatrixXd j = jacobian(problem, spectrum, theta);
            const Eigen::VectorXd grad = j.transpose() * r;
            if (grad.lpNorm<Eigen::Infinity>() < 1e-10) {
                converged = true;
                break;
            }
            const Eigen::MatrixXd jtj = j.transpose() * j;

            bool accepted = false;
            for (int damp = 0; damp < 40 && !accepted; ++damp) {
                Eigen::MatrixXd lhs = jtj;
                for (Eigen::Index p = 0; p < n_free; ++p) {
                    lhs(p, p) += lambda * std::max(jtj(p, p), 1e-12);
                }
                const Eigen::VectorXd delta = lhs.ldlt().solve(-grad);
                Eigen::VectorXd trial = theta + delta;
                for (Eigen::Index p = 0; p < n_free; ++p) trial[p] = clamp_to(box[p], trial[p]);

                const Eigen::VectorXd r_trial = residuals(problem, spectrum, trial);
                const double cost_trial = r_trial.squaredNorm();
                if (cost_trial < cost) {
                    const double step_norm = (trial - theta).norm();
                    theta = trial;
                    r = r_trial;
                    cost = cost_trial;
                    history.push_back(rms(r));
                    lambda = std::max(lambda / 3.0, 1e-14);
                    accepted = true;
                    if (step_norm < 1e-12 * (1.0 + theta.norm())) converged = true;
                } else {
                    lambda *= 4.0;
                }
            }
            if (!accepted) {
                // damping exhausted: local minimum to working precision
                converged = grad.lpNorm<Eigen::Infinity>() < 1e-6;
                break;
            }
        }

        FitResult result;
        result.names = problem.free;
        result.values = theta;
        unpack_parameters(problem, theta, result.config, result.params, result.scale,
                          result.baseline);
        result.residual_norm = rms(r);
        result.iterations = iter;
        result.converged = converged;
        result.residual_history = std::move(history);

        const Eigen::MatrixXd j = jacobian(problem, spectrum, theta);
        const Eigen::Index dof = std::max<Eigen::Index>(1, r.size() - n_free);
        bool weighted = false;
        for (const auto& pt : spectrum.points) weighted = weighted || pt.sigma.has_value();
        const double variance = weighted ? 1.0 : r.squaredNorm() / static_cast<double>(dof);
        Eigen::MatrixXd jtj = j.transpose() * j;
        double col_scale = 0.0;
        for (Eigen::Index p = 0; p < n_free; ++p) col_scale = std::max(col_scale, j.col(p).norm());
        for (Eigen::Index p = 0; p < n_free; ++p) {
            if (j.col(p).norm() <= 1e-10 * std::max(col_scale, 1.0)) {
                result.unidentifiable.push_back(problem.free[static_cast<std::size_t>(p)]);
                jtj(p, p) += 1.0;  // keep the inverse finite; the flag carries the message
            }
        }
        result.covariance = variance * jtj.inverse();

        if (!have_best || result.residual_norm < best.residual_norm) {
            best = std::move(result);
            have_best = true;
        }
    }
    return best;
}

}  // namespace f3c
