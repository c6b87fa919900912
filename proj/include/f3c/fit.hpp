#pragma once

#include "f3c/fit_types.hpp"

namespace f3c {

/// Parameter-vector plumbing shared by the solver and its tests.
Eigen::VectorXd pack_parameters(const FitProblem& problem);
void unpack_parameters(const FitProblem& problem, const Eigen::VectorXd& theta,
                       ModelConfig& config, LineShapeParams& params, double& scale,
                       double& baseline);

/// Weighted residuals r_k = (scale * R(e_k) + baseline - value_k) / sigma_k.
/// Points where the forward model is singular contribute a large finite
/// penalty instead of throwing.
Eigen::VectorXd residuals(const FitProblem& problem, const Spectrum& spectrum,
                          const Eigen::VectorXd& theta);

/// Forward-difference Jacobian with per-parameter relative step 1e-6.
Eigen::MatrixXd jacobian(const FitProblem& problem, const Spectrum& spectrum,
                         const Eigen::VectorXd& theta);

/// Damped least squares with bound projection and multi-start. Returns the
/// best run; converged=false (never a throw) when no start reaches the
/// gradient or step tolerance within 500 iterations.
FitResult solve(const FitProblem& problem, const Spectrum& spectrum);

}  // namespace f3c
