#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "f3c/lineshape.hpp"

namespace f3c {

struct Spectrum {
    struct Point {
        double energy = 0.0;
        double value = 0.0;
        std::optional<double> sigma;
    };
    std::vector<Point> points;
    std::string meta;
};

/// Free parameters are named: "e<level>" bound energy, "gamma<level>"
/// linewidth, "g", "q<level>", "v_c", "scale", "baseline". The config/params
/// members hold the initial values; anything not listed in free stays fixed.
struct FitProblem {
    ModelConfig config;
    LineShapeParams params;
    double scale = 1.0;
    double baseline = 0.0;
    std::vector<std::string> free;
    std::map<std::string, std::array<double, 2>> bounds;
    int starts = 3;
    unsigned seed = 0;
};

struct FitResult {
    std::vector<std::string> names;       // free parameter names, fit order
    Eigen::VectorXd values;               // optimum, same order
    ModelConfig config;                   // fully assembled optimum
    LineShapeParams params;
    double scale = 1.0;
    double baseline = 0.0;
    double residual_norm = 0.0;           // weighted RMS
    int iterations = 0;
    bool converged = false;
    Eigen::MatrixXd covariance;
    std::vector<double> residual_history; // accepted steps only
    std::vector<std::string> unidentifiable;
};

}  // namespace f3c
