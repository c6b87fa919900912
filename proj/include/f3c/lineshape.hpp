#pragma once

#include <array>
#include <string>
#include <vector>

#include "f3c/model.hpp"

namespace f3c {

/// Asymmetry inputs of a line shape. Two-channel configurations take one q
/// per coupled level; g-coupled configurations take a single q keyed by the
/// anchor level plus the dimensionless dipole ratio v_c.
struct LineShapeParams {
    std::map<int, double> q;
    std::optional<double> v_c;

    double q_at(int level) const { return q.at(level); }
};

LineShapeParams validate_params(const ModelConfig& config, const LineShapeParams& params);

/// Fano line shape R(energy) >= 0.
/// Two-channel (i < j):
///   R = (d_i d_j + pi q_i d_i V_j^2 + pi q_j d_j V_i^2)^2
///       / (d_i^2 d_j^2 + pi^2 (d_i V_j^2 + d_j V_i^2)^2)
/// g-coupled (spectator s, anchor a):
///   R = (pi q d_s V^2 + (d_s d_a - g^2) + pi g v_c V)^2
///       / (pi^2 d_s^2 V^4 + (d_s d_a - g^2)^2)
/// Throws PoleAtEnergy only at parameter-degenerate points where the
/// denominator genuinely vanishes.
double line_shape(const ModelConfig& config, const LineShapeParams& params, double energy,
                  DetuningConvention convention = DetuningConvention::EnergyMinusLevel);

/// Same line shape parameterized by linewidths Gamma = 2 pi V^2. Kept as an
/// independent algebraic route for equivalence tests.
double line_shape_gamma_form(const ModelConfig& config, const LineShapeParams& params,
                             double energy,
                             DetuningConvention convention = DetuningConvention::EnergyMinusLevel);

/// d_channel / (pi V_channel^2) = 2 d / Gamma, the reduced detuning that maps
/// a single surviving channel onto the canonical (q + e)^2 / (1 + e^2) profile.
double reduced_detuning(const ModelConfig& config, double energy, int channel,
                        DetuningConvention convention = DetuningConvention::EnergyMinusLevel);

struct SpectralCurve {
    std::vector<double> grid;
    std::vector<double> r;  // NaN marks a gap point
    std::array<int, 2> prob_levels{};
    std::array<std::vector<double>, 2> probs;
    ModelConfig config;
    LineShapeParams params;
    int gap_count = 0;
    std::string note;

    std::size_t size() const { return grid.size(); }
};

/// Pointwise line shape and bound probabilities over a strictly increasing
/// grid. Singular points become gaps, counted in gap_count.
SpectralCurve curve(const ModelConfig& config, const LineShapeParams& params,
                    const std::vector<double>& grid);

std::vector<double> linspace(double lo, double hi, int n);

}  // namespace f3c
