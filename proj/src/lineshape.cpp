#include "f3c/lineshape.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace f3c {

namespace {

constexpr double kPi = std::numbers::pi;

struct ShapeParts {
    double numerator;    // signed; R = numerator^2 / denominator
    double denominator;  // sum of squares
    double scale;        // magnitude scale of the denominator's square roots
};

ShapeParts shape_parts(const ModelConfig& config, const LineShapeParams& params, double energy,
                       DetuningConvention convention) {
    const Topology t = config.topo();
    const Detunings d = detunings(config, energy, convention);
    if (t.two_channel) {
        const int i = t.bounds[0], j = t.bounds[1];
        const double di = d.at(i), dj = d.at(j);
        const double vi2 = config.v(i) * config.v(i);
        const double vj2 = config.v(j) * config.v(j);
        const double mix = di * vj2 + dj * vi2;
        const double num = di * dj + kPi * (params.q_at(i) * di * vj2 + params.q_at(j) * dj * vi2);
        const double den = di * di * dj * dj + kPi * kPi * mix * mix;
        const double scale = std::max({1.0, std::abs(di), std::abs(dj), kPi * vi2, kPi * vj2});
        return {num, den, scale * scale};
    }
    const double ds = d.at(t.spectator), da = d.at(t.anchor);
    const double va = config.v(t.anchor);
    const double va2 = va * va;
    const double g = *config.g;
    const double core = ds * da - g * g;
    const double num = kPi * params.q_at(t.anchor) * ds * va2 + core + kPi * g * (*params.v_c) * va;
    const double den = kPi * kPi * ds * ds * va2 * va2 + core * core;
    const double scale = std::max({1.0, std::abs(ds), std::abs(da), kPi * va2, std::abs(g)});
    return {num, den, scale * scale};
}

}  // namespace

LineShapeParams validate_params(const ModelConfig& config, const LineShapeParams& params) {
    const Topology t = config.topo();
    const std::string tag = config.tag();
    if (t.two_channel) {
        if (params.q.size() != 2 || !params.q.count(t.bounds[0]) || !params.q.count(t.bounds[1])) {
            fail(ErrorCode::MismatchedStructure,
                 tag + " requires asymmetry indices q for levels " + std::to_string(t.bounds[0]) +
                     " and " + std::to_string(t.bounds[1]));
        }
        if (params.v_c) {
            fail(ErrorCode::MismatchedStructure,
                 tag + " has no bound-bound transition; v_c must be absent");
        }
    } else {
        if (params.q.size() != 1 || !params.q.count(t.anchor)) {
            fail(ErrorCode::MismatchedStructure,
                 tag + " requires a single asymmetry index q keyed by level " +
                     std::to_string(t.anchor));
        }
        if (!params.v_c) {
            fail(ErrorCode::MismatchedStructure, tag + " requires the dipole ratio v_c");
        }
    }
    for (const auto& [level, q] : params.q) {
        if (!std::isfinite(q)) {
            fail(ErrorCode::MismatchedStructure,
                 tag + " q for level " + std::to_string(level) + " is not finite");
        }
    }
    if (params.v_c && !std::isfinite(*params.v_c)) {
        fail(ErrorCode::MismatchedStructure, tag + " v_c is not finite");
    }
    return params;
}

double line_shape(const ModelConfig& config, const LineShapeParams& params, double energy,
                  DetuningConvention convention) {
    const ShapeParts p = shape_parts(config, params, energy, convention);
    if (std::sqrt(p.denominator) <= 1e-12 * p.scale) {
        fail(ErrorCode::PoleAtEnergy, "line shape singular at energy " + std::to_string(energy));
    }
    return p.numerator * p.numerator / p.denominator;
}

double line_shape_gamma_form(const ModelConfig& config, const LineShapeParams& params,
                             double energy, DetuningConvention convention) {
    const Topology t = config.topo();
    const Detunings d = detunings(config, energy, convention);
    if (t.two_channel) {
        const int i = t.bounds[0], j = t.bounds[1];
        const double di = d.at(i), dj = d.at(j);
        const double gi = config.couplings.at(i).gamma();
        const double gj = config.couplings.at(j).gamma();
        const double num = 2.0 * di * dj + params.q_at(i) * di * gj + params.q_at(j) * dj * gi;
        const double den = 4.0 * di * di * dj * dj + (di * gj + dj * gi) * (di * gj + dj * gi);
        if (den == 0.0) fail(ErrorCode::PoleAtEnergy, "line shape singular");
        return num * num / den;
    }
    const double ds = d.at(t.spectator), da = d.at(t.anchor);
    const double gam = config.couplings.at(t.anchor).gamma();
    const double g = *config.g;
    const double core2 = 2.0 * (g * g - ds * da);
    const double num =
        params.q_at(t.anchor) * ds * gam + g * (*params.v_c) * std::sqrt(2.0 * kPi * gam) - core2;
    const double den = ds * ds * gam * gam + core2 * core2;
    if (den == 0.0) fail(ErrorCode::PoleAtEnergy, "line shape singular");
    return num * num / den;
}

double reduced_detuning(const ModelConfig& config, double energy, int channel,
                        DetuningConvention convention) {
    if (!config.couplings.count(channel)) {
        fail(ErrorCode::MissingCoupling,
             "level " + std::to_string(channel) + " has no continuum coupling");
    }
    const Detunings d = detunings(config, energy, convention);
    const double v = config.v(channel);
    return d.at(channel) / (kPi * v * v);
}

SpectralCurve curve(const ModelConfig& config, const LineShapeParams& params,
                    const std::vector<double>& grid) {
    if (grid.empty()) fail(ErrorCode::EmptyGrid, "curve grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) {
            fail(ErrorCode::InvalidArgument, "curve grid must be strictly increasing");
        }
    }
    const Topology t = config.topo();
    SpectralCurve c;
    c.grid = grid;
    c.config = config;
    c.params = params;
    c.prob_levels = t.bounds;
    c.r.resize(grid.size());
    c.probs[0].resize(grid.size());
    c.probs[1].resize(grid.size());
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        try {
            c.r[k] = line_shape(config, params, grid[k]);
        } catch (const Error&) {
            c.r[k] = nan;
            ++c.gap_count;
        }
        try {
            const auto p = bound_probabilities(config, grid[k]);
            c.probs[0][k] = p.at(t.bounds[0]);
            c.probs[1][k] = p.at(t.bounds[1]);
        } catch (const Error&) {
            c.probs[0][k] = nan;
            c.probs[1][k] = nan;
        }
    }
    return c;
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n <= 0) fail(ErrorCode::EmptyGrid, "linspace needs at least one point");
    std::vector<double> g(static_cast<std::size_t>(n));
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double step = (hi - lo) / (n - 1);
    for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = lo + step * k;
    g.back() = hi;
    return g;
}

}  // namespace f3c
