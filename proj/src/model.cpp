#include "f3c/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace f3c {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleTol = 1e-12;

std::string level_list(const std::map<int, double>& m) {
    std::ostringstream os;
    for (const auto& [k, v] : m) os << k << " ";
    return os.str();
}

}  // namespace

std::string to_string(SystemKind kind) {
    switch (kind) {
        case SystemKind::Lambda: return "lambda";
        case SystemKind::Cascade: return "cascade";
        case SystemKind::Vee: return "vee";
    }
    return "?";
}

std::string to_string(ContinuumPosition position) {
    switch (position) {
        case ContinuumPosition::Upper: return "upper";
        case ContinuumPosition::Middle: return "middle";
        case ContinuumPosition::Lower: return "lower";
    }
    return "?";
}

SystemKind parse_system_kind(const std::string& name) {
    if (name == "lambda") return SystemKind::Lambda;
    if (name == "cascade") return SystemKind::Cascade;
    if (name == "vee") return SystemKind::Vee;
    fail(ErrorCode::MalformedFile, "unknown system kind '" + name + "'");
}

ContinuumPosition parse_continuum_position(const std::string& name) {
    if (name == "upper") return ContinuumPosition::Upper;
    if (name == "middle") return ContinuumPosition::Middle;
    if (name == "lower") return ContinuumPosition::Lower;
    fail(ErrorCode::MalformedFile, "unknown continuum position '" + name + "'");
}

Topology topology(SystemKind kind, ContinuumPosition position) {
    Topology t;
    switch (position) {
        case ContinuumPosition::Upper: t.continuum = 3; t.bounds = {1, 2}; break;
        case ContinuumPosition::Middle: t.continuum = 2; t.bounds = {1, 3}; break;
        case ContinuumPosition::Lower: t.continuum = 1; t.bounds = {2, 3}; break;
    }
    // One configuration per kind has both bound levels reaching the
    // continuum directly; the remaining six route one level through g.
    switch (kind) {
        case SystemKind::Lambda:
            t.two_channel = (position == ContinuumPosition::Upper);
            t.anchor = 3;
            break;
        case SystemKind::Cascade:
            t.two_channel = (position == ContinuumPosition::Middle);
            t.anchor = 2;
            break;
        case SystemKind::Vee:
            t.two_channel = (position == ContinuumPosition::Lower);
            t.anchor = 1;
            break;
    }
    if (t.two_channel) {
        t.anchor = 0;
        t.spectator = 0;
    } else {
        t.spectator = (t.bounds[0] == t.anchor) ? t.bounds[1] : t.bounds[0];
    }
    return t;
}

Coupling Coupling::from_gamma(double gamma) {
    Coupling c;
    c.v = std::sqrt(gamma / (2.0 * kPi));
    c.gamma_input = gamma;
    return c;
}

double Coupling::gamma() const {
    return gamma_input ? *gamma_input : 2.0 * kPi * v * v;
}

ModelConfig validate_config(const ModelConfig& raw) {
    const Topology t = raw.topo();
    const std::string tag = raw.tag();

    if (raw.bound_energies.size() != 2 ||
        !raw.bound_energies.count(t.bounds[0]) || !raw.bound_energies.count(t.bounds[1])) {
        fail(ErrorCode::MismatchedStructure,
             tag + " requires bound energies for levels " + std::to_string(t.bounds[0]) +
                 " and " + std::to_string(t.bounds[1]) + ", got { " +
                 level_list(raw.bound_energies) + "}");
    }
    for (const auto& [level, e] : raw.bound_energies) {
        if (!std::isfinite(e)) {
            fail(ErrorCode::MismatchedStructure,
                 tag + " level " + std::to_string(level) + " energy is not finite");
        }
    }

    if (t.two_channel) {
        if (raw.g) {
            fail(ErrorCode::MismatchedStructure,
                 tag + " has two continuum transitions and no bound-bound coupling; g must be absent");
        }
        for (int level : t.bounds) {
            if (!raw.couplings.count(level)) {
                fail(ErrorCode::MissingCoupling,
                     tag + " requires a continuum coupling for level " + std::to_string(level));
            }
        }
        if (raw.couplings.size() != 2) {
            fail(ErrorCode::MismatchedStructure,
                 tag + " takes continuum couplings only for levels " +
                     std::to_string(t.bounds[0]) + " and " + std::to_string(t.bounds[1]));
        }
    } else {
        if (!raw.g) {
            fail(ErrorCode::MissingCoupling,
                 tag + " requires the bound-bound coupling g between levels " +
                     std::to_string(t.spectator) + " and " + std::to_string(t.anchor));
        }
        if (!std::isfinite(*raw.g)) {
            fail(ErrorCode::MismatchedStructure, tag + " g is not finite");
        }
        if (!raw.couplings.count(t.anchor)) {
            fail(ErrorCode::MissingCoupling,
                 tag + " requires the continuum coupling for level " + std::to_string(t.anchor));
        }
        if (raw.couplings.size() != 1) {
            fail(ErrorCode::MismatchedStructure,
                 tag + " takes a single continuum coupling on level " + std::to_string(t.anchor));
        }
    }

    for (const auto& [level, c] : raw.couplings) {
        if (!std::isfinite(c.v) || c.v <= 0.0 || (c.gamma_input && *c.gamma_input <= 0.0)) {
            fail(ErrorCode::NonPositiveLinewidth,
                 tag + " level " + std::to_string(level) + " coupling must be positive and finite");
        }
    }
    return raw;
}

Detunings detunings(const ModelConfig& config, double energy, DetuningConvention convention) {
    const Topology t = config.topo();
    Detunings d;
    d.levels = t.bounds;
    for (int k = 0; k < 2; ++k) {
        const double raw = energy - config.energy(t.bounds[k]);
        d.delta[k] = (convention == DetuningConvention::EnergyMinusLevel) ? raw : -raw;
    }
    return d;
}

double z_factor(const ModelConfig& config, double energy, DetuningConvention convention) {
    const Topology t = config.topo();
    const Detunings d = detunings(config, energy, convention);
    if (t.two_channel) {
        const double di = d.at(t.bounds[0]), dj = d.at(t.bounds[1]);
        const double vi2 = config.v(t.bounds[0]) * config.v(t.bounds[0]);
        const double vj2 = config.v(t.bounds[1]) * config.v(t.bounds[1]);
        const double den = dj * vi2 + di * vj2;
        const double scale = std::abs(dj) * vi2 + std::abs(di) * vj2;
        if (std::abs(den) <= kPoleTol * scale || scale == 0.0) {
            fail(ErrorCode::PoleAtEnergy, "Z denominator vanishes at energy " + std::to_string(energy));
        }
        return di * dj / den;
    }
    const double ds = d.at(t.spectator), da = d.at(t.anchor);
    const double va2 = config.v(t.anchor) * config.v(t.anchor);
    const double g = *config.g;
    const double escale = std::max({1.0, std::abs(energy), std::abs(config.energy(t.bounds[0])),
                                    std::abs(config.energy(t.bounds[1])), std::abs(g)});
    if (std::abs(ds) <= kPoleTol * escale) {
        fail(ErrorCode::PoleAtEnergy, "Z denominator vanishes at energy " + std::to_string(energy));
    }
    return (ds * da - g * g) / (ds * va2);
}

std::map<int, double> bound_probabilities(const ModelConfig& config, double energy,
                                          DetuningConvention convention) {
    const Topology t = config.topo();
    const Detunings d = detunings(config, energy, convention);
    std::map<int, double> out;
    if (t.two_channel) {
        const int i = t.bounds[0], j = t.bounds[1];
        const double di = d.at(i), dj = d.at(j);
        const double vi2 = config.v(i) * config.v(i);
        const double vj2 = config.v(j) * config.v(j);
        const double mix = di * vj2 + dj * vi2;
        const double den = di * di * dj * dj + kPi * kPi * mix * mix;
        if (den == 0.0) {
            fail(ErrorCode::DegenerateDenominator,
                 "both denominator terms vanish at energy " + std::to_string(energy));
        }
        out[i] = vi2 * dj * dj / den;
        out[j] = vj2 * di * di / den;
        return out;
    }
    const double ds = d.at(t.spectator), da = d.at(t.anchor);
    const double va2 = config.v(t.anchor) * config.v(t.anchor);
    const double g = *config.g;
    const double core = ds * da - g * g;
    const double den = kPi * kPi * ds * ds * va2 * va2 + core * core;
    if (den == 0.0) {
        fail(ErrorCode::DegenerateDenominator,
             "both denominator terms vanish at energy " + std::to_string(energy));
    }
    out[t.anchor] = va2 * ds * ds / den;
    out[t.spectator] = g * g * va2 / den;
    return out;
}

double amplitude_ratio(const ModelConfig& config, double energy, DetuningConvention convention) {
    const Topology t = config.topo();
    const Detunings d = detunings(config, energy, convention);
    double num, den;
    if (t.two_channel) {
        num = d.at(t.bounds[1]) * config.v(t.bounds[0]);
        den = d.at(t.bounds[0]) * config.v(t.bounds[1]);
    } else if (t.spectator < t.anchor) {
        num = *config.g;
        den = d.at(t.spectator);
    } else {
        num = d.at(t.spectator);
        den = *config.g;
    }
    const double scale = std::abs(num) + std::abs(den);
    if (scale == 0.0 || std::abs(den) <= kPoleTol * scale) {
        fail(ErrorCode::PoleAtEnergy, "amplitude ratio pole at energy " + std::to_string(energy));
    }
    return num / den;
}

double normalization_residual(const ModelConfig& config, double energy,
                              DetuningConvention convention) {
    const Topology t = config.topo();
    const Detunings d = detunings(config, energy, convention);
    const auto probs = bound_probabilities(config, energy, convention);

    double s = 0.0;   // |sum of coupled amplitudes times their V|
    double zn = 0.0;  // Z numerator and denominator, for the near-pole route
    double zd = 0.0;
    if (t.two_channel) {
        const int i = t.bounds[0], j = t.bounds[1];
        double sign = 1.0;
        try {
            sign = (amplitude_ratio(config, energy, convention) < 0.0) ? -1.0 : 1.0;
        } catch (const Error&) {
            // one amplitude is zero there; the relative sign is immaterial
        }
        const double a = std::sqrt(probs.at(i));
        const double b = std::sqrt(probs.at(j));
        s = a * config.v(i) + sign * b * config.v(j);
        const double vi2 = config.v(i) * config.v(i), vj2 = config.v(j) * config.v(j);
        zn = d.at(i) * d.at(j);
        zd = d.at(j) * vi2 + d.at(i) * vj2;
    } else {
        s = std::sqrt(probs.at(t.anchor)) * config.v(t.anchor);
        const double va2 = config.v(t.anchor) * config.v(t.anchor);
        zn = d.at(t.spectator) * d.at(t.anchor) - (*config.g) * (*config.g);
        zd = d.at(t.spectator) * va2;
    }

    double sz2;
    try {
        const double z = z_factor(config, energy, convention);
        sz2 = (s * z) * (s * z);
    } catch (const Error&) {
        // at a Z pole |s*Z| has the finite limit |zn| / hypot(zn, pi*zd)
        const double m = std::hypot(zn, kPi * zd);
        sz2 = (m == 0.0) ? 0.0 : (zn / m) * (zn / m);
    }
    const double lhs = s * s * kPi * kPi + sz2;
    return std::abs(lhs - 1.0);
}

}  // namespace f3c
