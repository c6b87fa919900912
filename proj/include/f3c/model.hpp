#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>

#include "f3c/errors.hpp"

namespace f3c {

// Energies are MHz (hbar = 1), bound-continuum couplings V are MHz^(1/2) and
// flat in energy, linewidths Gamma = 2*pi*V^2 are MHz.

enum class SystemKind { Lambda, Cascade, Vee };
enum class ContinuumPosition { Upper, Middle, Lower };

std::string to_string(SystemKind kind);
std::string to_string(ContinuumPosition position);
SystemKind parse_system_kind(const std::string& name);
ContinuumPosition parse_continuum_position(const std::string& name);

/// Level layout of one configuration. Levels are numbered 1 (lower) to
/// 3 (upper); the continuum replaces the level matching its position and the
/// other two stay bound. A configuration either couples both bound levels to
/// the continuum (two_channel) or couples one bound level ("anchor") to the
/// continuum while the other ("spectator") attaches to the anchor through the
/// bound-bound coupling g.
struct Topology {
    int continuum = 0;
    std::array<int, 2> bounds{};  // ascending
    bool two_channel = false;
    int anchor = 0;     // bound level carrying a continuum coupling
    int spectator = 0;  // g-coupled partner; 0 when two_channel
};

Topology topology(SystemKind kind, ContinuumPosition position);

/// Bound-continuum coupling. Stores the canonical V but remembers a linewidth
/// it was constructed from, so Gamma-form input round-trips bit-exactly.
struct Coupling {
    double v = 0.0;
    std::optional<double> gamma_input;

    static Coupling from_v(double v) { return Coupling{v, std::nullopt}; }
    static Coupling from_gamma(double gamma);
    double gamma() const;
};

struct ModelConfig {
    SystemKind kind = SystemKind::Lambda;
    ContinuumPosition position = ContinuumPosition::Upper;
    std::map<int, double> bound_energies;
    std::optional<double> g;         // bound-bound coupling, MHz
    std::map<int, Coupling> couplings;

    Topology topo() const { return topology(kind, position); }
    double energy(int level) const { return bound_energies.at(level); }
    double v(int level) const { return couplings.at(level).v; }
    std::string tag() const { return to_string(kind) + "-" + to_string(position); }
};

/// Checks a raw record against the topology of its (kind, position): exact
/// bound-level set, coupling channels, presence/absence of g, finite energies,
/// positive couplings. Returns the validated config unchanged.
ModelConfig validate_config(const ModelConfig& raw);

/// Detuning sign convention. EnergyMinusLevel (delta_i = energy - eps_i) is
/// the convention used everywhere; the flipped variant exists so the
/// convention-invariance tests exercise a real code path.
enum class DetuningConvention { EnergyMinusLevel, LevelMinusEnergy };

struct Detunings {
    std::array<int, 2> levels{};
    std::array<double, 2> delta{};

    double at(int level) const {
        if (level == levels[0]) return delta[0];
        if (level == levels[1]) return delta[1];
        fail(ErrorCode::InvalidArgument, "no detuning for level " + std::to_string(level));
    }
};

Detunings detunings(const ModelConfig& config, double energy,
                    DetuningConvention convention = DetuningConvention::EnergyMinusLevel);

/// Weight of the delta-function part of the continuum amplitude.
/// Two-channel: Z = d_i d_j / (d_j V_i^2 + d_i V_j^2).
/// g-coupled:   Z = (d_s d_a - g^2) / (d_s V_a^2).
/// Throws PoleAtEnergy when the denominator vanishes within 1e-12 of its
/// term scale.
double z_factor(const ModelConfig& config, double energy,
                DetuningConvention convention = DetuningConvention::EnergyMinusLevel);

/// Probability densities (1/MHz) of the two bound levels in the stationary
/// state at the given energy, keyed by bound level.
std::map<int, double> bound_probabilities(
    const ModelConfig& config, double energy,
    DetuningConvention convention = DetuningConvention::EnergyMinusLevel);

/// Ratio of the two bound amplitudes, lower level over higher level.
double amplitude_ratio(const ModelConfig& config, double energy,
                       DetuningConvention convention = DetuningConvention::EnergyMinusLevel);

/// |LHS - 1| of the configuration's normalization identity, with the
/// amplitudes reconstructed from bound_probabilities and amplitude_ratio.
double normalization_residual(const ModelConfig& config, double energy,
                              DetuningConvention convention = DetuningConvention::EnergyMinusLevel);

}  // namespace f3c
