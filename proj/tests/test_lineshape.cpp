#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "f3c/lineshape.hpp"

using namespace f3c;

namespace {

constexpr double kPi = std::numbers::pi;

ModelConfig two_channel(SystemKind kind, ContinuumPosition pos, double e_lo, double e_hi,
                        double gamma_lo, double gamma_hi) {
    ModelConfig c;
    c.kind = kind;
    c.position = pos;
    const Topology t = c.topo();
    c.bound_energies[t.bounds[0]] = e_lo;
    c.bound_energies[t.bounds[1]] = e_hi;
    c.couplings[t.bounds[0]] = Coupling::from_gamma(gamma_lo);
    c.couplings[t.bounds[1]] = Coupling::from_gamma(gamma_hi);
    return c;
}

ModelConfig g_coupled(SystemKind kind, ContinuumPosition pos, double e_lo, double e_hi,
                      double gamma_anchor, double g) {
    ModelConfig c;
    c.kind = kind;
    c.position = pos;
    const Topology t = c.topo();
    c.bound_energies[t.bounds[0]] = e_lo;
    c.bound_energies[t.bounds[1]] = e_hi;
    c.couplings[t.anchor] = Coupling::from_gamma(gamma_anchor);
    c.g = g;
    return c;
}

LineShapeParams qpair(const ModelConfig& cfg, double q_lo, double q_hi) {
    const Topology t = cfg.topo();
    LineShapeParams p;
    p.q[t.bounds[0]] = q_lo;
    p.q[t.bounds[1]] = q_hi;
    return p;
}

LineShapeParams qsingle(const ModelConfig& cfg, double q, double v_c) {
    LineShapeParams p;
    p.q[cfg.topo().anchor] = q;
    p.v_c = v_c;
    return p;
}

double fano(double q, double e) { return (q + e) * (q + e) / (1.0 + e * e); }

}  // namespace

TEST_CASE("validate_params structure") {
    const auto lu = two_channel(SystemKind::Lambda, ContinuumPosition::Upper, 0.0, 1.0, 0.5, 0.4);
    CHECK_NOTHROW(validate_params(lu, qpair(lu, 1.0, 2.0)));
    LineShapeParams with_vc = qpair(lu, 1.0, 2.0);
    with_vc.v_c = 0.1;
    CHECK_THROWS_WITH_AS(validate_params(lu, with_vc), doctest::Contains("MismatchedStructure"),
                         Error);

    const auto lm = g_coupled(SystemKind::Lambda, ContinuumPosition::Middle, 0.0, 1.0, 0.4, 0.2);
    CHECK_NOTHROW(validate_params(lm, qsingle(lm, 2.0, 0.1)));
    LineShapeParams no_vc = qsingle(lm, 2.0, 0.1);
    no_vc.v_c.reset();
    CHECK_THROWS_AS(validate_params(lm, no_vc), Error);
    LineShapeParams wrong_key;
    wrong_key.q[lm.topo().spectator] = 1.0;
    wrong_key.v_c = 0.1;
    CHECK_THROWS_AS(validate_params(lm, wrong_key), Error);
}

TEST_CASE("two-channel: zeros at both resonances when q vanishes") {
    const auto lu = two_channel(SystemKind::Lambda, ContinuumPosition::Upper, 0.0, -1.0, 0.5, 0.4);
    const auto p = qpair(lu, 0.0, 0.0);
    CHECK(line_shape(lu, p, 0.0) == 0.0);
    CHECK(line_shape(lu, p, -1.0) == 0.0);
    CHECK(line_shape(lu, p, 0.7) > 0.0);
}

TEST_CASE("two-channel resonance anchors give the other channel's q squared") {
    for (auto [kind, pos] : {std::pair{SystemKind::Lambda, ContinuumPosition::Upper},
                             std::pair{SystemKind::Cascade, ContinuumPosition::Middle},
                             std::pair{SystemKind::Vee, ContinuumPosition::Lower}}) {
        for (double gamma_lo : {0.1, 0.5, 1.4}) {
            for (double q_lo : {-1.5, 0.7, 3.0}) {
                const auto cfg = two_channel(kind, pos, 0.0, -1.0, gamma_lo, 0.4);
                const auto p = qpair(cfg, q_lo, 2.0);
                // at the lower level's resonance only the higher q survives
                CHECK(line_shape(cfg, p, 0.0) == doctest::Approx(4.0).epsilon(1e-13));
                // and vice versa
                CHECK(line_shape(cfg, p, -1.0) ==
                      doctest::Approx(q_lo * q_lo).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("two-channel hand value at the caption parameters") {
    const auto lu = two_channel(SystemKind::Lambda, ContinuumPosition::Upper, 0.0, -1.0, 0.5, 0.4);
    CHECK(line_shape(lu, qpair(lu, 1.0, 1.0), 0.0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("single-channel reduction to the canonical Fano profile") {
    // killing one coupling must reduce R to (q + e)^2 / (1 + e^2) pointwise
    for (auto [kind, pos] : {std::pair{SystemKind::Lambda, ContinuumPosition::Upper},
                             std::pair{SystemKind::Cascade, ContinuumPosition::Middle},
                             std::pair{SystemKind::Vee, ContinuumPosition::Lower}}) {
        auto cfg = two_channel(kind, pos, 0.0, -1.0, 0.5, 0.4);
        const auto t = cfg.topo();
        const double q_lo = 0.8, q_hi = 2.0;

        auto kill = [&](int which_level, int survivor, double q_of_killed) {
            cfg.couplings.at(which_level) = Coupling::from_v(0.0);
            const auto p = qpair(cfg, q_lo, q_hi);
            for (double eps : linspace(-5.0, 5.0, 2001)) {
                if (std::abs(eps - cfg.energy(which_level)) < 1e-9) continue;
                const double e = reduced_detuning(cfg, eps, survivor);
                CHECK(std::abs(line_shape(cfg, p, eps) - fano(q_of_killed, e)) < 1e-12);
            }
        };
        auto fresh = cfg;
        kill(t.bounds[1], t.bounds[0], q_hi);
        cfg = fresh;
        kill(t.bounds[0], t.bounds[1], q_lo);
        cfg = fresh;
    }
}

TEST_CASE("Fano extremes in the reduced limit") {
    auto lu = two_channel(SystemKind::Lambda, ContinuumPosition::Upper, 0.0, -1.0, 0.5, 0.4);
    lu.couplings.at(2) = Coupling::from_v(0.0);
    const double q = 2.0;
    const auto p = qpair(lu, 1.0, q);
    const double v1 = lu.v(1);
    const double at_peak = 0.0 + (1.0 / q) * kPi * v1 * v1;  // reduced detuning 1/q
    const double at_zero = 0.0 + (-q) * kPi * v1 * v1;       // reduced detuning -q
    CHECK(line_shape(lu, p, at_peak) == doctest::Approx(1.0 + q * q).epsilon(1e-12));
    CHECK(line_shape(lu, p, at_zero) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("reduced detuning is 2 delta / Gamma") {
    auto lm = g_coupled(SystemKind::Lambda, ContinuumPosition::Middle, -0.2, 0.0, 0.4, 0.2);
    CHECK(reduced_detuning(lm, 0.0, 3) == 0.0);
    CHECK(reduced_detuning(lm, 0.2, 3) == doctest::Approx(1.0).epsilon(1e-13));
    auto lm2 = g_coupled(SystemKind::Lambda, ContinuumPosition::Middle, -0.2, 0.25, 0.5, 0.2);
    CHECK(reduced_detuning(lm2, 0.0, 3) == doctest::Approx(-1.0).epsilon(1e-13));
    CHECK_THROWS_WITH_AS(reduced_detuning(lm, 0.0, 1), doctest::Contains("MissingCoupling"),
                         Error);
}

TEST_CASE("g-coupled with q = 0 and v_c = 0 is the EIT-like window") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (auto [kind, pos] : {std::pair{SystemKind::Lambda, ContinuumPosition::Middle},
                             std::pair{SystemKind::Lambda, ContinuumPosition::Lower},
                             std::pair{SystemKind::Cascade, ContinuumPosition::Upper},
                             std::pair{SystemKind::Cascade, ContinuumPosition::Lower},
                             std::pair{SystemKind::Vee, ContinuumPosition::Upper},
                             std::pair{SystemKind::Vee, ContinuumPosition::Middle}}) {
        const auto cfg = g_coupled(kind, pos, -0.4, 0.9, 0.5, 0.3);
        const auto p = qsingle(cfg, 0.0, 0.0);
        for (int k = 0; k < 40; ++k) {
            const double eps = u(rng);
            double z;
            try {
                z = z_factor(cfg, eps);
            } catch (const Error&) {
                continue;
            }
            CHECK(line_shape(cfg, p, eps) ==
                  doctest::Approx(z * z / (kPi * kPi + z * z)).epsilon(1e-11));
        }
        // zeros exactly at the dressed-state roots
        const double mid = 0.5 * (-0.4 + 0.9);
        const double split = std::sqrt(0.25 * 1.3 * 1.3 + 0.3 * 0.3);
        CHECK(line_shape(cfg, p, mid - split) < 1e-25);
        CHECK(line_shape(cfg, p, mid + split) < 1e-25);
    }
}

TEST_CASE("g-coupled line shape at the spectator resonance is q-independent") {
    const auto cfg = g_coupled(SystemKind::Cascade, ContinuumPosition::Upper, 0.0, 1.3, 0.4, 0.2);
    const auto t = cfg.topo();
    const double eps = cfg.energy(t.spectator);
    const double v = cfg.v(t.anchor);
    const double expect = std::pow(1.0 - kPi * 0.1 * v / 0.2, 2.0);
    double first = 0.0;
    for (double q : {0.0, 1.0, 2.0, 3.0}) {
        const double r = line_shape(cfg, qsingle(cfg, q, 0.1), eps);
        if (q == 0.0) first = r;
        CHECK(r == first);  // the q term carries a factor of the spectator detuning
    }
    CHECK(first == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("gamma-form route matches the canonical form everywhere") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-6.0, 6.0);
    std::uniform_real_distribution<double> qu(-2.0, 3.0);
    for (SystemKind k : {SystemKind::Lambda, SystemKind::Cascade, SystemKind::Vee}) {
        for (ContinuumPosition pos :
             {ContinuumPosition::Upper, ContinuumPosition::Middle, ContinuumPosition::Lower}) {
            const Topology t = topology(k, pos);
            ModelConfig cfg;
            LineShapeParams p;
            if (t.two_channel) {
                cfg = two_channel(k, pos, u(rng), u(rng), 0.3, 0.7);
                p = qpair(cfg, qu(rng), qu(rng));
            } else {
                cfg = g_coupled(k, pos, u(rng), u(rng), 0.5, 0.25);
                p = qsingle(cfg, qu(rng), 0.15);
            }
            for (int s = 0; s < 60; ++s) {
                const double eps = u(rng);
                const double a = line_shape(cfg, p, eps);
                const double b = line_shape_gamma_form(cfg, p, eps);
                CHECK(std::abs(a - b) <= 1e-11 * (1.0 + std::abs(a)));
            }
        }
    }
}

TEST_CASE("curve evaluation") {
    const auto lu = two_channel(SystemKind::Lambda, ContinuumPosition::Upper, 0.0, -1.0, 0.5, 0.4);
    const auto p = qpair(lu, 1.0, 2.0);

    SUBCASE("values, labels and nonnegativity") {
        const auto c = curve(lu, p, linspace(-10.0, 10.0, 2001));
        CHECK(c.size() == 2001);
        CHECK(c.gap_count == 0);
        CHECK(c.prob_levels[0] == 1);
        CHECK(c.prob_levels[1] == 2);
        for (std::size_t k = 0; k < c.size(); ++k) {
            CHECK(c.r[k] >= 0.0);
            CHECK(c.probs[0][k] >= 0.0);
        }
        // not constant
        CHECK(*std::max_element(c.r.begin(), c.r.end()) >
              *std::min_element(c.r.begin(), c.r.end()));
    }

    SUBCASE("single-point grid") {
        const auto c = curve(lu, p, {0.5});
        CHECK(c.size() == 1);
    }

    SUBCASE("empty and non-increasing grids are rejected") {
        CHECK_THROWS_WITH_AS(curve(lu, p, {}), doctest::Contains("EmptyGrid"), Error);
        CHECK_THROWS_AS(curve(lu, p, {1.0, 1.0}), Error);
    }

    SUBCASE("degenerate levels produce a gap, not a crash") {
        auto degenerate = lu;
        degenerate.bound_energies[1] = 0.0;
        degenerate.bound_energies[2] = 0.0;
        const auto c = curve(degenerate, qpair(degenerate, 1.0, 2.0), {-1.0, 0.0, 1.0});
        CHECK(c.gap_count == 1);
        CHECK(std::isnan(c.r[1]));
        CHECK(!std::isnan(c.r[0]));
    }
}

TEST_CASE("flipping the detuning convention mirrors the curve") {
    const auto cfg = two_channel(SystemKind::Vee, ContinuumPosition::Lower, 0.0, -1.0, 0.5, 0.4);
    const auto p = qpair(cfg, 1.0, 2.0);
    auto mirrored = cfg;
    for (auto& [level, e] : mirrored.bound_energies) e = -e;
    for (double eps : linspace(-10.0, 10.0, 501)) {
        const double direct = line_shape(cfg, p, eps);
        const double flipped =
            line_shape(mirrored, p, -eps, DetuningConvention::LevelMinusEnergy);
        CHECK(std::abs(direct - flipped) < 1e-12 * (1.0 + direct));
    }
}
