#include "f3c/presets.hpp"

#include <cstdlib>
#include <future>
#include <thread>

namespace f3c {

namespace {

struct PanelSpec {
    const char* name;
    SystemKind kind;
    ContinuumPosition position;
    double gamma_lo;        // linewidth of the lower coupled level (two-channel)
    double gamma_hi;        // or, for g-coupled panels, gamma_lo carries the anchor linewidth
    double g;               // 0 = two-channel panel
    double v_c;
    int held_level;
    double held_detuning;
    // two-channel panels: four (q_lo, q_hi) pairs; g-coupled: four single q values
    double q_first[4];
    double q_second[4];
    const char* notes;
};

// Transcribed panel table. Two-channel rows list (q of lower level, q of
// higher level) per curve; g-coupled rows use q_first for the single q.
const PanelSpec kPanels[] = {
    {"fig4a", SystemKind::Lambda, ContinuumPosition::Upper, 0.5, 0.4, 0.0, 0.0, 2, 1.0,
     {0, 1, 1, 1}, {0, 1, 2, 3}, ""},
    {"fig4b", SystemKind::Lambda, ContinuumPosition::Middle, 0.4, 0.0, 0.2, 0.1, 1, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig4c", SystemKind::Lambda, ContinuumPosition::Lower, 0.4, 0.0, 0.2, 0.1, 2, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig5a", SystemKind::Lambda, ContinuumPosition::Upper, 0.5, 0.4, 0.0, 0.0, 1, 0.1,
     {0, 1, 1, 1}, {0, 1, 2, 3}, ""},
    {"fig5b", SystemKind::Lambda, ContinuumPosition::Middle, 0.4, 0.0, 0.2, 0.2, 3, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig5c", SystemKind::Lambda, ContinuumPosition::Lower, 0.4, 0.0, 0.2, 0.1, 3, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig6a", SystemKind::Cascade, ContinuumPosition::Upper, 0.4, 0.0, 0.2, 0.1, 1, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig6b", SystemKind::Cascade, ContinuumPosition::Middle, 0.1, 0.7, 0.0, 0.0, 1, 1.0,
     {0, 1, 1, 1}, {0, 1, 2, 3}, ""},
    {"fig6c", SystemKind::Cascade, ContinuumPosition::Lower, 0.4, 0.0, 0.2, 0.1, 3, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig7a", SystemKind::Cascade, ContinuumPosition::Upper, 0.4, 0.0, 0.2, 0.1, 2, 1.0,
     {0, 1, 2, 3}, {},
     "source caption labels this panel with the lambda-lower profile; the parameter symbols "
     "identify cascade-upper, which is what this preset encodes"},
    {"fig7b", SystemKind::Cascade, ContinuumPosition::Middle, 0.1, 0.7, 0.0, 0.0, 3, 0.1,
     {0, 1, 1, 1}, {0, 1, 2, 3}, ""},
    {"fig7c", SystemKind::Cascade, ContinuumPosition::Lower, 0.4, 0.0, 0.2, 0.1, 2, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig8a", SystemKind::Vee, ContinuumPosition::Upper, 0.4, 0.0, 0.2, 0.1, 2, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig8b", SystemKind::Vee, ContinuumPosition::Middle, 0.4, 0.0, 0.2, 0.1, 3, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig8c", SystemKind::Vee, ContinuumPosition::Lower, 0.5, 0.4, 0.0, 0.0, 3, 1.0,
     {0, 1, 2, 3}, {0, 1, 1, 1}, ""},
    {"fig9a", SystemKind::Vee, ContinuumPosition::Upper, 0.4, 0.0, 0.2, 0.2, 1, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig9b", SystemKind::Vee, ContinuumPosition::Middle, 0.4, 0.0, 0.2, 0.1, 1, 1.0,
     {0, 1, 2, 3}, {}, ""},
    {"fig9c", SystemKind::Vee, ContinuumPosition::Lower, 0.5, 0.4, 0.0, 0.0, 2, 0.1,
     {0, 1, 2, 3}, {0, 1, 1, 1}, ""},
};

Preset build(const PanelSpec& p) {
    Preset out;
    out.name = p.name;
    const Topology t = topology(p.kind, p.position);

    ModelConfig config;
    config.kind = p.kind;
    config.position = p.position;
    out.held_level = p.held_level;
    out.held_detuning = p.held_detuning;
    out.swept_level = (t.bounds[0] == p.held_level) ? t.bounds[1] : t.bounds[0];
    config.bound_energies[out.swept_level] = 0.0;
    config.bound_energies[p.held_level] = -p.held_detuning;

    if (t.two_channel) {
        config.couplings[t.bounds[0]] = Coupling::from_gamma(p.gamma_lo);
        config.couplings[t.bounds[1]] = Coupling::from_gamma(p.gamma_hi);
        for (int c = 0; c < 4; ++c) {
            LineShapeParams ps;
            ps.q[t.bounds[0]] = p.q_first[c];
            ps.q[t.bounds[1]] = p.q_second[c];
            out.params_list.push_back(validate_params(config, ps));
        }
    } else {
        config.g = p.g;
        config.couplings[t.anchor] = Coupling::from_gamma(p.gamma_lo);
        for (int c = 0; c < 4; ++c) {
            LineShapeParams ps;
            ps.q[t.anchor] = p.q_first[c];
            ps.v_c = p.v_c;
            out.params_list.push_back(validate_params(config, ps));
        }
    }
    out.config = validate_config(config);
    out.grid = linspace(-10.0, 10.0, 2001);
    out.notes = p.notes;
    return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const PanelSpec& p : kPanels) v.emplace_back(p.name);
        return v;
    }();
    return names;
}

Preset preset(const std::string& name) {
    for (const PanelSpec& p : kPanels) {
        if (name == p.name) return build(p);
    }
    fail(ErrorCode::UnknownPreset, "no preset named '" + name + "'");
}

int thread_budget(int requested) {
    int budget = requested;
    if (budget <= 0) {
        if (const char* env = std::getenv("F3_THREADS")) {
            budget = std::atoi(env);
        }
    }
    if (budget <= 0) {
        budget = static_cast<int>(std::thread::hardware_concurrency());
    }
    return std::max(1, budget);
}

std::vector<SpectralCurve> run_preset(const std::string& name, int max_threads) {
    const Preset p = preset(name);
    const int budget = thread_budget(max_threads);
    std::vector<SpectralCurve> curves(p.params_list.size());
    std::size_t next = 0;
    while (next < curves.size()) {
        const std::size_t batch =
            std::min<std::size_t>(static_cast<std::size_t>(budget), curves.size() - next);
        std::vector<std::future<SpectralCurve>> futs;
        for (std::size_t k = 0; k < batch; ++k) {
            futs.push_back(std::async(std::launch::async, [&p, idx = next + k] {
                SpectralCurve c = curve(p.config, p.params_list[idx], p.grid);
                c.note = p.name;
                return c;
            }));
        }
        for (std::size_t k = 0; k < batch; ++k) curves[next + k] = futs[k].get();
        next += batch;
    }
    return curves;
}

}  // namespace f3c
