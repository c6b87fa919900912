#pragma once

#include <string>
#include <vector>

#include "f3c/lineshape.hpp"

namespace f3c {

/// One figure panel: a configuration, the q settings of its plotted curves,
/// and which detuning is swept while the other is held. The swept level sits
/// at zero energy so the grid reads directly as its detuning; the held level
/// sits at minus the held detuning so the held value is exact at the swept
/// resonance.
struct Preset {
    std::string name;
    ModelConfig config;
    std::vector<LineShapeParams> params_list;
    int swept_level = 0;
    int held_level = 0;
    double held_detuning = 0.0;
    std::vector<double> grid;
    std::string notes;
};

const std::vector<std::string>& preset_names();
Preset preset(const std::string& name);

/// One curve per parameter set over the preset grid. Curves are evaluated
/// concurrently; max_threads <= 0 means use F3_THREADS or the hardware count.
std::vector<SpectralCurve> run_preset(const std::string& name, int max_threads = 0);

int thread_budget(int requested);

}  // namespace f3c
