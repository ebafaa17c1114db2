#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fpwm/learn.hpp"
#include "fpwm/mc_harness.hpp"
#include "fpwm/model.hpp"

namespace fpwm {

// Smart users: mu1 = 0, mu2 = 0.5, non-participants absorb mu_a.
SystemConfig smart_config();
// Smart users with every participant warning-seeking: mu2 = 1 - mu_a.
SystemConfig exwm_config();
// Naive users: mu1 = 0.15, mu2 = 0.5, non-participants absorb mu_a.
SystemConfig naive_config();

std::vector<double> exwm_grid();          // {0, 0.005, ..., 0.02}
std::vector<double> eight_point_grid();   // {0, 0.05, ..., 0.35}

struct Preset {
    std::string name;
    std::string description;
    std::vector<ExperimentSpec> experiments;
    bool learning = false;
    SystemConfig learning_cfg;
    Table3Options table3;
};

std::vector<std::string> preset_names();
Preset make_preset(std::string_view name);

} // namespace fpwm
