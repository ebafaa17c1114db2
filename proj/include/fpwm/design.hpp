#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpwm/model.hpp"
#include "fpwm/warning.hpp"

namespace fpwm {

enum class ThresholdMode { Plain, Adjusted };

std::string_view to_string(ThresholdMode m);
ThresholdMode parse_threshold_mode(std::string_view s);

double w_bar(const SystemConfig& cfg);
double delta_a(const SystemConfig& cfg);
double threshold_for(const SystemConfig& cfg, ThresholdMode mode);

struct DesignResult {
    WarningSpec spec;
    bool binding = false;
    double threshold_used = 0.0;
    std::vector<std::pair<std::string, double>> diagnostics;

    // NaN if absent.
    double diag(std::string_view name) const;
};

// b that puts the real-post zero exactly at the threshold for the given w; throws InfeasibleDesign.
double b_star(const SystemConfig& cfg, double w, double threshold);

// Optimal (w, b) at a fixed w: b = 0 if the real-post zero at b = 0 is within the threshold, else b_star.
DesignResult eo_design_at(const SystemConfig& cfg, double w, double threshold, Mechanism label);

DesignResult optimal_eo(const SystemConfig& cfg, double threshold);
double beta_o_na(const SystemConfig& cfg, double threshold);
double delta_cap_a(const SystemConfig& cfg, double threshold);
DesignResult build_ea(const SystemConfig& cfg, ThresholdMode mode);

struct PhiResult {
    double phi_star;
    double phi_bar;
    bool bar_branch;  // phi_star == phi_bar
};

PhiResult phi_star(const SystemConfig& cfg, const WarningSpec& ea_spec, double threshold);
DesignResult build_eh(const SystemConfig& cfg, ThresholdMode mode);
DesignResult build_eh2(const SystemConfig& cfg, ThresholdMode mode);

DesignResult build_design(Mechanism m, const SystemConfig& cfg, ThresholdMode mode);

void write_design_csv(std::ostream& os, const DesignResult& d);

} // namespace fpwm
