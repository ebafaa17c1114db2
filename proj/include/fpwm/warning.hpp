#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fpwm/bp_sim.hpp"
#include "fpwm/model.hpp"
#include "fpwm/ode_core.hpp"

namespace fpwm {

enum class Mechanism { EO, EA, EH, EH2 };

std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view s);

struct WarningSpec {
    Mechanism kind = Mechanism::EO;
    double w = 0.0;
    double b = 0.0;
    double gamma = 0.0;
    double phi = 1.0;  // used by EH only

    static WarningSpec eo(double w, double b, double gamma) { return {Mechanism::EO, w, b, gamma, 1.0}; }
    static WarningSpec ea(double w, double b, double gamma) { return {Mechanism::EA, w, b, gamma, 1.0}; }
    static WarningSpec eh(double w, double b, double gamma, double phi) { return {Mechanism::EH, w, b, gamma, phi}; }
    static WarningSpec eh2(double w, double b, double gamma) { return {Mechanism::EH2, w, b, gamma, 1.0}; }
};

// Structural constraints of the mechanism family (w cap for EO, exact w for EH2, phi >= 1 for EH).
std::vector<std::string> spec_violations(const WarningSpec& spec, const SystemConfig& cfg);

// w beta / (beta + b (1 - beta)) + gamma, with the fraction taken as 0 at beta = 0.
double base_warning(double w, double b, double gamma, double beta);
double warning_value(const WarningSpec& spec, double beta, const SystemConfig& cfg);
WarningFn warning_function(const WarningSpec& spec, const SystemConfig& cfg);

Mean2 limit_mean_matrix(const WarningSpec& spec, const SystemConfig& cfg, PostType post, double beta);
double g_direct(const WarningSpec& spec, const SystemConfig& cfg, PostType post, double beta);
LimitKernel warning_kernel(const WarningSpec& spec, const SystemConfig& cfg, PostType post);

struct GBeta {
    std::function<double(double)> g;  // direct closed form
    LimitKernel kernel;               // same dynamics through the generic kernel
};

GBeta g_beta_u(const WarningSpec& spec, const SystemConfig& cfg, PostType post);

struct BetaBounds {
    double lower, upper;
};

BetaBounds beta_bounds(const SystemConfig& cfg, PostType post);
double iqos_factor(const SystemConfig& cfg, PostType post);

struct MechanismAnalysis {
    WarningSpec spec;
    PostType post = PostType::Fake;
    double mu_a = 0.0;
    std::vector<EquilibriumPoint> equilibria;
    double beta_lower = 0.0, beta_upper = 1.0;
    double qos = 0.0;   // smallest equilibrium
    double iqos = 0.0;

    double beta_min() const;
    double beta_max() const;
    std::size_t attractor_count() const;
};

MechanismAnalysis analyze(const WarningSpec& spec, const SystemConfig& cfg, PostType post, const RootOptions& opt = {});

void write_analysis_csv_header(std::ostream& os);
void write_analysis_csv(std::ostream& os, const MechanismAnalysis& a);

} // namespace fpwm
