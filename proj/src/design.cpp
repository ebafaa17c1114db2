#include "fpwm/design.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace fpwm {

std::string_view to_string(ThresholdMode m) { return m == ThresholdMode::Plain ? "plain" : "adjusted"; }

ThresholdMode parse_threshold_mode(std::string_view s) {
    if (s == "plain") return ThresholdMode::Plain;
    if (s == "adjusted" || s == "adversary_adjusted") return ThresholdMode::Adjusted;
    throw ConfigError("unknown threshold mode '" + std::string(s) + "' (expected plain or adjusted)");
}

double w_bar(const SystemConfig& cfg) {
    if (!(cfg.alpha_x_F > 0.0)) throw ConfigError("alpha_x_F must be positive");
    double w = 1.0 / cfg.alpha_x_F - cfg.gamma;
    if (!(w > 0.0)) throw ConfigError("gamma >= 1/alpha_x_F leaves no room for the warning weight");
    return w;
}

double delta_a(const SystemConfig& cfg) {
    const double active = (cfg.mu1 + cfg.mu2) * cfg.eta_R;
    if (!(active > 0.0)) throw ConfigError("delta_a undefined when mu1 + mu2 = 0");
    return cfg.delta * active / (active + cfg.mua * cfg.eta_a);
}

double threshold_for(const SystemConfig& cfg, ThresholdMode mode) {
    return mode == ThresholdMode::Plain ? cfg.delta : delta_a(cfg);
}

double DesignResult::diag(std::string_view name) const {
    for (const auto& [k, v] : diagnostics)
        if (k == name) return v;
    return std::numeric_limits<double>::quiet_NaN();
}

double b_star(const SystemConfig& cfg, double w, double threshold) {
    const double d = threshold;
    const double A = d * cfg.alpha_x_R + (1.0 - d) * cfg.alpha_y_R;
    const double den = d * ((cfg.mu1 + cfg.mu2) * cfg.eta_R + cfg.mua * cfg.eta_a) -
                       cfg.eta_R * (cfg.mu1 * cfg.rho + cfg.mu2 * cfg.gamma) * A;
    if (!(den > 0.0)) {
        std::ostringstream os;
        os << "b* denominator " << den << " <= 0 at threshold " << d << " (w = " << w << ")";
        throw InfeasibleDesign(os.str());
    }
    const double b = d / (1.0 - d) * (w * cfg.eta_R * cfg.mu2 * A / den - 1.0);
    if (!(b >= 0.0)) {
        std::ostringstream os;
        os << "b* = " << b << " is negative at threshold " << d << " (w = " << w << ")";
        throw InfeasibleDesign(os.str());
    }
    return b;
}

DesignResult eo_design_at(const SystemConfig& cfg, double w, double threshold, Mechanism label) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw PreconditionError("threshold must lie in (0,1)");
    WarningSpec spec{label, w, 0.0, cfg.gamma, 1.0};
    const double beta0 = analyze(spec, cfg, PostType::Real).beta_max();
    DesignResult out;
    out.threshold_used = threshold;
    out.diagnostics.emplace_back("w", w);
    out.diagnostics.emplace_back("beta_real_b0", beta0);
    if (beta0 > threshold) {
        spec.b = b_star(cfg, w, threshold);
        const auto check = analyze(spec, cfg, PostType::Real);
        if (std::abs(check.beta_max() - threshold) > 1e-8 || check.equilibria.size() != 1) {
            std::ostringstream os;
            os << "real-post zero " << check.beta_max() << " misses threshold " << threshold << " at b* = " << spec.b;
            throw UnsafeDesign(os.str());
        }
        out.binding = true;
    }
    out.diagnostics.emplace_back("b_star", spec.b);
    out.spec = spec;
    return out;
}

DesignResult optimal_eo(const SystemConfig& cfg, double threshold) {
    DesignResult d = eo_design_at(cfg, w_bar(cfg), threshold, Mechanism::EO);
    d.diagnostics.insert(d.diagnostics.begin(), {"w_bar", d.spec.w});
    return d;
}

double beta_o_na(const SystemConfig& cfg, double threshold) {
    const SystemConfig cf = without_adversary(cfg);
    return analyze(optimal_eo(cf, threshold).spec, cf, PostType::Fake).qos;
}

namespace {

double delta_cap_from(const SystemConfig& cfg, const WarningSpec& na_spec, double beta_na) {
    const double om = base_warning(na_spec.w, na_spec.b, na_spec.gamma, beta_na);
    return cfg.mu2 * cfg.eta_F * (1.0 / cfg.alpha_x_F - om) *
           (beta_na * cfg.alpha_x_F + (1.0 - beta_na) * cfg.alpha_y_F) / (beta_na * cfg.eta_a);
}

} // namespace

double delta_cap_a(const SystemConfig& cfg, double threshold) {
    const SystemConfig cf = without_adversary(cfg);
    const WarningSpec na = optimal_eo(cf, threshold).spec;
    const double beta_na = analyze(na, cf, PostType::Fake).qos;
    return delta_cap_from(cfg, na, beta_na);
}

DesignResult build_ea(const SystemConfig& cfg, ThresholdMode mode) {
    if (!(cfg.mu2 > 0.0)) throw ConfigError("ea design needs mu2 > 0");
    const double thr = threshold_for(cfg, mode);
    const double wb = w_bar(cfg);
    const double beta0 = analyze(WarningSpec::ea(wb, 0.0, cfg.gamma), cfg, PostType::Real).beta_max();

    // b comes from the no-adversary optimum, whose threshold is delta in either mode.
    const SystemConfig cf = without_adversary(cfg);
    const DesignResult na = optimal_eo(cf, threshold_for(cf, mode));
    const double beta_na = analyze(na.spec, cf, PostType::Fake).qos;

    DesignResult out;
    out.threshold_used = thr;
    out.spec = WarningSpec::ea(wb, beta0 > thr ? na.spec.b : 0.0, cfg.gamma);
    out.binding = out.spec.b > 0.0;
    out.diagnostics = {{"w_bar", wb},
                       {"beta_real_b0", beta0},
                       {"b_star_na", na.spec.b},
                       {"beta_o_na", beta_na},
                       {"delta_cap_a", delta_cap_from(cfg, na.spec, beta_na)}};
    return out;
}

PhiResult phi_star(const SystemConfig& cfg, const WarningSpec& ea_spec, double threshold) {
    const double d = threshold;
    const double om_d = warning_value(ea_spec, d, cfg);
    const double A = d * cfg.alpha_x_R + (1.0 - d) * cfg.alpha_y_R;
    const double num = d * (cfg.mu2 * cfg.eta_R + cfg.mu1 * (1.0 - cfg.alpha_x_R * cfg.rho) * cfg.eta_R +
                            cfg.mua * cfg.eta_a) -
                       (1.0 - d) * cfg.mu1 * cfg.rho * cfg.alpha_y_R * cfg.eta_R;
    const double bar = num / (cfg.mu2 * om_d * A * cfg.eta_R);
    const double lower_F = beta_bounds(cfg, PostType::Fake).lower;

    PhiResult r{bar, bar, true};
    if (!(bar < 1.0 / (cfg.alpha_y_R * om_d) || (lower_F == 0.0 && ea_spec.b == 0.0))) {
        r.phi_star = 1.0 / (warning_value(ea_spec, lower_F, cfg) * cfg.alpha_y_F);
        r.bar_branch = false;
    }
    // phi* = 1 exactly when there is no adversary; allow rounding below it.
    if (r.phi_star < 1.0 - 1e-9) {
        std::ostringstream os;
        os << "phi* = " << r.phi_star << " < 1";
        throw InvariantViolation(os.str());
    }
    return r;
}

DesignResult build_eh(const SystemConfig& cfg, ThresholdMode mode) {
    DesignResult out = build_ea(cfg, mode);
    const PhiResult ph = phi_star(cfg, out.spec, out.threshold_used);
    out.spec = WarningSpec::eh(out.spec.w, out.spec.b, out.spec.gamma, ph.phi_star);
    out.diagnostics.emplace_back("phi_bar", ph.phi_bar);
    out.diagnostics.emplace_back("phi_star", ph.phi_star);
    return out;
}

DesignResult build_eh2(const SystemConfig& cfg, ThresholdMode mode) {
    if (!(cfg.alpha_x_R > 0.0)) throw ConfigError("alpha_x_R must be positive");
    return eo_design_at(cfg, 1.0 / cfg.alpha_x_R - cfg.gamma, threshold_for(cfg, mode), Mechanism::EH2);
}

DesignResult build_design(Mechanism m, const SystemConfig& cfg, ThresholdMode mode) {
    switch (m) {
    case Mechanism::EO: return optimal_eo(cfg, threshold_for(cfg, mode));
    case Mechanism::EA: return build_ea(cfg, mode);
    case Mechanism::EH: return build_eh(cfg, mode);
    case Mechanism::EH2: return build_eh2(cfg, mode);
    }
    throw PreconditionError("unknown mechanism");
}

void write_design_csv(std::ostream& os, const DesignResult& d) {
    os << "key,value\n";
    os << "mechanism," << to_string(d.spec.kind) << '\n';
    os << "w," << d.spec.w << '\n';
    os << "b," << d.spec.b << '\n';
    os << "gamma," << d.spec.gamma << '\n';
    os << "phi," << d.spec.phi << '\n';
    os << "binding," << (d.binding ? 1 : 0) << '\n';
    os << "threshold_used," << d.threshold_used << '\n';
    for (const auto& [k, v] : d.diagnostics) os << k << ',' << v << '\n';
}

} // namespace fpwm
