#include "fpwm/warning.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fpwm {

std::string_view to_string(Mechanism m) {
    switch (m) {
    case Mechanism::EO: return "eo";
    case Mechanism::EA: return "ea";
    case Mechanism::EH: return "eh";
    case Mechanism::EH2: return "eh2";
    }
    return "?";
}

Mechanism parse_mechanism(std::string_view s) {
    if (s == "eo") return Mechanism::EO;
    if (s == "ea") return Mechanism::EA;
    if (s == "eh") return Mechanism::EH;
    if (s == "eh2") return Mechanism::EH2;
    throw ConfigError("unknown mechanism '" + std::string(s) + "' (expected eo, ea, eh or eh2)");
}

std::vector<std::string> spec_violations(const WarningSpec& spec, const SystemConfig& cfg) {
    std::vector<std::string> out;
    if (spec.w < 0.0 || spec.b < 0.0 || spec.gamma < 0.0) out.push_back("w, b and gamma must be non-negative");
    const double w_cap = 1.0 / cfg.alpha_x_F - spec.gamma;
    switch (spec.kind) {
    case Mechanism::EO:
    case Mechanism::EA:
        if (spec.w > w_cap + 1e-12) out.push_back("w exceeds 1/alpha_x_F - gamma");
        break;
    case Mechanism::EH:
        if (spec.w > w_cap + 1e-12) out.push_back("w exceeds 1/alpha_x_F - gamma");
        if (spec.phi < 1.0 - 1e-9) out.push_back("phi must be at least 1");
        break;
    case Mechanism::EH2:
        if (std::abs(spec.w - (1.0 / cfg.alpha_x_R - spec.gamma)) > 1e-12)
            out.push_back("eh2 requires w = 1/alpha_x_R - gamma");
        break;
    }
    return out;
}

double base_warning(double w, double b, double gamma, double beta) {
    if (beta <= 0.0) return gamma;
    return w * beta / (beta + b * (1.0 - beta)) + gamma;
}

namespace {

double adversary_correction(const SystemConfig& cfg, double beta) {
    if (beta <= 0.0 || cfg.mua == 0.0) return 0.0;
    const double den = cfg.mu2 * cfg.m_f * cfg.eta_F * (beta * cfg.alpha_x_F + (1.0 - beta) * cfg.alpha_y_F);
    return beta * cfg.mua * cfg.m_f * cfg.eta_a / den;
}

} // namespace

double warning_value(const WarningSpec& spec, double beta, const SystemConfig& cfg) {
    const double eo = base_warning(spec.w, spec.b, spec.gamma, beta);
    switch (spec.kind) {
    case Mechanism::EO:
    case Mechanism::EH2: return eo;
    case Mechanism::EA: return eo + adversary_correction(cfg, beta);
    case Mechanism::EH: return spec.phi * (eo + adversary_correction(cfg, beta));
    }
    return eo;
}

WarningFn warning_function(const WarningSpec& spec, const SystemConfig& cfg) {
    return [spec, cfg](double beta) { return warning_value(spec, beta, cfg); };
}

Mean2 limit_mean_matrix(const WarningSpec& spec, const SystemConfig& cfg, PostType post, double beta) {
    const PostParams pp = post_params(cfg, post);
    const double om = warning_value(spec, beta, cfg);
    const double tx = std::min(om * pp.alpha_x, 1.0);
    const double ty = std::min(om * pp.alpha_y, 1.0);
    const double scale = cfg.m_f * pp.eta;
    const double adv = cfg.mua * cfg.m_f * cfg.eta_a;
    Mean2 m;
    m.xx = (cfg.mu1 * cfg.rho * pp.alpha_x + cfg.mu2 * tx) * scale;
    m.xy = (cfg.mu1 * (1.0 - pp.alpha_x * cfg.rho) + cfg.mu2 * (1.0 - tx)) * scale + adv;
    m.yx = (cfg.mu1 * cfg.rho * pp.alpha_y + cfg.mu2 * ty) * scale;
    m.yy = (cfg.mu1 * (1.0 - pp.alpha_y * cfg.rho) + cfg.mu2 * (1.0 - ty)) * scale + adv;
    return m;
}

double g_direct(const WarningSpec& spec, const SystemConfig& cfg, PostType post, double beta) {
    const PostParams pp = post_params(cfg, post);
    const double om = warning_value(spec, beta, cfg);
    const double tx = std::min(om * pp.alpha_x, 1.0);
    const double ty = std::min(om * pp.alpha_y, 1.0);
    const double inner = -beta * cfg.mu2 - beta * cfg.mu1 * (1.0 - pp.alpha_x * cfg.rho) +
                         (1.0 - beta) * cfg.mu1 * cfg.rho * pp.alpha_y +
                         cfg.mu2 * (beta * tx + (1.0 - beta) * ty);
    return inner * cfg.m_f * pp.eta - beta * cfg.mua * cfg.m_f * cfg.eta_a;
}

LimitKernel warning_kernel(const WarningSpec& spec, const SystemConfig& cfg, PostType post) {
    LimitKernel k;
    k.mean = [spec, cfg, post](double beta) { return limit_mean_matrix(spec, cfg, post, beta); };
    for (double mu : {cfg.mu0, cfg.mu1, cfg.mu2, cfg.mua}) {
        if (mu <= 0.0) continue;
        k.lambda_x.push_back([mu](double) { return mu; });
        k.lambda_y.push_back([mu](double) { return mu; });
    }
    return k;
}

GBeta g_beta_u(const WarningSpec& spec, const SystemConfig& cfg, PostType post) {
    return {[spec, cfg, post](double beta) { return g_direct(spec, cfg, post, beta); },
            warning_kernel(spec, cfg, post)};
}

BetaBounds beta_bounds(const SystemConfig& cfg, PostType post) {
    const PostParams pp = post_params(cfg, post);
    const double q = (cfg.mu2 + cfg.mu1 * (1.0 - (pp.alpha_x - pp.alpha_y) * cfg.rho)) * pp.eta + cfg.mua * cfg.eta_a;
    return {cfg.mu1 * cfg.rho * pp.alpha_y * pp.eta / q, (cfg.mu2 + cfg.mu1 * cfg.rho * pp.alpha_y) * pp.eta / q};
}

double iqos_factor(const SystemConfig& cfg, PostType post) {
    const double active = cfg.mu1 + cfg.mu2;
    if (!(active > 0.0)) throw ConfigError("i-QoS factor undefined when mu1 + mu2 = 0");
    const double eta = post_params(cfg, post).eta;
    return (active * eta + cfg.mua * cfg.eta_a) / (active * eta);
}

double MechanismAnalysis::beta_min() const {
    double m = 1.0;
    for (const auto& e : equilibria) m = std::min(m, e.beta);
    return m;
}

double MechanismAnalysis::beta_max() const {
    double m = 0.0;
    for (const auto& e : equilibria) m = std::max(m, e.beta);
    return m;
}

std::size_t MechanismAnalysis::attractor_count() const {
    return static_cast<std::size_t>(std::count_if(equilibria.begin(), equilibria.end(), [](const auto& e) {
        return e.kind == EquilibriumKind::Attractor;
    }));
}

MechanismAnalysis analyze(const WarningSpec& spec, const SystemConfig& cfg, PostType post, const RootOptions& opt) {
    require_valid(cfg);
    MechanismAnalysis a;
    a.spec = spec;
    a.post = post;
    a.mu_a = cfg.mua;
    a.equilibria = find_equilibria([&](double beta) { return g_direct(spec, cfg, post, beta); }, opt);
    if (a.attractor_count() == 0)
        throw InvariantViolation("no attractor found for " + std::string(to_string(spec.kind)) + " / " +
                                 std::string(to_string(post)));
    const BetaBounds bb = beta_bounds(cfg, post);
    a.beta_lower = bb.lower;
    a.beta_upper = bb.upper;
    a.qos = a.beta_min();
    a.iqos = iqos_factor(cfg, post) * a.qos;
    return a;
}

void write_analysis_csv_header(std::ostream& os) {
    os << "mechanism,post,mu_a,w,b,phi,beta_star,kind,qos,iqos\n";
}

void write_analysis_csv(std::ostream& os, const MechanismAnalysis& a) {
    for (const auto& e : a.equilibria)
        os << to_string(a.spec.kind) << ',' << to_string(a.post) << ',' << a.mu_a << ',' << a.spec.w << ','
           << a.spec.b << ',' << a.spec.phi << ',' << e.beta << ',' << to_string(e.kind) << ',' << a.qos << ','
           << a.iqos << '\n';
}

} // namespace fpwm
