#include "fpwm/presets.hpp"

namespace fpwm {

SystemConfig smart_config() {
    SystemConfig c;
    c.mu0 = 0.5;
    c.mu1 = 0.0;
    c.mu2 = 0.5;
    c.mua = 0.0;
    c.alpha_x_F = 0.85;
    c.alpha_y_F = 0.6375;
    c.alpha_x_R = 0.3;
    c.alpha_y_R = 0.09;
    c.eta_F = 0.08;
    c.eta_R = 0.05;
    c.eta_a = 0.55;
    c.rho = 0.9;
    c.gamma = 0.1;
    c.m_f = 28.0;
    c.friends = FriendDistribution::deterministic(28);
    c.delta = 0.02;
    return c;
}

SystemConfig exwm_config() {
    SystemConfig c = smart_config();
    c.mu0 = 0.0;
    c.mu2 = 1.0;
    return c;
}

SystemConfig naive_config() { return SystemConfig{}; }

std::vector<double> exwm_grid() { return {0.0, 0.005, 0.01, 0.015, 0.02}; }

std::vector<double> eight_point_grid() { return {0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35}; }

std::vector<std::string> preset_names() {
    return {"fig_exwm", "fig_eowm_smart", "fig_eowm_naive", "fig_eawm", "fig_ehwm",
            "fig_real_posts", "table2_eh2", "table3_learning", "custom"};
}

namespace {

ExperimentSpec experiment(std::string name, SystemConfig cfg, std::vector<Mechanism> mechs,
                          std::vector<PostType> posts, std::vector<double> grid, ThresholdMode mode,
                          MuaAbsorber absorber = MuaAbsorber::NonParticipants) {
    ExperimentSpec e;
    e.name = std::move(name);
    e.cfg = cfg;
    e.mechanisms = std::move(mechs);
    e.posts = std::move(posts);
    e.mua_grid = std::move(grid);
    e.threshold_mode = mode;
    e.absorber = absorber;
    return e;
}

const std::vector<PostType> both{PostType::Fake, PostType::Real};

} // namespace

Preset make_preset(std::string_view name) {
    Preset p;
    p.name = std::string(name);
    if (name == "fig_exwm") {
        p.description = "eo-WM limits on smart users with mu2 + mu_a = 1";
        p.experiments.push_back(experiment("exwm", exwm_config(), {Mechanism::EO}, both, exwm_grid(),
                                           ThresholdMode::Plain, MuaAbsorber::WarningSeekers));
    } else if (name == "fig_eowm_smart") {
        p.description = "eo-WM QoS against mu_a, smart users";
        p.experiments.push_back(experiment("eowm_smart", smart_config(), {Mechanism::EO}, both, eight_point_grid(),
                                           ThresholdMode::Plain));
    } else if (name == "fig_eowm_naive") {
        p.description = "eo-WM QoS against mu_a, naive users";
        p.experiments.push_back(experiment("eowm_naive", naive_config(), {Mechanism::EO}, both, eight_point_grid(),
                                           ThresholdMode::Plain));
    } else if (name == "fig_eawm") {
        p.description = "ea-WM against eo-WM, smart and naive users";
        for (auto& [n, c] : {std::pair{"eawm_smart", smart_config()}, std::pair{"eawm_naive", naive_config()}})
            p.experiments.push_back(experiment(n, c, {Mechanism::EO, Mechanism::EA}, both, eight_point_grid(),
                                               ThresholdMode::Adjusted));
    } else if (name == "fig_ehwm") {
        p.description = "eh-WM against ea-WM and eo-WM, fake post";
        for (auto& [n, c] : {std::pair{"ehwm_smart", smart_config()}, std::pair{"ehwm_naive", naive_config()}})
            p.experiments.push_back(experiment(n, c, {Mechanism::EO, Mechanism::EA, Mechanism::EH},
                                               {PostType::Fake}, eight_point_grid(), ThresholdMode::Adjusted));
    } else if (name == "fig_real_posts") {
        p.description = "real-post limits under eo, ea and eh";
        for (auto& [n, c] : {std::pair{"real_smart", smart_config()}, std::pair{"real_naive", naive_config()}})
            p.experiments.push_back(experiment(n, c, {Mechanism::EO, Mechanism::EA, Mechanism::EH},
                                               {PostType::Real}, eight_point_grid(), ThresholdMode::Adjusted));
    } else if (name == "table2_eh2") {
        p.description = "eh2-WM i-QoS with known sensitivities, naive users";
        ExperimentSpec e = experiment("table2_eh2", naive_config(), {Mechanism::EH2}, {PostType::Fake},
                                      {0.0, 0.1, 0.2, 0.3}, ThresholdMode::Adjusted);
        e.paths = 0;
        p.experiments.push_back(e);
    } else if (name == "table3_learning") {
        p.description = "fraction of learning runs within 0.05 of the eh2 i-QoS";
        p.learning = true;
        p.learning_cfg = naive_config();
    } else if (name == "custom") {
        p.description = "sweep over a user-supplied configuration (--config)";
    } else {
        throw ConfigError("unknown preset '" + std::string(name) + "'");
    }
    return p;
}

} // namespace fpwm
