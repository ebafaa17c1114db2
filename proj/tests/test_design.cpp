#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fpwm/design.hpp"
#include "fpwm/presets.hpp"

using namespace fpwm;

namespace {

bool ea_above_floor(const SystemConfig& base, double mua, double floor) {
    SystemConfig cfg = with_mua(base, mua);
    auto a = analyze(build_ea(cfg, ThresholdMode::Plain).spec, cfg, PostType::Fake);
    for (const auto& e : a.equilibria)
        if (e.beta < floor - 1e-9) return false;
    return true;
}

} // namespace

TEST_CASE("w_bar") {
    CHECK(w_bar(smart_config()) == doctest::Approx(1.07647).epsilon(1e-5));
    CHECK(w_bar(naive_config()) == doctest::Approx(3.2333).epsilon(1e-4));
    SystemConfig c = smart_config();
    c.gamma = 1.0 / c.alpha_x_F;
    CHECK_THROWS_AS(w_bar(c), ConfigError);
}

TEST_CASE("optimal eo: non-binding and binding cases") {
    SystemConfig loose = exwm_config();
    loose.delta = 0.2;
    DesignResult d = optimal_eo(loose, loose.delta);
    CHECK_FALSE(d.binding);
    CHECK(d.spec.b == 0.0);
    CHECK(d.spec.w == doctest::Approx(w_bar(loose)));

    SystemConfig cfg = exwm_config();
    DesignResult t = optimal_eo(cfg, cfg.delta);
    CHECK(t.binding);
    CHECK(t.spec.b > 0.0);
    auto real = analyze(t.spec, cfg, PostType::Real);
    REQUIRE(real.equilibria.size() == 1);
    CHECK(std::abs(real.qos - cfg.delta) <= 1e-8);
    CHECK(std::abs(analyze(t.spec, cfg, PostType::Fake).qos - 0.99981) <= 1e-3);

    CHECK(t.diag("w_bar") == doctest::Approx(w_bar(cfg)));
    CHECK(t.diag("beta_real_b0") > cfg.delta);
    CHECK(std::isnan(t.diag("no_such_value")));
}

TEST_CASE("binding iff b* positive on random thresholds") {
    SystemConfig cfg = naive_config();
    for (double thr : {0.03, 0.05, 0.1, 0.2, 0.4}) {
        DesignResult d = optimal_eo(cfg, thr);
        CHECK(d.binding == (d.spec.b > 0.0));
        auto real = analyze(d.spec, cfg, PostType::Real);
        CHECK(real.beta_max() <= thr + 1e-9);
        if (d.binding) CHECK(std::abs(real.beta_max() - thr) <= 1e-8);
    }
}

TEST_CASE("infeasible threshold is reported") {
    SystemConfig cfg = naive_config();
    cfg.delta = 0.001;
    CHECK_THROWS_AS(optimal_eo(cfg, cfg.delta), InfeasibleDesign);
    CHECK_THROWS_AS(optimal_eo(cfg, 0.0), PreconditionError);
}

TEST_CASE("adversary-adjusted threshold") {
    CHECK(delta_a(naive_config()) == naive_config().delta);
    CHECK(delta_a(with_mua(naive_config(), 0.1)) == doctest::Approx(0.041270).epsilon(1e-5));
    double prev = 1.0;
    for (double m = 0.0; m <= 0.3; m += 0.05) {
        double d = delta_a(with_mua(naive_config(), m));
        CHECK(d < prev);
        prev = d;
    }
    SystemConfig z = with_mua(naive_config(), 0.1);
    z.mu1 = z.mu2 = 0.0;
    CHECK_THROWS_AS(delta_a(z), ConfigError);
    CHECK(threshold_for(z, ThresholdMode::Plain) == z.delta);
}

TEST_CASE("no-adversary reference QoS") {
    SystemConfig cfg = naive_config();
    CHECK(beta_o_na(cfg, cfg.delta) == doctest::Approx(analyze(optimal_eo(cfg, cfg.delta).spec, cfg, PostType::Fake).qos));
    SystemConfig e = exwm_config();
    CHECK(std::abs(beta_o_na(with_mua(e, 0.01, MuaAbsorber::WarningSeekers), e.delta) - 0.99981) <= 1e-3);

    // The adversary lowers the eo optimum below the no-adversary value.
    for (double m : {0.02, 0.1, 0.2}) {
        SystemConfig c = with_mua(cfg, m);
        CHECK(analyze(optimal_eo(c, c.delta).spec, c, PostType::Fake).qos < beta_o_na(c, c.delta));
    }
}

TEST_CASE("delta cap") {
    SystemConfig e = exwm_config();
    CHECK(std::abs(delta_cap_a(with_mua(e, 0.01, MuaAbsorber::WarningSeekers), e.delta)) <= 1e-9);

    // The floor predicate flips at the cap.
    SystemConfig cfg = naive_config();
    const double floor = beta_o_na(cfg, cfg.delta);
    const double cap = delta_cap_a(with_mua(cfg, 0.01), cfg.delta);
    REQUIRE(cap > 0.0);
    REQUIRE(cap < cfg.mu0);
    CHECK(ea_above_floor(cfg, 0.5 * cap, floor));
    CHECK_FALSE(ea_above_floor(cfg, std::min(1.5 * cap, 0.5 * (cap + cfg.mu0)), floor));
    double lo = 0.0, hi = std::min(1.5 * cap, 0.5 * (cap + cfg.mu0));
    for (int i = 0; i < 30; ++i) {
        double mid = 0.5 * (lo + hi);
        (ea_above_floor(cfg, mid, floor) ? lo : hi) = mid;
    }
    CHECK(std::abs(lo - cap) <= 1e-3);
}

TEST_CASE("ea design") {
    SystemConfig n = naive_config();
    DesignResult ea0 = build_ea(n, ThresholdMode::Adjusted);
    DesignResult eo0 = optimal_eo(n, n.delta);
    CHECK(ea0.spec.w == eo0.spec.w);
    CHECK(ea0.spec.b == eo0.spec.b);

    for (double m : {0.05, 0.1, 0.2, 0.3}) {
        SystemConfig c = with_mua(n, m);
        DesignResult ea = build_ea(c, ThresholdMode::Adjusted);
        CHECK(analyze(ea.spec, c, PostType::Real).beta_max() < ea.threshold_used);
        const double qa = analyze(ea.spec, c, PostType::Fake).qos;
        const double qo = analyze(optimal_eo(c, delta_a(c)).spec, c, PostType::Fake).qos;
        CHECK(qa >= qo - 1e-9);
    }
}

TEST_CASE("phi* and the eh design") {
    SystemConfig c = with_mua(naive_config(), 0.1);
    DesignResult eh = build_eh(c, ThresholdMode::Adjusted);
    CHECK(eh.spec.kind == Mechanism::EH);
    CHECK(eh.spec.phi > 1.0);
    CHECK(eh.diag("phi_star") == eh.spec.phi);
    auto a = analyze(eh.spec, c, PostType::Fake);
    CHECK(std::abs(a.iqos - 0.7629) <= 5e-4);

    DesignResult ea = build_ea(c, ThresholdMode::Adjusted);
    PhiResult ph = phi_star(c, ea.spec, ea.threshold_used);
    if (ph.bar_branch) {
        CHECK(ph.phi_star == ph.phi_bar);
    } else {
        const double lower = beta_bounds(c, PostType::Fake).lower;
        CHECK(ph.phi_star == doctest::Approx(1.0 / (warning_value(ea.spec, lower, c) * c.alpha_y_F)));
    }

    // No adversary: the eh design collapses to the ea design.
    DesignResult eh0 = build_eh(naive_config(), ThresholdMode::Adjusted);
    CHECK(eh0.spec.phi == doctest::Approx(1.0).epsilon(1e-8));

    SystemConfig big = with_mua(naive_config(), 0.325);
    auto ab = analyze(build_eh(big, ThresholdMode::Adjusted).spec, big, PostType::Fake);
    CHECK(std::abs(ab.qos - 0.5289) <= 5e-4);
    CHECK(std::abs(ab.iqos - 0.8086) <= 5e-4);
}

TEST_CASE("eh2 design") {
    SystemConfig n = naive_config();
    DesignResult d = build_eh2(n, ThresholdMode::Adjusted);
    CHECK(d.spec.w == doctest::Approx(8.2333).epsilon(1e-4));
    const double expected[] = {0.8289, 0.8270, 0.8257, 0.8246};
    const double grid[] = {0.0, 0.1, 0.2, 0.3};
    for (int i = 0; i < 4; ++i) {
        SystemConfig c = with_mua(n, grid[i]);
        DesignResult e = build_eh2(c, ThresholdMode::Adjusted);
        auto real = analyze(e.spec, c, PostType::Real);
        CHECK(real.equilibria.size() == 1);
        CHECK(real.beta_max() <= e.threshold_used + 1e-9);
        CHECK(std::abs(analyze(e.spec, c, PostType::Fake).iqos - expected[i]) <= 5e-4);
    }
}

TEST_CASE("ordering and real-post safety across mechanisms") {
    for (const SystemConfig& base : {naive_config(), smart_config()})
        for (double m : {0.0, 0.05, 0.1, 0.2}) {
            SystemConfig c = with_mua(base, m);
            const auto thr = ThresholdMode::Adjusted;
            double q[3];
            int i = 0;
            for (Mechanism mech : {Mechanism::EO, Mechanism::EA, Mechanism::EH}) {
                DesignResult d = build_design(mech, c, thr);
                q[i++] = analyze(d.spec, c, PostType::Fake).qos;
                CHECK(analyze(d.spec, c, PostType::Real).beta_max() <= d.threshold_used + 1e-9);
            }
            CHECK(q[0] <= q[1] + 1e-9);
            CHECK(q[1] <= q[2] + 1e-9);
            if (c.mu1 == 0.0 && c.mua == 0.0) {
                // With only ws users active, w_h2 makes beta = 1 a real-post zero; the design is rejected.
                CHECK_THROWS_AS(build_eh2(c, thr), InvariantViolation);
                continue;
            }
            DesignResult e2 = build_eh2(c, thr);
            CHECK(analyze(e2.spec, c, PostType::Real).beta_max() <= e2.threshold_used + 1e-9);
        }
}

TEST_CASE("design CSV and mode parsing") {
    std::ostringstream os;
    write_design_csv(os, optimal_eo(exwm_config(), 0.02));
    const std::string s = os.str();
    CHECK(s.rfind("key,value\nmechanism,eo\n", 0) == 0);
    CHECK(s.find("binding,1\n") != std::string::npos);
    CHECK(s.find("b_star,") != std::string::npos);
    CHECK(parse_threshold_mode("adjusted") == ThresholdMode::Adjusted);
    CHECK(parse_threshold_mode("plain") == ThresholdMode::Plain);
    CHECK_THROWS_AS(parse_threshold_mode("delta"), ConfigError);
}
