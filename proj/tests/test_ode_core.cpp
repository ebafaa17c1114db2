#include "doctest.h"

#include <cmath>
#include <sstream>

#include "fpwm/design.hpp"
#include "fpwm/ode_core.hpp"
#include "fpwm/presets.hpp"
#include "fpwm/warning.hpp"

using namespace fpwm;

namespace {

LimitKernel constant_kernel(Mean2 m, double lx = 1.0, double ly = 1.0) {
    LimitKernel k;
    k.mean = [m](double) { return m; };
    k.lambda_x = {[lx](double) { return lx; }};
    k.lambda_y = {[ly](double) { return ly; }};
    return k;
}

// Forward Euler on d(beta)/dt = g(beta).
double flow(const std::function<double(double)>& g, double beta, double horizon, double dt = 1e-3) {
    for (double t = 0; t < horizon; t += dt) beta = std::clamp(beta + dt * g(beta), 0.0, 1.0);
    return beta;
}

} // namespace

TEST_CASE("f_beta with equal rates is the identity") {
    LimitKernel k = constant_kernel({1, 1, 1, 1}, 0.7, 0.7);
    for (double b : {0.0, 0.3, 0.55, 1.0}) CHECK(f_beta_inf(k, b) == doctest::Approx(b));
    CHECK(f_beta_inf(k, 0.0) == 0.0);
    CHECK(f_beta_inf(k, 1.0) == 1.0);

    SystemConfig cfg = with_mua(naive_config(), 0.1);
    LimitKernel wk = warning_kernel(WarningSpec::eo(3.0, 0.4, cfg.gamma), cfg, PostType::Fake);
    CHECK(f_beta_inf(wk, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(d_inf(wk, 0.3) == doctest::Approx(1.0));
}

TEST_CASE("g_beta special cases") {
    LimitKernel k = constant_kernel({0.4, 0.8, 0.25, 1.1});
    CHECK(g_beta(k, 0.0) == doctest::Approx(0.25));
    LimitKernel dead = constant_kernel({0, 0, 0, 0});
    for (double b : {0.0, 0.2, 0.9}) CHECK(g_beta(dead, b) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("h map") {
    LimitKernel k = constant_kernel({0.8, 0.8, 0.8, 0.8});
    Upsilon h = h_map(k, 0.4);
    CHECK(h[0] == doctest::Approx(2 * 0.8 - 1));
    CHECK(h[2] == doctest::Approx(2 * 0.8));
    LimitKernel k2 = constant_kernel({0.3, 1.2, 0.7, 0.2});
    LimitKernel k_unequal = constant_kernel({0.3, 1.2, 0.7, 0.2}, 0.4, 1.3);
    for (double b : {0.0, 0.1, 0.5, 0.99}) {
        Upsilon hh = h_map(k2, b);
        CHECK(hh[2] - hh[0] == doctest::Approx(1.0));
        Upsilon hu = h_map(k_unequal, b);
        CHECK(hu[2] - hu[0] == doctest::Approx(1.0));
        // The ratio ODE and the scalar ODE share their zeros.
        CHECK(hh[1] - b * hh[0] == doctest::Approx(g_beta(k2, b)).epsilon(1e-12));
    }

    SystemConfig cfg = naive_config();
    WarningSpec s = optimal_eo(cfg, cfg.delta).spec;
    LimitKernel wk = warning_kernel(s, cfg, PostType::Fake);
    double star = analyze(s, cfg, PostType::Fake).qos;
    CHECK(h_map(wk, star)[0] > 0.0);
}

TEST_CASE("linear g has a single attractor") {
    auto eq = find_equilibria([](double b) { return 0.5 - b; });
    REQUIRE(eq.size() == 1);
    CHECK(eq[0].beta == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(eq[0].kind == EquilibriumKind::Attractor);
    CHECK(eq[0].g_left_sign == 1);
    CHECK(eq[0].g_right_sign == -1);
}

TEST_CASE("tangential zero is a saddle") {
    auto g = [](double b) { return -(b - 0.3) * (b - 0.6) * (b - 0.6); };
    auto eq = find_equilibria(g);
    REQUIRE(eq.size() == 2);
    CHECK(eq[0].beta == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(eq[0].kind == EquilibriumKind::Attractor);
    CHECK(eq[1].beta == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(eq[1].kind == EquilibriumKind::Saddle);

    // Double root away from the grid.
    auto g2 = [](double b) { return -(b - 0.3) * (b - 0.612345678) * (b - 0.612345678); };
    auto eq2 = find_equilibria(g2);
    REQUIRE(eq2.size() == 2);
    CHECK(eq2[1].beta == doctest::Approx(0.612345678).epsilon(1e-5));
    CHECK(eq2[1].kind == EquilibriumKind::Saddle);
}

TEST_CASE("cubic with alternating kinds") {
    auto g = [](double b) { return -(b - 0.2) * (b - 0.5) * (b - 0.8); };
    auto eq = find_equilibria(g);
    REQUIRE(eq.size() == 3);
    CHECK(eq[0].kind == EquilibriumKind::Attractor);
    CHECK(eq[1].kind == EquilibriumKind::Repeller);
    CHECK(eq[2].kind == EquilibriumKind::Attractor);

    // Classification agrees with the forward flow.
    for (const auto& e : eq) {
        double lo = flow(g, e.beta - 1e-3, 150.0), hi = flow(g, e.beta + 1e-3, 150.0);
        if (e.kind == EquilibriumKind::Attractor) {
            CHECK(std::abs(lo - e.beta) < 1e-4);
            CHECK(std::abs(hi - e.beta) < 1e-4);
        } else {
            CHECK(std::abs(lo - e.beta) > 0.05);
            CHECK(std::abs(hi - e.beta) > 0.05);
        }
    }
}

TEST_CASE("plateaus and boundary zeros") {
    auto plateau = [](double b) {
        if (b < 0.4) return 0.4 - b;
        if (b > 0.6) return 0.6 - b;
        return 0.0;
    };
    auto eq = find_equilibria(plateau);
    REQUIRE(eq.size() == 1);
    CHECK(eq[0].beta == doctest::Approx(0.5));
    CHECK(eq[0].kind == EquilibriumKind::Attractor);

    auto at0 = find_equilibria([](double b) { return -b; });
    REQUIRE(at0.size() == 1);
    CHECK(at0[0].beta == 0.0);
    CHECK(at0[0].kind == EquilibriumKind::Attractor);
    CHECK(at0[0].g_left_sign == 0);

    auto at1 = find_equilibria([](double b) { return 1.0 - b; });
    REQUIRE(at1.size() == 1);
    CHECK(at1[0].beta == 1.0);
    CHECK(at1[0].kind == EquilibriumKind::Attractor);
    CHECK(at1[0].g_right_sign == 0);

    auto rep0 = find_equilibria([](double b) { return b * (0.5 - b); });
    REQUIRE(rep0.size() == 2);
    CHECK(rep0[0].beta == 0.0);
    CHECK(rep0[0].kind == EquilibriumKind::Repeller);
    CHECK(rep0[1].kind == EquilibriumKind::Attractor);
}

TEST_CASE("boundary sign violations are errors") {
    CHECK_THROWS_AS(find_equilibria([](double b) { return b - 0.5; }), InvariantViolation);
    CHECK_THROWS_AS(find_equilibria([](double) { return 0.1; }), InvariantViolation);
}

TEST_CASE("eo reference point: one attractor at full identification") {
    SystemConfig cfg = exwm_config();
    WarningSpec s = optimal_eo(cfg, cfg.delta).spec;
    auto eq = find_equilibria([&](double b) { return g_direct(s, cfg, PostType::Fake, b); });
    REQUIRE(eq.size() == 1);
    CHECK(eq[0].kind == EquilibriumKind::Attractor);
    CHECK(std::abs(eq[0].beta - 0.99981) <= 1e-3);
}

TEST_CASE("roots satisfy the residual bound") {
    SystemConfig cfg = with_mua(naive_config(), 0.2);
    for (Mechanism m : {Mechanism::EO, Mechanism::EA, Mechanism::EH, Mechanism::EH2}) {
        WarningSpec s = build_design(m, cfg, ThresholdMode::Adjusted).spec;
        for (PostType p : {PostType::Fake, PostType::Real}) {
            auto g = [&](double b) { return g_direct(s, cfg, p, b); };
            const double bound = grid_lipschitz(g) * RootOptions{}.tol + 1e-12;
            for (const auto& e : find_equilibria(g)) CHECK(std::abs(g(e.beta)) <= bound);
        }
    }
}

TEST_CASE("ratio ODE integration") {
    LimitKernel k = constant_kernel({0.6, 0.9, 0.3, 1.2});
    auto zero = integrate_upsilon(k, {0, 0, 0, 0}, 5.0, 0.01);
    for (const auto& p : zero)
        for (double v : p.y) CHECK(v == 0.0);

    // h constant in beta when f = beta and rows have equal sums: closed-form exponential relaxation.
    LimitKernel c = constant_kernel({0.7, 0.7, 0.7, 0.7});
    Upsilon y0{1.0, 0.3, 2.0, 0.5};
    Upsilon h0 = h_map(c, 0.3);
    auto traj = integrate_upsilon(c, y0, 10.0, 0.01);
    CHECK(traj.back().t == doctest::Approx(10.0));
    for (int i = 0; i < 4; ++i) {
        if (i == 1 || i == 3) continue;  // theta components follow beta
        CHECK(std::abs(traj.back().y[i] - h0[i]) <= std::abs(y0[i] - h0[i]) * std::exp(-10.0) + 1e-9);
    }

    CHECK_THROWS_AS(integrate_upsilon(k, {1.0, 2.0, 3.0, 1.0}, 1.0, 0.1), PreconditionError);
}

TEST_CASE("ratio ODE reaches the eo attractor") {
    SystemConfig cfg = with_mua(exwm_config(), 0.01, MuaAbsorber::WarningSeekers);
    WarningSpec s = optimal_eo(cfg, cfg.delta).spec;
    LimitKernel k = warning_kernel(s, cfg, PostType::Fake);
    double star = analyze(s, cfg, PostType::Fake).qos;
    auto traj = integrate_upsilon(k, {1.0, 0.0, 1.0, 0.0}, 40.0, 0.005);
    CHECK(std::abs(upsilon_beta(traj.back().y) - star) <= 1e-6);
    for (const auto& p : traj) CHECK(in_admissible_cone(p.y, 1e-9));

    // d(theta/psi)/dt = g(beta) / psi along the flow.
    for (std::size_t i : {std::size_t{200}, std::size_t{600}, std::size_t{1500}}) {
        const auto& a = traj[i - 1];
        const auto& b = traj[i + 1];
        const double dbeta = (upsilon_beta(b.y) - upsilon_beta(a.y)) / (b.t - a.t);
        const auto& m = traj[i];
        const double beta = upsilon_beta(m.y);
        CHECK(std::abs(dbeta - g_beta(k, beta) / m.y[0]) <= 1e-4);
    }
}

TEST_CASE("equilibria CSV") {
    std::ostringstream os;
    write_equilibria_csv(os, find_equilibria([](double b) { return 0.5 - b; }));
    CHECK(os.str().rfind("beta,kind,g_left_sign,g_right_sign\n0.5,attractor,1,-1", 0) == 0);
}
