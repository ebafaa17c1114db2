#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace fpwm {

struct Mean2 {
    double xx, xy, yx, yy;
};

// Limit kernel of a two-type population-dependent branching process.
struct LimitKernel {
    std::function<Mean2(double)> mean;
    // One rate function per death variety of each type; each must stay positive on [0,1].
    std::vector<std::function<double(double)>> lambda_x, lambda_y;
};

double d_inf(const LimitKernel& k, double beta);
double f_beta_inf(const LimitKernel& k, double beta);
double g_beta(const LimitKernel& k, double beta);

using Upsilon = std::array<double, 4>;  // (psi_c, theta_c, psi_a, theta_a)

Upsilon h_map(const LimitKernel& k, double beta);

enum class EquilibriumKind { Attractor, Repeller, Saddle };

std::string_view to_string(EquilibriumKind k);

struct EquilibriumPoint {
    double beta;
    EquilibriumKind kind;
    int g_left_sign;   // 0 when the side lies outside [0,1]
    int g_right_sign;
};

struct RootOptions {
    int grid_n = 20000;
    double tol = 1e-10;
    double probe = 1e-5;
    double plateau_eps = 1e-12;
    double boundary_slack = 1e-12;  // tolerated violation of g(0) >= 0, g(1) <= 0
};

EquilibriumKind classify(int left_sign, int right_sign, bool at_left_boundary, bool at_right_boundary);

// Zeros of g on [0,1], sorted ascending and classified by the signs of g on either side.
std::vector<EquilibriumPoint> find_equilibria(const std::function<double(double)>& g, const RootOptions& opt = {});

// Largest |dg/dbeta| seen on the root-finding grid.
double grid_lipschitz(const std::function<double(double)>& g, int grid_n = 20000);

struct UpsilonPoint {
    double t;
    Upsilon y;
};

double upsilon_beta(const Upsilon& y);
bool in_admissible_cone(const Upsilon& y, double slack = 1e-12);

// Fixed-step RK4 for dY/dt = h(beta) 1{psi_c > eps_zero} - Y with beta = theta_c / psi_c.
std::vector<UpsilonPoint> integrate_upsilon(const LimitKernel& k, const Upsilon& y0, double horizon, double step,
                                            double eps_zero = 1e-12);

void write_equilibria_csv(std::ostream& os, const std::vector<EquilibriumPoint>& eq);

} // namespace fpwm
