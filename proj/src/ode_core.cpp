#include "fpwm/ode_core.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fpwm/errors.hpp"

namespace fpwm {

namespace {

double sum_rates(const std::vector<std::function<double(double)>>& v, double beta) {
    double s = 0.0;
    for (const auto& f : v) s += f(beta);
    return s;
}

int sign_of(double v, double eps) {
    if (std::abs(v) <= eps) return 0;
    return v > 0.0 ? 1 : -1;
}

} // namespace

double d_inf(const LimitKernel& k, double beta) {
    return beta * sum_rates(k.lambda_x, beta) + (1.0 - beta) * sum_rates(k.lambda_y, beta);
}

double f_beta_inf(const LimitKernel& k, double beta) {
    return beta * sum_rates(k.lambda_x, beta) / d_inf(k, beta);
}

double g_beta(const LimitKernel& k, double beta) {
    const double f = f_beta_inf(k, beta);
    const Mean2 m = k.mean(beta);
    return -f * m.xy + (1.0 - f) * m.yx + beta - f + (1.0 - beta) * f * (m.xx + m.xy) -
           beta * (1.0 - f) * (m.yy + m.yx);
}

Upsilon h_map(const LimitKernel& k, double beta) {
    const double f = f_beta_inf(k, beta);
    const Mean2 m = k.mean(beta);
    const double psi_c = f * (m.xx + m.xy) + (1.0 - f) * (m.yy + m.yx) - 1.0;
    const double theta_c = f * (m.xx - 1.0) + (1.0 - f) * m.yx;
    return {psi_c, theta_c, psi_c + 1.0, f * m.xx + (1.0 - f) * m.yx};
}

std::string_view to_string(EquilibriumKind k) {
    switch (k) {
    case EquilibriumKind::Attractor: return "attractor";
    case EquilibriumKind::Repeller: return "repeller";
    case EquilibriumKind::Saddle: return "saddle";
    }
    return "?";
}

EquilibriumKind classify(int left, int right, bool at_left_boundary, bool at_right_boundary) {
    if (at_left_boundary && !at_right_boundary) {
        if (right < 0) return EquilibriumKind::Attractor;
        if (right > 0) return EquilibriumKind::Repeller;
        return EquilibriumKind::Saddle;
    }
    if (at_right_boundary && !at_left_boundary) {
        if (left > 0) return EquilibriumKind::Attractor;
        if (left < 0) return EquilibriumKind::Repeller;
        return EquilibriumKind::Saddle;
    }
    if (left > 0 && right < 0) return EquilibriumKind::Attractor;
    if (left < 0 && right > 0) return EquilibriumKind::Repeller;
    return EquilibriumKind::Saddle;
}

std::vector<EquilibriumPoint> find_equilibria(const std::function<double(double)>& g, const RootOptions& opt) {
    if (opt.grid_n < 2) throw PreconditionError("grid_n must be >= 2");
    const int n = opt.grid_n;
    std::vector<double> xs(n + 1), gs(n + 1);
    std::vector<int> ss(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = static_cast<double>(i) / n;
        gs[i] = g(xs[i]);
        if (std::isnan(gs[i])) throw InvariantViolation("g is NaN at beta = " + std::to_string(xs[i]));
        ss[i] = sign_of(gs[i], opt.plateau_eps);
    }
    if (gs[0] < -opt.boundary_slack)
        throw InvariantViolation("g(0) = " + std::to_string(gs[0]) + " < 0; kernel is mis-built");
    if (gs[n] > opt.boundary_slack)
        throw InvariantViolation("g(1) = " + std::to_string(gs[n]) + " > 0; kernel is mis-built");

    struct Span { double lo, hi; };
    std::vector<Span> spans;

    auto bisect = [&](double lo, double hi, double glo) {
        while (hi - lo > opt.tol) {
            double mid = 0.5 * (lo + hi);
            double gm = g(mid);
            if (gm == 0.0) return mid;
            if ((gm > 0.0) == (glo > 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    // Golden-section search for the minimum of |g| on [a, b].
    auto min_abs = [&](double a, double b) {
        const double r = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - r * (b - a), d = a + r * (b - a);
        double fc = std::abs(g(c)), fd = std::abs(g(d));
        while (b - a > opt.tol) {
            if (fc < fd) {
                b = d; d = c; fd = fc;
                c = b - r * (b - a); fc = std::abs(g(c));
            } else {
                a = c; c = d; fc = fd;
                d = a + r * (b - a); fd = std::abs(g(d));
            }
        }
        return 0.5 * (a + b);
    };

    int i = 0;
    while (i <= n) {
        if (ss[i] == 0) {
            int j = i;
            while (j + 1 <= n && ss[j + 1] == 0) ++j;
            spans.push_back({xs[i], xs[j]});
            i = j + 1;
            continue;
        }
        if (i < n && ss[i + 1] != 0 && ss[i + 1] != ss[i]) {
            double r = bisect(xs[i], xs[i + 1], gs[i]);
            spans.push_back({r, r});
        } else if (i > 0 && i < n && ss[i - 1] == ss[i] && ss[i + 1] == ss[i] &&
                   std::abs(gs[i]) <= std::abs(gs[i - 1]) && std::abs(gs[i]) < std::abs(gs[i + 1])) {
            double m = min_abs(xs[i - 1], xs[i + 1]);
            if (std::abs(g(m)) <= opt.plateau_eps) spans.push_back({m, m});
        }
        ++i;
    }

    std::vector<EquilibriumPoint> out;
    for (const auto& sp : spans) {
        const double beta = 0.5 * (sp.lo + sp.hi);
        const bool at_left = beta <= opt.tol;
        const bool at_right = beta >= 1.0 - opt.tol;
        auto probe_sign = [&](double x) { return sign_of(g(x), opt.plateau_eps); };
        int left = 0, right = 0;
        if (!at_left) {
            double x = sp.lo - opt.probe;
            if (x < 0.0) x = 0.5 * sp.lo;
            left = probe_sign(x);
        }
        if (!at_right) {
            double x = sp.hi + opt.probe;
            if (x > 1.0) x = 0.5 * (sp.hi + 1.0);
            right = probe_sign(x);
        }
        out.push_back({std::clamp(beta, 0.0, 1.0), classify(left, right, at_left, at_right), left, right});
    }
    return out;
}

double grid_lipschitz(const std::function<double(double)>& g, int grid_n) {
    double best = 0.0, prev = g(0.0);
    for (int i = 1; i <= grid_n; ++i) {
        double cur = g(static_cast<double>(i) / grid_n);
        best = std::max(best, std::abs(cur - prev) * grid_n);
        prev = cur;
    }
    return best;
}

double upsilon_beta(const Upsilon& y) {
    if (!(y[0] > 0.0)) return 0.0;
    return std::clamp(y[1] / y[0], 0.0, 1.0);
}

bool in_admissible_cone(const Upsilon& y, double slack) {
    for (double v : y)
        if (v < -slack) return false;
    return y[1] <= y[0] + slack && y[0] <= y[2] + slack && y[3] <= y[2] + slack;
}

std::vector<UpsilonPoint> integrate_upsilon(const LimitKernel& k, const Upsilon& y0, double horizon, double step,
                                            double eps_zero) {
    if (!in_admissible_cone(y0)) throw PreconditionError("initial ratio vector outside the admissible cone");
    if (!(step > 0.0) || !(horizon >= 0.0)) throw PreconditionError("integrate_upsilon needs step > 0, horizon >= 0");

    auto rhs = [&](const Upsilon& y) {
        Upsilon d{};
        if (y[0] > eps_zero) {
            Upsilon h = h_map(k, upsilon_beta(y));
            for (int i = 0; i < 4; ++i) d[i] = h[i] - y[i];
        } else {
            for (int i = 0; i < 4; ++i) d[i] = -y[i];
        }
        return d;
    };
    auto axpy = [](const Upsilon& y, double a, const Upsilon& d) {
        Upsilon o;
        for (int i = 0; i < 4; ++i) o[i] = y[i] + a * d[i];
        return o;
    };

    const auto steps = static_cast<long>(std::ceil(horizon / step - 1e-9));
    std::vector<UpsilonPoint> traj;
    traj.reserve(steps + 1);
    Upsilon y = y0;
    double t = 0.0;
    traj.push_back({t, y});
    for (long s = 0; s < steps; ++s) {
        double h = std::min(step, horizon - t);
        Upsilon k1 = rhs(y);
        Upsilon k2 = rhs(axpy(y, 0.5 * h, k1));
        Upsilon k3 = rhs(axpy(y, 0.5 * h, k2));
        Upsilon k4 = rhs(axpy(y, h, k3));
        for (int i = 0; i < 4; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t = (s + 1 == steps) ? horizon : t + h;
        traj.push_back({t, y});
    }
    return traj;
}

void write_equilibria_csv(std::ostream& os, const std::vector<EquilibriumPoint>& eq) {
    os << "beta,kind,g_left_sign,g_right_sign\n";
    for (const auto& e : eq)
        os << e.beta << ',' << to_string(e.kind) << ',' << e.g_left_sign << ',' << e.g_right_sign << '\n';
}

} // namespace fpwm
