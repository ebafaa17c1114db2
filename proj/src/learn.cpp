#include "fpwm/learn.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fpwm/design.hpp"
#include "fpwm/parallel.hpp"
#include "fpwm/warning.hpp"

namespace fpwm {

double EtaSchedule::operator()(std::int64_t k) const {
    if (k <= 0) return std::clamp(eta0, 0.0, 1.0);
    return std::clamp(scale * std::pow(static_cast<double>(k), -power), 0.0, 1.0);
}

double LearnConfig::step_size(std::int64_t k) const {
    return c1 * std::pow(1.0 / static_cast<double>(k + 1), c2);
}

double kappa_from_ratio(double ratio_x_over_y, double margin) {
    if (!(ratio_x_over_y > 1.0)) throw ConfigError("sensitivity ratio alpha_x^R / alpha_y^R must exceed 1");
    return 1.0 - 1.0 / ratio_x_over_y + margin;
}

LearnConfig reference_learn_config(const SystemConfig& cfg, double ratio_x_over_y) {
    LearnConfig l;
    l.kappa = kappa_from_ratio(ratio_x_over_y);
    l.delta = threshold_for(cfg, ThresholdMode::Adjusted);
    return l;
}

LearnResult run_learning(const SystemConfig& cfg, const LearnConfig& lcfg, std::uint64_t seed,
                         const LearnRunOptions& opt) {
    if (lcfg.samples < 1) throw PreconditionError("samples must be positive");
    if (lcfg.w0 < 1.0 || lcfg.b0 < 0.0) throw PreconditionError("learning needs w0 >= 1 and b0 >= 0");
    require_valid(cfg);

    Rng rng = make_rng(seed);
    const UserMix mu = UserMix::of(cfg);
    const PostParams pp = post_params(cfg, PostType::Real);
    const double gamma = cfg.gamma;

    LearnResult r;
    PopulationState s = PopulationState::seeded(cfg);
    double w = lcfg.w0, b = lcfg.b0;
    double last_beta = s.beta();
    std::size_t next_cp = 0;
    std::vector<std::int64_t> cps = opt.checkpoints;
    std::sort(cps.begin(), cps.end());

    if (opt.trace_stride > 0) {
        r.trace.push_back({0, w, b, last_beta, false});
        r.states.push_back(s);
    }

    for (std::int64_t k = 1; k <= lcfg.samples; ++k) {
        if (s.extinct()) {
            r.partial = true;
            break;
        }
        const double beta = s.beta();
        const Death d = sample_death(s, mu, rng);
        bool special = false;
        const double gate = lcfg.eta(k - 1);
        if (d.user == UserType::WS && gate > 0.0) special = bernoulli(gate, rng) && d.read_tag == Tag::Y;
        const double omega = special ? w + gamma : base_warning(w, b, gamma, beta);
        const StepResult res = resolve_death(s, d, omega, cfg, pp, rng);
        s = res.state;

        const double eps = lcfg.step_size(k);
        if (special) {
            const double tag = res.event.fake_tag_given ? 1.0 : 0.0;
            w = std::max(1.0, w - eps * (tag - (1.0 - lcfg.kappa)));
            ++r.special_epochs;
        }
        if (s.extinct() && lcfg.restart_on_extinction) {
            s = PopulationState::seeded(cfg);
            ++r.restarts;
        }
        if (!s.extinct()) last_beta = s.beta();
        b = std::max(0.0, b + eps * (last_beta - lcfg.delta));
        r.completed = k;

        if (opt.trace_stride > 0 && k % opt.trace_stride == 0) {
            r.trace.push_back({k, w, b, last_beta, special});
            r.states.push_back(s);
        }
        while (next_cp < cps.size() && cps[next_cp] == k) {
            r.checkpoints.push_back({k, w, b});
            ++next_cp;
        }
    }
    r.w = w;
    r.b = b;
    return r;
}

double learned_iqos(const SystemConfig& cfg, double w, double b) {
    return analyze(WarningSpec::eo(w, b, cfg.gamma), cfg, PostType::Fake).iqos;
}

bool evaluate_learned(const SystemConfig& cfg, double w, double b, double reference_iqos, double tol) {
    return std::abs(learned_iqos(cfg, w, b) - reference_iqos) <= tol;
}

std::vector<Table3Row> run_table3(const SystemConfig& base, const Table3Options& opt) {
    if (opt.trials < 1 || opt.sample_sizes.empty()) throw PreconditionError("table needs trials and sample sizes");
    std::vector<std::int64_t> sizes = opt.sample_sizes;
    std::sort(sizes.begin(), sizes.end());
    std::vector<Table3Row> rows;
    for (std::size_t mi = 0; mi < opt.mua_grid.size(); ++mi) {
        const SystemConfig cfg = with_mua(base, opt.mua_grid[mi], opt.absorber);
        require_valid(cfg);
        LearnConfig lcfg = reference_learn_config(cfg, cfg.alpha_x_R / cfg.alpha_y_R);
        lcfg.samples = sizes.back();
        const double reference = analyze(build_eh2(cfg, ThresholdMode::Adjusted).spec, cfg, PostType::Fake).iqos;

        std::vector<std::vector<char>> ok(opt.trials, std::vector<char>(sizes.size(), 0));
        parallel_for(static_cast<std::size_t>(opt.trials), opt.jobs, [&](std::size_t t) {
            LearnRunOptions ro;
            ro.checkpoints = sizes;
            const LearnResult lr = run_learning(cfg, lcfg, derive_seed(opt.master_seed, {mi, t}), ro);
            for (std::size_t j = 0; j < lr.checkpoints.size(); ++j)
                ok[t][j] = evaluate_learned(cfg, lr.checkpoints[j].w, lr.checkpoints[j].b, reference, opt.tol);
        });
        for (std::size_t j = 0; j < sizes.size(); ++j) {
            int hits = 0;
            for (const auto& v : ok) hits += v[j];
            rows.push_back({opt.mua_grid[mi], sizes[j], static_cast<double>(hits) / opt.trials});
        }
    }
    return rows;
}

void write_learn_trace_csv(std::ostream& os, const LearnResult& r) {
    os << "k,w_k,b_k,beta_k,special_epoch\n";
    for (const auto& p : r.trace)
        os << p.k << ',' << p.w << ',' << p.b << ',' << p.beta << ',' << (p.special_epoch ? 1 : 0) << '\n';
}

void write_table3_csv(std::ostream& os, const std::vector<Table3Row>& rows) {
    os << "mu_a,samples,success_fraction\n";
    for (const auto& r : rows) os << r.mu_a << ',' << r.samples << ',' << r.success_fraction << '\n';
}

} // namespace fpwm
