#include "fpwm/bp_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace fpwm {

std::string_view to_string(UserType u) {
    switch (u) {
    case UserType::NP: return "np";
    case UserType::WI: return "wi";
    case UserType::WS: return "ws";
    case UserType::A: return "a";
    }
    return "?";
}

double PopulationState::beta() const {
    if (current() == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(c_x) / static_cast<double>(current());
}

double clamp_probability(double p) {
    if (!(p > 0.0)) return 0.0;  // also maps NaN to 0
    return p < 1.0 ? p : 1.0;
}

bool bernoulli(double p, Rng& rng) {
    return std::bernoulli_distribution(clamp_probability(p))(rng);
}

Death sample_death(const PopulationState& s, const UserMix& mu, Rng& rng) {
    if (s.current() <= 0) throw PreconditionError("sample_death on an extinct population");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Tag tag = u01(rng) * static_cast<double>(s.current()) < static_cast<double>(s.c_x) ? Tag::X : Tag::Y;

    const double w[4] = {mu.np, mu.wi, mu.ws, mu.a};
    const UserType types[4] = {UserType::NP, UserType::WI, UserType::WS, UserType::A};
    double u = u01(rng) * (w[0] + w[1] + w[2] + w[3]);
    UserType user = UserType::NP;
    for (int i = 0; i < 4; ++i) {
        if (w[i] <= 0.0) continue;
        user = types[i];
        if (u < w[i]) break;
        u -= w[i];
    }
    return {tag, user};
}

bool sample_tag(UserType user, Tag read_tag, double warning, const PostParams& pp, Rng& rng) {
    if (warning < 0.0) throw PreconditionError("negative warning value");
    switch (user) {
    case UserType::WI: return bernoulli(read_tag == Tag::X ? pp.p_x : pp.p_y, rng);
    case UserType::WS: {
        double alpha = read_tag == Tag::X ? pp.alpha_x : pp.alpha_y;
        return bernoulli(std::min(alpha * warning, 1.0), rng);
    }
    case UserType::A:
    case UserType::NP: return false;
    }
    return false;
}

std::int64_t sample_shares(UserType user, bool fake_tag_given, const PopulationState& s, const PostParams& pp,
                           const FriendDistribution& friends, double k_share, Rng& rng) {
    const double z = static_cast<double>(s.total());
    if (z < 1.0) throw PreconditionError("sample_shares with no copies in the system");
    double eta;
    switch (user) {
    case UserType::NP: return 0;
    case UserType::WI:
    case UserType::WS: eta = pp.eta; break;
    case UserType::A:
        if (fake_tag_given) return 0;
        eta = pp.eta_a;
        break;
    default: return 0;
    }
    std::int64_t f = friends.sample(rng);
    if (f <= 0) return 0;
    double p = clamp_probability(eta + k_share / (z * z));
    return std::binomial_distribution<std::int64_t>(f, p)(rng);
}

PopulationState apply_transition(const PopulationState& s, Tag read_tag, bool fake_tag_given, std::int64_t shares) {
    PopulationState o = s;
    if (read_tag == Tag::X) --o.c_x;
    else --o.c_y;
    if (fake_tag_given) {
        o.c_x += shares;
        o.t_x += shares;
    } else {
        o.c_y += shares;
        o.t_y += shares;
    }
    return o;
}

StepResult resolve_death(const PopulationState& s, const Death& d, double warning, const SystemConfig& cfg,
                         const PostParams& pp, Rng& rng) {
    DeathEvent ev;
    ev.epoch = s.deaths() + 1;
    ev.read_tag = d.read_tag;
    ev.user_type = d.user;
    ev.warning_shown = warning;
    ev.fake_tag_given = sample_tag(d.user, d.read_tag, warning, pp, rng);
    std::int64_t shares = sample_shares(d.user, ev.fake_tag_given, s, pp, cfg.friends, cfg.k_share, rng);
    (ev.fake_tag_given ? ev.shares_fake : ev.shares_real) = shares;
    return {apply_transition(s, d.read_tag, ev.fake_tag_given, shares), ev};
}

StepResult step(const PopulationState& s, const WarningFn& warning, const SystemConfig& cfg, PostType post, Rng& rng) {
    if (s.extinct()) throw PreconditionError("step on an extinct population");
    Death d = sample_death(s, UserMix::of(cfg), rng);
    double w = warning(s.beta());
    return resolve_death(s, d, w, cfg, post_params(cfg, post), rng);
}

std::array<double, 4> upsilon_of(const PopulationState& s, std::int64_t n) {
    double scale = n > 0 ? 1.0 / static_cast<double>(n) : 1.0;
    return {s.current() * scale, s.c_x * scale, s.total() * scale, s.t_x * scale};
}

PathResult run_path(const SystemConfig& cfg, PostType post, const WarningFn& warning, std::int64_t max_events,
                    std::uint64_t seed, const RunOptions& opt) {
    if (max_events < 1) throw PreconditionError("max_events must be >= 1");
    const std::int64_t stride = std::max<std::int64_t>(1, opt.trace_stride);
    Rng rng = make_rng(seed);
    Rng clock_rng = make_rng(derive_seed(seed, {1}));
    const UserMix mu = UserMix::of(cfg);
    const PostParams pp = post_params(cfg, post);

    PathResult r;
    r.seed = seed;
    PopulationState s = PopulationState::seeded(cfg);
    double t = 0.0;
    auto record = [&](std::int64_t n) {
        r.trace.push_back({n, s, s.beta(), upsilon_of(s, n), t});
    };
    record(0);

    std::int64_t n = 0;
    while (n < max_events && !s.extinct()) {
        if (opt.timestamps)
            t += std::exponential_distribution<double>(static_cast<double>(s.current()))(clock_rng);
        Death d = sample_death(s, mu, rng);
        double w = warning(s.beta());
        s = resolve_death(s, d, w, cfg, pp, rng).state;
        ++n;
        if (s.extinct()) {
            r.extinct_at = n;
            record(n);
        } else if (n % stride == 0 || n == max_events) {
            record(n);
        }
    }
    r.events = n;
    r.final_state = s;
    return r;
}

void write_path_csv_header(std::ostream& os) { os << "path_id,epoch,c_x,c_y,t_x,t_y,beta\n"; }

void write_path_csv(std::ostream& os, std::int64_t path_id, const PathResult& r) {
    for (const auto& p : r.trace) {
        os << path_id << ',' << p.epoch << ',' << p.state.c_x << ',' << p.state.c_y << ',' << p.state.t_x << ','
           << p.state.t_y << ',';
        if (std::isnan(p.beta)) os << "nan";
        else os << p.beta;
        os << '\n';
    }
}

} // namespace fpwm
