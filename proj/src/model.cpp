#include "fpwm/model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fpwm {

std::string_view to_string(PostType p) { return p == PostType::Fake ? "fake" : "real"; }

PostType parse_post(std::string_view s) {
    if (s == "fake" || s == "F") return PostType::Fake;
    if (s == "real" || s == "R") return PostType::Real;
    throw ConfigError("unknown post type '" + std::string(s) + "'");
}

double FriendDistribution::mean() const {
    return std::visit([](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) return static_cast<double>(d.n);
        else if constexpr (std::is_same_v<T, Poisson>) return d.mean;
        else return static_cast<double>(d.n) * d.p;
    }, v_);
}

double FriendDistribution::second_moment() const {
    return std::visit([](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) return static_cast<double>(d.n) * static_cast<double>(d.n);
        else if constexpr (std::is_same_v<T, Poisson>) return d.mean + d.mean * d.mean;
        else {
            double m = static_cast<double>(d.n) * d.p;
            return m * (1.0 - d.p) + m * m;
        }
    }, v_);
}

std::int64_t FriendDistribution::sample(Rng& rng) const {
    return std::visit([&rng](const auto& d) -> std::int64_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Deterministic>) return d.n;
        else if constexpr (std::is_same_v<T, Poisson>) return std::poisson_distribution<std::int64_t>(d.mean)(rng);
        else return std::binomial_distribution<std::int64_t>(d.n, d.p)(rng);
    }, v_);
}

bool FriendDistribution::operator==(const FriendDistribution& o) const {
    if (v_.index() != o.v_.index()) return false;
    return std::visit([&o](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        const auto& e = std::get<T>(o.v_);
        if constexpr (std::is_same_v<T, Deterministic>) return d.n == e.n;
        else if constexpr (std::is_same_v<T, Poisson>) return d.mean == e.mean;
        else return d.n == e.n && d.p == e.p;
    }, v_);
}

namespace {

bool is_prob(double x) { return x >= 0.0 && x <= 1.0; }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

} // namespace

std::vector<Violation> validate_config(const SystemConfig& c) {
    std::vector<Violation> out;
    auto add = [&out](const char* code, std::string msg) { out.push_back({code, std::move(msg)}); };

    for (double m : {c.mu0, c.mu1, c.mu2, c.mua})
        if (!is_prob(m)) { add("mu_range", "each user proportion must lie in [0,1]"); break; }
    double s = c.mu0 + c.mu1 + c.mu2 + c.mua;
    if (std::abs(s - 1.0) > 1e-12) add("mu_sum", "mu0 + mu1 + mu2 + mua must equal 1 (got " + fmt(s) + ")");
    // mu2 = 1 is admitted: the all-warning-seeker population without adversaries is a reference point.
    if (!(c.mu2 > 0.0 && c.mu2 <= 1.0)) add("mu2_range", "mu2 must be in (0,1]");

    if (!(c.alpha_x_F > c.alpha_y_F && c.alpha_y_F > 0.0))
        add("alpha_order_F", "alpha_x_F > alpha_y_F > 0 fails");
    if (!(c.alpha_x_R > c.alpha_y_R && c.alpha_y_R > 0.0))
        add("alpha_order_R", "alpha_x_R > alpha_y_R > 0 fails");
    if (!(c.alpha_x_F > c.alpha_x_R && c.alpha_y_F > c.alpha_y_R))
        add("alpha_post_order", "alpha_i_F > alpha_i_R fails for some i");

    if (!(is_prob(c.eta_F) && is_prob(c.eta_R) && is_prob(c.eta_a)))
        add("eta_range", "share probabilities must lie in [0,1]");
    if (!(c.eta_F > c.eta_R && c.eta_R > 0.0)) add("eta_order", "eta_F > eta_R > 0 fails");
    if (!(c.eta_a > c.eta_F)) add("eta_adversary_order", "eta_a > eta_F fails");

    if (!(c.rho > 0.0 && c.rho < 1.0)) add("rho_range", "rho must be in (0,1)");
    if (!(c.alpha_x_F * c.rho < 1.0)) add("tag_probability", "alpha_x_F * rho < 1 fails");
    if (!(c.gamma > 0.0)) add("gamma_positive", "gamma must be positive");
    if (!(c.delta > 0.0 && c.delta < 1.0)) add("delta_range", "delta must be in (0,1)");
    if (!(c.k_share >= 0.0)) add("k_share_range", "k_share must be non-negative");

    if (!(c.m_f > 0.0)) add("m_f_positive", "m_f must be positive");
    if (!(c.m_f * c.eta_R > 1.0)) add("supercritical", "supercriticality m_f*eta_R > 1 fails");
    if (std::abs(c.friends.mean() - c.m_f) > 1e-9)
        add("friends_mean", "friend distribution mean " + fmt(c.friends.mean()) + " differs from m_f " + fmt(c.m_f));
    bool friends_ok = std::visit([](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FriendDistribution::Deterministic>) return d.n >= 0;
        else if constexpr (std::is_same_v<T, FriendDistribution::Poisson>) return d.mean > 0.0;
        else return d.n > 0 && is_prob(d.p);
    }, c.friends.variant());
    if (!friends_ok) add("friends_params", "friend distribution parameters out of range");

    if (c.seed_cx0 < 0 || c.seed_cy0 < 0) add("seed_negative", "seed counts must be non-negative");
    if (c.seed_cx0 + c.seed_cy0 < 1) add("seed_empty", "seed_cx0 + seed_cy0 >= 1 fails");
    return out;
}

void require_valid(const SystemConfig& cfg) {
    auto v = validate_config(cfg);
    if (v.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& x : v) msg += " [" + x.code + "] " + x.message + ";";
    throw ConfigError(msg, std::move(v));
}

PostParams post_params(const SystemConfig& cfg, PostType post) {
    PostParams p{};
    if (post == PostType::Fake) {
        p.eta = cfg.eta_F;
        p.alpha_x = cfg.alpha_x_F;
        p.alpha_y = cfg.alpha_y_F;
    } else {
        p.eta = cfg.eta_R;
        p.alpha_x = cfg.alpha_x_R;
        p.alpha_y = cfg.alpha_y_R;
    }
    p.p_x = p.alpha_x * cfg.rho;
    p.p_y = p.alpha_y * cfg.rho;
    p.eta_a = cfg.eta_a;
    return p;
}

PostParams resolve_post_params(const SystemConfig& cfg, PostType post) {
    require_valid(cfg);
    return post_params(cfg, post);
}

std::string_view to_string(MuaAbsorber a) { return a == MuaAbsorber::NonParticipants ? "np" : "ws"; }

MuaAbsorber parse_absorber(std::string_view s) {
    if (s == "np") return MuaAbsorber::NonParticipants;
    if (s == "ws") return MuaAbsorber::WarningSeekers;
    throw ConfigError("unknown absorber '" + std::string(s) + "' (expected np or ws)");
}

SystemConfig with_mua(const SystemConfig& cfg, double mua, MuaAbsorber absorber) {
    SystemConfig out = cfg;
    double freed = cfg.mua - mua;
    double& target = absorber == MuaAbsorber::NonParticipants ? out.mu0 : out.mu2;
    target += freed;
    if (target < 0.0) {
        if (target < -1e-12)
            throw ConfigError("mu_a = " + fmt(mua) + " exceeds the mass available in " +
                              std::string(to_string(absorber)));
        target = 0.0;
    }
    out.mua = mua;
    return out;
}

SystemConfig without_adversary(const SystemConfig& cfg) {
    return with_mua(cfg, 0.0, MuaAbsorber::NonParticipants);
}

namespace {

FriendDistribution friends_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("friends must be an object with a 'kind' field");
    std::string kind = j.at("kind").get<std::string>();
    std::set<std::string> allowed;
    FriendDistribution out = FriendDistribution::deterministic(0);
    if (kind == "deterministic") {
        allowed = {"kind", "n"};
        out = FriendDistribution::deterministic(j.at("n").get<std::int64_t>());
    } else if (kind == "poisson") {
        allowed = {"kind", "mean"};
        out = FriendDistribution::poisson(j.at("mean").get<double>());
    } else if (kind == "binomial") {
        allowed = {"kind", "n", "p"};
        out = FriendDistribution::binomial(j.at("n").get<std::int64_t>(), j.at("p").get<double>());
    } else {
        throw ConfigError("unknown friends kind '" + kind + "'");
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key in friends: '" + it.key() + "'");
    return out;
}

nlohmann::json friends_to_json(const FriendDistribution& f) {
    return std::visit([](const auto& d) -> nlohmann::json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, FriendDistribution::Deterministic>)
            return {{"kind", "deterministic"}, {"n", d.n}};
        else if constexpr (std::is_same_v<T, FriendDistribution::Poisson>)
            return {{"kind", "poisson"}, {"mean", d.mean}};
        else
            return {{"kind", "binomial"}, {"n", d.n}, {"p", d.p}};
    }, f.variant());
}

} // namespace

SystemConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    SystemConfig c;
    bool has_friends = false;
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& k = it.key();
            const auto& v = it.value();
            if (k == "mu0") c.mu0 = v.get<double>();
            else if (k == "mu1") c.mu1 = v.get<double>();
            else if (k == "mu2") c.mu2 = v.get<double>();
            else if (k == "mua") c.mua = v.get<double>();
            else if (k == "alpha_x_F") c.alpha_x_F = v.get<double>();
            else if (k == "alpha_y_F") c.alpha_y_F = v.get<double>();
            else if (k == "alpha_x_R") c.alpha_x_R = v.get<double>();
            else if (k == "alpha_y_R") c.alpha_y_R = v.get<double>();
            else if (k == "eta_F") c.eta_F = v.get<double>();
            else if (k == "eta_R") c.eta_R = v.get<double>();
            else if (k == "eta_a") c.eta_a = v.get<double>();
            else if (k == "rho") c.rho = v.get<double>();
            else if (k == "gamma") c.gamma = v.get<double>();
            else if (k == "m_f") c.m_f = v.get<double>();
            else if (k == "friends") { c.friends = friends_from_json(v); has_friends = true; }
            else if (k == "k_share") c.k_share = v.get<double>();
            else if (k == "delta") c.delta = v.get<double>();
            else if (k == "seed_cx0") c.seed_cx0 = v.get<std::int64_t>();
            else if (k == "seed_cy0") c.seed_cy0 = v.get<std::int64_t>();
            else throw ConfigError("unknown configuration key '" + k + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed configuration value: ") + e.what());
    }
    if (!has_friends) c.friends = FriendDistribution::deterministic(std::llround(c.m_f));
    return c;
}

nlohmann::json config_to_json(const SystemConfig& c) {
    return {
        {"mu0", c.mu0}, {"mu1", c.mu1}, {"mu2", c.mu2}, {"mua", c.mua},
        {"alpha_x_F", c.alpha_x_F}, {"alpha_y_F", c.alpha_y_F},
        {"alpha_x_R", c.alpha_x_R}, {"alpha_y_R", c.alpha_y_R},
        {"eta_F", c.eta_F}, {"eta_R", c.eta_R}, {"eta_a", c.eta_a},
        {"rho", c.rho}, {"gamma", c.gamma}, {"m_f", c.m_f},
        {"friends", friends_to_json(c.friends)}, {"k_share", c.k_share},
        {"delta", c.delta}, {"seed_cx0", c.seed_cx0}, {"seed_cy0", c.seed_cy0},
    };
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

} // namespace fpwm
