#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fpwm/errors.hpp"
#include "fpwm/rng.hpp"

namespace fpwm {

enum class PostType { Real, Fake };

std::string_view to_string(PostType p);
PostType parse_post(std::string_view s);

class FriendDistribution {
public:
    struct Deterministic { std::int64_t n; };
    struct Poisson { double mean; };
    struct Binomial { std::int64_t n; double p; };

    static FriendDistribution deterministic(std::int64_t n) { return FriendDistribution(Deterministic{n}); }
    static FriendDistribution poisson(double mean) { return FriendDistribution(Poisson{mean}); }
    static FriendDistribution binomial(std::int64_t n, double p) { return FriendDistribution(Binomial{n, p}); }

    double mean() const;
    double second_moment() const;
    std::int64_t sample(Rng& rng) const;

    const std::variant<Deterministic, Poisson, Binomial>& variant() const { return v_; }
    bool operator==(const FriendDistribution& o) const;

private:
    explicit FriendDistribution(std::variant<Deterministic, Poisson, Binomial> v) : v_(v) {}
    std::variant<Deterministic, Poisson, Binomial> v_;
};

// Defaults are the naive-user parameter set without adversaries.
struct SystemConfig {
    double mu0 = 0.35, mu1 = 0.15, mu2 = 0.5, mua = 0.0;
    double alpha_x_F = 0.3, alpha_y_F = 0.225, alpha_x_R = 0.12, alpha_y_R = 0.09;
    double eta_F = 0.52, eta_R = 0.4, eta_a = 0.55;
    double rho = 0.9;
    double gamma = 0.1;
    double m_f = 30.0;
    FriendDistribution friends = FriendDistribution::deterministic(30);
    double k_share = 10.0;
    double delta = 0.05;
    std::int64_t seed_cx0 = 0, seed_cy0 = 20;

    bool operator==(const SystemConfig&) const = default;
};

std::vector<Violation> validate_config(const SystemConfig& cfg);
// Throws ConfigError listing all violations.
void require_valid(const SystemConfig& cfg);

struct PostParams {
    double eta, alpha_x, alpha_y, p_x, p_y;
    double eta_a;
};

// No validation; used on hot paths and in test-mode simulations.
PostParams post_params(const SystemConfig& cfg, PostType post);
PostParams resolve_post_params(const SystemConfig& cfg, PostType post);

// Where the adversary mass comes from when mu_a changes.
enum class MuaAbsorber { NonParticipants, WarningSeekers };

std::string_view to_string(MuaAbsorber a);
MuaAbsorber parse_absorber(std::string_view s);

SystemConfig with_mua(const SystemConfig& cfg, double mua, MuaAbsorber absorber = MuaAbsorber::NonParticipants);
// The no-adversary counterfactual: mu_a moved to mu0.
SystemConfig without_adversary(const SystemConfig& cfg);

SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SystemConfig& cfg);
SystemConfig load_config(const std::string& path);

} // namespace fpwm
