#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fpwm/model.hpp"
#include "fpwm/rng.hpp"

namespace fpwm {

enum class Tag { X, Y };                 // X = fake-tagged, Y = real-tagged
enum class UserType { NP, WI, WS, A };

std::string_view to_string(UserType u);

struct PopulationState {
    std::int64_t c_x = 0, c_y = 0, t_x = 0, t_y = 0;

    static PopulationState seeded(const SystemConfig& cfg) {
        return {cfg.seed_cx0, cfg.seed_cy0, cfg.seed_cx0, cfg.seed_cy0};
    }
    std::int64_t current() const { return c_x + c_y; }
    std::int64_t total() const { return t_x + t_y; }
    std::int64_t deaths() const { return total() - current(); }
    bool extinct() const { return current() == 0; }
    // Fake-tag proportion among unread copies; NaN once extinct.
    double beta() const;

    bool operator==(const PopulationState&) const = default;
};

struct UserMix {
    double np, wi, ws, a;
    static UserMix of(const SystemConfig& cfg) { return {cfg.mu0, cfg.mu1, cfg.mu2, cfg.mua}; }
};

struct Death {
    Tag read_tag;
    UserType user;
};

struct DeathEvent {
    std::int64_t epoch = 0;
    Tag read_tag = Tag::Y;
    UserType user_type = UserType::NP;
    bool fake_tag_given = false;
    std::int64_t shares_fake = 0, shares_real = 0;
    double warning_shown = 0.0;
};

using WarningFn = std::function<double(double)>;

// Bernoulli draw with the parameter clamped into [0,1] before it reaches the RNG.
bool bernoulli(double p, Rng& rng);
double clamp_probability(double p);

Death sample_death(const PopulationState& s, const UserMix& mu, Rng& rng);
bool sample_tag(UserType user, Tag read_tag, double warning, const PostParams& pp, Rng& rng);
std::int64_t sample_shares(UserType user, bool fake_tag_given, const PopulationState& s, const PostParams& pp,
                           const FriendDistribution& friends, double k_share, Rng& rng);

PopulationState apply_transition(const PopulationState& s, Tag read_tag, bool fake_tag_given, std::int64_t shares);

struct StepResult {
    PopulationState state;
    DeathEvent event;
};

// Tag and share draws for an already sampled death, followed by the transition.
StepResult resolve_death(const PopulationState& s, const Death& d, double warning, const SystemConfig& cfg,
                         const PostParams& pp, Rng& rng);

StepResult step(const PopulationState& s, const WarningFn& warning, const SystemConfig& cfg, PostType post, Rng& rng);

struct TracePoint {
    std::int64_t epoch;
    PopulationState state;
    double beta;
    std::array<double, 4> upsilon;  // (S_n/n, C_x/n, Z_n/n, T_x/n); raw counts at n = 0
    double time;                    // cumulative exponential clock, 0 when disabled
};

struct PathResult {
    std::int64_t events = 0;
    std::optional<std::int64_t> extinct_at;
    std::vector<TracePoint> trace;
    PopulationState final_state;
    std::uint64_t seed = 0;
};

struct RunOptions {
    std::int64_t trace_stride = 10;
    bool timestamps = false;
};

PathResult run_path(const SystemConfig& cfg, PostType post, const WarningFn& warning, std::int64_t max_events,
                    std::uint64_t seed, const RunOptions& opt = {});

std::array<double, 4> upsilon_of(const PopulationState& s, std::int64_t n);

void write_path_csv_header(std::ostream& os);
void write_path_csv(std::ostream& os, std::int64_t path_id, const PathResult& r);

} // namespace fpwm
