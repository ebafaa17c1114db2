#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fpwm/bp_sim.hpp"
#include "fpwm/model.hpp"

namespace fpwm {

// eta_0 at k = 0, min(1, scale * k^-power) afterwards.
struct EtaSchedule {
    double eta0 = 0.008;
    double scale = 1.5;
    double power = 0.8;

    double operator()(std::int64_t k) const;
    static EtaSchedule off() { return {0.0, 0.0, 0.8}; }
};

struct LearnConfig {
    double kappa = 0.0;
    double c1 = 2.2;
    double c2 = 0.7;
    EtaSchedule eta;
    double w0 = 6.0;
    double b0 = 1e-4;
    std::int64_t samples = 100000;
    bool restart_on_extinction = true;
    double delta = 0.05;  // target for the fake-tag proportion of the real post

    double step_size(std::int64_t k) const;
};

// kappa from the known sensitivity ratio alpha_x^R / alpha_y^R.
double kappa_from_ratio(double ratio_x_over_y, double margin = 1e-3);

// Tuning used for the learning tables: kappa from the ratio, target threshold delta_a.
LearnConfig reference_learn_config(const SystemConfig& cfg, double ratio_x_over_y);

struct LearnTracePoint {
    std::int64_t k;
    double w, b, beta;
    bool special_epoch;
};

struct LearnCheckpoint {
    std::int64_t k;
    double w, b;
};

struct LearnResult {
    double w = 0.0, b = 0.0;
    std::int64_t completed = 0;
    bool partial = false;
    std::int64_t restarts = 0;
    std::int64_t special_epochs = 0;
    std::vector<LearnTracePoint> trace;
    std::vector<LearnCheckpoint> checkpoints;
    std::vector<PopulationState> states;  // population at each traced epoch, for cross-checks
};

struct LearnRunOptions {
    std::int64_t trace_stride = 0;  // 0 disables the trace
    std::vector<std::int64_t> checkpoints;
};

LearnResult run_learning(const SystemConfig& cfg, const LearnConfig& lcfg, std::uint64_t seed,
                         const LearnRunOptions& opt = {});

// Fake-post i-QoS of the eo formula evaluated at (w, b).
double learned_iqos(const SystemConfig& cfg, double w, double b);
bool evaluate_learned(const SystemConfig& cfg, double w, double b, double reference_iqos, double tol);

struct Table3Row {
    double mu_a;
    std::int64_t samples;
    double success_fraction;
};

struct Table3Options {
    std::vector<double> mua_grid{0.0, 0.1};
    std::vector<std::int64_t> sample_sizes{10000, 25000, 50000, 75000, 100000};
    int trials = 150;
    double tol = 0.05;
    std::uint64_t master_seed = 1;
    int jobs = 1;
    MuaAbsorber absorber = MuaAbsorber::NonParticipants;
};

// One run per trial up to the largest sample size, evaluated at every checkpoint.
std::vector<Table3Row> run_table3(const SystemConfig& base, const Table3Options& opt);

void write_learn_trace_csv(std::ostream& os, const LearnResult& r);
void write_table3_csv(std::ostream& os, const std::vector<Table3Row>& rows);

} // namespace fpwm
