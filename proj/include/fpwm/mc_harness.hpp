#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "fpwm/bp_sim.hpp"
#include "fpwm/design.hpp"
#include "fpwm/model.hpp"
#include "fpwm/warning.hpp"

namespace fpwm {

enum class Estimator { FinalValue, TailMean };

struct McOptions {
    int jobs = 1;
    Estimator estimator = Estimator::FinalValue;
    std::int64_t trace_stride = 10;
};

struct LimitEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::int64_t surviving = 0;
    std::int64_t extinct = 0;
};

// Seed of path i in a batch identified by (master_seed, batch).
std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t batch, std::uint64_t path);

std::vector<PathResult> run_paths(const SystemConfig& cfg, PostType post, const WarningSpec& spec, std::int64_t paths,
                                  std::int64_t events, std::uint64_t master_seed, std::uint64_t batch,
                                  const McOptions& opt = {});

// Limit estimate from already simulated paths; surviving means not extinct within the horizon.
LimitEstimate summarize_paths(const std::vector<PathResult>& runs, Estimator est = Estimator::FinalValue);

LimitEstimate estimate_limit(const SystemConfig& cfg, PostType post, const WarningSpec& spec, std::int64_t paths,
                             std::int64_t events, std::uint64_t master_seed, const McOptions& opt = {});

enum class GrowthClass { Extinct, Exploding, Anomalous };

std::string_view to_string(GrowthClass g);
GrowthClass growth_check(const PathResult& r);

struct ExperimentSpec {
    std::string name;
    SystemConfig cfg;
    std::vector<PostType> posts{PostType::Fake, PostType::Real};
    std::vector<Mechanism> mechanisms{Mechanism::EO};
    std::vector<double> mua_grid{0.0};
    MuaAbsorber absorber = MuaAbsorber::NonParticipants;
    std::int64_t paths = 200;  // 0 runs theory only
    std::int64_t events = 5000;
    std::uint64_t master_seed = 1;
    ThresholdMode threshold_mode = ThresholdMode::Adjusted;
    McOptions mc;
};

struct SweepRow {
    std::string experiment;
    Mechanism mechanism = Mechanism::EO;
    PostType post = PostType::Fake;
    double mu_a = 0.0;
    WarningSpec spec;
    ThresholdMode threshold_mode = ThresholdMode::Adjusted;
    double threshold = 0.0;
    std::vector<EquilibriumPoint> beta_theory;
    double beta_lower = 0.0, beta_upper = 1.0;
    double qos = 0.0, iqos = 0.0;
    double beta_mc_mean = 0.0, beta_mc_stderr = 0.0;
    std::int64_t surviving_paths = 0, extinct_paths = 0;
    std::string flag;  // non-empty when the design or the estimate failed

    double beta_theory_min() const;
    double beta_theory_max() const;
};

void validate_experiment(const ExperimentSpec& exp);
std::vector<SweepRow> sweep(const ExperimentSpec& exp);

void write_sweep_csv_header(std::ostream& os);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

enum class PlotStyle { Qos, Iqos };

struct PlotFiles {
    std::string data_path, script_path;
};

// gnuplot data (one block per mechanism/post) and a script stub next to it. Throws EstimationError on empty rows.
PlotFiles emit_plotdata(const std::vector<SweepRow>& rows, const std::string& prefix, PlotStyle style = PlotStyle::Qos);
void write_plotdata(std::ostream& data, const std::vector<SweepRow>& rows, PlotStyle style);

} // namespace fpwm
