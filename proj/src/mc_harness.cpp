#include "fpwm/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fpwm/parallel.hpp"

namespace fpwm {

std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t batch, std::uint64_t path) {
    return derive_seed(master_seed, {batch, path});
}

std::vector<PathResult> run_paths(const SystemConfig& cfg, PostType post, const WarningSpec& spec, std::int64_t paths,
                                  std::int64_t events, std::uint64_t master_seed, std::uint64_t batch,
                                  const McOptions& opt) {
    if (paths < 1) throw PreconditionError("paths must be positive");
    std::vector<PathResult> out(static_cast<std::size_t>(paths));
    const WarningFn warn = warning_function(spec, cfg);
    RunOptions ro;
    ro.trace_stride = opt.trace_stride;
    parallel_for(out.size(), opt.jobs, [&](std::size_t i) {
        out[i] = run_path(cfg, post, warn, events, path_seed(master_seed, batch, i), ro);
    });
    return out;
}

LimitEstimate summarize_paths(const std::vector<PathResult>& runs, Estimator est) {
    LimitEstimate e;
    std::vector<double> vals;
    for (const auto& r : runs) {
        if (r.extinct_at) {
            ++e.extinct;
            continue;
        }
        ++e.surviving;
        if (est == Estimator::FinalValue) {
            vals.push_back(r.trace.back().beta);
        } else {
            const std::int64_t from = r.events / 2;
            double s = 0.0;
            int n = 0;
            for (const auto& p : r.trace)
                if (p.epoch >= from) {
                    s += p.beta;
                    ++n;
                }
            vals.push_back(s / n);
        }
    }
    if (vals.empty()) {
        std::ostringstream os;
        os << "no surviving paths (" << e.extinct << " extinct)";
        throw EstimationError(os.str());
    }
    const double n = static_cast<double>(vals.size());
    e.mean = std::accumulate(vals.begin(), vals.end(), 0.0) / n;
    if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - e.mean) * (v - e.mean);
        e.stderr_ = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

LimitEstimate estimate_limit(const SystemConfig& cfg, PostType post, const WarningSpec& spec, std::int64_t paths,
                             std::int64_t events, std::uint64_t master_seed, const McOptions& opt) {
    return summarize_paths(run_paths(cfg, post, spec, paths, events, master_seed, 0, opt), opt.estimator);
}

std::string_view to_string(GrowthClass g) {
    switch (g) {
    case GrowthClass::Extinct: return "extinct";
    case GrowthClass::Exploding: return "exploding";
    case GrowthClass::Anomalous: return "anomalous";
    }
    return "?";
}

GrowthClass growth_check(const PathResult& r) {
    if (r.extinct_at) return GrowthClass::Extinct;
    const std::int64_t from = std::max<std::int64_t>(1, r.events / 2);
    double sum = 0.0, lo = std::numeric_limits<double>::infinity();
    int n = 0;
    for (const auto& p : r.trace) {
        if (p.epoch < from) continue;
        const double v = static_cast<double>(p.state.current()) / static_cast<double>(p.epoch);
        sum += v;
        lo = std::min(lo, v);
        ++n;
    }
    if (n == 0) return GrowthClass::Anomalous;
    const double mean = sum / n;
    return mean > 0.0 && lo >= 0.5 * mean ? GrowthClass::Exploding : GrowthClass::Anomalous;
}

double SweepRow::beta_theory_min() const {
    if (beta_theory.empty()) return std::numeric_limits<double>::quiet_NaN();
    return beta_theory.front().beta;
}

double SweepRow::beta_theory_max() const {
    if (beta_theory.empty()) return std::numeric_limits<double>::quiet_NaN();
    return beta_theory.back().beta;
}

void validate_experiment(const ExperimentSpec& exp) {
    if (exp.paths != 0 && exp.paths < 2) throw ConfigError("paths must be 0 (theory only) or at least 2");
    if (exp.events < 1) throw ConfigError("events must be positive");
    if (exp.mua_grid.empty() || exp.mechanisms.empty() || exp.posts.empty())
        throw ConfigError("experiment needs a mu_a grid, mechanisms and posts");
    for (double m : exp.mua_grid) require_valid(with_mua(exp.cfg, m, exp.absorber));
}

std::vector<SweepRow> sweep(const ExperimentSpec& exp) {
    validate_experiment(exp);
    std::vector<SweepRow> rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t mi = 0; mi < exp.mua_grid.size(); ++mi) {
        const SystemConfig cfg = with_mua(exp.cfg, exp.mua_grid[mi], exp.absorber);
        for (std::size_t mj = 0; mj < exp.mechanisms.size(); ++mj) {
            const Mechanism mech = exp.mechanisms[mj];
            DesignResult design;
            std::string design_flag;
            try {
                design = build_design(mech, cfg, exp.threshold_mode);
            } catch (const InfeasibleDesign& e) {
                design_flag = std::string("infeasible design: ") + e.what();
            } catch (const UnsafeDesign& e) {
                design_flag = std::string("unsafe design: ") + e.what();
            }
            for (std::size_t pk = 0; pk < exp.posts.size(); ++pk) {
                SweepRow row;
                row.experiment = exp.name;
                row.mechanism = mech;
                row.post = exp.posts[pk];
                row.mu_a = cfg.mua;
                row.threshold_mode = exp.threshold_mode;
                row.threshold = threshold_for(cfg, exp.threshold_mode);
                row.beta_mc_mean = row.beta_mc_stderr = nan;
                if (!design_flag.empty()) {
                    row.spec = WarningSpec{mech, nan, nan, cfg.gamma, nan};
                    row.qos = row.iqos = nan;
                    row.flag = design_flag;
                    rows.push_back(row);
                    continue;
                }
                row.spec = design.spec;
                const MechanismAnalysis a = analyze(design.spec, cfg, row.post);
                row.beta_theory = a.equilibria;
                row.beta_lower = a.beta_lower;
                row.beta_upper = a.beta_upper;
                row.qos = a.qos;
                row.iqos = a.iqos;
                if (exp.paths > 0) {
                    const std::uint64_t batch = (mi * 64 + mj) * 4 + pk;
                    const auto runs = run_paths(cfg, row.post, design.spec, exp.paths, exp.events, exp.master_seed,
                                                batch, exp.mc);
                    for (const auto& r : runs) (r.extinct_at ? row.extinct_paths : row.surviving_paths) += 1;
                    try {
                        const LimitEstimate e = summarize_paths(runs, exp.mc.estimator);
                        row.beta_mc_mean = e.mean;
                        row.beta_mc_stderr = e.stderr_;
                    } catch (const EstimationError& e) {
                        row.flag = e.what();
                    }
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

void write_sweep_csv_header(std::ostream& os) {
    os << "experiment,mechanism,post,mu_a,w,b,phi,threshold_mode,beta_theory_min,beta_theory_max,qos,iqos,"
          "beta_mc_mean,beta_mc_stderr,surviving_paths,extinct_paths\n";
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    write_sweep_csv_header(os);
    for (const auto& r : rows)
        os << r.experiment << ',' << to_string(r.mechanism) << ',' << to_string(r.post) << ',' << r.mu_a << ','
           << r.spec.w << ',' << r.spec.b << ',' << r.spec.phi << ',' << to_string(r.threshold_mode) << ','
           << r.beta_theory_min() << ',' << r.beta_theory_max() << ',' << r.qos << ',' << r.iqos << ','
           << r.beta_mc_mean << ',' << r.beta_mc_stderr << ',' << r.surviving_paths << ',' << r.extinct_paths
           << '\n';
}

namespace {

struct Block {
    std::string title;
    std::vector<const SweepRow*> rows;
};

std::vector<Block> group_rows(const std::vector<SweepRow>& rows) {
    std::vector<Block> blocks;
    std::map<std::string, std::size_t> index;
    for (const auto& r : rows) {
        std::string key = r.experiment + " " + std::string(to_string(r.mechanism)) + " " +
                          std::string(to_string(r.post));
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, blocks.size()).first;
            blocks.push_back({key, {}});
        }
        blocks[it->second].rows.push_back(&r);
    }
    for (auto& b : blocks)
        std::stable_sort(b.rows.begin(), b.rows.end(), [](auto* a, auto* c) { return a->mu_a < c->mu_a; });
    return blocks;
}

} // namespace

void write_plotdata(std::ostream& data, const std::vector<SweepRow>& rows, PlotStyle style) {
    if (rows.empty()) throw EstimationError("no rows to plot");
    const auto blocks = group_rows(rows);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i > 0) data << "\n\n";
        data << "# " << blocks[i].title << "\n# mu_a theory mc_mean mc_stderr threshold\n";
        for (const SweepRow* r : blocks[i].rows) {
            double theory = r->post == PostType::Fake ? (style == PlotStyle::Iqos ? r->iqos : r->qos)
                                                      : r->beta_theory_max();
            data << r->mu_a << ' ' << theory << ' ' << r->beta_mc_mean << ' ' << r->beta_mc_stderr << ' '
                 << r->threshold << '\n';
        }
    }
}

PlotFiles emit_plotdata(const std::vector<SweepRow>& rows, const std::string& prefix, PlotStyle style) {
    if (rows.empty()) throw EstimationError("no rows to plot");
    PlotFiles f{prefix + ".dat", prefix + ".gp"};
    {
        std::ofstream data(f.data_path);
        if (!data) throw ConfigError("cannot write '" + f.data_path + "'");
        data.precision(10);
        write_plotdata(data, rows, style);
    }
    const auto blocks = group_rows(rows);
    std::ofstream gp(f.script_path);
    if (!gp) throw ConfigError("cannot write '" + f.script_path + "'");
    std::string base = f.data_path.substr(f.data_path.find_last_of('/') + 1);
    gp << "set xlabel 'mu_a'\nset ylabel '" << (style == PlotStyle::Iqos ? "i-QoS / beta" : "beta") << "'\n";
    gp << "set key outside\nplot \\\n";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        gp << "  '" << base << "' index " << i << " using 1:2 with linespoints title '" << blocks[i].title
           << " theory', \\\n";
        gp << "  '" << base << "' index " << i << " using 1:3:4 with yerrorbars title '" << blocks[i].title
           << " mc', \\\n";
        gp << "  '" << base << "' index " << i << " using 1:5 with lines dashtype 2 title '" << blocks[i].title
           << " threshold'" << (i + 1 < blocks.size() ? ", \\" : "") << '\n';
    }
    return f;
}

} // namespace fpwm
