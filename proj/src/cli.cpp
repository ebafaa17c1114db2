#include "fpwm/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "fpwm/design.hpp"
#include "fpwm/learn.hpp"
#include "fpwm/mc_harness.hpp"
#include "fpwm/parallel.hpp"
#include "fpwm/presets.hpp"
#include "fpwm/warning.hpp"

namespace fpwm::cli {

namespace {

struct Options {
    std::string config, preset, mechanism, post, mu_a_grid, threshold_mode, out, plot;
    std::string plot_style = "qos", absorber = "np", estimator = "final";
    double mu_a = 0.0, delta = 0.0, w = 0.0, b = 0.0, phi = 1.0;
    std::int64_t paths = 0, events = 5000, samples = 100000, trace_stride = 0;
    int trials = 150;
    int jobs = default_jobs();
    std::uint64_t seed = 1;
    std::string preset_name;  // positional of `preset`
};

void add_common(CLI::App* sc, Options& o) {
    sc->add_option("--config", o.config, "JSON configuration (SystemConfig field names)");
    sc->add_option("--preset", o.preset, "start from a named preset");
    sc->add_option("--mechanism", o.mechanism, "eo, ea, eh or eh2 (comma list for sweeps)");
    sc->add_option("--post", o.post, "real or fake");
    sc->add_option("--mu-a", o.mu_a, "adversary proportion");
    sc->add_option("--mu-a-grid", o.mu_a_grid, "comma-separated adversary proportions");
    sc->add_option("--absorber", o.absorber, "np or ws: population that gives up mass to adversaries");
    sc->add_option("--delta", o.delta, "real-post tolerance");
    sc->add_option("--threshold-mode", o.threshold_mode, "plain or adjusted");
    sc->add_option("--w", o.w, "warning weight (skips the design step)");
    sc->add_option("--b", o.b, "warning damping");
    sc->add_option("--phi", o.phi, "eh scaling");
    sc->add_option("--paths", o.paths, "Monte-Carlo paths (0 = theory only)");
    sc->add_option("--events", o.events, "reads per path");
    sc->add_option("--trace-stride", o.trace_stride, "trace every n-th epoch");
    sc->add_option("--estimator", o.estimator, "final or tail");
    sc->add_option("--seed", o.seed, "master seed (FPWM_SEED overrides)");
    sc->add_option("--jobs", o.jobs, "worker threads");
    sc->add_option("--out", o.out, "output CSV path");
    sc->add_option("--plot", o.plot, "prefix for gnuplot data and script");
    sc->add_option("--plot-style", o.plot_style, "qos or iqos");
    sc->add_option("--samples", o.samples, "learning reads");
    sc->add_option("--trials", o.trials, "learning runs per mu_a (batch mode)");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> g;
    for (const auto& t : split_list(s)) {
        try {
            g.push_back(std::stod(t));
        } catch (const std::exception&) {
            throw ConfigError("bad mu_a grid entry '" + t + "'");
        }
    }
    if (g.empty()) throw ConfigError("empty mu_a grid");
    return g;
}

struct Context {
    Options o;
    CLI::App* sc = nullptr;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;

    bool has(const std::string& flag) const { return sc->count(flag) > 0; }
};

std::uint64_t effective_seed(const Context& c) {
    if (const char* env = std::getenv("FPWM_SEED"); env && *env) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError(std::string("FPWM_SEED is not an unsigned integer: ") + env);
        }
    }
    return c.o.seed;
}

MuaAbsorber absorber_for(const Context& c, MuaAbsorber fallback) {
    return c.has("--absorber") ? parse_absorber(c.o.absorber) : fallback;
}

// Base configuration before any mu_a override, with its natural absorber.
std::pair<SystemConfig, MuaAbsorber> base_config(const Context& c) {
    SystemConfig cfg = naive_config();
    MuaAbsorber ab = MuaAbsorber::NonParticipants;
    if (!c.o.config.empty()) {
        cfg = load_config(c.o.config);
    } else if (!c.o.preset.empty()) {
        Preset p = make_preset(c.o.preset);
        if (!p.experiments.empty()) {
            cfg = p.experiments.front().cfg;
            ab = p.experiments.front().absorber;
        } else if (p.learning) {
            cfg = p.learning_cfg;
        }
    }
    if (c.has("--delta")) cfg.delta = c.o.delta;
    return {cfg, absorber_for(c, ab)};
}

SystemConfig resolved_config(const Context& c) {
    auto [cfg, ab] = base_config(c);
    if (c.has("--mu-a")) cfg = with_mua(cfg, c.o.mu_a, ab);
    require_valid(cfg);
    return cfg;
}

Mechanism single_mechanism(const Context& c) {
    return c.o.mechanism.empty() ? Mechanism::EO : parse_mechanism(c.o.mechanism);
}

ThresholdMode mode_for(const Context& c, Mechanism m) {
    if (c.has("--threshold-mode")) return parse_threshold_mode(c.o.threshold_mode);
    return m == Mechanism::EO ? ThresholdMode::Plain : ThresholdMode::Adjusted;
}

WarningSpec spec_for(const Context& c, const SystemConfig& cfg, Mechanism m) {
    if (c.has("--w")) return WarningSpec{m, c.o.w, c.o.b, cfg.gamma, c.o.phi};
    return build_design(m, cfg, mode_for(c, m)).spec;
}

std::vector<PostType> posts_for(const Context& c, std::vector<PostType> fallback) {
    if (c.o.post.empty()) return fallback;
    return {parse_post(c.o.post)};
}

void with_output(const Context& c, const std::function<void(std::ostream&)>& fn) {
    if (c.o.out.empty()) {
        *c.out << std::setprecision(10);
        fn(*c.out);
        return;
    }
    std::ofstream f(c.o.out);
    if (!f) throw ConfigError("cannot write '" + c.o.out + "'");
    f << std::setprecision(10);
    fn(f);
}

int cmd_analyze(const Context& c) {
    const SystemConfig cfg = resolved_config(c);
    const Mechanism m = single_mechanism(c);
    const WarningSpec spec = spec_for(c, cfg, m);
    std::vector<MechanismAnalysis> res;
    for (PostType p : posts_for(c, {PostType::Fake, PostType::Real})) res.push_back(analyze(spec, cfg, p));
    with_output(c, [&](std::ostream& os) {
        write_analysis_csv_header(os);
        for (const auto& a : res) write_analysis_csv(os, a);
    });
    return Ok;
}

int cmd_design(const Context& c) {
    const SystemConfig cfg = resolved_config(c);
    const Mechanism m = single_mechanism(c);
    const DesignResult d = build_design(m, cfg, mode_for(c, m));
    with_output(c, [&](std::ostream& os) { write_design_csv(os, d); });
    return Ok;
}

int cmd_simulate(const Context& c) {
    const SystemConfig cfg = resolved_config(c);
    const Mechanism m = single_mechanism(c);
    const WarningSpec spec = spec_for(c, cfg, m);
    const PostType post = posts_for(c, {PostType::Fake}).front();
    const std::int64_t paths = c.has("--paths") ? c.o.paths : 1;
    if (paths < 1) throw ConfigError("simulate needs --paths >= 1");
    McOptions mo;
    mo.jobs = c.o.jobs;
    mo.trace_stride = c.has("--trace-stride") ? c.o.trace_stride : 10;
    const auto runs = run_paths(cfg, post, spec, paths, c.o.events, effective_seed(c), 0, mo);
    with_output(c, [&](std::ostream& os) {
        write_path_csv_header(os);
        for (std::size_t i = 0; i < runs.size(); ++i) write_path_csv(os, static_cast<std::int64_t>(i), runs[i]);
    });
    return Ok;
}

std::vector<ExperimentSpec> experiments_for(const Context& c, const std::string& preset_name) {
    std::vector<ExperimentSpec> exps;
    if (!preset_name.empty() && preset_name != "custom") {
        Preset p = make_preset(preset_name);
        if (p.experiments.empty()) throw ConfigError("preset '" + preset_name + "' is not a sweep");
        exps = p.experiments;
        if (!c.o.config.empty())
            for (auto& e : exps) e.cfg = load_config(c.o.config);
    } else {
        if (preset_name == "custom" && c.o.config.empty()) throw ConfigError("preset custom needs --config");
        ExperimentSpec e;
        auto [cfg, ab] = base_config(c);
        e.name = c.o.config.empty() ? "custom" : std::filesystem::path(c.o.config).stem().string();
        e.cfg = cfg;
        e.absorber = ab;
        e.mua_grid = {cfg.mua};
        const auto mechs = split_list(c.o.mechanism);
        e.threshold_mode = mode_for(c, mechs.empty() ? Mechanism::EO : parse_mechanism(mechs.front()));
        exps.push_back(e);
    }
    for (auto& e : exps) {
        if (c.has("--delta")) e.cfg.delta = c.o.delta;
        if (c.has("--absorber")) e.absorber = parse_absorber(c.o.absorber);
        if (!c.o.mechanism.empty()) {
            e.mechanisms.clear();
            for (const auto& m : split_list(c.o.mechanism)) e.mechanisms.push_back(parse_mechanism(m));
        }
        e.posts = posts_for(c, e.posts);
        if (!c.o.mu_a_grid.empty()) e.mua_grid = parse_grid(c.o.mu_a_grid);
        else if (c.has("--mu-a")) e.mua_grid = {c.o.mu_a};
        if (c.has("--threshold-mode")) e.threshold_mode = parse_threshold_mode(c.o.threshold_mode);
        if (c.has("--paths")) e.paths = c.o.paths;
        if (c.has("--events")) e.events = c.o.events;
        if (c.has("--trace-stride")) e.mc.trace_stride = c.o.trace_stride;
        if (c.has("--estimator")) {
            if (c.o.estimator == "final") e.mc.estimator = Estimator::FinalValue;
            else if (c.o.estimator == "tail") e.mc.estimator = Estimator::TailMean;
            else throw ConfigError("unknown estimator '" + c.o.estimator + "'");
        }
        e.master_seed = effective_seed(c);
        e.mc.jobs = c.o.jobs;
    }
    return exps;
}

int run_sweeps(const Context& c, const std::string& preset_name) {
    std::vector<SweepRow> rows;
    for (const auto& e : experiments_for(c, preset_name)) {
        auto r = sweep(e);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (rows.empty()) {
        *c.err << "no rows produced\n";
        return EstimationFailure;
    }
    with_output(c, [&](std::ostream& os) { write_sweep_csv(os, rows); });
    if (!c.o.plot.empty()) {
        PlotStyle style = c.o.plot_style == "iqos" ? PlotStyle::Iqos : PlotStyle::Qos;
        emit_plotdata(rows, c.o.plot, style);
    }
    int code = Ok;
    for (const auto& r : rows) {
        if (r.flag.empty()) continue;
        *c.err << "warning: " << r.experiment << " " << to_string(r.mechanism) << " " << to_string(r.post)
               << " mu_a=" << r.mu_a << ": " << r.flag << '\n';
        if (r.flag.rfind("infeasible", 0) == 0) code = InfeasibleDesignFailure;
        else if (r.flag.rfind("unsafe", 0) == 0) code = code == InfeasibleDesignFailure ? code : Failure;
        else if (code == Ok) code = EstimationFailure;
    }
    return code;
}

int run_table3_batch(const Context& c, SystemConfig base) {
    Table3Options t;
    if (c.has("--trials")) t.trials = c.o.trials;
    if (!c.o.mu_a_grid.empty()) t.mua_grid = parse_grid(c.o.mu_a_grid);
    else if (c.has("--mu-a")) t.mua_grid = {c.o.mu_a};
    if (c.has("--samples")) {
        std::vector<std::int64_t> s;
        for (auto v : t.sample_sizes)
            if (v < c.o.samples) s.push_back(v);
        s.push_back(c.o.samples);
        t.sample_sizes = s;
    }
    if (c.has("--absorber")) t.absorber = parse_absorber(c.o.absorber);
    t.master_seed = effective_seed(c);
    t.jobs = c.o.jobs;
    const auto rows = run_table3(base, t);
    if (rows.empty()) return EstimationFailure;
    with_output(c, [&](std::ostream& os) { write_table3_csv(os, rows); });
    return Ok;
}

int cmd_learn(const Context& c) {
    if (c.has("--trials")) return run_table3_batch(c, base_config(c).first);
    const SystemConfig cfg = resolved_config(c);
    LearnConfig l = reference_learn_config(cfg, cfg.alpha_x_R / cfg.alpha_y_R);
    l.samples = c.o.samples;
    LearnRunOptions ro;
    ro.trace_stride = c.has("--trace-stride") ? c.o.trace_stride : 100;
    const LearnResult r = run_learning(cfg, l, derive_seed(effective_seed(c), {0}), ro);
    const double achieved = learned_iqos(cfg, r.w, r.b);
    const double reference = analyze(build_eh2(cfg, ThresholdMode::Adjusted).spec, cfg, PostType::Fake).iqos;
    with_output(c, [&](std::ostream& os) { write_learn_trace_csv(os, r); });
    *c.err << "w_S=" << r.w << " b_S=" << r.b << " iqos=" << achieved << " reference=" << reference
           << " restarts=" << r.restarts << (r.partial ? " (partial run)" : "") << '\n';
    return Ok;
}

int cmd_preset(const Context& c) {
    Preset p = make_preset(c.o.preset_name);
    if (p.learning) return run_table3_batch(c, c.o.config.empty() ? p.learning_cfg : load_config(c.o.config));
    return run_sweeps(c, c.o.preset_name);
}

int cmd_list(const Context& c) {
    for (const auto& n : preset_names()) {
        Preset p = make_preset(n);
        *c.out << n << ": " << p.description << '\n';
    }
    return Ok;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Warning-mechanism analysis and simulation for fake-post propagation", "fpwm"};
    app.require_subcommand(1);
    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    Options& o = ctx.o;

    struct Sub {
        CLI::App* app;
        std::function<int(const Context&)> run;
    };
    std::vector<Sub> subs;
    auto add = [&](const char* name, const char* help, std::function<int(const Context&)> fn) {
        CLI::App* sc = app.add_subcommand(name, help);
        add_common(sc, o);
        subs.push_back({sc, std::move(fn)});
        return sc;
    };
    add("analyze", "equilibria of a warning mechanism", cmd_analyze);
    add("design", "optimal mechanism parameters with diagnostics", cmd_design);
    add("simulate", "simulate propagation paths", cmd_simulate);
    add("sweep", "mu_a sweep with theory and Monte-Carlo", [](const Context& c) { return run_sweeps(c, c.o.preset); });
    add("learn", "learn (w, b) online, or a batch of learning runs with --trials", cmd_learn);
    CLI::App* pre = add("preset", "run a named experiment preset", cmd_preset);
    pre->add_option("name", o.preset_name, "preset name")->required();
    add("presets", "list presets", cmd_list);

    std::vector<std::string> argv_store{"fpwm"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return Usage;
    }

    try {
        for (const auto& s : subs) {
            if (!s.app->parsed()) continue;
            ctx.sc = s.app;
            return s.run(ctx);
        }
        err << app.help();
        return Usage;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        for (const auto& v : e.violations) err << "  " << v.code << ": " << v.message << '\n';
        return ConfigFailure;
    } catch (const InfeasibleDesign& e) {
        err << "infeasible design: " << e.what() << '\n';
        return InfeasibleDesignFailure;
    } catch (const EstimationError& e) {
        err << "estimation failure: " << e.what() << '\n';
        return EstimationFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Failure;
    }
}

} // namespace fpwm::cli
