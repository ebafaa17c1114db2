#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fpwm/cli.hpp"
#include "fpwm/model.hpp"
#include "fpwm/presets.hpp"

using namespace fpwm;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run_command(args, out, err);
    return {code, out.str(), err.str()};
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("fpwm_cli_" + std::to_string(std::rand()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const nlohmann::json& j) const {
        const auto p = (path / name).string();
        std::ofstream(p) << j.dump(2);
        return p;
    }
};

} // namespace

TEST_CASE("table 2 preset prints four eh2 rows") {
    Run r = run({"preset", "table2_eh2"});
    REQUIRE(r.code == cli::Ok);
    CHECK(count_lines(r.out) == 5);
    CHECK(r.out.find("table2_eh2,eh2,fake,0.1,") != std::string::npos);
    CHECK(r.out.find(",0.8270") != std::string::npos);
}

TEST_CASE("invalid configuration exits with code 2") {
    TempDir t;
    nlohmann::json j = config_to_json(naive_config());
    j["mu0"] = 0.6;
    Run r = run({"analyze", "--config", t.file("bad.json", j)});
    CHECK(r.code == cli::ConfigFailure);
    CHECK(r.err.find("mu_sum") != std::string::npos);

    j = config_to_json(naive_config());
    j["mu_two"] = 0.5;
    CHECK(run({"analyze", "--config", t.file("typo.json", j)}).code == cli::ConfigFailure);
    CHECK(run({"analyze", "--config", (t.path / "missing.json").string()}).code == cli::ConfigFailure);
    CHECK(run({"analyze", "--mechanism", "ez"}).code == cli::ConfigFailure);
    CHECK(run({"preset", "custom"}).code == cli::ConfigFailure);
    CHECK(run({"preset", "fig_nonexistent"}).code == cli::ConfigFailure);
}

TEST_CASE("usage errors exit with code 64") {
    CHECK(run({"sweep", "--bogus-flag"}).code == cli::Usage);
    CHECK(run({}).code == cli::Usage);
    CHECK(run({"frobnicate"}).code == cli::Usage);
    CHECK(run({"analyze", "--paths", "many"}).code == cli::Usage);
}

TEST_CASE("sweep output is deterministic and seed dependent") {
    const std::vector<std::string> args = {"sweep", "--preset", "fig_exwm", "--paths", "10", "--events", "500",
                                           "--seed", "5"};
    Run a = run(args);
    Run b = run(args);
    REQUIRE(a.code == cli::Ok);
    CHECK(a.out == b.out);
    auto jobs = args;
    jobs.insert(jobs.end(), {"--jobs", "2"});
    CHECK(run(jobs).out == a.out);
    auto other = args;
    other.back() = "6";
    CHECK(run(other).out != a.out);
}

TEST_CASE("FPWM_SEED overrides --seed") {
    const std::vector<std::string> base = {"simulate", "--preset", "fig_eowm_naive", "--events", "300"};
    auto with_seed = [&](const std::string& s) {
        auto v = base;
        v.insert(v.end(), {"--seed", s});
        return v;
    };
    Run s9 = run(with_seed("9"));
    ::setenv("FPWM_SEED", "9", 1);
    Run env = run(with_seed("3"));
    ::setenv("FPWM_SEED", "not-a-number", 1);
    Run bad = run(with_seed("3"));
    ::unsetenv("FPWM_SEED");
    Run s3 = run(with_seed("3"));
    REQUIRE(s9.code == cli::Ok);
    CHECK(env.out == s9.out);
    CHECK(s3.out != s9.out);
    CHECK(bad.code == cli::ConfigFailure);
}

TEST_CASE("infeasible design exits with code 3") {
    CHECK(run({"design", "--preset", "fig_eowm_naive", "--delta", "0.001"}).code == cli::InfeasibleDesignFailure);
    Run s = run({"sweep", "--preset", "fig_eowm_naive", "--delta", "0.001", "--paths", "0"});
    CHECK(s.code == cli::InfeasibleDesignFailure);
    CHECK(s.err.find("infeasible") != std::string::npos);
}

TEST_CASE("no surviving paths exits with code 4") {
    TempDir t;
    SystemConfig c = naive_config();
    c.mu0 = 0.99;
    c.mu1 = 0.0;
    c.mu2 = 0.01;
    const std::string path = t.file("dying.json", config_to_json(c));
    Run r = run({"sweep", "--config", path, "--mechanism", "eo", "--paths", "2", "--events", "2000"});
    CHECK(r.code == cli::EstimationFailure);
    CHECK(r.err.find("no surviving paths") != std::string::npos);
}

TEST_CASE("subcommands produce CSV") {
    Run a = run({"analyze", "--preset", "fig_ehwm", "--mechanism", "eh", "--mu-a", "0.1"});
    REQUIRE(a.code == cli::Ok);
    CHECK(a.out.rfind("mechanism,post,mu_a,w,b,phi,beta_star,kind,qos,iqos\neh,fake,0.1,", 0) == 0);

    Run d = run({"design", "--preset", "fig_exwm"});
    REQUIRE(d.code == cli::Ok);
    CHECK(d.out.find("w,1.076470588\n") != std::string::npos);

    Run s = run({"simulate", "--events", "50", "--trace-stride", "25"});
    REQUIRE(s.code == cli::Ok);
    CHECK(s.out.rfind("path_id,epoch,c_x,c_y,t_x,t_y,beta\n0,0,0,20,0,20,0\n", 0) == 0);

    Run l = run({"learn", "--samples", "1000", "--mu-a", "0.1"});
    REQUIRE(l.code == cli::Ok);
    CHECK(l.out.rfind("k,w_k,b_k,beta_k,special_epoch\n", 0) == 0);
    CHECK(l.err.find("reference=") != std::string::npos);

    Run p = run({"presets"});
    for (const auto& n : preset_names()) CHECK(p.out.find(n + ":") != std::string::npos);
    CHECK(run({"--help"}).code == cli::Ok);
}

TEST_CASE("custom preset with a config file and plot output") {
    TempDir t;
    const std::string cfg = t.file("mine.json", config_to_json(with_mua(naive_config(), 0.1)));
    const std::string prefix = (t.path / "plot").string();
    const std::string csv = (t.path / "rows.csv").string();
    Run r = run({"preset", "custom", "--config", cfg, "--mechanism", "eo,ea", "--paths", "0", "--out", csv, "--plot",
                 prefix, "--plot-style", "iqos"});
    REQUIRE(r.code == cli::Ok);
    CHECK(r.out.empty());
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("experiment,mechanism,post,", 0) == 0);
    CHECK(fs::exists(prefix + ".dat"));
    CHECK(fs::exists(prefix + ".gp"));
}

TEST_CASE("learning batch mode") {
    Run r = run({"learn", "--trials", "4", "--samples", "3000", "--mu-a-grid", "0,0.1", "--seed", "2"});
    REQUIRE(r.code == cli::Ok);
    CHECK(r.out.rfind("mu_a,samples,success_fraction\n0,3000,", 0) == 0);
    CHECK(count_lines(r.out) == 3);
}
