#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <json.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(DRIFTSIM_CLI) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("driftsim_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("simulate is deterministic across thread counts") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const std::string base = "simulate --kappa 1 --r 10 --trials 40 --step 0.05 --seed 7 ";
    REQUIRE(run(base + "--threads 1 --out " + a.string()).code == 0);
    REQUIRE(run(base + "--threads 3 --out " + b.string()).code == 0);
    CHECK(slurp(a / "samples.csv") == slurp(b / "samples.csv"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    CHECK(slurp(a / "samples.csv").rfind("method,kappa,r,", 0) == 0);
}

TEST_CASE("verify-theorem-a at kappa = 3 reports the 4/(kappa-1) target") {
    const fs::path d = scratch("thm");
    const Run r = run("verify-theorem-a --kappa 3 --r-grid 20,40 --trials 200 --step 0.05 --seed 5 --out " + d.string());
    CHECK((r.code == 0 || r.code == 3));
    const std::string json = slurp(d / "report.json");
    CHECK(json.find("4/(kappa-1)") != std::string::npos);
    CHECK(json.find("\"schema_version\"") != std::string::npos);
    CHECK(r.output.find("4/(kappa-1)") != std::string::npos);

    // Defaults: the hard row targets 4/(kappa-1) = 2.
    const fs::path e = scratch("thm_default");
    const Run def = run("verify-theorem-a --kappa 3 --seed 5 --out " + e.string());
    CHECK(def.code == 0);
    const auto j = nlohmann::json::parse(slurp(e / "report.json"));
    bool found = false;
    for (const auto& s : j["statistics"])
        if (s["label"].get<std::string>().find("4/(kappa-1)") != std::string::npos && s["verdict"] != "informational") {
            CHECK(s["target"] == 2.0);
            found = true;
        }
    CHECK(found);
}

TEST_CASE("configuration errors exit with code 2") {
    const fs::path d = scratch("cfg");
    CHECK(run("simulate --kappa 1 --r 10 --trials 0 --seed 1 --out " + d.string()).code == 2);
    CHECK(run("simulate --kappa 1 --r 10 --trials 10 --out " + d.string()).code == 2);
    CHECK(run("simulate --kappa 1 --r 10 --r-grid 5,10 --trials 10 --seed 1 --out " + d.string()).code == 2);
    CHECK(run("verify-theorem-a --kappa 3 --r-grid 40,20 --trials 200 --seed 1 --out " + d.string()).code == 2);
    CHECK(run("levy-class --kappa 2 --seed 1 --out " + d.string()).code == 2);
    CHECK(run("no-such-experiment --seed 1").code == 2);

    const fs::path cfg = d / "bad.cfg";
    std::ofstream(cfg) << "# comment\nkappa = 1\ntrials = many\n";
    const Run bad = run("simulate --config " + cfg.string() + " --seed 1 --out " + d.string());
    CHECK(bad.code == 2);
    CHECK(bad.output.find("line 3") != std::string::npos);

    // Flags override the file.
    const fs::path ok = d / "ok.cfg";
    std::ofstream(ok) << "kappa = 1\nr = 5\ntrials = 0\nstep = 0.05\n";
    CHECK(run("simulate --config " + ok.string() + " --trials 10 --seed 1 --out " + d.string()).code == 0);
}

TEST_CASE("plot writes labeled ECDF and tail figures") {
    const fs::path d = scratch("plot");
    REQUIRE(run("simulate --kappa 1 --r 10 --trials 60 --step 0.05 --seed 3 --out " + d.string()).code == 0);
    const fs::path out = d / "figs";
    REQUIRE(run("plot --samples " + (d / "samples.csv").string() + " --seed 1 --out " + out.string()).code == 0);
    const std::string ecdf = slurp(out / "ecdf_kappa1_r10.svg");
    CHECK(ecdf.find("kappa=1") != std::string::npos);
    CHECK(ecdf.find("r=10") != std::string::npos);
    CHECK(slurp(out / "tail_kappa1_r10.svg").find("hill-fit") != std::string::npos);
}

TEST_CASE("plot refuses missing or empty input") {
    const fs::path d = scratch("plot_bad");
    CHECK(run("plot --samples " + (d / "absent.csv").string() + " --seed 1 --out " + d.string()).code == 2);
    const fs::path empty = d / "empty.csv";
    std::ofstream(empty) << "method,kappa,r,env_seed,noise_seed,h_value,h_minus,h_plus,flags\n";
    CHECK(run("plot --samples " + empty.string() + " --seed 1 --out " + d.string()).code == 2);
    CHECK(run("plot --seed 1 --out " + d.string()).code == 2);
}
