#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "driftsim/checks.hpp"
#include "driftsim/diffusion.hpp"
#include "driftsim/errors.hpp"
#include "driftsim/plot.hpp"
#include "driftsim/probes.hpp"
#include "driftsim/stable.hpp"
#include "driftsim/stats.hpp"

using namespace driftsim;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0, kExitConfig = 2, kExitHardFailure = 3, kExitRuntime = 4;

const std::vector<std::string> kExperiments = {"simulate",   "verify-theorem-a", "verify-identities",
                                               "levy-class", "lil",              "process-tests",
                                               "plot"};

struct Config {
    std::string experiment;
    std::optional<double> kappa, r, dt, step, horizon, node_step, c15, a_power;
    std::vector<double> r_grid;
    std::optional<long long> trials, n_max;
    std::optional<Seed> seed;
    Method method = Method::ray_knight;
    unsigned threads = 0;
    std::string out = "out";
    bool plot = false;
    std::vector<std::string> a;
    std::string samples;
    std::map<std::string, int> line;  ///< config-file line of each key read from the file

    int line_of(const std::string& key) const {
        auto it = line.find(key);
        return it == line.end() ? 0 : it->second;
    }
};

double to_double(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'", line);
    }
}

long long to_integer(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const long long n = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not an integer: '" + v + "'", line);
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

Method to_method(const std::string& v, int line) {
    const auto m = parse_method(v);
    if (!m) throw ConfigError("method: expected euler or ray-knight, got '" + v + "'", line);
    return *m;
}

// Flat "key = value" lines; '#' starts a comment. Keys already set on the command
// line are skipped so that flags win.
void load_config_file(const std::string& path, Config& c, const CLI::App& app) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::string raw;
    int line = 0;
    auto given = [&](const std::string& flag) { return app.count("--" + flag) > 0; };
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = raw.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(raw.substr(0, eq));
        const std::string value = trim(raw.substr(eq + 1));
        for (char& ch : key)
            if (ch == '_') ch = '-';
        if (value.empty()) throw ConfigError(key + ": empty value", line);
        if (given(key)) continue;
        c.line[key] = line;
        if (key == "kappa") c.kappa = to_double(key, value, line);
        else if (key == "r") c.r = to_double(key, value, line);
        else if (key == "r-grid") {
            c.r_grid.clear();
            for (const auto& v : split_list(value)) c.r_grid.push_back(to_double(key, v, line));
        } else if (key == "trials") c.trials = to_integer(key, value, line);
        else if (key == "method") c.method = to_method(value, line);
        else if (key == "dt") c.dt = to_double(key, value, line);
        else if (key == "step") c.step = to_double(key, value, line);
        else if (key == "seed") {
            const long long s = to_integer(key, value, line);
            if (s < 0) throw ConfigError("seed must be nonnegative", line);
            c.seed = static_cast<Seed>(s);
        } else if (key == "threads") {
            const long long t = to_integer(key, value, line);
            if (t < 0) throw ConfigError("threads must be nonnegative", line);
            c.threads = static_cast<unsigned>(t);
        } else if (key == "out") c.out = value;
        else if (key == "plot") {
            if (value != "true" && value != "false" && value != "1" && value != "0")
                throw ConfigError("plot: expected true or false", line);
            c.plot = value == "true" || value == "1";
        } else if (key == "horizon") c.horizon = to_double(key, value, line);
        else if (key == "node-step") c.node_step = to_double(key, value, line);
        else if (key == "n-max") c.n_max = to_integer(key, value, line);
        else if (key == "a") c.a = split_list(value);
        else if (key == "a-power") c.a_power = to_double(key, value, line);
        else if (key == "c15") c.c15 = to_double(key, value, line);
        else if (key == "samples") c.samples = value;
        else throw ConfigError("unknown key '" + key + "'", line);
    }
}

void require_positive(const Config& c, const std::string& key, const std::optional<double>& v) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) throw ConfigError(key + " must be positive", c.line_of(key));
}

void validate(Config& c) {
    if (c.experiment == "plot") {
        if (c.samples.empty()) throw ConfigError("plot needs --samples FILE");
        return;
    }
    if (!c.seed) throw ConfigError("seed is mandatory (--seed N)");
    require_positive(c, "kappa", c.kappa);
    require_positive(c, "r", c.r);
    require_positive(c, "dt", c.dt);
    require_positive(c, "step", c.step);
    require_positive(c, "node-step", c.node_step);
    require_positive(c, "c15", c.c15);
    if (c.horizon && !(*c.horizon > 0.0)) throw ConfigError("horizon must be positive", c.line_of("horizon"));
    if (c.trials && *c.trials <= 0) throw ConfigError("trials must be a positive integer", c.line_of("trials"));
    if (c.r && !c.r_grid.empty()) throw ConfigError("give either r or r-grid, not both", c.line_of("r-grid"));
    for (std::size_t i = 0; i < c.r_grid.size(); ++i) {
        if (!(c.r_grid[i] > 0.0)) throw ConfigError("r-grid values must be positive", c.line_of("r-grid"));
        if (i > 0 && !(c.r_grid[i] > c.r_grid[i - 1]))
            throw ConfigError("r-grid must be increasing", c.line_of("r-grid"));
    }
    const bool upper_lower = c.experiment == "levy-class" || c.experiment == "lil";
    if (upper_lower && c.kappa && *c.kappa > 1.0)
        throw ConfigError(c.experiment + " needs kappa in (0, 1]", c.line_of("kappa"));
    if (c.experiment == "levy-class") {
        if (c.n_max && *c.n_max < 10) throw ConfigError("n-max must be at least 10", c.line_of("n-max"));
        for (const auto& name : c.a) {
            try {
                make_growth(name, c.a_power.value_or(1.0));
            } catch (const ConfigError& e) {
                throw ConfigError(e.what(), c.line_of(c.a_power && name == "log_power" ? "a-power" : "a"));
            }
        }
    }
    if (c.experiment == "lil")
        for (double r : c.r_grid)
            if (!(r > std::exp(1.0))) throw ConfigError("lil needs r-grid values above e", c.line_of("r-grid"));
    if (c.experiment == "verify-theorem-a" && c.trials && *c.trials < 100)
        throw ConfigError("verify-theorem-a needs at least 100 trials", c.line_of("trials"));
    if (c.method == Method::euler && (c.experiment == "levy-class" || c.experiment == "lil"))
        std::cerr << "warning: euler at large r is slow; ray-knight is exact in law\n";
}

SimulationOptions simulation_options(const Config& c, double default_step) {
    SimulationOptions o;
    o.method = c.method;
    o.step = c.step.value_or(default_step);
    o.dt = c.dt.value_or(0.0);
    o.node_step = c.node_step.value_or(0.0);
    // Ray-Knight runs cost nothing extra for long H, so they are uncensored by default.
    o.horizon = c.horizon.value_or(std::numeric_limits<double>::infinity());
    o.threads = c.threads;
    return o;
}

std::size_t trials_or(const Config& c, std::size_t fallback) {
    return c.trials ? static_cast<std::size_t>(*c.trials) : fallback;
}

std::vector<double> grid_or(const Config& c, std::vector<double> fallback) {
    if (!c.r_grid.empty()) return c.r_grid;
    if (c.r) return {*c.r};
    return fallback;
}

struct Outcome {
    ExperimentReport report;
    std::vector<HittingSample> samples;
    std::string extra_csv_name, extra_csv;
};

Outcome run_simulate(const Config& c) {
    const double kappa = c.kappa.value_or(1.0);
    const SimulationOptions o = simulation_options(c, 0.02);
    BatchConfig b;
    b.kappa = kappa;
    b.levels = grid_or(c, {50.0});
    b.trials = trials_or(c, 100);
    b.method = o.method;
    b.step = o.step;
    b.dt = o.dt;
    b.node_step = o.node_step;
    b.horizon = c.horizon.value_or(o.method == Method::euler ? kDefaultHorizon : o.horizon);
    b.seed = *c.seed;
    b.threads = o.threads;
    const BatchResult res = run_hitting_batch(b);

    Outcome out;
    ExperimentReport& rep = out.report;
    rep.name = "simulate";
    rep.seed = *c.seed;
    rep.parameters["kappa"] = format_number(kappa);
    rep.parameters["trials"] = std::to_string(b.trials);
    rep.parameters["method"] = to_string(b.method);
    rep.parameters["step"] = format_number(b.step);
    for (std::size_t i = 0; i < b.levels.size(); ++i) {
        const auto v = res.values(i);
        const std::string at = " at r=" + format_number(b.levels[i]);
        rep.inform("median H" + at, median(v));
        rep.inform("mean H" + at, mean(v));
    }
    rep.inform("censored samples", static_cast<double>(res.censored));
    rep.inform("truncated samples", static_cast<double>(res.truncated));
    out.samples = res.flat();
    return out;
}

Outcome run_theorem_a(const Config& c) {
    const double kappa = c.kappa.value_or(3.0);
    std::vector<double> grid;
    std::size_t trials;
    if (kappa > 1.0) {
        grid = grid_or(c, {50.0, 100.0, 200.0});
        trials = trials_or(c, 1000);
    } else if (kappa == 1.0) {
        grid = grid_or(c, {100.0, 1000.0});
        trials = trials_or(c, 500);
    } else {
        grid = grid_or(c, {20.0, 50.0});
        trials = trials_or(c, 10000);
    }
    RegimeResult res = regime_verifier(kappa, grid, trials, *c.seed, simulation_options(c, 0.02));
    Outcome out{std::move(res.report), {}, {}, {}};
    for (auto& s : res.samples) out.samples.insert(out.samples.end(), s.begin(), s.end());
    return out;
}

Outcome run_identities(const Config& c) {
    const std::size_t n = trials_or(c, 10000);
    const Seed s = *c.seed;
    Outcome out;
    ExperimentReport& rep = out.report;
    rep.name = "verify-identities";
    rep.seed = s;
    rep.parameters["trials"] = std::to_string(n);
    const std::vector<double> kappas = c.kappa ? std::vector<double>{*c.kappa} : std::vector<double>{0.5, 1.0, 2.0};
    for (std::size_t i = 0; i < kappas.size(); ++i) dufresne_check(rep, kappas[i], n, split_seed(s, 10 + i));
    const double k_stable = c.kappa && *c.kappa < 1.0 ? *c.kappa : 0.5;
    stable_functional_check(rep, k_stable, n, split_seed(s, 20));
    cauchy_functional_check(rep, n, split_seed(s, 21));
    exp_moment_check(rep, 10 * n, split_seed(s, 22));
    small_deviation_check(rep, k_stable, 100 * n, split_seed(s, 23));
    stable_tail_check(rep, k_stable, 10 * n, split_seed(s, 24));
    return out;
}

Outcome run_levy(const Config& c) {
    const double kappa = c.kappa.value_or(0.5);
    std::vector<GrowthFunction> choices;
    const std::vector<std::string> names =
        c.a.empty() ? std::vector<std::string>{"constant", "log", "log_squared", "loglog_variant"} : c.a;
    for (const auto& name : names) choices.push_back(make_growth(name, c.a_power.value_or(1.0)));
    const int n_max = static_cast<int>(c.n_max.value_or(12));
    LevyClassResult res = levy_class_probe(kappa, choices, n_max, trials_or(c, 200), *c.seed, simulation_options(c, 0.1));
    Outcome out{std::move(res.report), {}, "running_max.csv", {}};
    std::ostringstream csv;
    csv.precision(17);
    csv << "a,trial,n,r,running_max\n";
    const std::size_t nm = res.levels.size();
    for (std::size_t k = 0; k < choices.size(); ++k)
        for (std::size_t i = 0; i < res.running_max[k].size(); ++i)
            csv << choices[k].name() << ',' << i / nm << ',' << i % nm + 1 << ',' << res.levels[i % nm] << ','
                << res.running_max[k][i] << '\n';
    out.extra_csv = csv.str();
    return out;
}

Outcome run_lil(const Config& c) {
    const double kappa = c.kappa.value_or(1.0);
    std::optional<double> c15 = c.c15;
    if (!c15 && kappa < 1.0) c15 = small_deviation_probe(kappa, {}, 1000000, split_seed(*c.seed, 99)).c15_pinned;
    const std::vector<double> grid = grid_or(c, {10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0});
    Outcome out;
    out.report = lil_probe(kappa, grid, trials_or(c, 200), *c.seed, c15, simulation_options(c, 0.02));
    return out;
}

Outcome run_process_tests(const Config& c) {
    const Seed s = *c.seed;
    const std::size_t n = trials_or(c, 500);
    const double kappa = c.kappa.value_or(1.0);
    Outcome out;
    ExperimentReport& rep = out.report;
    rep.name = "process-tests";
    rep.seed = s;
    rep.parameters["trials"] = std::to_string(n);
    rep.parameters["kappa"] = format_number(kappa);
    for (double d : {6.0, 8.0}) inverse_square_check(rep, d, 1e4, n, split_seed(s, static_cast<std::uint64_t>(d)));
    besq_martingale_check(rep, 6.0, 40 * n, split_seed(s, 10));
    jacobi_clamp_check(rep, kappa, split_seed(s, 11));
    skew_product_rows(rep, kappa, std::max<std::size_t>(1000, 4 * n), split_seed(s, 12));
    jacobi_time_change_rows(rep, kappa, 2 * n, split_seed(s, 15));
    occupation_check(rep, n / 10 + 1, split_seed(s, 13));
    reproducibility_check(rep, split_seed(s, 14));
    return out;
}

int run_plot(const Config& c) {
    std::ifstream in(c.samples);
    if (!in) throw ConfigError("samples file not found: " + c.samples, c.line_of("samples"));
    const auto samples = read_samples_csv(in);
    if (samples.empty()) throw ConfigError("samples file has no rows: " + c.samples, c.line_of("samples"));
    for (const auto& f : emit_plots(samples, c.out)) std::cout << f << '\n';
    return kExitOk;
}

int run(Config& c) {
    validate(c);
    if (c.experiment == "plot") return run_plot(c);
    Outcome o;
    if (c.experiment == "simulate") o = run_simulate(c);
    else if (c.experiment == "verify-theorem-a") o = run_theorem_a(c);
    else if (c.experiment == "verify-identities") o = run_identities(c);
    else if (c.experiment == "levy-class") o = run_levy(c);
    else if (c.experiment == "lil") o = run_lil(c);
    else o = run_process_tests(c);

    fs::create_directories(c.out);
    const fs::path dir(c.out);
    if (!o.samples.empty()) {
        std::ostringstream csv;
        write_samples_csv(o.samples, csv);
        write_text_file((dir / "samples.csv").string(), csv.str());
        o.report.samples_ref = "samples.csv";
    }
    if (!o.extra_csv.empty()) {
        write_text_file((dir / o.extra_csv_name).string(), o.extra_csv);
        o.report.samples_ref = o.extra_csv_name;
    }
    write_text_file((dir / "report.json").string(), o.report.to_json());
    const std::string text = o.report.to_text();
    write_text_file((dir / "report.txt").string(), text);
    std::cout << text;
    if (c.plot) {
        if (o.samples.empty()) std::cerr << "note: " << c.experiment << " has no hitting-time samples to plot\n";
        else emit_plots(o.samples, c.out);
    }
    return o.report.hard_failure() ? kExitHardFailure : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffusion in a drifted Brownian potential: simulation and checks"};
    Config c;
    std::string config_file, method = "ray-knight";
    long long trials = 0, n_max = 0, seed = 0;
    double kappa = 0, r = 0, dt = 0, step = 0, horizon = 0, node_step = 0, c15 = 0, a_power = 0;

    app.add_option("experiment", c.experiment, "Experiment to run")->required()->check(CLI::IsMember(kExperiments));
    app.add_option("--config", config_file, "Flat key = value file; flags override it");
    app.add_option("--kappa", kappa, "Drift parameter");
    auto* r_opt = app.add_option("--r", r, "Target level");
    app.add_option("--r-grid", c.r_grid, "Comma-separated increasing levels")->delimiter(',')->excludes(r_opt);
    app.add_option("--trials", trials, "Number of trials or replicates");
    app.add_option("--method", method, "euler or ray-knight");
    app.add_option("--dt", dt, "Euler time step");
    app.add_option("--step", step, "Environment grid step");
    app.add_option("--horizon", horizon, "Censoring time for hitting times");
    app.add_option("--node-step", node_step, "Ray-Knight node spacing");
    app.add_option("--seed", seed, "Root seed (mandatory)");
    app.add_option("--threads", c.threads, "Worker threads; 0 uses all cores");
    app.add_option("--out", c.out, "Output directory");
    app.add_flag("--plot", c.plot, "Write SVG plots next to the samples");
    app.add_option("--n-max", n_max, "Last index of r_n = e^n (levy-class)");
    app.add_option("--a", c.a, "Growth functions (levy-class)")->delimiter(',');
    app.add_option("--a-power", a_power, "Exponent for a = log_power");
    app.add_option("--c15", c15, "Small-deviation constant (lil, kappa < 1)");
    app.add_option("--samples", c.samples, "Samples CSV (plot)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        auto given = [&](const char* flag) { return app.count(flag) > 0; };
        if (given("--kappa")) c.kappa = kappa;
        if (given("--r")) c.r = r;
        if (given("--trials")) c.trials = trials;
        if (given("--dt")) c.dt = dt;
        if (given("--step")) c.step = step;
        if (given("--horizon")) c.horizon = horizon;
        if (given("--node-step")) c.node_step = node_step;
        if (given("--n-max")) c.n_max = n_max;
        if (given("--a-power")) c.a_power = a_power;
        if (given("--c15")) c.c15 = c15;
        if (given("--seed")) {
            if (seed < 0) throw ConfigError("seed must be nonnegative");
            c.seed = static_cast<Seed>(seed);
        }
        if (given("--method")) c.method = to_method(method, 0);
        if (!config_file.empty()) load_config_file(config_file, c, app);
        return run(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
