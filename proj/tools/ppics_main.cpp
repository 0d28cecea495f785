// ppics command-line tool: streaming anytime-valid confidence sequences
// over label/prediction data, scenario simulation, and hyperparameter
// tuning. Exit codes: 0 ok, 2 config error, 3 data error, 4 numerical.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppics/data_io.hpp"
#include "ppics/errors.hpp"
#include "ppics/harness.hpp"
#include "ppics/version.hpp"

namespace {

using namespace ppics;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join_command(int argc, char** argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) {
        if (i) os << ' ';
        const std::string a = argv[i];
        if (a.find(' ') != std::string::npos)
            os << '"' << a << '"';
        else
            os << a;
    }
    return os.str();
}

using Manifest = std::vector<std::pair<std::string, std::string>>;

// key=value config file support. Flags take precedence: a key is applied
// only when the matching --flag was not given on the command line.
struct ConfigBinding {
    std::string key;
    std::function<void(const std::string&)> set;
};

ConfigBinding bind_value(const std::string& key, double& field) {
    return {key, [&field, key](const std::string& v) {
                try {
                    std::size_t pos = 0;
                    field = std::stod(v, &pos);
                    if (pos != v.size()) throw std::invalid_argument(v);
                } catch (const std::exception&) {
                    throw ConfigError("config: bad numeric value for " + key + ": " + v);
                }
            }};
}

ConfigBinding bind_value(const std::string& key, std::int64_t& field) {
    return {key, [&field, key](const std::string& v) {
                try {
                    std::size_t pos = 0;
                    field = std::stoll(v, &pos);
                    if (pos != v.size()) throw std::invalid_argument(v);
                } catch (const std::exception&) {
                    throw ConfigError("config: bad integer value for " + key + ": " + v);
                }
            }};
}

ConfigBinding bind_value(const std::string& key, int& field) {
    return {key, [&field, key](const std::string& v) {
                try {
                    field = std::stoi(v);
                } catch (const std::exception&) {
                    throw ConfigError("config: bad integer value for " + key + ": " + v);
                }
            }};
}

ConfigBinding bind_value(const std::string& key, std::string& field) {
    return {key, [&field](const std::string& v) { field = v; }};
}

ConfigBinding bind_value(const std::string& key, bool& field) {
    return {key, [&field, key](const std::string& v) {
                if (v == "1" || v == "true" || v == "yes")
                    field = true;
                else if (v == "0" || v == "false" || v == "no")
                    field = false;
                else
                    throw ConfigError("config: bad boolean value for " + key + ": " + v);
            }};
}

std::string trim_ws(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

void apply_config_file(const CLI::App* cmd, const std::string& path,
                       const std::vector<ConfigBinding>& bindings) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    long long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim_ws(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config:" + std::to_string(line_no) + ": expected key=value");
        const std::string key = trim_ws(t.substr(0, eq));
        const std::string value = trim_ws(t.substr(eq + 1));
        const auto it =
            std::find_if(bindings.begin(), bindings.end(),
                         [&](const ConfigBinding& b) { return b.key == key; });
        if (it == bindings.end())
            throw ConfigError("config:" + std::to_string(line_no) + ": unknown key: " + key);
        if (cmd->count("--" + key) > 0) continue;  // flag beats config
        it->set(value);
    }
}

struct CommonOpts {
    double alpha = 0.1;
    double delta = -1.0;  // <0: derive default
    double rho = 0.0;
    std::int64_t t_star = 500;
    std::int64_t start_n = 40;
    std::string method = "classical";
    std::string prior = "none";
    double prior_scale = -1.0;  // <0: tau heuristic
    double prior_location = 0.0;
    double prior_dof = 3.0;
    std::string config_path;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--config", config_path,
                        "key=value config file (flags take precedence)");
        cmd->add_option("--alpha", alpha, "miscoverage level in (0,1)");
        cmd->add_option("--delta", delta,
                        "budget for the measure-of-fit sequence (default: alpha/10 for "
                        "assisted finite pools, else 0)");
        cmd->add_option("--rho", rho, "mixture scale; overrides --t-star tuning");
        cmd->add_option("--t-star", t_star, "horizon used to tune rho and the prior scale");
        cmd->add_option("--start-n", start_n, "first n at which metrics are recorded");
        cmd->add_option("--method", method,
                        "classical|ppi|ppi++ (comma-separated list allowed)");
        cmd->add_option("--prior", prior, "none|gaussian|laplace|student-t|improper");
        cmd->add_option("--prior-scale", prior_scale, "prior scale (default: 1/sqrt(t-star))");
        cmd->add_option("--prior-location", prior_location, "prior location");
        cmd->add_option("--prior-dof", prior_dof, "student-t prior degrees of freedom");
    }

    std::optional<Prior> make_prior() const {
        const double scale =
            prior_scale > 0.0 ? prior_scale : tau_heuristic(std::max<std::int64_t>(t_star, 1));
        return parse_prior(prior, prior_location, scale, prior_dof);
    }

    CsConfig make_config(bool assume_infinite, bool assisted_finite_pool) const {
        CsConfig cfg;
        cfg.alpha = alpha;
        if (delta >= 0.0)
            cfg.delta = delta;
        else
            cfg.delta = (assisted_finite_pool && !assume_infinite) ? alpha / 10.0 : 0.0;
        cfg.rho = rho;
        cfg.t_star = t_star;
        cfg.start_n = start_n;
        cfg.assume_infinite_unlabelled = assume_infinite;
        cfg.validate();
        return cfg;
    }

    std::vector<Flavor> parse_methods() const {
        std::vector<Flavor> flavors;
        std::stringstream ss(method);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            flavors.push_back(parse_flavor(item));
        }
        if (flavors.empty()) throw ConfigError("no method given");
        return flavors;
    }

    std::vector<ConfigBinding> bindings() {
        return {bind_value("alpha", alpha),
                bind_value("delta", delta),
                bind_value("rho", rho),
                bind_value("t-star", t_star),
                bind_value("start-n", start_n),
                bind_value("method", method),
                bind_value("prior", prior),
                bind_value("prior-scale", prior_scale),
                bind_value("prior-location", prior_location),
                bind_value("prior-dof", prior_dof)};
    }

    void append_manifest(Manifest& m, const CsConfig& cfg,
                         const std::optional<Prior>& p) const {
        m.emplace_back("alpha", format_double(cfg.alpha));
        m.emplace_back("delta", format_double(cfg.delta));
        m.emplace_back("rho", format_double(cfg.resolved_rho()));
        m.emplace_back("t_star", std::to_string(cfg.t_star));
        m.emplace_back("start_n", std::to_string(cfg.start_n));
        m.emplace_back("method", method);
        m.emplace_back("prior", p ? p->name() : "none");
        if (p && p->proper()) {
            m.emplace_back("prior_location", format_double(p->location));
            m.emplace_back("prior_scale", format_double(p->scale));
            if (p->kind == PriorKind::student_t)
                m.emplace_back("prior_dof", format_double(p->dof));
        }
    }
};

std::uint64_t resolve_seed(bool seed_given, std::uint64_t seed) {
    if (seed_given) return seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^
           static_cast<std::uint64_t>(
               std::chrono::steady_clock::now().time_since_epoch().count());
}

void emit_manifest(const std::string& out_path, const Manifest& entries) {
    if (out_path.empty()) {
        write_manifest(std::cerr, entries);
        return;
    }
    std::ofstream mf(out_path + ".manifest.txt");
    if (!mf) throw DataError("cannot write manifest next to " + out_path);
    write_manifest(mf, entries);
}

Manifest base_manifest(const std::string& command) {
    Manifest m;
    m.emplace_back("artifact", "ppics");
    m.emplace_back("version", kVersion);
    m.emplace_back("timestamp", iso_timestamp());
    m.emplace_back("command", command);
    return m;
}

double parse_dof(const std::string& text) {
    if (text == "inf" || text == "infinity")
        return std::numeric_limits<double>::infinity();
    try {
        return std::stod(text);
    } catch (const std::exception&) {
        throw ConfigError("--df expects a number or 'inf'");
    }
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOpts {
    CommonOpts common;
    std::string data_path;
    std::string out_path;
    std::string loss = "squared";
    std::string grid;
    bool assume_infinite = false;
    bool pool_labelled = false;

    std::vector<ConfigBinding> bindings() {
        auto b = common.bindings();
        b.push_back(bind_value("data", data_path));
        b.push_back(bind_value("out", out_path));
        b.push_back(bind_value("loss", loss));
        b.push_back(bind_value("grid", grid));
        b.push_back(bind_value("assume-infinite-unlabelled", assume_infinite));
        b.push_back(bind_value("pool-labelled", pool_labelled));
        return b;
    }
};

int cmd_analyze(const AnalyzeOpts& opt, const std::string& command) {
    const auto flavors = opt.common.parse_methods();
    if (flavors.size() != 1) throw ConfigError("analyze expects a single --method");
    const Flavor flavor = flavors.front();
    const auto prior = opt.common.make_prior();
    const bool assisted = prior.has_value();
    CsConfig cfg = opt.common.make_config(opt.assume_infinite,
                                          assisted && flavor != Flavor::classical);
    cfg.prior = prior;

    const bool generic = opt.loss == "generic";
    if (!generic && opt.loss != "squared") throw ConfigError("unknown loss: " + opt.loss);

    std::optional<GridSpec> grid;
    if (!opt.grid.empty()) {
        GridSpec g;
        std::stringstream ss(opt.grid);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, ':')) parts.push_back(part);
        if (parts.size() != 3) throw ConfigError("--grid expects lo:hi:steps");
        try {
            g.lo = std::stod(parts[0]);
            g.hi = std::stod(parts[1]);
            g.steps = std::stoll(parts[2]);
        } catch (const std::exception&) {
            throw ConfigError("--grid expects numeric lo:hi:steps");
        }
        grid = g;
    }

    // The CLI's generic mode drives the built-in squared subgradient
    // through the buffered grid machinery; custom subgradients come in
    // through the library API.
    const LossModel loss =
        generic ? LossModel::generic(
                      [](double th, std::span<const double>, double y) { return th - y; })
                : LossModel::squared();

    std::ifstream fin(opt.data_path);
    if (!fin) throw DataError("cannot open data file: " + opt.data_path);
    CsvReader reader(fin, opt.data_path);

    std::ofstream fout;
    if (!opt.out_path.empty()) {
        fout.open(opt.out_path);
        if (!fout) throw DataError("cannot open output file: " + opt.out_path);
    }
    std::ostream& out = opt.out_path.empty() ? std::cout : fout;

    StreamState state(StreamState::Options{generic, opt.pool_labelled});
    out << "n,t_total,center,lower,upper,width\n";
    std::int64_t t_total = 0;
    bool warned_boundary = false, warned_empty = false;
    while (auto row = reader.next()) {
        ++t_total;
        Observation obs;
        obs.prediction = row->prediction;
        obs.label = row->label;
        state.update(obs);
        if (!row->label) continue;
        const std::int64_t n = state.n();
        try {
            if (!generic) {
                const Interval iv = invert_interval(state, flavor, cfg, assisted);
                out << n << ',' << t_total << ',' << format_double(iv.center) << ','
                    << format_double(iv.lower()) << ',' << format_double(iv.upper()) << ','
                    << format_double(2.0 * iv.radius) << '\n';
            } else {
                const GridRegion region =
                    invert_grid(state, loss, flavor, cfg, assisted, grid);
                if (region.boundary_warning && !warned_boundary) {
                    std::cerr << "warning: confidence region touches the grid boundary at n="
                              << n << "\n";
                    warned_boundary = true;
                }
                if (region.empty_region && !warned_empty) {
                    std::cerr << "note: empty confidence region at n=" << n << "\n";
                    warned_empty = true;
                }
                for (const auto& [lo, hi] : region.segments) {
                    out << n << ',' << t_total << ',' << format_double(0.5 * (lo + hi)) << ','
                        << format_double(lo) << ',' << format_double(hi) << ','
                        << format_double(hi - lo) << '\n';
                }
            }
        } catch (const InsufficientData&) {
        } catch (const InvalidRatio&) {
        }
    }

    Manifest m = base_manifest(command);
    m.emplace_back("data", opt.data_path);
    m.emplace_back("loss", opt.loss);
    if (!opt.grid.empty()) m.emplace_back("grid", opt.grid);
    m.emplace_back("assume_infinite_unlabelled", opt.assume_infinite ? "1" : "0");
    m.emplace_back("pool_labelled", opt.pool_labelled ? "1" : "0");
    opt.common.append_manifest(m, cfg, prior);
    m.emplace_back("records", std::to_string(t_total));
    emit_manifest(opt.out_path, m);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
    CommonOpts common;
    std::string scenario = "noisy";
    double sigma_y = 0.1;
    double upsilon = 0.0;
    std::string df = "inf";
    double noise_scale = 10.0;
    std::int64_t reps = 100;
    std::int64_t n_max = 1000;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_path;
    int jobs = 1;

    std::vector<ConfigBinding> bindings() {
        auto b = common.bindings();
        b.push_back(bind_value("scenario", scenario));
        b.push_back(bind_value("sigma-y", sigma_y));
        b.push_back(bind_value("upsilon", upsilon));
        b.push_back(bind_value("df", df));
        b.push_back(bind_value("noise-scale", noise_scale));
        b.push_back(bind_value("reps", reps));
        b.push_back(bind_value("n-max", n_max));
        b.push_back(bind_value("out", out_path));
        b.push_back(bind_value("jobs", jobs));
        b.push_back({"seed", [this](const std::string& v) {
                         try {
                             seed = std::stoull(v);
                             seed_given = true;
                         } catch (const std::exception&) {
                             throw ConfigError("config: bad seed: " + v);
                         }
                     }});
        return b;
    }
};

std::vector<MethodSpec> build_methods(const CommonOpts& common) {
    const auto prior = common.make_prior();
    std::vector<MethodSpec> methods;
    for (Flavor f : common.parse_methods()) methods.push_back(MethodSpec{f, prior});
    return methods;
}

void print_summary(const std::vector<MetricRow>& rows, std::int64_t n_last) {
    for (const MetricRow& row : rows) {
        if (row.n != n_last) continue;
        std::cout << row.scenario << " method=" << row.method << " n=" << row.n
                  << " avg_volume=" << format_double(row.avg_volume, 6)
                  << " cum_miscoverage=" << format_double(row.cum_miscoverage, 6) << "\n";
    }
}

int cmd_simulate(const SimulateOpts& opt, const std::string& command) {
    Scenario scenario;
    if (opt.scenario == "noisy")
        scenario.kind = Scenario::Kind::noisy;
    else if (opt.scenario == "biased")
        scenario.kind = Scenario::Kind::biased;
    else if (opt.scenario == "exact")
        scenario.kind = Scenario::Kind::exact_gaussian;
    else
        throw ConfigError("unknown scenario: " + opt.scenario);
    scenario.sigma_y = opt.sigma_y;
    scenario.upsilon = opt.upsilon;
    scenario.dof = parse_dof(opt.df);
    scenario.noise_scale = opt.noise_scale;
    scenario.n_max = opt.n_max;
    scenario.reps = opt.reps;
    scenario.base_seed = resolve_seed(opt.seed_given, opt.seed);
    scenario.validate();
    if (opt.out_path.empty()) throw ConfigError("simulate requires --out FILE");

    const auto methods = build_methods(opt.common);
    if (scenario.kind == Scenario::Kind::exact_gaussian)
        for (const MethodSpec& m : methods)
            if (!m.prior) throw ConfigError("exact scenario requires a prior");

    const CsConfig cfg = opt.common.make_config(true, false);
    const auto rows = run_replications(scenario, methods, cfg, opt.jobs);

    std::ofstream fout(opt.out_path);
    if (!fout) throw DataError("cannot open output file: " + opt.out_path);
    write_metric_csv(fout, rows);

    Manifest m = base_manifest(command);
    m.emplace_back("scenario", scenario.label());
    m.emplace_back("reps", std::to_string(scenario.reps));
    m.emplace_back("n_max", std::to_string(scenario.n_max));
    m.emplace_back("seed", std::to_string(scenario.base_seed));
    m.emplace_back("jobs", std::to_string(opt.jobs));
    m.emplace_back("theta_star", format_double(scenario.theta_star()));
    m.emplace_back("lambda_star", format_double(scenario.lambda_star()));
    opt.common.append_manifest(m, cfg, opt.common.make_prior());
    m.emplace_back("out", opt.out_path);
    emit_manifest(opt.out_path, m);

    print_summary(rows, scenario.n_max);
    return 0;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayOpts {
    CommonOpts common;
    std::string data_path;
    std::string unlabelled_path;
    std::int64_t n_stream = 0;
    std::int64_t reps = 100;
    std::uint64_t seed = 0;
    bool seed_given = false;
    double theta_star = std::numeric_limits<double>::quiet_NaN();
    bool theta_star_given = false;
    std::string out_path;
    int jobs = 1;

    std::vector<ConfigBinding> bindings() {
        auto b = common.bindings();
        b.push_back(bind_value("data", data_path));
        b.push_back(bind_value("unlabelled-data", unlabelled_path));
        b.push_back(bind_value("n", n_stream));
        b.push_back(bind_value("reps", reps));
        b.push_back(bind_value("out", out_path));
        b.push_back(bind_value("jobs", jobs));
        b.push_back({"seed", [this](const std::string& v) {
                         try {
                             seed = std::stoull(v);
                             seed_given = true;
                         } catch (const std::exception&) {
                             throw ConfigError("config: bad seed: " + v);
                         }
                     }});
        b.push_back({"theta-star", [this](const std::string& v) {
                         try {
                             theta_star = std::stod(v);
                             theta_star_given = true;
                         } catch (const std::exception&) {
                             throw ConfigError("config: bad theta-star: " + v);
                         }
                     }});
        return b;
    }
};

int cmd_replay(const ReplayOpts& opt, const std::string& command) {
    if (opt.out_path.empty()) throw ConfigError("replay requires --out FILE");
    ReplayData data = to_replay_data(read_data_file(opt.data_path));
    if (!opt.unlabelled_path.empty()) {
        for (const DataRow& row : read_data_file(opt.unlabelled_path))
            data.pool_predictions.push_back(row.prediction);
    }
    if (opt.theta_star_given) data.theta_star_override = opt.theta_star;

    const auto methods = build_methods(opt.common);
    bool any_assisted = false;
    for (const MethodSpec& m : methods) any_assisted |= m.prior.has_value();
    const CsConfig cfg = opt.common.make_config(false, any_assisted);
    const std::uint64_t seed = resolve_seed(opt.seed_given, opt.seed);

    const auto rows = run_replay(data, opt.n_stream, opt.reps, seed, methods, cfg, opt.jobs);

    std::ofstream fout(opt.out_path);
    if (!fout) throw DataError("cannot open output file: " + opt.out_path);
    write_metric_csv(fout, rows);

    Manifest m = base_manifest(command);
    m.emplace_back("data", opt.data_path);
    if (!opt.unlabelled_path.empty()) m.emplace_back("unlabelled_data", opt.unlabelled_path);
    m.emplace_back("labelled_rows", std::to_string(data.labelled.size()));
    m.emplace_back("pool_rows", std::to_string(data.pool_predictions.size()));
    m.emplace_back("n_stream", std::to_string(opt.n_stream));
    m.emplace_back("reps", std::to_string(opt.reps));
    m.emplace_back("seed", std::to_string(seed));
    m.emplace_back("jobs", std::to_string(opt.jobs));
    m.emplace_back("theta_star", format_double(data.theta_star()));
    m.emplace_back("theta_star_convention",
                   opt.theta_star_given ? "override" : "mean label over the entire file");
    opt.common.append_manifest(m, cfg, opt.common.make_prior());
    m.emplace_back("out", opt.out_path);
    emit_manifest(opt.out_path, m);

    print_summary(rows, opt.n_stream);
    return 0;
}

// ---------------------------------------------------------------------------
// tune

int cmd_tune(std::int64_t t_star, double alpha) {
    std::cout << "rho=" << format_double(rho_opt(t_star, alpha), 12) << "\n"
              << "tau=" << format_double(tau_heuristic(t_star), 12) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anytime-valid prediction-powered confidence sequences"};
    app.set_version_flag("--version", ppics::kVersion);
    app.require_subcommand(1);

    AnalyzeOpts a;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "stream intervals over a label,prediction CSV file");
    analyze->add_option("--data", a.data_path, "input CSV (header label,prediction)")
        ->required();
    analyze->add_option("--out", a.out_path, "output CSV (default: stdout)");
    analyze->add_option("--loss", a.loss, "squared|generic");
    analyze->add_option("--grid", a.grid, "lo:hi:steps grid for generic-loss inversion");
    analyze->add_flag("--assume-infinite-unlabelled", a.assume_infinite,
                      "treat the unlabelled pool as exhaustive (zero-width fit term)");
    analyze->add_flag("--pool-labelled", a.pool_labelled,
                      "labelled predictions also enter the unlabelled pool");
    a.common.add_flags(analyze);

    SimulateOpts s;
    CLI::App* simulate = app.add_subcommand("simulate", "run a synthetic scenario");
    simulate->add_option("--scenario", s.scenario, "noisy|biased|exact");
    simulate->add_option("--sigma-y", s.sigma_y, "noisy: prediction noise level");
    simulate->add_option("--upsilon", s.upsilon, "biased: prediction bias");
    simulate->add_option("--df", s.df, "biased: noise dof (>2 or 'inf')");
    simulate->add_option("--noise-scale", s.noise_scale, "biased: noise scale");
    simulate->add_option("--reps", s.reps, "replications");
    simulate->add_option("--n-max", s.n_max, "largest labelled sample size");
    simulate->add_option("--seed", s.seed, "base seed (generated when absent)");
    simulate->add_option("--out", s.out_path, "metric table CSV")->required();
    simulate->add_option("--jobs", s.jobs, "replication-level parallelism");
    s.common.add_flags(simulate);

    ReplayOpts r;
    CLI::App* replay = app.add_subcommand("replay", "replicate splits of a recorded table");
    replay->add_option("--data", r.data_path, "input CSV (header label,prediction)")
        ->required();
    replay->add_option("--unlabelled-data", r.unlabelled_path,
                       "extra CSV whose predictions join the pool");
    replay->add_option("--n", r.n_stream, "labelled split size (stream length)")->required();
    replay->add_option("--reps", r.reps, "replications");
    replay->add_option("--seed", r.seed, "base seed (generated when absent)");
    replay->add_option("--theta-star", r.theta_star,
                       "override the full-file mean-label ground truth");
    replay->add_option("--out", r.out_path, "metric table CSV")->required();
    replay->add_option("--jobs", r.jobs, "replication-level parallelism");
    r.common.add_flags(replay);

    std::int64_t tune_t_star = 0;
    double tune_alpha = 0.1;
    CLI::App* tune = app.add_subcommand("tune", "print rho and tau for a horizon");
    tune->add_option("--t-star", tune_t_star, "tuning horizon")->required();
    tune->add_option("--alpha", tune_alpha, "miscoverage level in (0,1)");

    try {
        app.parse(argc, argv);
        s.seed_given = simulate->count("--seed") > 0;
        r.seed_given = replay->count("--seed") > 0;
        r.theta_star_given = replay->count("--theta-star") > 0;
        const std::string command = join_command(argc, argv);
        if (*analyze) {
            apply_config_file(analyze, a.common.config_path, a.bindings());
            return cmd_analyze(a, command);
        }
        if (*simulate) {
            apply_config_file(simulate, s.common.config_path, s.bindings());
            return cmd_simulate(s, command);
        }
        if (*replay) {
            apply_config_file(replay, r.common.config_path, r.bindings());
            return cmd_replay(r, command);
        }
        if (*tune) return cmd_tune(tune_t_star, tune_alpha);
        throw ppics::ConfigError("no command given");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ppics::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ppics::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const ppics::InsufficientData& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const ppics::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const ppics::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
