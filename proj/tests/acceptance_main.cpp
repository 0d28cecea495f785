// Acceptance suite: one pass/fail line per criterion, nonzero exit on
// any failure. Criteria 1-5 are Monte Carlo reproductions of the
// reference experimental protocols at desk scale; 6-8 are numerical
// identities; 9 exercises the CLI determinism contract.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ppics/cs_core.hpp"
#include "ppics/data_io.hpp"
#include "ppics/harness.hpp"
#include "ppics/ppi.hpp"
#include "ppics/rng.hpp"
#include "ppics/running_moments.hpp"
#include "reference.hpp"

using namespace ppics;

namespace {

int g_failures = 0;
int g_jobs = 2;
std::string g_cli;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %d. %s  (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::map<std::int64_t, MetricRow> rows_for(const std::vector<MetricRow>& rows,
                                           const std::string& method) {
    std::map<std::int64_t, MetricRow> out;
    for (const auto& row : rows)
        if (row.method == method) out[row.n] = row;
    return out;
}

// --------------------------------------------------------------------------
// 1. Exact confidence sequence for i.i.d. Gaussians with known variance.

void criterion_1() {
    const auto start = Clock::now();
    Scenario sc;
    sc.kind = Scenario::Kind::exact_gaussian;
    sc.n_max = 10000;
    sc.reps = 2000;
    sc.base_seed = 1001;
    CsConfig cfg;
    cfg.alpha = 0.1;
    cfg.start_n = 1;
    cfg.t_star = 500;
    const std::vector<MethodSpec> methods = {{Flavor::classical, Prior::gaussian(0.0, 0.1)}};
    const auto rows = run_replications(sc, methods, cfg, g_jobs);
    const double misc = rows.back().cum_miscoverage;
    const double bound = 0.1 + 2.0 * std::sqrt(0.09 / 2000.0);
    const double secs = seconds_since(start);
    std::ostringstream os;
    os << "cum_miscoverage(1e4)=" << misc << " <= " << bound << ", " << secs << "s";
    report(1, "exact-CS coverage, known sigma, gaussian prior", misc <= bound && secs <= 120.0,
           os.str());
}

// --------------------------------------------------------------------------
// 2+3. Noisy-prediction scenario: time-uniform empirical validity and
// power-tuning adaptivity of the interval volume.

void criteria_2_3() {
    const auto start = Clock::now();
    CsConfig cfg;
    cfg.alpha = 0.1;
    cfg.t_star = 500;
    cfg.start_n = 40;
    const std::vector<MethodSpec> methods = {{Flavor::classical, std::nullopt},
                                             {Flavor::ppi, std::nullopt},
                                             {Flavor::ppi_plus, std::nullopt}};

    bool valid = true;
    double worst = 0.0;
    std::map<double, std::vector<MetricRow>> tables;
    for (double sigma : {0.1, 0.8, 3.0}) {
        Scenario sc;
        sc.kind = Scenario::Kind::noisy;
        sc.sigma_y = sigma;
        sc.n_max = 1000;
        sc.reps = 1000;
        sc.base_seed = 2002;
        tables[sigma] = run_replications(sc, methods, cfg, g_jobs);
        for (const auto& row : tables[sigma]) {
            worst = std::max(worst, row.cum_miscoverage);
            if (row.cum_miscoverage > 0.12) valid = false;
        }
    }
    const double secs = seconds_since(start);
    {
        std::ostringstream os;
        os << "max cum_miscoverage=" << worst << " <= 0.12 over sigma_y {0.1,0.8,3.0}, "
           << secs << "s";
        report(2, "time-uniform validity on noisy predictions", valid && secs <= 600.0,
               os.str());
    }

    const auto strong = tables.at(3.0);
    const double cl3 = rows_for(strong, "classical").at(200).avg_volume;
    const double pp3 = rows_for(strong, "ppi").at(200).avg_volume;
    const double plus3 = rows_for(strong, "ppi++").at(200).avg_volume;
    const auto weak = tables.at(0.1);
    const double cl0 = rows_for(weak, "classical").at(200).avg_volume;
    const double plus0 = rows_for(weak, "ppi++").at(200).avg_volume;
    const bool adapt = plus3 <= 1.05 * cl3 && pp3 >= 1.15 * plus3 && plus0 <= 0.25 * cl0;
    std::ostringstream os;
    os << "sigma=3: ppi++/classical=" << plus3 / cl3 << " (<=1.05), ppi/ppi++="
       << pp3 / plus3 << " (>=1.15); sigma=0.1: ppi++/classical=" << plus0 / cl0
       << " (<=0.25)";
    report(3, "power-tuning adaptivity at n=200", adapt, os.str());
}

// --------------------------------------------------------------------------
// 4. Consistency of the power-tuning coefficient.

void criterion_4() {
    bool pass = true;
    std::ostringstream os;
    for (double sigma : {0.1, 0.8, 3.0}) {
        const double target = 1.0 / (1.0 + sigma * sigma);
        int ok = 0;
        const int reps = 200;
        const std::uint64_t block = static_cast<std::uint64_t>(sigma * 10.0) * 100000;
        for (int rep = 0; rep < reps; ++rep) {
            CounterRng rng(4004, block + static_cast<std::uint64_t>(rep));
            StreamState s;
            for (int k = 0; k < 10000; ++k) {
                const double y = rng.next_normal();
                s.update(Observation::labelled_obs(y, y + sigma * rng.next_normal()));
            }
            if (std::abs(lambda_hat(s) - target) <= 0.05) ++ok;
        }
        os << "sigma=" << sigma << ": " << ok << "/200 within 0.05; ";
        if (ok < 190) pass = false;
    }
    report(4, "lambda_hat consistency at n=1e4", pass, os.str());
}

// --------------------------------------------------------------------------
// 5. Bayes-assistance volume shape across prediction bias levels.

void criterion_5() {
    CsConfig cfg;
    cfg.alpha = 0.1;
    cfg.t_star = 100;
    cfg.start_n = 40;
    const double tau = tau_heuristic(100);
    const std::vector<MethodSpec> methods = {
        {Flavor::ppi_plus, std::nullopt},
        {Flavor::ppi_plus, Prior::gaussian(0.0, tau)},
        {Flavor::ppi_plus, Prior::student_t(0.0, tau, 3.0)},
    };
    std::map<double, std::map<std::string, double>> vol;  // upsilon -> method -> volume
    for (double upsilon : {-5.0, -2.0, 0.0, 2.0, 5.0}) {
        Scenario sc;
        sc.kind = Scenario::Kind::biased;
        sc.upsilon = upsilon;
        sc.n_max = 100;
        sc.reps = 100;
        sc.base_seed = 5005;
        const auto rows = run_replications(sc, methods, cfg, g_jobs);
        for (const auto& row : rows)
            if (row.n == 100) vol[upsilon][row.method] = row.avg_volume;
    }

    const bool aligned_gain = vol[0.0]["ppi++(G)"] < vol[0.0]["ppi++"];
    const bool tails_robust = vol[5.0]["ppi++(G)"] > vol[5.0]["ppi++(T)"] &&
                              vol[-5.0]["ppi++(G)"] > vol[-5.0]["ppi++(T)"];
    // Assisted volume is minimized near upsilon = 0 and grows with |upsilon|.
    bool shaped = true;
    for (const std::string& method : {"ppi++(G)", "ppi++(T)"}) {
        shaped = shaped && vol[0.0][method] < vol[2.0][method] &&
                 vol[2.0][method] < vol[5.0][method] &&
                 vol[0.0][method] < vol[-2.0][method] &&
                 vol[-2.0][method] < vol[-5.0][method];
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& [u, table] : vol) {
        lo = std::min(lo, table.at("ppi++"));
        hi = std::max(hi, table.at("ppi++"));
    }
    const bool flat = hi / lo <= 1.03;
    std::ostringstream os;
    os << "v0(G)=" << vol[0.0]["ppi++(G)"] << " < v0(unassisted)=" << vol[0.0]["ppi++"]
       << "; v5(G)=" << vol[5.0]["ppi++(G)"] << " > v5(T)=" << vol[5.0]["ppi++(T)"]
       << "; assisted volume increasing in |upsilon|: " << (shaped ? "yes" : "NO")
       << "; unassisted spread=" << (hi / lo - 1.0) * 100.0 << "%";
    report(5, "Bayes-assistance volume shape on biased predictions",
           aligned_gain && tails_robust && shaped && flat, os.str());
}

// --------------------------------------------------------------------------
// 6. Gaussian eta closed form vs quadrature; the two Bayes radius routes.

void criterion_6() {
    double worst_eta = 0.0, worst_radius = 0.0;
    const Prior gauss = Prior::gaussian(0.0, 1.0);
    for (std::int64_t t : {1, 10, 1000}) {
        for (double z = -10.0; z <= 10.0001; z += 0.5) {
            const double closed = eta(z, t, gauss);
            const double quad = eta_quadrature(z, t, gauss);
            worst_eta = std::max(worst_eta, std::abs(quad - closed) / closed);
        }
    }
    const double tau = 0.35, mu0 = 0.2;
    const Prior shifted = Prior::gaussian(mu0, tau);
    for (std::int64_t t : {1, 10, 250, 1000}) {
        const double td = static_cast<double>(t);
        for (double z = -10.0; z <= 10.0001; z += 0.5) {
            const double sigma = 2.1;
            const double general = radius_ba(t, z * sigma, sigma, shifted, 0.07);
            const double explicit_form =
                sigma / std::sqrt(td) *
                std::sqrt(std::log((td * tau * tau + 1.0) / (0.07 * 0.07)) +
                          (z - mu0) * (z - mu0) / (tau * tau + 1.0 / td));
            worst_radius =
                std::max(worst_radius, std::abs(general - explicit_form) / explicit_form);
        }
    }
    std::ostringstream os;
    os << "max eta rel err=" << worst_eta << " (<=1e-8), max radius rel err=" << worst_radius
       << " (<=1e-10)";
    report(6, "gaussian eta and Bayes radius route agreement",
           worst_eta <= 1e-8 && worst_radius <= 1e-10, os.str());
}

// --------------------------------------------------------------------------
// 7. Improper-prior reduction and its width against the tuned sequence.

void criterion_7() {
    double worst = 0.0;
    for (std::int64_t t : {1, 10, 100, 1000, 10000, 100000}) {
        for (double alpha : {0.01, 0.1, 0.3}) {
            for (double sigma : {0.5, 1.0, 7.0}) {
                const double direct =
                    sigma / std::sqrt(static_cast<double>(t)) *
                    std::sqrt(std::log(static_cast<double>(t) / (alpha * alpha)));
                const double via_ba = radius_ba(t, 1.7, sigma, Prior::improper(), alpha);
                worst = std::max(worst, std::abs(via_ba - direct) /
                                            std::max(direct, 1e-300));
            }
        }
    }
    bool slightly_wider = true;
    std::ostringstream ratios;
    for (std::int64_t t_star : {100, 500}) {
        const double na = radius_na(t_star, 1.0, rho_opt(t_star, 0.1), 0.1);
        const double improper = radius_ba(t_star, 0.4, 1.0, Prior::improper(), 0.1);
        const double ratio = improper / na;
        ratios << " t*=" << t_star << ": " << ratio;
        if (!(ratio > 1.0 && ratio < 1.3)) slightly_wider = false;
    }
    std::ostringstream os;
    os << "max reduction rel err=" << worst << " (<=1e-12); improper/tuned" << ratios.str()
       << " (in (1,1.3))";
    report(7, "improper-prior reduction and width comparison", worst <= 1e-12 && slightly_wider,
           os.str());
}

// --------------------------------------------------------------------------
// 8. Streaming estimators vs brute-force recomputation; closed-form vs
// grid inversion.

void criterion_8() {
    CounterRng rng(8008, 0);
    double worst = 0.0;
    auto track = [&worst](double a, double b, double scale) {
        worst = std::max(worst, std::abs(a - b) / std::max(scale, 1e-12));
    };
    CsConfig cfg;
    cfg.alpha = 0.1;
    cfg.delta = 0.01;
    cfg.t_star = 500;

    for (int stream = 0; stream < 1000; ++stream) {
        const int n = 3 + static_cast<int>(rng.next_uniform() * 117);
        const int pool = n + static_cast<int>(rng.next_uniform() * 150);
        const double shift = 4.0 * rng.next_normal();
        const double noise = 0.2 + 2.0 * rng.next_uniform();
        std::vector<std::pair<double, double>> lab;
        std::vector<double> po;
        StreamState s;
        for (int k = 0; k < n; ++k) {
            const double y = shift + 3.0 * rng.next_normal();
            const double f = y + noise * rng.next_normal();
            lab.emplace_back(y, f);
            s.update(Observation::labelled_obs(y, f));
        }
        for (int k = 0; k < pool; ++k) {
            const double f = shift + 3.0 * rng.next_normal();
            po.push_back(f);
            s.update(Observation::unlabelled_obs(f));
        }
        const auto b = reference::batch_moments(lab, po);
        track(s.s_yy(), b.s_yy, b.s_yy);
        track(s.s_ff(), b.s_ff, b.s_ff);
        track(s.s_yf(), b.s_yf, std::sqrt(b.s_yy * b.s_ff));
        track(s.s_ftft(), b.s_ftft, b.s_ftft);

        const double lam = b.s_yf / b.s_ff;
        track(lambda_hat(s), lam, std::abs(lam) + 1.0);

        const double nd = n, Nd = pool;
        const double resid = b.s_yy - 2.0 * lam * b.s_yf + lam * lam * b.s_ff;
        if (n >= 3) {
            const double cv_ref = (b.s_yy - 2.0 * b.s_yf + b.s_ff) / (nd - 2.0) +
                                  nd / (Nd * (Nd - 1.0)) * b.s_ftft;
            track(var_estimator(s, 1.0, VarFlavor::cv), cv_ref, cv_ref);
            const double r = nd / Nd;
            const double cvp_ref =
                (1.0 - r) / (nd - 2.0) * resid + r / (nd - 1.0) * b.s_yy;
            track(var_estimator(s, 0.0, VarFlavor::cv_plus), cvp_ref, cvp_ref);

            const double tpp = b.mean_y - (b.mean_f - b.mean_ftilde);
            track(theta_hat(s, Flavor::ppi, cfg), tpp, std::abs(tpp) + 1.0);
            const double tplus = b.mean_y - lam * (b.mean_f - b.mean_ftilde);
            track(theta_hat(s, Flavor::ppi_plus, cfg), tplus, std::abs(tplus) + 1.0);
        }
    }
    const bool stream_ok = worst <= 1e-10;

    // Closed-form inversion vs grid inversion within one grid step.
    bool grid_ok = true;
    const auto generic = LossModel::generic(
        [](double th, std::span<const double>, double y) { return th - y; });
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        CounterRng grng(9009, seed);
        StreamState::Options opts;
        opts.buffered = true;
        StreamState s(opts);
        for (int k = 0; k < 150; ++k) {
            const double y = 0.7 + grng.next_normal();
            s.update(Observation::labelled_obs(y, y + 0.6 * grng.next_normal()));
        }
        for (int k = 0; k < 300; ++k)
            s.update(Observation::unlabelled_obs(0.7 + 1.166 * grng.next_normal()));
        for (Flavor flavor : {Flavor::classical, Flavor::ppi, Flavor::ppi_plus}) {
            const Interval closed = invert_interval(s, flavor, cfg, false);
            GridSpec grid;
            const double sd = std::sqrt(s.var_y());
            grid.lo = closed.center - 5.0 * sd;
            grid.hi = closed.center + 5.0 * sd;
            grid.steps = 10000;
            const GridRegion region = invert_grid(s, generic, flavor, cfg, false, grid);
            if (region.segments.size() != 1 ||
                std::abs(region.segments[0].first - closed.lower()) > 1.5 * region.grid_step ||
                std::abs(region.segments[0].second - closed.upper()) > 1.5 * region.grid_step)
                grid_ok = false;
        }
    }
    std::ostringstream os;
    os << "max streaming-vs-batch rel err=" << worst
       << " (<=1e-10) over 1000 streams; grid inversion within one step: "
       << (grid_ok ? "yes" : "no");
    report(8, "oracle equivalence of streaming and closed forms", stream_ok && grid_ok,
           os.str());
}

// --------------------------------------------------------------------------
// 9. CLI determinism across --jobs.

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) return "<missing:" + path + ">";
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void criterion_9() {
    if (g_cli.empty()) {
        report(9, "CLI determinism across --jobs", false, "no --cli path given");
        return;
    }
    const std::string base =
        g_cli +
        " simulate --scenario noisy --sigma-y 0.8 --reps 40 --n-max 200 --seed 31415"
        " --method classical,ppi,ppi++ --t-star 500";
    const std::string out1 = "/tmp/ppics_acc_j1.csv";
    const std::string out2 = "/tmp/ppics_acc_j7.csv";
    const int rc1 = std::system((base + " --jobs 1 --out " + out1 + " >/dev/null").c_str());
    const int rc2 = std::system((base + " --jobs 7 --out " + out2 + " >/dev/null").c_str());
    const std::string t1 = slurp(out1), t2 = slurp(out2);
    const bool pass = rc1 == 0 && rc2 == 0 && !t1.empty() && t1 == t2;
    std::ostringstream os;
    os << "tables " << (t1 == t2 ? "byte-identical" : "DIFFER") << " (" << t1.size()
       << " bytes)";
    report(9, "CLI determinism across --jobs", pass, os.str());
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--cli") g_cli = argv[i + 1];
    g_jobs = std::max(2u, std::thread::hardware_concurrency());

    const auto start = Clock::now();
    criterion_1();
    criteria_2_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%d/9 criteria passed in %.1fs\n", 9 - g_failures, seconds_since(start));
    return g_failures == 0 ? 0 : 1;
}
