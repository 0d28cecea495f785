#include "ppics/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "ppics/errors.hpp"
#include "ppics/loss.hpp"

namespace ppics {

namespace {

constexpr std::int64_t kNoMiss = std::numeric_limits<std::int64_t>::max();

// Per-replication evaluation trace: interval widths per n (NaN when the
// interval is not defined yet) and the first n at which theta* escaped.
struct RepTrace {
    std::vector<std::vector<double>> widths;     // [method][n - start_n]
    std::vector<std::int64_t> first_miss;        // [method]
};

struct EvalContext {
    const std::vector<MethodSpec>* methods;
    CsConfig cfg;
    double theta_star;
    std::int64_t start_n;
    std::int64_t n_max;
};

void eval_methods_at(const StreamState& state, const EvalContext& ctx, double known_sigma,
                     bool exact_mode, std::int64_t n, RepTrace& trace) {
    const std::size_t row = static_cast<std::size_t>(n - ctx.start_n);
    for (std::size_t mi = 0; mi < ctx.methods->size(); ++mi) {
        const MethodSpec& spec = (*ctx.methods)[mi];
        CsConfig cfg = ctx.cfg;
        cfg.prior = spec.prior;
        try {
            Interval iv;
            if (exact_mode) {
                if (!spec.prior) throw ConfigError("exact mode requires a prior");
                iv.center = state.mean_y();
                iv.radius =
                    radius_ba(n, state.mean_y(), known_sigma, *spec.prior, cfg.alpha);
            } else {
                iv = invert_interval(state, spec.flavor, cfg, spec.prior.has_value());
            }
            trace.widths[mi][row] = 2.0 * iv.radius;
            if (!iv.contains(ctx.theta_star) && trace.first_miss[mi] == kNoMiss)
                trace.first_miss[mi] = n;
        } catch (const InsufficientData&) {
            // interval not defined at this n; leave the width as NaN
        } catch (const InvalidRatio&) {
            // pool too small for this flavor at this n
        }
    }
}

RepTrace run_one_rep(const Scenario& scenario, const EvalContext& ctx, std::int64_t rep) {
    RepTrace trace;
    const std::size_t span = static_cast<std::size_t>(ctx.n_max - ctx.start_n + 1);
    trace.widths.assign(ctx.methods->size(),
                        std::vector<double>(span, std::numeric_limits<double>::quiet_NaN()));
    trace.first_miss.assign(ctx.methods->size(), kNoMiss);

    CounterRng rng(scenario.base_seed, static_cast<std::uint64_t>(rep));
    StreamState state;
    const bool exact = scenario.kind == Scenario::Kind::exact_gaussian;
    for (std::int64_t n = 1; n <= ctx.n_max; ++n) {
        const auto [y, f] = scenario.draw(rng);
        state.update(Observation::labelled_obs(y, f));
        if (n >= ctx.start_n) eval_methods_at(state, ctx, 1.0, exact, n, trace);
    }
    return trace;
}

RepTrace run_one_replay_rep(const ReplayData& data, const EvalContext& ctx,
                            std::uint64_t base_seed, std::int64_t n_stream,
                            std::int64_t rep) {
    RepTrace trace;
    const std::size_t span = static_cast<std::size_t>(ctx.n_max - ctx.start_n + 1);
    trace.widths.assign(ctx.methods->size(),
                        std::vector<double>(span, std::numeric_limits<double>::quiet_NaN()));
    trace.first_miss.assign(ctx.methods->size(), kNoMiss);

    CounterRng rng(base_seed, static_cast<std::uint64_t>(rep));

    // Fisher-Yates over the labelled rows with the replication's stream.
    std::vector<std::uint32_t> idx(data.labelled.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
        std::swap(idx[i - 1], idx[j]);
    }

    StreamState state;
    for (std::size_t i = static_cast<std::size_t>(n_stream); i < idx.size(); ++i)
        state.update(Observation::unlabelled_obs(data.labelled[idx[i]].second));
    for (double f : data.pool_predictions) state.update(Observation::unlabelled_obs(f));

    for (std::int64_t n = 1; n <= n_stream; ++n) {
        const auto& [y, f] = data.labelled[idx[static_cast<std::size_t>(n - 1)]];
        state.update(Observation::labelled_obs(y, f));
        if (n >= ctx.start_n) eval_methods_at(state, ctx, 0.0, false, n, trace);
    }
    return trace;
}

template <typename RepFn>
std::vector<MetricRow> aggregate(const std::string& scenario_label,
                                 const std::vector<MethodSpec>& methods,
                                 const EvalContext& ctx, std::int64_t reps, int jobs,
                                 RepFn&& run_rep) {
    const std::size_t span = static_cast<std::size_t>(ctx.n_max - ctx.start_n + 1);
    const std::size_t n_methods = methods.size();

    std::vector<std::vector<double>> width_sum(n_methods, std::vector<double>(span, 0.0));
    std::vector<std::vector<std::int64_t>> width_count(n_methods,
                                                       std::vector<std::int64_t>(span, 0));
    std::vector<std::vector<std::int64_t>> miss_at(n_methods,
                                                   std::vector<std::int64_t>(span, 0));

    jobs = std::max(jobs, 1);
    const std::int64_t block = std::max<std::int64_t>(jobs * 4L, 8);
    std::vector<RepTrace> slots(static_cast<std::size_t>(block));

    for (std::int64_t lo = 0; lo < reps; lo += block) {
        const std::int64_t hi = std::min(lo + block, reps);
        std::atomic<std::int64_t> cursor{lo};
        std::exception_ptr failure;
        std::mutex failure_mu;
        auto worker = [&] {
            for (;;) {
                const std::int64_t r = cursor.fetch_add(1);
                if (r >= hi) break;
                try {
                    slots[static_cast<std::size_t>(r - lo)] = run_rep(r);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                    cursor.store(hi);
                    break;
                }
            }
        };
        if (jobs == 1 || hi - lo == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            const int k = static_cast<int>(std::min<std::int64_t>(jobs, hi - lo));
            pool.reserve(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) pool.emplace_back(worker);
            for (auto& th : pool) th.join();
        }
        if (failure) std::rethrow_exception(failure);
        // Fold the block in replication order so sums never depend on the
        // thread schedule.
        for (std::int64_t r = lo; r < hi; ++r) {
            const RepTrace& trace = slots[static_cast<std::size_t>(r - lo)];
            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                for (std::size_t j = 0; j < span; ++j) {
                    const double w = trace.widths[mi][j];
                    if (!std::isnan(w)) {
                        width_sum[mi][j] += w;
                        ++width_count[mi][j];
                    }
                }
                if (trace.first_miss[mi] != kNoMiss) {
                    const std::size_t j0 =
                        static_cast<std::size_t>(trace.first_miss[mi] - ctx.start_n);
                    for (std::size_t j = j0; j < span; ++j) ++miss_at[mi][j];
                }
            }
        }
    }

    std::vector<MetricRow> rows;
    rows.reserve(n_methods * span);
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
        for (std::size_t j = 0; j < span; ++j) {
            MetricRow row;
            row.scenario = scenario_label;
            row.method = methods[mi].label();
            row.n = ctx.start_n + static_cast<std::int64_t>(j);
            row.avg_volume = width_count[mi][j] > 0
                                 ? width_sum[mi][j] / static_cast<double>(width_count[mi][j])
                                 : std::numeric_limits<double>::quiet_NaN();
            row.cum_miscoverage =
                static_cast<double>(miss_at[mi][j]) / static_cast<double>(reps);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace

void Scenario::validate() const {
    if (n_max < 1) throw ConfigError("scenario: n_max must be positive");
    if (reps < 1) throw ConfigError("scenario: reps must be >= 1");
    if (kind == Kind::noisy && !(sigma_y >= 0.0))
        throw ConfigError("scenario: sigma_y must be >= 0");
    if (kind == Kind::biased) {
        if (!(dof > 2.0))
            throw ConfigError("scenario: biased noise needs dof > 2 (finite variance)");
        if (!(noise_scale > 0.0)) throw ConfigError("scenario: noise scale must be > 0");
    }
}

double Scenario::population_mean_f() const {
    return kind == Kind::biased ? upsilon : 0.0;
}

double Scenario::lambda_star() const {
    if (kind == Kind::noisy) return 1.0 / (1.0 + sigma_y * sigma_y);
    return 1.0;
}

std::string Scenario::label() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::noisy:
            os << "noisy(sigma_y=" << sigma_y << ")";
            break;
        case Kind::biased:
            os << "biased(upsilon=" << upsilon << ";df=";
            if (std::isinf(dof))
                os << "inf";
            else
                os << dof;
            os << ")";
            break;
        case Kind::exact_gaussian:
            os << "exact";
            break;
    }
    return os.str();
}

std::pair<double, double> Scenario::draw(CounterRng& rng) const {
    switch (kind) {
        case Kind::noisy: {
            const double y = rng.next_normal();
            const double f = y + sigma_y * rng.next_normal();
            return {y, f};
        }
        case Kind::biased: {
            const double x = rng.next_normal();
            const double eps = std::isinf(dof) ? noise_scale * rng.next_normal()
                                               : noise_scale * rng.next_student_t(dof);
            return {x + eps, x + upsilon};
        }
        case Kind::exact_gaussian: {
            const double y = rng.next_normal();
            return {y, y};
        }
    }
    throw ConfigError("unknown scenario kind");
}

std::string MethodSpec::label() const {
    std::string base = flavor_name(flavor);
    if (prior) {
        base += '(';
        base += prior->tag();
        base += ')';
    }
    return base;
}

std::vector<MetricRow> run_replications(const Scenario& scenario,
                                        const std::vector<MethodSpec>& methods,
                                        const CsConfig& cfg, int jobs) {
    scenario.validate();
    cfg.validate();
    if (methods.empty()) throw ConfigError("run_replications: no methods given");
    if (scenario.n_max < cfg.start_n)
        throw ConfigError("run_replications: n_max must be >= start_n");

    EvalContext ctx;
    ctx.methods = &methods;
    ctx.cfg = cfg;
    ctx.cfg.rho = cfg.resolved_rho();
    ctx.cfg.assume_infinite_unlabelled = true;
    ctx.cfg.population_mean_f = scenario.population_mean_f();
    ctx.theta_star = scenario.theta_star();
    ctx.start_n = cfg.start_n;
    ctx.n_max = scenario.n_max;

    return aggregate(scenario.label(), methods, ctx, scenario.reps, jobs,
                     [&](std::int64_t rep) { return run_one_rep(scenario, ctx, rep); });
}

double ReplayData::theta_star() const {
    if (theta_star_override) return *theta_star_override;
    if (labelled.empty()) throw ConfigError("replay: no labelled rows");
    double mean = 0.0;
    std::int64_t k = 0;
    for (const auto& [y, f] : labelled) mean += (y - mean) / static_cast<double>(++k);
    return mean;
}

std::vector<MetricRow> run_replay(const ReplayData& data, std::int64_t n_stream,
                                  std::int64_t reps, std::uint64_t base_seed,
                                  const std::vector<MethodSpec>& methods,
                                  const CsConfig& cfg, int jobs) {
    cfg.validate();
    if (methods.empty()) throw ConfigError("run_replay: no methods given");
    if (n_stream < 1) throw ConfigError("run_replay: labelled split size must be positive");
    if (static_cast<std::size_t>(n_stream) > data.labelled.size())
        throw ConfigError("run_replay: labelled split exceeds available labelled rows");
    if (n_stream < cfg.start_n)
        throw ConfigError("run_replay: labelled split must reach start_n");
    if (reps < 1) throw ConfigError("run_replay: reps must be >= 1");
    for (const MethodSpec& m : methods)
        if (m.prior && m.flavor != Flavor::classical && !(cfg.delta > 0.0))
            throw ConfigError(
                "run_replay: assisted methods on a finite pool need delta > 0");

    EvalContext ctx;
    ctx.methods = &methods;
    ctx.cfg = cfg;
    ctx.cfg.rho = cfg.resolved_rho();
    ctx.theta_star = data.theta_star();
    ctx.start_n = cfg.start_n;
    ctx.n_max = n_stream;

    std::ostringstream label;
    label << "replay(n=" << n_stream << ")";
    return aggregate(label.str(), methods, ctx, reps, jobs, [&](std::int64_t rep) {
        return run_one_replay_rep(data, ctx, base_seed, n_stream, rep);
    });
}

}  // namespace ppics
