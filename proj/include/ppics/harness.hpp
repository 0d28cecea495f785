#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ppics/cs_core.hpp"
#include "ppics/ppi.hpp"
#include "ppics/prior.hpp"
#include "ppics/rng.hpp"
#include "ppics/running_moments.hpp"

namespace ppics {

// Synthetic stream definitions. `noisy` draws Y ~ N(0,1) and predicts
// f = Y + noise(sigma_y); `biased` draws X ~ N(0,1), Y = X + eps with eps
// Student-t(dof, scale) and predicts f = X + upsilon; `exact_gaussian`
// streams plain N(0,1) labels for the known-variance sanity sequence.
// Synthetic pools are infinite: the population mean of f is known.
struct Scenario {
    enum class Kind { noisy, biased, exact_gaussian };

    Kind kind = Kind::noisy;
    double sigma_y = 0.1;
    double upsilon = 0.0;
    double dof = std::numeric_limits<double>::infinity();
    double noise_scale = 10.0;
    std::int64_t n_max = 1000;
    std::int64_t reps = 100;
    std::uint64_t base_seed = 0;

    void validate() const;

    double theta_star() const { return 0.0; }
    double population_mean_f() const;
    double lambda_star() const;
    std::string label() const;

    // Draws the k-th labelled pair from the replication stream.
    std::pair<double, double> draw(CounterRng& rng) const;  // (y, f)
};

// One confidence-sequence procedure to evaluate: an estimator flavor,
// optionally Bayes-assisted by a prior.
struct MethodSpec {
    Flavor flavor = Flavor::classical;
    std::optional<Prior> prior;

    std::string label() const;
};

struct MetricRow {
    std::string scenario;
    std::string method;
    std::int64_t n = 0;
    double avg_volume = 0.0;
    double cum_miscoverage = 0.0;
};

// Runs `scenario.reps` independent replications, evaluating every method
// at each n in [cfg.start_n, scenario.n_max]. A replication counts as
// miscovered at n when theta* fell outside the interval at any
// n' in [start_n, n]; undefined intervals (too-early n) are skipped and
// never counted. Aggregation runs in replication-index order, so results
// are bit-identical for every `jobs` value.
std::vector<MetricRow> run_replications(const Scenario& scenario,
                                        const std::vector<MethodSpec>& methods,
                                        const CsConfig& cfg, int jobs = 1);

// Replay of a recorded label/prediction table. Each replication shuffles
// the labelled rows with its own seed, streams the first `n_stream` of
// them as the labelled sequence, and places the remainder (plus any
// unlabelled rows) in the pool up front. theta* defaults to the mean
// label over the entire file.
struct ReplayData {
    std::vector<std::pair<double, double>> labelled;  // (y, f)
    std::vector<double> pool_predictions;             // rows with empty labels
    std::optional<double> theta_star_override;

    double theta_star() const;
};

std::vector<MetricRow> run_replay(const ReplayData& data, std::int64_t n_stream,
                                  std::int64_t reps, std::uint64_t base_seed,
                                  const std::vector<MethodSpec>& methods,
                                  const CsConfig& cfg, int jobs = 1);

}  // namespace ppics
