#include "ppics/ppi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppics/errors.hpp"

namespace ppics {

namespace {

// Co-moments of the subgradient pairs U = l'(theta, x, f(x)),
// V = l'(theta, x, y) on labelled data and Ut on the unlabelled pool.
// For the squared loss these are theta-shifts of the stream's own
// co-moments; for generic losses they are recomputed from the buffer.
struct ThetaMoments {
    std::int64_t n = 0;
    std::int64_t N = 0;
    double mean_u = 0.0, mean_v = 0.0, mean_ut = 0.0;
    double s_vv = 0.0, s_uu = 0.0, s_uv = 0.0, s_utut = 0.0;
    bool infinite_pool = false;
    bool have_pool_mean = false;

    // Nonnegative by construction; clamp the cancellation error that
    // perfect correlation leaves behind.
    double residual(double lambda) const {
        return std::max(0.0, s_vv - 2.0 * lambda * s_uv + lambda * lambda * s_uu);
    }
    double ratio() const {
        return infinite_pool ? 0.0 : static_cast<double>(n) / static_cast<double>(N);
    }
};

ThetaMoments moments_at(const StreamState& state, double theta, const LossModel& loss,
                        const CsConfig& cfg) {
    ThetaMoments m;
    m.infinite_pool = cfg.assume_infinite_unlabelled;
    if (loss.is_squared()) {
        m.n = state.n();
        m.N = state.unlabelled_n();
        if (m.n >= 1) {
            m.mean_u = theta - state.mean_f();
            m.mean_v = theta - state.mean_y();
        }
        m.s_vv = state.s_yy();
        m.s_uu = state.s_ff();
        m.s_uv = state.s_yf();
        m.s_utut = state.s_ftft();
        if (m.infinite_pool && cfg.population_mean_f) {
            m.mean_ut = theta - *cfg.population_mean_f;
            m.have_pool_mean = true;
        } else if (m.N >= 1) {
            m.mean_ut = theta - state.mean_ftilde();
            m.have_pool_mean = true;
        }
        return m;
    }

    if (!state.buffered())
        throw ConfigError("generic loss requires a buffered stream state");
    for (const Observation& obs : state.buffer()) {
        const std::span<const double> cov(obs.covariates);
        const double u = loss.subgradient(theta, cov, obs.prediction);
        if (obs.label) {
            const double v = loss.subgradient(theta, cov, *obs.label);
            ++m.n;
            const double du = u - m.mean_u;
            const double dv = v - m.mean_v;
            m.mean_u += du / static_cast<double>(m.n);
            m.mean_v += dv / static_cast<double>(m.n);
            const double du2 = u - m.mean_u;
            const double dv2 = v - m.mean_v;
            m.s_uu += du * du2;
            m.s_vv += dv * dv2;
            m.s_uv += dv * du2;
            if (!state.pools_labelled_predictions()) continue;
        }
        ++m.N;
        const double d = u - m.mean_ut;
        m.mean_ut += d / static_cast<double>(m.N);
        m.s_utut += d * (u - m.mean_ut);
    }
    m.have_pool_mean = m.N >= 1;
    return m;
}

// Power-tuning coefficient with the degenerate-predictor fallback to 0.
std::pair<double, bool> resolve_lambda(const ThetaMoments& m) {
    if (m.n < 2) throw InsufficientData("lambda_hat: need n >= 2");
    if (m.s_uu <= 0.0) return {0.0, true};
    return {m.s_uv / m.s_uu, false};
}

double m_hat_value(const ThetaMoments& m) {
    if (!m.have_pool_mean)
        throw InsufficientData("m_hat: empty unlabelled pool and no population mean");
    return m.mean_ut;
}

double delta_hat_value(const ThetaMoments& m, Flavor flavor, bool* fallback) {
    if (flavor == Flavor::classical)
        throw ConfigError("delta_hat: classical flavor has no rectifier");
    if (m.n < 1) throw InsufficientData("delta_hat: need n >= 1");
    const double dpp = m.mean_v - m.mean_u;
    if (flavor == Flavor::ppi) return dpp;
    const auto [lam, fb] = resolve_lambda(m);
    if (fallback) *fallback = fb;
    return dpp - (lam - 1.0) * (m.mean_u - m_hat_value(m));
}

// Scale estimates feeding the radii. r = n/N (0 for an infinite pool).
double sigma2_g_unassisted(const ThetaMoments& m, Flavor flavor, bool* fallback) {
    const double nd = static_cast<double>(m.n);
    if (m.n < 3) throw InsufficientData("cs_g: need n >= 3");
    switch (flavor) {
        case Flavor::classical:
            return m.s_vv / (nd - 1.0);
        case Flavor::ppi: {
            double tail = 0.0;
            if (!m.infinite_pool) {
                if (m.N < 2) throw InsufficientData("cs_g(ppi): need N >= 2");
                const double Nd = static_cast<double>(m.N);
                tail = nd / (Nd * (Nd - 1.0)) * m.s_utut;
            }
            return m.residual(1.0) / (nd - 2.0) + tail;
        }
        case Flavor::ppi_plus: {
            if (!m.infinite_pool && m.N < m.n)
                throw InvalidRatio("cs_g(ppi++): requires N >= n");
            const auto [lam, fb] = resolve_lambda(m);
            if (fallback) *fallback = fb;
            const double r = m.ratio();
            return (1.0 - r) / (nd - 2.0) * m.residual(lam) + r / (nd - 1.0) * m.s_vv;
        }
    }
    throw ConfigError("unknown flavor");
}

double sigma2_delta(const ThetaMoments& m, Flavor flavor, bool* fallback) {
    const double nd = static_cast<double>(m.n);
    if (m.n < 3) throw InsufficientData("cs_g: need n >= 3");
    // Centered sum of V - U, clamped like residual().
    const double s_dd = std::max(0.0, m.s_vv - 2.0 * m.s_uv + m.s_uu);
    switch (flavor) {
        case Flavor::classical:
            throw ConfigError("cs_g: classical flavor has no rectifier sequence");
        case Flavor::ppi:
            return s_dd / (nd - 1.0);
        case Flavor::ppi_plus: {
            if (!m.infinite_pool && m.N < m.n)
                throw InvalidRatio("cs_g(ppi++): requires N >= n");
            const auto [lam, fb] = resolve_lambda(m);
            if (fallback) *fallback = fb;
            const double r = m.ratio();
            return (1.0 - r) / (nd - 2.0) * m.residual(lam) + r / (nd - 1.0) * s_dd;
        }
    }
    throw ConfigError("unknown flavor");
}

GCs cs_g_impl(const ThetaMoments& m, Flavor flavor, const CsConfig& cfg, bool assisted) {
    cfg.validate();
    if (m.n < 3) throw InsufficientData("cs_g: need n >= 3");
    GCs out;

    if (flavor == Flavor::classical) {
        out.g_hat = m.mean_v;
    } else {
        out.g_hat = m_hat_value(m) + delta_hat_value(m, flavor, &out.lambda_fallback);
    }

    if (!assisted) {
        const double sigma_g =
            std::sqrt(sigma2_g_unassisted(m, flavor, &out.lambda_fallback));
        out.sigma_delta = sigma_g;
        out.radius = radius_na(m.n, sigma_g, cfg.resolved_rho(), cfg.alpha);
        return out;
    }

    if (!cfg.prior) throw ConfigError("cs_g: assisted interval requires a prior");
    if (flavor == Flavor::classical)
        throw ConfigError(
            "cs_g: classical flavor has no rectifier; use invert_interval for the "
            "Bayes-assisted mean sequence");

    // Rectifier term at budget kappa, measure-of-fit term at delta.
    const bool no_fit_term = cfg.assume_infinite_unlabelled;
    const double kappa = no_fit_term ? cfg.alpha : cfg.kappa();
    const double center = delta_hat_value(m, flavor, nullptr);
    out.sigma_delta = std::sqrt(sigma2_delta(m, flavor, &out.lambda_fallback));
    double radius_delta;
    if (out.sigma_delta == 0.0) {
        radius_delta = 0.0;  // exactly constant rectifier data
    } else {
        radius_delta = radius_ba(m.n, center, out.sigma_delta, *cfg.prior, kappa);
    }

    double radius_m = 0.0;
    if (!no_fit_term) {
        if (!(cfg.delta > 0.0))
            throw ConfigError("cs_g: assisted finite-pool interval requires delta > 0");
        if (m.N < 2) throw InsufficientData("cs_g: measure-of-fit term needs N >= 2");
        out.sigma_f = std::sqrt(m.s_utut / (static_cast<double>(m.N) - 1.0));
        radius_m = radius_na(m.N, out.sigma_f, rho_opt(m.N, cfg.delta), cfg.delta);
    }

    out.radius = radius_delta + radius_m;
    out.components = std::make_pair(radius_delta, radius_m);
    return out;
}

}  // namespace

std::string flavor_name(Flavor f) {
    switch (f) {
        case Flavor::classical: return "classical";
        case Flavor::ppi: return "ppi";
        case Flavor::ppi_plus: return "ppi++";
    }
    return "?";
}

Flavor parse_flavor(const std::string& name) {
    if (name == "classical") return Flavor::classical;
    if (name == "ppi") return Flavor::ppi;
    if (name == "ppi++" || name == "ppi_plus" || name == "ppiplus") return Flavor::ppi_plus;
    throw ConfigError("unknown method: " + name);
}

double m_hat(const StreamState& state, double theta, const LossModel& loss,
             const CsConfig& cfg) {
    return m_hat_value(moments_at(state, theta, loss, cfg));
}

double delta_hat(const StreamState& state, double theta, const LossModel& loss,
                 Flavor flavor, const CsConfig& cfg) {
    return delta_hat_value(moments_at(state, theta, loss, cfg), flavor, nullptr);
}

double theta_hat(const StreamState& state, Flavor flavor, const CsConfig& cfg) {
    if (flavor == Flavor::classical) return state.mean_y();
    const ThetaMoments m = moments_at(state, 0.0, LossModel::squared(), cfg);
    const double pool_mean = -m_hat_value(m);  // population (or pool) mean of f
    if (flavor == Flavor::ppi) return state.mean_y() - (state.mean_f() - pool_mean);
    const double lam = resolve_lambda(m).first;
    return state.mean_y() - lam * (state.mean_f() - pool_mean);
}

GCs cs_g(const StreamState& state, double theta, const LossModel& loss, Flavor flavor,
         const CsConfig& cfg, bool assisted) {
    return cs_g_impl(moments_at(state, theta, loss, cfg), flavor, cfg, assisted);
}

Interval invert_interval(const StreamState& state, Flavor flavor, const CsConfig& cfg,
                         bool assisted) {
    Interval iv;
    iv.level = 1.0 - cfg.alpha;
    iv.t = state.n();
    iv.center = theta_hat(state, flavor, cfg);
    if (assisted && flavor == Flavor::classical) {
        // Bayes-assisted sequence for the mean itself: the prior sits on
        // the standardized mean of the labels, no rectifier split.
        cfg.validate();
        if (!cfg.prior) throw ConfigError("invert_interval: assisted requires a prior");
        if (state.n() < 3) throw InsufficientData("invert_interval: need n >= 3");
        const double sd = std::sqrt(state.var_y());
        iv.radius = sd == 0.0
                        ? 0.0
                        : radius_ba(state.n(), state.mean_y(), sd, *cfg.prior, cfg.alpha);
        return iv;
    }
    iv.radius = cs_g(state, 0.0, LossModel::squared(), flavor, cfg, assisted).radius;
    return iv;
}

double classical_estimate(const StreamState& state, const LossModel& loss) {
    if (loss.is_squared()) return state.mean_y();
    if (!state.buffered())
        throw ConfigError("classical_estimate: generic loss requires buffered mode");
    if (state.n() < 1) throw InsufficientData("classical_estimate: no labelled data");

    const auto mean_subgrad = [&](double theta) {
        double mean = 0.0;
        std::int64_t k = 0;
        for (const Observation& obs : state.buffer()) {
            if (!obs.label) continue;
            const std::span<const double> cov(obs.covariates);
            mean += (loss.subgradient(theta, cov, *obs.label) - mean) / static_cast<double>(++k);
        }
        return mean;
    };

    // The subgradient of a convex loss is non-decreasing in theta, so an
    // expanding bracket plus bisection finds the root.
    double lo = -1.0, hi = 1.0;
    int expansions = 0;
    while (mean_subgrad(lo) > 0.0) {
        lo *= 2.0;
        if (++expansions > 200) throw NumericalError("classical_estimate: no lower bracket");
    }
    expansions = 0;
    while (mean_subgrad(hi) < 0.0) {
        hi *= 2.0;
        if (++expansions > 200) throw NumericalError("classical_estimate: no upper bracket");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (mean_subgrad(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

GridRegion invert_grid(const StreamState& state, const LossModel& loss, Flavor flavor,
                       const CsConfig& cfg, bool assisted, std::optional<GridSpec> grid) {
    if (!loss.is_squared() && !state.buffered())
        throw ConfigError("invert_grid: generic loss requires buffered mode");

    GridSpec g;
    if (grid) {
        g = *grid;
    } else {
        const double center = classical_estimate(state, loss);
        double se;
        if (loss.is_squared()) {
            se = std::sqrt(state.var_y() / static_cast<double>(state.n()));
        } else {
            double mean = 0.0, ss = 0.0;
            std::int64_t k = 0;
            for (const Observation& obs : state.buffer()) {
                if (!obs.label) continue;
                const std::span<const double> cov(obs.covariates);
                const double v = loss.subgradient(center, cov, *obs.label);
                ++k;
                const double d = v - mean;
                mean += d / static_cast<double>(k);
                ss += d * (v - mean);
            }
            if (k < 2) throw InsufficientData("invert_grid: need n >= 2 for a default grid");
            se = std::sqrt(ss / static_cast<double>(k - 1) / static_cast<double>(k));
        }
        g.lo = center - 8.0 * se;
        g.hi = center + 8.0 * se;
        g.steps = 2001;
    }
    if (!(g.hi > g.lo) || g.steps < 2) throw ConfigError("invert_grid: bad grid");

    GridRegion region;
    region.grid_step = (g.hi - g.lo) / static_cast<double>(g.steps - 1);
    bool in_run = false;
    double run_start = 0.0, last_theta = 0.0;
    for (std::int64_t i = 0; i < g.steps; ++i) {
        const double theta =
            g.lo + region.grid_step * static_cast<double>(i);
        const bool inside = cs_g(state, theta, loss, flavor, cfg, assisted).contains_zero();
        if (inside && !in_run) {
            in_run = true;
            run_start = theta;
        }
        if (inside) last_theta = theta;
        if (!inside && in_run) {
            in_run = false;
            region.segments.emplace_back(run_start, last_theta);
        }
    }
    if (in_run) region.segments.emplace_back(run_start, last_theta);
    region.empty_region = region.segments.empty();
    if (!region.empty_region) {
        const double eps = 0.5 * region.grid_step;
        if (region.segments.front().first <= g.lo + eps ||
            region.segments.back().second >= g.hi - eps)
            region.boundary_warning = true;
    }
    return region;
}

}  // namespace ppics
