#include "ppics/cs_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "ppics/errors.hpp"
#include "ppics/quadrature.hpp"
#include "ppics/special_functions.hpp"

namespace ppics {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void check_alpha(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError(std::string(who) + ": alpha must lie in (0,1)");
}

void check_t(std::int64_t t, const char* who) {
    if (t < 1) throw ConfigError(std::string(who) + ": t must be a positive integer");
}

// Sum of exp(log_terms) with max normalization; log_value() is the log
// of the summed integral, immune to underflow of the linear value.
struct LogSum {
    double log_max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    double log_value() const {
        return sum == 0.0 ? -std::numeric_limits<double>::infinity()
                          : log_max + std::log(sum);
    }
};

constexpr double kLogSqrtPi = 0.57236494292470008707;  // log sqrt(pi)

// Gauss-Hermite evaluation of log eta after the substitution
// zeta = z + u*sqrt(2/t), which turns the normal kernel into exp(-u^2):
//   eta_t(z) = pi^{-1/2} * int exp(-u^2) prior(z + u sqrt(2/t)) du.
double log_eta_gh(double z, std::int64_t t, const Prior& prior, int order) {
    const auto& rule = gauss_hermite(order);
    const double step = std::sqrt(2.0 / static_cast<double>(t));
    LogSum acc;
    std::vector<double> logs(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        logs[i] = rule.log_weights[i] + prior.log_density(z + rule.nodes[i] * step);
        acc.log_max = std::max(acc.log_max, logs[i]);
    }
    if (!std::isfinite(acc.log_max)) return acc.log_value();
    for (double l : logs) acc.sum += std::exp(l - acc.log_max);
    return acc.log_value() - kLogSqrtPi;
}

// Composite Gauss-Legendre over [a, b] for exp(-u^2) * prior(z + u*step),
// all in log space. `panels` uniform panels of a fixed-order rule.
LogSum eta_gl_piece(double z, double step, const Prior& prior, double a, double b,
                    int panels) {
    static constexpr int kOrder = 32;
    const auto& rule = gauss_legendre(kOrder);
    LogSum acc;
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(panels) * kOrder);
    const double h = (b - a) / panels;
    const double log_half_h = std::log(h / 2.0);
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        for (int i = 0; i < kOrder; ++i) {
            const double u = mid + 0.5 * h * rule.nodes[i];
            const double l = log_half_h + rule.log_weights[i] - u * u +
                             prior.log_density(z + u * step);
            logs.push_back(l);
            acc.log_max = std::max(acc.log_max, l);
        }
    }
    if (!std::isfinite(acc.log_max)) return acc;
    for (double l : logs) acc.sum += std::exp(l - acc.log_max);
    return acc;
}

// Kink-aware path (laplace): split the integration window at the prior's
// non-smooth point so every piece is analytic, then refine panel counts
// until two successive estimates agree.
double log_eta_kink_split(double z, std::int64_t t, const Prior& prior) {
    const double step = std::sqrt(2.0 / static_cast<double>(t));
    // The integrand exponent is -u^2 + log prior(z + u*step); for an
    // exponential-tail prior the log slope is bounded by step/scale, so
    // mass beyond |u| = slope/2 + 36 is negligible at double precision.
    const double slope = prior.scale > 0.0 ? step / prior.scale : 0.0;
    const double window = slope / 2.0 + 36.0;
    if (!(window <= 1e5)) {
        std::ostringstream os;
        os << "eta quadrature: laplace scale " << prior.scale
           << " too sharp for the t=" << t << " kernel (window " << window << ")";
        throw NumericalError(os.str());
    }

    std::vector<std::pair<double, double>> pieces;
    const auto kink = prior.kink();
    if (kink) {
        const double u0 = (*kink - z) / step;
        if (u0 > -window && u0 < window) {
            pieces.emplace_back(-window, u0);
            pieces.emplace_back(u0, window);
        }
    }
    if (pieces.empty()) pieces.emplace_back(-window, window);

    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int panels = 4; panels <= 4096; panels *= 2) {
        double log_max = -std::numeric_limits<double>::infinity();
        std::vector<LogSum> parts;
        for (const auto& [a, b] : pieces) {
            parts.push_back(eta_gl_piece(z, step, prior, a, b, panels));
            log_max = std::max(log_max, parts.back().log_max);
        }
        double total = 0.0;
        for (const auto& part : parts)
            if (part.sum > 0.0) total += std::exp(part.log_max - log_max) * part.sum;
        const double est =
            (total == 0.0 ? -std::numeric_limits<double>::infinity()
                          : log_max + std::log(total)) -
            kLogSqrtPi;
        // Agreement of the logs to 1e-9 is relative agreement of eta.
        if (!std::isnan(prev) && std::abs(est - prev) <= 1e-9) return est;
        prev = est;
    }
    std::ostringstream os;
    os << "eta quadrature did not converge (kink path): z=" << z << " t=" << t
       << " prior=" << prior.name() << " last log=" << prev;
    throw NumericalError(os.str());
}

// Gauss-Hermite order doubling for smooth (analytic) prior densities.
double log_eta_smooth_doubling(double z, std::int64_t t, const Prior& prior) {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int order = 64; order <= 16384; order *= 2) {
        const double est = log_eta_gh(z, t, prior, order);
        if (!std::isnan(prev) && std::abs(est - prev) <= 1e-9) return est;
        prev = est;
    }
    std::ostringstream os;
    os << "eta quadrature did not converge: z=" << z << " t=" << t
       << " prior=" << prior.name() << " last log=" << prev;
    throw NumericalError(os.str());
}

// Log of the marginal density eta_t(z); exact in log space so extreme
// standardized means cannot underflow.
double log_eta(double z, std::int64_t t, const Prior& prior) {
    switch (prior.kind) {
        case PriorKind::improper:
            return std::log(kInvSqrt2Pi);
        case PriorKind::gaussian: {
            const double var = prior.scale * prior.scale + 1.0 / static_cast<double>(t);
            return normal_log_pdf(z, prior.location, var);
        }
        case PriorKind::laplace:
            return log_eta_kink_split(z, t, prior);
        case PriorKind::student_t:
            return log_eta_smooth_doubling(z, t, prior);
    }
    throw ConfigError("unknown prior kind");
}

}  // namespace

void CsConfig::validate() const {
    check_alpha(alpha, "CsConfig");
    if (!(delta >= 0.0 && delta < alpha))
        throw ConfigError("CsConfig: delta must lie in [0, alpha)");
    if (rho < 0.0 || !std::isfinite(rho)) throw ConfigError("CsConfig: rho must be >= 0");
    if (t_star < 1) throw ConfigError("CsConfig: t_star must be a positive integer");
    if (start_n < 1) throw ConfigError("CsConfig: start_n must be a positive integer");
    if (prior) prior->validate();
    if (population_mean_f && !std::isfinite(*population_mean_f))
        throw ConfigError("CsConfig: population mean of f must be finite");
}

double CsConfig::resolved_rho() const {
    return rho > 0.0 ? rho : rho_opt(t_star, alpha);
}

double radius_na(std::int64_t t, double sigma_hat, double rho, double alpha) {
    check_t(t, "radius_na");
    check_alpha(alpha, "radius_na");
    if (!(rho > 0.0)) throw ConfigError("radius_na: rho must be positive");
    if (!(sigma_hat >= 0.0)) throw ConfigError("radius_na: sigma_hat must be >= 0");
    const double td = static_cast<double>(t);
    const double trho2 = td * rho * rho;
    const double width2 = (1.0 + 1.0 / trho2) * (std::log1p(trho2) - 2.0 * std::log(alpha));
    return sigma_hat / std::sqrt(td) * std::sqrt(width2);
}

double eta(double z, std::int64_t t, const Prior& prior) {
    check_t(t, "eta");
    prior.validate();
    if (prior.kind == PriorKind::improper) return kInvSqrt2Pi;
    return std::exp(log_eta(z, t, prior));
}

double eta_quadrature(double z, std::int64_t t, const Prior& prior) {
    check_t(t, "eta_quadrature");
    prior.validate();
    if (!prior.proper())
        throw ConfigError("eta_quadrature: improper prior has no density to integrate");
    if (prior.kink()) return std::exp(log_eta_kink_split(z, t, prior));
    return std::exp(log_eta_smooth_doubling(z, t, prior));
}

double eta_laplace_closed_form(double z, std::int64_t t, const Prior& prior) {
    check_t(t, "eta_laplace_closed_form");
    if (prior.kind != PriorKind::laplace)
        throw ConfigError("eta_laplace_closed_form: prior is not laplace");
    const double b = prior.scale;
    const double s2 = 1.0 / static_cast<double>(t);
    const double s = std::sqrt(s2);
    const double d = std::abs(z - prior.location);
    const double sqrt2 = 1.4142135623730950488;
    // exp(s^2/(2b^2) +- d/b) * erfc((s/b +- d/s)/sqrt(2)), combined via
    // erfcx where the erfc argument is nonnegative (then the exponents
    // collapse to -d^2/(2 s^2)); the remaining branch has a negative
    // exponent and needs no rescaling.
    const double gauss_exp = std::exp(-d * d / (2.0 * s2));
    const double a_plus = (s / b + d / s) / sqrt2;
    const double term_plus = erfcx(a_plus) * gauss_exp;
    const double a_minus = (s / b - d / s) / sqrt2;
    double term_minus;
    if (a_minus >= 0.0) {
        term_minus = erfcx(a_minus) * gauss_exp;
    } else {
        term_minus = std::exp(s2 / (2.0 * b * b) - d / b) * std::erfc(a_minus);
    }
    return (term_plus + term_minus) / (4.0 * b);
}

double radius_ba(std::int64_t t, double mean_hat, double sigma_hat, const Prior& prior,
                 double alpha) {
    check_t(t, "radius_ba");
    check_alpha(alpha, "radius_ba");
    if (!(sigma_hat >= 0.0) || !std::isfinite(sigma_hat))
        throw ConfigError("radius_ba: sigma_hat must be finite and >= 0");
    const double td = static_cast<double>(t);
    double radicand;
    if (prior.kind == PriorKind::improper) {
        radicand = std::log(td) - 2.0 * std::log(alpha);
    } else {
        if (sigma_hat == 0.0)
            throw DegenerateScale("radius_ba: sigma_hat = 0 leaves the standardized mean undefined");
        const double z = mean_hat / sigma_hat;
        const double lz = log_eta(z, t, prior);
        if (!std::isfinite(lz))
            throw NumericalError("radius_ba: eta evaluated to zero (prior mass underflow)");
        radicand = std::log(td) - kLog2Pi - 2.0 * std::log(alpha) - 2.0 * lz;
    }
    return sigma_hat / std::sqrt(td) * std::sqrt(std::max(radicand, 0.0));
}

double rho_opt(std::int64_t t_star, double alpha) {
    check_t(t_star, "rho_opt");
    check_alpha(alpha, "rho_opt");
    const double z = -alpha * alpha * std::exp(-1.0);
    const double x = -lambert_w_m1(z) - 1.0;
    return std::sqrt(x / static_cast<double>(t_star));
}

double tau_heuristic(std::int64_t t_star) {
    check_t(t_star, "tau_heuristic");
    return 1.0 / std::sqrt(static_cast<double>(t_star));
}

}  // namespace ppics
