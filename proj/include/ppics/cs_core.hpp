#pragma once

#include <cstdint>
#include <optional>

#include "ppics/prior.hpp"

namespace ppics {

// A symmetric interval [center - radius, center + radius] at time t,
// covering at confidence level `level` = 1 - alpha.
struct Interval {
    double center = 0.0;
    double radius = 0.0;
    double level = 0.0;
    std::int64_t t = 0;

    double lower() const { return center - radius; }
    double upper() const { return center + radius; }
    bool contains(double x) const { return x >= lower() && x <= upper(); }
};

// Confidence-sequence configuration. kappa = alpha - delta is the budget
// left for the rectifier sequence once delta is spent on the measure of
// fit; known-population mode zeroes the latter and sets kappa = alpha.
struct CsConfig {
    double alpha = 0.1;
    double delta = 0.0;
    double rho = 0.0;  // 0 -> derived as rho_opt(t_star, alpha)
    std::optional<Prior> prior;
    std::int64_t t_star = 500;
    std::int64_t start_n = 40;

    bool assume_infinite_unlabelled = false;
    std::optional<double> population_mean_f;

    void validate() const;

    bool assisted() const { return prior.has_value(); }
    double kappa() const { return alpha - delta; }
    double resolved_rho() const;
};

// Non-assisted radius at time t:
//   sigma_hat/sqrt(t) * sqrt((1 + 1/(t rho^2)) * log((t rho^2 + 1)/alpha^2)).
double radius_na(std::int64_t t, double sigma_hat, double rho, double alpha);

// Marginal density of the standardized mean under the prior,
//   eta_t(z) = int N(z; zeta, 1/t) pi(zeta) dzeta,
// taking values in (0, sqrt(t/(2 pi))] . Gaussian priors use the closed
// convolution N(z; mu0, tau^2 + 1/t); the improper prior is the constant
// (2 pi)^{-1/2}; other priors go through the quadrature engine.
double eta(double z, std::int64_t t, const Prior& prior);

// Quadrature evaluation of eta for any proper prior (cross-check path
// for the Gaussian closed form, canonical for laplace/student-t).
double eta_quadrature(double z, std::int64_t t, const Prior& prior);

// Closed form for the Laplace prior via the exponential-times-Gaussian
// tail identity; cross-check against the quadrature path.
double eta_laplace_closed_form(double z, std::int64_t t, const Prior& prior);

// Bayes-assisted radius at time t:
//   sigma_hat/sqrt(t) * sqrt(log(t / (2 pi alpha^2 eta_t(z)^2))),
// z = mean_hat/sigma_hat. Reduces to sigma_hat/sqrt(t)*sqrt(log(t/alpha^2))
// under the improper prior. Throws DegenerateScale when sigma_hat == 0.
double radius_ba(std::int64_t t, double mean_hat, double sigma_hat, const Prior& prior,
                 double alpha);

// rho minimizing the non-assisted width at time t_star:
//   rho = sqrt((-W_{-1}(-alpha^2 e^{-1}) - 1) / t_star).
double rho_opt(std::int64_t t_star, double alpha);

// Prior-scale heuristic: prior and data carry equal posterior weight at
// t_star, i.e. tau = 1/sqrt(t_star).
double tau_heuristic(std::int64_t t_star);

}  // namespace ppics
