#pragma once

#include <cstdint>

namespace ppics {

// Lower branch W_{-1} of the Lambert W function on (-1/e, 0).
// Asymptotic initial guess plus Halley refinement; relative accuracy
// better than 1e-13 across the domain.
double lambert_w_m1(double z);

// Standard normal quantile (inverse CDF) for p in (0,1).
// Wichura's AS241 rational approximations, ~1 ulp away from exact.
double normal_quantile(double p);

// Scaled complementary error function exp(x^2) * erfc(x), x >= 0.
double erfcx(double x);

// Standard normal pdf and log-pdf with mean mu and variance var.
double normal_pdf(double x, double mu, double var);
double normal_log_pdf(double x, double mu, double var);

}  // namespace ppics
