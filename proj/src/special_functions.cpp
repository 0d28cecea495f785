#include "ppics/special_functions.hpp"

#include <cmath>
#include <limits>

#include "ppics/errors.hpp"

namespace ppics {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

// Halley step for f(w) = w e^w - z.
double halley_w(double w, double z) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    return w - f / denom;
}

}  // namespace

double lambert_w_m1(double z) {
    if (!(z > -kInvE && z < 0.0))
        throw ConfigError("lambert_w_m1: argument must lie in (-1/e, 0)");

    double w;
    const double p2 = 2.0 * (1.0 + std::exp(1.0) * z);
    if (p2 < 1e-4) {
        // Branch-point series at z = -1/e with p = -sqrt(2(1 + e z)).
        const double p = -std::sqrt(p2);
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else {
        // Asymptotic expansion for z -> 0^-: W ~ L1 - L2 + L2/L1 + ...
        const double l1 = std::log(-z);
        const double l2 = std::log(-l1);
        w = l1 - l2 + l2 / l1 + l2 * (l2 - 2.0) / (2.0 * l1 * l1);
    }

    for (int it = 0; it < 32; ++it) {
        const double w_next = halley_w(w, z);
        if (std::abs(w_next - w) <= 1e-14 * std::abs(w_next)) return w_next;
        w = w_next;
    }
    return w;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw ConfigError("normal_quantile: p must lie in (0,1)");

    // AS241 (PPND16), Wichura 1988.
    const double q = p - 0.5;
    double r;
    if (std::abs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -v : v;
}

double erfcx(double x) {
    if (x < 0.0) throw ConfigError("erfcx: negative argument not supported");
    if (x <= 6.0) return std::exp(x * x) * std::erfc(x);
    // Asymptotic series 1/(x sqrt(pi)) * sum (-1)^k (2k-1)!!/(2x^2)^k;
    // fully converged for x > 6, and more accurate there than the
    // library erfc, whose relative precision decays for tiny results.
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 40; ++k) {
        const double next = term * -(2.0 * k - 1.0) * inv2x2;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum / (x * 1.7724538509055160273);  // sqrt(pi)
}

double normal_pdf(double x, double mu, double var) {
    return std::exp(normal_log_pdf(x, mu, var));
}

double normal_log_pdf(double x, double mu, double var) {
    const double d = x - mu;
    return -0.5 * std::log(6.283185307179586476925286766559 * var) - d * d / (2.0 * var);
}

}  // namespace ppics
