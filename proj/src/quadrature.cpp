#include "ppics/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "ppics/errors.hpp"

namespace ppics {

namespace {

// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL
// algorithm (no eigenvectors). d is the diagonal, e the off-diagonal;
// both are overwritten, eigenvalues end up in d.
void tridiagonal_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
    const int n = static_cast<int>(d.size());
    e.push_back(0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-17 * dd + 1e-300) break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw NumericalError("tridiagonal_eigenvalues: QL did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
}

// Gauss-Hermite rule (weight e^{-x^2}) via Golub-Welsch eigenvalues of
// the Jacobi matrix, polished by one Newton step on the orthonormal
// recurrence. The polynomial values grow like e^{z^2/2} near the extreme
// nodes, so the recurrence runs with on-the-fly rescaling and weights
// are assembled in log space.
QuadratureRule build_hermite(int n) {
    std::vector<double> diag(n, 0.0), off(n - 1);
    for (int j = 0; j < n - 1; ++j) off[j] = std::sqrt((j + 1) / 2.0);
    tridiagonal_eigenvalues(diag, off);

    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    rule.log_weights.assign(n, 0.0);
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    const double rescale = 0x1.0p-512;
    const double rescale_log = 512.0 * std::log(2.0);

    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Enforce the +- symmetry of the spectrum before polishing.
        double z = 0.5 * (diag[n - 1 - i] - diag[i]);
        double log_pp = 0.0;
        for (int it = 0; it < 8; ++it) {
            double p1 = pim4, p2 = 0.0;
            double scale_log = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(j / (j + 1.0)) * p3;
                if (std::abs(p1) > 0x1.0p512 || std::abs(p2) > 0x1.0p512) {
                    p1 *= rescale;
                    p2 *= rescale;
                    scale_log += rescale_log;
                }
            }
            const double pp = std::sqrt(2.0 * n) * p2;
            log_pp = std::log(std::abs(pp)) + scale_log;
            const double step = p1 / pp;
            z -= step;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
        }
        rule.nodes[n - 1 - i] = z;
        rule.nodes[i] = -z;
        const double log_w = std::log(2.0) - 2.0 * log_pp;
        rule.log_weights[i] = log_w;
        rule.log_weights[n - 1 - i] = log_w;
        rule.weights[i] = std::exp(log_w);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

// Newton iteration on the Legendre recurrence, nodes on [-1, 1].
QuadratureRule build_legendre(int n) {
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        bool converged = false;
        for (int it = 0; it < 200; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15) {
                converged = true;
                break;
            }
        }
        if (!converged) throw NumericalError("gauss_legendre: node iteration failed");
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    rule.log_weights.resize(n);
    for (int i = 0; i < n; ++i) rule.log_weights[i] = std::log(rule.weights[i]);
    return rule;
}

const QuadratureRule& cached(int n, QuadratureRule (*build)(int),
                             std::map<int, std::unique_ptr<QuadratureRule>>& cache,
                             std::mutex& mu) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<QuadratureRule>(build(n))).first;
    return *it->second;
}

}  // namespace

const QuadratureRule& gauss_hermite(int n) {
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    static std::mutex mu;
    if (n < 1) throw ConfigError("gauss_hermite: order must be positive");
    return cached(n, build_hermite, cache, mu);
}

const QuadratureRule& gauss_legendre(int n) {
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    static std::mutex mu;
    if (n < 1) throw ConfigError("gauss_legendre: order must be positive");
    return cached(n, build_legendre, cache, mu);
}

}  // namespace ppics
