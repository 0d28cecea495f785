#pragma once

#include <optional>
#include <string>

namespace ppics {

enum class PriorKind { gaussian, laplace, student_t, improper };

// Prior on the standardized mean (mean/scale ratio) used by the
// Bayes-assisted radius. Proper kinds are genuine densities; the
// improper kind is the flat density (2*pi)^{-1/2}.
struct Prior {
    PriorKind kind = PriorKind::improper;
    double location = 0.0;  // mu0
    double scale = 0.0;     // tau (gaussian), b (laplace), s (student_t)
    double dof = 0.0;       // student_t only

    static Prior gaussian(double location, double scale);
    static Prior laplace(double location, double scale);
    static Prior student_t(double location, double scale, double dof);
    static Prior improper();

    bool proper() const { return kind != PriorKind::improper; }

    double density(double x) const;
    double log_density(double x) const;

    // Location of the density's non-smooth point, if any (laplace kink).
    std::optional<double> kink() const;

    // Throws ConfigError on invalid parameters.
    void validate() const;

    std::string name() const;

    // One-letter annotation used in method labels: G, L, T, I.
    char tag() const;
};

std::optional<Prior> parse_prior(const std::string& kind_name, double location,
                                 double scale, double dof);

}  // namespace ppics
