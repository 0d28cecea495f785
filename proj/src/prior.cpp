#include "ppics/prior.hpp"

#include <cmath>

#include "ppics/errors.hpp"
#include "ppics/special_functions.hpp"

namespace ppics {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2 pi)
}

Prior Prior::gaussian(double location, double scale) {
    Prior p{PriorKind::gaussian, location, scale, 0.0};
    p.validate();
    return p;
}

Prior Prior::laplace(double location, double scale) {
    Prior p{PriorKind::laplace, location, scale, 0.0};
    p.validate();
    return p;
}

Prior Prior::student_t(double location, double scale, double dof) {
    Prior p{PriorKind::student_t, location, scale, dof};
    p.validate();
    return p;
}

Prior Prior::improper() { return Prior{PriorKind::improper, 0.0, 0.0, 0.0}; }

void Prior::validate() const {
    if (kind == PriorKind::improper) return;
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw ConfigError("prior scale must be positive and finite");
    if (!std::isfinite(location)) throw ConfigError("prior location must be finite");
    if (kind == PriorKind::student_t && (!(dof > 0.0) || !std::isfinite(dof)))
        throw ConfigError("student-t prior requires dof > 0");
}

double Prior::density(double x) const { return std::exp(log_density(x)); }

double Prior::log_density(double x) const {
    const double u = (x - location);
    switch (kind) {
        case PriorKind::gaussian:
            return -kLogSqrt2Pi - std::log(scale) - u * u / (2.0 * scale * scale);
        case PriorKind::laplace:
            return -std::log(2.0 * scale) - std::abs(u) / scale;
        case PriorKind::student_t: {
            const double v = u / scale;
            return std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0) -
                   0.5 * std::log(dof * M_PI) - std::log(scale) -
                   (dof + 1.0) / 2.0 * std::log1p(v * v / dof);
        }
        case PriorKind::improper:
            return -kLogSqrt2Pi;
    }
    throw ConfigError("unknown prior kind");
}

std::optional<double> Prior::kink() const {
    if (kind == PriorKind::laplace) return location;
    return std::nullopt;
}

std::string Prior::name() const {
    switch (kind) {
        case PriorKind::gaussian: return "gaussian";
        case PriorKind::laplace: return "laplace";
        case PriorKind::student_t: return "student-t";
        case PriorKind::improper: return "improper";
    }
    return "?";
}

char Prior::tag() const {
    switch (kind) {
        case PriorKind::gaussian: return 'G';
        case PriorKind::laplace: return 'L';
        case PriorKind::student_t: return 'T';
        case PriorKind::improper: return 'I';
    }
    return '?';
}

std::optional<Prior> parse_prior(const std::string& kind_name, double location,
                                 double scale, double dof) {
    if (kind_name == "none" || kind_name.empty()) return std::nullopt;
    if (kind_name == "gaussian") return Prior::gaussian(location, scale);
    if (kind_name == "laplace") return Prior::laplace(location, scale);
    if (kind_name == "student-t" || kind_name == "student_t")
        return Prior::student_t(location, scale, dof);
    if (kind_name == "improper") return Prior::improper();
    throw ConfigError("unknown prior kind: " + kind_name);
}

}  // namespace ppics
