#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ppics/cs_core.hpp"
#include "ppics/loss.hpp"
#include "ppics/running_moments.hpp"

namespace ppics {

enum class Flavor { classical, ppi, ppi_plus };

std::string flavor_name(Flavor f);
Flavor parse_flavor(const std::string& name);

// Confidence sequence for g_theta at one theta: center, the scale
// estimates that produced the radius, and (when assisted) the split of
// the radius into its rectifier and measure-of-fit components, which
// add up to the full radius by Minkowski sum.
struct GCs {
    double g_hat = 0.0;
    double sigma_delta = 0.0;
    double sigma_f = 0.0;
    double radius = 0.0;
    std::optional<std::pair<double, double>> components;  // (radius_delta, radius_m)
    bool lambda_fallback = false;

    bool contains_zero() const { return std::abs(g_hat) <= radius; }
};

// Union of grid sub-intervals from inverting the g-sequence over a grid.
struct GridRegion {
    std::vector<std::pair<double, double>> segments;
    bool empty_region = false;
    bool boundary_warning = false;
    double grid_step = 0.0;
};

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t steps = 2001;
};

// Measure-of-fit estimate at theta: the unlabelled-pool average of the
// subgradient (closed form for the squared loss), or the supplied
// population value in known-population mode.
double m_hat(const StreamState& state, double theta, const LossModel& loss,
             const CsConfig& cfg);

// Rectifier estimate at theta; PPI uses the labelled sample mean, PPI++
// the power-tuned control variate. Degenerate lambda_hat falls back to
// lambda = 0 (warn flag reported through cs_g / theta-hat helpers).
double delta_hat(const StreamState& state, double theta, const LossModel& loss,
                 Flavor flavor, const CsConfig& cfg);

// Point estimator of theta* for the squared loss.
double theta_hat(const StreamState& state, Flavor flavor, const CsConfig& cfg);

// Anytime-valid confidence sequence for g_theta.
GCs cs_g(const StreamState& state, double theta, const LossModel& loss, Flavor flavor,
         const CsConfig& cfg, bool assisted);

// Squared-loss inversion: an interval centered at theta_hat whose radius
// is theta-free.
Interval invert_interval(const StreamState& state, Flavor flavor, const CsConfig& cfg,
                         bool assisted);

// Grid inversion for generic losses (works for the squared loss too, as
// a cross-check of the closed form). Requires buffered mode unless the
// loss is squared. Grid defaults to the classical estimate +- 8 classical
// standard errors with 2001 points.
GridRegion invert_grid(const StreamState& state, const LossModel& loss, Flavor flavor,
                       const CsConfig& cfg, bool assisted,
                       std::optional<GridSpec> grid = std::nullopt);

// Classical point estimate: mean label for the squared loss, otherwise
// the root of the buffered mean subgradient (monotone in theta).
double classical_estimate(const StreamState& state, const LossModel& loss);

}  // namespace ppics
