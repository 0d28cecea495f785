#pragma once

#include <functional>
#include <span>

namespace ppics {

// Estimand definition through the subgradient of a convex loss in theta.
// The squared loss (subgradient theta - y, estimand E[Y]) is the built-in
// specialization with O(1) streaming estimators; anything else must run
// through the buffered grid path.
struct LossModel {
    enum class Kind { squared, generic };

    using Subgradient =
        std::function<double(double theta, std::span<const double> covariates, double y)>;

    Kind kind = Kind::squared;
    Subgradient subgradient;

    static LossModel squared() {
        LossModel m;
        m.kind = Kind::squared;
        m.subgradient = [](double theta, std::span<const double>, double y) {
            return theta - y;
        };
        return m;
    }

    static LossModel generic(Subgradient sg) {
        LossModel m;
        m.kind = Kind::generic;
        m.subgradient = std::move(sg);
        return m;
    }

    bool is_squared() const { return kind == Kind::squared; }
};

}  // namespace ppics
