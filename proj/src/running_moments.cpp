#include "ppics/running_moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppics/errors.hpp"

namespace ppics {

void StreamState::update(const Observation& obs) {
    ++records_;
    if (!std::isfinite(obs.prediction))
        throw DataError("record " + std::to_string(records_) + ": non-finite prediction",
                        records_);
    if (obs.label && !std::isfinite(*obs.label))
        throw DataError("record " + std::to_string(records_) + ": non-finite label",
                        records_);
    for (double c : obs.covariates)
        if (!std::isfinite(c))
            throw DataError("record " + std::to_string(records_) + ": non-finite covariate",
                            records_);

    if (obs.label) {
        const double y = *obs.label;
        const double f = obs.prediction;
        ++n_;
        const double dy = y - mean_y_;
        const double df = f - mean_f_;
        mean_y_ += dy / static_cast<double>(n_);
        mean_f_ += df / static_cast<double>(n_);
        const double dy2 = y - mean_y_;
        const double df2 = f - mean_f_;
        s_yy_ += dy * dy2;
        s_ff_ += df * df2;
        s_yf_ += dy * df2;
        if (opts_.pool_labelled_predictions) absorb_unlabelled(f);
    } else {
        absorb_unlabelled(obs.prediction);
    }
    if (opts_.buffered) buffer_.push_back(obs);
}

void StreamState::absorb_unlabelled(double f) {
    ++n_tilde_;
    const double d = f - mean_ftilde_;
    mean_ftilde_ += d / static_cast<double>(n_tilde_);
    s_ftft_ += d * (f - mean_ftilde_);
}

double StreamState::mean_y() const {
    if (n_ < 1) throw InsufficientData("mean_y: no labelled observations");
    return mean_y_;
}

double StreamState::mean_f() const {
    if (n_ < 1) throw InsufficientData("mean_f: no labelled observations");
    return mean_f_;
}

double StreamState::mean_ftilde() const {
    if (n_tilde_ < 1) throw InsufficientData("mean_ftilde: empty unlabelled pool");
    return mean_ftilde_;
}

double StreamState::var_y() const {
    if (n_ < 2) throw InsufficientData("var_y: need n >= 2");
    return s_yy_ / static_cast<double>(n_ - 1);
}

double StreamState::var_f() const {
    if (n_ < 2) throw InsufficientData("var_f: need n >= 2");
    return s_ff_ / static_cast<double>(n_ - 1);
}

double StreamState::var_ftilde() const {
    if (n_tilde_ < 2) throw InsufficientData("var_ftilde: need N >= 2");
    return s_ftft_ / static_cast<double>(n_tilde_ - 1);
}

const std::vector<Observation>& StreamState::buffer() const {
    if (!opts_.buffered) throw ConfigError("buffer(): state is not in buffered mode");
    return buffer_;
}

double lambda_hat(const StreamState& state) {
    if (state.n() < 2) throw InsufficientData("lambda_hat: need n >= 2");
    if (state.s_ff() <= 0.0)
        throw DegeneratePredictor("lambda_hat: constant predictions (S_FF = 0)");
    return state.s_yf() / state.s_ff();
}

double residual_ss(const StreamState& state, double lambda) {
    return state.s_yy() - 2.0 * lambda * state.s_yf() + lambda * lambda * state.s_ff();
}

double var_estimator(const StreamState& state, double lambda, VarFlavor flavor) {
    const auto n = state.n();
    const auto N = state.unlabelled_n();
    if (n < 3) throw InsufficientData("var_estimator: need n >= 3");
    if (!std::isfinite(lambda)) throw ConfigError("var_estimator: lambda must be finite");

    // The residual sum is mathematically nonnegative; cancellation under
    // perfect correlation can round it a few ulp below zero.
    if (flavor == VarFlavor::cv) {
        if (N < 2) throw InsufficientData("var_estimator(cv): need N >= 2");
        const double nd = static_cast<double>(n);
        const double Nd = static_cast<double>(N);
        return std::max(0.0, residual_ss(state, lambda)) / (nd - 2.0) +
               nd * lambda * lambda / (Nd * (Nd - 1.0)) * state.s_ftft();
    }

    if (N < n) throw InvalidRatio("var_estimator(cv_plus): requires N >= n");
    const double r = static_cast<double>(n) / static_cast<double>(N);
    const double lam = lambda_hat(state);
    return (1.0 - r) / (static_cast<double>(n) - 2.0) *
               std::max(0.0, residual_ss(state, lam)) +
           r / (static_cast<double>(n) - 1.0) * state.s_yy();
}

}  // namespace ppics
