#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ppics {

// One record of the stream: a prediction f(x), an optional label y,
// and optionally the raw covariates (kept only in buffered mode,
// where generic-loss subgradients must be re-evaluated per theta).
struct Observation {
    double prediction = 0.0;
    std::optional<double> label;
    std::vector<double> covariates;

    bool labelled() const { return label.has_value(); }

    static Observation labelled_obs(double y, double f) {
        Observation o;
        o.prediction = f;
        o.label = y;
        return o;
    }
    static Observation unlabelled_obs(double f) {
        Observation o;
        o.prediction = f;
        return o;
    }
};

// Exact streaming sufficient statistics for labelled pairs (Y, F) and
// unlabelled predictions Ftilde. One-pass Welford recurrences keep the
// centered co-moments numerically stable; every squared-loss estimator
// downstream is O(1) in these sums.
//
// Plain value type: single writer, freely copyable and movable across
// threads; no shared state.
class StreamState {
public:
    struct Options {
        bool buffered = false;   // retain raw observations (generic loss)
        bool pool_labelled_predictions = false;  // labelled f also feeds the pool
    };

    StreamState() = default;
    explicit StreamState(Options opts) : opts_(opts) {}

    // Consumes one observation. Rejects non-finite fields with a
    // DataError naming the 1-based record ordinal.
    void update(const Observation& obs);

    std::int64_t n() const { return n_; }                   // labelled count
    std::int64_t unlabelled_n() const { return n_tilde_; }  // pool count
    std::int64_t records_seen() const { return records_; }

    // Running means; throw InsufficientData on empty accumulators.
    double mean_y() const;
    double mean_f() const;
    double mean_ftilde() const;

    // Centered sums: S_YY = sum (Y - mean_Y)^2 and friends.
    double s_yy() const { return s_yy_; }
    double s_ff() const { return s_ff_; }
    double s_yf() const { return s_yf_; }
    double s_ftft() const { return s_ftft_; }

    // Sample variances (n-1 normalization).
    double var_y() const;
    double var_f() const;
    double var_ftilde() const;

    bool buffered() const { return opts_.buffered; }
    bool pools_labelled_predictions() const { return opts_.pool_labelled_predictions; }
    const std::vector<Observation>& buffer() const;

private:
    Options opts_;
    std::int64_t records_ = 0;
    std::int64_t n_ = 0;
    std::int64_t n_tilde_ = 0;
    double mean_y_ = 0.0, mean_f_ = 0.0, mean_ftilde_ = 0.0;
    double s_yy_ = 0.0, s_ff_ = 0.0, s_yf_ = 0.0, s_ftft_ = 0.0;
    std::vector<Observation> buffer_;

    void absorb_unlabelled(double f);
};

// Power-tuning coefficient lambda_hat = S_YF / S_FF.
// Throws InsufficientData (n < 2) or DegeneratePredictor (S_FF == 0).
double lambda_hat(const StreamState& state);

enum class VarFlavor { cv, cv_plus };

// Consistent variance estimators for the control-variate couplings,
// evaluated on the state's own labelled/unlabelled counts:
//   cv:      residual_ss(lambda)/(n-2) + n*lambda^2/(N(N-1)) * S_FtFt
//   cv_plus: (1-n/N)/(n-2) * residual_ss(lambda_hat) + (n/N)/(n-1) * S_YY
// where residual_ss(l) = S_YY - 2 l S_YF + l^2 S_FF.
double var_estimator(const StreamState& state, double lambda, VarFlavor flavor);

// The exact expansion of sum_i (Y_i - mean_Y - l (F_i - mean_F))^2.
double residual_ss(const StreamState& state, double lambda);

}  // namespace ppics
