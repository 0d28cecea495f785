#pragma once

#include <cstdint>

namespace ppics {

// Counter-based generator keyed by (base_seed, stream_id). Every draw is
// a pure function of (key, counter), so replications can run on any
// thread layout and still produce bit-identical streams.
class CounterRng {
public:
    CounterRng(std::uint64_t base_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();

    // Uniform on the open interval (0, 1).
    double next_uniform();

    // Standard normal via the inverse CDF (one uniform per draw).
    double next_normal();

    // Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang squeeze).
    double next_gamma(double shape);

    // Student-t with dof > 2 as normal over sqrt(chi^2_dof / dof).
    double next_student_t(double dof);

    std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ppics
