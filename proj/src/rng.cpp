#include "ppics/rng.hpp"

#include <cmath>

#include "ppics/errors.hpp"
#include "ppics/special_functions.hpp"

namespace ppics {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

CounterRng::CounterRng(std::uint64_t base_seed, std::uint64_t stream_id)
    : key_(mix(mix(base_seed + kGolden) ^ (stream_id * 0xD1B54A32D192ED03ull + 1))) {}

std::uint64_t CounterRng::next_u64() { return mix(key_ + (++counter_) * kGolden); }

double CounterRng::next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() { return normal_quantile(next_uniform()); }

double CounterRng::next_gamma(double shape) {
    if (!(shape >= 1.0)) throw ConfigError("next_gamma: shape must be >= 1");
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = next_normal();
        const double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = next_uniform();
        if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
    }
}

double CounterRng::next_student_t(double dof) {
    if (!(dof > 2.0)) throw ConfigError("next_student_t: dof must exceed 2");
    const double z = next_normal();
    const double chi2 = 2.0 * next_gamma(dof / 2.0);
    return z / std::sqrt(chi2 / dof);
}

}  // namespace ppics
