#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ppk {

// Deterministic Gaussian source: mt19937_64 + Box-Muller. Identical seeds
// give identical streams on every platform, which std::normal_distribution
// does not guarantee.
class GaussianRng {
public:
    explicit GaussianRng(std::uint64_t seed) : rng_(seed) {}

    // uniform in (0, 1], 53-bit resolution
    double uniform() {
        return static_cast<double>((rng_() >> 11) + 1ull) * 0x1.0p-53;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ppk
