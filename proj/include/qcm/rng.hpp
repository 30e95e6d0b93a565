#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace qcm {

/// SplitMix64: 64-bit counter-based generator. Chosen over std::mt19937
/// because std::normal_distribution is implementation-defined; this keeps
/// every seeded artifact reproducible across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform double in the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::complex<double> complexGaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Stable per-component subseed, e.g. one per Haar gate or search restart.
inline std::uint64_t subseed(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64::mix(seed + 0x9e3779b97f4a7c15ULL * (index + 1));
}

} // namespace qcm
