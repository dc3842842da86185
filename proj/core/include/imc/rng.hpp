#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace imc {

/// SplitMix64 mixing step. Used only to derive substream seeds, never to
/// produce samples directly.
inline std::uint64_t split_mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Documented seed-split contract: substream `stream` of `master` is seeded
/// with split_mix64(master ^ split_mix64(stream)). Ensemble runs, per-agent
/// noise streams and initial-condition draws all go through this function.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return split_mix64(master ^ split_mix64(stream));
}

/// Deterministic random stream.
///
/// Engine: std::mt19937_64, whose output sequence is pinned bit-for-bit by
/// the C++ standard. Uniform and Gaussian transforms are implemented here
/// (53-bit mantissa scaling, Box-Muller) so sample paths do not depend on
/// standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; the pair's second value is cached.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        // u1 in (0, 1] keeps the log finite.
        const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace imc
