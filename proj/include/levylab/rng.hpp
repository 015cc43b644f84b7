#pragma once

#include <cstdint>
#include <random>

namespace levylab {

/// SplitMix64 finalizer; used only to derive independent per-path seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for path `index` of a run with master `seed`. The salt separates unrelated
/// uses of the same master seed (survival paths, exit-law paths, jump tests).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
    return mix64(mix64(seed ^ mix64(salt)) + index);
}

/// Random stream of a single path.
class PathRng {
public:
    explicit PathRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on the open interval (0, 1) built from the top 53 bits.
    static double to_unit(std::uint64_t x) { return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52; }

    double uniform() { return to_unit(engine_()); }

    std::int64_t poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        std::poisson_distribution<std::int64_t> dist(mean);
        return dist(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace levylab
