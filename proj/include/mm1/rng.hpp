#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mm1 {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based seed for replica `index` of `stream`; independent of scheduling.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                           std::uint64_t index) noexcept {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) + index);
}

/// mt19937_64 with explicit uniform/exponential transforms so draws are identical across
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform integer in [0, n) by 128-bit multiply-shift.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace mm1
