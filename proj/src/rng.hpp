#pragma once

#include <cstdint>
#include <random>

namespace lsa {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Named RNG streams split off a master seed.
enum class SeedStream : std::uint64_t {
    laser_noise = 1,
    injection_phase = 2,
    interferometer = 3,
    trial = 4,
    cell = 5,
    eve_noise = 6,
};

/// Seed splitting rule used everywhere a run needs more than one stream:
/// child = splitmix64(splitmix64(master ^ (stream · golden)) + index).
inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream, std::uint64_t index = 0) {
    const auto tag = static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ULL;
    return splitmix64(splitmix64(master ^ tag) + index);
}

/// Standard-normal variates from a 64-bit Mersenne twister; owned per trajectory.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

    double operator()() { return dist_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

} // namespace lsa
