#ifndef GPGOMEA_RNG_HPP
#define GPGOMEA_RNG_HPP

#include <cstdint>
#include <random>

namespace gpgomea {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept
{
    return mix64(mix64(mix64(master) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

// Thin wrapper so every random draw in the library goes through one
// explicitly passed handle.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed = 0) : engine_(seed) { }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double normal(double mean, double stddev) { return std::normal_distribution<double>(mean, stddev)(engine_); }
    double standard_normal() { return normal(0.0, 1.0); }
    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

    engine_type& engine() { return engine_; }

private:
    engine_type engine_;
};

} // namespace gpgomea

#endif
