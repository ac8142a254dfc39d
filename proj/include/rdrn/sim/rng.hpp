#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rdrn::sim {

// Deterministic random stream. Uniform/exponential draws use explicit
// inverse transforms on raw 64-bit output so traces are identical across
// standard-library implementations.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : m_gen(seed) {}

    std::uint64_t next_u64() { return m_gen(); }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(m_gen() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

    // True with probability p. Always consumes one draw so that enabling a
    // zero-probability fault does not perturb other streams.
    bool coin(double p) { return uniform01() < p; }

private:
    std::mt19937_64 m_gen;
};

// One seeded generator per scenario, split into named substreams so that
// enabling one stochastic feature does not perturb another.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : m_seed(seed) {}

    RngStream stream(std::string_view name) const {
        // FNV-1a over the name, mixed with the scenario seed.
        std::uint64_t h = 14695981039346656037ull;
        for (const char c : name) {
            h ^= static_cast<std::uint8_t>(c);
            h *= 1099511628211ull;
        }
        return RngStream(h ^ (m_seed * 0x9e3779b97f4a7c15ull));
    }

    std::uint64_t seed() const noexcept { return m_seed; }

private:
    std::uint64_t m_seed;
};

}  // namespace rdrn::sim
