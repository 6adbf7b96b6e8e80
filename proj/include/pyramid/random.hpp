#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace pyramid {

/// Seeded generator used by every stochastic routine. Distribution helpers are
/// implemented here rather than through <random> distributions so that draws
/// are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform index into a container of the given size.
    std::size_t index(std::size_t size) { return static_cast<std::size_t>(below(size)); }

    /// Uniform integer in [lo, hi].
    int between(int lo, int hi);

    /// Uniform double in [0, 1) with 53 bits of randomness.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    const T& pick(std::span<const T> values) { return values[index(values.size())]; }

private:
    std::mt19937_64 engine_;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Version of the run-seed derivation below. Bump when the mixing changes.
inline constexpr int kSeedDerivationVersion = 1;

/// Seed for run `run` on instance `instance`. Deliberately independent of the
/// strategy under test, so all strategies share initial populations.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t instance, std::uint64_t run);

} // namespace pyramid
