#pragma once

#include <cmath>
#include <cstdint>

namespace jsqldp
{

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Counter-based stream: draw i is mix64(seed + (i + 1) * golden_gamma).
///
/// The whole state is (seed, counter), so any draw can be recomputed without
/// replaying the stream and independent streams come from distinct seeds.
class SplitMix64
{
  public:
    using result_type = std::uint64_t;
    static constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ULL;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_{seed} {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~std::uint64_t{0}; }

    constexpr result_type operator()() noexcept
    {
        state_ += golden_gamma;
        return mix64(state_);
    }

    /// Uniform on (0, 1]; never returns 0, so -log(u) is finite.
    double uniform_open0() noexcept
    {
        return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double exponential(double rate) noexcept { return -std::log(uniform_open0()) / rate; }

    constexpr std::uint64_t state() const noexcept { return state_; }

  private:
    std::uint64_t state_;
};

/// Seed for replication `index` of an experiment seeded with `base_seed`.
/// Pure function of its inputs, so parallel schedules cannot change results.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) noexcept
{
    return mix64(mix64(base_seed ^ 0x6A09E667F3BCC909ULL) + mix64(index + SplitMix64::golden_gamma));
}

} // namespace jsqldp
