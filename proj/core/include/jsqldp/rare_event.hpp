#pragma once

#include "jsqldp/simulator.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace jsqldp
{

/// Path events whose probabilities are estimated by Monte Carlo.
struct RareEventSpec
{
    enum class Kind
    {
        reach_length,  ///< E_j: some queue holds >= j jobs at some t <= T
        occupied,      ///< G_j: X_j > 0 at some t <= T
        level_full,    ///< F_j: X_{j-1} = 1 at some t <= T
        custom,
    };

    Kind kind = Kind::reach_length;
    std::size_t j = 1;
    std::function<bool(const SamplePath &)> predicate; ///< custom only
    std::string label = "custom";

    static RareEventSpec reach_length(std::size_t j) { return {Kind::reach_length, j, {}, {}}; }
    static RareEventSpec occupied(std::size_t j) { return {Kind::occupied, j, {}, {}}; }
    static RareEventSpec level_full(std::size_t j) { return {Kind::level_full, j, {}, {}}; }
    static RareEventSpec custom(std::string label, std::function<bool(const SamplePath &)> predicate);

    void validate() const;
    /// "E3", "G1", "F4", or the custom label.
    std::string name() const;

    /// Does the state satisfy the (monotone) event? Not valid for custom.
    bool holds(const OccupancyState &state) const;
    /// Evaluates the event on a recorded path.
    bool holds(const SamplePath &path) const;
};

/// Parses "E3", "G1", "F4" (case-insensitive).
RareEventSpec parse_event(const std::string &text);

struct EstimateResult
{
    double p_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t replications = 0;
    std::uint64_t hits = 0;
    /// log(p_hat) / n; -infinity when hits == 0.
    double log_rate = 0.0;
    std::uint64_t seed = 0;

    bool has_hits() const noexcept { return hits > 0; }
    double half_width() const noexcept { return 0.5 * (ci_high - ci_low); }
};

struct Interval
{
    double low;
    double high;
};

inline constexpr double z_95 = 1.959963984540054;

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z = z_95);

/// Monte Carlo estimate of P(event) from `replications` independent runs.
///
/// Replication r uses derive_seed(base_seed, r), so the result does not
/// depend on `threads`. Monotone events stop each run at the first hit.
EstimateResult estimate_event(const SystemConfig &config, const RareEventSpec &event,
                              std::uint64_t replications, std::uint64_t base_seed,
                              unsigned threads = 1);

} // namespace jsqldp
