#pragma once

#include "jsqldp/control.hpp"
#include "jsqldp/grid_path.hpp"
#include "jsqldp/occupancy.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jsqldp
{

enum class Policy
{
    jsq,
    jiq,
    controlled,
};

std::string to_string(Policy policy);
/// Accepts "jsq", "jiq", "controlled" (case-insensitive).
Policy parse_policy(const std::string &text);

inline constexpr std::size_t default_max_level = 64;

/// Parameters of one n-server run.
struct SystemConfig
{
    std::int64_t n = 1;
    double lambda = 1.0; ///< arrival intensity per server
    double horizon = 1.0;
    InitialOccupancy init;
    Policy policy = Policy::jsq;
    std::optional<ControlPolicy> control; ///< required iff policy == controlled
    std::size_t max_level = default_max_level;

    /// Throws ValidationError on the first violated precondition.
    void validate() const;
};

enum class EventKind : std::uint8_t
{
    initial,
    arrival,
    departure,
};

std::string to_string(EventKind kind);

/// Full record of one simulated run in integer count units.
///
/// Entry 0 is the initial state at time 0; entry e >= 1 is the state right
/// after event e. For every entry and level i:
///   counts_i = free_i + eta_{i-1} - eta_i   (eta_0 = 0)
/// which is the reflection identity X = Y + R eta scaled by n.
struct SamplePath
{
    std::int64_t n = 0;
    double final_time = 0.0;
    Policy policy = Policy::jsq;

    std::vector<double> times;
    std::vector<EventKind> kinds;
    /// Level whose count changed (arrivals: the level that gained a queue).
    std::vector<std::uint32_t> levels;
    std::vector<std::vector<std::int64_t>> counts;
    std::vector<std::vector<std::int64_t>> free;
    std::vector<std::vector<std::int64_t>> eta;

    std::size_t entries() const noexcept { return times.size(); }
    std::size_t events() const noexcept { return times.empty() ? 0 : times.size() - 1; }

    std::int64_t count(std::size_t entry, std::size_t level) const noexcept;
    std::int64_t free_count(std::size_t entry, std::size_t level) const noexcept;
    std::int64_t eta_count(std::size_t entry, std::size_t level) const noexcept;

    double x(std::size_t entry, std::size_t level) const noexcept;
    double y(std::size_t entry, std::size_t level) const noexcept;
    double reflection(std::size_t entry, std::size_t level) const noexcept;

    OccupancyState state(std::size_t entry) const;
    /// Right-continuous state at time t in [0, final_time].
    OccupancyState state_at(double t) const;
    /// Index of the entry in force at time t.
    std::size_t entry_at(double t) const;

    /// Highest level any queue reached during the run.
    std::size_t max_level_reached() const noexcept;
    /// Highest level with a nonzero counts/free/eta value anywhere.
    std::size_t width() const noexcept;

    /// Grids on the event-time mesh. `count_units` keeps integer values
    /// (exactly representable), otherwise values are divided by n.
    GridPath state_grid(std::size_t coordinates, bool count_units = false) const;
    GridPath free_grid(std::size_t coordinates, bool count_units = false) const;
    GridPath eta_grid(std::size_t coordinates, bool count_units = false) const;
};

/// Exact simulation of the occupancy chain under JSQ or JIQ (or the
/// configured control when policy == controlled).
///
/// Deterministic in (config, seed). Throws RuntimeAbort when some queue
/// would reach config.max_level.
SamplePath simulate_path(const SystemConfig &config, std::uint64_t seed);

/// JSQ routing with arrival rate n*lambda*phi0(t) and level-i departure rate
/// (c_i - c_{i+1}) * rho_i(t). The control must cover [0, horizon].
SamplePath simulate_controlled(const SystemConfig &config, const ControlPolicy &control,
                               std::uint64_t seed);

} // namespace jsqldp
