#pragma once

// Event-driven kernel shared by simulate_path, simulate_controlled and the
// Monte Carlo driver. Not installed.

#include "jsqldp/control.hpp"
#include "jsqldp/error.hpp"
#include "jsqldp/rng.hpp"
#include "jsqldp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace jsqldp::detail
{

/// Mutable chain state in count units. Index i - 1 holds level i; one extra
/// zero sentinel sits at index max_level.
struct ChainState
{
    std::int64_t n = 0;
    std::vector<std::int64_t> counts;
    std::vector<std::int64_t> free;
    std::vector<std::int64_t> eta;
    std::size_t top = 0;     ///< highest nonempty level now
    std::size_t reached = 0; ///< highest level touched so far (counts, free or eta)

    std::int64_t count(std::size_t level) const noexcept
    {
        return level >= 1 && level <= counts.size() ? counts[level - 1] : 0;
    }
};

/// Runs the chain on [0, config.horizon]. `observer` provides
///   bool start(const ChainState&)                               -> stop?
///   bool on_event(double t, EventKind, std::uint32_t, const ChainState&) -> stop?
/// With `control == nullptr` all multipliers are 1.
template <class Observer>
void run_chain(const SystemConfig &config, const ControlPolicy *control, std::uint64_t seed,
               Observer &observer)
{
    const std::int64_t n = config.n;
    const std::size_t max_level = config.max_level;
    const double horizon = config.horizon;
    const double arrival_base = static_cast<double>(n) * config.lambda;
    const bool jiq = config.policy == Policy::jiq;

    ChainState s;
    s.n = n;
    s.counts.assign(max_level + 1, 0);
    const auto init = config.init.counts_for(n);
    if (init.size() >= max_level)
        throw RuntimeAbort("initial occupancy already reaches max_level " +
                           std::to_string(max_level));
    std::ranges::copy(init, s.counts.begin());
    s.free = s.counts;
    s.eta.assign(max_level + 1, 0);
    for (std::size_t i = init.size(); i > 0; --i)
        if (init[i - 1] > 0)
        {
            s.top = i;
            break;
        }
    s.reached = std::max<std::size_t>(init.size(), 1);

    if (observer.start(s))
        return;

    SplitMix64 rng(seed);
    double t = 0.0;
    std::size_t seg = control ? control->segment_at(0.0) : 0;

    auto rho = [&](std::size_t level) { return control ? control->rho(seg, level) : 1.0; };

    while (true)
    {
        const double seg_end = control ? std::min(control->segment_end(seg), horizon) : horizon;
        const double arrivals = control ? arrival_base * control->phi0(seg) : arrival_base;
        double departures = 0.0;
        for (std::size_t i = 1; i <= s.top; ++i)
            departures += static_cast<double>(s.counts[i - 1] - s.counts[i]) * rho(i);
        const double total = arrivals + departures;

        if (!(total > 0.0))
        {
            if (seg_end < horizon)
            {
                t = seg_end;
                ++seg;
                continue;
            }
            break;
        }
        const double next = t + rng.exponential(total);
        if (next > seg_end)
        {
            // Memoryless restart at the control breakpoint.
            if (seg_end < horizon)
            {
                t = seg_end;
                ++seg;
                continue;
            }
            break;
        }
        t = next;

        double pick = rng.uniform() * total;
        if (pick < arrivals)
        {
            std::size_t level = 1;
            if (!jiq || s.counts[0] == n)
            {
                if (jiq)
                {
                    // No idle server: join a uniformly chosen queue.
                    auto q = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(n));
                    q = std::min(q, n - 1);
                    std::size_t length = 0;
                    while (s.counts[length] > q)
                        ++length;
                    level = length + 1;
                }
                else
                {
                    while (s.counts[level - 1] == n)
                        ++level;
                }
            }
            if (level >= max_level)
                throw RuntimeAbort("a queue reached max_level " + std::to_string(max_level) +
                                   " at t = " + std::to_string(t));
            for (std::size_t i = 1; i < level; ++i)
                ++s.eta[i - 1];
            ++s.free[0];
            ++s.counts[level - 1];
            s.top = std::max(s.top, level);
            s.reached = std::max(s.reached, level);
            if (observer.on_event(t, EventKind::arrival, static_cast<std::uint32_t>(level), s))
                return;
        }
        else
        {
            pick -= arrivals;
            std::size_t level = 0;
            for (std::size_t i = 1; i <= s.top; ++i)
            {
                const double w = static_cast<double>(s.counts[i - 1] - s.counts[i]) * rho(i);
                if (w > 0.0)
                {
                    level = i;
                    if (pick < w)
                        break;
                    pick -= w;
                }
            }
            --s.counts[level - 1];
            --s.free[level - 1];
            while (s.top > 0 && s.counts[s.top - 1] == 0)
                --s.top;
            if (observer.on_event(t, EventKind::departure, static_cast<std::uint32_t>(level), s))
                return;
        }
    }
}

} // namespace jsqldp::detail
