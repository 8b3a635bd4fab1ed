#pragma once

// Test-only generators for random piecewise-linear grid paths.

#include "jsqldp/grid_path.hpp"
#include "jsqldp/rng.hpp"

#include <algorithm>
#include <vector>

namespace jsqldp::testing
{

/// Mesh of `points` uniform samples on [0, horizon].
inline std::vector<double> mesh(std::size_t points, double horizon = 1.0)
{
    std::vector<double> t(points);
    for (std::size_t i = 0; i < points; ++i)
        t[i] = horizon * static_cast<double>(i) / static_cast<double>(points - 1);
    return t;
}

/// Random piecewise-linear path: a handful of knots with values in
/// [-0.5, 1.5], linearly interpolated on the mesh, initial value <= 1.
inline GridPath random_piecewise_linear(SplitMix64 &rng, std::size_t coordinates,
                                        const std::vector<double> &times, std::size_t knots = 8)
{
    GridPath path(times, coordinates);
    const double horizon = times.back();
    for (std::size_t k = 1; k <= coordinates; ++k)
    {
        std::vector<double> knot_t(knots), knot_v(knots);
        for (std::size_t i = 0; i < knots; ++i)
        {
            knot_t[i] = horizon * static_cast<double>(i) / static_cast<double>(knots - 1);
            knot_v[i] = -0.5 + 2.0 * rng.uniform();
        }
        knot_v[0] = std::min(knot_v[0], 1.0);
        auto col = path.coordinate(k);
        for (std::size_t i = 0; i < times.size(); ++i)
        {
            const double t = times[i];
            auto seg = static_cast<std::size_t>(t / horizon * static_cast<double>(knots - 1));
            seg = std::min(seg, knots - 2);
            const double w = (t - knot_t[seg]) / (knot_t[seg + 1] - knot_t[seg]);
            col[i] = (1.0 - w) * knot_v[seg] + w * knot_v[seg + 1];
        }
    }
    return path;
}

/// Perturbation of `base` by another random piecewise-linear path scaled by `scale`.
inline GridPath perturbed(SplitMix64 &rng, const GridPath &base, double scale)
{
    const auto times = base.times();
    std::vector<double> t(times.begin(), times.end());
    auto noise = random_piecewise_linear(rng, base.coordinates(), t);
    GridPath out = base;
    for (std::size_t k = 1; k <= base.coordinates(); ++k)
    {
        auto col = out.coordinate(k);
        const auto nz = noise.coordinate(k);
        for (std::size_t i = 0; i < col.size(); ++i)
            col[i] += scale * nz[i];
        col[0] = std::min(col[0], 1.0);
    }
    return out;
}

} // namespace jsqldp::testing
