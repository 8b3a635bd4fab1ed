#pragma once

#include "jsqldp/control.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace jsqldp::ratefn
{

/// Local Poisson tilt cost l(z) = z log z - z + 1, with l(0) = 1.
double ell(double z);

struct TwoRate
{
    double a;     ///< tilted up-rate
    double b;     ///< tilted down-rate
    double value; ///< l(a) + l(b)
};

/// argmin of l(a) + l(b) subject to a - b = c, a, b >= 0.
TwoRate two_rate_min(double c);

/// Exponential decay rate of P(some queue reaches length j within [0, T])
/// starting from all queues of length one at critical load.
double decay_rate(std::size_t j, double horizon);

/// (j - 2)^2 / (4 T), the large-horizon approximation of decay_rate.
double large_horizon_rate(std::size_t j, double horizon);

/// Fill speed a_j = (j - 2) / T.
double fill_speed(std::size_t j, double horizon);

/// Cheapest path to fill levels up to j - 1 by time T.
struct OptimalPath
{
    std::size_t j;
    double horizon;
    double speed;       ///< a_j
    TwoRate rates;      ///< control values (phi0 = rates.a, rho_k = rates.b)
    ControlPolicy control;

    /// zeta_k(t) = clamp(a_j t - (k - 2), 0, 1).
    double zeta(std::size_t k, double t) const;
};

OptimalPath optimal_path(std::size_t j, double horizon);

/// Partition of [0, T] into j - 2 filling segments.
struct VariationalInstance
{
    std::size_t j = 3;
    double horizon = 1.0;
    std::vector<double> partition; ///< tau_1 = 0 < ... < tau_{j-1} = T
    std::vector<double> theta;     ///< 1 / segment length
    std::vector<TwoRate> rates;    ///< per-segment minimizer for c = theta_i

    /// sum_i theta_i^{-1} * two_rate_min(theta_i).value
    double objective() const;
};

/// Builds an instance from segment lengths (must be positive, sum to T).
VariationalInstance instance_from_lengths(std::size_t j, const std::vector<double> &lengths);

struct SearchOptions
{
    std::size_t refine = 200;   ///< coordinate-descent sweeps per restart
    std::size_t restarts = 32;
    std::uint64_t seed = 1;
};

struct SearchResult
{
    VariationalInstance best;
    double value;
};

/// Projected pairwise coordinate descent over partitions from random
/// feasible starts. A numerical check that no unequal partition beats the
/// closed form.
SearchResult variational_search(std::size_t j, double horizon, const SearchOptions &options = {});

/// {j, T, a_j, a, b, rate, large_T_limit}
std::string rate_json(std::size_t j, double horizon);

} // namespace jsqldp::ratefn
