#include "jsqldp/ratefn.hpp"

#include "jsqldp/error.hpp"
#include "jsqldp/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace jsqldp::ratefn
{

double ell(double z)
{
    if (!(z >= 0.0))
        throw ValidationError("ell: argument must be nonnegative");
    if (z < 1e-300)
        return 1.0;
    // z log z - z + 1 written around z = 1 to avoid cancellation.
    const double u = z - 1.0;
    return z * std::log1p(u) - u;
}

TwoRate two_rate_min(double c)
{
    if (!(c >= 0.0) || !std::isfinite(c))
        throw ValidationError("two_rate_min: gap must be finite and nonnegative");
    const double root = std::sqrt(c * c + 4.0);
    const double a = 0.5 * (c + root);
    // b = (-c + root) / 2, rearranged so that a * b = 1 without cancellation.
    const double b = 2.0 / (c + root);
    return {a, b, ell(a) + ell(b)};
}

namespace
{

void check_target(std::size_t j, double horizon)
{
    if (j < 3)
        throw ValidationError("target queue length j must be at least 3");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("horizon T must be positive");
}

} // namespace

double fill_speed(std::size_t j, double horizon)
{
    check_target(j, horizon);
    return static_cast<double>(j - 2) / horizon;
}

double decay_rate(std::size_t j, double horizon)
{
    return horizon * two_rate_min(fill_speed(j, horizon)).value;
}

double large_horizon_rate(std::size_t j, double horizon)
{
    check_target(j, horizon);
    const double d = static_cast<double>(j - 2);
    return d * d / (4.0 * horizon);
}

double OptimalPath::zeta(std::size_t k, double t) const
{
    const double raw = speed * t - (static_cast<double>(k) - 2.0);
    return std::clamp(raw, 0.0, 1.0);
}

OptimalPath optimal_path(std::size_t j, double horizon)
{
    const double speed = fill_speed(j, horizon);
    const TwoRate rates = two_rate_min(speed);
    auto control = ControlPolicy::constant(horizon, rates.a, std::vector<double>(j, rates.b));
    return OptimalPath{j, horizon, speed, rates, std::move(control)};
}

double VariationalInstance::objective() const
{
    double total = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i)
        total += (partition[i + 1] - partition[i]) * rates[i].value;
    return total;
}

VariationalInstance instance_from_lengths(std::size_t j, const std::vector<double> &lengths)
{
    if (j < 3)
        throw ValidationError("target queue length j must be at least 3");
    if (lengths.size() != j - 2)
        throw ValidationError("expected " + std::to_string(j - 2) + " segment lengths");
    VariationalInstance inst;
    inst.j = j;
    inst.partition.push_back(0.0);
    for (const double len : lengths)
    {
        if (!(len > 0.0) || !std::isfinite(len))
            throw ValidationError("segment lengths must be positive");
        inst.partition.push_back(inst.partition.back() + len);
    }
    inst.horizon = inst.partition.back();
    for (std::size_t i = 0; i < lengths.size(); ++i)
    {
        const double len = inst.partition[i + 1] - inst.partition[i];
        inst.theta.push_back(1.0 / len);
        inst.rates.push_back(two_rate_min(inst.theta.back()));
    }
    return inst;
}

namespace
{

/// Cost of filling one level in time `len`.
double segment_cost(double len) { return len * two_rate_min(1.0 / len).value; }

/// Golden-section minimum of segment_cost(x) + segment_cost(total - x) on (0, total).
double best_split(double total)
{
    constexpr double inv_phi = 0.6180339887498949;
    const double floor = total * 1e-12;
    double lo = floor;
    double hi = total - floor;
    auto f = [total](double x) { return segment_cost(x) + segment_cost(total - x); };
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > 1e-13 * total)
    {
        if (f1 <= f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

double total_cost(const std::vector<double> &lengths)
{
    double s = 0.0;
    for (const double len : lengths)
        s += segment_cost(len);
    return s;
}

} // namespace

SearchResult variational_search(std::size_t j, double horizon, const SearchOptions &options)
{
    check_target(j, horizon);
    if (options.refine == 0)
        throw ValidationError("variational_search: refine budget must be positive");
    const std::size_t segments = j - 2;

    if (segments == 1)
    {
        auto inst = instance_from_lengths(j, {horizon});
        const double value = inst.objective();
        return {std::move(inst), value};
    }

    SplitMix64 rng(options.seed);
    std::vector<double> best_lengths;
    double best_value = std::numeric_limits<double>::infinity();
    const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);

    for (std::size_t start = 0; start < restarts; ++start)
    {
        // Uniform point on the simplex scaled to T.
        std::vector<double> lengths(segments);
        for (auto &len : lengths)
            len = rng.exponential(1.0);
        const double sum = std::accumulate(lengths.begin(), lengths.end(), 0.0);
        for (auto &len : lengths)
            len *= horizon / sum;

        double value = total_cost(lengths);
        for (std::size_t sweep = 0; sweep < options.refine; ++sweep)
        {
            for (std::size_t p = 0; p + 1 < segments; ++p)
                for (std::size_t q = p + 1; q < segments; ++q)
                {
                    const double pair = lengths[p] + lengths[q];
                    lengths[p] = best_split(pair);
                    lengths[q] = pair - lengths[p];
                }
            const double updated = total_cost(lengths);
            const bool stalled = value - updated <= 1e-15 * std::max(1.0, value);
            value = updated;
            if (stalled)
                break;
        }
        if (value < best_value)
        {
            best_value = value;
            best_lengths = lengths;
        }
    }

    // Absorb accumulated roundoff so the partition ends exactly at T.
    const double sum = std::accumulate(best_lengths.begin(), best_lengths.end() - 1, 0.0);
    best_lengths.back() = horizon - sum;
    auto inst = instance_from_lengths(j, best_lengths);
    inst.partition.back() = horizon;
    inst.horizon = horizon;
    const double value = inst.objective();
    return {std::move(inst), value};
}

std::string rate_json(std::size_t j, double horizon)
{
    const auto path = optimal_path(j, horizon);
    nlohmann::ordered_json doc;
    doc["j"] = j;
    doc["T"] = horizon;
    doc["a_j"] = path.speed;
    doc["a"] = path.rates.a;
    doc["b"] = path.rates.b;
    doc["rate"] = decay_rate(j, horizon);
    doc["large_T_limit"] = large_horizon_rate(j, horizon);
    return doc.dump();
}

} // namespace jsqldp::ratefn
