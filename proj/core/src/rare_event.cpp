#include "jsqldp/rare_event.hpp"

#include "chain.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <limits>
#include <thread>

namespace jsqldp
{

RareEventSpec RareEventSpec::custom(std::string label,
                                    std::function<bool(const SamplePath &)> predicate)
{
    return {Kind::custom, 1, std::move(predicate), std::move(label)};
}

void RareEventSpec::validate() const
{
    if (j < 1)
        throw ValidationError("event level j must be at least 1");
    if (kind == Kind::custom && !predicate)
        throw ValidationError("custom event needs a predicate");
}

std::string RareEventSpec::name() const
{
    switch (kind)
    {
    case Kind::reach_length:
        return "E" + std::to_string(j);
    case Kind::occupied:
        return "G" + std::to_string(j);
    case Kind::level_full:
        return "F" + std::to_string(j);
    case Kind::custom:
        return label;
    }
    return label;
}

bool RareEventSpec::holds(const OccupancyState &state) const
{
    switch (kind)
    {
    case Kind::reach_length:
    case Kind::occupied:
        return state.count(j) > 0;
    case Kind::level_full:
        // X_0 = 1 identically.
        return j == 1 || state.count(j - 1) == state.n;
    case Kind::custom:
        break;
    }
    throw ValidationError("holds(state) is not defined for custom events");
}

bool RareEventSpec::holds(const SamplePath &path) const
{
    if (kind == Kind::custom)
        return predicate(path);
    for (std::size_t e = 0; e < path.entries(); ++e)
        if (holds(path.state(e)))
            return true;
    return false;
}

RareEventSpec parse_event(const std::string &text)
{
    if (text.size() >= 2)
    {
        const char tag = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
        std::size_t j = 0;
        try
        {
            std::size_t used = 0;
            j = std::stoul(text.substr(1), &used);
            if (used != text.size() - 1)
                j = 0;
        }
        catch (const std::logic_error &)
        {
            j = 0;
        }
        if (j >= 1)
        {
            if (tag == 'E')
                return RareEventSpec::reach_length(j);
            if (tag == 'G')
                return RareEventSpec::occupied(j);
            if (tag == 'F')
                return RareEventSpec::level_full(j);
        }
    }
    throw ValidationError("unknown event '" + text + "' (expected E<j>, G<j> or F<j>)");
}

Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z)
{
    if (trials == 0)
        throw ValidationError("wilson_interval: no trials");
    const double nt = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double centre = (p + z2 / (2.0 * nt)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
    Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    // Roundoff guard so the interval always brackets p_hat.
    ci.low = std::min(ci.low, p);
    ci.high = std::max(ci.high, p);
    if (hits == 0)
        ci.low = 0.0;
    if (hits == trials)
        ci.high = 1.0;
    return ci;
}

namespace
{

class HitObserver
{
  public:
    explicit HitObserver(const RareEventSpec &event) : event_(event) {}

    bool start(const detail::ChainState &s) { return check(s); }
    bool on_event(double, EventKind, std::uint32_t, const detail::ChainState &s)
    {
        return check(s);
    }
    bool hit() const noexcept { return hit_; }

  private:
    bool check(const detail::ChainState &s)
    {
        switch (event_.kind)
        {
        case RareEventSpec::Kind::reach_length:
        case RareEventSpec::Kind::occupied:
            hit_ = s.count(event_.j) > 0;
            break;
        case RareEventSpec::Kind::level_full:
            hit_ = event_.j == 1 || s.count(event_.j - 1) == s.n;
            break;
        case RareEventSpec::Kind::custom:
            break;
        }
        return hit_;
    }

    const RareEventSpec &event_;
    bool hit_ = false;
};

bool replicate(const SystemConfig &config, const RareEventSpec &event, std::uint64_t seed)
{
    const ControlPolicy *control =
        config.policy == Policy::controlled ? &*config.control : nullptr;
    if (event.kind == RareEventSpec::Kind::custom)
        return event.predicate(simulate_path(config, seed));
    HitObserver obs(event);
    detail::run_chain(config, control, seed, obs);
    return obs.hit();
}

} // namespace

EstimateResult estimate_event(const SystemConfig &config, const RareEventSpec &event,
                              std::uint64_t replications, std::uint64_t base_seed,
                              unsigned threads)
{
    config.validate();
    event.validate();
    if (replications < 1)
        throw ValidationError("replications must be at least 1");
    threads = std::max(1u, threads);

    constexpr std::uint64_t block = 256;
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> hits{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        try
        {
            std::uint64_t local = 0;
            while (!failed.load(std::memory_order_relaxed))
            {
                const std::uint64_t begin = next.fetch_add(block);
                if (begin >= replications)
                    break;
                const std::uint64_t end = std::min(replications, begin + block);
                for (std::uint64_t r = begin; r < end; ++r)
                    local += replicate(config, event, derive_seed(base_seed, r)) ? 1 : 0;
            }
            hits.fetch_add(local);
        }
        catch (...)
        {
            if (!failed.exchange(true))
                failure = std::current_exception();
        }
    };

    if (threads == 1)
        worker();
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    EstimateResult res;
    res.replications = replications;
    res.hits = hits.load();
    res.seed = base_seed;
    res.p_hat = static_cast<double>(res.hits) / static_cast<double>(replications);
    const auto ci = wilson_interval(res.hits, replications);
    res.ci_low = ci.low;
    res.ci_high = ci.high;
    res.log_rate = res.hits == 0 ? -std::numeric_limits<double>::infinity()
                                 : std::log(res.p_hat) / static_cast<double>(config.n);
    return res;
}

} // namespace jsqldp
