#include "jsqldp/simulator.hpp"

#include "chain.hpp"

#include <algorithm>
#include <cctype>

namespace jsqldp
{

std::string to_string(Policy policy)
{
    switch (policy)
    {
    case Policy::jsq:
        return "jsq";
    case Policy::jiq:
        return "jiq";
    case Policy::controlled:
        return "controlled";
    }
    return "?";
}

Policy parse_policy(const std::string &text)
{
    std::string lower = text;
    std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "jsq")
        return Policy::jsq;
    if (lower == "jiq")
        return Policy::jiq;
    if (lower == "controlled")
        return Policy::controlled;
    throw ValidationError("unknown policy '" + text + "' (expected jsq, jiq or controlled)");
}

std::string to_string(EventKind kind)
{
    switch (kind)
    {
    case EventKind::initial:
        return "init";
    case EventKind::arrival:
        return "arrival";
    case EventKind::departure:
        return "departure";
    }
    return "?";
}

void SystemConfig::validate() const
{
    if (n < 1)
        throw ValidationError("n must be at least 1");
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw ValidationError("lambda must be finite and nonnegative");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("horizon T must be positive");
    if (max_level < 2)
        throw ValidationError("max_level must be at least 2");
    (void)init.counts_for(n);
    if (init.support() >= max_level)
        throw ValidationError("initial occupancy reaches max_level");
    if (policy == Policy::controlled)
    {
        if (!control)
            throw ValidationError("controlled policy requires a control");
        if (control->horizon() < horizon)
            throw ValidationError("control does not cover [0, T]");
    }
}

namespace
{

std::int64_t at(const std::vector<std::vector<std::int64_t>> &rows, std::size_t entry,
                std::size_t level) noexcept
{
    if (entry >= rows.size() || level == 0)
        return 0;
    const auto &row = rows[entry];
    return level <= row.size() ? row[level - 1] : 0;
}

class Recorder
{
  public:
    explicit Recorder(SamplePath &path) : path_(path) {}

    bool start(const detail::ChainState &s)
    {
        record(0.0, EventKind::initial, 0, s);
        return false;
    }

    bool on_event(double t, EventKind kind, std::uint32_t level, const detail::ChainState &s)
    {
        record(t, kind, level, s);
        return false;
    }

  private:
    void record(double t, EventKind kind, std::uint32_t level, const detail::ChainState &s)
    {
        const auto w = static_cast<long>(s.reached);
        path_.times.push_back(t);
        path_.kinds.push_back(kind);
        path_.levels.push_back(level);
        path_.counts.emplace_back(s.counts.begin(), s.counts.begin() + w);
        path_.free.emplace_back(s.free.begin(), s.free.begin() + w);
        path_.eta.emplace_back(s.eta.begin(), s.eta.begin() + w);
    }

    SamplePath &path_;
};

SamplePath run_recorded(const SystemConfig &config, const ControlPolicy *control,
                        std::uint64_t seed)
{
    SamplePath path;
    path.n = config.n;
    path.final_time = config.horizon;
    path.policy = config.policy;
    Recorder rec(path);
    detail::run_chain(config, control, seed, rec);
    return path;
}

} // namespace

std::int64_t SamplePath::count(std::size_t entry, std::size_t level) const noexcept
{
    return at(counts, entry, level);
}
std::int64_t SamplePath::free_count(std::size_t entry, std::size_t level) const noexcept
{
    return at(free, entry, level);
}
std::int64_t SamplePath::eta_count(std::size_t entry, std::size_t level) const noexcept
{
    return at(eta, entry, level);
}

double SamplePath::x(std::size_t entry, std::size_t level) const noexcept
{
    return static_cast<double>(count(entry, level)) / static_cast<double>(n);
}
double SamplePath::y(std::size_t entry, std::size_t level) const noexcept
{
    return static_cast<double>(free_count(entry, level)) / static_cast<double>(n);
}
double SamplePath::reflection(std::size_t entry, std::size_t level) const noexcept
{
    return static_cast<double>(eta_count(entry, level)) / static_cast<double>(n);
}

OccupancyState SamplePath::state(std::size_t entry) const
{
    OccupancyState s{n, counts.at(entry)};
    while (!s.counts.empty() && s.counts.back() == 0)
        s.counts.pop_back();
    return s;
}

std::size_t SamplePath::entry_at(double t) const
{
    if (times.empty())
        throw ValidationError("empty sample path");
    if (t < 0.0 || t > final_time)
        throw ValidationError("sample path lookup outside [0, T]");
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return static_cast<std::size_t>(it - times.begin()) - 1;
}

OccupancyState SamplePath::state_at(double t) const { return state(entry_at(t)); }

std::size_t SamplePath::max_level_reached() const noexcept
{
    std::size_t top = 0;
    for (const auto &row : counts)
        for (std::size_t i = row.size(); i > top; --i)
            if (row[i - 1] > 0)
            {
                top = i;
                break;
            }
    return top;
}

std::size_t SamplePath::width() const noexcept
{
    return counts.empty() ? 0 : counts.back().size();
}

namespace
{

GridPath to_grid(const SamplePath &path, const std::vector<std::vector<std::int64_t>> &rows,
                 std::size_t coordinates, bool count_units)
{
    GridPath grid(path.times, coordinates);
    const double scale = count_units ? 1.0 : static_cast<double>(path.n);
    for (std::size_t k = 1; k <= coordinates; ++k)
    {
        auto col = grid.coordinate(k);
        for (std::size_t e = 0; e < rows.size(); ++e)
            col[e] = static_cast<double>(at(rows, e, k)) / scale;
    }
    return grid;
}

} // namespace

GridPath SamplePath::state_grid(std::size_t coordinates, bool count_units) const
{
    return to_grid(*this, counts, coordinates, count_units);
}
GridPath SamplePath::free_grid(std::size_t coordinates, bool count_units) const
{
    return to_grid(*this, free, coordinates, count_units);
}
GridPath SamplePath::eta_grid(std::size_t coordinates, bool count_units) const
{
    return to_grid(*this, eta, coordinates, count_units);
}

SamplePath simulate_path(const SystemConfig &config, std::uint64_t seed)
{
    config.validate();
    const ControlPolicy *control =
        config.policy == Policy::controlled ? &*config.control : nullptr;
    return run_recorded(config, control, seed);
}

SamplePath simulate_controlled(const SystemConfig &config, const ControlPolicy &control,
                               std::uint64_t seed)
{
    SystemConfig cfg = config;
    cfg.policy = Policy::controlled;
    cfg.control = control;
    cfg.validate();
    return run_recorded(cfg, &control, seed);
}

} // namespace jsqldp
