#include "jsqldp/occupancy.hpp"

#include "jsqldp/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace jsqldp
{

InitialOccupancy::InitialOccupancy(std::vector<double> fractions) : x_(std::move(fractions))
{
    while (!x_.empty() && x_.back() == 0.0)
        x_.pop_back();
    double previous = 1.0;
    for (std::size_t k = 0; k < x_.size(); ++k)
    {
        const double v = x_[k];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ValidationError("initial occupancy: x_" + std::to_string(k + 1) +
                                  " must lie in [0, 1]");
        if (v > previous)
            throw ValidationError("initial occupancy: x_" + std::to_string(k + 1) +
                                  " exceeds x_" + std::to_string(k) + " (must be nonincreasing)");
        previous = v;
    }
}

InitialOccupancy InitialOccupancy::uniform_length(std::size_t length)
{
    return InitialOccupancy(std::vector<double>(length, 1.0));
}

double InitialOccupancy::operator[](std::size_t k) const noexcept
{
    return k >= 1 && k <= x_.size() ? x_[k - 1] : 0.0;
}

std::vector<std::int64_t> InitialOccupancy::counts_for(std::int64_t n) const
{
    if (n < 1)
        throw ValidationError("initial occupancy: server count must be positive");
    std::vector<std::int64_t> counts(x_.size());
    for (std::size_t k = 0; k < x_.size(); ++k)
    {
        const double scaled = x_[k] * static_cast<double>(n);
        const double rounded = std::round(scaled);
        if (std::abs(scaled - rounded) > 1e-9 * std::max(1.0, scaled))
            throw ValidationError("initial occupancy: x_" + std::to_string(k + 1) +
                                  " is not a multiple of 1/" + std::to_string(n));
        counts[k] = static_cast<std::int64_t>(rounded);
    }
    return counts;
}

InitialOccupancy parse_initial_occupancy(const std::string &text)
{
    std::string lower = text;
    std::ranges::transform(lower, lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "empty" || lower == "zero")
        return InitialOccupancy::empty();
    if (lower == "ones")
        return InitialOccupancy::uniform_length(1);
    if (lower == "twos")
        return InitialOccupancy::uniform_length(2);
    if (lower.rfind("length:", 0) == 0)
    {
        try
        {
            return InitialOccupancy::uniform_length(std::stoul(lower.substr(7)));
        }
        catch (const std::logic_error &)
        {
            throw ValidationError("initial occupancy: bad length in '" + text + "'");
        }
    }
    std::vector<double> values;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
        try
        {
            std::size_t used = 0;
            values.push_back(std::stod(cell, &used));
            if (used != cell.size())
                throw std::invalid_argument("trailing");
        }
        catch (const std::logic_error &)
        {
            throw ValidationError("initial occupancy: cannot parse '" + text +
                                  "' (use empty, ones, twos, length:<k> or a comma list)");
        }
    }
    return InitialOccupancy(std::move(values));
}

std::size_t OccupancyState::top_level() const noexcept
{
    for (std::size_t i = counts.size(); i > 0; --i)
        if (counts[i - 1] > 0)
            return i;
    return 0;
}

bool OccupancyState::is_valid() const noexcept
{
    std::int64_t previous = n;
    for (const auto c : counts)
    {
        if (c < 0 || c > previous)
            return false;
        previous = c;
    }
    return true;
}

} // namespace jsqldp
