#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace jsqldp
{

/// Initial occupancy profile x = (x_1, x_2, ...): 1 >= x_1 >= x_2 >= ... >= 0,
/// finitely supported. Trailing zeros are trimmed.
class InitialOccupancy
{
  public:
    InitialOccupancy() = default;
    explicit InitialOccupancy(std::vector<double> fractions);

    /// Every queue empty.
    static InitialOccupancy empty() { return InitialOccupancy{}; }
    /// Every queue holding exactly `length` jobs.
    static InitialOccupancy uniform_length(std::size_t length);

    /// x_k for k >= 1; zero beyond the support.
    double operator[](std::size_t k) const noexcept;
    std::size_t support() const noexcept { return x_.size(); }
    std::span<const double> fractions() const noexcept { return x_; }

    /// Integer counts n * x_k. Throws ValidationError if some x_k is not a
    /// multiple of 1/n (to within 1e-9 relative).
    std::vector<std::int64_t> counts_for(std::int64_t n) const;

  private:
    std::vector<double> x_;
};

/// Parses "empty", "ones", "twos", "length:<k>" or a comma list "1,0.5,0.25".
InitialOccupancy parse_initial_occupancy(const std::string &text);

/// Occupancy of an n-server system in integer units: counts[i - 1] = number of
/// queues holding at least i jobs.
struct OccupancyState
{
    std::int64_t n = 0;
    std::vector<std::int64_t> counts;

    std::int64_t count(std::size_t level) const noexcept
    {
        return level >= 1 && level <= counts.size() ? counts[level - 1] : 0;
    }
    double fraction(std::size_t level) const noexcept
    {
        return static_cast<double>(count(level)) / static_cast<double>(n);
    }
    /// Highest level with a nonzero count; 0 when every queue is empty.
    std::size_t top_level() const noexcept;
    /// n >= c_1 >= c_2 >= ... >= 0.
    bool is_valid() const noexcept;
};

} // namespace jsqldp
