#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace jsqldp
{

/// A multi-coordinate path sampled on a shared, strictly increasing time mesh.
///
/// Coordinates are indexed 1..M in the model; storage is zero-based, so
/// `values[k - 1]` holds coordinate k. Between mesh points the path is read
/// as right-continuous.
class GridPath
{
  public:
    GridPath() = default;

    /// Zero-filled path with `coordinates` tracked coordinates on `times`.
    GridPath(std::vector<double> times, std::size_t coordinates);

    /// Takes ownership of explicit values; validates mesh and shapes.
    GridPath(std::vector<double> times, std::vector<std::vector<double>> values);

    std::size_t size() const noexcept { return times_.size(); }
    std::size_t coordinates() const noexcept { return values_.size(); }

    std::span<const double> times() const noexcept { return times_; }

    /// Coordinate k, one-based.
    std::span<const double> coordinate(std::size_t k) const;
    std::span<double> coordinate(std::size_t k);

    double operator()(std::size_t k, std::size_t step) const { return coordinate(k)[step]; }

    double final_time() const noexcept { return times_.empty() ? 0.0 : times_.back(); }

    /// Copy of the first `m` coordinates.
    GridPath leading(std::size_t m) const;

    /// True when `other` is sampled on a bit-identical mesh.
    bool same_mesh(const GridPath &other) const noexcept { return times_ == other.times_; }

  private:
    std::vector<double> times_;
    std::vector<std::vector<double>> values_;
};

/// Checks mesh invariants only (times[0] = 0, strictly increasing, matching lengths).
void validate_mesh(std::span<const double> times);

/// Weighted sup metric sum_k 2^{-k} max_t |a_k(t) - b_k(t)|.
///
/// Coordinates present in only one of the paths are dropped. The meshes must
/// be identical; no resampling is attempted.
double sup_distance(const GridPath &a, const GridPath &b);

/// Uniform mesh 0, dt, 2 dt, ..., with the last point clamped to `horizon`.
std::vector<double> uniform_mesh(double horizon, double dt);

// CSV: header `t,x1,...,xM`, one row per mesh point.
void write_csv(std::ostream &out, const GridPath &path, const std::string &prefix = "x");
GridPath read_grid_csv(std::istream &in);

// JSON records: [{"t": 0.0, "x": [..M values..]}, ...]
std::string to_json_records(const GridPath &path);
GridPath grid_from_json_records(const std::string &text);

/// Formats a double with 12 significant digits (the output precision of every export).
std::string format_number(double value);

} // namespace jsqldp
