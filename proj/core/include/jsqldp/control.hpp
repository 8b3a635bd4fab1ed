#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace jsqldp
{

/// Piecewise-constant control on [0, T].
///
/// Segment s covers [mesh[s], mesh[s+1]) (the last one is closed at T). It
/// carries the arrival multiplier phi0 and service multipliers rho_1..rho_Mc;
/// levels beyond Mc use 1. The service multiplier rho_k acts on the fraction
/// r_k = zeta_k - zeta_{k+1} of queues holding exactly k jobs, and the rest
/// of the service intensity at that level is left at 1.
class ControlPolicy
{
  public:
    struct Segment
    {
        double phi0 = 1.0;
        std::vector<double> rho;
    };

    ControlPolicy(std::vector<double> mesh, std::vector<Segment> segments);

    /// phi0 = 1 and rho = 1 everywhere on [0, horizon].
    static ControlPolicy null_control(double horizon);
    /// Time-constant control on [0, horizon].
    static ControlPolicy constant(double horizon, double phi0, std::vector<double> rho);

    double horizon() const noexcept { return mesh_.back(); }
    const std::vector<double> &mesh() const noexcept { return mesh_; }
    const std::vector<Segment> &segments() const noexcept { return segments_; }

    /// Segment index active at time t. Throws ValidationError outside [0, T].
    std::size_t segment_at(double t) const;

    double phi0(std::size_t segment) const { return segments_.at(segment).phi0; }
    /// rho_k for level k >= 1 on a segment.
    double rho(std::size_t segment, std::size_t k) const;

    /// Largest level with rho_k != 1 on any segment (0 if none).
    std::size_t highest_active_level() const noexcept;

    /// End of segment s (the next breakpoint).
    double segment_end(std::size_t segment) const { return mesh_.at(segment + 1); }

  private:
    std::vector<double> mesh_;
    std::vector<Segment> segments_;
};

/// Reads {"mesh": [t0 = 0, t1, ..., T], "segments": [{"phi0": .., "rho": [..]}, ...]}.
/// Parse and schema errors carry the line number.
ControlPolicy control_from_json(const std::string &text);
std::string control_to_json(const ControlPolicy &control);

} // namespace jsqldp
