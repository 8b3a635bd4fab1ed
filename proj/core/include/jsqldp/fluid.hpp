#pragma once

#include "jsqldp/control.hpp"
#include "jsqldp/grid_path.hpp"
#include "jsqldp/occupancy.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace jsqldp::fluid
{

inline constexpr double tol_boundary = 1e-8;

/// Constrained fluid trajectory with its free path and reflection terms.
struct FluidPath
{
    GridPath zeta;
    GridPath psi;
    GridPath eta;
    /// Control segment used on step i -> i+1 (size = mesh points - 1).
    std::vector<std::size_t> step_segment;
    /// Truncation growth notices emitted while integrating.
    std::vector<std::string> diagnostics;

    std::size_t coordinates() const noexcept { return zeta.coordinates(); }
    std::span<const double> mesh() const noexcept { return zeta.times(); }
    /// zeta_k(t_i), zero beyond the tracked coordinates.
    double zeta_at(std::size_t k, std::size_t step) const noexcept;
    /// r_k(t_i) = zeta_k(t_i) - zeta_{k+1}(t_i).
    double exact_fraction(std::size_t k, std::size_t step) const noexcept;
};

struct IntegrateOptions
{
    /// 0 selects the automatic truncation (highest level with x0_k > 0 or
    /// rho_k != 1, plus 2).
    std::size_t coordinates = 0;
    /// Grow the truncation and restart when coordinate M nears 1; otherwise throw.
    bool auto_grow = true;
    std::size_t max_coordinates = 4096;
};

/// Explicit Euler integration of the controlled free dynamics
///   dpsi_1 = [lambda phi0 - r_1 rho_1] dt,  dpsi_k = -r_k rho_k dt (k >= 2),
/// with the cascade reflection applied at every mesh point and r_k read from
/// the constrained state at the left end of each step.
FluidPath integrate(const ControlPolicy &control, const InitialOccupancy &x0, double horizon,
                    double dt, double lambda, const IntegrateOptions &options = {});

/// Running cost  int_0^T [lambda l(phi0) + sum_k r_k l(rho_k)] dt  by the
/// trapezoid rule on the path's mesh.
double cost(const ControlPolicy &control, const FluidPath &path, double lambda);

/// Largest k with zeta_k >= 1 - tol_boundary; 0 if zeta_1 is below that.
std::size_t shortest_level(std::span<const double> zeta_at_t);

/// CSV with columns t, zeta_1..M, psi_1..M, eta_1..M.
void write_csv(std::ostream &out, const FluidPath &path);
/// {"zeta": <records>, "psi": <records>, "eta": <records>}.
std::string to_json(const FluidPath &path);

} // namespace jsqldp::fluid
