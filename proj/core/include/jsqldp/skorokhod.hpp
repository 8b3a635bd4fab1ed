#pragma once

#include "jsqldp/grid_path.hpp"

#include <span>
#include <vector>

namespace jsqldp::skorokhod
{

inline constexpr double default_tol_comp = 1e-9;

/// Output of the one-dimensional reflection at an upper barrier.
struct Reflection1d
{
    std::vector<double> phi;
    std::vector<double> eta;
};

/// Reflects a sampled path downward at `cap`.
///
/// eta[t] = max_{s<=t} (psi[s] - cap)^+ and phi = psi - eta. Throws
/// ValidationError if psi is empty or psi[0] > cap.
Reflection1d reflect_1d(std::span<const double> psi, double cap = 1.0);

/// Constrained path and reflection terms for the cascade reflection
/// phi_k = psi_k + eta_{k-1} - eta_k, phi_k <= cap.
struct SPSolution
{
    GridPath phi;
    GridPath eta;
};

/// Solves the truncated Skorokhod problem coordinate by coordinate.
///
/// Coordinate k is the 1-D reflection of psi_k + eta_{k-1}. Because of this
/// ordering, solving on the first m coordinates gives exactly the first m
/// coordinates of the full solution. `cap` is 1 for occupancy fractions; pass
/// n to solve in integer count units.
SPSolution solve_sp(const GridPath &psi, double cap = 1.0);

/// Incremental form of solve_sp: feed one time point at a time.
///
/// Produces bit-identical values to solve_sp on the same samples. Used by the
/// fluid integrator, which needs the constrained state before computing the
/// next increment.
class CascadeReflector
{
  public:
    explicit CascadeReflector(std::size_t coordinates, double cap = 1.0);

    /// Push the free value psi(t) (size = coordinates); writes phi(t) and eta(t).
    void push(std::span<const double> psi, std::span<double> phi, std::span<double> eta);

    std::size_t coordinates() const noexcept { return eta_.size(); }

  private:
    double cap_;
    bool started_ = false;
    std::vector<double> eta_;
};

/// Discrete complementarity residual of coordinate k: sum over steps of
/// (cap - phi_k(t_{i+1})) * (eta_k(t_{i+1}) - eta_k(t_i)).
double complementarity_residual(const SPSolution &sol, std::size_t k, double cap = 1.0);

} // namespace jsqldp::skorokhod
