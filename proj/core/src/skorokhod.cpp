#include "jsqldp/skorokhod.hpp"

#include "jsqldp/error.hpp"

#include <algorithm>
#include <string>

namespace jsqldp::skorokhod
{

Reflection1d reflect_1d(std::span<const double> psi, double cap)
{
    if (psi.empty())
        throw ValidationError("reflect_1d: empty mesh");
    if (psi.front() > cap)
        throw ValidationError("reflect_1d: initial point lies above the barrier");

    Reflection1d out;
    out.phi.resize(psi.size());
    out.eta.resize(psi.size());
    double running = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
    {
        running = std::max(running, psi[i] - cap);
        out.eta[i] = running;
        out.phi[i] = psi[i] - running;
    }
    return out;
}

SPSolution solve_sp(const GridPath &psi, double cap)
{
    const std::size_t m = psi.coordinates();
    const auto times = psi.times();
    std::vector<double> mesh(times.begin(), times.end());
    SPSolution sol{GridPath(mesh, m), GridPath(mesh, m)};

    std::vector<double> input(psi.size());
    for (std::size_t k = 1; k <= m; ++k)
    {
        const auto psi_k = psi.coordinate(k);
        if (k == 1)
            std::copy(psi_k.begin(), psi_k.end(), input.begin());
        else
        {
            const auto below = sol.eta.coordinate(k - 1);
            for (std::size_t i = 0; i < input.size(); ++i)
                input[i] = psi_k[i] + below[i];
        }
        Reflection1d r;
        try
        {
            r = reflect_1d(input, cap);
        }
        catch (const ValidationError &e)
        {
            throw ValidationError("solve_sp: coordinate " + std::to_string(k) + ": " + e.what());
        }
        std::ranges::copy(r.phi, sol.phi.coordinate(k).begin());
        std::ranges::copy(r.eta, sol.eta.coordinate(k).begin());
    }
    return sol;
}

CascadeReflector::CascadeReflector(std::size_t coordinates, double cap)
    : cap_(cap), eta_(coordinates, 0.0)
{
}

void CascadeReflector::push(std::span<const double> psi, std::span<double> phi,
                            std::span<double> eta)
{
    const std::size_t m = eta_.size();
    if (psi.size() < m || phi.size() < m || eta.size() < m)
        throw ValidationError("CascadeReflector: buffer smaller than coordinate count");
    double below = 0.0;
    for (std::size_t k = 0; k < m; ++k)
    {
        // Same operation order as solve_sp so both routes agree bit for bit.
        const double input = k == 0 ? psi[0] : psi[k] + below;
        if (!started_ && input > cap_)
            throw ValidationError("CascadeReflector: coordinate " + std::to_string(k + 1) +
                                  " starts above the barrier");
        eta_[k] = std::max(eta_[k], input - cap_);
        phi[k] = input - eta_[k];
        eta[k] = eta_[k];
        below = eta_[k];
    }
    started_ = true;
}

double complementarity_residual(const SPSolution &sol, std::size_t k, double cap)
{
    const auto phi = sol.phi.coordinate(k);
    const auto eta = sol.eta.coordinate(k);
    double total = 0.0;
    for (std::size_t i = 1; i < phi.size(); ++i)
        total += (cap - phi[i]) * (eta[i] - eta[i - 1]);
    return total;
}

} // namespace jsqldp::skorokhod
