#include "jsqldp/fluid.hpp"

#include "jsqldp/error.hpp"
#include "jsqldp/ratefn.hpp"
#include "jsqldp/skorokhod.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace jsqldp::fluid
{

double FluidPath::zeta_at(std::size_t k, std::size_t step) const noexcept
{
    return k >= 1 && k <= zeta.coordinates() ? zeta(k, step) : 0.0;
}

double FluidPath::exact_fraction(std::size_t k, std::size_t step) const noexcept
{
    return zeta_at(k, step) - zeta_at(k + 1, step);
}

namespace
{

struct Attempt
{
    FluidPath path;
    bool overflow = false;
    double overflow_time = 0.0;
};

Attempt integrate_once(const ControlPolicy &control, const InitialOccupancy &x0,
                       const std::vector<double> &mesh, double lambda, std::size_t m)
{
    Attempt out;
    auto &path = out.path;
    path.zeta = GridPath(mesh, m);
    path.psi = GridPath(mesh, m);
    path.eta = GridPath(mesh, m);
    path.step_segment.resize(mesh.size() - 1);

    skorokhod::CascadeReflector reflector(m);
    std::vector<double> psi(m), zeta(m), eta(m), r(m);
    for (std::size_t k = 0; k < m; ++k)
        psi[k] = x0[k + 1];

    auto store = [&](std::size_t i) {
        for (std::size_t k = 1; k <= m; ++k)
        {
            path.psi.coordinate(k)[i] = psi[k - 1];
            path.zeta.coordinate(k)[i] = zeta[k - 1];
            path.eta.coordinate(k)[i] = eta[k - 1];
        }
    };

    reflector.push(psi, zeta, eta);
    store(0);
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i)
    {
        const double dt = mesh[i + 1] - mesh[i];
        const std::size_t seg = control.segment_at(mesh[i]);
        path.step_segment[i] = seg;
        for (std::size_t k = 0; k < m; ++k)
            r[k] = zeta[k] - (k + 1 < m ? zeta[k + 1] : 0.0);

        psi[0] += (lambda * control.phi0(seg) - r[0] * control.rho(seg, 1)) * dt;
        for (std::size_t k = 1; k < m; ++k)
            psi[k] -= r[k] * control.rho(seg, k + 1) * dt;

        reflector.push(psi, zeta, eta);
        store(i + 1);
        // Mass pushed past the top coordinate would belong to level M + 1.
        if (eta[m - 1] > 0.0)
        {
            out.overflow = true;
            out.overflow_time = mesh[i + 1];
            return out;
        }
    }
    return out;
}

} // namespace

FluidPath integrate(const ControlPolicy &control, const InitialOccupancy &x0, double horizon,
                    double dt, double lambda, const IntegrateOptions &options)
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("fluid: dt must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("fluid: horizon must be positive");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ValidationError("fluid: lambda must be finite and nonnegative");
    if (control.horizon() < horizon)
        throw ValidationError("fluid: control does not cover [0, T]");

    std::size_t m = options.coordinates;
    if (m == 0)
        m = std::max(x0.support(), control.highest_active_level()) + 2;
    if (m <= x0.support())
        throw ValidationError("fluid: coordinate count " + std::to_string(m) +
                              " does not cover the initial occupancy");

    const auto mesh = uniform_mesh(horizon, dt);
    std::vector<std::string> notes;
    while (true)
    {
        auto attempt = integrate_once(control, x0, mesh, lambda, m);
        if (!attempt.overflow)
        {
            attempt.path.diagnostics = std::move(notes);
            return std::move(attempt.path);
        }
        const std::string msg = "coordinate " + std::to_string(m) + " reached the barrier at t = " +
                                format_number(attempt.overflow_time) + "; increase M";
        if (!options.auto_grow || m >= options.max_coordinates)
            throw RuntimeAbort("fluid: " + msg);
        const std::size_t grown = std::min(options.max_coordinates, std::max(m + 2, m + m / 2));
        notes.push_back(msg + " (retrying with M = " + std::to_string(grown) + ")");
        m = grown;
    }
}

double cost(const ControlPolicy &control, const FluidPath &path, double lambda)
{
    const auto mesh = path.mesh();
    if (mesh.size() < 2 || path.step_segment.size() != mesh.size() - 1)
        throw ValidationError("fluid cost: path carries no step/segment map");
    if (control.horizon() < mesh.back())
        throw ValidationError("fluid cost: control mesh does not cover the path horizon");
    const std::size_t m = path.coordinates();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i)
    {
        const std::size_t seg = path.step_segment[i];
        if (seg >= control.segments().size() || control.segment_at(mesh[i]) != seg)
            throw ValidationError("fluid cost: control mesh does not match the path's control");
        const double arrival = lambda * ratefn::ell(control.phi0(seg));
        double left = arrival;
        double right = arrival;
        for (std::size_t k = 1; k <= m; ++k)
        {
            const double weight = ratefn::ell(control.rho(seg, k));
            if (weight == 0.0)
                continue;
            left += path.exact_fraction(k, i) * weight;
            right += path.exact_fraction(k, i + 1) * weight;
        }
        total += 0.5 * (left + right) * (mesh[i + 1] - mesh[i]);
    }
    return total;
}

std::size_t shortest_level(std::span<const double> zeta_at_t)
{
    std::size_t level = 0;
    for (std::size_t k = 0; k < zeta_at_t.size(); ++k)
        if (zeta_at_t[k] >= 1.0 - tol_boundary)
            level = k + 1;
    return level;
}

void write_csv(std::ostream &out, const FluidPath &path)
{
    const std::size_t m = path.coordinates();
    out << 't';
    for (const char *prefix : {"zeta", "psi", "eta"})
        for (std::size_t k = 1; k <= m; ++k)
            out << ',' << prefix << k;
    out << '\n';
    const auto mesh = path.mesh();
    for (std::size_t i = 0; i < mesh.size(); ++i)
    {
        out << format_number(mesh[i]);
        for (const GridPath *g : {&path.zeta, &path.psi, &path.eta})
            for (std::size_t k = 1; k <= m; ++k)
                out << ',' << format_number((*g)(k, i));
        out << '\n';
    }
}

std::string to_json(const FluidPath &path)
{
    nlohmann::ordered_json doc;
    doc["zeta"] = nlohmann::json::parse(to_json_records(path.zeta));
    doc["psi"] = nlohmann::json::parse(to_json_records(path.psi));
    doc["eta"] = nlohmann::json::parse(to_json_records(path.eta));
    doc["diagnostics"] = path.diagnostics;
    return doc.dump();
}

} // namespace jsqldp::fluid
