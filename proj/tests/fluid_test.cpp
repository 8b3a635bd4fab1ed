#include "jsqldp/error.hpp"
#include "jsqldp/fluid.hpp"
#include "jsqldp/ratefn.hpp"
#include "jsqldp/skorokhod.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace jsqldp;
using namespace jsqldp::fluid;

namespace
{

double lln_error(double dt)
{
    const auto path = integrate(ControlPolicy::null_control(5.0), InitialOccupancy::empty(), 5.0,
                                dt, 0.5);
    double err = 0.0;
    const auto mesh = path.mesh();
    for (std::size_t i = 0; i < mesh.size(); ++i)
        err = std::max(err, std::abs(path.zeta_at(1, i) - 0.5 * (1.0 - std::exp(-mesh[i]))));
    return err;
}

double optimal_error(std::size_t j, double T, double dt)
{
    const auto opt = ratefn::optimal_path(j, T);
    const auto path = integrate(opt.control, InitialOccupancy::uniform_length(1), T, dt, 1.0);
    double err = 0.0;
    const auto mesh = path.mesh();
    for (std::size_t k = 1; k <= path.coordinates(); ++k)
        for (std::size_t i = 0; i < mesh.size(); ++i)
            err = std::max(err, std::abs(path.zeta_at(k, i) - opt.zeta(k, mesh[i])));
    return err;
}

} // namespace

TEST_CASE("integrate: null control at critical load is stationary")
{
    const auto x0 = InitialOccupancy::uniform_length(1);
    const auto path = integrate(ControlPolicy::null_control(2.0), x0, 2.0, 1e-3, 1.0);
    for (std::size_t i = 0; i < path.mesh().size(); ++i)
    {
        REQUIRE(path.zeta_at(1, i) == 1.0);
        REQUIRE(path.zeta_at(2, i) == 0.0);
    }
    CHECK(cost(ControlPolicy::null_control(2.0), path, 1.0) == 0.0);
}

TEST_CASE("integrate: LLN relaxation from empty")
{
    const double dt = 1e-3;
    const auto path = integrate(ControlPolicy::null_control(5.0), InitialOccupancy::empty(), 5.0, dt, 0.5);
    CHECK(lln_error(dt) <= dt);
    for (std::size_t i = 0; i < path.mesh().size(); ++i)
        REQUIRE(path.zeta_at(2, i) == 0.0);
}

TEST_CASE("integrate: optimal control reproduces the closed-form trajectory")
{
    const double dt = 1e-3;
    CHECK(optimal_error(3, 1.0, dt) <= 5 * dt);
    CHECK(optimal_error(4, 2.0, dt) <= 5 * dt);
    CHECK(optimal_error(5, 3.0, dt) <= 5 * dt);

    const auto opt = ratefn::optimal_path(3, 1.0);
    const auto path = integrate(opt.control, InitialOccupancy::uniform_length(1), 1.0, dt, 1.0);
    const auto last = path.mesh().size() - 1;
    // Continuous path: the left limit at T equals the value at T.
    std::vector<double> at_end(path.coordinates());
    for (std::size_t k = 1; k <= path.coordinates(); ++k)
        at_end[k - 1] = path.zeta_at(k, last);
    CHECK(shortest_level(at_end) == 2);
    CHECK(path.zeta_at(3, last) <= 5 * dt);
}

TEST_CASE("cost: closed-form values")
{
    const double dt = 1e-3;
    for (auto [j, T] : {std::pair<std::size_t, double>{3, 1.0}, {4, 2.0}, {5, 3.0}})
    {
        const auto opt = ratefn::optimal_path(j, T);
        const auto path = integrate(opt.control, InitialOccupancy::uniform_length(1), T, dt, 1.0);
        CHECK(std::abs(cost(opt.control, path, 1.0) - ratefn::decay_rate(j, T)) <= 10 * dt);
    }

    const double T = 1.5;
    const auto idle = ControlPolicy::constant(T, 0.0, {});
    const auto path = integrate(idle, InitialOccupancy::uniform_length(1), T, dt, 1.0);
    CHECK(cost(idle, path, 1.0) == doctest::Approx(T * 1.0 * ratefn::ell(0.0)));
}

TEST_CASE("cost: rejects a control that does not match the path")
{
    const auto path = integrate(ControlPolicy::null_control(1.0), InitialOccupancy::empty(), 1.0, 1e-2, 0.5);
    CHECK_THROWS_AS(cost(ControlPolicy::null_control(0.5), path, 0.5), ValidationError);
    const ControlPolicy split({0.0, 0.5, 1.0}, {{}, {}});
    CHECK_THROWS_AS(cost(split, path, 0.5), ValidationError);
}

TEST_CASE("shortest_level")
{
    CHECK(shortest_level(std::vector<double>{1.0, 0.0, 0.0}) == 1);
    CHECK(shortest_level(std::vector<double>{1.0, 1.0, 0.4, 0.0}) == 2);
    CHECK(shortest_level(std::vector<double>{0.9, 0.2}) == 0);
    CHECK(shortest_level(std::vector<double>{1.0 - 1e-9, 0.2}) == 1);
    CHECK(shortest_level(std::vector<double>{}) == 0);
}

TEST_CASE("integrate: invariants under a time-varying control")
{
    const ControlPolicy ramp({0.0, 0.5, 1.0, 2.0},
                             {{2.0, {0.5, 0.8}}, {1.5, {0.7}}, {0.3, {1.4, 2.0, 1.2}}});
    const double dt = 1e-3;
    const auto x0 = InitialOccupancy({0.8, 0.3});
    const auto path = integrate(ramp, x0, 2.0, dt, 0.9);
    const auto mesh = path.mesh();
    const std::size_t m = path.coordinates();

    // Ordering within 10 dt and values in [0, 1].
    for (std::size_t i = 0; i < mesh.size(); ++i)
        for (std::size_t k = 1; k <= m; ++k)
        {
            REQUIRE(path.zeta_at(k, i) <= 1.0);
            REQUIRE(path.zeta_at(k, i) >= -10 * dt);
            REQUIRE(path.zeta_at(k, i) >= path.zeta_at(k + 1, i) - 10 * dt);
        }

    // The emitted (zeta, eta) is the reflection of the emitted psi.
    const auto sol = skorokhod::solve_sp(path.psi);
    CHECK(sup_distance(sol.phi, path.zeta) <= 1e-12);
    CHECK(sup_distance(sol.eta, path.eta) <= 1e-12);

    // Mass balance: total growth equals arrivals minus departures.
    double net = 0.0;
    for (std::size_t i = 0; i + 1 < mesh.size(); ++i)
    {
        const auto seg = ramp.segment_at(mesh[i]);
        auto rate = [&](std::size_t step) {
            double v = 0.9 * ramp.phi0(seg);
            for (std::size_t k = 1; k <= m; ++k)
                v -= path.exact_fraction(k, step) * ramp.rho(seg, k);
            return v;
        };
        net += 0.5 * (rate(i) + rate(i + 1)) * (mesh[i + 1] - mesh[i]);
    }
    double growth = 0.0;
    for (std::size_t k = 1; k <= m; ++k)
        growth += path.zeta_at(k, mesh.size() - 1) - path.zeta_at(k, 0);
    CHECK(std::abs(growth - net) <= 10 * dt);
}

TEST_CASE("integrate: first-order convergence")
{
    for (double dt : {4e-3, 2e-3, 1e-3})
        CHECK(lln_error(dt / 2) <= lln_error(dt) / 2);
    // Errors at roundoff level (the linear fill is integrated exactly) are exempt.
    for (auto [j, T] : {std::pair<std::size_t, double>{3, 1.0}, {4, 2.0}, {5, 3.0}})
        for (double dt : {4e-3, 2e-3})
            CHECK(optimal_error(j, T, dt / 2) <= optimal_error(j, T, dt) / 2 + 1e-11);
}

TEST_CASE("integrate: truncation diagnostics")
{
    const auto push = ControlPolicy::constant(3.0, 4.0, {0.2, 0.2, 0.2, 0.2});
    IntegrateOptions fixed{.coordinates = 2, .auto_grow = false};
    CHECK_THROWS_AS(integrate(push, InitialOccupancy::uniform_length(1), 3.0, 1e-3, 1.0, fixed), RuntimeAbort);

    IntegrateOptions grow{.coordinates = 2};
    const auto path = integrate(push, InitialOccupancy::uniform_length(1), 3.0, 1e-3, 1.0, grow);
    CHECK(!path.diagnostics.empty());
    CHECK(path.coordinates() > 2);
    CHECK(path.zeta_at(path.coordinates(), path.mesh().size() - 1) < 1.0 - 1e-2);
}

TEST_CASE("integrate: parameter validation")
{
    const auto c = ControlPolicy::null_control(1.0);
    CHECK_THROWS_AS(integrate(c, InitialOccupancy::empty(), 1.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(integrate(c, InitialOccupancy::empty(), 1.0, -1e-3, 1.0), ValidationError);
    CHECK_THROWS_AS(integrate(c, InitialOccupancy::empty(), 2.0, 1e-3, 1.0), ValidationError);
}

TEST_CASE("FluidPath CSV header")
{
    const auto path = integrate(ControlPolicy::null_control(0.1), InitialOccupancy::empty(), 0.1, 0.05, 1.0,
                                {.coordinates = 2});
    std::stringstream out;
    write_csv(out, path);
    std::string header;
    std::getline(out, header);
    CHECK(header == "t,zeta1,zeta2,psi1,psi2,eta1,eta2");
}
