#include "jsqldp/error.hpp"
#include "jsqldp/path_io.hpp"
#include "jsqldp/rare_event.hpp"
#include "jsqldp/rng.hpp"

#include "oracles/mm1_transient.hpp"

#include <doctest.h>

#include <cmath>

using namespace jsqldp;

namespace
{

SystemConfig make(std::int64_t n, double lambda, double T, InitialOccupancy init,
                  Policy policy = Policy::jsq)
{
    SystemConfig c;
    c.n = n;
    c.lambda = lambda;
    c.horizon = T;
    c.init = std::move(init);
    c.policy = policy;
    return c;
}

} // namespace

TEST_CASE("event that holds at time zero")
{
    const auto r = estimate_event(make(20, 0.99, 1.0, InitialOccupancy::uniform_length(1)),
                                  RareEventSpec::occupied(1), 100, 7);
    CHECK(r.p_hat == 1.0);
    CHECK(r.hits == 100);
    CHECK(r.log_rate == 0.0);
    CHECK(r.ci_high == 1.0);
}

TEST_CASE("impossible event without arrivals")
{
    const auto r = estimate_event(make(20, 0.0, 1.0, InitialOccupancy::uniform_length(1)),
                                  RareEventSpec::reach_length(2), 200, 7);
    CHECK(r.p_hat == 0.0);
    CHECK(r.ci_low == 0.0);
    CHECK(std::isinf(r.log_rate));
    CHECK(r.log_rate < 0);
    CHECK(!r.has_hits());
}

TEST_CASE("single server hitting probability matches the transient oracle")
{
    const double exact = testing::mm1_hit_probability(1.0, 1.0, 1, 3, 1.0);
    CHECK(exact == doctest::Approx(0.169545658807).epsilon(1e-9));
    const auto r = estimate_event(make(1, 1.0, 1.0, InitialOccupancy::uniform_length(1)),
                                  RareEventSpec::reach_length(3), 20000, 11);
    CHECK(std::abs(r.p_hat - exact) <= 3 * r.half_width());
}

TEST_CASE("results do not depend on the thread count")
{
    const auto cfg = make(10, 0.99, 1.0, InitialOccupancy::uniform_length(1));
    const auto a = estimate_event(cfg, RareEventSpec::reach_length(3), 5000, 3, 1);
    const auto b = estimate_event(cfg, RareEventSpec::reach_length(3), 5000, 3, 4);
    CHECK(a.hits == b.hits);
    CHECK(a.p_hat == b.p_hat);
}

TEST_CASE("early stopping agrees with evaluating the full path")
{
    const auto cfg = make(8, 0.99, 2.0, InitialOccupancy::uniform_length(1));
    const auto event = RareEventSpec::reach_length(3);
    const auto custom = RareEventSpec::custom("E3-full", [&](const SamplePath &p) { return event.holds(p); });
    const auto a = estimate_event(cfg, event, 3000, 5);
    const auto b = estimate_event(cfg, custom, 3000, 5);
    CHECK(a.hits == b.hits);
    CHECK(a.hits > 0);
}

TEST_CASE("F_j and G_j relations on recorded paths")
{
    const auto cfg = make(6, 0.99, 3.0, InitialOccupancy::uniform_length(1));
    for (std::uint64_t s = 0; s < 200; ++s)
    {
        const auto p = simulate_path(cfg, derive_seed(1, s));
        // G_j implies F_j: to place a job at level j, level j-1 must be full.
        if (RareEventSpec::occupied(3).holds(p))
            REQUIRE(RareEventSpec::level_full(3).holds(p));
        REQUIRE(RareEventSpec::occupied(3).holds(p) == RareEventSpec::reach_length(3).holds(p));
    }
    CHECK(RareEventSpec::level_full(1).holds(OccupancyState{4, {}}));
}

TEST_CASE("wilson interval")
{
    const auto zero = wilson_interval(0, 10);
    CHECK(zero.low == 0.0);
    CHECK(zero.high == doctest::Approx(z_95 * z_95 / (10 + z_95 * z_95)));
    const auto mid = wilson_interval(30, 100);
    CHECK(mid.low < 0.3);
    CHECK(mid.high > 0.3);
    CHECK(mid.low == doctest::Approx(0.2189).epsilon(1e-3));
    CHECK(mid.high == doctest::Approx(0.3958).epsilon(1e-3));
    CHECK(wilson_interval(10, 10).high == 1.0);
    CHECK_THROWS_AS(wilson_interval(0, 0), ValidationError);
}

TEST_CASE("event parsing and validation")
{
    CHECK(parse_event("E3").name() == "E3");
    CHECK(parse_event("g1").kind == RareEventSpec::Kind::occupied);
    CHECK(parse_event("F4").j == 4);
    CHECK_THROWS_AS(parse_event("E0"), ValidationError);
    CHECK_THROWS_AS(parse_event("X3"), ValidationError);
    CHECK_THROWS_AS(parse_event("E3x"), ValidationError);
    CHECK_THROWS_AS(estimate_event(make(2, 1.0, 1.0, {}), RareEventSpec::reach_length(2), 0, 1),
                    ValidationError);
}

TEST_CASE("estimate export schema")
{
    EstimateRecord rec{20, 0.99, 10.0, Policy::jiq, "E3", {}};
    rec.result = estimate_event(make(20, 0.0, 1.0, InitialOccupancy::uniform_length(1)),
                                RareEventSpec::reach_length(2), 10, 4);
    CHECK(estimate_csv_header() ==
          "n,lambda,T,policy,event,p_hat,ci_low,ci_high,log_rate,replications,hits,seed");
    CHECK(estimate_csv_row(rec).rfind("20,0.99,10,jiq,E3,0,0,", 0) == 0);
    CHECK(estimate_csv_row(rec).find(",-inf,10,0,4") != std::string::npos);
    const auto json = estimate_json(rec);
    CHECK(json.find("\"log_rate\":null") != std::string::npos);
    CHECK(json.rfind("{\"n\":20,\"lambda\":0.99,\"T\":10.0,\"policy\":\"jiq\"", 0) == 0);
}
