// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Usage: jsqldp_acceptance [criterion numbers...]   (default: all)

#include "jsqldp/fluid.hpp"
#include "jsqldp/grid_path.hpp"
#include "jsqldp/rare_event.hpp"
#include "jsqldp/ratefn.hpp"
#include "jsqldp/rng.hpp"
#include "jsqldp/simulator.hpp"
#include "jsqldp/skorokhod.hpp"

#include "oracles/mm1_transient.hpp"
#include "oracles/random_paths.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace jsqldp;

namespace
{

struct Outcome
{
    bool pass;
    std::string detail;
};

struct Criterion
{
    int id;
    std::string title;
    std::function<Outcome()> run;
};

std::string fmt(const char *pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

unsigned worker_threads()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

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

/// sup_t |X_k(t) - f(t)| for a right-continuous step path and increasing f:
/// on each holding interval the extremes sit at the interval's ends.
double sup_gap(const SamplePath &p, std::size_t k, const std::function<double(double)> &f)
{
    double gap = 0.0;
    for (std::size_t e = 0; e < p.entries(); ++e)
    {
        const double start = p.times[e];
        const double stop = e + 1 < p.entries() ? p.times[e + 1] : p.final_time;
        gap = std::max({gap, std::abs(p.x(e, k) - f(start)), std::abs(p.x(e, k) - f(stop))});
    }
    return gap;
}

// 1. Golden-ratio rate against an independent extended-precision evaluation.
Outcome golden_ratio_rate()
{
    const long double root5 = std::sqrt(5.0L);
    const long double g = (1.0L + root5) / 2.0L;
    const long double gi = (root5 - 1.0L) / 2.0L;
    auto ell_ld = [](long double z) { return z * std::log(z) - z + 1.0L; };
    const long double reference = ell_ld(g) + ell_ld(gi);
    constexpr double mp_reference = 0.245143847559813751; // 40-digit evaluation
    const double value = ratefn::decay_rate(3, 1.0);
    const double err = std::abs(value - static_cast<double>(reference));
    const double err_mp = std::abs(value - mp_reference);
    return {err <= 1e-10 && err_mp <= 1e-10,
            fmt("decay_rate(3,1) = %.12f, reference %.12Lf, |diff| = %.2e", value, reference,
                std::max(err, err_mp))};
}

// 2. Large-horizon limit (j - 2)^2 / 4.
Outcome large_horizon_limit()
{
    bool ok = true;
    std::string detail;
    for (std::size_t j : {3u, 4u, 5u})
    {
        const double T = 1e3 * static_cast<double>(j - 2);
        const double limit = static_cast<double>((j - 2) * (j - 2)) / 4.0;
        const double rel = std::abs(T * ratefn::decay_rate(j, T) - limit) / limit;
        ok = ok && rel < 1e-3;
        detail += fmt("j=%zu rel.err=%.2e; ", j, rel);
    }
    return {ok, detail};
}

// 3. Variational certificate for j = 4, T = 2.
Outcome variational_certificate()
{
    const auto r = ratefn::variational_search(4, 2.0);
    const double gap = std::abs(r.value - ratefn::decay_rate(4, 2.0));
    const double split = std::abs(r.best.theta[0] - r.best.theta[1]);
    return {gap <= 1e-6 && split <= 1e-4,
            fmt("value %.12f, |value - closed form| = %.2e, |theta1 - theta2| = %.2e", r.value, gap, split)};
}

// 4. Optimal path reproduced by the fluid integrator.
Outcome optimal_path_consistency()
{
    const double dt = 1e-4;
    const auto opt = ratefn::optimal_path(3, 1.0);
    const auto path = fluid::integrate(opt.control, InitialOccupancy::uniform_length(1), 1.0, dt, 1.0);
    double sup = 0.0;
    const auto mesh = path.mesh();
    for (std::size_t i = 0; i < mesh.size(); ++i)
        sup = std::max(sup, std::abs(path.zeta_at(2, i) - mesh[i]));
    const double c = fluid::cost(opt.control, path, 1.0);
    const double cost_err = std::abs(c - 0.2451597);
    return {sup <= 1e-3 && cost_err <= 1e-3,
            fmt("sup|zeta_2 - t| = %.2e, cost = %.7f (|cost - 0.2451597| = %.2e)", sup, c, cost_err)};
}

// 5. Lipschitz constants 4 and 2 of the reflection map.
Outcome lipschitz()
{
    SplitMix64 rng(20240601);
    const auto t = testing::mesh(200);
    int violations = 0;
    double worst_phi = 0.0;
    double worst_eta = 0.0;
    for (int trial = 0; trial < 1000; ++trial)
    {
        const auto a = testing::random_piecewise_linear(rng, 6, t);
        const auto b = trial % 2 ? testing::random_piecewise_linear(rng, 6, t)
                                 : testing::perturbed(rng, a, 0.02);
        const double d = sup_distance(a, b);
        const auto sa = skorokhod::solve_sp(a);
        const auto sb = skorokhod::solve_sp(b);
        const double dphi = sup_distance(sa.phi, sb.phi);
        const double deta = sup_distance(sa.eta, sb.eta);
        if (d > 0.0)
        {
            worst_phi = std::max(worst_phi, dphi / d);
            worst_eta = std::max(worst_eta, deta / d);
        }
        violations += dphi > 4.0 * d ? 1 : 0;
        violations += deta > 2.0 * d ? 1 : 0;
    }
    return {violations == 0,
            fmt("violations = %d, worst ratios phi %.3f (<= 4), eta %.3f (<= 2)", violations, worst_phi,
                worst_eta)};
}

// 6. Simulator free process reflects back onto the recorded state.
Outcome simulator_skorokhod_agreement()
{
    const auto cfg = make(200, 0.95, 2.0, InitialOccupancy::uniform_length(1));
    int mismatches = 0;
    std::size_t entries = 0;
    std::size_t reflected = 0;
    for (std::uint64_t r = 0; r < 100; ++r)
    {
        const auto p = simulate_path(cfg, derive_seed(6, r));
        const std::size_t m = p.width() + 1;
        const auto sol = skorokhod::solve_sp(p.free_grid(m, true), static_cast<double>(p.n));
        const auto x = p.state_grid(m, true);
        const auto eta = p.eta_grid(m, true);
        entries += p.entries();
        reflected += static_cast<std::size_t>(p.eta_count(p.entries() - 1, 1));
        for (std::size_t k = 1; k <= m; ++k)
            if (!std::ranges::equal(sol.phi.coordinate(k), x.coordinate(k)) ||
                !std::ranges::equal(sol.eta.coordinate(k), eta.coordinate(k)))
                ++mismatches;
    }
    return {mismatches == 0, fmt("100 paths, %zu event entries, %zu reflected arrivals, mismatching coordinates = %d",
                                 entries, reflected, mismatches)};
}

// 7. LLN convergence from empty.
Outcome lln_convergence()
{
    const auto cfg = make(10000, 0.5, 5.0, InitialOccupancy::empty());
    int good = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        const auto p = simulate_path(cfg, derive_seed(7, s));
        const double gap = sup_gap(p, 1, [](double t) { return 0.5 * (1.0 - std::exp(-t)); });
        worst = std::max(worst, gap);
        good += gap <= 0.02 ? 1 : 0;
    }
    return {good >= 18, fmt("%d/20 seeds within 0.02 (worst sup gap %.4f)", good, worst)};
}

// 8. Controlled LLN along the optimal path.
Outcome controlled_lln()
{
    const auto opt = ratefn::optimal_path(3, 1.0);
    const auto cfg = make(10000, 1.0, 1.0, InitialOccupancy::uniform_length(1));
    int good = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s)
    {
        const auto p = simulate_controlled(cfg, opt.control, derive_seed(8, s));
        const double gap = sup_gap(p, 2, [](double t) { return t; });
        worst = std::max(worst, gap);
        good += gap <= 0.03 ? 1 : 0;
    }
    return {good >= 18, fmt("%d/20 seeds within 0.03 (worst sup gap %.4f)", good, worst)};
}

// 9. Single-server hitting probability.
Outcome small_chain_oracle()
{
    const double exact = testing::mm1_hit_probability(1.0, 1.0, 1, 3, 1.0, 50);
    const auto r = estimate_event(make(1, 1.0, 1.0, InitialOccupancy::uniform_length(1)),
                                  RareEventSpec::reach_length(3), 100000, 9, worker_threads());
    const double dev = std::abs(r.p_hat - exact);
    return {dev <= 3.0 * r.half_width(),
            fmt("p_hat = %.5f, oracle = %.5f, |diff| = %.2e, 3 half-widths = %.2e", r.p_hat, exact, dev,
                3.0 * r.half_width())};
}

// 10. Empirical rate moves toward the theoretical value as n grows.
Outcome rate_trend()
{
    const double target = ratefn::decay_rate(3, 1.0);
    const std::vector<std::int64_t> sizes{10, 20, 40};
    std::vector<double> dist;
    std::vector<double> slack;
    std::string detail;
    double rate40 = 0.0;
    for (const auto n : sizes)
    {
        const auto r = estimate_event(make(n, 0.99, 1.0, InitialOccupancy::uniform_length(1)),
                                      RareEventSpec::reach_length(3), 4000000, 10, worker_threads());
        if (!r.has_hits())
            return {false, fmt("n=%lld: no hits", static_cast<long long>(n))};
        const double rate = -r.log_rate;
        // Half-width mapped to the rate scale: |d(-log p / n)| = dp / (p n).
        const double rate_hw = r.half_width() / (r.p_hat * static_cast<double>(n));
        dist.push_back(std::abs(rate - target));
        slack.push_back(rate_hw);
        if (n == 40)
            rate40 = rate;
        detail += fmt("n=%lld p=%.3e rate=%.4f+-%.4f; ", static_cast<long long>(n), r.p_hat, rate, rate_hw);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < dist.size(); ++i)
        monotone = monotone && dist[i] <= dist[i - 1] + slack[i];
    const bool close = std::abs(rate40 - target) <= 0.5 * target;
    return {monotone && close, detail + fmt("target %.4f", target)};
}

// 11. JSQ long queues rarer than JIQ.
Outcome figure2_ordering()
{
    const std::vector<std::int64_t> sizes{20, 40, 60};
    bool ordered = true;
    bool decaying = true;
    double previous_jsq = 1.0;
    std::string detail;
    for (const auto n : sizes)
    {
        double rates[2];
        double probs[2];
        for (int pol = 0; pol < 2; ++pol)
        {
            const auto r = estimate_event(
                make(n, 0.99, 10.0, InitialOccupancy::uniform_length(1), pol ? Policy::jiq : Policy::jsq),
                RareEventSpec::reach_length(3), 100000, 11, worker_threads());
            rates[pol] = r.log_rate;
            probs[pol] = r.p_hat;
        }
        ordered = ordered && rates[0] <= rates[1];
        decaying = decaying && probs[0] < previous_jsq;
        previous_jsq = probs[0];
        detail += fmt("n=%lld jsq %.4f jiq %.4f; ", static_cast<long long>(n), rates[0], rates[1]);
    }
    return {ordered && decaying, detail};
}

} // namespace

int main(int argc, char **argv)
{
    const std::vector<Criterion> criteria{
        {1, "golden-ratio rate", golden_ratio_rate},
        {2, "large-T limit", large_horizon_limit},
        {3, "variational certificate", variational_certificate},
        {4, "optimal-path consistency", optimal_path_consistency},
        {5, "Skorokhod Lipschitz bounds", lipschitz},
        {6, "simulator/Skorokhod agreement", simulator_skorokhod_agreement},
        {7, "LLN convergence", lln_convergence},
        {8, "controlled LLN", controlled_lln},
        {9, "exact small-chain oracle", small_chain_oracle},
        {10, "rate trend in n", rate_trend},
        {11, "JSQ vs JIQ ordering", figure2_ordering},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto &c : criteria)
    {
        if (!selected.empty() && !selected.contains(c.id))
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] AC%-2d %-30s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
