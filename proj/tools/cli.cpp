#include "cli.hpp"

#include "jsqldp/error.hpp"
#include "jsqldp/fluid.hpp"
#include "jsqldp/grid_path.hpp"
#include "jsqldp/path_io.hpp"
#include "jsqldp/rare_event.hpp"
#include "jsqldp/ratefn.hpp"
#include "jsqldp/simulator.hpp"
#include "jsqldp/skorokhod.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace jsqldp::cli
{
namespace
{

using nlohmann::json;

/// File could not be read or written.
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_output(const std::string &path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void finish_output(std::ofstream &out, const std::string &path)
{
    out.flush();
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------
// --config support

std::size_t line_of_offset(const std::string &text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

std::size_t line_of_key(const std::string &text, const std::string &key)
{
    const auto pos = text.find('"' + key + '"');
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

std::string scalar_text(const json &value)
{
    if (value.is_string())
        return value.get<std::string>();
    if (value.is_boolean())
        return value.get<bool>() ? "true" : "false";
    if (value.is_number())
        return value.dump();
    throw ValidationError("expected a scalar value");
}

std::vector<std::string> config_values(const json &value)
{
    std::vector<std::string> out;
    if (value.is_array())
        for (const auto &v : value)
            out.push_back(scalar_text(v));
    else
        out.push_back(scalar_text(value));
    return out;
}

/// Applies a JSON object of `{"flag": value}` pairs to `command`. Options
/// given on the command line keep their values.
void apply_config(CLI::App &command, const std::string &path)
{
    const auto text = read_file(path);
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ValidationError(path + ":" + std::to_string(line_of_offset(text, e.byte)) +
                              ": invalid JSON: " + e.what());
    }
    if (!doc.is_object())
        throw ValidationError(path + ":1: config must be a JSON object");

    for (const auto &[key, value] : doc.items())
    {
        const auto where = path + ":" + std::to_string(line_of_key(text, key)) + ": ";
        auto *opt = key == "config" || key == "help" ? nullptr
                                                     : command.get_option_no_throw("--" + key);
        if (opt == nullptr)
            throw ValidationError(where + "unknown key '" + key + "' for command '" +
                                  command.get_name() + "'");
        if (opt->count() > 0)
            continue;
        try
        {
            const auto values = config_values(value);
            if (values.size() > 1 && opt->get_items_expected_max() < 2)
                throw ValidationError("expected a single value");
            for (const auto &v : values)
                opt->add_result(v);
            opt->run_callback();
        }
        catch (const std::exception &e)
        {
            throw ValidationError(where + "key '" + key + "': " + e.what());
        }
    }
}

unsigned default_threads()
{
    if (const char *env = std::getenv("JSQ_LDP_THREADS"); env != nullptr && *env != '\0')
    {
        char *end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (*end != '\0' || value < 1 || value > 4096)
            throw ValidationError(std::string("JSQ_LDP_THREADS must be a positive integer, got '") +
                                  env + "'");
        return static_cast<unsigned>(value);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t parse_level(const std::string &text, const char *what)
{
    std::size_t used = 0;
    long long value = 0;
    try
    {
        value = std::stoll(text, &used);
    }
    catch (const std::exception &)
    {
        used = 0;
    }
    if (used != text.size() || value < 0)
        throw ValidationError(std::string(what) + " must be a non-negative integer, got '" +
                              text + "'");
    return static_cast<std::size_t>(value);
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs
{
    std::int64_t n = 100;
    double lambda = 1.0;
    double horizon = 1.0;
    std::string policy = "jsq";
    std::string init = "empty";
    std::string control;
    std::uint64_t seed = 1;
    std::size_t max_level = default_max_level;
    std::string out = "simulate.jsonl";
    std::string csv;
    double dt = 0.0;
};

void add_system_options(CLI::App &cmd, double &lambda, double &horizon, std::string &init,
                        std::string &control, std::size_t &max_level)
{
    cmd.add_option("--lambda", lambda, "Arrival rate per server")->capture_default_str();
    cmd.add_option("--T", horizon, "Time horizon")->capture_default_str();
    cmd.add_option("--init", init, "Initial occupancy: empty, ones, twos, length:k or x1,x2,...")
        ->capture_default_str();
    cmd.add_option("--control", control, "Control policy JSON file (policy 'controlled')");
    cmd.add_option("--max-level", max_level, "Abort when a queue reaches this length")
        ->capture_default_str();
}

std::optional<ControlPolicy> load_control(const std::string &path)
{
    if (path.empty())
        return std::nullopt;
    const auto text = read_file(path);
    try
    {
        return control_from_json(text);
    }
    catch (const ValidationError &e)
    {
        throw ValidationError(path + ": " + e.what());
    }
}

int cmd_simulate(const SimulateArgs &a, std::ostream &out)
{
    SystemConfig config;
    config.n = a.n;
    config.lambda = a.lambda;
    config.horizon = a.horizon;
    config.init = parse_initial_occupancy(a.init);
    config.policy = parse_policy(a.policy);
    config.control = load_control(a.control);
    config.max_level = a.max_level;
    config.validate();
    if (!a.csv.empty() && !(a.dt > 0.0 && std::isfinite(a.dt)))
        throw ValidationError("--dt must be positive when --csv is given");
    if (a.dt > a.horizon)
        throw ValidationError("--dt must not exceed --T");

    const auto path = simulate_path(config, a.seed);

    auto jsonl = open_output(a.out);
    write_jsonl(jsonl, path);
    finish_output(jsonl, a.out);
    if (!a.csv.empty())
    {
        auto csv = open_output(a.csv);
        write_sampled_csv(csv, path, a.dt);
        finish_output(csv, a.csv);
    }

    const auto last = path.entries() - 1;
    std::size_t arrivals = 0;
    for (const auto kind : path.kinds)
        arrivals += kind == EventKind::arrival ? 1 : 0;
    out << "policy: " << to_string(path.policy) << '\n'
        << "n: " << path.n << '\n'
        << "T: " << format_number(path.final_time) << '\n'
        << "events: " << path.events() << " (arrivals " << arrivals << ", departures "
        << path.events() - arrivals << ")\n"
        << "max level reached: " << path.max_level_reached() << '\n'
        << "final occupancy:";
    const auto top = std::max<std::size_t>(path.width(), 1);
    for (std::size_t k = 1; k <= top; ++k)
        out << " X" << k << '=' << format_number(path.x(last, k));
    out << '\n' << "wrote: " << a.out;
    if (!a.csv.empty())
        out << ", " << a.csv;
    out << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------------------
// estimate / compare

struct EstimateArgs
{
    std::vector<std::int64_t> n{100};
    std::vector<double> lambda{1.0};
    std::vector<std::string> policy{"jsq"};
    double horizon = 1.0;
    std::string event = "E3";
    std::string init = "empty";
    std::string control;
    std::size_t max_level = default_max_level;
    std::uint64_t replications = 10000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string out = "estimates.csv";
    std::string plot = "plot.csv";
    std::string json_out;
};

int cmd_estimate(const EstimateArgs &a, std::ostream &out)
{
    if (a.replications < 1)
        throw ValidationError("--replications must be at least 1");
    if (a.n.empty() || a.lambda.empty() || a.policy.empty())
        throw ValidationError("sweep axes --n, --lambda and --policy must be non-empty");
    const auto event = parse_event(a.event);
    event.validate();
    const auto init = parse_initial_occupancy(a.init);
    const auto control = load_control(a.control);

    std::vector<SystemConfig> points;
    for (const auto n : a.n)
        for (const auto lambda : a.lambda)
            for (const auto &policy : a.policy)
            {
                SystemConfig config;
                config.n = n;
                config.lambda = lambda;
                config.horizon = a.horizon;
                config.init = init;
                config.policy = parse_policy(policy);
                config.max_level = a.max_level;
                if (config.policy == Policy::controlled)
                    config.control = control;
                try
                {
                    config.validate();
                }
                catch (const ValidationError &e)
                {
                    throw ValidationError("sweep point n=" + std::to_string(n) +
                                          " lambda=" + format_number(lambda) + " policy=" +
                                          policy + ": " + e.what());
                }
                points.push_back(std::move(config));
            }

    auto csv = open_output(a.out);
    auto plot = open_output(a.plot);
    csv << estimate_csv_header() << '\n';
    plot << "n,log_rate,policy\n";
    std::vector<std::string> records;
    for (const auto &config : points)
    {
        EstimateRecord record;
        record.n = config.n;
        record.lambda = config.lambda;
        record.horizon = config.horizon;
        record.policy = config.policy;
        record.event = event.name();
        record.result = estimate_event(config, event, a.replications, a.seed, a.threads);
        csv << estimate_csv_row(record) << '\n';
        plot << record.n << ',' << format_number(record.result.log_rate) << ','
             << to_string(record.policy) << '\n';
        if (!a.json_out.empty())
            records.push_back(estimate_json(record));
        out << to_string(record.policy) << " n=" << record.n
            << " lambda=" << format_number(record.lambda) << ' ' << record.event
            << " p_hat=" << format_number(record.result.p_hat) << " ["
            << format_number(record.result.ci_low) << ", "
            << format_number(record.result.ci_high) << "] log_rate="
            << format_number(record.result.log_rate) << " hits=" << record.result.hits << '/'
            << record.result.replications << '\n';
    }
    finish_output(csv, a.out);
    finish_output(plot, a.plot);
    if (!a.json_out.empty())
    {
        auto js = open_output(a.json_out);
        js << "[";
        for (std::size_t i = 0; i < records.size(); ++i)
            js << (i == 0 ? "\n" : ",\n") << records[i];
        js << "\n]\n";
        finish_output(js, a.json_out);
    }
    out << "wrote: " << a.out << ", " << a.plot;
    if (!a.json_out.empty())
        out << ", " << a.json_out;
    out << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------------------
// rate

struct RateArgs
{
    std::size_t j = 3;
    double horizon = 1.0;
    bool search = false;
    std::size_t refine = ratefn::SearchOptions{}.refine;
    std::size_t restarts = ratefn::SearchOptions{}.restarts;
    std::uint64_t seed = 1;
    bool json_output = false;
};

int cmd_rate(const RateArgs &a, std::ostream &out)
{
    auto doc = nlohmann::ordered_json::parse(ratefn::rate_json(a.j, a.horizon));
    std::optional<ratefn::SearchResult> found;
    if (a.search)
    {
        found = ratefn::variational_search(a.j, a.horizon, {a.refine, a.restarts, a.seed});
        doc["search_value"] = found->value;
        doc["search_partition"] = found->best.partition;
        doc["search_gap"] = found->value - doc["rate"].get<double>();
    }
    if (a.json_output)
    {
        out << doc.dump(2) << '\n';
        return exit_ok;
    }
    const auto num = [&](const char *key) { return format_number(doc[key].get<double>()); };
    out << "j: " << a.j << '\n'
        << "T: " << format_number(a.horizon) << '\n'
        << "rate: " << num("rate") << '\n'
        << "large_T_limit: " << num("large_T_limit") << '\n'
        << "a_j: " << num("a_j") << '\n'
        << "a: " << num("a") << '\n'
        << "b: " << num("b") << '\n';
    if (found)
    {
        out << "search_value: " << format_number(found->value) << '\n'
            << "search_gap: " << num("search_gap") << '\n'
            << "search_partition:";
        for (const auto tau : found->best.partition)
            out << ' ' << format_number(tau);
        out << '\n';
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// fluid

struct FluidArgs
{
    std::string control;
    std::vector<std::string> optimal;
    double lambda = 1.0;
    std::string init = "ones";
    double dt = 0.0;
    std::size_t coordinates = 0;
    std::string out = "fluid.csv";
    std::string json_out;
};

int cmd_fluid(const FluidArgs &a, std::ostream &out)
{
    if (a.control.empty() == a.optimal.empty())
        throw ValidationError("exactly one of --control or --optimal is required");
    std::optional<ControlPolicy> control;
    if (!a.control.empty())
    {
        control = load_control(a.control);
    }
    else
    {
        const auto j = parse_level(a.optimal.at(0), "--optimal j");
        double horizon = 0.0;
        try
        {
            horizon = std::stod(a.optimal.at(1));
        }
        catch (const std::exception &)
        {
            throw ValidationError("--optimal T must be a number, got '" + a.optimal.at(1) + "'");
        }
        control = ratefn::optimal_path(j, horizon).control;
    }
    const double horizon = control->horizon();
    const double dt = a.dt > 0.0 ? a.dt : 1e-4 * horizon;
    if (!std::isfinite(dt) || dt > horizon || a.dt < 0.0)
        throw ValidationError("--dt must lie in (0, T]");

    fluid::IntegrateOptions options;
    options.coordinates = a.coordinates;
    const auto path =
        fluid::integrate(*control, parse_initial_occupancy(a.init), horizon, dt, a.lambda, options);
    const double c = fluid::cost(*control, path, a.lambda);

    auto csv = open_output(a.out);
    fluid::write_csv(csv, path);
    finish_output(csv, a.out);
    if (!a.json_out.empty())
    {
        auto js = open_output(a.json_out);
        js << fluid::to_json(path) << '\n';
        finish_output(js, a.json_out);
    }
    for (const auto &note : path.diagnostics)
        out << "note: " << note << '\n';
    out << "T: " << format_number(horizon) << '\n'
        << "dt: " << format_number(dt) << '\n'
        << "coordinates: " << path.coordinates() << '\n'
        << "cost: " << format_number(c) << '\n'
        << "wrote: " << a.out;
    if (!a.json_out.empty())
        out << ", " << a.json_out;
    out << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------------------
// reflect

struct ReflectArgs
{
    std::string input;
    double cap = 1.0;
    std::string out = "reflect.csv";
    std::string json_out;
};

int cmd_reflect(const ReflectArgs &a, std::ostream &out)
{
    if (!(a.cap > 0.0 && std::isfinite(a.cap)))
        throw ValidationError("--cap must be positive");
    const auto text = read_file(a.input);
    const bool is_json = a.input.size() >= 5 && a.input.substr(a.input.size() - 5) == ".json";
    GridPath psi;
    try
    {
        if (is_json)
        {
            psi = grid_from_json_records(text);
        }
        else
        {
            std::istringstream in(text);
            psi = read_grid_csv(in);
        }
    }
    catch (const ValidationError &e)
    {
        throw ValidationError(a.input + ": " + e.what());
    }
    const auto sol = skorokhod::solve_sp(psi, a.cap);

    auto csv = open_output(a.out);
    const auto m = psi.coordinates();
    csv << 't';
    for (std::size_t k = 1; k <= m; ++k)
        csv << ",phi" << k;
    for (std::size_t k = 1; k <= m; ++k)
        csv << ",eta" << k;
    csv << '\n';
    for (std::size_t s = 0; s < psi.size(); ++s)
    {
        csv << format_number(psi.times()[s]);
        for (std::size_t k = 1; k <= m; ++k)
            csv << ',' << format_number(sol.phi(k, s));
        for (std::size_t k = 1; k <= m; ++k)
            csv << ',' << format_number(sol.eta(k, s));
        csv << '\n';
    }
    finish_output(csv, a.out);
    if (!a.json_out.empty())
    {
        auto js = open_output(a.json_out);
        js << "{\"phi\":" << to_json_records(sol.phi) << ",\"eta\":" << to_json_records(sol.eta)
           << "}\n";
        finish_output(js, a.json_out);
    }
    double residual = 0.0;
    for (std::size_t k = 1; k <= m; ++k)
        residual = std::max(residual, skorokhod::complementarity_residual(sol, k, a.cap));
    out << "coordinates: " << m << '\n'
        << "mesh points: " << psi.size() << '\n'
        << "complementarity residual: " << format_number(residual) << '\n'
        << "wrote: " << a.out;
    if (!a.json_out.empty())
        out << ", " << a.json_out;
    out << '\n';
    return exit_ok;
}

void add_estimate_options(CLI::App &cmd, EstimateArgs &a, bool with_policy)
{
    cmd.add_option("--n", a.n, "System sizes to sweep")->capture_default_str();
    cmd.add_option("--lambda", a.lambda, "Arrival rates to sweep")->capture_default_str();
    if (with_policy)
        cmd.add_option("--policy", a.policy, "Policies to sweep (jsq, jiq, controlled)")
            ->capture_default_str();
    cmd.add_option("--T", a.horizon, "Time horizon")->capture_default_str();
    cmd.add_option("--event", a.event, "Event: Ej (reach length j), Gj (X_j > 0), Fj (X_{j-1} = 1)")
        ->capture_default_str();
    cmd.add_option("--init", a.init, "Initial occupancy")->capture_default_str();
    cmd.add_option("--control", a.control, "Control policy JSON file (policy 'controlled')");
    cmd.add_option("--max-level", a.max_level, "Abort when a queue reaches this length")
        ->capture_default_str();
    cmd.add_option("--replications", a.replications, "Replications per sweep point")
        ->capture_default_str();
    cmd.add_option("--seed", a.seed, "Base seed")->capture_default_str();
    cmd.add_option("--threads", a.threads, "Worker threads (default: $JSQ_LDP_THREADS or all cores)");
    cmd.add_option("--out", a.out, "Estimate CSV")->capture_default_str();
    cmd.add_option("--plot", a.plot, "Plot data CSV (n, log_rate, policy)")->capture_default_str();
    cmd.add_option("--json", a.json_out, "Also write estimates as a JSON array");
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Join-the-shortest-queue large deviations toolkit", "jsqldp"};
    app.require_subcommand(1);
    std::string config_path;

    SimulateArgs sim;
    auto *simulate = app.add_subcommand("simulate", "Simulate one sample path");
    simulate->add_option("--n", sim.n, "Number of servers")->capture_default_str();
    add_system_options(*simulate, sim.lambda, sim.horizon, sim.init, sim.control, sim.max_level);
    simulate->add_option("--policy", sim.policy, "jsq, jiq or controlled")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Seed")->capture_default_str();
    simulate->add_option("--out", sim.out, "Event log (JSONL)")->capture_default_str();
    simulate->add_option("--csv", sim.csv, "Also write occupancy sampled every --dt");
    simulate->add_option("--dt", sim.dt, "Sampling step for --csv");

    EstimateArgs est;
    auto *estimate = app.add_subcommand("estimate", "Monte Carlo rare-event estimates over a sweep");
    add_estimate_options(*estimate, est, true);

    EstimateArgs cmp;
    cmp.policy = {"jsq", "jiq"};
    auto *compare = app.add_subcommand("compare", "Estimate sweep with policies jsq and jiq");
    add_estimate_options(*compare, cmp, false);

    RateArgs rate;
    auto *rate_cmd = app.add_subcommand("rate", "Closed-form decay rate of P(E_j)");
    rate_cmd->add_option("--j", rate.j, "Target queue length (>= 3)")->capture_default_str();
    rate_cmd->add_option("--T", rate.horizon, "Time horizon")->capture_default_str();
    rate_cmd->add_flag("--search", rate.search, "Run the variational search certificate");
    rate_cmd->add_option("--refine", rate.refine, "Search sweeps per restart")->capture_default_str();
    rate_cmd->add_option("--restarts", rate.restarts, "Search restarts")->capture_default_str();
    rate_cmd->add_option("--seed", rate.seed, "Search seed")->capture_default_str();
    rate_cmd->add_flag("--json", rate.json_output, "Print JSON");

    FluidArgs fl;
    auto *fluid_cmd = app.add_subcommand("fluid", "Integrate the controlled fluid path and its cost");
    fluid_cmd->add_option("--control", fl.control, "Control policy JSON file");
    fluid_cmd->add_option("--optimal", fl.optimal, "Use the optimal control for E_j on [0, T]")
        ->expected(2)
        ->type_name("J T");
    fluid_cmd->add_option("--lambda", fl.lambda, "Arrival rate")->capture_default_str();
    fluid_cmd->add_option("--init", fl.init, "Initial occupancy")->capture_default_str();
    fluid_cmd->add_option("--dt", fl.dt, "Euler step (default 1e-4 T)");
    fluid_cmd->add_option("--coordinates", fl.coordinates, "Truncation level (default automatic)");
    fluid_cmd->add_option("--out", fl.out, "Path CSV")->capture_default_str();
    fluid_cmd->add_option("--json", fl.json_out, "Also write the path as JSON");

    ReflectArgs rf;
    auto *reflect = app.add_subcommand("reflect", "Solve the cascade Skorokhod problem for a grid path");
    reflect->add_option("--input", rf.input, "Grid path (CSV, or JSON records if *.json)")->required();
    reflect->add_option("--cap", rf.cap, "Upper barrier")->capture_default_str();
    reflect->add_option("--out", rf.out, "Output CSV (t, phi1.., eta1..)")->capture_default_str();
    reflect->add_option("--json", rf.json_out, "Also write phi and eta as JSON records");

    for (auto *cmd : {simulate, estimate, compare, rate_cmd, fluid_cmd, reflect})
        cmd->add_option("--config", config_path, "JSON file of option values; flags override");

    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    try
    {
        try
        {
            app.parse(static_cast<int>(argv.size()), argv.data());
        }
        catch (const CLI::CallForHelp &)
        {
            out << app.help();
            return exit_ok;
        }
        catch (const CLI::CallForAllHelp &)
        {
            out << app.help("", CLI::AppFormatMode::All);
            return exit_ok;
        }
        catch (const CLI::ParseError &e)
        {
            err << "error: " << e.what() << '\n';
            if (e.get_name() == "RequiredError" && app.get_subcommands().empty())
                err << app.help();
            return exit_validation;
        }

        auto *cmd = app.get_subcommands().front();
        if (!config_path.empty())
            apply_config(*cmd, config_path);

        if (cmd == simulate)
            return cmd_simulate(sim, out);
        if (cmd == estimate || cmd == compare)
        {
            auto &a = cmd == estimate ? est : cmp;
            if (a.threads == 0)
                a.threads = default_threads();
            return cmd_estimate(a, out);
        }
        if (cmd == rate_cmd)
            return cmd_rate(rate, out);
        if (cmd == fluid_cmd)
            return cmd_fluid(fl, out);
        return cmd_reflect(rf, out);
    }
    catch (const ValidationError &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    catch (const RuntimeAbort &e)
    {
        err << "aborted: " << e.what() << '\n';
        return exit_runtime;
    }
    catch (const IoError &e)
    {
        err << "i/o error: " << e.what() << '\n';
        return exit_runtime;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

} // namespace jsqldp::cli
