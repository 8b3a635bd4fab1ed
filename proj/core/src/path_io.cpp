#include "jsqldp/path_io.hpp"

#include "jsqldp/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace jsqldp
{

void write_jsonl(std::ostream &out, const SamplePath &path)
{
    for (std::size_t e = 0; e < path.entries(); ++e)
    {
        out << "{\"t\":" << format_number(path.times[e]) << ",\"kind\":\""
            << to_string(path.kinds[e]) << "\",\"level\":" << path.levels[e] << ",\"counts\":[";
        bool first = true;
        const auto &row = path.counts[e];
        for (std::size_t i = 0; i < row.size(); ++i)
        {
            if (row[i] == 0)
                continue;
            out << (first ? "" : ",") << '[' << (i + 1) << ',' << row[i] << ']';
            first = false;
        }
        out << "]}\n";
    }
}

void write_sampled_csv(std::ostream &out, const SamplePath &path, double dt)
{
    const auto mesh = uniform_mesh(path.final_time, dt);
    const std::size_t m = std::max<std::size_t>(path.max_level_reached(), 1);
    out << 't';
    for (std::size_t k = 1; k <= m; ++k)
        out << ",x" << k;
    out << '\n';
    for (const double t : mesh)
    {
        const auto e = path.entry_at(t);
        out << format_number(t);
        for (std::size_t k = 1; k <= m; ++k)
            out << ',' << format_number(path.x(e, k));
        out << '\n';
    }
}

std::string estimate_csv_header()
{
    return "n,lambda,T,policy,event,p_hat,ci_low,ci_high,log_rate,replications,hits,seed";
}

std::string estimate_csv_row(const EstimateRecord &r)
{
    std::ostringstream os;
    os << r.n << ',' << format_number(r.lambda) << ',' << format_number(r.horizon) << ','
       << to_string(r.policy) << ',' << r.event << ',' << format_number(r.result.p_hat) << ','
       << format_number(r.result.ci_low) << ',' << format_number(r.result.ci_high) << ','
       << format_number(r.result.log_rate) << ',' << r.result.replications << ','
       << r.result.hits << ',' << r.result.seed;
    return os.str();
}

std::string estimate_json(const EstimateRecord &r)
{
    nlohmann::ordered_json doc;
    doc["n"] = r.n;
    doc["lambda"] = r.lambda;
    doc["T"] = r.horizon;
    doc["policy"] = to_string(r.policy);
    doc["event"] = r.event;
    doc["p_hat"] = r.result.p_hat;
    doc["ci_low"] = r.result.ci_low;
    doc["ci_high"] = r.result.ci_high;
    if (std::isfinite(r.result.log_rate))
        doc["log_rate"] = r.result.log_rate;
    else
        doc["log_rate"] = nullptr;
    doc["replications"] = r.result.replications;
    doc["hits"] = r.result.hits;
    doc["seed"] = r.result.seed;
    return doc.dump();
}

} // namespace jsqldp
