#pragma once

#include "jsqldp/rare_event.hpp"
#include "jsqldp/simulator.hpp"

#include <iosfwd>
#include <string>

namespace jsqldp
{

/// One line per entry:
/// {"t":..,"kind":"arrival","level":3,"counts":[[1,n_1],[2,n_2],...]}
/// with sparse (level, count) pairs for nonzero counts.
void write_jsonl(std::ostream &out, const SamplePath &path);

/// Samples X at t = 0, dt, 2dt, ..., final_time (right-continuous).
/// Header: t,x1,...,xM with M = max(levels reached, 1).
void write_sampled_csv(std::ostream &out, const SamplePath &path, double dt);

/// Estimate plus the sweep coordinates that produced it.
struct EstimateRecord
{
    std::int64_t n = 0;
    double lambda = 0.0;
    double horizon = 0.0;
    Policy policy = Policy::jsq;
    std::string event;
    EstimateResult result;
};

/// Column order of the estimate CSV (stable; covered by golden tests).
std::string estimate_csv_header();
std::string estimate_csv_row(const EstimateRecord &record);
/// log_rate is emitted as null when there were no hits.
std::string estimate_json(const EstimateRecord &record);

} // namespace jsqldp
