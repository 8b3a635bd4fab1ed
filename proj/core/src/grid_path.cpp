#include "jsqldp/grid_path.hpp"

#include "jsqldp/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace jsqldp
{

void validate_mesh(std::span<const double> times)
{
    if (times.empty())
        throw ValidationError("grid path: empty time mesh");
    if (times.front() != 0.0)
        throw ValidationError("grid path: mesh must start at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i)
    {
        if (!(times[i] > times[i - 1]))
            throw ValidationError("grid path: mesh not strictly increasing at index " +
                                  std::to_string(i));
    }
}

GridPath::GridPath(std::vector<double> times, std::size_t coordinates)
    : times_(std::move(times)), values_(coordinates, std::vector<double>(times_.size(), 0.0))
{
    validate_mesh(times_);
    if (coordinates == 0)
        throw ValidationError("grid path: at least one coordinate required");
}

GridPath::GridPath(std::vector<double> times, std::vector<std::vector<double>> values)
    : times_(std::move(times)), values_(std::move(values))
{
    validate_mesh(times_);
    if (values_.empty())
        throw ValidationError("grid path: at least one coordinate required");
    for (std::size_t k = 0; k < values_.size(); ++k)
    {
        if (values_[k].size() != times_.size())
            throw ValidationError("grid path: coordinate " + std::to_string(k + 1) +
                                  " length does not match mesh");
    }
}

std::span<const double> GridPath::coordinate(std::size_t k) const
{
    if (k == 0 || k > values_.size())
        throw std::out_of_range("grid path: coordinate index out of range");
    return values_[k - 1];
}

std::span<double> GridPath::coordinate(std::size_t k)
{
    if (k == 0 || k > values_.size())
        throw std::out_of_range("grid path: coordinate index out of range");
    return values_[k - 1];
}

GridPath GridPath::leading(std::size_t m) const
{
    if (m == 0 || m > values_.size())
        throw ValidationError("grid path: cannot take " + std::to_string(m) + " of " +
                              std::to_string(values_.size()) + " coordinates");
    return GridPath(times_, std::vector<std::vector<double>>(values_.begin(),
                                                             values_.begin() + static_cast<long>(m)));
}

double sup_distance(const GridPath &a, const GridPath &b)
{
    if (!a.same_mesh(b))
        throw ValidationError("sup_distance: paths are sampled on different meshes");
    const std::size_t m = std::min(a.coordinates(), b.coordinates());
    double total = 0.0;
    double weight = 0.5;
    for (std::size_t k = 1; k <= m; ++k, weight *= 0.5)
    {
        const auto ak = a.coordinate(k);
        const auto bk = b.coordinate(k);
        double gap = 0.0;
        for (std::size_t i = 0; i < ak.size(); ++i)
            gap = std::max(gap, std::abs(ak[i] - bk[i]));
        total += weight * gap;
    }
    return total;
}

std::vector<double> uniform_mesh(double horizon, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ValidationError("uniform_mesh: dt must be positive");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("uniform_mesh: horizon must be positive");
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    std::vector<double> mesh(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i)
        mesh[i] = std::min(static_cast<double>(i) * dt, horizon);
    mesh.back() = horizon;
    return mesh;
}

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void write_csv(std::ostream &out, const GridPath &path, const std::string &prefix)
{
    out << 't';
    for (std::size_t k = 1; k <= path.coordinates(); ++k)
        out << ',' << prefix << k;
    out << '\n';
    const auto times = path.times();
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        out << format_number(times[i]);
        for (std::size_t k = 1; k <= path.coordinates(); ++k)
            out << ',' << format_number(path(k, i));
        out << '\n';
    }
}

GridPath read_grid_csv(std::istream &in)
{
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    while (std::getline(in, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (columns == 0)
        {
            // header row
            if (cells.size() < 2)
                throw ValidationError("grid csv line " + std::to_string(line_no) +
                                      ": need a time column and at least one coordinate");
            columns = cells.size();
            values.assign(columns - 1, {});
            continue;
        }
        if (cells.size() != columns)
            throw ValidationError("grid csv line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(columns) + " fields, got " +
                                  std::to_string(cells.size()));
        for (std::size_t c = 0; c < columns; ++c)
        {
            double v = 0.0;
            try
            {
                std::size_t used = 0;
                v = std::stod(cells[c], &used);
                if (used != cells[c].size())
                    throw std::invalid_argument("trailing");
            }
            catch (const std::exception &)
            {
                throw ValidationError("grid csv line " + std::to_string(line_no) +
                                      ": field " + std::to_string(c + 1) + " is not a number");
            }
            if (c == 0)
                times.push_back(v);
            else
                values[c - 1].push_back(v);
        }
    }
    if (columns == 0)
        throw ValidationError("grid csv: no header");
    return GridPath(std::move(times), std::move(values));
}

std::string to_json_records(const GridPath &path)
{
    nlohmann::json records = nlohmann::json::array();
    const auto times = path.times();
    for (std::size_t i = 0; i < times.size(); ++i)
    {
        nlohmann::json x = nlohmann::json::array();
        for (std::size_t k = 1; k <= path.coordinates(); ++k)
            x.push_back(path(k, i));
        records.push_back({{"t", times[i]}, {"x", std::move(x)}});
    }
    return records.dump();
}

GridPath grid_from_json_records(const std::string &text)
{
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ValidationError(std::string("grid json: ") + e.what());
    }
    if (!doc.is_array() || doc.empty())
        throw ValidationError("grid json: expected a non-empty array of records");
    std::vector<double> times;
    std::vector<std::vector<double>> values;
    for (std::size_t i = 0; i < doc.size(); ++i)
    {
        const auto &rec = doc[i];
        if (!rec.contains("t") || !rec.contains("x") || !rec["x"].is_array())
            throw ValidationError("grid json: record " + std::to_string(i) +
                                  " needs fields \"t\" and \"x\"");
        const auto &x = rec["x"];
        if (i == 0)
            values.assign(x.size(), {});
        if (x.size() != values.size())
            throw ValidationError("grid json: record " + std::to_string(i) +
                                  " has a different coordinate count");
        times.push_back(rec["t"].get<double>());
        for (std::size_t k = 0; k < x.size(); ++k)
            values[k].push_back(x[k].get<double>());
    }
    return GridPath(std::move(times), std::move(values));
}

} // namespace jsqldp
