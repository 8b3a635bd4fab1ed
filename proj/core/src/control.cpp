#include "jsqldp/control.hpp"

#include "jsqldp/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace jsqldp
{

namespace
{

void check_rate(double v, const std::string &what)
{
    if (!std::isfinite(v) || v < 0.0)
        throw ValidationError("control: " + what + " must be finite and nonnegative");
}

std::size_t line_of(const std::string &text, std::size_t offset)
{
    offset = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

/// Line of the first occurrence of `"key"`, for schema errors.
std::size_t line_of_key(const std::string &text, const std::string &key)
{
    const auto pos = text.find('"' + key + '"');
    return pos == std::string::npos ? 0 : line_of(text, pos);
}

} // namespace

ControlPolicy::ControlPolicy(std::vector<double> mesh, std::vector<Segment> segments)
    : mesh_(std::move(mesh)), segments_(std::move(segments))
{
    if (mesh_.size() < 2)
        throw ValidationError("control: mesh needs at least two breakpoints");
    if (mesh_.front() != 0.0)
        throw ValidationError("control: mesh must start at 0");
    for (std::size_t i = 1; i < mesh_.size(); ++i)
        if (!(mesh_[i] > mesh_[i - 1]) || !std::isfinite(mesh_[i]))
            throw ValidationError("control: mesh not strictly increasing at breakpoint " +
                                  std::to_string(i));
    if (segments_.size() != mesh_.size() - 1)
        throw ValidationError("control: " + std::to_string(mesh_.size() - 1) +
                              " segments expected, got " + std::to_string(segments_.size()));
    for (std::size_t s = 0; s < segments_.size(); ++s)
    {
        check_rate(segments_[s].phi0, "phi0 on segment " + std::to_string(s));
        for (std::size_t k = 0; k < segments_[s].rho.size(); ++k)
            check_rate(segments_[s].rho[k],
                       "rho_" + std::to_string(k + 1) + " on segment " + std::to_string(s));
    }
}

ControlPolicy ControlPolicy::null_control(double horizon)
{
    return ControlPolicy({0.0, horizon}, {Segment{}});
}

ControlPolicy ControlPolicy::constant(double horizon, double phi0, std::vector<double> rho)
{
    return ControlPolicy({0.0, horizon}, {Segment{phi0, std::move(rho)}});
}

std::size_t ControlPolicy::segment_at(double t) const
{
    if (!(t >= 0.0) || t > mesh_.back())
        throw ValidationError("control: lookup at t = " + std::to_string(t) +
                              " outside [0, " + std::to_string(mesh_.back()) + "]");
    const auto it = std::upper_bound(mesh_.begin(), mesh_.end(), t);
    const auto idx = static_cast<std::size_t>(it - mesh_.begin());
    return std::min(idx, segments_.size()) - 1;
}

double ControlPolicy::rho(std::size_t segment, std::size_t k) const
{
    const auto &r = segments_.at(segment).rho;
    return k >= 1 && k <= r.size() ? r[k - 1] : 1.0;
}

std::size_t ControlPolicy::highest_active_level() const noexcept
{
    std::size_t top = 0;
    for (const auto &seg : segments_)
        for (std::size_t k = seg.rho.size(); k > top; --k)
            if (seg.rho[k - 1] != 1.0)
            {
                top = k;
                break;
            }
    return top;
}

ControlPolicy control_from_json(const std::string &text)
{
    nlohmann::json doc;
    try
    {
        doc = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw ValidationError("control json line " + std::to_string(line_of(text, e.byte)) +
                              ": " + e.what());
    }
    auto fail = [&](const std::string &key, const std::string &msg) -> ValidationError {
        const auto line = line_of_key(text, key);
        return ValidationError("control json" +
                               (line ? " line " + std::to_string(line) : std::string{}) + ": " +
                               msg);
    };
    if (!doc.is_object())
        throw ValidationError("control json line 1: top level must be an object");
    if (!doc.contains("mesh") || !doc["mesh"].is_array())
        throw fail("mesh", "\"mesh\" must be an array of breakpoints");
    if (!doc.contains("segments") || !doc["segments"].is_array())
        throw fail("segments", "\"segments\" must be an array");

    std::vector<double> mesh;
    for (const auto &v : doc["mesh"])
    {
        if (!v.is_number())
            throw fail("mesh", "mesh entries must be numbers");
        mesh.push_back(v.get<double>());
    }
    std::vector<ControlPolicy::Segment> segments;
    for (const auto &s : doc["segments"])
    {
        if (!s.is_object())
            throw fail("segments", "each segment must be an object");
        ControlPolicy::Segment seg;
        if (s.contains("phi0"))
        {
            if (!s["phi0"].is_number())
                throw fail("phi0", "\"phi0\" must be a number");
            seg.phi0 = s["phi0"].get<double>();
        }
        if (s.contains("rho"))
        {
            if (!s["rho"].is_array())
                throw fail("rho", "\"rho\" must be an array");
            for (const auto &v : s["rho"])
            {
                if (!v.is_number())
                    throw fail("rho", "rho entries must be numbers");
                seg.rho.push_back(v.get<double>());
            }
        }
        segments.push_back(std::move(seg));
    }
    try
    {
        return ControlPolicy(std::move(mesh), std::move(segments));
    }
    catch (const ValidationError &e)
    {
        throw fail("segments", e.what());
    }
}

std::string control_to_json(const ControlPolicy &control)
{
    nlohmann::json doc;
    doc["mesh"] = control.mesh();
    doc["segments"] = nlohmann::json::array();
    for (const auto &s : control.segments())
        doc["segments"].push_back({{"phi0", s.phi0}, {"rho", s.rho}});
    return doc.dump(2);
}

} // namespace jsqldp
