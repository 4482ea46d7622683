#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "crowddiff/engine.hpp"
#include "crowddiff/errors.hpp"
#include "crowddiff/metrics.hpp"

namespace crowddiff {

namespace detail {

// snprintf keeps the C locale ('.' decimal separator) regardless of any
// iostream imbuing; %.12g preserves well over 9 significant digits.
inline std::string csv_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string json_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open output file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError("write failed: " + path);
}

}  // namespace detail

inline std::string metrics_csv_text(std::span<const MetricsRecord> metrics) {
    std::string out = "iteration,v_mean,r_mean,n_obs,n_neck\n";
    for (const MetricsRecord& m : metrics) {
        out += std::to_string(m.iteration);
        out += ',';
        out += detail::csv_num(m.v_mean);
        out += ',';
        out += detail::csv_num(m.r_mean);
        out += ',';
        out += std::to_string(m.n_obs);
        out += ',';
        out += std::to_string(m.n_neck);
        out += '\n';
    }
    return out;
}

inline void write_metrics_csv(const std::string& path, std::span<const MetricsRecord> metrics) {
    detail::write_text_file(path, metrics_csv_text(metrics));
}

// One JSON object per agent-iteration. lc is null wherever the agent sits
// outside the walled stretch of the corridor.
inline std::string trajectory_jsonl_text(std::span<const TrajectoryRecord> records) {
    std::string out;
    out.reserve(records.size() * 160);
    for (const TrajectoryRecord& t : records) {
        out += "{\"iteration\":";
        out += std::to_string(t.iteration);
        out += ",\"agent\":";
        out += std::to_string(t.agent);
        out += ",\"x\":";
        out += detail::json_num(t.position.x);
        out += ",\"y\":";
        out += detail::json_num(t.position.y);
        out += ",\"vx\":";
        out += detail::json_num(t.velocity.x);
        out += ",\"vy\":";
        out += detail::json_num(t.velocity.y);
        out += ",\"region\":\"";
        out += region_name(t.region);
        out += "\",\"r\":";
        out += detail::json_num(t.r_eff);
        out += ",\"alpha\":";
        out += detail::json_num(t.alpha_eff);
        out += ",\"lc\":";
        out += t.lc >= 0.0 ? detail::json_num(t.lc) : std::string("null");
        out += "}\n";
    }
    return out;
}

inline void write_trajectory_jsonl(const std::string& path, std::span<const TrajectoryRecord> records) {
    detail::write_text_file(path, trajectory_jsonl_text(records));
}

// Static plot: two wall polylines, the target polyline, and one path element
// per agent, in simulation coordinates with the y-axis flipped for screen
// space.
inline std::string trajectory_svg_text(const RunResult& r) {
    const Corridor corridor = r.config.make_corridor();
    double min_x = corridor.x_min();
    double max_x = corridor.x_max();
    double min_y = 1e300;
    double max_y = -1e300;
    constexpr int kWallSamples = 128;
    for (int i = 0; i <= kWallSamples; ++i) {
        const double x = corridor.x_min() + (corridor.x_max() - corridor.x_min()) * i / kWallSamples;
        min_y = std::min(min_y, corridor.lower().value(x));
        max_y = std::max(max_y, corridor.upper().value(x));
    }
    for (const TrajectoryRecord& t : r.trajectory) {
        min_x = std::min(min_x, t.position.x);
        max_x = std::max(max_x, t.position.x);
        min_y = std::min(min_y, t.position.y);
        max_y = std::max(max_y, t.position.y);
    }
    for (const Vec2& p : r.target_path) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }

    constexpr double kScale = 12.0;
    constexpr double kPad = 20.0;
    const double width = (max_x - min_x) * kScale + 2 * kPad;
    const double height = (max_y - min_y) * kScale + 2 * kPad;
    auto sx = [&](double x) { return (x - min_x) * kScale + kPad; };
    auto sy = [&](double y) { return (max_y - y) * kScale + kPad; };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", v);
        return std::string(buf);
    };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) + "\" height=\"" +
                      fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " + fmt(height) + "\">\n";

    auto wall_polyline = [&](const WallFunction& wall, const char* color) {
        std::string pts;
        for (int i = 0; i <= kWallSamples; ++i) {
            const double x = corridor.x_min() + (corridor.x_max() - corridor.x_min()) * i / kWallSamples;
            if (i) pts += ' ';
            pts += fmt(sx(x)) + "," + fmt(sy(wall.value(x)));
        }
        svg += "<polyline class=\"wall\" fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
    };
    wall_polyline(corridor.upper(), "#333333");
    wall_polyline(corridor.lower(), "#333333");

    {
        std::string pts;
        for (std::size_t i = 0; i < r.target_path.size(); ++i) {
            if (i) pts += ' ';
            pts += fmt(sx(r.target_path[i].x)) + "," + fmt(sy(r.target_path[i].y));
        }
        svg += "<polyline class=\"target\" fill=\"none\" stroke=\"#cc2222\" stroke-width=\"1.5\" "
               "stroke-dasharray=\"4 3\" points=\"" +
               pts + "\"/>\n";
    }

    const int n = r.config.n_agents;
    std::vector<std::string> agent_d(n);
    for (const TrajectoryRecord& t : r.trajectory) {
        std::string& d = agent_d[t.agent];
        d += d.empty() ? "M " : " L ";
        d += fmt(sx(t.position.x)) + " " + fmt(sy(t.position.y));
    }
    for (int k = 0; k < n; ++k) {
        const int hue = (k * 47) % 360;
        svg += "<path class=\"agent\" fill=\"none\" stroke=\"hsl(" + std::to_string(hue) +
               ",60%,45%)\" stroke-width=\"1\" d=\"" + agent_d[k] + "\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

inline void write_trajectory_svg(const std::string& path, const RunResult& r) {
    detail::write_text_file(path, trajectory_svg_text(r));
}

}  // namespace crowddiff
