#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "crowddiff/errors.hpp"
#include "crowddiff/geometry.hpp"
#include "crowddiff/motion.hpp"
#include "crowddiff/vec2.hpp"

namespace crowddiff {

struct TargetModel {
    bool is_static = false;
    Vec2 static_position;
    std::vector<Vec2> waypoints;
    double speed = 2.0;
    bool operator==(const TargetModel&) const = default;
};

// Full scenario description. Defaults reproduce the reference corridor setup;
// an empty config file yields exactly these values.
struct ScenarioConfig {
    int n_agents = 40;
    int iterations = 120;
    std::uint64_t seed = 1;
    MotionParams motion;
    double noise_std = 0.1;
    bool avid_enabled = true;
    bool rebuild_neighborhoods = true;
    std::vector<double> wall_upper = {20.8, -0.16, 0.008};
    std::vector<double> wall_lower = {14.8, 0.16, 0.008};
    double x_min = -80.0;
    double x_max = 4.0;
    double spawn_x_min = -72.0;
    double spawn_x_max = -57.0;
    double spawn_y_min = 45.0;
    double spawn_y_max = 55.7;
    double spawn_min_spacing = 1.45;
    TargetModel target;
    double neck_resolution = 0.25;
    double neck_half_width = -1.0;  // negative: use 2 * comm_radius

    ScenarioConfig() {
        target.is_static = false;
        // lead the crowd from well ahead, down the mid-curve and out the open
        // end; the final leg is long enough that the target never halts inside
        // a default-length run
        target.waypoints = {{-50.0, 37.8}, {-40.0, 30.6}, {-30.0, 25.0}, {-20.0, 21.0},
                            {-10.0, 18.6}, {0.0, 17.8},   {20.0, 18.5},  {260.0, 18.5}};
        // faster than any agent's sprint so the column strings out instead of
        // piling up behind the leader
        target.speed = 4.0;
    }

    bool operator==(const ScenarioConfig&) const = default;

    Corridor make_corridor() const {
        auto coeffs_of = [](const std::vector<double>& v, WallSide s) {
            WallFunction w;
            w.side = s;
            for (std::size_t i = 0; i < v.size() && i < 5; ++i) w.coeffs[i] = v[i];
            w.degree = static_cast<int>(v.size()) - 1;
            while (w.degree > 0 && w.coeffs[w.degree] == 0.0) --w.degree;
            return w;
        };
        return Corridor(coeffs_of(wall_upper, WallSide::Upper), coeffs_of(wall_lower, WallSide::Lower),
                        x_min, x_max);
    }

    double neck_band_half_width() const {
        return neck_half_width > 0.0 ? neck_half_width : 2.0 * motion.comm_radius;
    }
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex_digest(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] inline void config_fail(const std::string& key, int line, const std::string& what) {
    throw ConfigError("config key '" + key + "' (line " + std::to_string(line) + "): " + what);
}

inline double parse_double_value(std::string_view v, const std::string& key, int line) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) config_fail(key, line, "expected a number, got '" + std::string(v) + "'");
    return out;
}

inline long long parse_int_value(std::string_view v, const std::string& key, int line) {
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        config_fail(key, line, "expected an integer, got '" + std::string(v) + "'");
    return out;
}

inline std::uint64_t parse_u64_value(std::string_view v, const std::string& key, int line) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        config_fail(key, line, "expected an unsigned integer, got '" + std::string(v) + "'");
    return out;
}

inline bool parse_bool_value(std::string_view v, const std::string& key, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    config_fail(key, line, "expected true or false, got '" + std::string(v) + "'");
}

inline std::vector<double> parse_array_value(std::string_view v, const std::string& key, int line) {
    v = trim(v);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        config_fail(key, line, "expected a bracketed array like [a, b, c]");
    v = v.substr(1, v.size() - 2);
    std::vector<double> out;
    while (true) {
        v = trim(v);
        if (v.empty()) break;
        const std::size_t comma = v.find(',');
        const std::string_view item = trim(comma == std::string_view::npos ? v : v.substr(0, comma));
        if (item.empty()) config_fail(key, line, "empty array element");
        out.push_back(parse_double_value(item, key, line));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
        if (trim(v).empty()) config_fail(key, line, "trailing comma in array");
    }
    return out;
}

inline std::vector<Vec2> parse_points_value(std::string_view v, const std::string& key, int line) {
    const std::vector<double> flat = parse_array_value(v, key, line);
    if (flat.empty() || flat.size() % 2 != 0)
        config_fail(key, line, "expected an even number of coordinates (x0, y0, x1, y1, ...)");
    std::vector<Vec2> pts(flat.size() / 2);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {flat[2 * i], flat[2 * i + 1]};
    return pts;
}

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

// Invariant checks shared by the parser and programmatic construction. Throws
// ConfigError naming the offending key(s).
inline void validate_config(const ScenarioConfig& c) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError("config validation: " + msg);
    };
    const MotionParams& m = c.motion;
    need(c.n_agents >= 1, "n_agents must be >= 1");
    need(c.iterations >= 0, "iterations must be >= 0");
    need(m.dt > 0.0, "dt must be > 0");
    need(m.comm_radius > 0.0, "comm_radius must be > 0");
    need(m.desired_dist > 0.0, "desired_dist must be > 0");
    need(m.r_min > 0.0, "r_min must be > 0");
    need(m.r_min <= m.desired_dist,
         "r_min (" + detail::fmt_double(m.r_min) + ") must not exceed desired_dist (" +
             detail::fmt_double(m.desired_dist) + ")");
    need(m.tolerable_dist > 0.0, "tolerable_dist must be > 0");
    need(m.alpha > 0.0, "alpha must be > 0");
    need(m.alpha_max > 0.0, "alpha_max must be > 0");
    need(m.alpha <= m.alpha_max,
         "alpha (" + detail::fmt_double(m.alpha) + ") must not exceed alpha_max (" +
             detail::fmt_double(m.alpha_max) + ")");
    need(m.standard_width > 0.0, "standard_width must be > 0");
    need(m.mu > 0.0, "mu must be > 0");
    need(m.nu > 0.0, "nu must be > 0");
    need(m.lambda >= 0.0 && m.lambda <= 1.0, "lambda must be in [0, 1]");
    need(m.gamma >= 0.0, "gamma must be >= 0");
    need(m.eta >= 0.0, "eta must be >= 0");
    need(c.noise_std >= 0.0, "noise_std must be >= 0");
    need(!c.wall_upper.empty() && c.wall_upper.size() <= 5, "wall_upper needs 1..5 coefficients");
    need(!c.wall_lower.empty() && c.wall_lower.size() <= 5, "wall_lower needs 1..5 coefficients");
    need(c.x_min < c.x_max, "x_domain: x_min must be < x_max");
    need(c.spawn_x_min < c.spawn_x_max, "spawn_box: x range empty");
    need(c.spawn_y_min < c.spawn_y_max, "spawn_box: y range empty");
    need(c.spawn_min_spacing > 0.0, "spawn_min_spacing must be > 0");
    need(c.neck_resolution > 0.0, "neck_resolution must be > 0");
    need(c.target.speed > 0.0, "target_speed must be > 0");
    if (!c.target.is_static) need(!c.target.waypoints.empty(), "target_waypoints must not be empty");

    Corridor corridor = [&c]() {
        try {
            return c.make_corridor();
        } catch (const GeometryError& e) {
            throw ConfigError(std::string("config validation: wall_upper/wall_lower/x_domain: ") + e.what());
        }
    }();

    // spawn rectangle strictly inside the corridor
    constexpr int kChecks = 256;
    for (int i = 0; i <= kChecks; ++i) {
        const double x = c.spawn_x_min + (c.spawn_x_max - c.spawn_x_min) * i / kChecks;
        need(corridor.in_domain(x), "spawn_box extends outside the corridor x-domain");
        need(corridor.strictly_inside({x, c.spawn_y_min}) && corridor.strictly_inside({x, c.spawn_y_max}),
             "spawn_box must lie strictly inside the corridor (violated near x=" + detail::fmt_double(x) + ")");
    }

    auto check_target_point = [&](const Vec2& p, const char* key) {
        if (corridor.in_domain(p.x))
            need(corridor.strictly_inside(p),
                 std::string(key) + ": point (" + detail::fmt_double(p.x) + ", " + detail::fmt_double(p.y) +
                     ") is inside the x-domain but outside the walls");
    };
    if (c.target.is_static)
        check_target_point(c.target.static_position, "target_position");
    else
        for (const Vec2& p : c.target.waypoints) check_target_point(p, "target_waypoints");
}

// Flat key = value text, '#' comments, arrays in brackets. Unknown and
// duplicate keys are hard errors with key name and line number.
inline ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view sv(raw);
        const std::size_t hash = sv.find('#');
        if (hash != std::string_view::npos) sv = sv.substr(0, hash);
        sv = detail::trim(sv);
        if (sv.empty()) continue;
        const std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line) + ": expected 'key = value', got '" +
                              std::string(sv) + "'");
        const std::string key(detail::trim(sv.substr(0, eq)));
        const std::string_view val = detail::trim(sv.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line) + ": empty key");
        if (val.empty()) detail::config_fail(key, line, "empty value");
        if (!seen.insert(key).second) detail::config_fail(key, line, "duplicate key");

        if (key == "n_agents") {
            cfg.n_agents = static_cast<int>(detail::parse_int_value(val, key, line));
        } else if (key == "iterations") {
            cfg.iterations = static_cast<int>(detail::parse_int_value(val, key, line));
        } else if (key == "seed") {
            cfg.seed = detail::parse_u64_value(val, key, line);
        } else if (key == "dt") {
            cfg.motion.dt = detail::parse_double_value(val, key, line);
        } else if (key == "comm_radius") {
            cfg.motion.comm_radius = detail::parse_double_value(val, key, line);
        } else if (key == "desired_dist") {
            cfg.motion.desired_dist = detail::parse_double_value(val, key, line);
        } else if (key == "tolerable_dist") {
            cfg.motion.tolerable_dist = detail::parse_double_value(val, key, line);
        } else if (key == "r_min") {
            cfg.motion.r_min = detail::parse_double_value(val, key, line);
        } else if (key == "alpha_max") {
            cfg.motion.alpha_max = detail::parse_double_value(val, key, line);
        } else if (key == "standard_width") {
            cfg.motion.standard_width = detail::parse_double_value(val, key, line);
        } else if (key == "mu") {
            cfg.motion.mu = detail::parse_double_value(val, key, line);
        } else if (key == "nu") {
            cfg.motion.nu = detail::parse_double_value(val, key, line);
        } else if (key == "lambda") {
            cfg.motion.lambda = detail::parse_double_value(val, key, line);
        } else if (key == "alpha") {
            cfg.motion.alpha = detail::parse_double_value(val, key, line);
        } else if (key == "gamma") {
            cfg.motion.gamma = detail::parse_double_value(val, key, line);
        } else if (key == "eta") {
            cfg.motion.eta = detail::parse_double_value(val, key, line);
        } else if (key == "noise_std") {
            cfg.noise_std = detail::parse_double_value(val, key, line);
        } else if (key == "avid_enabled") {
            cfg.avid_enabled = detail::parse_bool_value(val, key, line);
        } else if (key == "rebuild_neighborhoods") {
            cfg.rebuild_neighborhoods = detail::parse_bool_value(val, key, line);
        } else if (key == "wall_upper") {
            cfg.wall_upper = detail::parse_array_value(val, key, line);
        } else if (key == "wall_lower") {
            cfg.wall_lower = detail::parse_array_value(val, key, line);
        } else if (key == "x_domain") {
            const auto v = detail::parse_array_value(val, key, line);
            if (v.size() != 2) detail::config_fail(key, line, "expected [x_min, x_max]");
            cfg.x_min = v[0];
            cfg.x_max = v[1];
        } else if (key == "spawn_box") {
            const auto v = detail::parse_array_value(val, key, line);
            if (v.size() != 4) detail::config_fail(key, line, "expected [x_min, x_max, y_min, y_max]");
            cfg.spawn_x_min = v[0];
            cfg.spawn_x_max = v[1];
            cfg.spawn_y_min = v[2];
            cfg.spawn_y_max = v[3];
        } else if (key == "spawn_min_spacing") {
            cfg.spawn_min_spacing = detail::parse_double_value(val, key, line);
        } else if (key == "target_mode") {
            if (val == "static")
                cfg.target.is_static = true;
            else if (val == "waypoints")
                cfg.target.is_static = false;
            else
                detail::config_fail(key, line, "expected static or waypoints");
        } else if (key == "target_position") {
            const auto v = detail::parse_array_value(val, key, line);
            if (v.size() != 2) detail::config_fail(key, line, "expected [x, y]");
            cfg.target.static_position = {v[0], v[1]};
        } else if (key == "target_waypoints") {
            cfg.target.waypoints = detail::parse_points_value(val, key, line);
        } else if (key == "target_speed") {
            cfg.target.speed = detail::parse_double_value(val, key, line);
        } else if (key == "neck_resolution") {
            cfg.neck_resolution = detail::parse_double_value(val, key, line);
        } else if (key == "neck_half_width") {
            cfg.neck_half_width = detail::parse_double_value(val, key, line);
        } else {
            detail::config_fail(key, line, "unknown key");
        }
    }
    validate_config(cfg);
    return cfg;
}

inline ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

inline std::string read_file_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Canonical emission: every key, fixed order, exact round-trip values.
inline std::string serialize_config(const ScenarioConfig& c) {
    using detail::fmt_double;
    std::ostringstream out;
    auto arr = [](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ", ";
            s += detail::fmt_double(v[i]);
        }
        return s + "]";
    };
    out << "n_agents = " << c.n_agents << "\n";
    out << "iterations = " << c.iterations << "\n";
    out << "seed = " << c.seed << "\n";
    out << "dt = " << fmt_double(c.motion.dt) << "\n";
    out << "comm_radius = " << fmt_double(c.motion.comm_radius) << "\n";
    out << "desired_dist = " << fmt_double(c.motion.desired_dist) << "\n";
    out << "tolerable_dist = " << fmt_double(c.motion.tolerable_dist) << "\n";
    out << "r_min = " << fmt_double(c.motion.r_min) << "\n";
    out << "alpha_max = " << fmt_double(c.motion.alpha_max) << "\n";
    out << "standard_width = " << fmt_double(c.motion.standard_width) << "\n";
    out << "mu = " << fmt_double(c.motion.mu) << "\n";
    out << "nu = " << fmt_double(c.motion.nu) << "\n";
    out << "lambda = " << fmt_double(c.motion.lambda) << "\n";
    out << "alpha = " << fmt_double(c.motion.alpha) << "\n";
    out << "gamma = " << fmt_double(c.motion.gamma) << "\n";
    out << "eta = " << fmt_double(c.motion.eta) << "\n";
    out << "noise_std = " << fmt_double(c.noise_std) << "\n";
    out << "avid_enabled = " << (c.avid_enabled ? "true" : "false") << "\n";
    out << "rebuild_neighborhoods = " << (c.rebuild_neighborhoods ? "true" : "false") << "\n";
    out << "wall_upper = " << arr(c.wall_upper) << "\n";
    out << "wall_lower = " << arr(c.wall_lower) << "\n";
    out << "x_domain = [" << fmt_double(c.x_min) << ", " << fmt_double(c.x_max) << "]\n";
    out << "spawn_box = [" << fmt_double(c.spawn_x_min) << ", " << fmt_double(c.spawn_x_max) << ", "
        << fmt_double(c.spawn_y_min) << ", " << fmt_double(c.spawn_y_max) << "]\n";
    out << "spawn_min_spacing = " << fmt_double(c.spawn_min_spacing) << "\n";
    out << "target_mode = " << (c.target.is_static ? "static" : "waypoints") << "\n";
    out << "target_position = [" << fmt_double(c.target.static_position.x) << ", "
        << fmt_double(c.target.static_position.y) << "]\n";
    std::vector<double> flat;
    for (const Vec2& p : c.target.waypoints) {
        flat.push_back(p.x);
        flat.push_back(p.y);
    }
    out << "target_waypoints = " << arr(flat) << "\n";
    out << "target_speed = " << fmt_double(c.target.speed) << "\n";
    out << "neck_resolution = " << fmt_double(c.neck_resolution) << "\n";
    out << "neck_half_width = " << fmt_double(c.neck_half_width) << "\n";
    return out.str();
}

}  // namespace crowddiff
