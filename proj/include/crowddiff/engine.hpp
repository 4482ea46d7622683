#pragma once

#include <chrono>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crowddiff/config.hpp"
#include "crowddiff/errors.hpp"
#include "crowddiff/estimation.hpp"
#include "crowddiff/geometry.hpp"
#include "crowddiff/metrics.hpp"
#include "crowddiff/motion.hpp"
#include "crowddiff/rng.hpp"
#include "crowddiff/vec2.hpp"

namespace crowddiff {

// Target moving along a waypoint polyline at fixed speed, clamped at the end.
struct TargetState {
    Vec2 position;
    bool is_static = true;
    std::vector<Vec2> waypoints;
    std::vector<double> cum_len;
    double speed = 0.0;
    double arc_pos = 0.0;
};

inline TargetState make_target(const TargetModel& model) {
    TargetState t;
    t.is_static = model.is_static;
    t.speed = model.speed;
    if (model.is_static) {
        t.position = model.static_position;
        return t;
    }
    if (model.waypoints.empty()) throw InputError("make_target: waypoint list is empty");
    t.waypoints = model.waypoints;
    t.cum_len.resize(t.waypoints.size());
    t.cum_len[0] = 0.0;
    for (std::size_t i = 1; i < t.waypoints.size(); ++i)
        t.cum_len[i] = t.cum_len[i - 1] + distance(t.waypoints[i - 1], t.waypoints[i]);
    t.position = t.waypoints.front();
    return t;
}

inline Vec2 target_point_at(const TargetState& t, double arc) {
    if (t.waypoints.size() < 2) return t.waypoints.empty() ? t.position : t.waypoints.front();
    const double total = t.cum_len.back();
    if (arc <= 0.0) return t.waypoints.front();
    if (arc >= total) return t.waypoints.back();
    std::size_t seg = 1;
    while (seg + 1 < t.cum_len.size() && t.cum_len[seg] < arc) ++seg;
    const double seg_len = t.cum_len[seg] - t.cum_len[seg - 1];
    const double u = seg_len > 0.0 ? (arc - t.cum_len[seg - 1]) / seg_len : 0.0;
    return t.waypoints[seg - 1] + u * (t.waypoints[seg] - t.waypoints[seg - 1]);
}

inline TargetState advance_target(const TargetState& t, double dt) {
    if (t.is_static || t.waypoints.size() < 2) return t;
    TargetState next = t;
    next.arc_pos = std::min(t.arc_pos + t.speed * dt, t.cum_len.back());
    next.position = target_point_at(next, next.arc_pos);
    return next;
}

struct TrajectoryRecord {
    int iteration = 0;
    int agent = 0;
    Vec2 position;
    Vec2 velocity;
    Region region = Region::I;
    double r_eff = 0.0;
    double alpha_eff = 0.0;
    double lc = -1.0;  // negative: no corridor width at this position
};

struct World {
    ScenarioConfig cfg;
    Corridor corridor;
    std::vector<AgentState> agents;
    TargetState target;
    Rng rng;
    NeckLocation neck;
    NeckBand band;
    std::vector<std::vector<int>> neighborhoods;
    std::vector<TrajectoryRecord> trajectory;
    std::vector<Vec2> target_path;
    int iteration = 0;
};

namespace detail {

[[noreturn]] inline void rethrow_with_agent(int iteration, int agent) {
    const std::string ctx =
        "iteration " + std::to_string(iteration) + ", agent " + std::to_string(agent) + ": ";
    try {
        throw;
    } catch (const GeometryError& e) {
        throw GeometryError(ctx + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(ctx + e.what());
    } catch (const InputError& e) {
        throw InputError(ctx + e.what());
    } catch (const std::exception& e) {
        throw InputError(ctx + e.what());
    }
}

}  // namespace detail

inline World init_scenario(const ScenarioConfig& cfg) {
    validate_config(cfg);
    World w{cfg,
            cfg.make_corridor(),
            {},
            make_target(cfg.target),
            Rng(cfg.seed),
            {},
            {},
            {},
            {},
            {},
            0};

    // rejection sampling: uniform in the spawn box, pairwise spacing enforced
    std::vector<Vec2> placed;
    placed.reserve(cfg.n_agents);
    int attempts = 0;
    constexpr int kAttemptCap = 100000;
    while (static_cast<int>(placed.size()) < cfg.n_agents) {
        if (++attempts > kAttemptCap)
            throw ConfigError("spawn_box too small for n_agents=" + std::to_string(cfg.n_agents) +
                              " at spawn_min_spacing=" + std::to_string(cfg.spawn_min_spacing));
        const Vec2 cand{w.rng.uniform(cfg.spawn_x_min, cfg.spawn_x_max),
                        w.rng.uniform(cfg.spawn_y_min, cfg.spawn_y_max)};
        bool ok = true;
        for (const Vec2& p : placed) {
            if (distance(p, cand) < cfg.spawn_min_spacing) {
                ok = false;
                break;
            }
        }
        if (ok) placed.push_back(cand);
    }

    w.agents.resize(cfg.n_agents);
    for (int k = 0; k < cfg.n_agents; ++k) {
        AgentState& a = w.agents[k];
        a.position = placed[k];
        a.velocity = {0.0, 0.0};
        a.w = placed[k];  // no prior target knowledge: start at own position
        a.vg = {0.0, 0.0};
        a.r_eff = cfg.motion.desired_dist;
        a.alpha_eff = cfg.motion.alpha;
        a.lc = -1.0;
        a.region = classify_region(w.corridor, a.position, a.position, cfg.motion.tolerable_dist);
    }

    w.neck = neck_location(w.corridor, cfg.neck_resolution);
    w.band = {w.neck.x, cfg.neck_band_half_width()};
    std::vector<Vec2> positions(placed.begin(), placed.end());
    w.neighborhoods = build_neighborhoods(positions, cfg.motion.comm_radius);

    w.trajectory.reserve(static_cast<std::size_t>(cfg.n_agents) * (cfg.iterations + 1));
    for (int k = 0; k < cfg.n_agents; ++k) {
        const AgentState& a = w.agents[k];
        w.trajectory.push_back({0, k, a.position, a.velocity, a.region, a.r_eff, a.alpha_eff, a.lc});
    }
    w.target_path.push_back(w.target.position);
    return w;
}

// One simulation iteration. `order` optionally permutes the per-agent compute
// loops; results are order-independent because every phase reads only the
// previous phase's committed snapshot. Measurement noise is always drawn in
// agent-index order so the random stream is identical under any permutation.
inline MetricsRecord step(World& w, std::span<const int> order = {}) {
    const ScenarioConfig& cfg = w.cfg;
    const MotionParams& mp = cfg.motion;
    const int n = cfg.n_agents;
    const int iter = w.iteration + 1;

    std::vector<int> natural;
    if (order.empty()) {
        natural.resize(n);
        for (int k = 0; k < n; ++k) natural[k] = k;
        order = natural;
    }

    std::vector<Vec2> positions(n);
    for (int k = 0; k < n; ++k) positions[k] = w.agents[k].position;

    // (1) neighborhoods over current positions
    if (cfg.rebuild_neighborhoods) w.neighborhoods = build_neighborhoods(positions, mp.comm_radius);

    // (2) measurements, fixed draw order
    std::vector<TargetMeasurement> meas(n);
    for (int k = 0; k < n; ++k) meas[k] = measure_target(positions[k], w.target.position, w.rng, cfg.noise_std);

    // (3) local adapt from the iteration i-1 snapshot
    std::vector<Vec2> psi(n), phi(n);
    for (int k : order) {
        psi[k] = adapt_target(w.agents[k].w, mp.mu, meas[k], positions[k]);
        phi[k] = adapt_group_velocity(w.agents[k].vg, mp.nu, w.agents[k].velocity);
    }

    // (4) combine across neighborhoods
    std::vector<Vec2> w_next(n), vg_next(n);
    for (int k : order) {
        w_next[k] = combine_mean(psi, w.neighborhoods[k]);
        vg_next[k] = combine_mean(phi, w.neighborhoods[k]);
    }

    // (5)-(8) per-agent width, rule terms, and composed velocity
    std::vector<double> lc(n), r_eff(n), alpha_eff(n);
    std::vector<Region> region(n);
    std::vector<Vec2> v_next(n);
    for (int k : order) {
        try {
            const Vec2& x = positions[k];
            lc[k] = -1.0;
            if (w.corridor.in_domain(x.x) && w.corridor.strictly_inside(x))
                lc[k] = tangent_chord_width(w.corridor, x).width;

            if (cfg.avid_enabled && lc[k] > 0.0) {
                const AvidPair pair = avid_update(lc[k], mp.standard_width, mp.desired_dist, mp.alpha,
                                                  mp.r_min, mp.alpha_max);
                r_eff[k] = pair.r;
                alpha_eff[k] = pair.alpha;
            } else {
                r_eff[k] = mp.desired_dist;
                alpha_eff[k] = mp.alpha;
            }

            const NearestPoint np = nearest_obstacle_point(w.corridor, x);
            const Vec2 candidate = x + mp.dt * w.agents[k].velocity;
            region[k] = classify_region(w.corridor, x, candidate, mp.tolerable_dist, np.dist);

            Vec2 va{0.0, 0.0};
            if (region[k] != Region::III && distance(x, w_next[k]) >= 1e-9)
                va = pursuit_avoidance_velocity(x, w_next[k], region[k], np.point, np.dist,
                                                mp.tolerable_dist, mp.eta);
            const Vec2 delta = local_distance_term(k, positions, w.neighborhoods[k], r_eff[k]);
            Vec2 v = compose_velocity(va, vg_next[k], delta, mp.lambda, alpha_eff[k], mp.gamma);
            if (region[k] == Region::III) v = {0.0, 0.0};
            v_next[k] = v;
        } catch (...) {
            detail::rethrow_with_agent(iter, k);
        }
    }

    // (9) integrate with containment, then commit
    for (int k = 0; k < n; ++k) {
        const IntegrationResult res = integrate_position(positions[k], v_next[k], mp.dt, w.corridor);
        AgentState& a = w.agents[k];
        a.position = res.position;
        a.velocity = res.velocity;
        a.w = w_next[k];
        a.vg = vg_next[k];
        a.region = region[k];
        a.lc = lc[k];
        a.r_eff = r_eff[k];
        a.alpha_eff = alpha_eff[k];
    }

    // (10) target motion
    w.target = advance_target(w.target, mp.dt);
    w.target_path.push_back(w.target.position);

    // (11) metrics over the post-move state
    std::vector<Vec2> new_positions(n), new_velocities(n);
    for (int k = 0; k < n; ++k) {
        new_positions[k] = w.agents[k].position;
        new_velocities[k] = w.agents[k].velocity;
    }
    const auto metric_nbrs =
        cfg.rebuild_neighborhoods ? build_neighborhoods(new_positions, mp.comm_radius) : w.neighborhoods;
    MetricsRecord rec;
    rec.iteration = iter;
    rec.v_mean = mean_speed(new_velocities);
    rec.r_mean = mean_neighbor_distance(new_positions, metric_nbrs);
    rec.n_obs = count_obstacle_affected(region);
    rec.n_neck = count_in_neck(new_positions, w.band);

    for (int k = 0; k < n; ++k) {
        const AgentState& a = w.agents[k];
        w.trajectory.push_back({iter, k, a.position, a.velocity, a.region, a.r_eff, a.alpha_eff, a.lc});
    }
    w.iteration = iter;
    return rec;
}

struct RunResult {
    ScenarioConfig config;
    std::vector<MetricsRecord> metrics;
    std::vector<TrajectoryRecord> trajectory;
    std::vector<Vec2> target_path;
    NeckLocation neck;
    NeckBand band;
    double duration_seconds = 0.0;
};

inline RunResult run(const ScenarioConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    World w = init_scenario(cfg);
    RunResult out;
    out.config = cfg;
    out.metrics.reserve(cfg.iterations);
    for (int i = 0; i < cfg.iterations; ++i) out.metrics.push_back(step(w));
    out.trajectory = std::move(w.trajectory);
    out.target_path = std::move(w.target_path);
    out.neck = w.neck;
    out.band = w.band;
    const auto t1 = std::chrono::steady_clock::now();
    out.duration_seconds = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

}  // namespace crowddiff
