#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "crowddiff/errors.hpp"
#include "crowddiff/geometry.hpp"
#include "crowddiff/vec2.hpp"

namespace crowddiff {

struct MotionParams {
    double dt = 0.5;            // integration step
    double comm_radius = 3.5;   // R: neighborhood radius
    double desired_dist = 3.0;  // r: preferred inter-agent spacing
    double tolerable_dist = 2.0;  // d: wall distance that triggers avoidance
    double r_min = 2.0;         // tightest spacing the width rule may request
    double alpha_max = 4.0;     // fastest speed gain the width rule may request
    double standard_width = 16.0;  // l^s: width at which the corridor stops mattering
    double mu = 0.5;            // target-estimate adapt gain
    double nu = 0.5;            // group-velocity adapt gain
    double lambda = 0.5;        // pursuit vs. group-velocity mix
    double alpha = 2.0;         // nominal speed gain
    double gamma = 2.0;         // spacing-term gain
    double eta = 2.0;           // wall-repulsion gain

    bool operator==(const MotionParams&) const = default;
};

struct AgentState {
    Vec2 position;
    Vec2 velocity;
    Vec2 w;            // target position estimate
    Vec2 vg;           // group velocity estimate
    Region region = Region::I;
    double lc = -1.0;  // last tangent-chord width; negative when off the corridor
    double r_eff = 0.0;
    double alpha_eff = 0.0;
};

// Pursuit toward the estimated target, blended with wall repulsion in
// Region II, zero in Region III. Callers must guard the coincident cases.
inline Vec2 pursuit_avoidance_velocity(const Vec2& x, const Vec2& w, Region region, const Vec2& s,
                                       double wall_dist, double d, double eta) {
    if (region == Region::III) return {0.0, 0.0};
    const Vec2 to_target = w - x;
    const double tn = to_target.norm();
    if (tn <= 1e-9)
        throw GeometryError("pursuit_avoidance_velocity: target estimate coincides with the agent");
    const Vec2 pursuit = to_target / tn;
    if (region == Region::I) return pursuit;
    const Vec2 from_wall = x - s;
    const double fn = from_wall.norm();
    if (fn <= 1e-9) throw GeometryError("pursuit_avoidance_velocity: agent sits on the wall point");
    return 0.5 * (pursuit + eta * (d - wall_dist) * (from_wall / fn));
}

// Spacing term: mean of (1 - r/|x_l - x_k|)(x_l - x_k) over neighbors other
// than the agent itself. Repels closer than r, attracts farther, zero at r.
inline Vec2 local_distance_term(int k, std::span<const Vec2> positions, std::span<const int> neighborhood,
                                double r) {
    if (!(r > 0.0)) throw InputError("local_distance_term: desired distance must be > 0");
    Vec2 sum;
    int count = 0;
    for (int l : neighborhood) {
        if (l == k) continue;
        const Vec2 diff = positions[l] - positions[k];
        const double dist = diff.norm();
        if (dist <= 1e-9) throw GeometryError("local_distance_term: coincident neighbor positions");
        sum += (1.0 - r / dist) * diff;
        ++count;
    }
    if (count == 0) return {0.0, 0.0};
    return sum / static_cast<double>(count);
}

struct AvidPair {
    double r = 0.0;
    double alpha = 0.0;
};

// Width-adaptive spacing and speed: narrow corridors shrink the preferred
// spacing toward r_min and raise the speed gain toward alpha_max, linearly in
// lc/ls; at or beyond the standard width the nominal pair applies.
inline AvidPair avid_update(double lc, double ls, double r, double alpha, double r_min, double alpha_max) {
    if (!(lc > 0.0)) throw InputError("avid_update: corridor width must be > 0");
    if (!(ls > 0.0)) throw InputError("avid_update: standard width must be > 0");
    if (lc >= ls) return {r, alpha};
    const double t = lc / ls;
    return {(1.0 - t) * r_min + t * r, t * alpha + (1.0 - t) * alpha_max};
}

inline Vec2 compose_velocity(const Vec2& va, const Vec2& vg, const Vec2& delta, double lambda,
                             double alpha_eff, double gamma) {
    return lambda * alpha_eff * va + (1.0 - lambda) * vg + gamma * delta;
}

struct IntegrationResult {
    Vec2 position;
    Vec2 velocity;
    bool frozen = false;
};

// Forward Euler with containment: a step that would leave the corridor is
// rejected and the agent holds position with zero recorded velocity.
inline IntegrationResult integrate_position(const Vec2& x, const Vec2& v, double dt, const Corridor& c) {
    const Vec2 candidate = x + dt * v;
    if (c.contains(candidate)) return {candidate, v, false};
    return {x, {0.0, 0.0}, true};
}

}  // namespace crowddiff
