#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "crowddiff/errors.hpp"
#include "crowddiff/geometry.hpp"
#include "crowddiff/vec2.hpp"

namespace crowddiff {

struct NeckBand {
    double center_x = 0.0;
    double half_width = 0.0;
};

struct MetricsRecord {
    int iteration = 0;
    double v_mean = 0.0;
    double r_mean = 0.0;
    int n_obs = 0;
    int n_neck = 0;
};

inline double mean_speed(std::span<const Vec2> velocities) {
    if (velocities.empty()) throw InputError("mean_speed: no agents");
    double sum = 0.0;
    for (const Vec2& v : velocities) sum += v.norm();
    return sum / static_cast<double>(velocities.size());
}

// Average over non-isolated agents of the per-agent mean distance to its
// neighbors (self excluded). Isolated agents shrink the denominator; if every
// agent is isolated the metric is 0.
inline double mean_neighbor_distance(std::span<const Vec2> positions,
                                     std::span<const std::vector<int>> neighborhoods) {
    if (positions.size() != neighborhoods.size())
        throw InputError("mean_neighbor_distance: mismatched sizes");
    double total = 0.0;
    int counted = 0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        double sum = 0.0;
        int nn = 0;
        for (int l : neighborhoods[k]) {
            if (static_cast<std::size_t>(l) == k) continue;
            sum += distance(positions[k], positions[l]);
            ++nn;
        }
        if (nn == 0) continue;
        total += sum / nn;
        ++counted;
    }
    return counted > 0 ? total / counted : 0.0;
}

inline int count_obstacle_affected(std::span<const Region> regions) {
    int n = 0;
    for (Region r : regions)
        if (r == Region::II) ++n;
    return n;
}

// Agents whose x-coordinate falls inside the neck band, boundary inclusive.
inline int count_in_neck(std::span<const Vec2> positions, const NeckBand& band) {
    if (!(band.half_width >= 0.0)) throw InputError("count_in_neck: negative band half-width");
    int n = 0;
    for (const Vec2& p : positions)
        if (std::abs(p.x - band.center_x) <= band.half_width) ++n;
    return n;
}

}  // namespace crowddiff
