#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "crowddiff/errors.hpp"
#include "crowddiff/rng.hpp"
#include "crowddiff/vec2.hpp"

namespace crowddiff {

// Symmetric radius-R neighborhoods over the whole population, self included.
// The boundary case |x_l - x_k| == R counts as a neighbor.
inline std::vector<std::vector<int>> build_neighborhoods(std::span<const Vec2> positions, double radius) {
    if (!(radius > 0.0)) throw InputError("build_neighborhoods: radius must be > 0");
    const int n = static_cast<int>(positions.size());
    std::vector<std::vector<int>> nbrs(n);
    for (int k = 0; k < n; ++k) {
        nbrs[k].push_back(k);
        for (int l = k + 1; l < n; ++l) {
            if (distance(positions[k], positions[l]) <= radius) {
                nbrs[k].push_back(l);
                nbrs[l].push_back(k);
            }
        }
    }
    for (auto& list : nbrs) std::sort(list.begin(), list.end());
    return nbrs;
}

inline std::vector<double> uniform_weights(std::size_t n) {
    if (n == 0) throw InputError("uniform_weights: empty neighborhood");
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

struct TargetMeasurement {
    double d = 0.0;  // noisy range to the target
    Vec2 p;          // unit direction from the agent toward the target
};

// Range measurement with zero-mean gaussian noise, clamped nonnegative; the
// direction is noise-free so p stays a unit vector. The noise draw happens
// even at noise_std = 0 to keep the random stream aligned across configs.
inline TargetMeasurement measure_target(const Vec2& agent, const Vec2& target, Rng& rng, double noise_std) {
    if (noise_std < 0.0) throw InputError("measure_target: noise_std must be >= 0");
    const double noise = rng.gaussian(0.0, 1.0) * noise_std;
    const Vec2 offset = target - agent;
    const double true_d = offset.norm();
    if (true_d <= 1e-9) throw GeometryError("measure_target: agent coincides with the target");
    return {std::max(true_d + noise, 0.0), offset / true_d};
}

// Local adapt step for the target estimate. The range measurement regresses
// the agent-relative offset, so the agent position folds into the residual:
//   psi = w + mu * p * (d + p.(x - w))
inline Vec2 adapt_target(const Vec2& w_prev, double mu, const TargetMeasurement& m, const Vec2& agent) {
    const double residual = m.d + dot(m.p, agent - w_prev);
    return w_prev + mu * residual * m.p;
}

// Local adapt step for the group velocity estimate: relax toward own velocity.
inline Vec2 adapt_group_velocity(const Vec2& vg_prev, double nu, const Vec2& v_own) {
    return vg_prev + nu * (v_own - vg_prev);
}

// Combine step: convex combination of neighborhood intermediates.
inline Vec2 combine_estimates(std::span<const Vec2> intermediates, std::span<const int> neighborhood,
                              std::span<const double> weights) {
    if (neighborhood.empty()) throw InputError("combine_estimates: empty neighborhood");
    if (weights.size() != neighborhood.size())
        throw InputError("combine_estimates: weight count must match neighborhood size");
    double sum = 0.0;
    Vec2 out;
    for (std::size_t i = 0; i < neighborhood.size(); ++i) {
        if (weights[i] < 0.0) throw InputError("combine_estimates: negative weight");
        const int idx = neighborhood[i];
        if (idx < 0 || static_cast<std::size_t>(idx) >= intermediates.size())
            throw InputError("combine_estimates: neighbor index out of range");
        out += weights[i] * intermediates[idx];
        sum += weights[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InputError("combine_estimates: weights must sum to 1");
    return out;
}

inline Vec2 combine_mean(std::span<const Vec2> intermediates, std::span<const int> neighborhood) {
    if (neighborhood.empty()) throw InputError("combine_mean: empty neighborhood");
    Vec2 out;
    for (int idx : neighborhood) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= intermediates.size())
            throw InputError("combine_mean: neighbor index out of range");
        out += intermediates[idx];
    }
    return out / static_cast<double>(neighborhood.size());
}

// Plain LMS on scalar measurements d = u.w0 + noise, for cross-checking the
// diffusion update in the degenerate single-node case.
struct LmsState {
    Vec2 w;
};

inline Vec2 lms_adapt(const Vec2& w_prev, double mu, double d, const Vec2& u) {
    return w_prev + mu * (d - dot(u, w_prev)) * u;
}

struct LmsMeasurement {
    double d = 0.0;
    Vec2 u;
};

// One adapt-then-combine round over the whole network with uniform weights.
inline std::vector<LmsState> atc_lms_step(std::span<const LmsState> states,
                                          std::span<const LmsMeasurement> measurements, double mu,
                                          std::span<const std::vector<int>> neighborhoods) {
    if (states.size() != measurements.size() || states.size() != neighborhoods.size())
        throw InputError("atc_lms_step: mismatched node counts");
    std::vector<Vec2> psi(states.size());
    for (std::size_t k = 0; k < states.size(); ++k)
        psi[k] = lms_adapt(states[k].w, mu, measurements[k].d, measurements[k].u);
    std::vector<LmsState> next(states.size());
    for (std::size_t k = 0; k < states.size(); ++k)
        next[k].w = combine_mean(psi, neighborhoods[k]);
    return next;
}

}  // namespace crowddiff
