#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "crowddiff/errors.hpp"
#include "crowddiff/vec2.hpp"

namespace crowddiff {

enum class WallSide { Upper, Lower };

// Region I: free pursuit. Region II: within tolerable distance d of a wall.
// Region III: the candidate next position would leave the walls.
enum class Region { I, II, III };

inline const char* region_name(Region r) {
    switch (r) {
        case Region::I: return "I";
        case Region::II: return "II";
        default: return "III";
    }
}

// Polynomial wall y = f(x), degree <= 4, coefficients in ascending powers.
struct WallFunction {
    std::array<double, 5> coeffs{};  // c0 + c1 x + ... + c4 x^4
    int degree = 0;
    WallSide side = WallSide::Upper;

    double value(double x) const {
        double v = coeffs[degree];
        for (int i = degree - 1; i >= 0; --i) v = v * x + coeffs[i];
        return v;
    }

    double slope(double x) const {
        double v = degree * coeffs[degree];
        for (int i = degree - 1; i >= 1; --i) v = v * x + i * coeffs[i];
        return degree >= 1 ? v : 0.0;
    }

    double second(double x) const {
        if (degree < 2) return 0.0;
        double v = degree * (degree - 1) * coeffs[degree];
        for (int i = degree - 1; i >= 2; --i) v = v * x + i * (i - 1) * coeffs[i];
        return v;
    }
};

inline WallFunction make_wall(std::initializer_list<double> ascending, WallSide side) {
    if (ascending.size() == 0 || ascending.size() > 5)
        throw InputError("wall polynomial must have 1..5 coefficients");
    WallFunction w;
    w.side = side;
    int i = 0;
    for (double c : ascending) w.coeffs[i++] = c;
    w.degree = i - 1;
    while (w.degree > 0 && w.coeffs[w.degree] == 0.0) --w.degree;
    return w;
}

struct WallPoint {
    double y = 0.0;
    double slope = 0.0;
};

// Two polynomial walls over a closed x-interval. The wall curves exist only on
// the interval; the space beyond either end is open.
class Corridor {
public:
    Corridor(WallFunction upper, WallFunction lower, double x_min, double x_max)
        : upper_(upper), lower_(lower), x_min_(x_min), x_max_(x_max) {
        upper_.side = WallSide::Upper;
        lower_.side = WallSide::Lower;
        if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max))
            throw GeometryError("corridor x-domain must be a finite nonempty interval");
        // gap > 0 everywhere on the domain
        constexpr int kChecks = 4096;
        for (int i = 0; i <= kChecks; ++i) {
            const double x = x_min + (x_max - x_min) * i / kChecks;
            if (!(upper_.value(x) - lower_.value(x) > 0.0))
                throw GeometryError("upper wall must stay strictly above lower wall on the domain (violated near x=" +
                                    std::to_string(x) + ")");
        }
    }

    const WallFunction& upper() const { return upper_; }
    const WallFunction& lower() const { return lower_; }
    const WallFunction& wall(WallSide s) const { return s == WallSide::Upper ? upper_ : lower_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    bool in_domain(double x) const { return x >= x_min_ && x <= x_max_; }

    double gap(double x) const { return upper_.value(x) - lower_.value(x); }
    double mid(double x) const { return 0.5 * (upper_.value(x) + lower_.value(x)); }

    // Closed containment; no wall constraint beyond the x-domain.
    bool contains(const Vec2& p) const {
        if (!in_domain(p.x)) return true;
        return p.y >= lower_.value(p.x) && p.y <= upper_.value(p.x);
    }

    bool strictly_inside(const Vec2& p, double margin = 0.0) const {
        if (!in_domain(p.x)) return false;
        return p.y > lower_.value(p.x) + margin && p.y < upper_.value(p.x) - margin;
    }

    WallPoint wall_eval(WallSide s, double x) const {
        if (!in_domain(x))
            throw GeometryError("wall_eval: x=" + std::to_string(x) + " outside corridor domain [" +
                                std::to_string(x_min_) + ", " + std::to_string(x_max_) + "]");
        const WallFunction& w = wall(s);
        return {w.value(x), w.slope(x)};
    }

private:
    WallFunction upper_;
    WallFunction lower_;
    double x_min_;
    double x_max_;
};

struct NearestPoint {
    Vec2 point;
    double dist = 0.0;
    WallSide wall = WallSide::Lower;
};

namespace detail {

// Squared distance from p to (x, f(x)).
inline double dist_sq_to_wall(const WallFunction& w, const Vec2& p, double x) {
    const double dx = x - p.x;
    const double dy = w.value(x) - p.y;
    return dx * dx + dy * dy;
}

// Nearest point on one wall arc over [x_min, x_max]: coarse scan, then
// golden-section on the bracketing interval. The scan is dense enough that the
// global minimum's basin is never skipped for degree <= 4 walls.
inline std::pair<double, double> nearest_on_wall(const WallFunction& w, const Vec2& p,
                                                 double x_min, double x_max) {
    constexpr int kScan = 2048;
    const double step = (x_max - x_min) / kScan;
    double best_x = x_min;
    double best_d = dist_sq_to_wall(w, p, x_min);
    for (int i = 1; i <= kScan; ++i) {
        const double x = x_min + step * i;
        const double d = dist_sq_to_wall(w, p, x);
        if (d < best_d) {
            best_d = d;
            best_x = x;
        }
    }
    double lo = std::max(x_min, best_x - step);
    double hi = std::min(x_max, best_x + step);
    constexpr double kInvPhi = 0.6180339887498949;
    double a = hi - (hi - lo) * kInvPhi;
    double b = lo + (hi - lo) * kInvPhi;
    double fa = dist_sq_to_wall(w, p, a);
    double fb = dist_sq_to_wall(w, p, b);
    for (int it = 0; it < 80 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - (hi - lo) * kInvPhi;
            fa = dist_sq_to_wall(w, p, a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + (hi - lo) * kInvPhi;
            fb = dist_sq_to_wall(w, p, b);
        }
    }
    // golden section localizes the abscissa only to ~sqrt(eps); polish with
    // Newton on the distance derivative, keeping any step that does not hurt
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const double g1 = w.slope(x);
        const double diff = w.value(x) - p.y;
        const double g = (x - p.x) + diff * g1;
        const double h = 1.0 + g1 * g1 + diff * w.second(x);
        if (std::abs(h) < 1e-12) break;
        const double nx = std::min(x_max, std::max(x_min, x - g / h));
        if (nx == x || dist_sq_to_wall(w, p, nx) > dist_sq_to_wall(w, p, x)) break;
        x = nx;
    }
    return {x, std::sqrt(dist_sq_to_wall(w, p, x))};
}

}  // namespace detail

// s_k: the closest point on either wall arc. Valid for any position that does
// not penetrate a wall (including points beyond the open ends, which see the
// arc endpoints).
inline NearestPoint nearest_obstacle_point(const Corridor& c, const Vec2& p) {
    if (!c.contains(p))
        throw GeometryError("nearest_obstacle_point: position (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ") outside corridor");
    const auto [ux, ud] = detail::nearest_on_wall(c.upper(), p, c.x_min(), c.x_max());
    const auto [lx, ld] = detail::nearest_on_wall(c.lower(), p, c.x_min(), c.x_max());
    if (ud < ld) return {{ux, c.upper().value(ux)}, ud, WallSide::Upper};
    return {{lx, c.lower().value(lx)}, ld, WallSide::Lower};
}

// Region of the agent at p whose tentative next position is candidate.
// Region II uses the current position's wall distance; Region III looks ahead.
inline Region classify_region(const Corridor& c, const Vec2& p, const Vec2& candidate, double d,
                              double wall_dist = -1.0) {
    if (!(d > 0.0)) throw InputError("classify_region: tolerable distance d must be > 0");
    if (!c.contains(p))
        throw GeometryError("classify_region: agent outside corridor");
    if (!c.contains(candidate)) return Region::III;
    const double dist = wall_dist >= 0.0 ? wall_dist : nearest_obstacle_point(c, p).dist;
    return dist < d ? Region::II : Region::I;
}

struct TangentChord {
    double width = 0.0;    // l^c: chord length between the tangent points
    Vec2 center;
    double radius = 0.0;
    Vec2 tangent_upper;
    Vec2 tangent_lower;
    bool fallback_used = false;
    int iterations = 0;
};

namespace detail {

// Solve the 3x3 system J dz = -f in place; returns false if J is singular.
inline bool solve3(double J[3][3], double f[3], double dz[3]) {
    int piv[3] = {0, 1, 2};
    double a[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) a[i][j] = J[i][j];
        a[i][3] = -f[i];
    }
    for (int col = 0; col < 3; ++col) {
        int best = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
        if (std::abs(a[best][col]) < 1e-14) return false;
        if (best != col) {
            for (int j = 0; j < 4; ++j) std::swap(a[col][j], a[best][j]);
            std::swap(piv[col], piv[best]);
        }
        for (int r = col + 1; r < 3; ++r) {
            const double m = a[r][col] / a[col][col];
            for (int j = col; j < 4; ++j) a[r][j] -= m * a[col][j];
        }
    }
    for (int i = 2; i >= 0; --i) {
        double v = a[i][3];
        for (int j = i + 1; j < 3; ++j) v -= a[i][j] * dz[j];
        dz[i] = v / a[i][i];
    }
    return true;
}

struct TcResiduals {
    double e[3];       // center mismatch (2) + chord incidence (1, raw cross product)
    Vec2 p_u, p_l;     // tangent points
    Vec2 n_u, n_l;     // unit inward normals
    double g_u, g_l, q_u, q_l;
};

inline TcResiduals tc_residuals(const Corridor& c, const Vec2& agent, double a, double b, double rho) {
    TcResiduals r;
    r.p_u = {a, c.upper().value(a)};
    r.p_l = {b, c.lower().value(b)};
    r.g_u = c.upper().slope(a);
    r.g_l = c.lower().slope(b);
    r.q_u = std::sqrt(1.0 + r.g_u * r.g_u);
    r.q_l = std::sqrt(1.0 + r.g_l * r.g_l);
    r.n_u = {r.g_u / r.q_u, -1.0 / r.q_u};
    r.n_l = {-r.g_l / r.q_l, 1.0 / r.q_l};
    const Vec2 cu = r.p_u + rho * r.n_u;
    const Vec2 cl = r.p_l + rho * r.n_l;
    r.e[0] = cu.x - cl.x;
    r.e[1] = cu.y - cl.y;
    r.e[2] = cross(r.p_l - r.p_u, agent - r.p_u);
    return r;
}

inline double tc_merit(const TcResiduals& r) {
    const double chord = std::max(distance(r.p_u, r.p_l), 1e-3);
    const double f3 = r.e[2] / chord;  // perpendicular distance units
    return r.e[0] * r.e[0] + r.e[1] * r.e[1] + f3 * f3;
}

}  // namespace detail

// Tangent-Chord width estimate: a circle tangent to both walls whose chord
// between the tangent points passes through the agent; the chord length is the
// local corridor width. Unknowns are the tangent-point x-coordinates and the
// radius; damped Newton with the analytic Jacobian, started at the agent's x.
// Falls back to the vertical gap (flagged) if the solve does not converge.
inline TangentChord tangent_chord_width(const Corridor& c, const Vec2& agent) {
    if (!c.in_domain(agent.x) || !c.strictly_inside(agent))
        throw GeometryError("tangent_chord_width: agent not strictly inside corridor");

    constexpr int kMaxIter = 100;
    constexpr double kTol = 1e-10;

    double a = agent.x;
    double b = agent.x;
    double rho = std::max(0.5 * c.gap(agent.x), 1e-6);

    auto res = detail::tc_residuals(c, agent, a, b, rho);
    double merit = detail::tc_merit(res);
    bool converged = false;
    int used = 0;

    for (int it = 0; it < kMaxIter; ++it) {
        used = it + 1;
        const double chord = std::max(distance(res.p_u, res.p_l), 1e-3);
        if (std::abs(res.e[0]) <= kTol * (1.0 + rho) && std::abs(res.e[1]) <= kTol * (1.0 + rho) &&
            std::abs(res.e[2]) / chord <= kTol) {
            converged = true;
            break;
        }

        const double h_u = c.upper().second(a);
        const double h_l = c.lower().second(b);
        const double kap_u = h_u / (res.q_u * res.q_u * res.q_u);
        const double kap_l = h_l / (res.q_l * res.q_l * res.q_l);

        double J[3][3];
        // dE/da = (1 + rho*kap_u) * (1, g_u); dE/db = (rho*kap_l - 1) * (1, g_l); dE/drho = n_u - n_l
        const double ca = 1.0 + rho * kap_u;
        const double cb = rho * kap_l - 1.0;
        J[0][0] = ca;
        J[1][0] = ca * res.g_u;
        J[0][1] = cb;
        J[1][1] = cb * res.g_l;
        J[0][2] = res.n_u.x - res.n_l.x;
        J[1][2] = res.n_u.y - res.n_l.y;
        // chord-incidence derivatives
        J[2][0] = -(agent.y - res.p_u.y) - res.g_u * (res.p_l.x - res.p_u.x) +
                  res.g_u * (agent.x - res.p_u.x) + (res.p_l.y - res.p_u.y);
        J[2][1] = (agent.y - res.p_u.y) - res.g_l * (agent.x - res.p_u.x);
        J[2][2] = 0.0;

        double f[3] = {res.e[0], res.e[1], res.e[2]};
        double dz[3];
        if (!detail::solve3(J, f, dz)) break;

        // trust-region style cap on the tangent-point moves
        const double span = c.x_max() - c.x_min();
        const double cap = std::max(1.0, 0.25 * span);
        const double mag = std::max(std::abs(dz[0]), std::abs(dz[1]));
        if (mag > cap) {
            const double sc = cap / mag;
            dz[0] *= sc;
            dz[1] *= sc;
            dz[2] *= sc;
        }

        double lambda = 1.0;
        bool accepted = false;
        for (int half = 0; half < 12; ++half) {
            const double na = a + lambda * dz[0];
            const double nb = b + lambda * dz[1];
            const double nrho = rho + lambda * dz[2];
            if (nrho > 1e-9) {
                auto trial = detail::tc_residuals(c, agent, na, nb, nrho);
                const double tm = detail::tc_merit(trial);
                if (tm < merit) {
                    a = na;
                    b = nb;
                    rho = nrho;
                    res = trial;
                    merit = tm;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }

    TangentChord out;
    out.iterations = used;
    if (converged && rho > 0.0) {
        const Vec2 chord_vec = res.p_l - res.p_u;
        const double chord_len = chord_vec.norm();
        // the agent must sit on the segment between the tangent points
        const double t = chord_len > 0.0 ? dot(agent - res.p_u, chord_vec) / (chord_len * chord_len) : -1.0;
        if (chord_len > 0.0 && t >= -0.02 && t <= 1.02) {
            out.width = chord_len;
            out.center = res.p_u + rho * res.n_u;
            out.radius = rho;
            out.tangent_upper = res.p_u;
            out.tangent_lower = res.p_l;
            out.fallback_used = false;
            return out;
        }
    }
    out.width = c.upper().value(agent.x) - c.lower().value(agent.x);
    out.center = {agent.x, c.mid(agent.x)};
    out.radius = 0.5 * out.width;
    out.tangent_upper = {agent.x, c.upper().value(agent.x)};
    out.tangent_lower = {agent.x, c.lower().value(agent.x)};
    out.fallback_used = true;
    return out;
}

struct NeckLocation {
    double x = 0.0;
    double width = 0.0;
};

// Narrowest spot of the corridor: minimize the tangent-chord width along the
// mid-curve. Leftmost sample wins ties; a golden-section refinement around the
// best sample is kept only if strictly better.
inline NeckLocation neck_location(const Corridor& c, double resolution) {
    if (!(resolution > 0.0)) throw InputError("neck_location: resolution must be > 0");

    auto width_at = [&c](double x) {
        return tangent_chord_width(c, {x, c.mid(x)}).width;
    };

    const double span = c.x_max() - c.x_min();
    const int n = std::max(2, static_cast<int>(std::ceil(span / resolution)));
    double best_x = c.x_min();
    double best_w = width_at(best_x);
    for (int i = 1; i <= n; ++i) {
        const double x = c.x_min() + span * i / n;
        const double w = width_at(x);
        if (w < best_w) {
            best_w = w;
            best_x = x;
        }
    }

    double lo = std::max(c.x_min(), best_x - span / n);
    double hi = std::min(c.x_max(), best_x + span / n);
    constexpr double kInvPhi = 0.6180339887498949;
    double a = hi - (hi - lo) * kInvPhi;
    double b = lo + (hi - lo) * kInvPhi;
    double fa = width_at(a);
    double fb = width_at(b);
    for (int it = 0; it < 60 && hi - lo > 1e-10 * (1.0 + std::abs(lo)); ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - (hi - lo) * kInvPhi;
            fa = width_at(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + (hi - lo) * kInvPhi;
            fb = width_at(b);
        }
    }
    const double rx = 0.5 * (lo + hi);
    const double rw = width_at(rx);
    if (rw < best_w - 1e-12 * (1.0 + best_w)) return {rx, rw};
    return {best_x, best_w};
}

}  // namespace crowddiff
