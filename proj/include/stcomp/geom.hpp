#pragma once

#include <cmath>
#include <span>

#include "stcomp/types.hpp"

namespace stcomp {

/// Euclidean distance in the projected plane.
inline double dist(const Vec2& a, const Vec2& b) {
    double dx = a.x - b.x;
    double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline double dist(const Point& a, const Point& b) { return dist(a.pos(), b.pos()); }

/// Position on segment a->b at time t, linear in time.
/// Requires a.ts < b.ts and a.ts <= t <= b.ts.
Vec2 pos(const Point& a, const Point& b, double t);

/// Synchronized distance of x against segment a->b: how far x sits from
/// where the straight-line motion a->b would be at x.ts.
double sed(const Point& a, const Point& x, const Point& b);

/// Piecewise-linear reconstruction of an ordered point sequence at time t.
/// Exact at stored timestamps; t outside [front.ts, back.ts] is an error.
Vec2 interpolate_at(std::span<const Point> pts, double t);

}  // namespace stcomp
