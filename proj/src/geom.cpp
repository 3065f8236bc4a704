#include "stcomp/geom.hpp"

#include <algorithm>
#include <string>

namespace stcomp {

const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_segment: return "invalid segment";
        case errc::out_of_range: return "out of range";
        case errc::duplicate_entry: return "duplicate entry";
        case errc::missing_entry: return "missing entry";
        case errc::empty_queue: return "empty queue";
        case errc::ordering: return "ordering violation";
        case errc::schema: return "schema error";
        case errc::config: return "config error";
        case errc::parse: return "parse error";
        case errc::integrity: return "integrity error";
        case errc::history_gap: return "history gap";
        case errc::empty_input: return "empty input";
        case errc::degenerate_span: return "degenerate span";
        case errc::io: return "io error";
        case errc::internal: return "internal invariant violation";
    }
    return "unknown error";
}

Vec2 pos(const Point& a, const Point& b, double t) {
    if (!(a.ts < b.ts))
        raise(errc::invalid_segment,
              "segment endpoints must be strictly ordered in time (" +
                  std::to_string(a.ts) + " .. " + std::to_string(b.ts) + ")");
    if (t < a.ts || t > b.ts)
        raise(errc::out_of_range, "time " + std::to_string(t) + " outside segment [" +
                                      std::to_string(a.ts) + ", " + std::to_string(b.ts) + "]");
    double frac = (t - a.ts) / (b.ts - a.ts);
    return {a.x + (b.x - a.x) * frac, a.y + (b.y - a.y) * frac};
}

double sed(const Point& a, const Point& x, const Point& b) {
    if (x.ts < a.ts || x.ts > b.ts)
        raise(errc::invalid_segment, "synchronized distance needs a.ts <= x.ts <= b.ts");
    return dist(x.pos(), pos(a, b, x.ts));
}

Vec2 interpolate_at(std::span<const Point> pts, double t) {
    if (pts.empty()) raise(errc::empty_input, "cannot interpolate an empty sequence");
    if (t < pts.front().ts || t > pts.back().ts)
        raise(errc::out_of_range, "time " + std::to_string(t) + " outside [" +
                                      std::to_string(pts.front().ts) + ", " +
                                      std::to_string(pts.back().ts) + "]");
    auto it = std::lower_bound(pts.begin(), pts.end(), t,
                               [](const Point& p, double v) { return p.ts < v; });
    // Stored timestamps answer exactly; anything else interpolates its bracket.
    if (it != pts.end() && it->ts == t) return it->pos();
    return pos(*(it - 1), *it, t);
}

}  // namespace stcomp
