#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stcomp {

using TrajId = std::int64_t;

/// Planar position, meters.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline bool operator==(const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }

/// One observation of one moving object. Coordinates are projected meters,
/// timestamps are seconds (input epoch or synthetic origin, never mixed
/// within a dataset). sog is m/s, cog is mathematical radians (0 = +x/east,
/// counter-clockwise); ingestion converts compass degrees and knots.
struct Point {
    TrajId id = 0;
    double ts = 0.0;
    double x = 0.0;
    double y = 0.0;
    std::optional<double> sog;
    std::optional<double> cog;

    Vec2 pos() const { return {x, y}; }
};

/// All observations of one object, strictly increasing in ts.
struct Trajectory {
    TrajId id = 0;
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
};

/// Compression output: an ordered subsequence of one trajectory's points.
struct Sample {
    TrajId source_id = 0;
    std::vector<Point> points;

    std::size_t size() const { return points.size(); }
};

/// Identifies a point inside a run: trajectory id + timestamp. Timestamps
/// within a trajectory are unique, and they are carried through untouched,
/// so exact double comparison is safe here.
struct PointKey {
    TrajId id = 0;
    double ts = 0.0;

    friend bool operator==(const PointKey&, const PointKey&) = default;
};

struct PointKeyHash {
    std::size_t operator()(const PointKey& k) const {
        std::size_t h = std::hash<std::int64_t>{}(k.id);
        std::size_t t = std::hash<double>{}(k.ts);
        return h ^ (t + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
};

enum class errc {
    invalid_segment,
    out_of_range,
    duplicate_entry,
    missing_entry,
    empty_queue,
    ordering,
    schema,
    config,
    parse,
    integrity,
    history_gap,
    empty_input,
    degenerate_span,
    io,
    internal,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    errc code() const { return code_; }

  private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw error(code, msg); }

}  // namespace stcomp
