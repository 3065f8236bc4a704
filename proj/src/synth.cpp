#include "stcomp/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace stcomp::ingest {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Derive one engine per trajectory so ids are independent of each other and
// of the trajectory count (splitmix64 over the user seed).
std::uint64_t mix(std::uint64_t seed, std::uint64_t idx) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (idx + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    // uniform [0,1) straight off the engine; distributions vary by platform
    double unit() { return std::ldexp(static_cast<double>(gen() >> 11), -53); }
    double uniform(double a, double b) { return a + (b - a) * unit(); }
};

double norm_heading(double h) {
    double r = std::fmod(h, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

void attach(Point& p, bool emit, double sog, double cog) {
    if (!emit) return;
    p.sog = sog;
    p.cog = norm_heading(cog);
}

Trajectory gen_constant_velocity(TrajId id, Rng& rng, const SynthSpec& spec, long long steps) {
    double heading = rng.uniform(0.0, kTwoPi);
    double speed = spec.speed * rng.uniform(0.6, 1.4);
    double x0 = rng.uniform(-2000.0, 2000.0);
    double y0 = rng.uniform(-2000.0, 2000.0);
    double vx = std::cos(heading) * speed;
    double vy = std::sin(heading) * speed;
    Trajectory t;
    t.id = id;
    t.points.reserve(static_cast<std::size_t>(steps) + 1);
    for (long long k = 0; k <= steps; ++k) {
        double ts = static_cast<double>(k) * spec.period;
        Point p;
        p.id = id;
        p.ts = ts;
        p.x = x0 + vx * ts;  // closed form keeps the family exactly linear
        p.y = y0 + vy * ts;
        attach(p, spec.emit_sog_cog, speed, heading);
        t.points.push_back(p);
    }
    return t;
}

Trajectory gen_walk(TrajId id, Rng& rng, const SynthSpec& spec, long long steps, bool square) {
    double heading = rng.uniform(0.0, kTwoPi);
    double base = heading;
    double speed = spec.speed * rng.uniform(0.6, 1.4);
    double x = rng.uniform(-2000.0, 2000.0);
    double y = rng.uniform(-2000.0, 2000.0);
    Trajectory t;
    t.id = id;
    t.points.reserve(static_cast<std::size_t>(steps) + 1);
    for (long long k = 0; k <= steps; ++k) {
        if (square)
            heading = base + ((k / spec.leg_steps) % 2 ? std::numbers::pi / 2.0 : 0.0);
        else if (k > 0)
            heading += rng.uniform(-0.8, 0.8);
        Point p;
        p.id = id;
        p.ts = static_cast<double>(k) * spec.period;
        p.x = x;
        p.y = y;
        attach(p, spec.emit_sog_cog, speed, heading);  // outgoing segment motion
        t.points.push_back(p);
        x += std::cos(heading) * speed * spec.period;
        y += std::sin(heading) * speed * spec.period;
    }
    return t;
}

Trajectory gen_burst(TrajId id, Rng& rng, const SynthSpec& spec, long long total) {
    double b0 = spec.burst_start < 0.0 ? 0.45 * spec.duration : spec.burst_start;
    double b1 = b0 + spec.burst_len;
    long long n_dense = std::llround(spec.burst_fraction * static_cast<double>(total));
    n_dense = std::max(1LL, std::min(total - 2, n_dense));
    long long n_sparse = total - n_dense;
    double sparse_span = spec.duration - spec.burst_len;
    long long n_pre = std::llround(static_cast<double>(n_sparse) * b0 / sparse_span);
    n_pre = std::max(1LL, std::min(n_sparse - 1, n_pre));
    long long n_post = n_sparse - n_pre;

    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(total));
    for (long long k = 0; k < n_pre; ++k)
        ts.push_back(static_cast<double>(k) * (b0 / static_cast<double>(n_pre)));
    for (long long k = 0; k < n_dense; ++k)
        ts.push_back(b0 + static_cast<double>(k) * (spec.burst_len / static_cast<double>(n_dense)));
    for (long long k = 0; k < n_post; ++k)
        ts.push_back(n_post == 1
                         ? spec.duration
                         : b1 + static_cast<double>(k) *
                                    ((spec.duration - b1) / static_cast<double>(n_post - 1)));

    double cruise_heading = rng.uniform(0.0, kTwoPi);
    double cruise_speed = spec.speed * rng.uniform(0.6, 1.4);
    double x = rng.uniform(-2000.0, 2000.0);
    double y = rng.uniform(-2000.0, 2000.0);
    Trajectory t;
    t.id = id;
    t.points.reserve(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) {
        bool erratic = ts[k] >= b0 && ts[k] < b1;
        double heading = erratic ? rng.uniform(0.0, kTwoPi) : cruise_heading;
        double speed = erratic ? spec.speed * rng.uniform(0.5, 2.0) : cruise_speed;
        Point p;
        p.id = id;
        p.ts = ts[k];
        p.x = x;
        p.y = y;
        attach(p, spec.emit_sog_cog, speed, heading);
        t.points.push_back(p);
        if (k + 1 < ts.size()) {
            double dt = ts[k + 1] - ts[k];
            x += std::cos(heading) * speed * dt;
            y += std::sin(heading) * speed * dt;
        }
    }
    return t;
}

}  // namespace

const char* model_name(MotionModel m) {
    switch (m) {
        case MotionModel::constant_velocity: return "constant_velocity";
        case MotionModel::random_walk: return "random_walk";
        case MotionModel::square_wave: return "square_wave";
        case MotionModel::burst: return "burst";
        case MotionModel::mixed: return "mixed";
    }
    raise(errc::internal, "bad motion model");
}

std::optional<MotionModel> model_from_name(std::string_view name) {
    for (MotionModel m : {MotionModel::constant_velocity, MotionModel::random_walk,
                          MotionModel::square_wave, MotionModel::burst, MotionModel::mixed})
        if (name == model_name(m)) return m;
    return std::nullopt;
}

std::map<TrajId, Trajectory> synth(std::uint64_t seed, const SynthSpec& spec) {
    if (spec.trajectories < 1) raise(errc::config, "trajectories must be >= 1");
    if (!(spec.duration > 0.0) || !(spec.period > 0.0) || spec.period > spec.duration)
        raise(errc::config, "need 0 < period <= duration");
    if (spec.leg_steps < 1) raise(errc::config, "leg_steps must be >= 1");
    long long steps = std::llround(spec.duration / spec.period);
    if (steps < 1) raise(errc::config, "duration spans fewer than two samples");
    if (spec.model == MotionModel::burst) {
        if (!(spec.burst_fraction > 0.0) || !(spec.burst_fraction < 1.0))
            raise(errc::config, "burst_fraction must lie in (0, 1)");
        double b0 = spec.burst_start < 0.0 ? 0.45 * spec.duration : spec.burst_start;
        if (!(spec.burst_len > 0.0) || b0 < 0.0 || b0 + spec.burst_len >= spec.duration)
            raise(errc::config, "burst band must fit inside (0, duration)");
        if (steps + 1 < 4) raise(errc::config, "burst model needs at least four points");
    }

    std::map<TrajId, Trajectory> out;
    for (int i = 0; i < spec.trajectories; ++i) {
        Rng rng(mix(seed, static_cast<std::uint64_t>(i)));
        TrajId id = i;
        MotionModel m = spec.model;
        if (m == MotionModel::mixed)
            m = i < spec.trajectories / 2 ? MotionModel::random_walk : MotionModel::square_wave;
        Trajectory t;
        switch (m) {
            case MotionModel::constant_velocity:
                t = gen_constant_velocity(id, rng, spec, steps);
                break;
            case MotionModel::random_walk: t = gen_walk(id, rng, spec, steps, false); break;
            case MotionModel::square_wave: t = gen_walk(id, rng, spec, steps, true); break;
            case MotionModel::burst: t = gen_burst(id, rng, spec, steps + 1); break;
            case MotionModel::mixed: raise(errc::internal, "mixed not resolved");
        }
        out.emplace(id, std::move(t));
    }
    return out;
}

}  // namespace stcomp::ingest
