#include "stcomp/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

#include "stcomp/geom.hpp"

namespace stcomp::kernels {

double norm_progression_sum_scalar(double x0, double dx, double y0, double dy, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = x0 + static_cast<double>(i) * dx;
        double y = y0 + static_cast<double>(i) * dy;
        acc += std::sqrt(x * x + y * y);
    }
    return acc;
}

namespace {

using Fn = double (*)(double, double, double, double, std::size_t);

struct Choice {
    Fn fn;
    const char* name;
};

Choice resolve(Backend want) {
    if (want == Backend::automatic) {
        if (const char* env = std::getenv("STCOMP_KERNELS")) {
            if (!std::strcmp(env, "scalar")) want = Backend::scalar;
            if (!std::strcmp(env, "avx2")) want = Backend::avx2;
            if (!std::strcmp(env, "neon")) want = Backend::neon;
        }
    }
#if defined(STCOMP_HAVE_AVX2_TU)
    if ((want == Backend::automatic || want == Backend::avx2) && __builtin_cpu_supports("avx2"))
        return {norm_progression_sum_avx2, "avx2"};
#endif
#if defined(STCOMP_HAVE_NEON_TU)
    if (want == Backend::automatic || want == Backend::neon)
        return {norm_progression_sum_neon, "neon"};
#endif
    return {norm_progression_sum_scalar, "scalar"};
}

Choice g_active = {nullptr, "scalar"};

Fn active_fn() {
    if (!g_active.fn) g_active = resolve(Backend::automatic);
    return g_active.fn;
}

}  // namespace

Backend set_backend(Backend b) {
    g_active = resolve(b);
    if (!std::strcmp(g_active.name, "avx2")) return Backend::avx2;
    if (!std::strcmp(g_active.name, "neon")) return Backend::neon;
    return Backend::scalar;
}

const char* active_backend() {
    active_fn();
    return g_active.name;
}

double norm_progression_sum(double x0, double dx, double y0, double dy, std::size_t n) {
    return active_fn()(x0, dx, y0, dy, n);
}

double synchronized_error_sum(std::span<const Point> a, std::span<const Point> b,
                              double t_base, double step,
                              std::int64_t k_begin, std::int64_t k_end) {
    if (k_begin >= k_end) return 0.0;
    if (step <= 0.0) raise(errc::config, "grid step must be positive");
    if (a.size() < 2 || b.size() < 2)
        raise(errc::invalid_segment, "synchronized error needs two points per track");

    auto t_of = [&](std::int64_t k) { return t_base + static_cast<double>(k) * step; };
    double t_first = t_of(k_begin);
    double t_last = t_of(k_end - 1);
    if (t_first < a.front().ts || t_last > a.back().ts || t_first < b.front().ts ||
        t_last > b.back().ts)
        raise(errc::out_of_range, "grid leaves a track's time span");

    // Segment holding t: pts[i].ts <= t < pts[i+1].ts, except the final
    // segment also owns its right endpoint.
    auto seg_for = [](std::span<const Point> pts, std::size_t i, double t) {
        while (i + 2 < pts.size() && t >= pts[i + 1].ts) ++i;
        return i;
    };

    std::size_t ia = 0;
    std::size_t ib = 0;
    std::int64_t k = k_begin;
    double total = 0.0;
    while (k < k_end) {
        double t0 = t_of(k);
        ia = seg_for(a, ia, t0);
        ib = seg_for(b, ib, t0);

        double bound = std::numeric_limits<double>::infinity();
        if (ia + 2 < a.size()) bound = a[ia + 1].ts;
        if (ib + 2 < b.size()) bound = std::min(bound, b[ib + 1].ts);

        std::int64_t k_stop = k_end;
        if (bound != std::numeric_limits<double>::infinity()) {
            auto est = static_cast<std::int64_t>(std::floor((bound - t_base) / step));
            while (t_of(est) >= bound) --est;
            while (t_of(est + 1) < bound) ++est;
            k_stop = std::min(k_end, est + 1);
        }

        // Within this run both tracks are affine in t, so the difference is
        // an affine progression. Time is rebased to the run start; at epoch
        // timestamp scales the unbased form would cancel catastrophically.
        const Point& a0 = a[ia];
        const Point& a1 = a[ia + 1];
        const Point& b0 = b[ib];
        const Point& b1 = b[ib + 1];
        double rvx = (a1.x - a0.x) / (a1.ts - a0.ts);
        double rvy = (a1.y - a0.y) / (a1.ts - a0.ts);
        double svx = (b1.x - b0.x) / (b1.ts - b0.ts);
        double svy = (b1.y - b0.y) / (b1.ts - b0.ts);
        double x0 = (a0.x - b0.x) + rvx * (t0 - a0.ts) - svx * (t0 - b0.ts);
        double y0 = (a0.y - b0.y) + rvy * (t0 - a0.ts) - svy * (t0 - b0.ts);
        total += norm_progression_sum(x0, rvx * step - svx * step, y0, rvy * step - svy * step,
                                      static_cast<std::size_t>(k_stop - k));
        k = k_stop;
    }
    return total;
}

}  // namespace stcomp::kernels
