#pragma once

#include <cstddef>
#include <span>

#include "stcomp/types.hpp"

namespace stcomp::kernels {

// The hot loops of this library (the accuracy metric and the Imp priority)
// are sums of |a(t) - b(t)| over a regular time grid, where a and b are
// piecewise-linear tracks. Between any two bracketing breakpoints both
// tracks are affine in t, so each maximal run contributes
//     sum_{i=0..n-1} sqrt((x0 + i*dx)^2 + (y0 + i*dy)^2).
// That progression is the one data-parallel kernel in the artifact; a scalar
// reference and an AVX2 variant are selected at runtime and equivalence
// checked against each other in the tests.

enum class Backend { automatic, scalar, avx2, neon };

/// Sum of hypot(x0 + i*dx, y0 + i*dy) for i in [0, n).
double norm_progression_sum(double x0, double dx, double y0, double dy, std::size_t n);

/// Reference implementation, always available.
double norm_progression_sum_scalar(double x0, double dx, double y0, double dy, std::size_t n);

#if defined(STCOMP_HAVE_AVX2_TU)
double norm_progression_sum_avx2(double x0, double dx, double y0, double dy, std::size_t n);
#endif
#if defined(STCOMP_HAVE_NEON_TU)
double norm_progression_sum_neon(double x0, double dx, double y0, double dy, std::size_t n);
#endif

/// Selects the dispatch target; Backend::automatic re-probes the CPU (and the
/// STCOMP_KERNELS env var). Returns the backend actually in effect. Intended
/// for tests and benchmarks, not thread-safe against concurrent kernel calls.
Backend set_backend(Backend b);

/// Name of the backend currently dispatched to ("scalar", "avx2", "neon").
const char* active_backend();

/// Sum of dist(a(t), b(t)) with t = t_base + k*step for k in [k_begin, k_end),
/// a and b evaluated by piecewise-linear reconstruction. Every grid point
/// must lie within both tracks' time spans. This is the production path for
/// the ops built on synchronized distance; tests compare it against plain
/// interpolate_at loops.
double synchronized_error_sum(std::span<const Point> a, std::span<const Point> b,
                              double t_base, double step,
                              std::int64_t k_begin, std::int64_t k_end);

}  // namespace stcomp::kernels
