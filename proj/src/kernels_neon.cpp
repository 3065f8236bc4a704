// NEON (aarch64) variant of the norm progression kernel, mirroring the AVX2
// translation unit: plain mul + add per lane, pairwise accumulation at the
// end, scalar tail.

#include <arm_neon.h>

#include <cmath>
#include <cstddef>

namespace stcomp::kernels {

double norm_progression_sum_neon(double x0, double dx, double y0, double dy, std::size_t n) {
    std::size_t i = 0;
    double total = 0.0;
    if (n >= 2) {
        const float64x2_t lane = vsetq_lane_f64(1.0, vdupq_n_f64(0.0), 1);
        const float64x2_t vx0 = vdupq_n_f64(x0);
        const float64x2_t vy0 = vdupq_n_f64(y0);
        const float64x2_t vdx = vdupq_n_f64(dx);
        const float64x2_t vdy = vdupq_n_f64(dy);
        float64x2_t acc = vdupq_n_f64(0.0);
        for (; i + 2 <= n; i += 2) {
            float64x2_t idx = vaddq_f64(vdupq_n_f64(static_cast<double>(i)), lane);
            float64x2_t x = vaddq_f64(vx0, vmulq_f64(idx, vdx));
            float64x2_t y = vaddq_f64(vy0, vmulq_f64(idx, vdy));
            float64x2_t norm2 = vaddq_f64(vmulq_f64(x, x), vmulq_f64(y, y));
            acc = vaddq_f64(acc, vsqrtq_f64(norm2));
        }
        total = vaddvq_f64(acc);
    }
    for (; i < n; ++i) {
        double x = x0 + static_cast<double>(i) * dx;
        double y = y0 + static_cast<double>(i) * dy;
        total += std::sqrt(x * x + y * y);
    }
    return total;
}

}  // namespace stcomp::kernels
