// AVX2 variant of the norm progression kernel. Built with -mavx2 in its own
// translation unit; callers reach it only through the runtime dispatcher.
// Lane arithmetic mirrors the scalar reference operation for operation
// (mul + add, no FMA contraction), so individual terms round identically and
// only the 4-way accumulation order differs.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace stcomp::kernels {

double norm_progression_sum_avx2(double x0, double dx, double y0, double dy, std::size_t n) {
    std::size_t i = 0;
    double total = 0.0;
    if (n >= 4) {
        const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
        const __m256d vx0 = _mm256_set1_pd(x0);
        const __m256d vy0 = _mm256_set1_pd(y0);
        const __m256d vdx = _mm256_set1_pd(dx);
        const __m256d vdy = _mm256_set1_pd(dy);
        __m256d acc = _mm256_setzero_pd();
        for (; i + 4 <= n; i += 4) {
            __m256d idx = _mm256_add_pd(_mm256_set1_pd(static_cast<double>(i)), lane);
            __m256d x = _mm256_add_pd(vx0, _mm256_mul_pd(idx, vdx));
            __m256d y = _mm256_add_pd(vy0, _mm256_mul_pd(idx, vdy));
            __m256d norm2 = _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y));
            acc = _mm256_add_pd(acc, _mm256_sqrt_pd(norm2));
        }
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, acc);
        total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    }
    for (; i < n; ++i) {
        double x = x0 + static_cast<double>(i) * dx;
        double y = y0 + static_cast<double>(i) * dy;
        total += std::sqrt(x * x + y * y);
    }
    return total;
}

}  // namespace stcomp::kernels
