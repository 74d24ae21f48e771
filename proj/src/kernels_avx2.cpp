#if defined(MOTIONFORGE_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "motionforge/kernels.hpp"
#include "motionforge/math3d.hpp"

namespace mforge::kernels {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

// d - 2*pi * round(d / (2*pi)), round-to-nearest-even
inline __m256d wrap_lanes(__m256d d) {
    const __m256d two_pi = _mm256_set1_pd(kTwoPi);
    const __m256d inv_two_pi = _mm256_set1_pd(1.0 / kTwoPi);
    __m256d k = _mm256_round_pd(_mm256_mul_pd(d, inv_two_pi),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    return _mm256_fnmadd_pd(k, two_pi, d);
}

inline double wrap_fast(double d) {
    return d - kTwoPi * std::nearbyint(d * (1.0 / kTwoPi));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_diff_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double sum_sq_wrapped_diff_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = wrap_lanes(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double d = wrap_fast(a[i] - b[i]);
        s += d * d;
    }
    return s;
}

void lerp_avx2(const double* a, const double* b, double t, double* out, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(t);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(b + i), va);
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vt, d, va));
    }
    for (; i < n; ++i) out[i] = a[i] + t * (b[i] - a[i]);
}

void lerp_wrapped_avx2(const double* a, const double* b, double t, double* out,
                       std::size_t n) {
    const __m256d vt = _mm256_set1_pd(t);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d d = wrap_lanes(_mm256_sub_pd(_mm256_loadu_pd(b + i), va));
        _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vt, d, va));
    }
    for (; i < n; ++i) out[i] = a[i] + t * wrap_fast(b[i] - a[i]);
}

void pd_torque_avx2(const double* q, const double* qdot, const double* q_target,
                    const double* kp, const double* kd, const double* limit,
                    double* tau, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d err = wrap_lanes(_mm256_sub_pd(_mm256_loadu_pd(q_target + i),
                                               _mm256_loadu_pd(q + i)));
        __m256d t = _mm256_fnmadd_pd(_mm256_loadu_pd(kd + i), _mm256_loadu_pd(qdot + i),
                                     _mm256_mul_pd(_mm256_loadu_pd(kp + i), err));
        __m256d lim = _mm256_loadu_pd(limit + i);
        t = _mm256_min_pd(t, lim);
        t = _mm256_max_pd(t, _mm256_sub_pd(_mm256_setzero_pd(), lim));
        _mm256_storeu_pd(tau + i, t);
    }
    for (; i < n; ++i) {
        double err = wrap_fast(q_target[i] - q[i]);
        tau[i] = std::clamp(kp[i] * err - kd[i] * qdot[i], -limit[i], limit[i]);
    }
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{
        "avx2",
        dot_avx2,
        axpy_avx2,
        sum_sq_diff_avx2,
        sum_sq_wrapped_diff_avx2,
        lerp_avx2,
        lerp_wrapped_avx2,
        pd_torque_avx2,
    };
    return table;
}

}  // namespace mforge::kernels

#endif  // MOTIONFORGE_HAVE_AVX2
