#pragma once

#include <cstddef>
#include <string>

namespace mforge::kernels {

// Data-parallel inner loops shared by the motion modules: distance
// accumulation (clustering, frame metrics), channel interpolation
// (resampling, time warping), dense-regression primitives (debias fit and
// apply) and the per-DOF PD law. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant; the active table is chosen
// once at runtime and the two are equivalence-tested against each other.

struct KernelTable {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

    // sum_i (a[i] - b[i])^2
    double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);

    // sum_i wrap(a[i] - b[i])^2 with wrap to (-pi, pi]
    double (*sum_sq_wrapped_diff)(const double* a, const double* b, std::size_t n);

    // out[i] = a[i] + t * (b[i] - a[i])
    void (*lerp)(const double* a, const double* b, double t, double* out, std::size_t n);

    // out[i] = a[i] + t * wrap(b[i] - a[i])   (shortest-arc channel interpolation)
    void (*lerp_wrapped)(const double* a, const double* b, double t, double* out,
                         std::size_t n);

    // tau[i] = clamp(kp[i] * wrap(q_target[i] - q[i]) - kd[i] * qdot[i], +-limit[i])
    void (*pd_torque)(const double* q, const double* qdot, const double* q_target,
                      const double* kp, const double* kd, const double* limit,
                      double* tau, std::size_t n);
};

enum class Backend { scalar, avx2 };

const KernelTable& scalar_table();
bool avx2_available();

/// Active table: AVX2 when the CPU supports it, unless overridden by
/// select_backend() or the MOTIONFORGE_SIMD environment variable
/// ("scalar" | "avx2" | "auto").
const KernelTable& active();

/// Forces a backend. Throws if the backend is not available on this machine.
void select_backend(Backend backend);
Backend active_backend();

#if defined(MOTIONFORGE_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

// Convenience wrappers through the active table.
inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}
inline double sum_sq_diff(const double* a, const double* b, std::size_t n) {
    return active().sum_sq_diff(a, b, n);
}
inline double sum_sq_wrapped_diff(const double* a, const double* b, std::size_t n) {
    return active().sum_sq_wrapped_diff(a, b, n);
}
inline void lerp(const double* a, const double* b, double t, double* out, std::size_t n) {
    active().lerp(a, b, t, out, n);
}
inline void lerp_wrapped(const double* a, const double* b, double t, double* out,
                         std::size_t n) {
    active().lerp_wrapped(a, b, t, out, n);
}
inline void pd_torque(const double* q, const double* qdot, const double* q_target,
                      const double* kp, const double* kd, const double* limit,
                      double* tau, std::size_t n) {
    active().pd_torque(q, qdot, q_target, kp, kd, limit, tau, n);
}

}  // namespace mforge::kernels
