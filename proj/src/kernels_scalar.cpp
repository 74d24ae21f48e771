#include <algorithm>
#include <cmath>

#include "motionforge/kernels.hpp"
#include "motionforge/math3d.hpp"

namespace mforge::kernels {

namespace {

// Same wrap formula as the AVX2 lane code (round-to-nearest-even), so the
// two backends agree to rounding error.
inline double wrap_fast(double d) {
    return d - kTwoPi * std::nearbyint(d * (1.0 / kTwoPi));
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double sum_sq_wrapped_diff_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = wrap_fast(a[i] - b[i]);
        s += d * d;
    }
    return s;
}

void lerp_scalar(const double* a, const double* b, double t, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + t * (b[i] - a[i]);
}

void lerp_wrapped_scalar(const double* a, const double* b, double t, double* out,
                         std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + t * wrap_fast(b[i] - a[i]);
}

void pd_torque_scalar(const double* q, const double* qdot, const double* q_target,
                      const double* kp, const double* kd, const double* limit,
                      double* tau, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double err = wrap_fast(q_target[i] - q[i]);
        double t = kp[i] * err - kd[i] * qdot[i];
        tau[i] = std::clamp(t, -limit[i], limit[i]);
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar",
        dot_scalar,
        axpy_scalar,
        sum_sq_diff_scalar,
        sum_sq_wrapped_diff_scalar,
        lerp_scalar,
        lerp_wrapped_scalar,
        pd_torque_scalar,
    };
    return table;
}

}  // namespace mforge::kernels
