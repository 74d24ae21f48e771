#include <cmath>
#include <vector>

#include <doctest.h>

#include "motionforge/kernels.hpp"
#include "motionforge/math3d.hpp"
#include "motionforge/rng.hpp"

using namespace mforge;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double lo = -10.0, double hi = 10.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

bool close(double a, double b, double tol = 1e-11) {
    return std::fabs(a - b) <= tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace

TEST_CASE("scalar kernels match standard implementations") {
    const auto& k = kernels::scalar_table();
    Rng rng(7);
    std::vector<double> a = random_vec(rng, 37), b = random_vec(rng, 37);

    double dot_ref = 0.0, ssd_ref = 0.0, sswd_ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot_ref += a[i] * b[i];
        double d = a[i] - b[i];
        ssd_ref += d * d;
        double w = std::remainder(a[i] - b[i], kTwoPi);
        sswd_ref += w * w;
    }
    CHECK(close(k.dot(a.data(), b.data(), a.size()), dot_ref));
    CHECK(close(k.sum_sq_diff(a.data(), b.data(), a.size()), ssd_ref));
    CHECK(close(k.sum_sq_wrapped_diff(a.data(), b.data(), a.size()), sswd_ref));

    std::vector<double> y = b;
    k.axpy(2.5, a.data(), y.data(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(y[i] == b[i] + 2.5 * a[i]);

    std::vector<double> out(a.size());
    k.lerp(a.data(), b.data(), 0.25, out.data(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(close(out[i], a[i] + 0.25 * (b[i] - a[i])));
}

TEST_CASE("lerp_wrapped takes the shortest arc") {
    const auto& k = kernels::scalar_table();
    double a = 3.0, b = -3.0;  // shortest arc crosses pi, delta = +0.2832...
    double out;
    k.lerp_wrapped(&a, &b, 0.5, &out, 1);
    double expected = 3.0 + 0.5 * (2.0 * kPi - 6.0);
    CHECK(out == doctest::Approx(expected).epsilon(1e-12));

    // plain channels stay linear
    double c = 0.2, d = 0.7;
    k.lerp_wrapped(&c, &d, 0.5, &out, 1);
    CHECK(out == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("pd kernel: equilibrium, linearity, clamp") {
    const auto& k = kernels::scalar_table();
    double q = 0.4, qd = 0.0, qt = 0.4, kp = 2.0, kd = 1.0, lim = 100.0, tau;
    k.pd_torque(&q, &qd, &qt, &kp, &kd, &lim, &tau, 1);
    CHECK(tau == 0.0);

    q = 0.0;
    qt = 0.5;
    kd = 0.0;
    k.pd_torque(&q, &qd, &qt, &kp, &kd, &lim, &tau, 1);
    CHECK(tau == doctest::Approx(1.0));

    lim = 0.25;
    k.pd_torque(&q, &qd, &qt, &kp, &kd, &lim, &tau, 1);
    CHECK(tau == 0.25);  // clamped, sign preserved

    // error wraps: target one full turn away is no error
    q = 0.1;
    qt = 0.1 + kTwoPi;
    lim = 100.0;
    k.pd_torque(&q, &qd, &qt, &kp, &kd, &lim, &tau, 1);
    CHECK(std::fabs(tau) < 1e-12);
}

#if defined(MOTIONFORGE_HAVE_AVX2)
TEST_CASE("avx2 kernels are equivalent to the scalar reference") {
    if (!kernels::avx2_available()) {
        MESSAGE("AVX2 not available on this CPU; skipping equivalence test");
        return;
    }
    const auto& scalar = kernels::scalar_table();
    const auto& avx2 = kernels::avx2_table();
    Rng rng(42);

    // sizes around the 4-lane boundary plus larger buffers
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 63, 64, 257}) {
        std::vector<double> a = random_vec(rng, n, -30.0, 30.0);
        std::vector<double> b = random_vec(rng, n, -30.0, 30.0);

        CHECK(close(scalar.dot(a.data(), b.data(), n), avx2.dot(a.data(), b.data(), n)));
        CHECK(close(scalar.sum_sq_diff(a.data(), b.data(), n),
                    avx2.sum_sq_diff(a.data(), b.data(), n)));
        CHECK(close(scalar.sum_sq_wrapped_diff(a.data(), b.data(), n),
                    avx2.sum_sq_wrapped_diff(a.data(), b.data(), n)));

        std::vector<double> y1 = b, y2 = b;
        scalar.axpy(1.75, a.data(), y1.data(), n);
        avx2.axpy(1.75, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 1e-13));

        std::vector<double> o1(n), o2(n);
        scalar.lerp(a.data(), b.data(), 0.3, o1.data(), n);
        avx2.lerp(a.data(), b.data(), 0.3, o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i], 1e-13));

        scalar.lerp_wrapped(a.data(), b.data(), 0.7, o1.data(), n);
        avx2.lerp_wrapped(a.data(), b.data(), 0.7, o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i], 1e-13));

        std::vector<double> qd = random_vec(rng, n, -5.0, 5.0);
        std::vector<double> kp = random_vec(rng, n, 1.0, 300.0);
        std::vector<double> kd = random_vec(rng, n, 1.0, 50.0);
        std::vector<double> lim = random_vec(rng, n, 0.1, 200.0);
        scalar.pd_torque(a.data(), qd.data(), b.data(), kp.data(), kd.data(), lim.data(),
                         o1.data(), n);
        avx2.pd_torque(a.data(), qd.data(), b.data(), kp.data(), kd.data(), lim.data(),
                       o2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i], 1e-12));
    }
}
#endif

TEST_CASE("backend selection") {
    kernels::Backend original = kernels::active_backend();
    kernels::select_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    CHECK(std::string(kernels::active().name) == "scalar");
    if (kernels::avx2_available()) {
        kernels::select_backend(kernels::Backend::avx2);
        CHECK(std::string(kernels::active().name) == "avx2");
    }
    kernels::select_backend(original);
}
