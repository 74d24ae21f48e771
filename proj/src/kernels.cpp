#include "motionforge/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace mforge::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(MOTIONFORGE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend() {
    if (const char* env = std::getenv("MOTIONFORGE_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (!cpu_has_avx2())
                throw std::runtime_error("MOTIONFORGE_SIMD=avx2 but AVX2 is unavailable");
            return Backend::avx2;
        }
        // anything else (including "auto") falls through to detection
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> slot{initial_backend()};
    return slot;
}

}  // namespace

bool avx2_available() { return cpu_has_avx2(); }

const KernelTable& active() {
#if defined(MOTIONFORGE_HAVE_AVX2)
    if (backend_slot().load(std::memory_order_relaxed) == Backend::avx2)
        return avx2_table();
#endif
    return scalar_table();
}

void select_backend(Backend backend) {
    if (backend == Backend::avx2 && !cpu_has_avx2())
        throw std::runtime_error("AVX2 kernels are not available on this machine");
    backend_slot().store(backend, std::memory_order_relaxed);
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

}  // namespace mforge::kernels
