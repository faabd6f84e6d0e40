#include "bmgd/kernels.hpp"

#include <cstdlib>
#include <string>

namespace bmgd::kernels {

namespace detail {

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace detail

namespace {

struct Lane {
    std::string_view name;
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
};

constexpr Lane kScalar{"scalar", detail::dot_scalar, detail::axpy_scalar, detail::scale_scalar};

#if defined(__x86_64__) || defined(_M_X64)
bool avx2_supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
constexpr Lane kAvx2{"avx2", detail::dot_avx2, detail::axpy_avx2, detail::scale_avx2};
#endif
#if defined(__aarch64__)
// NEON is baseline on aarch64; no runtime probe needed.
constexpr Lane kNeon{"neon", detail::dot_neon, detail::axpy_neon, detail::scale_neon};
#endif

Lane pick_lane() {
    const char* forced = std::getenv("BMGD_KERNELS");
    const std::string want = forced ? forced : "";
    if (want == "scalar") return kScalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (want == "avx2") return avx2_supported() ? kAvx2 : kScalar;
    if (want.empty() && avx2_supported()) return kAvx2;
#endif
#if defined(__aarch64__)
    if (want == "neon" || want.empty()) return kNeon;
#endif
    return kScalar;
}

const Lane& active() {
    static const Lane lane = pick_lane();
    return lane;
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }
void scale(double a, double* x, std::size_t n) { active().scale(a, x, n); }

std::string_view active_lane() { return active().name; }

bool lane_available(std::string_view name) {
    if (name == "scalar") return true;
#if defined(__x86_64__) || defined(_M_X64)
    if (name == "avx2") return avx2_supported();
#endif
#if defined(__aarch64__)
    if (name == "neon") return true;
#endif
    return false;
}

}  // namespace bmgd::kernels
