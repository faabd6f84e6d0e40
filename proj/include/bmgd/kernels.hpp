#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel primitives used by every hot loop in the library: per-sample
// gradient accumulation, moment-matrix updates, mat-vec, parameter updates.
//
// Each primitive has a scalar reference implementation plus SIMD variants
// (AVX2+FMA on x86-64, NEON on aarch64) compiled into separate lanes. The
// active lane is chosen once at startup from CPU capabilities and can be
// forced with the BMGD_KERNELS environment variable ("scalar", "avx2",
// "neon"). Variants are equivalence-tested against the scalar lane; they may
// differ from it in the last few ulps because vector accumulation reorders
// the sums, but every call within a process uses the same lane, so a run's
// trajectory is deterministic.

namespace bmgd::kernels {

// sum_i x[i] * y[i]
double dot(const double* x, const double* y, std::size_t n);

// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);

// x *= a
void scale(double a, double* x, std::size_t n);

// Name of the lane servicing the calls above: "scalar", "avx2", or "neon".
std::string_view active_lane();

// True when `name` names a lane this binary can run on this machine.
bool lane_available(std::string_view name);

namespace detail {
// Reference implementations, exposed for the equivalence tests.
double dot_scalar(const double* x, const double* y, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void scale_scalar(double a, double* x, std::size_t n);
#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* x, const double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
void scale_avx2(double a, double* x, std::size_t n);
#endif
#if defined(__aarch64__)
double dot_neon(const double* x, const double* y, std::size_t n);
void axpy_neon(double a, const double* x, double* y, std::size_t n);
void scale_neon(double a, double* x, std::size_t n);
#endif
}  // namespace detail

}  // namespace bmgd::kernels
