#pragma once

// Dense double-precision kernels used by the spectral embedding, k-means and
// the baseline scorer. Each kernel has a scalar reference implementation and,
// on x86-64, an AVX2+FMA variant selected at runtime.
//
// The AVX2 variants reassociate sums, so results agree with the scalar path
// to rounding error, not bit for bit. Set FORGE_SIMD=scalar (or call
// set_isa) to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace forge::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Best ISA supported by this CPU and build.
Isa detect_isa();
/// ISA currently used by the dispatching entry points.
Isa active_isa();
/// Overrides dispatch; returns false (and changes nothing) when the CPU or
/// build cannot run `isa`.
bool set_isa(Isa isa);

struct Table {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  // y[i] = x[i] * w[i]
  void (*multiply)(const double* x, const double* w, double* y, std::size_t n);
};

/// Kernel table for a specific ISA; nullptr when unavailable.
const Table* table_for(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void multiply(const double* x, const double* w, double* y, std::size_t n);
}  // namespace scalar

#if defined(FORGE_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void multiply(const double* x, const double* w, double* y, std::size_t n);
}  // namespace avx2
#endif

// Dispatching entry points.

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
void multiply(std::span<const double> x, std::span<const double> w, std::span<double> y);

}  // namespace forge::kernels
