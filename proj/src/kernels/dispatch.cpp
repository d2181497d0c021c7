#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "forge/kernels.hpp"

namespace forge::kernels {

namespace {

constexpr Table kScalar{scalar::dot,  scalar::squared_distance, scalar::sum,
                        scalar::axpy, scalar::scale,            scalar::multiply};

#if defined(FORGE_HAVE_AVX2)
constexpr Table kAvx2{avx2::dot,  avx2::squared_distance, avx2::sum,
                      avx2::axpy, avx2::scale,            avx2::multiply};
#endif

bool cpu_has_avx2() {
#if defined(FORGE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("FORGE_SIMD"); env && std::string_view(env) == "scalar")
    return Isa::Scalar;
  return detect_isa();
}

std::atomic<const Table*>& active_table() {
  static std::atomic<const Table*> table{table_for(initial_isa())};
  return table;
}

inline const Table& t() { return *active_table().load(std::memory_order_relaxed); }

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

Isa detect_isa() {
  static const bool avx2 = cpu_has_avx2();
  return avx2 ? Isa::Avx2 : Isa::Scalar;
}

const Table* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return &kScalar;
    case Isa::Avx2:
#if defined(FORGE_HAVE_AVX2)
      return detect_isa() == Isa::Avx2 ? &kAvx2 : nullptr;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Isa active_isa() { return active_table().load() == &kScalar ? Isa::Scalar : Isa::Avx2; }

bool set_isa(Isa isa) {
  const Table* table = table_for(isa);
  if (!table) return false;
  active_table().store(table);
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return t().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return t().squared_distance(a.data(), b.data(), a.size());
}

double sum(std::span<const double> x) { return t().sum(x.data(), x.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  t().axpy(alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> x) { t().scale(alpha, x.data(), x.size()); }

void multiply(std::span<const double> x, std::span<const double> w, std::span<double> y) {
  assert(x.size() == w.size() && x.size() == y.size());
  t().multiply(x.data(), w.data(), y.data(), x.size());
}

}  // namespace forge::kernels
