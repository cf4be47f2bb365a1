#include <cassert>
#include <cstdlib>
#include <string_view>

#include "dklb/simd.hpp"

namespace dklb::simd {

#if defined(DKLB_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(DKLB_HAVE_AVX2_KERNELS)
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [&]() -> const KernelTable& {
    const char* forced = std::getenv("DKLB_SIMD");
    if (forced != nullptr && std::string_view(forced) == "scalar") {
      return scalar_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return table;
}

void multiply(std::span<cplx> z, std::span<const cplx> m) {
  assert(z.size() == m.size());
  active().cmul_inplace(z.data(), m.data(), z.size());
}

void multiply(std::span<cplx> z, std::span<const double> r) {
  assert(z.size() == r.size());
  active().rmul_inplace(z.data(), r.data(), z.size());
}

void multiply_accumulate(std::span<cplx> acc, std::span<const cplx> m,
                         std::span<const cplx> x, double w) {
  assert(acc.size() == m.size() && acc.size() == x.size());
  active().cmul_acc(acc.data(), m.data(), x.data(), w, acc.size());
}

double sum_abs2(std::span<const cplx> z) { return active().sum_abs2(z.data(), z.size()); }

double weighted_sum_abs2(std::span<const cplx> z, std::span<const double> w) {
  assert(z.size() == w.size());
  return active().weighted_sum_abs2(z.data(), w.data(), z.size());
}

double sum_abs4(std::span<const cplx> z) { return active().sum_abs4(z.data(), z.size()); }

double max_abs2(std::span<const cplx> z) { return active().max_abs2(z.data(), z.size()); }

}  // namespace dklb::simd
