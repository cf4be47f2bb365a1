#pragma once

// Data-parallel inner loops over complex spectral arrays.
//
// Every kernel has a scalar reference implementation; an AVX2/FMA variant is
// compiled on x86-64 and selected at runtime when the CPU supports it. Set
// DKLB_SIMD=scalar to force the reference kernels.

#include <complex>
#include <cstddef>
#include <span>

namespace dklb::simd {

using cplx = std::complex<double>;

struct KernelTable {
  const char* name;
  // z[i] *= m[i]
  void (*cmul_inplace)(cplx* z, const cplx* m, std::size_t n);
  // z[i] *= r[i]
  void (*rmul_inplace)(cplx* z, const double* r, std::size_t n);
  // out[i] = a[i] * b[i]
  void (*cmul)(cplx* out, const cplx* a, const cplx* b, std::size_t n);
  // acc[i] += w * m[i] * x[i]
  void (*cmul_acc)(cplx* acc, const cplx* m, const cplx* x, double w, std::size_t n);
  // sum |z[i]|^2
  double (*sum_abs2)(const cplx* z, std::size_t n);
  // sum w[i] |z[i]|^2
  double (*weighted_sum_abs2)(const cplx* z, const double* w, std::size_t n);
  // sum |z[i]|^4
  double (*sum_abs4)(const cplx* z, std::size_t n);
  // max |z[i]|^2
  double (*max_abs2)(const cplx* z, std::size_t n);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when not compiled in or unsupported by this CPU.
const KernelTable* avx2_kernels();

/// The table used by the library, chosen once per process.
const KernelTable& active();

// Span conveniences over active().
void multiply(std::span<cplx> z, std::span<const cplx> m);
void multiply(std::span<cplx> z, std::span<const double> r);
void multiply_accumulate(std::span<cplx> acc, std::span<const cplx> m,
                         std::span<const cplx> x, double w);
double sum_abs2(std::span<const cplx> z);
double weighted_sum_abs2(std::span<const cplx> z, std::span<const double> w);
double sum_abs4(std::span<const cplx> z);
double max_abs2(std::span<const cplx> z);

}  // namespace dklb::simd
