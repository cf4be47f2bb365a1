// AVX2 + FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must not instantiate inline library templates (std::complex arithmetic,
// std::max, ...) that the linker could merge into baseline code paths.

#include <immintrin.h>

#include "dklb/simd.hpp"

namespace dklb::simd {
namespace {

// Two complex products per register: [ar0 ai0 ar1 ai1] * [br0 bi0 br1 bi1].
inline __m256d complex_mul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_sw, b_im));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void cmul_inplace(cplx* z, const cplx* m, std::size_t n) {
  auto* zp = reinterpret_cast<double*>(z);
  const auto* mp = reinterpret_cast<const double*>(m);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(zp + 2 * i);
    const __m256d b = _mm256_loadu_pd(mp + 2 * i);
    _mm256_storeu_pd(zp + 2 * i, complex_mul(a, b));
  }
  for (; i < n; ++i) {
    const double ar = zp[2 * i], ai = zp[2 * i + 1];
    const double br = mp[2 * i], bi = mp[2 * i + 1];
    zp[2 * i] = ar * br - ai * bi;
    zp[2 * i + 1] = ar * bi + ai * br;
  }
}

void rmul_inplace(cplx* z, const double* r, std::size_t n) {
  auto* zp = reinterpret_cast<double*>(z);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // [r0 r0 r1 r1]
    const __m128d rr = _mm_loadu_pd(r + i);
    const __m256d rv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(rr), 0x50);
    _mm256_storeu_pd(zp + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(zp + 2 * i), rv));
  }
  for (; i < n; ++i) {
    zp[2 * i] *= r[i];
    zp[2 * i + 1] *= r[i];
  }
}

void cmul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  auto* op = reinterpret_cast<double*>(out);
  const auto* ap = reinterpret_cast<const double*>(a);
  const auto* bp = reinterpret_cast<const double*>(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(op + 2 * i, complex_mul(_mm256_loadu_pd(ap + 2 * i),
                                             _mm256_loadu_pd(bp + 2 * i)));
  }
  for (; i < n; ++i) {
    const double ar = ap[2 * i], ai = ap[2 * i + 1];
    const double br = bp[2 * i], bi = bp[2 * i + 1];
    op[2 * i] = ar * br - ai * bi;
    op[2 * i + 1] = ar * bi + ai * br;
  }
}

void cmul_acc(cplx* acc, const cplx* m, const cplx* x, double w, std::size_t n) {
  auto* cp = reinterpret_cast<double*>(acc);
  const auto* mp = reinterpret_cast<const double*>(m);
  const auto* xp = reinterpret_cast<const double*>(x);
  const __m256d wv = _mm256_set1_pd(w);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d prod = complex_mul(_mm256_loadu_pd(mp + 2 * i),
                                     _mm256_loadu_pd(xp + 2 * i));
    _mm256_storeu_pd(cp + 2 * i,
                     _mm256_fmadd_pd(wv, prod, _mm256_loadu_pd(cp + 2 * i)));
  }
  for (; i < n; ++i) {
    const double mr = mp[2 * i], mi = mp[2 * i + 1];
    const double xr = xp[2 * i], xi = xp[2 * i + 1];
    cp[2 * i] += w * (mr * xr - mi * xi);
    cp[2 * i + 1] += w * (mr * xi + mi * xr);
  }
}

double sum_abs2(const cplx* z, std::size_t n) {
  const auto* zp = reinterpret_cast<const double*>(z);
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(zp + 2 * i);
    const __m256d b = _mm256_loadu_pd(zp + 2 * i + 4);
    s0 = _mm256_fmadd_pd(a, a, s0);
    s1 = _mm256_fmadd_pd(b, b, s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += zp[2 * i] * zp[2 * i] + zp[2 * i + 1] * zp[2 * i + 1];
  return s;
}

double weighted_sum_abs2(const cplx* z, const double* w, std::size_t n) {
  const auto* zp = reinterpret_cast<const double*>(z);
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(zp + 2 * i);
    const __m128d ww = _mm_loadu_pd(w + i);
    const __m256d wv = _mm256_permute4x64_pd(_mm256_castpd128_pd256(ww), 0x50);
    s = _mm256_fmadd_pd(_mm256_mul_pd(a, a), wv, s);
  }
  double total = hsum(s);
  for (; i < n; ++i) {
    total += w[i] * (zp[2 * i] * zp[2 * i] + zp[2 * i + 1] * zp[2 * i + 1]);
  }
  return total;
}

double sum_abs4(const cplx* z, std::size_t n) {
  const auto* zp = reinterpret_cast<const double*>(z);
  __m256d s = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(zp + 2 * i);
    const __m256d b = _mm256_loadu_pd(zp + 2 * i + 4);
    // hadd pairs: [|z0|^2 |z2|^2 |z1|^2 |z3|^2]
    const __m256d m = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    s = _mm256_fmadd_pd(m, m, s);
  }
  double total = hsum(s);
  for (; i < n; ++i) {
    const double a2 = zp[2 * i] * zp[2 * i] + zp[2 * i + 1] * zp[2 * i + 1];
    total += a2 * a2;
  }
  return total;
}

double max_abs2(const cplx* z, std::size_t n) {
  const auto* zp = reinterpret_cast<const double*>(z);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(zp + 2 * i);
    const __m256d b = _mm256_loadu_pd(zp + 2 * i + 4);
    m = _mm256_max_pd(m, _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double best = lanes[0];
  for (int k = 1; k < 4; ++k) best = lanes[k] > best ? lanes[k] : best;
  for (; i < n; ++i) {
    const double a2 = zp[2 * i] * zp[2 * i] + zp[2 * i + 1] * zp[2 * i + 1];
    best = a2 > best ? a2 : best;
  }
  return best;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2",   cmul_inplace, rmul_inplace,
                                 cmul,     cmul_acc,     sum_abs2,
                                 weighted_sum_abs2, sum_abs4, max_abs2};
  return table;
}

}  // namespace dklb::simd
