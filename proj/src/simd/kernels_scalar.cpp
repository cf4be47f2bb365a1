#include "dklb/simd.hpp"

#include <algorithm>

// Reference kernels. Complex values are read as interleaved (re, im) doubles,
// which std::complex<double> guarantees.

namespace dklb::simd {
namespace {

void cmul_inplace(cplx* z, const cplx* m, std::size_t n) {
  auto* zp = reinterpret_cast<double*>(z);
  const auto* mp = reinterpret_cast<const double*>(m);
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = zp[2 * i], ai = zp[2 * i + 1];
    const double br = mp[2 * i], bi = mp[2 * i + 1];
    zp[2 * i] = ar * br - ai * bi;
    zp[2 * i + 1] = ar * bi + ai * br;
  }
}

void rmul_inplace(cplx* z, const double* r, std::size_t n) {
  auto* zp = reinterpret_cast<double*>(z);
  for (std::size_t i = 0; i < n; ++i) {
    zp[2 * i] *= r[i];
    zp[2 * i + 1] *= r[i];
  }
}

void cmul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
  auto* op = reinterpret_cast<double*>(out);
  const auto* ap = reinterpret_cast<const double*>(a);
  const auto* bp = reinterpret_cast<const double*>(b);
  for (std::size_t i = 0; i < n; ++i) {
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
  for (std::size_t i = 0; i < n; ++i) {
    const double mr = mp[2 * i], mi = mp[2 * i + 1];
    const double xr = xp[2 * i], xi = xp[2 * i + 1];
    cp[2 * i] += w * (mr * xr - mi * xi);
    cp[2 * i + 1] += w * (mr * xi + mi * xr);
  }
}

double sum_abs2(const cplx* z, std::size_t n) {
  const auto* zp = reinterpret_cast<const double*>(z);
  double s = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) s += zp[i] * zp[i];
  return s;
}

double weighted_sum_abs2(const cplx* z, const double* w, std::size_t n) {
  const auto* zp = reinterpret_cast<const double*>(z);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s += w[i] * (zp[2 * i] * zp[2 * i] + zp[2 * i + 1] * zp[2 * i + 1]);
  }
  return s;
}

double sum_abs4(const cplx* z, std::size_t n) {
  const auto* zp = reinterpret_cast<const double*>(z);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = zp[2 * i] * zp[2 * i] + zp[2 * i + 1] * zp[2 * i + 1];
    s += a2 * a2;
  }
  return s;
}

double max_abs2(const cplx* z, std::size_t n) {
  const auto* zp = reinterpret_cast<const double*>(z);
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m = std::max(m, zp[2 * i] * zp[2 * i] + zp[2 * i + 1] * zp[2 * i + 1]);
  }
  return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",  cmul_inplace, rmul_inplace,
                                 cmul,      cmul_acc,     sum_abs2,
                                 weighted_sum_abs2, sum_abs4, max_abs2};
  return table;
}

}  // namespace dklb::simd
