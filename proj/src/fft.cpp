#include "dklb/fft.hpp"

#include <fftw3.h>

#include <cassert>
#include <map>
#include <mutex>
#include <vector>

namespace dklb::fft {
namespace {

// FFTW's planner is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

struct PlanPairLd {
  fftwl_plan fwd = nullptr;
  fftwl_plan bwd = nullptr;
};

const PlanPair& plans_for(std::size_t n) {
  static std::map<std::size_t, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> a(n), b(n);
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.fwd = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_FORWARD, flags);
  p.bwd = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_BACKWARD, flags);
  return cache.emplace(n, p).first->second;
}

const PlanPairLd& plans_for_ld(std::size_t n) {
  static std::map<std::size_t, PlanPairLd> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx_ld> a(n), b(n);
  auto* pa = reinterpret_cast<fftwl_complex*>(a.data());
  auto* pb = reinterpret_cast<fftwl_complex*>(b.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPairLd p;
  p.fwd = fftwl_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_FORWARD, flags);
  p.bwd = fftwl_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_BACKWARD, flags);
  return cache.emplace(n, p).first->second;
}

// FFTW takes non-const input pointers even for out-of-place transforms that
// never write the input.
template <typename T>
T* unconst(const T* p) {
  return const_cast<T*>(p);
}

}  // namespace

void forward(std::span<const cplx> in, std::span<cplx> out) {
  assert(in.size() == out.size());
  fftw_execute_dft(plans_for(in.size()).fwd,
                   reinterpret_cast<fftw_complex*>(unconst(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void backward(std::span<const cplx> in, std::span<cplx> out) {
  assert(in.size() == out.size());
  fftw_execute_dft(plans_for(in.size()).bwd,
                   reinterpret_cast<fftw_complex*>(unconst(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

void forward(std::span<const cplx_ld> in, std::span<cplx_ld> out) {
  assert(in.size() == out.size());
  fftwl_execute_dft(plans_for_ld(in.size()).fwd,
                    reinterpret_cast<fftwl_complex*>(unconst(in.data())),
                    reinterpret_cast<fftwl_complex*>(out.data()));
}

void backward(std::span<const cplx_ld> in, std::span<cplx_ld> out) {
  assert(in.size() == out.size());
  fftwl_execute_dft(plans_for_ld(in.size()).bwd,
                    reinterpret_cast<fftwl_complex*>(unconst(in.data())),
                    reinterpret_cast<fftwl_complex*>(out.data()));
}

}  // namespace dklb::fft
