#include "dklb/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "dklb/error.hpp"

namespace dklb {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

SpectralField normalised(std::vector<cplx> u, const GridPtr& grid, double norm) {
  const double current = physical_l2(u, *grid);
  if (current > 0.0) {
    for (cplx& z : u) z *= norm / current;
  }
  for (cplx& z : u) z = cplx(z.real(), 0.0);
  return from_physical(std::span<const cplx>(u), grid);
}

}  // namespace

SpectralField gaussian(const GridPtr& grid, double x0, double width, double norm) {
  if (!(width > 0.0)) throw ValidationError("gaussian: width must be positive");
  const auto x = grid->nodes();
  std::vector<cplx> u(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double y = (x[k] - x0) / width;
    u[k] = std::exp(-y * y);
  }
  return normalised(std::move(u), grid, norm);
}

SpectralField gaussian_mixture(const GridPtr& grid, std::uint64_t root_seed, std::uint64_t id) {
  std::mt19937_64 rng(sample_seed(root_seed, id));
  std::uniform_int_distribution<int> bumps(1, 5);
  std::uniform_real_distribution<double> width(0.5, 4.0);
  std::uniform_real_distribution<double> center(-0.25 * grid->length(), 0.25 * grid->length());
  std::uniform_real_distribution<double> amplitude(-1.0, 1.0);

  const auto x = grid->nodes();
  std::vector<cplx> u(x.size());
  const int count = bumps(rng);
  for (int i = 0; i < count; ++i) {
    const double w = width(rng);
    const double c = center(rng);
    double a = amplitude(rng);
    if (std::abs(a) < 0.1) a = std::copysign(0.1, a);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double y = (x[k] - c) / w;
      u[k] += a * std::exp(-y * y);
    }
  }
  return normalised(std::move(u), grid, 1.0);
}

std::size_t worker_count() {
  if (const char* env = std::getenv("DKLB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace dklb
