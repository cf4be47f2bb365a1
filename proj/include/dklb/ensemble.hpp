#pragma once

// Random initial data and a small deterministic parallel loop.

#include <cstddef>
#include <cstdint>
#include <functional>

#include "dklb/grid.hpp"

namespace dklb {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of sample `id` derived from `root`; independent of thread schedule.
inline std::uint64_t sample_seed(std::uint64_t root, std::uint64_t id) {
  return splitmix64(splitmix64(root) ^ splitmix64(id + 0x632be59bd9b4e019ULL));
}

/// Real sum of 1-5 Gaussian bumps with widths in [0.5, 4] and centers in the
/// middle half of the domain, normalised to unit L2 norm.
SpectralField gaussian_mixture(const GridPtr& grid, std::uint64_t root_seed, std::uint64_t id);

/// A e^{-((x - x0)/w)^2} with A chosen so that the L2 norm equals `norm`.
SpectralField gaussian(const GridPtr& grid, double x0, double width, double norm = 1.0);

/// Worker count: DKLB_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dklb
