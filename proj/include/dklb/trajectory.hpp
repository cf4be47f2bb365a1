#pragma once

#include <string>
#include <vector>

#include "dklb/grid.hpp"
#include "dklb/symbols.hpp"

namespace dklb {

enum class Method { Picard, Etdrk4, Linear };

std::string method_name(Method m);

/// Uniformly sampled solution u(t_k), t_k = k dt, k = 0..K.
struct Trajectory {
  GridPtr grid;
  PhaseFunction phase;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<SpectralField> snapshots;
  Method method = Method::Linear;

  std::size_t size() const { return snapshots.size(); }
  double final_time() const { return times.empty() ? 0.0 : times.back(); }

  /// Throws ValidationError unless times/snapshots agree in length, times
  /// start at 0 and are uniform with step dt, and every snapshot is on `grid`.
  void validate() const;
};

}  // namespace dklb
