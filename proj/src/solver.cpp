#include "dklb/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dklb/error.hpp"
#include "dklb/norms.hpp"
#include "dklb/warnings.hpp"

namespace dklb {

std::string method_name(Method m) {
  switch (m) {
    case Method::Picard: return "picard";
    case Method::Etdrk4: return "etdrk4";
    case Method::Linear: return "linear";
  }
  return "?";
}

void Trajectory::validate() const {
  if (!grid) throw ValidationError("trajectory: missing grid");
  if (times.size() != snapshots.size()) {
    throw ValidationError("trajectory: times and snapshots differ in length");
  }
  if (times.empty()) return;
  if (times.front() != 0.0) throw ValidationError("trajectory: first time must be 0");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1]) ||
        std::abs(times[k] - static_cast<double>(k) * dt) > 1e-9 * (1.0 + times[k])) {
      throw ValidationError("trajectory: times are not uniform with step dt");
    }
  }
  for (const SpectralField& f : snapshots) {
    if (!(f.grid() == *grid)) throw ValidationError("trajectory: snapshot on a different grid");
  }
}

std::vector<cplx> grid_semigroup_multiplier(const PhaseFunction& phi, double t,
                                            const SpectralGrid& grid) {
  if (!(t >= 0.0)) throw ValidationError("semigroup: t must be non-negative");
  if (t == 0.0) return std::vector<cplx>(grid.size(), cplx(1.0, 0.0));
  std::size_t clamped = 0;
  std::vector<cplx> m = semigroup_multiplier(phi, t, grid.wavenumbers(), &clamped);
  if (clamped > 0) {
    std::ostringstream os;
    os << "semigroup multiplier exponent capped at " << kMaxMultiplierExponent << " for "
       << clamped << " modes (" << phi.describe() << ")";
    record_warning(os.str());
  }
  m[grid.nyquist_index()] = 0.0;
  return m;
}

SpectralField apply_semigroup(const PhaseFunction& phi, double t, const SpectralField& f) {
  if (t == 0.0) return f;
  return apply_multiplier(f, grid_semigroup_multiplier(phi, t, f.grid()), phi.is_even());
}

SpectralField nonlinearity(const SpectralField& f) {
  std::vector<cplx> u = to_physical(dealias(f));
  for (cplx& z : u) z *= z;
  SpectralField sq = from_physical(std::span<const cplx>(u), f.grid_ptr());
  const SpectralGrid& grid = f.grid();
  const auto xis = grid.wavenumbers();
  auto c = sq.mutable_coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = grid.is_resolved(k) && k != grid.nyquist_index()
               ? cplx(0.0, -0.5 * xis[k]) * c[k]
               : cplx(0.0, 0.0);
  }
  sq.set_real(f.is_real());
  return sq;
}

Trajectory linear_solve(const SpectralField& u0, const PhaseFunction& phi, double T,
                        std::size_t nt) {
  if (!(T > 0.0)) throw ValidationError("solver.T must be positive");
  if (nt == 0) throw ValidationError("solver.nt must be positive");
  const double dt = T / static_cast<double>(nt);
  Trajectory traj{u0.grid_ptr(), phi, dt, {}, {}, Method::Linear};
  traj.times.reserve(nt + 1);
  traj.snapshots.reserve(nt + 1);
  for (std::size_t k = 0; k <= nt; ++k) {
    const double t = static_cast<double>(k) * dt;
    traj.times.push_back(t);
    traj.snapshots.push_back(apply_semigroup(phi, t, u0));
  }
  return traj;
}

ExistenceTime existence_time(double u0_hs_norm, const PhaseFunction& phi, double s, double cstar) {
  if (!(cstar > 0.0)) throw ValidationError("existence.cstar must be positive");
  if (!(u0_hs_norm >= 0.0) || !std::isfinite(u0_hs_norm)) {
    throw ValidationError("existence: ||u0||_{H^s} must be finite and non-negative");
  }
  if (!(alpha(2.0, 4.0, s, phi.p()) > 0.0)) {
    throw ValidationError("existence: A3 = A(2,4,s) needs alpha(2,4,s) > 0");
  }
  const double z0 = 2.0 * cstar * u0_hs_norm;
  if (z0 == 0.0) return {1.0, 0.0};
  const double threshold = 1.0 / (2.0 * cstar * z0);
  auto ok = [&](double T) { return A2(phi, T) + A3(phi, s, T) < threshold; };
  if (ok(1.0)) return {1.0, z0};
  // Bisect down to adjacent doubles so that T0 depends monotonically on the threshold.
  double lo = 0.0, hi = 1.0;
  for (;;) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    (ok(mid) ? lo : hi) = mid;
  }
  return {lo, z0};
}

}  // namespace dklb
