#include "dklb/etdrk4.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dklb/error.hpp"
#include "dklb/solver.hpp"

namespace dklb {

namespace {

constexpr int kContourPoints = 32;
constexpr double kTaylorRadius = 1e-4;

struct Phi4 {
  cplx Q, f1, f2, f3;  // divided by h
};

Phi4 taylor(cplx z) {
  const cplx z2 = z * z, z3 = z2 * z, z4 = z3 * z, z5 = z4 * z;
  return {
      0.5 + z / 8.0 + z2 / 48.0 + z3 / 384.0 + z4 / 3840.0 + z5 / 46080.0,
      1.0 / 6.0 + z / 6.0 + 3.0 * z2 / 40.0 + z3 / 45.0 + 5.0 * z4 / 1008.0 + z5 / 1120.0,
      1.0 / 6.0 + z / 12.0 + z2 / 40.0 + z3 / 180.0 + z4 / 1008.0 + z5 / 6720.0,
      1.0 / 6.0 - z2 / 120.0 - z3 / 360.0 - z4 / 1680.0 - z5 / 10080.0,
  };
}

Phi4 contour(cplx z) {
  Phi4 acc{};
  for (int j = 1; j <= kContourPoints; ++j) {
    const double ang = std::numbers::pi * (j - 0.5) / kContourPoints;
    // Full circle: the symbol is complex, so the conjugate half is not redundant.
    for (double sign : {1.0, -1.0}) {
      const cplx r = z + std::polar(1.0, sign * ang);
      const cplx er = std::exp(r), er2 = std::exp(0.5 * r);
      const cplx r2 = r * r, r3 = r2 * r;
      acc.Q += (er2 - 1.0) / r;
      acc.f1 += (-4.0 - r + er * (4.0 - 3.0 * r + r2)) / r3;
      acc.f2 += (2.0 + r + er * (-2.0 + r)) / r3;
      acc.f3 += (-4.0 - 3.0 * r - r2 + er * (4.0 - r)) / r3;
    }
  }
  const double inv = 1.0 / (2 * kContourPoints);
  return {acc.Q * inv, acc.f1 * inv, acc.f2 * inv, acc.f3 * inv};
}

bool finite(std::span<const cplx> c) {
  for (const cplx& z : c) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

}  // namespace

Etdrk4Coefficients etdrk4_coefficients(const PhaseFunction& phi, const SpectralGrid& grid,
                                       double h) {
  if (!(h > 0.0)) throw ValidationError("solver.dt must be positive");
  const auto xis = grid.wavenumbers();
  const std::size_t n = xis.size();
  Etdrk4Coefficients c{std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n),
                       std::vector<cplx>(n), std::vector<cplx>(n), std::vector<cplx>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = xis[k];
    const cplx z = h * cplx(phi.eta() * phi.eval(xi), xi * xi * xi);
    c.E[k] = std::exp(z);
    c.E2[k] = std::exp(0.5 * z);
    const Phi4 f = std::abs(z) < kTaylorRadius ? taylor(z) : contour(z);
    c.Q[k] = h * f.Q;
    c.f1[k] = h * f.f1;
    c.f2[k] = h * f.f2;
    c.f3[k] = h * f.f3;
  }
  const std::size_t ny = grid.nyquist_index();
  c.E[ny] = c.E2[ny] = c.Q[ny] = c.f1[ny] = c.f2[ny] = c.f3[ny] = 0.0;
  return c;
}

Trajectory etdrk4_solve(const SpectralField& u0, const PhaseFunction& phi, double T, double dt,
                        const Etdrk4Options& opts) {
  if (!(T > 0.0)) throw ValidationError("solver.T must be positive");
  if (!(dt > 0.0)) throw ValidationError("solver.dt must be positive");
  const double ratio = T / dt;
  const double steps_d = std::round(ratio);
  if (steps_d < 1.0 || std::abs(ratio - steps_d) > 1e-9 * ratio) {
    throw ValidationError("solver.T / solver.dt must be an integer");
  }
  if (opts.save_every == 0) throw ValidationError("output.save_every must be positive");
  const auto steps = static_cast<std::size_t>(steps_d);
  if (steps % opts.save_every != 0) {
    throw ValidationError("output.save_every must divide the number of steps T/dt");
  }

  const Etdrk4Coefficients c = etdrk4_coefficients(phi, u0.grid(), dt);
  const bool real = u0.is_real() && phi.is_even();
  const std::size_t n = u0.grid().size();

  Trajectory traj{u0.grid_ptr(), phi, dt * static_cast<double>(opts.save_every), {}, {},
                  Method::Etdrk4};
  traj.times.push_back(0.0);
  traj.snapshots.push_back(u0);

  SpectralField v = u0;
  v.set_real(real);
  std::vector<cplx> tmp(n);
  for (std::size_t step = 1; step <= steps; ++step) {
    if (!opts.nonlinear) {
      v = apply_multiplier(v, c.E, phi.is_even());
    } else {
      const SpectralField Nv = nonlinearity(v);
      const auto vc = v.coeffs();
      const auto nv = Nv.coeffs();

      SpectralField a = v;
      auto ac = a.mutable_coeffs();
      for (std::size_t k = 0; k < n; ++k) ac[k] = c.E2[k] * vc[k] + c.Q[k] * nv[k];
      const SpectralField Na = nonlinearity(a);
      const auto na = Na.coeffs();

      SpectralField b = v;
      auto bc = b.mutable_coeffs();
      for (std::size_t k = 0; k < n; ++k) bc[k] = c.E2[k] * vc[k] + c.Q[k] * na[k];
      const SpectralField Nb = nonlinearity(b);
      const auto nb = Nb.coeffs();

      SpectralField cc = v;
      auto ccc = cc.mutable_coeffs();
      for (std::size_t k = 0; k < n; ++k) ccc[k] = c.E2[k] * ac[k] + c.Q[k] * (2.0 * nb[k] - nv[k]);
      const SpectralField Nc = nonlinearity(cc);
      const auto nc = Nc.coeffs();

      for (std::size_t k = 0; k < n; ++k) {
        tmp[k] = c.E[k] * vc[k] + nv[k] * c.f1[k] + 2.0 * (na[k] + nb[k]) * c.f2[k] +
                 nc[k] * c.f3[k];
      }
      std::copy(tmp.begin(), tmp.end(), v.mutable_coeffs().begin());
    }
    if (!finite(v.coeffs())) {
      std::ostringstream os;
      os << "ETDRK4 produced a non-finite value at step " << step << " (t = "
         << static_cast<double>(step) * dt << ")";
      throw NumericalError(os.str());
    }
    if (step % opts.save_every == 0) {
      traj.times.push_back(static_cast<double>(step / opts.save_every) * traj.dt);
      traj.snapshots.push_back(v);
    }
  }
  return traj;
}

}  // namespace dklb
