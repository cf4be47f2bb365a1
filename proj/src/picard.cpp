#include "dklb/picard.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dklb/error.hpp"
#include "dklb/norms.hpp"
#include "dklb/simd.hpp"
#include "dklb/solver.hpp"

namespace dklb {

namespace {

std::optional<double> inverse_A(const PhaseFunction& phi, double a, double b, double s, double T) {
  if (!(alpha(a, b, s, phi.p()) > 0.0)) return std::nullopt;
  return 1.0 / smoothing_A(phi, a, b, s, T);
}

bool all_finite(std::span<const cplx> c) {
  return std::all_of(c.begin(), c.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

// Quadrature weights (in units of dt) for int_0^{t_k} g dt' on nodes 0..k, k >= 2.
std::vector<double> duhamel_weights(std::size_t k) {
  std::vector<double> w(k + 1, 0.0);
  const std::size_t simpson_end = (k % 2 == 0) ? k : k - 3;
  for (std::size_t j = 0; j + 2 <= simpson_end; j += 2) {
    w[j] += 1.0 / 3.0;
    w[j + 1] += 4.0 / 3.0;
    w[j + 2] += 1.0 / 3.0;
  }
  if (k % 2 == 1) {
    const std::size_t j = k - 3;
    w[j] += 3.0 / 8.0;
    w[j + 1] += 9.0 / 8.0;
    w[j + 2] += 9.0 / 8.0;
    w[j + 3] += 3.0 / 8.0;
  }
  return w;
}

}  // namespace

LambdaValues lambda_values(const Trajectory& w, double s, std::optional<double> r,
                           std::optional<double> b) {
  const PhaseFunction& phi = w.phase;
  const double T = w.final_time();
  LambdaValues out;
  auto& l = out.lambda;

  double sup_hs = 0.0;
  for (const SpectralField& f : w.snapshots) sup_hs = std::max(sup_hs, hs_norm(f, s));
  l[0] = sup_hs;

  const SpatialOp none{};
  const SpatialOp ds{SpatialOpKind::D, s};
  const SpatialOp dsdx{SpatialOpKind::DDx, s};
  const SpatialOp dx{SpatialOpKind::Dx, 0.0};
  constexpr auto order = NormOrder::TOuterXInner;

  if (auto inv = inverse_A(phi, 2.0, 4.0, 0.0, T)) l[1] = *inv * mixed_norm(w, 2.0, 4.0, none, order);
  if (auto inv = inverse_A(phi, 2.0, 4.0, s, T)) l[2] = *inv * mixed_norm(w, 2.0, 4.0, ds, order);
  l[3] = mixed_norm(w, 2.0, 4.0, dsdx, order);
  l[4] = mixed_norm(w, 2.0, 4.0, dx, order);
  if (auto inv = inverse_A(phi, 2.0, kInf, 1.0, T)) l[5] = *inv * mixed_norm(w, 2.0, kInf, dx, order);
  if (r) {
    double sup = 0.0;
    for (const SpectralField& f : w.snapshots) sup = std::max(sup, weighted_norm(f, PolyWeight{*r}));
    l[6] = sup;
  }
  if (b) {
    double sup = 0.0;
    for (const SpectralField& f : w.snapshots) sup = std::max(sup, weighted_norm(f, ExpWeight{*b}));
    l[7] = sup;
  }

  if (l[1] && l[2]) out.Lambda = *l[0] + *l[1] + *l[2] + *l[3] + *l[4];
  if (out.Lambda && l[5] && l[6]) out.Omega = *out.Lambda + *l[5] + *l[6];
  if (out.Lambda && l[5] && l[7]) out.Theta = *out.Lambda + *l[5] + *l[7];
  return out;
}

PicardResult picard_solve(const SpectralField& u0, const PhaseFunction& phi, double T,
                          const PicardOptions& opts) {
  if (!(T > 0.0)) throw ValidationError("solver.T must be positive");
  if (opts.nt < 2 || opts.nt % 2 != 0) throw ValidationError("solver.nt must be even and >= 2");
  if (opts.max_iter == 0) throw ValidationError("solver.max_iter must be positive");
  if (!(opts.tol > 0.0)) throw ValidationError("solver.tol must be positive");
  if (!(opts.s >= 0.0)) throw ValidationError("solver.s must be non-negative");
  if (!(opts.cstar > 0.0)) throw ValidationError("solver.cstar must be positive");
  if (opts.r && !(*opts.r >= 0.0)) throw ValidationError("weights.r must be non-negative");

  const std::size_t nt = opts.nt;
  const double dt = T / static_cast<double>(nt);
  const SpectralGrid& grid = u0.grid();
  const std::size_t n = grid.size();
  const bool real = u0.is_real() && phi.is_even();

  std::vector<std::vector<cplx>> V(nt + 1);
  for (std::size_t m = 0; m <= nt; ++m) {
    V[m] = grid_semigroup_multiplier(phi, static_cast<double>(m) * dt, grid);
  }
  const std::vector<cplx> V_half = grid_semigroup_multiplier(phi, 0.5 * dt, grid);

  Trajectory traj{u0.grid_ptr(), phi, dt, {}, {}, Method::Picard};
  for (std::size_t k = 0; k <= nt; ++k) {
    traj.times.push_back(static_cast<double>(k) * dt);
    SpectralField lin = apply_multiplier(u0, V[k], phi.is_even());
    lin.set_real(real);
    traj.snapshots.push_back(std::move(lin));
  }
  const std::vector<SpectralField> linear = traj.snapshots;

  std::vector<std::vector<double>> weights(nt + 1);
  for (std::size_t k = 2; k <= nt; ++k) weights[k] = duhamel_weights(k);

  ContractionReport rep;
  rep.T_used = T;
  rep.z_bound = 2.0 * opts.cstar * hs_norm(u0, opts.s);
  rep.within_hypothesis = phi.p() > 2.5;
  if (!rep.within_hypothesis) {
    rep.note = "p <= 5/2: outside the range where the contraction argument applies";
  }
  const double u0_hs = hs_norm(u0, opts.s);
  const auto A23 = [&]() -> std::optional<double> {
    if (!(alpha(2.0, 4.0, opts.s, phi.p()) > 0.0)) return std::nullopt;
    return A2(phi, T) + A3(phi, opts.s, T);
  }();

  rep.lambda_values.push_back(lambda_values(traj, opts.s, opts.r, opts.b));

  std::vector<SpectralField> forcing(nt + 1, SpectralField::zero(u0.grid_ptr(), real));
  for (std::size_t iter = 1; iter <= opts.max_iter; ++iter) {
    std::vector<SpectralField> next = linear;
    if (opts.nonlinear) {
      for (std::size_t j = 0; j <= nt; ++j) forcing[j] = nonlinearity(traj.snapshots[j]);
      for (std::size_t k = 1; k <= nt; ++k) {
        auto acc = next[k].mutable_coeffs();
        if (k == 1) {
          // Simpson on [0, dt] with the midpoint value interpolated from t0, t1, t2.
          std::vector<cplx> mid(n);
          const auto N0 = forcing[0].coeffs(), N1 = forcing[1].coeffs(), N2 = forcing[2].coeffs();
          for (std::size_t i = 0; i < n; ++i) mid[i] = (3.0 * N0[i] + 6.0 * N1[i] - N2[i]) / 8.0;
          simd::multiply_accumulate(acc, V[1], N0, dt / 6.0);
          simd::multiply_accumulate(acc, V_half, mid, 4.0 * dt / 6.0);
          simd::multiply_accumulate(acc, V[0], N1, dt / 6.0);
          continue;
        }
        const auto& w = weights[k];
        for (std::size_t j = 0; j <= k; ++j) {
          simd::multiply_accumulate(acc, V[k - j], forcing[j].coeffs(), w[j] * dt);
        }
      }
    }

    double dist = 0.0;
    for (std::size_t k = 0; k <= nt; ++k) {
      if (!all_finite(next[k].coeffs())) {
        std::ostringstream os;
        os << "Picard iterate " << iter << " is not finite at t = " << traj.times[k];
        throw NumericalError(os.str());
      }
      dist = std::max(dist, hs_norm(next[k] - traj.snapshots[k], opts.s));
    }
    traj.snapshots = std::move(next);
    rep.iterate_distances.push_back(dist);
    rep.iterations = iter;

    const LambdaValues lv = lambda_values(traj, opts.s, opts.r, opts.b);
    const auto& prev = rep.lambda_values.back();
    if (A23 && lv.Lambda && prev.Lambda) {
      const double denom = u0_hs + *A23 * *prev.Lambda * *prev.Lambda;
      rep.contraction_constants.push_back(denom > 0.0 ? *lv.Lambda / denom : 0.0);
    }
    rep.lambda_values.push_back(lv);

    if (dist <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  return {std::move(traj), std::move(rep)};
}

}  // namespace dklb
