#include "dklb/norms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dklb/ensemble.hpp"
#include "dklb/error.hpp"
#include "dklb/simd.hpp"
#include "dklb/solver.hpp"

namespace dklb {

namespace {

double recip(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Composite trapezoid norm of samples g_k with step dt.
double time_norm(std::span<const double> g, double dt, double q) {
  if (std::isinf(q)) return *std::max_element(g.begin(), g.end());
  if (g.size() < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double w = (k == 0 || k + 1 == g.size()) ? 0.5 * dt : dt;
    acc += w * std::pow(g[k], q);
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace

double alpha(double a, double b, double s, double p) {
  const double inv_a1 = 1.0 - recip(a);
  return recip(a) - s / p - (inv_a1 - recip(b)) / p;
}

double smoothing_A(const SmoothingParams& prm) {
  const double al = alpha(prm.a, prm.b, prm.s, prm.p);
  if (!(al > 0.0)) {
    throw ValidationError("smoothing constant A(" + fmt(prm.a) + "," + fmt(prm.b) + "," +
                          fmt(prm.s) + ") needs alpha > 0 (alpha = " + fmt(al) + ")");
  }
  if (!(prm.T >= 0.0)) throw ValidationError("smoothing constant: T must be non-negative");
  const double inv_a = 1.0 / prm.a;
  return std::exp(prm.eta * prm.T) * std::pow(prm.T, inv_a) +
         std::pow(prm.a * al, -inv_a) * std::pow(prm.T, al);
}

double smoothing_A(const PhaseFunction& phi, double a, double b, double s, double T) {
  return smoothing_A(SmoothingParams{a, b, s, phi.p(), T, phi.eta()});
}

double A2(const PhaseFunction& phi, double T) { return smoothing_A(phi, 2.0, 4.0, 0.0, T); }
double A3(const PhaseFunction& phi, double s, double T) { return smoothing_A(phi, 2.0, 4.0, s, T); }
double A4(const PhaseFunction& phi, double T) { return smoothing_A(phi, 2.0, 4.0, 1.0, T); }
double A6(const PhaseFunction& phi, double T) { return smoothing_A(phi, 2.0, kInf, 1.0, T); }

double hs_norm(const SpectralField& f, double s) {
  const auto xis = f.grid().wavenumbers();
  if (s == 0.0) return coefficient_l2(f);
  std::vector<double> w(xis.size());
  for (std::size_t k = 0; k < xis.size(); ++k) w[k] = std::pow(1.0 + xis[k] * xis[k], s);
  return std::sqrt(f.grid().length() * simd::weighted_sum_abs2(f.coeffs(), w));
}

double weighted_norm(const SpectralField& f, const WeightSpec& w) {
  std::vector<double> w2 = weight_values(w, f.grid());
  for (double& v : w2) v *= v;
  const std::vector<cplx> u = to_physical(f);
  return std::sqrt(f.grid().dx() * simd::weighted_sum_abs2(u, w2));
}

double lp_norm(std::span<const cplx> samples, const SpectralGrid& grid, double q) {
  if (std::isinf(q)) return std::sqrt(simd::max_abs2(samples));
  if (q == 2.0) return physical_l2(samples, grid);
  if (q == 4.0) return std::pow(grid.dx() * simd::sum_abs4(samples), 0.25);
  double acc = 0.0;
  for (const cplx& z : samples) acc += std::pow(std::abs(z), q);
  return std::pow(grid.dx() * acc, 1.0 / q);
}

SpectralField SpatialOp::apply(const SpectralField& f) const {
  switch (kind) {
    case SpatialOpKind::None: return f;
    case SpatialOpKind::D: return fractional_D(f, s);
    case SpatialOpKind::Dx: return derivative(f, 1);
    case SpatialOpKind::DDx: return fractional_D(derivative(f, 1), s);
    case SpatialOpKind::J: return fractional_J(f, s);
  }
  return f;
}

double mixed_norm(const Trajectory& traj, double outer, double inner, const SpatialOp& op,
                  NormOrder order) {
  if (traj.snapshots.empty()) throw ValidationError("mixed_norm: empty trajectory");
  if (!(outer >= 1.0) || !(inner >= 1.0)) {
    throw ValidationError("mixed_norm: exponents must be >= 1");
  }
  const SpectralGrid& grid = *traj.grid;
  const std::size_t nt = traj.size();
  const std::size_t nx = grid.size();

  if (order == NormOrder::TOuterXInner) {
    std::vector<double> g(nt);
    for (std::size_t k = 0; k < nt; ++k) {
      g[k] = lp_norm(to_physical(op.apply(traj.snapshots[k])), grid, inner);
    }
    return time_norm(g, traj.dt, outer);
  }

  std::vector<double> modulus(nt * nx);  // row per time
  for (std::size_t k = 0; k < nt; ++k) {
    const auto u = to_physical(op.apply(traj.snapshots[k]));
    for (std::size_t j = 0; j < nx; ++j) modulus[k * nx + j] = std::abs(u[j]);
  }
  std::vector<double> column(nt);
  double acc = 0.0;
  for (std::size_t j = 0; j < nx; ++j) {
    for (std::size_t k = 0; k < nt; ++k) column[k] = modulus[k * nx + j];
    const double h = time_norm(column, traj.dt, inner);
    acc = std::isinf(outer) ? std::max(acc, h) : acc + std::pow(h, outer);
  }
  return std::isinf(outer) ? acc : std::pow(grid.dx() * acc, 1.0 / outer);
}

// --- smoothing ensemble ----------------------------------------------------

std::string smoothing_case_name(SmoothingCase c) {
  switch (c) {
    case SmoothingCase::C1: return "C1";
    case SmoothingCase::C2: return "C2";
    case SmoothingCase::C3: return "C3";
    case SmoothingCase::C4: return "C4";
    case SmoothingCase::PInf: return "P_inf";
  }
  return "?";
}

SmoothingCase parse_smoothing_case(const std::string& name) {
  for (SmoothingCase c : {SmoothingCase::C1, SmoothingCase::C2, SmoothingCase::C3,
                          SmoothingCase::C4, SmoothingCase::PInf}) {
    if (smoothing_case_name(c) == name) return c;
  }
  throw ValidationError("smoothing.case must be one of C1, C2, C3, C4, P_inf (got '" + name + "')");
}

void SmoothingSetup::check_hypothesis(double p) const {
  if (!(T > 0.0)) throw ValidationError("smoothing.T must be positive");
  if (nt < 2) throw ValidationError("smoothing.nt must be >= 2");
  if (kind != SmoothingCase::PInf && !(s >= 0.0)) {
    throw ValidationError("smoothing.s must be non-negative");
  }
  switch (kind) {
    case SmoothingCase::C1:
      if (!(a >= 2.0)) throw ValidationError("smoothing.a must be >= 2 for C1");
      if (!(alpha(a, kInf, s, p) > 0.0)) {
        throw ValidationError("C1 requires s < p/a - 1/a1 (alpha(a,inf,s) > 0)");
      }
      break;
    case SmoothingCase::C2:
      if (!(b >= 2.0)) throw ValidationError("smoothing.b must be >= 2 for C2");
      if (!(alpha(2.0, b, s, p) > 0.0)) throw ValidationError("C2 requires alpha(2,b,s) > 0");
      break;
    case SmoothingCase::C3:
      if (!(b >= 2.0)) throw ValidationError("smoothing.b must be >= 2 for C3");
      if (!(alpha(2.0, b, 1.0 - s, p) > 0.0)) {
        throw ValidationError("C3 requires alpha(2,b,1-s) > 0");
      }
      break;
    case SmoothingCase::C4:
      if (!(s < 0.5 * p)) throw ValidationError("C4 requires s < p/2");
      break;
    case SmoothingCase::PInf:
      if (!(q >= 0.0)) throw ValidationError("smoothing.q must be non-negative");
      if (!(p > 2.0 * q)) throw ValidationError("P_inf requires p > 2q");
      break;
  }
}

std::string SmoothingSetup::id() const {
  std::ostringstream os;
  os << smoothing_case_name(kind);
  switch (kind) {
    case SmoothingCase::C1: os << "(a=" << a << ",s=" << s << ")"; break;
    case SmoothingCase::C2:
    case SmoothingCase::C3: os << "(b=" << b << ",s=" << s << ")"; break;
    case SmoothingCase::C4: os << "(s=" << s << ")"; break;
    case SmoothingCase::PInf: os << "(q=" << q << ")"; break;
  }
  os << ",T=" << T;
  return os.str();
}

double smoothing_ratio(const SmoothingSetup& st, const PhaseFunction& phi, const SpectralField& u0) {
  st.check_hypothesis(phi.p());
  const Trajectory traj = linear_solve(u0, phi, st.T, st.nt);
  const double l2 = coefficient_l2(u0);
  double lhs = 0.0, rhs = 0.0;
  switch (st.kind) {
    case SmoothingCase::C1: {
      const double a1 = st.a / (st.a - 1.0);
      lhs = mixed_norm(traj, st.a, kInf, {SpatialOpKind::D, st.s}, NormOrder::TOuterXInner);
      rhs = smoothing_A(phi, st.a, kInf, st.s, st.T) * lp_norm(to_physical(u0), u0.grid(), a1);
      break;
    }
    case SmoothingCase::C2:
      lhs = mixed_norm(traj, 2.0, st.b, {SpatialOpKind::D, st.s}, NormOrder::TOuterXInner);
      rhs = smoothing_A(phi, 2.0, st.b, st.s, st.T) * l2;
      break;
    case SmoothingCase::C3:
      lhs = mixed_norm(traj, 2.0, st.b, {SpatialOpKind::D, 1.0}, NormOrder::TOuterXInner);
      rhs = smoothing_A(phi, 2.0, st.b, 1.0 - st.s, st.T) * coefficient_l2(fractional_D(u0, st.s));
      break;
    case SmoothingCase::C4:
      lhs = mixed_norm(traj, 2.0, 2.0, {SpatialOpKind::D, st.s}, NormOrder::TOuterXInner);
      rhs = smoothing_A(phi, 2.0, 2.0, st.s, st.T) * l2;
      break;
    case SmoothingCase::PInf: {
      const double e = 1.0 - 2.0 * st.q / phi.p();
      lhs = mixed_norm(traj, kInf, 2.0, {SpatialOpKind::D, st.q}, NormOrder::XOuterTInner);
      rhs = std::sqrt(st.T + std::pow(st.T, e) / e) * l2;
      break;
    }
  }
  if (rhs == 0.0) return 0.0;
  const double ratio = lhs / rhs;
  if (!std::isfinite(ratio)) throw NumericalError("smoothing ratio is not finite for " + st.id());
  return ratio;
}

NormEnsembleReport verify_smoothing(const SmoothingSetup& setup, const PhaseFunction& phi,
                                    const GridPtr& grid, std::size_t ensemble_size,
                                    std::uint64_t seed, double scale) {
  setup.check_hypothesis(phi.p());
  if (ensemble_size == 0) throw ValidationError("ensemble.size must be positive");
  NormEnsembleReport rep;
  rep.inequality_id = setup.id();
  rep.sample_count = ensemble_size;
  rep.ratios.assign(ensemble_size, 0.0);
  parallel_for(ensemble_size, [&](std::size_t i) {
    SpectralField u0 = gaussian_mixture(grid, seed, i);
    u0 *= scale;
    rep.ratios[i] = smoothing_ratio(setup, phi, u0);
  });
  rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  rep.fitted_constant = rep.max_ratio;
  return rep;
}

double interpolation_check(const SpectralField& f, double a, double b, double theta,
                           double p_exp) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("interpolation: theta must lie in (0,1)");
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("interpolation: a and b must be positive");
  if (p_exp != 2.0) throw ValidationError("interpolation: only the L2 case (p = 2) is supported");
  const double weighted = weighted_norm(f, BracketWeight{b});
  const double smooth = hs_norm(f, a);
  const double rhs = std::pow(weighted, theta) * std::pow(smooth, 1.0 - theta);
  if (rhs == 0.0) return 0.0;
  const double lhs = weighted_norm(fractional_J(f, (1.0 - theta) * a), BracketWeight{theta * b});
  return lhs / rhs;
}

}  // namespace dklb
