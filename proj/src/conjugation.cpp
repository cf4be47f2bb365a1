#include "dklb/conjugation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "dklb/ensemble.hpp"
#include "dklb/error.hpp"
#include "dklb/fft.hpp"
#include "dklb/solver.hpp"
#include "dklb/warnings.hpp"

namespace dklb {

namespace {

using ld = long double;
using cplx_ld = std::complex<long double>;

cplx capped_exp(cplx e, std::size_t& clamped) {
  if (e.real() > kMaxMultiplierExponent) {
    e.real(kMaxMultiplierExponent);
    ++clamped;
  }
  return std::exp(e);
}

void note_clamped(std::size_t clamped, const char* what) {
  if (clamped == 0) return;
  std::ostringstream os;
  os << what << ": exponent capped at " << kMaxMultiplierExponent << " for " << clamped << " modes";
  record_warning(os.str());
}

bool is_even_integer(double v) { return std::floor(v) == v && std::fmod(v, 2.0) == 0.0; }

// Coefficients of P(z), u_t = P(d/dx) u, keyed by power of z.
std::map<int, cplx> linear_polynomial(const PhaseFunction& phi) {
  if (!is_even_integer(phi.p())) {
    throw ValidationError("shifted polynomial route needs an even integer p (got " +
                          std::to_string(phi.p()) + ")");
  }
  std::map<int, cplx> P;
  P[3] += -1.0;  // dispersion: -d^3/dx^3
  // |xi|^p = (-z^2)^{p/2}
  const int half = static_cast<int>(phi.p()) / 2;
  P[2 * half] += -phi.eta() * (half % 2 == 0 ? 1.0 : -1.0);
  for (const PhaseTerm& term : phi.terms()) {
    if (!is_even_integer(term.n)) {
      throw ValidationError("shifted polynomial route needs even integer |xi| powers");
    }
    const int nh = static_cast<int>(term.n) / 2;
    // xi^m = (-i z)^m
    cplx im_pow = 1.0;
    for (int i = 0; i < term.m; ++i) im_pow *= cplx(0.0, -1.0);
    P[term.m + 2 * nh] += phi.eta() * term.coeff * im_pow * (nh % 2 == 0 ? 1.0 : -1.0);
  }
  return P;
}

ld phase_eval_ld(const PhaseFunction& phi, ld xi) {
  ld v = -std::pow(std::fabs(xi), static_cast<ld>(phi.p()));
  for (const PhaseTerm& t : phi.terms()) {
    v += static_cast<ld>(t.coeff) * std::pow(xi, t.m) * std::pow(std::fabs(xi), static_cast<ld>(t.n));
  }
  return v;
}

// Samples of f in long double with representation noise removed. The double
// coefficients carry roundoff of order 1e-17 relative everywhere on the grid,
// which e^{bx} would amplify by up to e^{bL/2}; values below the floor are
// indistinguishable from zero and are treated as zero.
constexpr ld kSupportFloor = 1e-15L;

std::vector<cplx_ld> support_samples_ld(const SpectralField& f) {
  const std::size_t n = f.grid().size();
  std::vector<cplx_ld> c(n), u(n);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx_ld fk(f.coeffs()[k].real(), f.coeffs()[k].imag());
    c[k] = (k & 1u) ? -fk : fk;
  }
  fft::backward(c, u);
  ld peak = 0.0L;
  for (const auto& v : u) peak = std::max(peak, std::abs(v));
  for (auto& v : u) {
    if (std::abs(v) <= kSupportFloor * peak) v = 0.0L;
    if (f.is_real()) v.imag(0.0L);
  }
  return u;
}

ld node_ld(const SpectralGrid& grid, std::size_t k) {
  const ld L = grid.length();
  return -0.5L * L + L * static_cast<ld>(k) / static_cast<ld>(grid.size());
}

// e^{bx} (V(t) f) on the grid nodes in long double, from long double samples of f.
std::vector<cplx_ld> weighted_flow_ld(const std::vector<cplx_ld>& samples, const SpectralGrid& grid,
                                      const PhaseFunction& phi, double b, double t) {
  const std::size_t n = grid.size();
  const ld L = grid.length();
  std::vector<cplx_ld> c(n), u(n);
  fft::forward(samples, c);
  for (std::size_t k = 0; k < n; ++k) {
    const ld xi = 2.0L * std::numbers::pi_v<ld> * static_cast<ld>(grid.mode_index(k)) / L;
    cplx_ld mult = 1.0L;
    if (t > 0.0) {
      ld re = static_cast<ld>(phi.eta()) * t * phase_eval_ld(phi, xi);
      re = std::min<ld>(re, kMaxMultiplierExponent);
      const ld im = static_cast<ld>(t) * xi * xi * xi;
      mult = std::exp(re) * cplx_ld(std::cos(im), std::sin(im));
      if (k == grid.nyquist_index()) mult = 0.0L;
    }
    // (-1)^k from_physical and (-1)^k to_physical cancel.
    c[k] *= mult / static_cast<ld>(n);
  }
  fft::backward(c, u);
  for (std::size_t k = 0; k < n; ++k) u[k] *= std::exp(static_cast<ld>(b) * node_ld(grid, k));
  return u;
}

}  // namespace

double conjugation_delta(double b, double eta) { return eta * (b * b + b * b * b * b) - b * b * b; }

double conjugation_mu(double b, double eta) { return 3 * b * b - 2 * eta * b - 4 * eta * b * b * b; }

double conjugation_theta(double xi, double b, double eta) {
  const double x2 = xi * xi;
  return eta * x2 * x2 + (3 * b - eta - 6 * eta * b * b) * x2;
}

std::vector<cplx> conjugated_multiplier(double b, double eta, double t,
                                        std::span<const double> xis, std::size_t* clamped) {
  std::vector<cplx> out(xis.size());
  std::size_t n_clamped = 0;
  for (std::size_t k = 0; k < xis.size(); ++k) {
    const cplx z(-b, xis[k]);
    const cplx z2 = z * z;
    out[k] = capped_exp(-t * (z2 * z + eta * (z2 + z2 * z2)), n_clamped);
  }
  if (clamped) *clamped = n_clamped;
  return out;
}

std::vector<cplx> conjugated_multiplier_expanded(double b, double eta, double t,
                                                 std::span<const double> xis) {
  std::vector<cplx> out(xis.size());
  const double b2 = b * b, b3 = b2 * b, b4 = b2 * b2;
  for (std::size_t k = 0; k < xis.size(); ++k) {
    const double xi = xis[k], x2 = xi * xi, x3 = x2 * xi, x4 = x2 * x2;
    double re = -t * (3 * b * x2 - b3 + eta * (-x2 + b2 + x4 - 6 * b2 * x2 + b4));
    re = std::min(re, kMaxMultiplierExponent);
    const double im = -t * (-x3 + 3 * b2 * xi + eta * (-2 * b * xi + 4 * b * x3 - 4 * b3 * xi));
    out[k] = std::exp(re) * cplx(std::cos(im), std::sin(im));
  }
  return out;
}

std::vector<cplx> shifted_polynomial_multiplier(const PhaseFunction& phi, double b, double t,
                                                std::span<const double> xis) {
  const std::map<int, cplx> P = linear_polynomial(phi);
  const int degree = P.rbegin()->first;
  std::vector<cplx> coeff(static_cast<std::size_t>(degree) + 1, 0.0);
  for (const auto& [power, c] : P) coeff[static_cast<std::size_t>(power)] = c;

  std::vector<cplx> out(xis.size());
  std::size_t clamped = 0;
  for (std::size_t k = 0; k < xis.size(); ++k) {
    const cplx z(-b, xis[k]);
    cplx acc = 0.0;
    for (int i = degree; i >= 0; --i) acc = acc * z + coeff[static_cast<std::size_t>(i)];
    out[k] = capped_exp(t * acc, clamped);
  }
  note_clamped(clamped, "shifted polynomial multiplier");
  return out;
}

SpectralField conjugated_propagator(double b, double eta, double t, const SpectralField& g) {
  if (!(t >= 0.0)) throw ValidationError("conjugation.t must be non-negative");
  if (!(b >= 0.0)) throw ValidationError("conjugation.b must be non-negative");
  if (!(eta > 0.0)) throw ValidationError("conjugation: eta must be positive");
  if (t == 0.0) return g;
  std::size_t clamped = 0;
  std::vector<cplx> m = conjugated_multiplier(b, eta, t, g.grid().wavenumbers(), &clamped);
  note_clamped(clamped, "conjugated multiplier");
  m[g.grid().nyquist_index()] = 0.0;
  return apply_multiplier(g, m, true);
}

SpectralField conjugated_propagator(const PhaseFunction& phi, double b, double t,
                                    const SpectralField& g) {
  if (!(t >= 0.0)) throw ValidationError("conjugation.t must be non-negative");
  if (t == 0.0) return g;
  std::vector<cplx> m = shifted_polynomial_multiplier(phi, b, t, g.grid().wavenumbers());
  m[g.grid().nyquist_index()] = 0.0;
  return apply_multiplier(g, m, phi.is_even());
}

ConjugationResult conjugation_check(const SpectralField& f, double b, double eta, double t,
                                    double leakage_threshold) {
  if (!(t >= 0.0)) throw ValidationError("conjugation.t must be non-negative");
  if (!(b >= 0.0)) throw ValidationError("conjugation.b must be non-negative");
  const SpectralGrid& grid = f.grid();
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, eta).phase;

  ConjugationResult res;
  res.delta = conjugation_delta(b, eta);
  res.mu = conjugation_mu(b, eta);

  // W(t)(e^{bx} f): weight applied to the samples, then the conjugated
  // propagator in double precision.
  const std::vector<cplx_ld> fs = support_samples_ld(f);
  std::vector<cplx> gs(fs.size());
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const cplx_ld v = fs[k] * std::exp(static_cast<ld>(b) * node_ld(grid, k));
    gs[k] = cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  }
  SpectralField g = from_physical(gs, f.grid_ptr());
  g.set_real(f.is_real());
  const std::vector<cplx> B = to_physical(conjugated_propagator(b, eta, t, g));

  // e^{bx} V(t) f: long double throughout.
  const std::vector<cplx_ld> A = weighted_flow_ld(fs, grid, phi, b, t);
  std::vector<cplx> A_d(A.size());
  for (std::size_t k = 0; k < A.size(); ++k) {
    A_d[k] = cplx(static_cast<double>(A[k].real()), static_cast<double>(A[k].imag()));
  }
  res.boundary_leakage = std::max(
      {boundary_leakage(gs, grid), boundary_leakage(A_d, grid), boundary_leakage(B, grid)});
  if (res.boundary_leakage > leakage_threshold) {
    std::ostringstream os;
    os << "conjugation check refused: boundary leakage " << res.boundary_leakage
       << " exceeds threshold " << leakage_threshold
       << " (the identity holds on the line, not on the periodic domain; move the data left "
          "or enlarge L)";
    throw ValidationError(os.str());
  }

  const double weighted_f = coefficient_l2(g);
  double norm_A = 0.0;
  if (t == 0.0) {
    // V(0) and W(0) are the identity; both sides are e^{bx} f.
    norm_A = physical_l2(B, grid);
    res.rel_error = 0.0;
  } else {
    ld num = 0.0L, den = 0.0L;
    for (std::size_t k = 0; k < A.size(); ++k) {
      const cplx_ld d = A[k] - cplx_ld(B[k].real(), B[k].imag());
      num += std::norm(d);
      den += std::norm(A[k]);
    }
    norm_A = static_cast<double>(std::sqrt(den * static_cast<ld>(grid.dx())));
    res.rel_error = den > 0.0L ? static_cast<double>(std::sqrt(num / den)) : 0.0;
  }
  const double rhs = std::exp(-t * res.delta) * (1.0 + std::exp(t)) * weighted_f;
  res.bound_ratio = rhs > 0.0 ? norm_A / rhs : 0.0;
  return res;
}

double exchange_order(const PhaseFunction& phi) { return phi.p() - 1.0; }

double weight_exchange_check(const SpectralField& u0, const PhaseFunction& phi, double r, double s,
                             double t) {
  if (!(t >= 0.0)) throw ValidationError("decay.t must be non-negative");
  if (!(r >= 0.0) || !(s >= 0.0)) throw ValidationError("decay.r and decay.s must be non-negative");
  const double K = exchange_order(phi);
  if (r > s / K) {
    std::ostringstream os;
    os << "decay.r = " << r << " exceeds s/K = " << s / K << " (K = p - 1 = " << K << ")";
    throw ValidationError(os.str());
  }
  const double weighted0 = weighted_norm(u0, PolyWeight{r});
  const double rhs = (1.0 + t) * hs_norm(u0, s) + weighted0;
  if (rhs == 0.0) return 0.0;
  return weighted_norm(apply_semigroup(phi, t, u0), PolyWeight{r}) / rhs;
}

std::vector<NormEnsembleReport> weight_exchange_ensemble(const PhaseFunction& phi,
                                                         const GridPtr& grid, double r, double s,
                                                         std::span<const double> ts,
                                                         std::size_t ensemble_size,
                                                         std::uint64_t seed) {
  if (ensemble_size == 0) throw ValidationError("ensemble.size must be positive");
  const double K = exchange_order(phi);
  if (r > s / K) {
    std::ostringstream os;
    os << "decay.r = " << r << " exceeds s/K = " << s / K << " (K = p - 1 = " << K << ")";
    throw ValidationError(os.str());
  }
  std::vector<NormEnsembleReport> reports(ts.size());
  std::vector<std::vector<double>> ratios(ts.size(), std::vector<double>(ensemble_size));
  parallel_for(ensemble_size, [&](std::size_t i) {
    const SpectralField u0 = gaussian_mixture(grid, seed, i);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      ratios[j][i] = weight_exchange_check(u0, phi, r, s, ts[j]);
    }
  });
  for (std::size_t j = 0; j < ts.size(); ++j) {
    std::ostringstream id;
    id << "exchange(r=" << r << ",s=" << s << ",t=" << ts[j] << ")";
    auto& rep = reports[j];
    rep.inequality_id = id.str();
    rep.sample_count = ensemble_size;
    rep.ratios = std::move(ratios[j]);
    for (double v : rep.ratios) {
      if (!std::isfinite(v)) throw NumericalError("exchange ratio is not finite for " + id.str());
    }
    rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.fitted_constant = rep.max_ratio;
  }
  return reports;
}

SpectralField regularity_probe_datum(const GridPtr& grid, const RegularityProbeParams& prm) {
  const auto x = grid->nodes();
  const double edge = 0.35 * grid->length();
  std::vector<double> u(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double cusp = std::pow(x[k] * x[k] + prm.h * prm.h, 0.5 * prm.gamma);
    const double decay = std::pow(1.0 + x[k] * x[k], -0.5 * (prm.alpha_decay + 0.5 + prm.epsilon));
    const double window = std::exp(-std::pow(x[k] / edge, 16));
    u[k] = cusp * decay * window;
  }
  return from_physical(std::span<const double>(u), grid);
}

std::vector<RegularityProbeRow> regularity_gain_probe(const RegularityProbeParams& prm) {
  if (prm.k < 2) throw ValidationError("decay.k must be >= 2");
  if (!(prm.alpha_decay >= 0.0)) throw ValidationError("decay.alpha must be non-negative");
  if (!(prm.h > 0.0)) throw ValidationError("decay.h must be positive");
  for (double t : prm.t_grid) {
    if (!(t > 0.0)) throw ValidationError("decay.t values must be positive");
  }
  const PhaseFunction phi = make_preset(PresetKind::Optimality, prm.eta, prm.k).phase;
  const GridPtr grid = SpectralGrid::create(prm.n, prm.length);
  const SpectralField u0 = regularity_probe_datum(grid, prm);
  const double norm0 = coefficient_l2(u0);

  std::vector<double> sigmas = prm.sigma_grid;
  if (sigmas.empty()) {
    const double top = std::max(2.0 * 2.0 * prm.k * prm.alpha_decay, 1.0);
    for (int i = 0; i <= 8; ++i) sigmas.push_back(top * i / 8.0);
  }

  std::vector<RegularityProbeRow> rows;
  for (double t : prm.t_grid) {
    const SpectralField ut = apply_semigroup(phi, t, u0);
    for (double sigma : sigmas) {
      if (!(sigma >= 0.0)) throw ValidationError("decay.sigma values must be non-negative");
      const double norm = coefficient_l2(fractional_D(ut, sigma));
      const double bound = std::sqrt(sup_weighted_multiplier(phi, sigma, t)) * norm0;
      if (norm > bound * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "regularity probe: ||D^" << sigma << " V(" << t << ") u0|| = " << norm
           << " exceeds its multiplier bound " << bound;
        throw NumericalError(os.str());
      }
      const double rate = norm0 > 0.0 ? norm / (std::pow(t, -sigma / (2.0 * prm.k)) * norm0) : 0.0;
      rows.push_back({sigma, t, norm, rate, bound});
    }
  }
  return rows;
}

}  // namespace dklb
