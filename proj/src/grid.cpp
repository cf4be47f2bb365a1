#include "dklb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dklb/error.hpp"
#include "dklb/fft.hpp"
#include "dklb/simd.hpp"

namespace dklb {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void require_same_grid(const SpectralField& f, const SpectralField& g, const char* what) {
  if (f.grid_ptr() != g.grid_ptr() && !(f.grid() == g.grid())) {
    throw ValidationError(std::string(what) + ": fields live on different grids");
  }
}

// (-1)^j for slot k; the grid origin sits at -L/2.
inline double origin_sign(std::size_t k) { return (k & 1u) ? -1.0 : 1.0; }

}  // namespace

// --- SpectralGrid --------------------------------------------------------

SpectralGrid::SpectralGrid(std::size_t n, double length, double dealias)
    : n_(n), length_(length), dealias_(dealias), xis_(n), nodes_(n) {
  const double k0 = 2.0 * std::numbers::pi / length;
  for (std::size_t k = 0; k < n; ++k) {
    xis_[k] = k0 * static_cast<double>(mode_index(k));
    nodes_[k] = -0.5 * length + length * static_cast<double>(k) / static_cast<double>(n);
  }
}

std::shared_ptr<const SpectralGrid> SpectralGrid::create(std::size_t n, double length,
                                                         double dealias_fraction) {
  if (!is_power_of_two(n) || n < 16) {
    std::ostringstream os;
    os << "grid.N must be a power of two >= 16 (got " << n << ")";
    throw ValidationError(os.str());
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ValidationError("grid.L must be positive and finite");
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw ValidationError("grid.dealias must lie in (0, 1]");
  }
  return std::shared_ptr<const SpectralGrid>(new SpectralGrid(n, length, dealias_fraction));
}

long SpectralGrid::mode_index(std::size_t k) const {
  return k < n_ / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n_);
}

bool SpectralGrid::is_resolved(std::size_t k) const {
  return static_cast<double>(std::labs(mode_index(k))) <=
         dealias_ * 0.5 * static_cast<double>(n_);
}

// --- SpectralField -------------------------------------------------------

SpectralField::SpectralField(GridPtr grid, std::vector<cplx> coeffs, bool is_real)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)), is_real_(is_real) {
  if (!grid_) throw ValidationError("SpectralField: null grid");
  if (coeffs_.size() != grid_->size()) {
    throw ValidationError("SpectralField: coefficient count does not match grid size");
  }
}

SpectralField SpectralField::zero(GridPtr grid, bool is_real) {
  const std::size_t n = grid->size();
  return SpectralField(std::move(grid), std::vector<cplx>(n), is_real);
}

double SpectralField::hermitian_defect() const {
  const std::size_t n = coeffs_.size();
  double scale = 0.0, defect = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    scale = std::max(scale, std::abs(coeffs_[k]));
    const std::size_t partner = (n - k) % n;
    defect = std::max(defect, std::abs(coeffs_[partner] - std::conj(coeffs_[k])));
  }
  return scale > 0.0 ? defect / scale : 0.0;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_grid(*this, o, "field addition");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  is_real_ = is_real_ && o.is_real_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_grid(*this, o, "field subtraction");
  for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  is_real_ = is_real_ && o.is_real_;
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (cplx& c : coeffs_) c *= a;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double a, SpectralField f) { return f *= a; }

// --- transforms ------------------------------------------------------------

std::vector<cplx> to_physical(const SpectralField& f) {
  const std::size_t n = f.grid().size();
  std::vector<cplx> shifted(f.coeffs().begin(), f.coeffs().end());
  for (std::size_t k = 1; k < n; k += 2) shifted[k] = -shifted[k];
  std::vector<cplx> out(n);
  fft::backward(shifted, out);
  return out;
}

std::vector<double> to_physical_real(const SpectralField& f) {
  const std::vector<cplx> z = to_physical(f);
  std::vector<double> out(z.size());
  std::transform(z.begin(), z.end(), out.begin(), [](const cplx& c) { return c.real(); });
  return out;
}

SpectralField from_physical(std::span<const cplx> samples, const GridPtr& grid) {
  const std::size_t n = grid->size();
  if (samples.size() != n) {
    std::ostringstream os;
    os << "from_physical: got " << samples.size() << " samples for a grid of " << n;
    throw ValidationError(os.str());
  }
  std::vector<cplx> c(n);
  fft::forward(samples, c);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) c[k] *= origin_sign(k) * inv_n;
  const bool real = std::all_of(samples.begin(), samples.end(),
                                [](const cplx& z) { return z.imag() == 0.0; });
  return SpectralField(grid, std::move(c), real);
}

SpectralField from_physical(std::span<const double> samples, const GridPtr& grid) {
  std::vector<cplx> z(samples.begin(), samples.end());
  SpectralField f = from_physical(std::span<const cplx>(z), grid);
  f.set_real(true);
  return f;
}

// --- multipliers -----------------------------------------------------------

SpectralField apply_multiplier(const SpectralField& f, std::span<const cplx> m,
                               bool preserves_real) {
  if (m.size() != f.grid().size()) {
    throw ValidationError("apply_multiplier: multiplier length does not match grid");
  }
  SpectralField out = f;
  simd::multiply(out.mutable_coeffs(), m);
  out.set_real(f.is_real() && preserves_real);
  return out;
}

SpectralField apply_multiplier(const SpectralField& f, std::span<const double> m) {
  if (m.size() != f.grid().size()) {
    throw ValidationError("apply_multiplier: multiplier length does not match grid");
  }
  SpectralField out = f;
  simd::multiply(out.mutable_coeffs(), m);
  return out;
}

SpectralField derivative(const SpectralField& f, int order) {
  if (order < 1) throw ValidationError("derivative: order must be >= 1");
  const auto xis = f.grid().wavenumbers();
  std::vector<cplx> m(xis.size());
  // Exact powers of i avoid the rounding of std::pow on complex arguments.
  for (std::size_t k = 0; k < xis.size(); ++k) {
    const double mag = std::pow(xis[k], order);
    switch (order % 4) {
      case 0: m[k] = cplx(mag, 0.0); break;
      case 1: m[k] = cplx(0.0, mag); break;
      case 2: m[k] = cplx(-mag, 0.0); break;
      case 3: m[k] = cplx(0.0, -mag); break;
    }
  }
  if (order % 2 == 1) m[f.grid().nyquist_index()] = 0.0;
  return apply_multiplier(f, m, true);
}

SpectralField fractional_D(const SpectralField& f, double s) {
  if (!(s >= 0.0)) throw ValidationError("fractional_D: s must be non-negative");
  if (s == 0.0) return f;
  const auto xis = f.grid().wavenumbers();
  std::vector<double> m(xis.size());
  for (std::size_t k = 0; k < xis.size(); ++k) m[k] = std::pow(std::abs(xis[k]), s);
  return apply_multiplier(f, m);
}

SpectralField fractional_J(const SpectralField& f, double s) {
  if (!(s >= 0.0)) throw ValidationError("fractional_J: s must be non-negative");
  if (s == 0.0) return f;
  const auto xis = f.grid().wavenumbers();
  std::vector<double> m(xis.size());
  for (std::size_t k = 0; k < xis.size(); ++k) m[k] = std::pow(1.0 + xis[k] * xis[k], 0.5 * s);
  return apply_multiplier(f, m);
}

SpectralField hilbert(const SpectralField& f) {
  const auto xis = f.grid().wavenumbers();
  std::vector<cplx> m(xis.size());
  for (std::size_t k = 0; k < xis.size(); ++k) {
    m[k] = xis[k] > 0 ? cplx(0.0, -1.0) : xis[k] < 0 ? cplx(0.0, 1.0) : cplx(0.0, 0.0);
  }
  m[f.grid().nyquist_index()] = 0.0;
  return apply_multiplier(f, m, true);
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  auto c = out.mutable_coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (!f.grid().is_resolved(k)) c[k] = 0.0;
  }
  return out;
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f, g, "dealiased_product");
  const std::vector<cplx> uf = to_physical(dealias(f));
  std::vector<cplx> ug = to_physical(dealias(g));
  simd::multiply(std::span<cplx>(ug), std::span<const cplx>(uf));
  SpectralField out = dealias(from_physical(std::span<const cplx>(ug), f.grid_ptr()));
  out.set_real(f.is_real() && g.is_real());
  return out;
}

// --- weights ---------------------------------------------------------------

std::vector<double> weight_values(const WeightSpec& w, const SpectralGrid& grid) {
  const auto x = grid.nodes();
  std::vector<double> out(x.size());
  if (const auto* p = std::get_if<PolyWeight>(&w)) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::pow(std::abs(x[k]), p->r);
  } else if (const auto* b = std::get_if<BracketWeight>(&w)) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::pow(1.0 + x[k] * x[k], 0.5 * b->r);
  } else {
    const double beta = std::get<ExpWeight>(w).b;
    if (std::abs(beta) * 0.5 * grid.length() > 300.0) {
      throw ValidationError("exp weight: |b| L / 2 exceeds 300 (overflow)");
    }
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = std::exp(beta * x[k]);
  }
  return out;
}

double boundary_leakage(std::span<const cplx> samples, const SpectralGrid& grid) {
  const auto x = grid.nodes();
  const double edge = 0.45 * grid.length();
  double total = 0.0, outer = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double a2 = std::norm(samples[k]);
    total += a2;
    if (std::abs(x[k]) > edge) outer += a2;
  }
  return total > 0.0 ? outer / total : 0.0;
}

WeightedField apply_weight(const SpectralField& f, const WeightSpec& w) {
  const std::vector<double> wv = weight_values(w, f.grid());
  std::vector<cplx> u = to_physical(f);
  simd::multiply(std::span<cplx>(u), std::span<const double>(wv));
  const double leak = boundary_leakage(u, f.grid());
  SpectralField out = from_physical(std::span<const cplx>(u), f.grid_ptr());
  out.set_real(f.is_real());
  return {std::move(out), leak};
}

double physical_l2(std::span<const cplx> samples, const SpectralGrid& grid) {
  return std::sqrt(grid.dx() * simd::sum_abs2(samples));
}

double coefficient_l2(const SpectralField& f) {
  return std::sqrt(f.grid().length() * simd::sum_abs2(f.coeffs()));
}

}  // namespace dklb
