#pragma once

// Periodic spectral grid on [-L/2, L/2) and fields stored as Fourier
// coefficients c_j with u(x) = sum_j c_j exp(i xi_j x), xi_j = 2 pi j / L.
// Coefficients use FFT ordering: j = 0, 1, ..., N/2-1, -N/2, ..., -1.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace dklb {

using cplx = std::complex<double>;

class SpectralGrid {
 public:
  /// N must be a power of two >= 16, L > 0, dealias_fraction in (0, 1].
  static std::shared_ptr<const SpectralGrid> create(std::size_t n, double length,
                                                    double dealias_fraction = 2.0 / 3.0);

  std::size_t size() const { return n_; }
  double length() const { return length_; }
  double dealias_fraction() const { return dealias_; }
  double dx() const { return length_ / static_cast<double>(n_); }
  std::size_t nyquist_index() const { return n_ / 2; }

  /// Wavenumbers in FFT order.
  std::span<const double> wavenumbers() const { return xis_; }
  /// Physical nodes x_k = -L/2 + k L / N.
  std::span<const double> nodes() const { return nodes_; }
  /// Signed mode index j for storage slot k.
  long mode_index(std::size_t k) const;
  /// True for modes kept by the dealiasing filter, |j| <= dealias_fraction N / 2.
  bool is_resolved(std::size_t k) const;

  bool operator==(const SpectralGrid& o) const {
    return n_ == o.n_ && length_ == o.length_ && dealias_ == o.dealias_;
  }

 private:
  SpectralGrid(std::size_t n, double length, double dealias);

  std::size_t n_;
  double length_;
  double dealias_;
  std::vector<double> xis_;
  std::vector<double> nodes_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

class SpectralField {
 public:
  SpectralField(GridPtr grid, std::vector<cplx> coeffs, bool is_real);
  static SpectralField zero(GridPtr grid, bool is_real = true);

  const SpectralGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> mutable_coeffs() { return coeffs_; }
  bool is_real() const { return is_real_; }
  void set_real(bool r) { is_real_ = r; }

  /// max_j |c(-xi_j) - conj(c(xi_j))| / max_j |c_j| (0 for the zero field).
  double hermitian_defect() const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);

 private:
  GridPtr grid_;
  std::vector<cplx> coeffs_;
  bool is_real_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField f);

/// Samples u(x_k).
std::vector<cplx> to_physical(const SpectralField& f);
/// Real parts of the samples; intended for fields with is_real().
std::vector<double> to_physical_real(const SpectralField& f);

/// Throws ValidationError on length mismatch. The complex overload marks the
/// field real when every imaginary part is exactly zero.
SpectralField from_physical(std::span<const cplx> samples, const GridPtr& grid);
SpectralField from_physical(std::span<const double> samples, const GridPtr& grid);

/// Multiplies coefficients by m(xi_j); `preserves_real` states whether the
/// symbol satisfies m(-xi) = conj(m(xi)).
SpectralField apply_multiplier(const SpectralField& f, std::span<const cplx> m,
                               bool preserves_real);
SpectralField apply_multiplier(const SpectralField& f, std::span<const double> m);

/// (i xi)^order; odd orders zero the Nyquist mode.
SpectralField derivative(const SpectralField& f, int order);
/// |xi|^s, with D^0 the identity and |0|^s = 0 for s > 0.
SpectralField fractional_D(const SpectralField& f, double s);
/// (1 + xi^2)^{s/2}.
SpectralField fractional_J(const SpectralField& f, double s);
/// -i sgn(xi); zero at xi = 0 and at Nyquist.
SpectralField hilbert(const SpectralField& f);

/// Coefficients with |j| > dealias_fraction N/2 are zeroed in both factors and
/// in the product. Throws ValidationError on grid mismatch.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);
/// Zeroes the unresolved modes.
SpectralField dealias(const SpectralField& f);

struct PolyWeight { double r; };     // |x|^r
struct BracketWeight { double r; };  // <x>^r
struct ExpWeight { double b; };      // e^{b x}
using WeightSpec = std::variant<PolyWeight, BracketWeight, ExpWeight>;

/// Weight values at the grid nodes. Throws ValidationError when an
/// exponential weight would overflow (|b| L / 2 > 300).
std::vector<double> weight_values(const WeightSpec& w, const SpectralGrid& grid);

/// Fraction of the discrete L2 mass of `samples` located within 5% of the
/// domain boundary (|x| > 0.45 L).
double boundary_leakage(std::span<const cplx> samples, const SpectralGrid& grid);

inline constexpr double kDefaultLeakageThreshold = 1e-8;

struct WeightedField {
  SpectralField field;
  double boundary_leakage;
};

WeightedField apply_weight(const SpectralField& f, const WeightSpec& w);

/// Physical-space L2 norm with quadrature weight L/N.
double physical_l2(std::span<const cplx> samples, const SpectralGrid& grid);
/// Coefficient-space L2 norm, sqrt(L sum |c_j|^2), equal to physical_l2 by Parseval.
double coefficient_l2(const SpectralField& f);

}  // namespace dklb
