#pragma once

// Integration-by-parts brackets <n,m,a> = int d^n u d^m u rho^(a) dx with exact
// rational coefficients, reduced to sums of diagonal brackets <j,j,a'>.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace dklb {

using Rational = boost::multiprecision::cpp_rational;

/// Stored with n >= m; the integrand is symmetric in the two derivative orders.
struct Bracket {
  int n = 0;
  int m = 0;
  int a = 0;

  static Bracket make(int n, int m, int a);
  bool diagonal() const { return n == m; }
  std::string to_string() const;  // "<n,m,a>"
  auto operator<=>(const Bracket&) const = default;
};

class BracketExpression {
 public:
  struct Term {
    Rational coeff;
    Bracket bracket;
  };

  /// Adds c <j,j,a>; zero results are pruned.
  void add(const Rational& c, int j, int a);
  /// Terms ordered by descending derivative level j.
  std::vector<Term> terms() const;
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  /// Coefficient of <j,j,a>, 0 if absent.
  Rational coefficient(int j, int a) const;

  /// "1*<2,2,0> - 2*<1,1,2> + 1/2*<0,0,4>"; "0" when empty.
  std::string to_string() const;
  bool operator==(const BracketExpression&) const = default;

 private:
  std::map<std::pair<int, int>, Rational, std::greater<>> terms_;
};

/// Applies <n,m,a> = -<n-1,m+1,a> - <n-1,m,a+1> (n > m+1) and
/// <m+1,m,a> = -1/2 <m,m,a+1> until only diagonal brackets remain, always
/// peeling the bracket with the largest gap n - m first.
BracketExpression reduce(const Bracket& b);

/// "<n,m,a> = <expansion>".
std::string format_reduction(const Bracket& b, const BracketExpression& e);

/// Unsigned coefficients c_j, j = 0..floor(k/2), k = n - m, read off a
/// reduction of <n,m,a>: the term on level m + j with weight order a + k - 2j
/// carries c_j (-1)^{k+j}.
std::vector<Rational> proposition_coefficients(const Bracket& b, const BracketExpression& e);

struct StructureCheck {
  bool ok = true;
  std::string detail;
};

/// Verifies that `e` has the closed form of a reduction of `b`: at most
/// floor(k/2)+1 terms, levels m + j, weight orders a + k - 2j, signs
/// (-1)^{k+j}, positive c_j.
StructureCheck check_proposition_form(const Bracket& b, const BracketExpression& e);

/// Re-derives the c_j of gap k from gaps k-1 and k-2:
/// c_j = c^{(k-2)}_{j-1} + c^{(k-1)}_j (missing entries are 0), comparing with
/// reduce(<n,n-k,a>) for a few (n, a).
StructureCheck check_coefficient_recursion(int k);

/// reduce(<order,0,0>) with the even/odd structure enforced: for order 2m,
/// terms c_j (-1)^j <j,j,2(m-j)>; for 2m+1, c_j (-1)^{j+1} <j,j,1+2(m-j)>.
/// Throws std::logic_error if the structure fails.
BracketExpression evenodd_expand(int order);

// --- numeric evaluation -------------------------------------------------

/// P(x) exp(-beta x^2) with exact derivatives.
class GaussianPoly {
 public:
  static constexpr int kMaxOrder = 24;

  /// coeffs[i] multiplies x^i; beta >= 0 (beta = 0 gives a polynomial).
  GaussianPoly(std::vector<double> coeffs, double beta);

  double beta() const { return beta_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double value(double x) const;
  /// d^k/dx^k; throws ValidationError for k > kMaxOrder.
  GaussianPoly derivative(int k) const;
  bool is_odd() const;
  bool is_even() const;

 private:
  std::vector<double> coeffs_;
  double beta_;
};

struct TestPair {
  GaussianPoly u;
  GaussianPoly rho;
};

/// Three analytic (u, rho) pairs with different symmetry and decay.
std::vector<TestPair> standard_test_pairs();

/// Composite trapezoid rule on a symmetric interval where the integrand is
/// below 1e-30 of its scale, with N >= 4096 points.
double eval_numeric(const Bracket& b, const GaussianPoly& u, const GaussianPoly& rho,
                    std::size_t n_points = 4096);
double eval_numeric(const BracketExpression& e, const GaussianPoly& u, const GaussianPoly& rho,
                    std::size_t n_points = 4096);

}  // namespace dklb
