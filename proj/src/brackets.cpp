#include "dklb/brackets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dklb/error.hpp"

namespace dklb {

Bracket Bracket::make(int n, int m, int a) {
  if (n < 0 || m < 0 || a < 0) throw ValidationError("bracket indices must be non-negative");
  return n >= m ? Bracket{n, m, a} : Bracket{m, n, a};
}

std::string Bracket::to_string() const {
  std::ostringstream os;
  os << "<" << n << "," << m << "," << a << ">";
  return os.str();
}

void BracketExpression::add(const Rational& c, int j, int a) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace({j, a}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

std::vector<BracketExpression::Term> BracketExpression::terms() const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_) out.push_back({c, Bracket{key.first, key.first, key.second}});
  return out;
}

Rational BracketExpression::coefficient(int j, int a) const {
  const auto it = terms_.find({j, a});
  return it == terms_.end() ? Rational(0) : it->second;
}

std::string BracketExpression::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const Term& t : terms()) {
    const bool neg = t.coeff < 0;
    const Rational mag = neg ? Rational(-t.coeff) : t.coeff;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    os << mag.str() << "*" << t.bracket.to_string();
    first = false;
  }
  return os.str();
}

BracketExpression reduce(const Bracket& start) {
  // Pending off-diagonal brackets keyed so that the largest gap comes first.
  auto gap_order = [](const Bracket& x, const Bracket& y) {
    const int gx = x.n - x.m, gy = y.n - y.m;
    if (gx != gy) return gx > gy;
    return x < y;
  };
  std::map<Bracket, Rational, decltype(gap_order)> pending(gap_order);
  BracketExpression out;

  auto push = [&](const Rational& c, const Bracket& b) {
    if (b.diagonal()) {
      out.add(c, b.n, b.a);
      return;
    }
    auto [it, inserted] = pending.try_emplace(b, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) pending.erase(it);
    }
  };

  push(Rational(1), Bracket::make(start.n, start.m, start.a));
  while (!pending.empty()) {
    const auto node = pending.extract(pending.begin());
    const Bracket& b = node.key();
    const Rational& c = node.mapped();
    if (b.n == b.m + 1) {
      push(c * Rational(-1, 2), Bracket{b.m, b.m, b.a + 1});
    } else {
      push(-c, Bracket::make(b.n - 1, b.m + 1, b.a));
      push(-c, Bracket::make(b.n - 1, b.m, b.a + 1));
    }
  }
  return out;
}

std::string format_reduction(const Bracket& b, const BracketExpression& e) {
  return b.to_string() + " = " + e.to_string();
}

std::vector<Rational> proposition_coefficients(const Bracket& b, const BracketExpression& e) {
  const int k = b.n - b.m;
  std::vector<Rational> c(static_cast<std::size_t>(k / 2 + 1), Rational(0));
  for (int j = 0; j <= k / 2; ++j) {
    const Rational v = e.coefficient(b.m + j, b.a + k - 2 * j);
    c[static_cast<std::size_t>(j)] = ((k + j) % 2 == 0) ? v : Rational(-v);
  }
  return c;
}

StructureCheck check_proposition_form(const Bracket& b, const BracketExpression& e) {
  const int k = b.n - b.m;
  std::ostringstream why;
  if (e.size() > static_cast<std::size_t>(k / 2 + 1)) {
    why << b.to_string() << ": " << e.size() << " terms exceed floor(k/2)+1 = " << k / 2 + 1;
    return {false, why.str()};
  }
  for (const auto& t : e.terms()) {
    const int j = t.bracket.n - b.m;
    const bool level_ok = j >= 0 && j <= k / 2;
    const bool weight_ok = level_ok && t.bracket.a == b.a + k - 2 * j;
    const bool sign_ok = level_ok && ((k + j) % 2 == 0 ? t.coeff > 0 : t.coeff < 0);
    if (!level_ok || !weight_ok || !sign_ok) {
      why << b.to_string() << ": term " << t.coeff.str() << "*" << t.bracket.to_string()
          << " violates the closed form (level " << (level_ok ? "ok" : "bad") << ", weight "
          << (weight_ok ? "ok" : "bad") << ", sign " << (sign_ok ? "ok" : "bad") << ")";
      return {false, why.str()};
    }
  }
  return {};
}

StructureCheck check_coefficient_recursion(int k) {
  if (k < 2) throw ValidationError("coefficient recursion needs k >= 2");
  std::ostringstream why;
  for (int n : {k, k + 1, k + 3}) {
    for (int a : {0, 2}) {
      const Bracket top{n, n - k, a};
      const auto c = proposition_coefficients(top, reduce(top));
      const Bracket b2{n - 1, n - k + 1, a};      // gap k - 2
      const Bracket b1{n - 1, n - k, a + 1};      // gap k - 1
      const auto c2 = proposition_coefficients(b2, reduce(b2));
      const auto c1 = proposition_coefficients(b1, reduce(b1));
      for (int j = 0; j <= k / 2; ++j) {
        const Rational from2 = (j >= 1 && j - 1 < static_cast<int>(c2.size())) ? c2[j - 1] : Rational(0);
        const Rational from1 = j < static_cast<int>(c1.size()) ? c1[j] : Rational(0);
        if (c[j] != from2 + from1) {
          why << top.to_string() << ": c_" << j << " = " << c[j].str() << " but c^(k-2)_(j-1) + c^(k-1)_j = "
              << Rational(from2 + from1).str();
          return {false, why.str()};
        }
      }
    }
  }
  return {};
}

BracketExpression evenodd_expand(int order) {
  if (order < 1) throw ValidationError("bracket order must be >= 1");
  const Bracket b{order, 0, 0};
  BracketExpression e = reduce(b);
  const int m = order / 2;
  const bool even = order % 2 == 0;
  for (const auto& t : e.terms()) {
    const int j = t.bracket.n;
    const int weight = even ? 2 * (m - j) : 1 + 2 * (m - j);
    const bool positive = even ? (j % 2 == 0) : (j % 2 == 1);
    if (j < 0 || j > m || t.bracket.a != weight || (t.coeff > 0) != positive) {
      throw std::logic_error("even/odd expansion of " + b.to_string() +
                             " lost its structure at term " + t.coeff.str() + "*" +
                             t.bracket.to_string());
    }
  }
  if (e.size() != static_cast<std::size_t>(m + 1)) {
    throw std::logic_error("even/odd expansion of " + b.to_string() + " has " +
                           std::to_string(e.size()) + " terms, expected " + std::to_string(m + 1));
  }
  return e;
}

// --- analytic test functions ------------------------------------------------

GaussianPoly::GaussianPoly(std::vector<double> coeffs, double beta)
    : coeffs_(std::move(coeffs)), beta_(beta) {
  if (!(beta_ >= 0.0)) throw ValidationError("GaussianPoly: beta must be non-negative");
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double GaussianPoly::value(double x) const {
  double p = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) p = p * x + *it;
  return p * std::exp(-beta_ * x * x);
}

GaussianPoly GaussianPoly::derivative(int k) const {
  if (k < 0 || k > kMaxOrder) {
    throw ValidationError("GaussianPoly: derivative order " + std::to_string(k) +
                          " is beyond the supported maximum " + std::to_string(kMaxOrder));
  }
  std::vector<double> c = coeffs_;
  for (int step = 0; step < k; ++step) {
    // (P e^{-beta x^2})' = (P' - 2 beta x P) e^{-beta x^2}
    std::vector<double> d(c.size() + 1, 0.0);
    for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] += static_cast<double>(i) * c[i];
    for (std::size_t i = 0; i < c.size(); ++i) d[i + 1] -= 2.0 * beta_ * c[i];
    c = std::move(d);
  }
  return GaussianPoly(std::move(c), beta_);
}

bool GaussianPoly::is_odd() const {
  for (std::size_t i = 0; i < coeffs_.size(); i += 2) if (coeffs_[i] != 0.0) return false;
  return true;
}

bool GaussianPoly::is_even() const {
  for (std::size_t i = 1; i < coeffs_.size(); i += 2) if (coeffs_[i] != 0.0) return false;
  return true;
}

std::vector<TestPair> standard_test_pairs() {
  return {
      {GaussianPoly({1.0}, 1.0), GaussianPoly({1.0, 0.5, 0.0, 0.1}, 0.125)},
      {GaussianPoly({0.0, 1.0, 0.0, -0.3}, 0.5), GaussianPoly({2.0, 0.0, 1.0}, 0.1)},
      {GaussianPoly({1.0, 1.0, 0.25, -1.0 / 6.0}, 1.0 / 3.0), GaussianPoly({3.0, -1.0, 0.5}, 1.0 / 12.0)},
  };
}

namespace {

// Half-width X with beta X^2 - degree ln X >= 80, so the integrand is far below
// double precision relative to its bulk.
double integration_half_width(double beta, std::size_t degree) {
  double x = 1.0;
  while (beta * x * x - static_cast<double>(degree) * std::log(x) < 80.0) x *= 1.05;
  return x;
}

}  // namespace

double eval_numeric(const Bracket& b, const GaussianPoly& u, const GaussianPoly& rho,
                    std::size_t n_points) {
  const GaussianPoly un = u.derivative(b.n);
  const GaussianPoly um = u.derivative(b.m);
  const GaussianPoly ra = rho.derivative(b.a);
  const double beta = 2.0 * u.beta() + rho.beta();
  if (!(beta > 0.0)) throw ValidationError("eval_numeric: u must decay (beta > 0)");
  n_points = std::max<std::size_t>(n_points, 4096);
  const std::size_t degree = un.coeffs().size() + um.coeffs().size() + ra.coeffs().size();
  const double X = integration_half_width(beta, degree);
  const double h = 2.0 * X / static_cast<double>(n_points);
  double acc = 0.0;
  for (std::size_t i = 0; i <= n_points; ++i) {
    const double x = -X + h * static_cast<double>(i);
    const double w = (i == 0 || i == n_points) ? 0.5 : 1.0;
    acc += w * un.value(x) * um.value(x) * ra.value(x);
  }
  return h * acc;
}

double eval_numeric(const BracketExpression& e, const GaussianPoly& u, const GaussianPoly& rho,
                    std::size_t n_points) {
  double acc = 0.0;
  for (const auto& t : e.terms()) {
    acc += static_cast<double>(t.coeff) * eval_numeric(t.bracket, u, rho, n_points);
  }
  return acc;
}

}  // namespace dklb
