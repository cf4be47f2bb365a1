#include "dklb/symbols.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "dklb/error.hpp"

namespace dklb {

double PhaseTerm::eval(double xi) const {
  return coeff * std::pow(xi, m) * std::pow(std::abs(xi), n);
}

PhaseFunction::PhaseFunction(double p, std::vector<PhaseTerm> terms, double eta)
    : p_(p), eta_(eta), terms_(std::move(terms)) {
  if (!(p_ > 0.0) || !std::isfinite(p_)) {
    throw ValidationError("phase: leading exponent p must be positive and finite");
  }
  if (!(eta_ > 0.0) || !std::isfinite(eta_)) {
    throw ValidationError("phase: eta must be positive and finite");
  }
  for (const PhaseTerm& t : terms_) {
    if (t.m < 0 || !(t.n >= 0.0) || !std::isfinite(t.coeff) || !std::isfinite(t.n)) {
      throw ValidationError("phase: term powers must be non-negative and finite");
    }
    if (t.order() >= p_) {
      std::ostringstream os;
      os << "phase: term of order " << t.order() << " is not lower order than p=" << p_;
      throw ValidationError(os.str());
    }
  }
  threshold_ = find_M(*this);
}

double PhaseFunction::lower_order(double xi) const {
  double s = 0.0;
  for (const PhaseTerm& t : terms_) s += t.eval(xi);
  return s;
}

double PhaseFunction::eval(double xi) const {
  return -std::pow(std::abs(xi), p_) + lower_order(xi);
}

bool PhaseFunction::is_even() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const PhaseTerm& t) { return t.m % 2 == 0; });
}

double PhaseFunction::max_term_order() const {
  double o = 0.0;
  for (const PhaseTerm& t : terms_) o = std::max(o, t.order());
  return o;
}

bool PhaseFunction::threshold_conditions_hold(double xi) const {
  for (double x : {xi, -xi}) {
    const double lead = std::pow(std::abs(x), p_);
    const double low = lower_order(x);
    if (!(std::abs(-lead + low) >= 0.5 * lead) || !(low <= 0.5 * lead)) return false;
  }
  return true;
}

std::string PhaseFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "p=" << p_ << ", terms=[";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << ",";
    os << "(" << terms_[i].coeff << "," << terms_[i].m << "," << terms_[i].n << ")";
  }
  os << "], eta=" << eta_;
  return os.str();
}

double phase_eval(const PhaseFunction& phi, double xi) { return phi.eval(xi); }

double find_M(const PhaseFunction& phi) {
  if (phi.terms().empty()) return 0.0;
  auto fails = [&](double x) { return !phi.threshold_conditions_hold(x); };

  // Grow the bracket until the conditions hold on a few doublings beyond it;
  // for polynomial Phi_1 they are eventually monotone.
  double hi = 1.0;
  while (fails(hi) || fails(2 * hi) || fails(4 * hi)) {
    hi *= 2.0;
    if (hi > 1e12) throw ValidationError("phase: threshold M not found below 1e12");
  }

  // Largest failing point on a uniform scan of [0, hi].
  constexpr int kScan = 4096;
  const double h = hi / kScan;
  int last_fail = -1;
  for (int i = kScan; i >= 0; --i) {
    if (fails(i * h)) {
      last_fail = i;
      break;
    }
  }
  if (last_fail < 0) return 0.0;

  double lo = last_fail * h;
  double up = lo + h;
  while (up - lo > 1e-12 * up) {
    const double mid = 0.5 * (lo + up);
    if (mid <= lo || mid >= up) break;
    (fails(mid) ? lo : up) = mid;
  }
  return up;
}

std::vector<cplx> semigroup_multiplier(const PhaseFunction& phi, double t,
                                       std::span<const double> xis, std::size_t* clamped) {
  std::vector<cplx> out(xis.size());
  std::size_t n_clamped = 0;
  const double eta = phi.eta();
  for (std::size_t i = 0; i < xis.size(); ++i) {
    const double xi = xis[i];
    double re = eta * t * phi.eval(xi);
    if (re > kMaxMultiplierExponent) {
      re = kMaxMultiplierExponent;
      ++n_clamped;
    }
    const double im = t * xi * xi * xi;
    out[i] = std::exp(re) * cplx(std::cos(im), std::sin(im));
  }
  if (clamped) *clamped = n_clamped;
  return out;
}

double sup_weighted_multiplier(const PhaseFunction& phi, double q, double t) {
  if (!(t > 0.0)) throw ValidationError("sup_weighted_multiplier: t must be positive");
  const double eta = phi.eta();
  auto log_g = [&](double xi) {
    const double a = std::abs(xi);
    const double lw = q > 0.0 ? 2.0 * q * std::log(a) : 0.0;
    return lw + 2.0 * eta * t * phi.eval(xi);
  };
  // Beyond x_max the leading term dominates: eta t |xi|^p / 2 outweighs the rest.
  const double x_max =
      std::max({phi.threshold(), 1.0}) * 4.0 * std::pow(200.0 / (eta * t) + 1.0, 1.0 / phi.p());
  constexpr int kSamples = 4000;
  double best = -std::numeric_limits<double>::infinity();
  double best_x = 0.0;
  const double lmin = std::log(1e-8), lmax = std::log(x_max);
  for (int sgn : {1, -1}) {
    for (int i = 0; i <= kSamples; ++i) {
      const double x = sgn * std::exp(lmin + (lmax - lmin) * i / kSamples);
      const double v = log_g(x);
      if (v > best) {
        best = v;
        best_x = x;
      }
    }
  }
  if (q == 0.0) {
    const double v0 = 2.0 * eta * t * phi.eval(0.0);
    if (v0 > best) {
      best = v0;
      best_x = 0.0;
    }
  }
  // Golden-section refinement on the bracketing log-cell.
  if (best_x != 0.0) {
    const double step = (lmax - lmin) / kSamples;
    const double sgn = best_x > 0 ? 1.0 : -1.0;
    double a = std::log(std::abs(best_x)) - step, b = std::log(std::abs(best_x)) + step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double c = b - gr * (b - a), d = a + gr * (b - a);
      if (log_g(sgn * std::exp(c)) > log_g(sgn * std::exp(d))) {
        b = d;
      } else {
        a = c;
      }
    }
    best = std::max(best, log_g(sgn * std::exp(0.5 * (a + b))));
  }
  return std::exp(best);
}

// --- presets and parsing -------------------------------------------------

std::string ModelPreset::name() const {
  switch (kind) {
    case PresetKind::KdVB: return "kdvb";
    case PresetKind::OST: return "ost";
    case PresetKind::KdVKS: return "kdvks";
    case PresetKind::Optimality: return "optimality:" + std::to_string(k);
  }
  return "unknown";
}

ModelPreset make_preset(PresetKind kind, double eta, int k) {
  switch (kind) {
    case PresetKind::KdVB: return {kind, 0, PhaseFunction(2.0, {}, eta)};
    case PresetKind::OST: return {kind, 0, PhaseFunction(3.0, {{1.0, 0, 1.0}}, eta)};
    case PresetKind::KdVKS: return {kind, 0, PhaseFunction(4.0, {{1.0, 0, 2.0}}, eta)};
    case PresetKind::Optimality:
      if (k < 2) throw ValidationError("optimality preset requires k >= 2");
      return {kind, k, PhaseFunction(2.0 * k, {{1.0, 2 * k - 3, 2.0}}, eta)};
  }
  throw ValidationError("unknown preset");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_real(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("phase: cannot parse " + std::string(what) + " from '" +
                          std::string(s) + "'");
  }
  return v;
}

int parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("phase: cannot parse integer " + std::string(what) + " from '" +
                          std::string(s) + "'");
  }
  return v;
}

}  // namespace

bool is_preset_name(std::string_view text) {
  text = trim(text);
  return text == "kdvb" || text == "ost" || text == "kdvks" || text.starts_with("optimality:");
}

PhaseFunction parse_phase(std::string_view text, double eta) {
  text = trim(text);
  if (text == "kdvb") return make_preset(PresetKind::KdVB, eta).phase;
  if (text == "ost") return make_preset(PresetKind::OST, eta).phase;
  if (text == "kdvks") return make_preset(PresetKind::KdVKS, eta).phase;
  if (text.starts_with("optimality:")) {
    return make_preset(PresetKind::Optimality, eta,
                       parse_int(text.substr(11), "optimality order"))
        .phase;
  }

  // Custom: p=<real>, terms=[(c,m,n),...], eta=<real>
  double p = std::numeric_limits<double>::quiet_NaN();
  std::vector<PhaseTerm> terms;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t eq = text.find('=', pos);
    if (eq == std::string_view::npos) {
      throw ValidationError("phase: expected key=value in '" + std::string(text) + "'");
    }
    const std::string_view key = trim(text.substr(pos, eq - pos));
    std::size_t end;
    std::string_view value;
    if (key == "terms") {
      const std::size_t open = text.find('[', eq);
      const std::size_t close = text.find(']', eq);
      if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        throw ValidationError("phase: terms must be a bracketed list [(c,m,n),...]");
      }
      value = text.substr(open + 1, close - open - 1);
      end = text.find(',', close);
      std::size_t tp = 0;
      while (true) {
        const std::size_t lp = value.find('(', tp);
        if (lp == std::string_view::npos) break;
        const std::size_t rp = value.find(')', lp);
        if (rp == std::string_view::npos) throw ValidationError("phase: unbalanced term tuple");
        const std::string_view tuple = value.substr(lp + 1, rp - lp - 1);
        const std::size_t c1 = tuple.find(',');
        const std::size_t c2 = tuple.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos) {
          throw ValidationError("phase: term tuples must be (c,m,n)");
        }
        terms.push_back({parse_real(tuple.substr(0, c1), "term coefficient"),
                         parse_int(tuple.substr(c1 + 1, c2 - c1 - 1), "term m"),
                         parse_real(tuple.substr(c2 + 1), "term n")});
        tp = rp + 1;
      }
    } else {
      end = text.find(',', eq);
      value = text.substr(eq + 1, end == std::string_view::npos ? std::string_view::npos
                                                                 : end - eq - 1);
      if (key == "p") {
        p = parse_real(value, "p");
      } else if (key == "eta") {
        eta = parse_real(value, "eta");
      } else {
        throw ValidationError("phase: unknown key '" + std::string(key) + "'");
      }
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  if (std::isnan(p)) throw ValidationError("phase: custom symbol requires p=<real>");
  return PhaseFunction(p, std::move(terms), eta);
}

}  // namespace dklb
