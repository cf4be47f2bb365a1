#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dklb/ensemble.hpp"
#include "dklb/error.hpp"
#include "dklb/norms.hpp"
#include "dklb/picard.hpp"
#include "dklb/solver.hpp"

using namespace dklb;
using std::numbers::pi;

namespace {

template <typename F>
SpectralField sample(const GridPtr& g, F&& f) {
  const auto x = g->nodes();
  std::vector<double> u(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) u[k] = f(x[k]);
  return from_physical(std::span<const double>(u), g);
}

Trajectory constant_trajectory(const SpectralField& f, double T, std::size_t nt) {
  Trajectory tr{f.grid_ptr(), make_preset(PresetKind::KdVKS, 1.0).phase, T / nt, {}, {},
                Method::Linear};
  for (std::size_t k = 0; k <= nt; ++k) {
    tr.times.push_back(k * tr.dt);
    tr.snapshots.push_back(f);
  }
  return tr;
}

// sum_j c_j e^{i xi_j x} evaluated term by term.
double direct_l4(const SpectralField& f) {
  const auto x = f.grid().nodes();
  const auto xi = f.grid().wavenumbers();
  double acc = 0.0;
  for (double xk : x) {
    cplx u = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) u += f.coeffs()[j] * std::polar(1.0, xi[j] * xk);
    acc += std::pow(std::norm(u), 2);
  }
  return std::pow(f.grid().dx() * acc, 0.25);
}

}  // namespace

TEST_CASE("alpha: closed forms") {
  for (double p : {2.0, 3.0, 4.0, 6.0}) {
    for (double s : {0.0, 0.25, 0.5}) {
      CHECK(alpha(2.0, 2.0, s, p) == doctest::Approx(0.5 - s / p).epsilon(1e-15));
    }
  }
  CHECK(alpha(2.0, 4.0, 0.0, 4.0) == doctest::Approx(7.0 / 16.0).epsilon(1e-15));
  CHECK(alpha(2.0, kInf, 1.0, 4.0) == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
}

TEST_CASE("alpha: shift in s is -s/p for every (a, b)") {
  for (double a : {2.0, 3.0, 4.0, 8.0}) {
    for (double b : {2.0, 4.0, 10.0, kInf}) {
      for (double p : {3.0, 4.0}) {
        for (double s : {0.1, 0.7, 1.3}) {
          CHECK(alpha(a, b, s, p) - alpha(a, b, 0.0, p) == doctest::Approx(-s / p).epsilon(1e-13));
        }
      }
    }
  }
}

TEST_CASE("smoothing_A: monotone in T and vanishing at 0") {
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;
  double prev = 0.0;
  for (double T = 1e-8; T <= 4.0; T *= 1.5) {
    const double a = A2(phi, T);
    CHECK(a > prev);
    prev = a;
  }
  CHECK(A2(phi, 1e-12) < 1e-4);
  CHECK(A3(phi, 0.5, 1e-30) < 1e-8);
  CHECK(A2(phi, 0.0) == 0.0);

  const double T = 0.3;
  const double al = 7.0 / 16.0;
  CHECK(A2(phi, T) == doctest::Approx(std::exp(T) * std::sqrt(T) + std::pow(2 * al, -0.5) * std::pow(T, al)));
  CHECK(A3(phi, 0.0, T) == A2(phi, T));
  CHECK(A4(phi, T) == smoothing_A(phi, 2.0, 4.0, 1.0, T));
}

TEST_CASE("smoothing_A: rejects alpha <= 0") {
  const PhaseFunction kdvb = make_preset(PresetKind::KdVB, 1.0).phase;
  // p = 2: alpha(2, 4, 1) = 1/2 - 1/2 - 1/8 < 0
  CHECK_THROWS_AS(A4(kdvb, 0.5), ValidationError);
  CHECK_THROWS_AS(smoothing_A(SmoothingParams{2.0, 2.0, 2.0, 4.0, 1.0, 1.0}), ValidationError);
}

TEST_CASE("A6 and A2 for p = 4 on (0, 1]") {
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;
  CHECK(alpha(2.0, kInf, 1.0, 4.0) <= alpha(2.0, 4.0, 0.0, 4.0));
  // A smaller exponent makes both T^alpha and (2 alpha)^{-1/2} larger when T <= 1.
  for (double T = 0.01; T <= 1.0; T += 0.01) CHECK(A6(phi, T) >= A2(phi, T));
}

TEST_CASE("hs_norm and weighted_norm") {
  const auto g = SpectralGrid::create(512, 40.0);
  const SpectralField f = sample(g, [](double x) { return std::exp(-x * x); });

  CHECK(hs_norm(f, 0.0) == doctest::Approx(std::sqrt(std::sqrt(pi / 2))).epsilon(1e-12));
  double prev = 0.0;
  for (double s = 0.0; s <= 3.0; s += 0.25) {
    const double v = hs_norm(f, s);
    CHECK(v >= prev);
    prev = v;
  }
  // H^1 norm squared = ||f||^2 + ||f'||^2, with ||f'||^2 = int 4x^2 e^{-2x^2} = sqrt(pi/2).
  CHECK(hs_norm(f, 1.0) == doctest::Approx(std::sqrt(2 * std::sqrt(pi / 2))).epsilon(1e-10));

  // int x^2 e^{-2x^2} dx = sqrt(pi) / (2 * 2^{3/2})
  const double moment = std::sqrt(std::sqrt(pi) / (2.0 * std::pow(2.0, 1.5)));
  CHECK(weighted_norm(f, PolyWeight{1.0}) == doctest::Approx(moment).epsilon(1e-8));
  // <x>^2 weight: int (1+x^2)^2 e^{-2x^2} = sqrt(pi/2) (1 + 1/2 + 3/16)
  CHECK(weighted_norm(f, BracketWeight{2.0}) ==
        doctest::Approx(std::sqrt(std::sqrt(pi / 2) * (1.0 + 0.5 + 3.0 / 16.0))).epsilon(1e-8));
  // e^{bx}: int e^{2bx - 2x^2} = sqrt(pi/2) e^{b^2/2}
  CHECK(weighted_norm(f, ExpWeight{0.6}) ==
        doctest::Approx(std::sqrt(std::sqrt(pi / 2) * std::exp(0.18))).epsilon(1e-10));
}

TEST_CASE("lp_norm") {
  const auto g = SpectralGrid::create(1024, 40.0);
  const SpectralField f = sample(g, [](double x) { return std::exp(-x * x); });
  const auto u = to_physical(f);
  // int e^{-q x^2} = sqrt(pi / q)
  for (double q : {1.0, 2.0, 3.0, 4.0, 6.0}) {
    CHECK(lp_norm(u, *g, q) == doctest::Approx(std::pow(std::sqrt(pi / q), 1.0 / q)).epsilon(1e-10));
  }
  CHECK(lp_norm(u, *g, kInf) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mixed_norm: constant-in-time fields and Fubini") {
  const auto g = SpectralGrid::create(256, 30.0);
  const SpectralField f = sample(g, [](double x) { return (1.0 + x) * std::exp(-x * x / 3.0); });
  const double T = 0.7;
  const Trajectory tr = constant_trajectory(f, T, 16);
  const double l2 = coefficient_l2(f);

  for (NormOrder order : {NormOrder::TOuterXInner, NormOrder::XOuterTInner}) {
    CHECK(mixed_norm(tr, 2.0, 2.0, {}, order) == doctest::Approx(std::sqrt(T) * l2).epsilon(1e-12));
  }
  CHECK(mixed_norm(tr, 2.0, 4.0, {}, NormOrder::TOuterXInner) ==
        doctest::Approx(std::sqrt(T) * lp_norm(to_physical(f), *g, 4.0)).epsilon(1e-12));
  CHECK(mixed_norm(tr, kInf, 2.0, {}, NormOrder::TOuterXInner) == doctest::Approx(l2).epsilon(1e-12));
  CHECK(mixed_norm(tr, kInf, 2.0, {}, NormOrder::XOuterTInner) ==
        doctest::Approx(std::sqrt(T) * lp_norm(to_physical(f), *g, kInf)).epsilon(1e-12));

  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;
  const Trajectory lin = linear_solve(f, phi, 0.5, 32);
  for (double q : {2.0, 3.0, 4.0}) {
    const double a = mixed_norm(lin, q, q, {SpatialOpKind::Dx}, NormOrder::TOuterXInner);
    const double b = mixed_norm(lin, q, q, {SpatialOpKind::Dx}, NormOrder::XOuterTInner);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }

  Trajectory empty = tr;
  empty.snapshots.clear();
  empty.times.clear();
  CHECK_THROWS_AS(mixed_norm(empty, 2.0, 2.0, {}, NormOrder::TOuterXInner), ValidationError);
}

TEST_CASE("lambda_2 of a linear trajectory against a fine quadrature") {
  const auto g = SpectralGrid::create(128, 40.0);
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;
  const SpectralField u0 = gaussian(g, 0.0, 2.0);
  const double T = 0.1;
  const Trajectory tr = linear_solve(u0, phi, T, 1024);
  const LambdaValues lv = lambda_values(tr, 0.0, std::nullopt, std::nullopt);
  REQUIRE(lv.lambda[1].has_value());

  // Simpson in t over 256 intervals of ||V(t) u0||_{L^4}^2, with the
  // propagated coefficients summed term by term.
  const std::size_t m = 256;
  const auto xi = g->wavenumbers();
  double acc = 0.0;
  for (std::size_t k = 0; k <= m; ++k) {
    const double t = T * k / m;
    std::vector<cplx> c(u0.coeffs().begin(), u0.coeffs().end());
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j == g->nyquist_index()) {
        if (t > 0.0) c[j] = 0.0;
        continue;
      }
      c[j] *= std::exp(cplx(t * phase_eval(phi, xi[j]), t * xi[j] * xi[j] * xi[j]));
    }
    const double w = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * std::pow(direct_l4(SpectralField(g, c, true)), 2);
  }
  const double oracle = std::sqrt(acc * T / (3.0 * m)) / A2(phi, T);
  CHECK(*lv.lambda[1] == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("verify_smoothing") {
  const auto g = SpectralGrid::create(256, 40.0);
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;

  SUBCASE("zero data gives ratio 0") {
    SmoothingSetup st;
    CHECK(smoothing_ratio(st, phi, SpectralField::zero(g)) == 0.0);
  }
  SUBCASE("C4 with s = 0 is bounded by the linear growth") {
    SmoothingSetup st;
    st.kind = SmoothingCase::C4;
    st.s = 0.0;
    const NormEnsembleReport r = verify_smoothing(st, phi, g, 12, 3);
    CHECK(r.sample_count == 12);
    for (double v : r.ratios) {
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);
    }
  }
  SUBCASE("ratios are invariant under scaling of the data") {
    SmoothingSetup st;
    st.kind = SmoothingCase::C2;
    st.s = 1.0;
    const NormEnsembleReport a = verify_smoothing(st, phi, g, 8, 5);
    const NormEnsembleReport b = verify_smoothing(st, phi, g, 8, 5, 37.5);
    for (std::size_t i = 0; i < a.ratios.size(); ++i) {
      CHECK(b.ratios[i] == doctest::Approx(a.ratios[i]).epsilon(1e-12));
    }
  }
  SUBCASE("C2 fitted constant is stable across ensembles") {
    SmoothingSetup st;
    st.kind = SmoothingCase::C2;
    st.s = 1.0;
    st.b = 4.0;
    st.T = 0.5;
    const double c1 = verify_smoothing(st, phi, g, 100, 1).max_ratio;
    const double c2 = verify_smoothing(st, phi, g, 100, 2).max_ratio;
    CHECK(std::isfinite(c1));
    CHECK(std::abs(c1 - c2) <= 0.2 * std::max(c1, c2));
  }
  SUBCASE("C2 ratios stay bounded as T shrinks") {
    SmoothingSetup st;
    st.kind = SmoothingCase::C2;
    st.s = 1.0;
    double first = 0.0;
    for (double T : {0.5, 0.25, 0.125}) {
      st.T = T;
      const double c = verify_smoothing(st, phi, g, 16, 9).max_ratio;
      if (first == 0.0) first = c;
      CHECK(c <= 2.0 * first);
    }
  }
  SUBCASE("every case runs inside its hypothesis") {
    for (SmoothingCase k : {SmoothingCase::C1, SmoothingCase::C2, SmoothingCase::C3,
                            SmoothingCase::C4, SmoothingCase::PInf}) {
      SmoothingSetup st;
      st.kind = k;
      st.s = 0.5;
      const NormEnsembleReport r = verify_smoothing(st, phi, g, 4, 7);
      CAPTURE(r.inequality_id);
      CHECK(std::isfinite(r.max_ratio));
      CHECK(r.max_ratio > 0.0);
      CHECK(r.fitted_constant == r.max_ratio);
    }
  }
  SUBCASE("hypothesis violations are rejected") {
    SmoothingSetup st;
    st.kind = SmoothingCase::C4;
    st.s = 2.0;  // s >= p/2
    CHECK_THROWS_AS(verify_smoothing(st, phi, g, 4, 1), ValidationError);
    st.kind = SmoothingCase::PInf;
    st.q = 2.5;
    CHECK_THROWS_AS(verify_smoothing(st, phi, g, 4, 1), ValidationError);
    st.kind = SmoothingCase::C2;
    st.s = 3.0;
    CHECK_THROWS_AS(verify_smoothing(st, phi, g, 4, 1), ValidationError);
  }
}

TEST_CASE("smoothing case names") {
  for (SmoothingCase k : {SmoothingCase::C1, SmoothingCase::C2, SmoothingCase::C3,
                          SmoothingCase::C4, SmoothingCase::PInf}) {
    CHECK(parse_smoothing_case(smoothing_case_name(k)) == k);
  }
  CHECK(smoothing_case_name(SmoothingCase::PInf) == "P_inf");
  CHECK_THROWS_AS(parse_smoothing_case("C5"), ValidationError);
}

TEST_CASE("interpolation check") {
  const auto g = SpectralGrid::create(512, 40.0);
  const SpectralField f = sample(g, [](double x) { return std::exp(-x * x / 2.0) * (1.0 + 0.3 * x); });
  for (double theta : {0.25, 0.5, 0.75}) {
    const double r = interpolation_check(f, 1.0, 1.0, theta);
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
  }

  SpectralField twice = f;
  twice *= 2.0;
  CHECK(interpolation_check(twice, 1.0, 1.0, 0.5) ==
        doctest::Approx(interpolation_check(f, 1.0, 1.0, 0.5)).epsilon(1e-12));
  CHECK(interpolation_check(SpectralField::zero(g), 1.0, 1.0, 0.5) == 0.0);
  CHECK_THROWS_AS(interpolation_check(f, 1.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("ensembles at different seeds share no samples") {
  const auto g = SpectralGrid::create(128, 40.0);
  for (std::uint64_t a = 0; a < 8; ++a) {
    for (std::uint64_t b = 0; b < 8; ++b) {
      CHECK(sample_seed(1, a) != sample_seed(2, b));
    }
  }
  CHECK(coefficient_l2(gaussian_mixture(g, 1, 1) - gaussian_mixture(g, 2, 0)) > 0.0);
  CHECK(coefficient_l2(gaussian_mixture(g, 3, 4) - gaussian_mixture(g, 3, 4)) == 0.0);
}
