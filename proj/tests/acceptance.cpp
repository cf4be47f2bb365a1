// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "dklb/brackets.hpp"
#include "dklb/cli.hpp"
#include "dklb/conjugation.hpp"
#include "dklb/ensemble.hpp"
#include "dklb/error.hpp"
#include "dklb/etdrk4.hpp"
#include "dklb/norms.hpp"
#include "dklb/picard.hpp"
#include "dklb/solver.hpp"

using namespace dklb;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double rel_spread(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

Verdict conjugation_identity() {
  const GridPtr g = SpectralGrid::create(1024, 80.0);
  const SpectralField f = gaussian(g, -10.0, 2.0);
  double worst_rel = 0.0, worst_form = 0.0;
  for (double b : {0.25, 0.5}) {
    for (double t : {0.05, 0.1}) {
      worst_rel = std::max(worst_rel, conjugation_check(f, b, 1.0, t).rel_error);
      const auto direct = conjugated_multiplier(b, 1.0, t, g->wavenumbers());
      const auto expanded = conjugated_multiplier_expanded(b, 1.0, t, g->wavenumbers());
      for (std::size_t k = 0; k < direct.size(); ++k) {
        worst_form = std::max(worst_form, std::abs(direct[k] - expanded[k]) / std::max(1.0, std::abs(direct[k])));
      }
    }
  }
  return {worst_rel <= 1e-7 && worst_form <= 1e-12,
          "max rel_error=" + fmt("%.3e", worst_rel) + ", max multiplier form gap=" + fmt("%.3e", worst_form)};
}

Verdict bracket_engine() {
  const auto pairs = standard_test_pairs();
  double worst = 0.0;
  std::size_t checks = 0;
  for (int n = 0; n <= 6; ++n) {
    for (int m = 0; m < n; ++m) {
      for (int a = 0; a <= 3; ++a) {
        const Bracket b = Bracket::make(n, m, a);
        const BracketExpression e = reduce(b);
        for (const TestPair& p : pairs) {
          const double lhs = eval_numeric(b, p.u, p.rho);
          worst = std::max(worst, std::abs(lhs - eval_numeric(e, p.u, p.rho)) / std::max(1.0, std::abs(lhs)));
          ++checks;
        }
      }
    }
  }
  bool base = true;
  for (int a = 0; a <= 3; ++a) {
    BracketExpression e21, e20;
    e21.add(Rational(-1, 2), 1, a + 1);
    e20.add(Rational(-1), 1, a);
    e20.add(Rational(1, 2), 0, a + 2);
    base = base && reduce({2, 1, a}) == e21 && reduce({2, 0, a}) == e20;
  }
  bool structure = true;
  for (int n = 0; n <= 7; ++n) {
    for (int m = 0; m <= n; ++m) {
      for (int a = 0; a <= 3; ++a) {
        const Bracket b = Bracket::make(n, m, a);
        structure = structure && check_proposition_form(b, reduce(b)).ok;
      }
    }
  }
  for (int k = 2; k <= 7; ++k) structure = structure && check_coefficient_recursion(k).ok;
  return {worst <= 1e-8 && base && structure,
          std::to_string(checks) + " checks, max scaled residual=" + fmt("%.3e", worst) +
              ", base cases " + (base ? "exact" : "MISMATCH") + ", structure " + (structure ? "ok" : "BROKEN")};
}

Verdict multiplier_bounds() {
  std::vector<PhaseFunction> presets{make_preset(PresetKind::KdVB, 1.0).phase, make_preset(PresetKind::OST, 1.0).phase,
                                     make_preset(PresetKind::KdVKS, 1.0).phase};
  for (int k = 2; k <= 4; ++k) presets.push_back(make_preset(PresetKind::Optimality, 1.0, k).phase);
  std::size_t violations = 0, checked = 0;
  for (const PhaseFunction& phi : presets) {
    const double M = find_M(phi);
    for (const auto& [n, L] : {std::pair{1024, 80.0}, std::pair{4096, 40.0}}) {
      const GridPtr g = SpectralGrid::create(n, L);
      for (double t : {0.01, 0.1, 1.0}) {
        const auto m = grid_semigroup_multiplier(phi, t, *g);
        for (std::size_t k = 0; k < m.size(); ++k) {
          const double xi = std::abs(g->wavenumbers()[k]);
          if (xi < M) continue;
          ++checked;
          if (std::abs(m[k]) > std::exp(-phi.eta() * t * std::pow(xi, phi.p()) / 2.0)) ++violations;
        }
      }
    }
  }
  return {violations == 0 && checked > 0,
          std::to_string(checked) + " modes checked, " + std::to_string(violations) + " violations"};
}

Verdict picard_fixed_point() {
  const GridPtr g = SpectralGrid::create(256, 40.0);
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;
  const SpectralField u0 = gaussian(g, 0.0, 2.0, 0.1);
  const double T = 0.1;
  PicardOptions opts;
  opts.nt = 64;
  opts.tol = 1e-8;
  const PicardResult res = picard_solve(u0, phi, T, opts);
  const ContractionReport& rep = res.report;
  double worst_ratio = 0.0;
  for (std::size_t i = 2; i < rep.iterate_distances.size(); ++i) {
    worst_ratio = std::max(worst_ratio, rep.iterate_distances[i] / rep.iterate_distances[i - 1]);
  }
  const Trajectory ref = etdrk4_solve(u0, phi, T, 1e-3);
  double gap = 0.0;
  std::size_t shared = 0;
  for (std::size_t k = 0; k < res.trajectory.size(); ++k) {
    const double pos = res.trajectory.times[k] / ref.dt;
    const auto j = static_cast<std::size_t>(std::llround(pos));
    if (std::abs(pos - static_cast<double>(j)) > 1e-9) continue;
    ++shared;
    gap = std::max(gap, coefficient_l2(res.trajectory.snapshots[k] - ref.snapshots[j]));
  }
  return {rep.converged && rep.iterations <= 20 && worst_ratio <= 0.9 && gap <= 1e-6 && shared >= 2,
          "iterations=" + std::to_string(rep.iterations) + ", max ratio after iterate 2=" + fmt("%.3f", worst_ratio) +
              ", sup L2 gap to ETDRK4 over " + std::to_string(shared) + " shared times=" + fmt("%.3e", gap)};
}

Verdict etdrk4_convergence() {
  const GridPtr g = SpectralGrid::create(128, 40.0);
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;
  const SpectralField u0 = gaussian(g, 0.0, 1.5, 10.0);
  const double T = 0.2;
  auto final_state = [&](double dt) {
    return etdrk4_solve(u0, phi, T, dt, {true, static_cast<std::size_t>(std::llround(T / dt))}).snapshots.back();
  };
  const SpectralField ref = final_state(5e-4);
  std::vector<double> err;
  for (double dt : {4e-3, 2e-3, 1e-3}) err.push_back(coefficient_l2(final_state(dt) - ref));
  double min_order = INFINITY;
  for (std::size_t i = 1; i < err.size(); ++i) min_order = std::min(min_order, std::log2(err[i - 1] / err[i]));

  const SpectralField w0 = gaussian(SpectralGrid::create(256, 40.0), 1.0, 2.0, 1.0);
  const Trajectory lin = etdrk4_solve(w0, phi, 0.5, 1e-2, {false, 1});
  double lin_gap = 0.0;
  for (std::size_t k = 0; k < lin.size(); ++k) {
    lin_gap = std::max(lin_gap, coefficient_l2(lin.snapshots[k] - apply_semigroup(phi, lin.times[k], w0)));
  }
  return {min_order >= 3.5 && lin_gap <= 1e-10,
          "min observed order=" + fmt("%.3f", min_order) + ", linear mode gap=" + fmt("%.3e", lin_gap)};
}

Verdict kdvb_dissipation() {
  const GridPtr g = SpectralGrid::create(256, 40.0);
  const double eta = 1.0, dt = 1e-3;
  const PhaseFunction phi = make_preset(PresetKind::KdVB, eta).phase;
  const Trajectory tr = etdrk4_solve(gaussian(g, 0.0, 2.0, 1.0), phi, 1.0, dt);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < tr.size(); ++k) {
    const double e = std::pow(coefficient_l2(tr.snapshots[k]), 2);
    const double rate =
        (std::pow(coefficient_l2(tr.snapshots[k + 1]), 2) - std::pow(coefficient_l2(tr.snapshots[k - 1]), 2)) /
        (2.0 * dt);
    const double diss = 2.0 * eta * std::pow(coefficient_l2(derivative(tr.snapshots[k], 1)), 2);
    worst = std::max(worst, std::abs(rate + diss) / e);
  }
  return {worst <= 1e-4, std::to_string(tr.size() - 2) + " steps, max |d/dt|u|^2 + 2 eta |u_x|^2| / |u|^2=" +
                             fmt("%.3e", worst)};
}

Verdict smoothing_stability() {
  const GridPtr g = SpectralGrid::create(256, 40.0);
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;
  double worst_spread = 0.0, worst_scale = 0.0;
  std::string worst_case;
  for (SmoothingCase k :
       {SmoothingCase::C1, SmoothingCase::C2, SmoothingCase::C3, SmoothingCase::C4, SmoothingCase::PInf}) {
    SmoothingSetup st;
    st.kind = k;
    st.s = 0.5;
    const NormEnsembleReport a = verify_smoothing(st, phi, g, 100, 1);
    const NormEnsembleReport b = verify_smoothing(st, phi, g, 100, 2);
    const double spread = rel_spread(a.fitted_constant, b.fitted_constant);
    if (spread >= worst_spread) {
      worst_spread = spread;
      worst_case = a.inequality_id;
    }
    const NormEnsembleReport scaled = verify_smoothing(st, phi, g, 100, 1, 1e3);
    for (std::size_t i = 0; i < a.ratios.size(); ++i) {
      worst_scale = std::max(worst_scale, std::abs(scaled.ratios[i] - a.ratios[i]) / a.ratios[i]);
    }
  }
  return {worst_spread <= 0.2 && worst_scale <= 1e-12,
          "5 cases, worst seed spread=" + fmt("%.3f", worst_spread) + " (" + worst_case +
              "), max scaling deviation=" + fmt("%.3e", worst_scale)};
}

Verdict exchange_inequality() {
  const GridPtr g = SpectralGrid::create(256, 40.0);
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;
  const std::vector<double> ts{0.1, 0.5, 1.0};
  const auto a = weight_exchange_ensemble(phi, g, 0.5, 1.5, ts, 50, 1);
  const auto b = weight_exchange_ensemble(phi, g, 0.5, 1.5, ts, 50, 2);
  bool finite = true;
  double spread = 0.0;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    for (double r : a[j].ratios) finite = finite && std::isfinite(r);
    for (double r : b[j].ratios) finite = finite && std::isfinite(r);
    spread = std::max(spread, rel_spread(a[j].max_ratio, b[j].max_ratio));
  }
  bool enforced = false;
  try {
    (void)weight_exchange_ensemble(phi, g, 0.6, 1.5, ts, 2, 1);
  } catch (const ValidationError&) {
    enforced = true;
  }
  return {finite && spread <= 0.2 && enforced,
          std::string("ratios ") + (finite ? "finite" : "NOT finite") + ", max-ratio seed spread=" +
              fmt("%.3f", spread) + ", r > s/(p-1) " + (enforced ? "rejected" : "ACCEPTED")};
}

Verdict existence_rule() {
  const PhaseFunction phi = make_preset(PresetKind::KdVKS, 1.0).phase;
  const double s = 0.0;
  const std::vector<double> norms{0.01, 0.1, 1.0}, cstars{0.5, 1.0, 2.0};
  std::vector<std::vector<double>> T(norms.size(), std::vector<double>(cstars.size()));
  bool posteriori = true;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    for (std::size_t j = 0; j < cstars.size(); ++j) {
      const ExistenceTime e = existence_time(norms[i], phi, s, cstars[j]);
      T[i][j] = e.T0;
      const double threshold = 1.0 / (2.0 * cstars[j] * e.z0);
      posteriori = posteriori && e.T0 <= 1.0 && e.T0 > 0.0 && A2(phi, e.T0) + A3(phi, s, e.T0) < threshold;
    }
  }
  bool monotone = true;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    for (std::size_t j = 0; j < cstars.size(); ++j) {
      if (i > 0) monotone = monotone && T[i][j] <= T[i - 1][j];
      if (j > 0) monotone = monotone && T[i][j] <= T[i][j - 1];
    }
  }
  return {posteriori && monotone, "9 settings, a posteriori " + std::string(posteriori ? "ok" : "VIOLATED") +
                                      ", monotone " + (monotone ? "ok" : "VIOLATED") + ", T0 range [" +
                                      fmt("%.4g", T.back().back()) + ", " + fmt("%.4g", T.front().front()) + "]"};
}

Verdict replay_determinism() {
  const fs::path root = fs::temp_directory_path() / ("dklb_acceptance_replay_" + std::to_string(::getpid()));
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> runs{
      {"simulate", "--set", "output.save_every=10", "--set", "weights.list=poly:1, bracket:2"},
      {"picard"},
      {"verify-bracket", "--max-n", "4"},
      {"verify-smoothing", "--set", "ensemble.size=20", "--set", "ensemble.seed=5"},
      {"conjugate-check"},
      {"decay-experiment", "--set", "decay.N=256", "--set", "ensemble.size=10"},
      {"existence-time", "--set", "existence.norms=0.01, 0.1, 1"},
      {"convergence"},
  };
  std::ostringstream sink;
  std::size_t compared = 0, identical = 0;
  std::string failed;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path first = root / ("run" + std::to_string(i));
    const fs::path again = root / ("replay" + std::to_string(i));
    std::vector<std::string> args{"dklb"};
    args.insert(args.end(), runs[i].begin(), runs[i].end());
    args.insert(args.end(), {"--out", first.string()});
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    const int code = run(static_cast<int>(argv.size()), argv.data(), sink, sink);
    const std::string manifest = (first / "manifest.json").string();
    const std::string again_str = again.string();
    const char* replay_argv[] = {"dklb", "replay", manifest.c_str(), "--out", again_str.c_str()};
    const int replay_code = code == kExitOk ? run(5, replay_argv, sink, sink) : -1;
    if (code != kExitOk || replay_code != kExitOk) failed += " " + runs[i][0];
    for (const auto& entry : fs::directory_iterator(first)) {
      if (entry.path().extension() != ".csv") continue;
      ++compared;
      std::ifstream a(entry.path(), std::ios::binary), b(again / entry.path().filename(), std::ios::binary);
      std::stringstream sa, sb;
      sa << a.rdbuf();
      sb << b.rdbuf();
      if (sa.str() == sb.str() && !sa.str().empty()) {
        ++identical;
      } else {
        failed += " " + entry.path().filename().string();
      }
    }
  }
  fs::remove_all(root);
  return {failed.empty() && compared == identical && compared > 0,
          std::to_string(identical) + "/" + std::to_string(compared) + " CSVs byte-identical after replay" +
              (failed.empty() ? "" : "; failed:" + failed)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"conjugation identity", conjugation_identity},
      {"bracket engine", bracket_engine},
      {"multiplier bounds", multiplier_bounds},
      {"Picard fixed point", picard_fixed_point},
      {"ETDRK4 self-convergence", etdrk4_convergence},
      {"KdVB dissipation identity", kdvb_dissipation},
      {"smoothing ratio stability", smoothing_stability},
      {"exchange inequality", exchange_inequality},
      {"existence-time rule", existence_rule},
      {"replay determinism", replay_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": " << v.detail
              << fmt(" [%.1fs]", secs) << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
